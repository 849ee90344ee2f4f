/**
 * Conversion manifests: one row per emitted (or skipped) sample, with output
 * checksums so a re-read can verify integrity.
 */

import { createHash } from 'crypto';

export interface ManifestRow {
  file: string;
  label: number | '';
  split: string;
  signer: string;
  source: string;
  events: number;
  sha256: string;
  status: 'ok' | 'skipped';
  note: string;
}

export interface Manifest {
  dataset: string;
  rows: ManifestRow[];
}

export const MANIFEST_COLUMNS = [
  'file', 'label', 'split', 'signer', 'source', 'events', 'sha256', 'status', 'note',
] as const;

export function sha256Hex(buf: Buffer): string {
  return createHash('sha256').update(buf).digest('hex');
}

function escapeCsv(value: string): string {
  return /[",\n]/.test(value) ? `"${value.replace(/"/g, '""')}"` : value;
}

export function manifestCsv(manifest: Manifest): string {
  const lines = [MANIFEST_COLUMNS.join(',')];
  for (const row of manifest.rows) {
    lines.push(
      MANIFEST_COLUMNS.map((col) => escapeCsv(String(row[col]))).join(','),
    );
  }
  return lines.join('\n') + '\n';
}

export function summarize(manifest: Manifest): Record<string, number> {
  const counts: Record<string, number> = { total: 0, skipped: 0 };
  for (const row of manifest.rows) {
    if (row.status === 'skipped') {
      counts.skipped += 1;
      continue;
    }
    counts.total += 1;
    counts[row.split] = (counts[row.split] ?? 0) + 1;
  }
  return counts;
}
