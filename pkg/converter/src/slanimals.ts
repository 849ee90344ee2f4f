/**
 * SL-Animals-DVS conversion: continuous DVS128 AEDAT 2.0 recordings, one per
 * signer, cut into the 19 sign performances by the dataset's tag files.
 *
 * Expected source layout:
 *   <src>/allusers_aedat/user01_imse.aedat     (or .aedat files directly in <src>)
 *   <src>/tags/user01_imse.csv                 header "class,startTime_ev,endTime_ev"
 *
 * Tag rows reference event indices into the recording.  Class ids are
 * 1-based in the tag files and shifted to 0-based.  Signer id is the
 * userNN prefix of the recording name; there is no canonical train/test
 * split (leave-signers-out folds are built downstream), so every row is
 * tagged "train" and fold assignment happens in the consumer.
 */

import * as fs from 'fs';
import * as path from 'path';

import { parseAedat20, DVS128_SIZE } from './aedat20';
import { encodeEvs1, rebase } from './evs1';
import { Manifest, ManifestRow, sha256Hex } from './manifest';
import { ConvertOptions } from './dvsgesture';

export const EXPECTED_SIGNERS = 59;
export const EXPECTED_SIGNS = 19;

export interface TagSegment {
  classId: number; // 0-based
  startEvent: number;
  endEvent: number;
}

export function parseTagCsv(text: string): TagSegment[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || !lines[0].toLowerCase().startsWith('class')) {
    throw new Error(`tag csv missing header: ${lines[0] ?? '(empty)'}`);
  }
  return lines.slice(1).filter((l) => l.trim().length > 0).map((line, i) => {
    const [cls, start, end] = line.split(',').map((v) => Number(v.trim()));
    if (!Number.isInteger(cls) || cls < 1) {
      throw new Error(`bad class id on data row ${i}: ${line}`);
    }
    return { classId: cls - 1, startEvent: start, endEvent: end };
  });
}

export function signerOf(recording: string): string {
  const match = /^(user\d+)/i.exec(path.basename(recording));
  return match ? match[1].toLowerCase() : path.basename(recording, '.aedat');
}

export function convertSlAnimals(opts: ConvertOptions): Manifest {
  const { srcDir, outDir } = opts;
  const log = opts.log ?? (() => undefined);
  const recordingsDir = fs.existsSync(path.join(srcDir, 'allusers_aedat'))
    ? path.join(srcDir, 'allusers_aedat')
    : srcDir;
  const tagsDir = fs.existsSync(path.join(srcDir, 'tags')) ? path.join(srcDir, 'tags') : srcDir;
  const recordings = fs.readdirSync(recordingsDir).filter((f) => f.endsWith('.aedat')).sort();
  if (recordings.length === 0) {
    throw new Error(`${recordingsDir}: no .aedat recordings found`);
  }
  fs.mkdirSync(path.join(outDir, 'train'), { recursive: true });
  const rows: ManifestRow[] = [];
  for (const recording of recordings) {
    const signer = signerOf(recording);
    const base = recording.replace(/\.aedat$/, '');
    try {
      const tagFile = path.join(tagsDir, `${base}.csv`);
      const segments = parseTagCsv(fs.readFileSync(tagFile, 'ascii'));
      const { events } = parseAedat20(fs.readFileSync(path.join(recordingsDir, recording)));
      segments.forEach((seg, index) => {
        const slice = rebase(events.slice(seg.startEvent, seg.endEvent));
        const rel = path.join('train', `${base}_seg${String(index).padStart(2, '0')}_class${seg.classId}.evs`);
        const blob = encodeEvs1({
          sensorWidth: DVS128_SIZE,
          sensorHeight: DVS128_SIZE,
          label: seg.classId,
          events: slice,
        });
        fs.writeFileSync(path.join(outDir, rel), blob);
        rows.push({
          file: rel, label: seg.classId, split: 'train', signer,
          source: recording, events: slice.length, sha256: sha256Hex(blob),
          status: 'ok', note: '',
        });
      });
    } catch (err) {
      log(`skipping ${recording}: ${(err as Error).message}`);
      rows.push({
        file: '', label: '', split: 'train', signer, source: recording, events: 0,
        sha256: '', status: 'skipped', note: (err as Error).message,
      });
    }
  }
  return { dataset: 'sl-animals', rows };
}
