/**
 * DvsGesture conversion: AEDAT 3.1 recordings sliced into labeled gesture
 * segments, emitted as one EVS1 file each.
 *
 * Expected source layout (as distributed):
 *   <src>/user01_fluorescent.aedat         128x128 recordings
 *   <src>/user01_fluorescent_labels.csv    header "class,startTime_usec,endTime_usec"
 *   <src>/trials_to_train.txt              one .aedat filename per line
 *   <src>/trials_to_test.txt
 *
 * Class ids are 1-based in the label CSVs and shifted to 0-based here.
 * The full dataset yields 1341 samples split 1077 / 264.
 */

import * as fs from 'fs';
import * as path from 'path';

import { parseAedat31 } from './aedat31';
import { encodeEvs1, rebase, Event } from './evs1';
import { Manifest, ManifestRow, sha256Hex } from './manifest';

export const SENSOR_SIZE = 128;
export const EXPECTED_SAMPLES = 1341;
export const EXPECTED_TRAIN = 1077;
export const EXPECTED_TEST = 264;

export interface LabelSegment {
  classId: number; // 0-based
  startUs: bigint;
  endUs: bigint;
}

export function parseLabelCsv(text: string): LabelSegment[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || !lines[0].toLowerCase().startsWith('class')) {
    throw new Error(`label csv missing header: ${lines[0] ?? '(empty)'}`);
  }
  return lines.slice(1).filter((l) => l.trim().length > 0).map((line, i) => {
    const [cls, start, end] = line.split(',').map((v) => v.trim());
    const classId = Number(cls) - 1;
    if (!Number.isInteger(classId) || classId < 0) {
      throw new Error(`bad class id on data row ${i}: ${line}`);
    }
    return { classId, startUs: BigInt(start), endUs: BigInt(end) };
  });
}

function readTrialList(src: string, name: string): Set<string> {
  const file = path.join(src, name);
  if (!fs.existsSync(file)) return new Set();
  return new Set(
    fs.readFileSync(file, 'ascii').split(/\r?\n/).map((l) => l.trim()).filter(Boolean),
  );
}

export function sliceSegment(events: Event[], seg: LabelSegment): Event[] {
  return rebase(events.filter((ev) => ev.t >= seg.startUs && ev.t < seg.endUs));
}

export interface ConvertOptions {
  srcDir: string;
  outDir: string;
  log?: (message: string) => void;
}

export function convertDvsGesture(opts: ConvertOptions): Manifest {
  const { srcDir, outDir } = opts;
  const log = opts.log ?? (() => undefined);
  const trainTrials = readTrialList(srcDir, 'trials_to_train.txt');
  const testTrials = readTrialList(srcDir, 'trials_to_test.txt');
  const recordings = fs.readdirSync(srcDir).filter((f) => f.endsWith('.aedat')).sort();
  if (recordings.length === 0) {
    throw new Error(`${srcDir}: no .aedat recordings found`);
  }
  fs.mkdirSync(outDir, { recursive: true });
  const rows: ManifestRow[] = [];
  for (const recording of recordings) {
    const split = trainTrials.has(recording) ? 'train'
      : testTrials.has(recording) ? 'test'
      : 'train'; // unlisted trials default to train
    const labelsFile = recording.replace(/\.aedat$/, '_labels.csv');
    const base = recording.replace(/\.aedat$/, '');
    try {
      const segments = parseLabelCsv(fs.readFileSync(path.join(srcDir, labelsFile), 'ascii'));
      const { events } = parseAedat31(fs.readFileSync(path.join(srcDir, recording)));
      segments.forEach((seg, index) => {
        const slice = sliceSegment(events, seg);
        const rel = path.join(split, `${base}_seg${String(index).padStart(2, '0')}_class${seg.classId}.evs`);
        fs.mkdirSync(path.join(outDir, split), { recursive: true });
        const blob = encodeEvs1({
          sensorWidth: SENSOR_SIZE,
          sensorHeight: SENSOR_SIZE,
          label: seg.classId,
          events: slice,
        });
        fs.writeFileSync(path.join(outDir, rel), blob);
        rows.push({
          file: rel, label: seg.classId, split, signer: '',
          source: recording, events: slice.length, sha256: sha256Hex(blob),
          status: 'ok', note: '',
        });
      });
    } catch (err) {
      log(`skipping ${recording}: ${(err as Error).message}`);
      rows.push({
        file: '', label: '', split, signer: '', source: recording, events: 0,
        sha256: '', status: 'skipped', note: (err as Error).message,
      });
    }
  }
  return { dataset: 'dvsgesture', rows };
}
