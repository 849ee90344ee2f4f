#!/usr/bin/env node
/**
 * evs-convert: convert public DVS datasets to EVS1 plus a manifest.csv.
 *
 *   evs-convert --dataset dvsgesture --src /data/DvsGesture --out out/gesture
 *   evs-convert --dataset sl-animals --src /data/SL-Animals --out out/animals
 */

import * as fs from 'fs';
import * as path from 'path';

import { convertDvsGesture, EXPECTED_SAMPLES, EXPECTED_TRAIN, EXPECTED_TEST } from './dvsgesture';
import { convertSlAnimals, EXPECTED_SIGNERS } from './slanimals';
import { manifestCsv, summarize } from './manifest';

interface Args {
  dataset: string;
  src: string;
  out: string;
}

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = {};
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case '--dataset':
        args.dataset = argv[++i];
        break;
      case '--src':
        args.src = argv[++i];
        break;
      case '--out':
        args.out = argv[++i];
        break;
      case '--help':
      case '-h':
        usage(0);
        break;
      default:
        console.error(`unknown argument: ${argv[i]}`);
        usage(2);
    }
  }
  if (!args.dataset || !args.src || !args.out) usage(2);
  return args as Args;
}

function usage(code: number): never {
  console.log('usage: evs-convert --dataset {dvsgesture, sl-animals} --src DIR --out DIR');
  process.exit(code);
}

export function main(argv = process.argv.slice(2)): void {
  const { dataset, src, out } = parseArgs(argv);
  const log = (message: string) => console.error(message);
  let manifest;
  if (dataset === 'dvsgesture') {
    manifest = convertDvsGesture({ srcDir: src, outDir: out, log });
  } else if (dataset === 'sl-animals') {
    manifest = convertSlAnimals({ srcDir: src, outDir: out, log });
  } else {
    console.error(`unknown dataset ${dataset}`);
    usage(2);
  }
  fs.mkdirSync(out, { recursive: true });
  fs.writeFileSync(path.join(out, 'manifest.csv'), manifestCsv(manifest));
  const counts = summarize(manifest);
  console.log(
    `${dataset}: ${counts.total} samples ` +
    `(train ${counts.train ?? 0}, test ${counts.test ?? 0}, skipped ${counts.skipped})`,
  );
  if (dataset === 'dvsgesture' && counts.total > 0 && counts.total !== EXPECTED_SAMPLES) {
    console.error(
      `note: full DvsGesture should yield ${EXPECTED_SAMPLES} samples ` +
      `(${EXPECTED_TRAIN}/${EXPECTED_TEST} split); got ${counts.total} — partial source?`,
    );
  }
  if (dataset === 'sl-animals' && counts.total > 0) {
    const signers = new Set(manifest.rows.filter((r) => r.status === 'ok').map((r) => r.signer));
    if (signers.size !== EXPECTED_SIGNERS) {
      console.error(`note: full SL-Animals has ${EXPECTED_SIGNERS} signers; got ${signers.size}`);
    }
  }
}

if (require.main === module) {
  main();
}
