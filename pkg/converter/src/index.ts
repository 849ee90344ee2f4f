export { encodeEvs1, decodeEvs1, rebase, EVS1_MAGIC, UNLABELED } from './evs1';
export type { Event, EventStream } from './evs1';
export { parseAedat31, buildAedat31, findHeaderEnd } from './aedat31';
export { parseAedat20, buildAedat20, DVS128_SIZE } from './aedat20';
export {
  convertDvsGesture,
  parseLabelCsv,
  sliceSegment,
  EXPECTED_SAMPLES,
  EXPECTED_TRAIN,
  EXPECTED_TEST,
  SENSOR_SIZE,
} from './dvsgesture';
export type { ConvertOptions, LabelSegment } from './dvsgesture';
export { convertSlAnimals, parseTagCsv, signerOf, EXPECTED_SIGNERS, EXPECTED_SIGNS } from './slanimals';
export type { TagSegment } from './slanimals';
export { manifestCsv, summarize, sha256Hex, MANIFEST_COLUMNS } from './manifest';
export type { Manifest, ManifestRow } from './manifest';
