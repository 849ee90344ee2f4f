/**
 * AEDAT 2.0 parser for DVS128 address-event recordings (the SL-Animals payload).
 *
 * '#'-prefixed ASCII header lines (first "#!AER-DAT2.0"), then 8-byte
 * big-endian records: u32 address | u32 timestamp (microseconds).
 *
 * DVS128 address layout (jAER convention, which recorded the dataset):
 *   bit 0     polarity (0 = ON, 1 = OFF)
 *   bits 1-7  x, mirrored: x = 127 - ((addr >> 1) & 0x7f)
 *   bits 8-14 y = (addr >> 8) & 0x7f
 *
 * Timestamps are unwrapped across u32 overflow so output t is monotone.
 */

import { Event } from './evs1';
import { findHeaderEnd } from './aedat31';

export const DVS128_SIZE = 128;
const RECORD_BYTES = 8;

export interface Aedat20Contents {
  headerLines: string[];
  events: Event[];
}

export function parseAedat20(buf: Buffer): Aedat20Contents {
  const { end, lines } = findHeaderEnd(buf);
  if (lines.length === 0 || !lines[0].startsWith('#!AER-DAT2.0')) {
    throw new Error(`not an AEDAT 2.0 file (header: ${lines[0] ?? 'missing'})`);
  }
  if ((buf.length - end) % RECORD_BYTES !== 0) {
    throw new Error('truncated record at end of file');
  }
  const events: Event[] = [];
  let wraps = 0n;
  let lastTs = -1;
  for (let offset = end; offset < buf.length; offset += RECORD_BYTES) {
    const address = buf.readUInt32BE(offset);
    const timestamp = buf.readUInt32BE(offset + 4);
    if (lastTs >= 0 && timestamp < lastTs && lastTs - timestamp > 0x80000000) {
      wraps += 1n; // u32 rollover, not reordering
    }
    lastTs = timestamp;
    events.push({
      t: (wraps << 32n) + BigInt(timestamp),
      polarity: (address & 1) === 0 ? 1 : 0,
      x: 127 - ((address >>> 1) & 0x7f),
      y: (address >>> 8) & 0x7f,
    });
  }
  return { headerLines: lines, events };
}

/** Build a minimal valid AEDAT 2.0 byte stream; used by tests and fixtures. */
export function buildAedat20(events: Event[], headerLines = ['#!AER-DAT2.0']): Buffer {
  const header = Buffer.from(headerLines.map((l) => `${l}\r\n`).join(''), 'ascii');
  const body = Buffer.alloc(RECORD_BYTES * events.length);
  events.forEach((ev, i) => {
    const rawPolarity = ev.polarity === 1 ? 0 : 1;
    const address = (rawPolarity | (((127 - ev.x) & 0x7f) << 1) | ((ev.y & 0x7f) << 8)) >>> 0;
    body.writeUInt32BE(address, i * RECORD_BYTES);
    body.writeUInt32BE(Number(ev.t & 0xffffffffn), i * RECORD_BYTES + 4);
  });
  return Buffer.concat([header, body]);
}
