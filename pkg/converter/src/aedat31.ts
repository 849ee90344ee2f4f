/**
 * AEDAT 3.1 parser, covering polarity-event packets (the DvsGesture payload).
 *
 * A file is a run of '#'-prefixed ASCII header lines (the first being
 * "#!AER-DAT3.1") followed by binary event packets.  Each packet starts with
 * a 28-byte little-endian header:
 *
 *   i16 eventType | i16 eventSource | i32 eventSize | i32 eventTSOffset |
 *   i32 eventTSOverflow | i32 eventCapacity | i32 eventNumber | i32 eventValid
 *
 * Polarity events (type 1) are 8 bytes: u32 data | i32 timestamp, where data
 * packs bit 0 = valid, bit 1 = polarity, bits 2-16 = y, bits 17-31 = x, and
 * the full microsecond timestamp is (eventTSOverflow << 31) | timestamp.
 */

import { Event } from './evs1';

export const POLARITY_EVENT = 1;
const PACKET_HEADER_BYTES = 28;

export interface Aedat31Contents {
  headerLines: string[];
  events: Event[];
}

export function findHeaderEnd(buf: Buffer): { end: number; lines: string[] } {
  const lines: string[] = [];
  let offset = 0;
  while (offset < buf.length && buf[offset] === 0x23 /* '#' */) {
    let lineEnd = buf.indexOf(0x0a, offset);
    if (lineEnd === -1) lineEnd = buf.length - 1;
    lines.push(buf.toString('ascii', offset, lineEnd + 1).replace(/\r?\n$/, ''));
    offset = lineEnd + 1;
  }
  return { end: offset, lines };
}

export function parseAedat31(buf: Buffer): Aedat31Contents {
  const { end, lines } = findHeaderEnd(buf);
  if (lines.length === 0 || !lines[0].startsWith('#!AER-DAT3.1')) {
    throw new Error(`not an AEDAT 3.1 file (header: ${lines[0] ?? 'missing'})`);
  }
  const events: Event[] = [];
  let offset = end;
  while (offset + PACKET_HEADER_BYTES <= buf.length) {
    const eventType = buf.readInt16LE(offset);
    const eventSize = buf.readInt32LE(offset + 4);
    const eventTSOverflow = buf.readInt32LE(offset + 12);
    const eventNumber = buf.readInt32LE(offset + 20);
    const bodyBytes = eventSize * eventNumber;
    if (eventSize <= 0 || offset + PACKET_HEADER_BYTES + bodyBytes > buf.length) {
      throw new Error(`truncated packet at byte ${offset}`);
    }
    if (eventType === POLARITY_EVENT) {
      for (let i = 0; i < eventNumber; i++) {
        const at = offset + PACKET_HEADER_BYTES + i * eventSize;
        const data = buf.readUInt32LE(at);
        if ((data & 1) === 0) continue; // invalidated event
        const timestamp = buf.readInt32LE(at + 4);
        events.push({
          t: (BigInt(eventTSOverflow) << 31n) | BigInt(timestamp >>> 0),
          polarity: (data >>> 1) & 1,
          y: (data >>> 2) & 0x7fff,
          x: (data >>> 17) & 0x7fff,
        });
      }
    }
    offset += PACKET_HEADER_BYTES + bodyBytes;
  }
  return { headerLines: lines, events };
}

/** Build a minimal valid AEDAT 3.1 byte stream; used by tests and fixtures. */
export function buildAedat31(
  events: Event[],
  packetSize = 256,
  headerLines = ['#!AER-DAT3.1'],
): Buffer {
  const header = Buffer.from(headerLines.map((l) => `${l}\r\n`).join(''), 'ascii');
  const packets: Buffer[] = [header];
  for (let start = 0; start < events.length; start += packetSize) {
    const chunk = events.slice(start, start + packetSize);
    const packet = Buffer.alloc(PACKET_HEADER_BYTES + 8 * chunk.length);
    packet.writeInt16LE(POLARITY_EVENT, 0);
    packet.writeInt16LE(0, 2);
    packet.writeInt32LE(8, 4);
    packet.writeInt32LE(4, 8); // timestamp field offset within the event
    packet.writeInt32LE(0, 12); // no overflow in fixtures
    packet.writeInt32LE(chunk.length, 16);
    packet.writeInt32LE(chunk.length, 20);
    packet.writeInt32LE(chunk.length, 24);
    chunk.forEach((ev, i) => {
      const data = (1 | ((ev.polarity & 1) << 1) | ((ev.y & 0x7fff) << 2) | ((ev.x & 0x7fff) << 17)) >>> 0;
      packet.writeUInt32LE(data, PACKET_HEADER_BYTES + i * 8);
      packet.writeInt32LE(Number(ev.t & 0x7fffffffn), PACKET_HEADER_BYTES + i * 8 + 4);
    });
    packets.push(packet);
  }
  if (events.length === 0) {
    const empty = Buffer.alloc(PACKET_HEADER_BYTES);
    empty.writeInt16LE(POLARITY_EVENT, 0);
    empty.writeInt32LE(8, 4);
    packets.push(empty);
  }
  return Buffer.concat(packets);
}
