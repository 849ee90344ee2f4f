/**
 * EVS1 event-file encoding and decoding.
 *
 * Layout (little-endian):
 *   magic "EVS1" | u16 sensorWidth | u16 sensorHeight | u32 label | u64 recordCount
 *   then recordCount x { u64 tMicroseconds, u16 x, u16 y, u8 polarity, u8 reserved=0 }
 *
 * label 0xFFFFFFFF means unlabeled.  The byte stream is the interoperability
 * contract with the simulation toolkit and must stay bit-exact.
 */

export const EVS1_MAGIC = 'EVS1';
export const UNLABELED = 0xffffffff;
export const HEADER_BYTES = 20;
export const RECORD_BYTES = 14;

export interface Event {
  /** microseconds since stream start */
  t: bigint;
  x: number;
  y: number;
  /** 0 = off, 1 = on */
  polarity: number;
}

export interface EventStream {
  sensorWidth: number;
  sensorHeight: number;
  label: number | null;
  events: Event[];
}

export function encodeEvs1(stream: EventStream): Buffer {
  const { sensorWidth, sensorHeight, label, events } = stream;
  if (sensorWidth <= 0 || sensorHeight <= 0) {
    throw new Error(`sensor dimensions must be positive, got ${sensorWidth}x${sensorHeight}`);
  }
  const buf = Buffer.alloc(HEADER_BYTES + RECORD_BYTES * events.length);
  buf.write(EVS1_MAGIC, 0, 'ascii');
  buf.writeUInt16LE(sensorWidth, 4);
  buf.writeUInt16LE(sensorHeight, 6);
  buf.writeUInt32LE(label === null ? UNLABELED : label, 8);
  buf.writeBigUInt64LE(BigInt(events.length), 12);
  let offset = HEADER_BYTES;
  let previous = -1n;
  for (const ev of events) {
    if (ev.t < previous) {
      throw new Error('events must be written in non-decreasing t order');
    }
    previous = ev.t;
    if (ev.x >= sensorWidth || ev.y >= sensorHeight) {
      throw new Error(`event at (${ev.x}, ${ev.y}) outside ${sensorWidth}x${sensorHeight} sensor`);
    }
    if (ev.polarity !== 0 && ev.polarity !== 1) {
      throw new Error(`polarity must be 0 or 1, got ${ev.polarity}`);
    }
    buf.writeBigUInt64LE(ev.t, offset);
    buf.writeUInt16LE(ev.x, offset + 8);
    buf.writeUInt16LE(ev.y, offset + 10);
    buf.writeUInt8(ev.polarity, offset + 12);
    buf.writeUInt8(0, offset + 13);
    offset += RECORD_BYTES;
  }
  return buf;
}

export function decodeEvs1(buf: Buffer): EventStream {
  if (buf.length < HEADER_BYTES || buf.toString('ascii', 0, 4) !== EVS1_MAGIC) {
    throw new Error('missing EVS1 magic header');
  }
  const sensorWidth = buf.readUInt16LE(4);
  const sensorHeight = buf.readUInt16LE(6);
  const rawLabel = buf.readUInt32LE(8);
  const count = Number(buf.readBigUInt64LE(12));
  if (buf.length !== HEADER_BYTES + count * RECORD_BYTES) {
    throw new Error(
      `header declares ${count} records but body has ${buf.length - HEADER_BYTES} bytes`,
    );
  }
  const events: Event[] = [];
  for (let i = 0; i < count; i++) {
    const offset = HEADER_BYTES + i * RECORD_BYTES;
    events.push({
      t: buf.readBigUInt64LE(offset),
      x: buf.readUInt16LE(offset + 8),
      y: buf.readUInt16LE(offset + 10),
      polarity: buf.readUInt8(offset + 12),
    });
  }
  return {
    sensorWidth,
    sensorHeight,
    label: rawLabel === UNLABELED ? null : rawLabel,
    events,
  };
}

/** Shift timestamps so the first event sits at t = 0 (clip windows are stream-relative). */
export function rebase(events: Event[]): Event[] {
  if (events.length === 0) return events;
  const t0 = events[0].t;
  return events.map((ev) => ({ ...ev, t: ev.t - t0 }));
}
