/** Synthetic source trees in the exact vendor layouts, tiny but format-true. */

import * as fs from 'fs';
import * as path from 'path';

import { buildAedat31 } from '../src/aedat31';
import { buildAedat20 } from '../src/aedat20';
import { Event } from '../src/evs1';

function ev(t: number, x: number, y: number, polarity: number): Event {
  return { t: BigInt(t), x, y, polarity };
}

export interface GestureFixture {
  dir: string;
  /** events per (recording, segment index) */
  segmentEvents: Map<string, number>;
}

export function makeGestureSource(dir: string, corruptOne = false): GestureFixture {
  fs.mkdirSync(dir, { recursive: true });
  const segmentEvents = new Map<string, number>();
  // 4 recordings x 6 labeled segments = 24 samples, enough for a real spot-check
  const recordings = ['user01_led.aedat', 'user02_led.aedat', 'user03_nat.aedat', 'user04_nat.aedat'];
  recordings.forEach((recording, u) => {
    const segments: Array<[number, number, number]> = [];
    for (let seg = 0; seg < 6; seg++) {
      const start = 1000 + seg * 5000 + u * 311;
      segments.push([1 + ((seg + u) % 11), start, start + 3500 + 200 * seg]);
    }
    const events: Event[] = [];
    segments.forEach(([cls, start, end], seg) => {
      const n = 10 + 7 * u + 3 * seg;
      for (let i = 0; i < n; i++) {
        const t = start + Math.floor(((end - start - 1) * i) / n);
        events.push(ev(t, (i * 13 + cls) % 128, (i * 29 + seg) % 128, i % 2));
      }
      segmentEvents.set(`${recording}:${seg}`, n);
    });
    events.sort((a, b) => Number(a.t - b.t));
    fs.writeFileSync(path.join(dir, recording), buildAedat31(events, 16));
    const csv = ['class,startTime_usec,endTime_usec']
      .concat(segments.map(([c, s, e]) => `${c},${s},${e}`))
      .join('\n');
    fs.writeFileSync(path.join(dir, recording.replace('.aedat', '_labels.csv')), csv);
  });
  fs.writeFileSync(path.join(dir, 'trials_to_train.txt'), 'user01_led.aedat\nuser02_led.aedat\nuser03_nat.aedat\n');
  fs.writeFileSync(path.join(dir, 'trials_to_test.txt'), 'user04_nat.aedat\n');
  if (corruptOne) {
    fs.writeFileSync(path.join(dir, 'user99_bad.aedat'), Buffer.from('not aedat'));
    fs.writeFileSync(
      path.join(dir, 'user99_bad_labels.csv'),
      'class,startTime_usec,endTime_usec\n1,0,100\n',
    );
  }
  return { dir, segmentEvents };
}

export interface AnimalsFixture {
  dir: string;
  segmentEvents: Map<string, number>;
}

export function makeAnimalsSource(dir: string): AnimalsFixture {
  const rec = path.join(dir, 'allusers_aedat');
  const tags = path.join(dir, 'tags');
  fs.mkdirSync(rec, { recursive: true });
  fs.mkdirSync(tags, { recursive: true });
  const segmentEvents = new Map<string, number>();
  for (const user of ['user01_imse', 'user02_imse']) {
    const events: Event[] = [];
    let t = 0;
    for (let i = 0; i < 90; i++) {
      t += 37;
      events.push(ev(t, (i * 7) % 128, (i * 11) % 128, i % 2));
    }
    fs.writeFileSync(path.join(rec, `${user}.aedat`), buildAedat20(events));
    const rows = ['class,startTime_ev,endTime_ev'];
    const bounds: Array<[number, number, number]> = [[1, 0, 30], [2, 30, 55], [3, 55, 90]];
    bounds.forEach(([cls, s, e], seg) => {
      rows.push(`${cls},${s},${e}`);
      segmentEvents.set(`${user}:${seg}`, e - s);
    });
    fs.writeFileSync(path.join(tags, `${user}.csv`), rows.join('\n'));
  }
  return { dir, segmentEvents };
}
