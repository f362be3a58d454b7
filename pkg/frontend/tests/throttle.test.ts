import { describe, expect, it } from 'vitest';

import { CoalescingThrottle } from '../src/throttle.js';

describe('coalescing throttle', () => {
  it('caps the emission rate', () => {
    const out: number[] = [];
    const th = new CoalescingThrottle<number>((v) => out.push(v), 250);
    for (let t = 0; t < 1000; t++) {
      th.offer(t, t);
    }
    th.flush(1004);
    expect(out.length).toBeLessThanOrEqual(252);
    expect(out.length).toBeGreaterThanOrEqual(249);
  });

  it('keeps only the most recent pending value', () => {
    const out: number[] = [];
    const th = new CoalescingThrottle<number>((v) => out.push(v), 100);
    th.offer(1, 0);     // emitted immediately
    th.offer(2, 2);     // coalesced
    th.offer(3, 4);     // replaces 2
    th.flush(5);        // still inside the 10 ms interval
    expect(out).toEqual([1]);
    th.flush(10);
    expect(out).toEqual([1, 3]);
  });

  it('emits immediately after a quiet period', () => {
    const out: number[] = [];
    const th = new CoalescingThrottle<number>((v) => out.push(v), 100);
    th.offer(1, 0);
    th.offer(2, 500);
    expect(out).toEqual([1, 2]);
  });
});
