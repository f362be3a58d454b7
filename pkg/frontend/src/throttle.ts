// Outbound pose throttle: at most maxRateHz emissions, coalescing to the
// most recent value. The clock is injected so tests are deterministic.

export interface Emitter<T> {
  (value: T, tMs: number): void;
}

export class CoalescingThrottle<T> {
  private minIntervalMs: number;
  private lastEmitMs = -Infinity;
  private pending: T | null = null;

  constructor(
    private emit: Emitter<T>,
    maxRateHz: number,
  ) {
    this.minIntervalMs = 1000 / maxRateHz;
  }

  /** Offer a new value at time tMs; emits now or coalesces. */
  offer(value: T, tMs: number): void {
    if (tMs - this.lastEmitMs >= this.minIntervalMs) {
      this.lastEmitMs = tMs;
      this.pending = null;
      this.emit(value, tMs);
    } else {
      this.pending = value;
    }
  }

  /** Emit the coalesced value if the interval has elapsed. */
  flush(tMs: number): void {
    if (this.pending !== null && tMs - this.lastEmitMs >= this.minIntervalMs) {
      const value = this.pending;
      this.pending = null;
      this.lastEmitMs = tMs;
      this.emit(value, tMs);
    }
  }
}
