// Scene rendering. Drawing goes through the minimal Draw2D surface so
// tests can record the exact operation stream; the browser passes a real
// CanvasRenderingContext2D.

import { mmToCanvas, viewScale, CanvasRect } from './normalize.js';
import { spotFresh, trailAlpha, formatReport, UiState } from './state.js';

export const WORKSPACE_MM = 4.0;       // full side of the reachable square
export const VIEW_SPAN_MM = 4.6;       // workspace plus margin
export const SPOT_DIAMETER_MM = 0.57;

export interface Draw2D {
  clear(width: number, height: number): void;
  rect(x: number, y: number, w: number, h: number, stroke: string): void;
  path(points: [number, number][], stroke: string, widthPx: number, alpha?: number): void;
  disc(x: number, y: number, r: number, fill: string, alpha?: number): void;
  text(value: string, x: number, y: number, fill: string, font?: string): void;
}

/** Draw the whole scene for a state snapshot. Pure in (state, nowMs). */
export function renderScene(
  state: UiState,
  ctx: Draw2D,
  rect: CanvasRect,
  nowMs: number,
): void {
  const s = viewScale(rect, VIEW_SPAN_MM);
  ctx.clear(rect.width, rect.height);

  // workspace bounds, to scale
  const half = (WORKSPACE_MM / 2) * s;
  ctx.rect(rect.width / 2 - half, rect.height / 2 - half, 2 * half, 2 * half, '#666');

  // target shape band plus centerline
  if (state.shape) {
    const toPx = (p: [number, number]): [number, number] => {
      const q = mmToCanvas(p[0], p[1], rect, VIEW_SPAN_MM);
      return [q.xPx, q.yPx];
    };
    const center = state.shape.points_mm.map(toPx);
    ctx.path(center, '#59c', 2 * state.shape.band_mm * s, 0.35);
    ctx.path(center, '#000', 1);
  }

  // spot trail, fading over its window
  for (const p of state.trail) {
    const a = trailAlpha(p, nowMs);
    if (a <= 0) continue;
    const q = mmToCanvas(p.xMm, p.yMm, rect, VIEW_SPAN_MM);
    ctx.disc(q.xPx, q.yPx, Math.max(1, (SPOT_DIAMETER_MM / 4) * s), '#f66', a * 0.5);
  }

  // live spot: only when telemetry is fresh
  if (state.spot && spotFresh(state, nowMs)) {
    const q = mmToCanvas(state.spot.xMm, state.spot.yMm, rect, VIEW_SPAN_MM);
    ctx.disc(q.xPx, q.yPx, (SPOT_DIAMETER_MM / 2) * s, '#e00');
  } else if (state.spot) {
    ctx.text('telemetry stale', 8, 20, '#c60');
  }

  if (state.connection !== 'online') {
    ctx.text(state.connection, 8, rect.height - 10, '#c00');
  }
  if (state.lastError) {
    ctx.text(state.lastError, 8, rect.height - 28, '#c00');
  }
  if (state.report) {
    ctx.text(formatReport(state.report), 8, 40, '#030', 'bold 16px sans-serif');
  }
}

/** Record of draw calls; lets tests compare scenes structurally. */
export class RecordingDraw2D implements Draw2D {
  ops: unknown[] = [];

  clear(width: number, height: number): void {
    this.ops.push(['clear', width, height]);
  }

  rect(x: number, y: number, w: number, h: number, stroke: string): void {
    this.ops.push(['rect', x, y, w, h, stroke]);
  }

  path(points: [number, number][], stroke: string, widthPx: number, alpha = 1): void {
    this.ops.push(['path', points, stroke, widthPx, alpha]);
  }

  disc(x: number, y: number, r: number, fill: string, alpha = 1): void {
    this.ops.push(['disc', x, y, r, fill, alpha]);
  }

  text(value: string, x: number, y: number, fill: string, font = '12px sans-serif'): void {
    this.ops.push(['text', value, x, y, fill, font]);
  }
}
