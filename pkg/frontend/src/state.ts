// UI state and its pure update functions. Rendering consumes this state
// only, so identical states draw identical scenes.

import {
  ErrorReportJson,
  ServerMsg,
  ShapeMsg,
} from './protocol.js';

export const SPOT_FRESH_MS = 250;
export const TRAIL_WINDOW_MS = 2000;

export interface TrailPoint {
  xMm: number;
  yMm: number;
  tMs: number;
}

export interface UiState {
  connection: 'connecting' | 'online' | 'offline';
  shape: ShapeMsg | null;
  spot: { xMm: number; yMm: number; recvMs: number } | null;
  trail: TrailPoint[];
  penDown: boolean;
  report: ErrorReportJson | null;
  lastError: string | null;
}

export function initialState(): UiState {
  return {
    connection: 'connecting',
    shape: null,
    spot: null,
    trail: [],
    penDown: false,
    report: null,
    lastError: null,
  };
}

export function pruneTrail(trail: TrailPoint[], nowMs: number): TrailPoint[] {
  return trail.filter((p) => nowMs - p.tMs <= TRAIL_WINDOW_MS);
}

/** Fold one server frame into the state (pure: returns a new state). */
export function applyServerFrame(state: UiState, msg: ServerMsg, nowMs: number): UiState {
  switch (msg.type) {
    case 'session_start':
      return { ...state, connection: 'online', report: null };
    case 'shape':
      return { ...state, shape: msg };
    case 'spot': {
      const trail = pruneTrail(
        [...state.trail, { xMm: msg.x_mm, yMm: msg.y_mm, tMs: nowMs }],
        nowMs,
      );
      return { ...state, spot: { xMm: msg.x_mm, yMm: msg.y_mm, recvMs: nowMs }, trail };
    }
    case 'session_end':
      return { ...state, report: msg.report };
    case 'error':
      return { ...state, lastError: `${msg.code}: ${msg.message}` };
    default:
      return state;
  }
}

export function spotFresh(state: UiState, nowMs: number): boolean {
  return state.spot !== null && nowMs - state.spot.recvMs < SPOT_FRESH_MS;
}

/** Fading alpha for a trail point (1 newest, 0 at the window edge). */
export function trailAlpha(point: TrailPoint, nowMs: number): number {
  const age = nowMs - point.tMs;
  return Math.max(0, 1 - age / TRAIL_WINDOW_MS);
}

export function formatReport(report: ErrorReportJson): string {
  if (report.rmse_um == null) {
    return 'session incomplete';
  }
  const rmse = `RMSE ${report.rmse_um.toFixed(1)} um`;
  const max = report.max_um != null ? `, max ${report.max_um.toFixed(1)} um` : '';
  const t =
    report.execution_time_s != null ? `, ${report.execution_time_s.toFixed(2)} s` : '';
  return rmse + max + t;
}
