// Wire schema v1 shared with the teleop bridge: JSON text frames over
// one WebSocket, strictly increasing seq per direction.

export const PROTOCOL_VERSION = 1;

export interface PoseMsg {
  v: number;
  type: 'pose';
  seq: number;
  t_ms: number;
  x: number;
  y: number;
}

export interface SpotMsg {
  v: number;
  type: 'spot';
  seq: number;
  t_ms: number;
  x_mm: number;
  y_mm: number;
}

export interface ShapeMsg {
  v: number;
  type: 'shape';
  id: string;
  points_mm: [number, number][];
  band_mm: number;
}

export interface SessionStartMsg {
  v: number;
  type: 'session_start';
  shape: string;
}

export interface ErrorReportJson {
  rmse_um: number | null;
  max_um: number | null;
  execution_time_s?: number;
  n_samples?: number;
  partial?: boolean;
  [key: string]: unknown;
}

export interface SessionEndMsg {
  v: number;
  type: 'session_end';
  report: ErrorReportJson;
}

export interface ErrorMsg {
  v: number;
  type: 'error';
  code: string;
  message: string;
}

export type ServerMsg =
  | SpotMsg
  | ShapeMsg
  | SessionStartMsg
  | SessionEndMsg
  | ErrorMsg;

export function makePose(seq: number, tMs: number, x: number, y: number): string {
  const clamp = (v: number) => Math.max(-1, Math.min(1, v));
  const msg: PoseMsg = {
    v: PROTOCOL_VERSION,
    type: 'pose',
    seq,
    t_ms: tMs,
    x: clamp(x),
    y: clamp(y),
  };
  return JSON.stringify(msg);
}

export function makeSessionEnd(seq: number, tMs: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type: 'session_end', seq, t_ms: tMs });
}

export function makeShapeRequest(id: string): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type: 'shape', id });
}

/** Parse one server frame; returns null for anything not schema v1. */
export function parseServerFrame(text: string): ServerMsg | null {
  let msg: unknown;
  try {
    msg = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof msg !== 'object' || msg === null) return null;
  const m = msg as Record<string, unknown>;
  if (m.v !== PROTOCOL_VERSION || typeof m.type !== 'string') return null;
  switch (m.type) {
    case 'spot':
      if (typeof m.x_mm === 'number' && typeof m.y_mm === 'number') {
        return m as unknown as SpotMsg;
      }
      return null;
    case 'shape':
      if (Array.isArray(m.points_mm) && typeof m.band_mm === 'number') {
        return m as unknown as ShapeMsg;
      }
      return null;
    case 'session_start':
      return m as unknown as SessionStartMsg;
    case 'session_end':
      if (typeof m.report === 'object' && m.report !== null) {
        return m as unknown as SessionEndMsg;
      }
      return null;
    case 'error':
      return m as unknown as ErrorMsg;
    default:
      return null;
  }
}
