// Canvas <-> tablet coordinate mapping. The tablet space is [-1, 1]^2
// with y up; canvas pixel rows grow downward, so the y axis flips.

export interface CanvasRect {
  width: number;
  height: number;
}

export interface Pose {
  x: number;
  y: number;
}

const clamp = (v: number) => Math.max(-1, Math.min(1, v));

/** Normalize a canvas-local pixel position to the tablet square. */
export function canvasToPose(xPx: number, yPx: number, rect: CanvasRect): Pose {
  return {
    x: clamp((2 * xPx) / rect.width - 1),
    y: clamp(1 - (2 * yPx) / rect.height),
  };
}

/** Inverse of canvasToPose (for rendering and round-trip checks). */
export function poseToCanvas(pose: Pose, rect: CanvasRect): { xPx: number; yPx: number } {
  return {
    xPx: ((pose.x + 1) / 2) * rect.width,
    yPx: ((1 - pose.y) / 2) * rect.height,
  };
}

/** Fit-to-canvas scale for the workspace view (px per mm). */
export function viewScale(rect: CanvasRect, spanMm: number): number {
  return Math.min(rect.width, rect.height) / spanMm;
}

/** Workspace mm -> canvas px, centered, y up. */
export function mmToCanvas(
  xMm: number,
  yMm: number,
  rect: CanvasRect,
  spanMm: number,
): { xPx: number; yPx: number } {
  const s = viewScale(rect, spanMm);
  return {
    xPx: rect.width / 2 + xMm * s,
    yPx: rect.height / 2 - yMm * s,
  };
}
