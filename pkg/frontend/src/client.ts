// Session client: owns the UI state, translates pointer events into pose
// frames (pen down only, throttled), and folds server frames back in.
// The socket is injected behind a minimal interface so the logic runs
// under tests without a browser or network.

import { CanvasRect, canvasToPose } from './normalize.js';
import {
  makePose,
  makeSessionEnd,
  makeShapeRequest,
  parseServerFrame,
} from './protocol.js';
import { applyServerFrame, initialState, UiState } from './state.js';
import { CoalescingThrottle } from './throttle.js';

export const MAX_POSE_RATE_HZ = 250;

export interface SocketLike {
  send(text: string): void;
}

export interface Clock {
  (): number;  // milliseconds
}

export class TabletClient {
  state: UiState = initialState();
  private seq = 0;
  private throttle: CoalescingThrottle<{ x: number; y: number }>;
  private socket: SocketLike | null = null;

  constructor(private now: Clock) {
    this.throttle = new CoalescingThrottle((pose, tMs) => {
      if (this.socket) {
        this.seq += 1;
        this.socket.send(makePose(this.seq, tMs, pose.x, pose.y));
      }
    }, MAX_POSE_RATE_HZ);
  }

  attach(socket: SocketLike): void {
    this.socket = socket;
    this.state = { ...this.state, connection: 'online' };
  }

  detach(): void {
    this.socket = null;
    this.state = { ...this.state, connection: 'offline', penDown: false };
  }

  requestShape(id: string): void {
    this.socket?.send(makeShapeRequest(id));
  }

  endSession(): void {
    if (this.socket) {
      this.seq += 1;
      this.socket.send(makeSessionEnd(this.seq, this.now()));
    }
  }

  /** Fold one raw server frame into the state. */
  onServerText(text: string): void {
    const msg = parseServerFrame(text);
    if (msg) {
      this.state = applyServerFrame(this.state, msg, this.now());
    }
  }

  // -- pointer handling (canvas-local pixel coordinates) -----------------

  pointerDown(xPx: number, yPx: number, rect: CanvasRect): void {
    this.state = { ...this.state, penDown: true };
    this.emitPose(xPx, yPx, rect);
  }

  pointerMove(xPx: number, yPx: number, rect: CanvasRect): void {
    // poses flow only while the pen is down; hold-last-value on lift is
    // the server's behavior, not the client's
    if (!this.state.penDown || !this.socket) return;
    this.emitPose(xPx, yPx, rect);
  }

  pointerUp(): void {
    this.state = { ...this.state, penDown: false };
  }

  /** Drive periodically (e.g. rAF) to flush the coalesced pose. */
  tick(): void {
    this.throttle.flush(this.now());
  }

  private emitPose(xPx: number, yPx: number, rect: CanvasRect): void {
    if (!this.socket) return;
    const pose = canvasToPose(xPx, yPx, rect);
    this.throttle.offer(pose, this.now());
  }
}
