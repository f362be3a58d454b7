// Browser bootstrap: canvas, pointer events, WebSocket, render loop.
// The shape is selected with a ?shape=T1..T5 query parameter.

import { TabletClient } from './client.js';
import { Draw2D } from './scene.js';
import { renderScene, VIEW_SPAN_MM } from './scene.js';
import { viewScale } from './normalize.js';

class CanvasDraw2D implements Draw2D {
  constructor(private ctx: CanvasRenderingContext2D) {}

  clear(width: number, height: number): void {
    this.ctx.fillStyle = '#fafafa';
    this.ctx.fillRect(0, 0, width, height);
  }

  rect(x: number, y: number, w: number, h: number, stroke: string): void {
    this.ctx.strokeStyle = stroke;
    this.ctx.lineWidth = 1;
    this.ctx.strokeRect(x, y, w, h);
  }

  path(points: [number, number][], stroke: string, widthPx: number, alpha = 1): void {
    if (points.length < 2) return;
    this.ctx.globalAlpha = alpha;
    this.ctx.strokeStyle = stroke;
    this.ctx.lineWidth = widthPx;
    this.ctx.lineJoin = 'round';
    this.ctx.beginPath();
    this.ctx.moveTo(points[0][0], points[0][1]);
    for (const [x, y] of points.slice(1)) this.ctx.lineTo(x, y);
    this.ctx.stroke();
    this.ctx.globalAlpha = 1;
  }

  disc(x: number, y: number, r: number, fill: string, alpha = 1): void {
    this.ctx.globalAlpha = alpha;
    this.ctx.fillStyle = fill;
    this.ctx.beginPath();
    this.ctx.arc(x, y, r, 0, 2 * Math.PI);
    this.ctx.fill();
    this.ctx.globalAlpha = 1;
  }

  text(value: string, x: number, y: number, fill: string, font = '12px sans-serif'): void {
    this.ctx.fillStyle = fill;
    this.ctx.font = font;
    this.ctx.fillText(value, x, y);
  }
}

function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const host = params.get('server') ?? `${window.location.hostname || 'localhost'}:8765`;
  return `ws://${host}/ws`;
}

function main(): void {
  const canvas = document.getElementById('workspace') as HTMLCanvasElement;
  const status = document.getElementById('status') as HTMLElement;
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error('no 2d context');
  const draw = new CanvasDraw2D(ctx);
  const client = new TabletClient(() => performance.now());
  const rect = { width: canvas.width, height: canvas.height };
  const shapeId = new URLSearchParams(window.location.search).get('shape') ?? 'T1';

  const ws = new WebSocket(serverUrl());
  ws.onopen = () => {
    client.attach({ send: (t) => ws.send(t) });
    client.requestShape(shapeId);
    status.textContent = `online - shape ${shapeId} - ` +
      `${viewScale(rect, VIEW_SPAN_MM).toFixed(1)} px/mm`;
  };
  ws.onmessage = (ev) => client.onServerText(String(ev.data));
  ws.onclose = () => {
    client.detach();
    status.textContent = 'offline';
  };

  const local = (ev: PointerEvent) => {
    const r = canvas.getBoundingClientRect();
    return {
      x: ((ev.clientX - r.left) / r.width) * rect.width,
      y: ((ev.clientY - r.top) / r.height) * rect.height,
    };
  };
  canvas.addEventListener('pointerdown', (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    const p = local(ev);
    client.pointerDown(p.x, p.y, rect);
  });
  canvas.addEventListener('pointermove', (ev) => {
    const p = local(ev);
    client.pointerMove(p.x, p.y, rect);
  });
  canvas.addEventListener('pointerup', () => client.pointerUp());
  canvas.addEventListener('pointercancel', () => client.pointerUp());

  const endButton = document.getElementById('end-session');
  endButton?.addEventListener('click', () => client.endSession());

  const loop = () => {
    client.tick();
    renderScene(client.state, draw, rect, performance.now());
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);
}

main();
