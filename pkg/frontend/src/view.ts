// Canvas scene: the trail scrolls down a vertical time axis with the player
// bar pinned to a "now" line; fitts sessions draw the target zone instead of
// a preview band. Geometry helpers are pure so they can be unit tested.

import type { FrameMsg } from "./protocol.js";

export interface Viewport {
  width: number;
  height: number;
  lookbehindS: number; // seconds of trail history below the now line
  previewS: number; // seconds of preview above it (vision delay can be negative)
}

export const DEFAULT_VIEW = { lookbehindS: 2.0, previewS: 1.0 };

export function posToX(pos: number, vp: Viewport): number {
  const clamped = Math.min(1.1, Math.max(-0.1, pos));
  return clamped * vp.width;
}

export function dtToY(dt: number, vp: Viewport): number {
  const pxPerSec = vp.height / (vp.lookbehindS + vp.previewS);
  return (vp.previewS - dt) * pxPerSec;
}

export function nowLineY(vp: Viewport): number {
  return dtToY(0, vp);
}

/** Window samples (dt, pos) to screen points, oldest first. */
export function tracePoints(window: [number, number][], vp: Viewport): { x: number; y: number }[] {
  return window.map(([dt, pos]) => ({ x: posToX(pos, vp), y: dtToY(dt, vp) }));
}

export function zoneRect(
  zone: [number, number],
  vp: Viewport,
): { x: number; y: number; w: number; h: number } {
  const [center, width] = zone;
  const y = nowLineY(vp);
  const x0 = posToX(center - width / 2, vp);
  const x1 = posToX(center + width / 2, vp);
  return { x: x0, y: y - 22, w: x1 - x0, h: 44 };
}

/** Frames-per-second over a one second rolling window. */
export class FpsMeter {
  private stamps: number[] = [];

  tick(nowMs: number): number {
    this.stamps.push(nowMs);
    const cutoff = nowMs - 1000;
    while (this.stamps.length && this.stamps[0] <= cutoff) this.stamps.shift();
    return this.stamps.length;
  }
}

// The subset of CanvasRenderingContext2D the scene uses; lets tests record
// draw calls without a DOM canvas.
export interface SceneCtx {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface SceneState {
  frame: FrameMsg;
  fps: number;
  durationS: number;
}

export function drawScene(ctx: SceneCtx, vp: Viewport, s: SceneState): void {
  const { frame } = s;
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#101418";
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillRect(0, 0, vp.width, vp.height);

  const nowY = nowLineY(vp);
  ctx.strokeStyle = "#2a3340";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, nowY);
  ctx.lineTo(vp.width, nowY);
  ctx.stroke();

  if (frame.zone) {
    const r = zoneRect(frame.zone, vp);
    ctx.fillStyle = "#1d4c33";
    ctx.fillRect(r.x, r.y, r.w, r.h);
    ctx.strokeStyle = "#3fae6f";
    ctx.strokeRect(r.x, r.y, r.w, r.h);
  } else {
    const pts = tracePoints(frame.window, vp);
    if (pts.length > 1) {
      ctx.strokeStyle = "#4f8fd0";
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.moveTo(pts[0].x, pts[0].y);
      for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i].x, pts[i].y);
      ctx.stroke();
    }
  }

  // player bar on the now line
  const px = posToX(frame.player, vp);
  ctx.fillStyle = frame.rest ? "#777777" : "#e8c443";
  ctx.fillRect(px - 14, nowY - 5, 28, 10);

  // bump indicator nudges a tick mark left/right of the bar
  const w = frame.params.w;
  if (w !== 0) {
    ctx.fillStyle = "#d06a4f";
    ctx.fillRect(px + (w > 0 ? 20 : -26), nowY - 3, 6, 6);
  }

  ctx.fillStyle = "#9ab0c4";
  ctx.font = "13px system-ui, sans-serif";
  ctx.fillText(`t ${frame.t.toFixed(1)} / ${s.durationS.toFixed(0)} s`, 10, 18);
  ctx.fillText(
    `R_act ${frame.params.R_act}  T_act ${frame.params.T_act.toFixed(2)}  ` +
      `T_vis ${frame.params.T_vis.toFixed(2)}  R_vis ${frame.params.R_vis}`,
    10,
    36,
  );
  ctx.fillText(`${s.fps} fps`, vp.width - 60, 18);

  if (frame.rest) {
    ctx.globalAlpha = 0.6;
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, vp.width, vp.height);
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#e0e6ec";
    ctx.font = "28px system-ui, sans-serif";
    ctx.fillText("rest", vp.width / 2 - 26, vp.height / 2);
  }
}
