// Rumble on bump onsets. The frame params carry the current bump force w;
// a pulse fires whenever its sign changes (including from quiet to active).

export class BumpPulse {
  private lastSign = 0;

  /** Returns the pulse length in ms when this frame's w starts a new bump. */
  next(w: number): number | null {
    const sign = w > 0 ? 1 : w < 0 ? -1 : 0;
    const flipped = sign !== 0 && sign !== this.lastSign;
    this.lastSign = sign;
    if (!flipped) return null;
    // scale with force but stay subtle; w is in screen-units/s^2-ish
    return Math.max(20, Math.min(80, Math.round(Math.abs(w) * 400)));
  }

  reset(): void {
    this.lastSign = 0;
  }
}

/** Fire-and-forget vibration; silently a no-op where unsupported. */
export function vibrate(ms: number): void {
  if (typeof navigator !== "undefined" && "vibrate" in navigator) {
    navigator.vibrate(ms);
  }
}
