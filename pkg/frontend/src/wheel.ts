// Wheel model shared by every input source. Arrow keys steer at a fixed
// angular rate while held (the wheel stays put on release, like a real one),
// pointer drags add proportionally, a gamepad stick maps absolutely.

export const KEY_RATE_DEG_S = 180;
export const DRAG_GAIN_DEG_PX = 0.4;
export const STICK_DEADZONE = 0.08;

export class Wheel {
  angle = 0;
  left = false;
  right = false;

  constructor(public maxAngle = 90) {}

  private clamp(): void {
    if (this.angle > this.maxAngle) this.angle = this.maxAngle;
    if (this.angle < -this.maxAngle) this.angle = -this.maxAngle;
  }

  /** Integrate held keys over dt; call once per animation frame. */
  step(dtS: number): void {
    const dir = (this.right ? 1 : 0) - (this.left ? 1 : 0);
    if (dir !== 0) {
      this.angle += dir * KEY_RATE_DEG_S * dtS;
      this.clamp();
    }
  }

  drag(dxPx: number): void {
    this.angle += dxPx * DRAG_GAIN_DEG_PX;
    this.clamp();
  }

  /** Absolute stick position in [-1, 1]; ignored inside the deadzone. */
  stick(axis: number): void {
    if (Math.abs(axis) <= STICK_DEADZONE) return;
    this.angle = axis * this.maxAngle;
    this.clamp();
  }

  center(): void {
    this.angle = 0;
  }
}

/** Wire DOM + gamepad events to a Wheel; returns a detach function. */
export function attachWheel(wheel: Wheel, target: HTMLElement): () => void {
  const keydown = (e: KeyboardEvent) => {
    if (e.key === "ArrowLeft") wheel.left = true;
    else if (e.key === "ArrowRight") wheel.right = true;
    else if (e.key === " ") wheel.center();
    else return;
    e.preventDefault();
  };
  const keyup = (e: KeyboardEvent) => {
    if (e.key === "ArrowLeft") wheel.left = false;
    if (e.key === "ArrowRight") wheel.right = false;
  };

  let dragging = false;
  let lastX = 0;
  const pointerdown = (e: PointerEvent) => {
    dragging = true;
    lastX = e.clientX;
    target.setPointerCapture?.(e.pointerId);
  };
  const pointermove = (e: PointerEvent) => {
    if (!dragging) return;
    wheel.drag(e.clientX - lastX);
    lastX = e.clientX;
  };
  const pointerup = () => {
    dragging = false;
  };

  window.addEventListener("keydown", keydown);
  window.addEventListener("keyup", keyup);
  target.addEventListener("pointerdown", pointerdown);
  target.addEventListener("pointermove", pointermove);
  target.addEventListener("pointerup", pointerup);
  target.addEventListener("pointercancel", pointerup);

  let rafId = 0;
  const pollPads = () => {
    const pads = navigator.getGamepads?.() ?? [];
    const gp = pads.find(Boolean);
    if (gp) wheel.stick(gp.axes?.[0] ?? 0);
    rafId = requestAnimationFrame(pollPads);
  };
  if (typeof navigator !== "undefined" && "getGamepads" in navigator) pollPads();

  return () => {
    window.removeEventListener("keydown", keydown);
    window.removeEventListener("keyup", keyup);
    target.removeEventListener("pointerdown", pointerdown);
    target.removeEventListener("pointermove", pointermove);
    target.removeEventListener("pointerup", pointerup);
    target.removeEventListener("pointercancel", pointerup);
    if (rafId) cancelAnimationFrame(rafId);
  };
}
