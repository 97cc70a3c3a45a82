// Menu -> live session -> summary. All state is local to this module; the
// page is a single canvas plus two overlays defined in index.html.

import { BumpPulse, vibrate } from "./haptics.js";
import { ConfigMsg, FrameMsg, SummaryMsg } from "./protocol.js";
import { SessionClient, browserSocket } from "./session.js";
import { DEFAULT_VIEW, FpsMeter, Viewport, drawScene } from "./view.js";
import { Wheel, attachWheel } from "./wheel.js";

interface CatalogScript {
  id: string;
  game: string | null;
  duration_s: number;
  blocks: [number, number, string][];
}

interface Catalog {
  proto_version: number;
  tick_hz: number;
  scripts: CatalogScript[];
  sensitivity: { default: number; min: number; max: number };
}

const el = {
  menu: document.getElementById("menu") as HTMLDivElement,
  scripts: document.getElementById("scripts") as HTMLDivElement,
  subject: document.getElementById("subject") as HTMLInputElement,
  banner: document.getElementById("banner") as HTMLDivElement,
  summary: document.getElementById("summary") as HTMLDivElement,
  results: document.getElementById("results") as HTMLDivElement,
  again: document.getElementById("again") as HTMLButtonElement,
  canvas: document.getElementById("stage") as HTMLCanvasElement,
};

const ctx = el.canvas.getContext("2d")!;
let client: SessionClient | null = null;
let lastFrame: FrameMsg | null = null;
let config: ConfigMsg | null = null;
let detachInput: (() => void) | null = null;

const wheel = new Wheel();
const pulse = new BumpPulse();
const fpsMeter = new FpsMeter();
let fps = 0;

function viewport(): Viewport {
  return { width: el.canvas.width, height: el.canvas.height, ...DEFAULT_VIEW };
}

function flashBanner(text: string): void {
  el.banner.textContent = text;
  el.banner.classList.add("show");
  setTimeout(() => el.banner.classList.remove("show"), 1800);
}

function showSummary(s: SummaryMsg): void {
  const rows = s.blocks
    .filter((b) => b.label !== "rest")
    .map(
      (b) =>
        `<tr><td>${b.label}</td><td>${fmt(b.L1)}</td><td>${fmt(b.L2)}</td>` +
        `<td>${fmt(b.Linf)}</td></tr>`,
    )
    .join("");
  const clientHz = client ? client.measuredFrameHz().toFixed(1) : "?";
  el.results.innerHTML =
    `<p>session <code>${s.session_id}</code> &middot; server ` +
    `${s.measured_hz.toFixed(1)} Hz &middot; client ${clientHz} Hz &middot; ` +
    `log <code>${s.log}</code></p>` +
    `<table><tr><th>block</th><th>L1</th><th>L2</th><th>L&infin;</th></tr>${rows}</table>`;
  el.summary.classList.remove("hidden");
}

function fmt(v: number | null): string {
  return v === null ? "-" : v.toFixed(3);
}

let lastTick = performance.now();
function loop(now: number): void {
  wheel.step((now - lastTick) / 1000);
  lastTick = now;
  fps = fpsMeter.tick(now);
  if (lastFrame && config) {
    drawScene(ctx, viewport(), { frame: lastFrame, fps, durationS: config.duration_s });
  }
  requestAnimationFrame(loop);
}

function startSession(script: CatalogScript): void {
  const subject = el.subject.value.trim() || "anon";
  el.menu.classList.add("hidden");
  el.summary.classList.add("hidden");
  wheel.center();
  pulse.reset();
  const proto = location.protocol === "https:" ? "wss" : "ws";
  const ws = browserSocket(`${proto}://${location.host}/session`);
  client = new SessionClient(
    ws,
    { subject, script: script.id },
    {
      onConfig: (c) => {
        config = c;
        wheel.maxAngle = c.max_angle;
      },
      onFrame: (f) => {
        lastFrame = f;
        const ms = pulse.next(f.params.w);
        if (ms !== null) vibrate(ms);
      },
      onEvent: (e) => flashBanner(e.name === "rest_start" ? "rest" : `block: ${e.label}`),
      onSummary: (s) => showSummary(s),
      onError: (code, message) => flashBanner(`error ${code}: ${message}`),
      onClose: () => {
        detachInput?.();
        detachInput = null;
        el.menu.classList.remove("hidden");
      },
    },
    () => wheel.angle,
  );
  detachInput = attachWheel(wheel, el.canvas);
}

async function boot(): Promise<void> {
  const catalog = (await (await fetch("/catalog")).json()) as Catalog;
  el.scripts.innerHTML = "";
  for (const s of catalog.scripts) {
    const btn = document.createElement("button");
    const game = s.game ? `game ${s.game}` : "custom";
    btn.textContent = `${s.id} (${game}, ${s.duration_s.toFixed(0)} s, ${s.blocks.length} blocks)`;
    btn.addEventListener("click", () => startSession(s));
    el.scripts.appendChild(btn);
  }
  el.again.addEventListener("click", () => {
    el.summary.classList.add("hidden");
    el.menu.classList.remove("hidden");
  });
  requestAnimationFrame(loop);
}

boot().catch((e) => {
  el.scripts.textContent = `failed to load catalog: ${e}`;
});
