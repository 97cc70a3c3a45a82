// Wire types for the session service. One JSON text message per tick in each
// direction; the server paces, the client answers frames with wheel angles.

export const PROTO_VERSION = 1;

export interface HelloMsg {
  kind: "hello";
  proto_version: number;
  subject: string;
  script: string;
  sensitivity?: number;
}

export interface ConfigMsg {
  kind: "config";
  seq: number;
  proto_version: number;
  session_id: string;
  tick_hz: number;
  n_ticks: number;
  duration_s: number;
  game: string | null;
  sensitivity: number;
  max_angle: number;
  px_scale: number;
  schedule_hash: string;
  config_hash: string;
  blocks: [number, number, string][];
  fitts: [number, number, number][] | null;
}

export interface FrameMsg {
  kind: "frame";
  seq: number;
  t: number;
  player: number;
  x: number;
  u: number;
  window: [number, number][]; // (dt seconds relative to now, trail position)
  params: { R_act: number; T_act: number; T_vis: number; R_vis: number; w: number };
  zone: [number, number] | null; // (center, width)
  rest: boolean;
}

export interface EventMsg {
  kind: "event";
  seq: number;
  t: number;
  name: "block_start" | "rest_start";
  label: string;
}

export interface BlockSummary {
  label: string;
  start_s: number;
  end_s: number;
  n: number;
  L1: number | null;
  L2: number | null;
  Linf: number | null;
}

export interface SummaryMsg {
  kind: "summary";
  seq: number;
  session_id: string;
  log: string;
  measured_hz: number;
  diagnostics: Record<string, number>;
  blocks: BlockSummary[];
}

export interface ErrorMsg {
  kind: "error";
  seq: number;
  code: string;
  message: string;
}

export type ServerMsg = ConfigMsg | FrameMsg | EventMsg | SummaryMsg | ErrorMsg;

export interface InputMsg {
  kind: "input";
  angle: number;
  seq_ack?: number;
}

export class ProtocolError extends Error {}

function need(cond: boolean, what: string): void {
  if (!cond) throw new ProtocolError(`malformed server message: ${what}`);
}

/** Parse and structurally check one server->client message. */
export function parseServerMessage(text: string): ServerMsg {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError("not JSON");
  }
  need(typeof raw === "object" && raw !== null, "not an object");
  const msg = raw as Record<string, unknown>;
  switch (msg.kind) {
    case "config":
      need(msg.proto_version === PROTO_VERSION, `protocol ${msg.proto_version}, want ${PROTO_VERSION}`);
      need(typeof msg.session_id === "string", "config.session_id");
      need(typeof msg.n_ticks === "number", "config.n_ticks");
      need(typeof msg.tick_hz === "number", "config.tick_hz");
      need(Array.isArray(msg.blocks), "config.blocks");
      return msg as unknown as ConfigMsg;
    case "frame": {
      need(typeof msg.seq === "number", "frame.seq");
      need(typeof msg.player === "number", "frame.player");
      need(Array.isArray(msg.window), "frame.window");
      const p = msg.params as Record<string, unknown> | undefined;
      need(!!p && typeof p.w === "number", "frame.params.w");
      return msg as unknown as FrameMsg;
    }
    case "event":
      need(msg.name === "block_start" || msg.name === "rest_start", "event.name");
      return msg as unknown as EventMsg;
    case "summary":
      need(typeof msg.log === "string", "summary.log");
      need(Array.isArray(msg.blocks), "summary.blocks");
      return msg as unknown as SummaryMsg;
    case "error":
      need(typeof msg.code === "string", "error.code");
      return msg as unknown as ErrorMsg;
    default:
      throw new ProtocolError(`unknown kind ${String(msg.kind)}`);
  }
}

export function encodeHello(subject: string, script: string, sensitivity?: number): string {
  const msg: HelloMsg = { kind: "hello", proto_version: PROTO_VERSION, subject, script };
  if (sensitivity !== undefined) msg.sensitivity = sensitivity;
  return JSON.stringify(msg);
}

export function encodeInput(angle: number, seqAck?: number): string {
  const msg: InputMsg = { kind: "input", angle };
  if (seqAck !== undefined) msg.seq_ack = seqAck;
  return JSON.stringify(msg);
}

export function encodeBye(): string {
  return JSON.stringify({ kind: "bye" });
}
