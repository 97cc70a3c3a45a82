// Session driver: hello handshake, one input reply per frame, summary at the
// end. Talks through a small socket interface so tests (and the node e2e
// driver) can supply their own transport.

import {
  ConfigMsg,
  EventMsg,
  FrameMsg,
  ProtocolError,
  SummaryMsg,
  encodeHello,
  encodeInput,
  parseServerMessage,
} from "./protocol.js";

export interface WireSocket {
  send(text: string): void;
  close(): void;
  onOpen(cb: () => void): void;
  onMessage(cb: (text: string) => void): void;
  onClose(cb: (code: number) => void): void;
}

export interface SessionOptions {
  subject: string;
  script: string;
  sensitivity?: number;
}

export interface SessionCallbacks {
  onConfig?(c: ConfigMsg): void;
  onFrame?(f: FrameMsg): void;
  onEvent?(e: EventMsg): void;
  onSummary?(s: SummaryMsg): void;
  onError?(code: string, message: string): void;
  onClose?(code: number): void;
}

export interface SessionStats {
  frames: number;
  seqGaps: number; // frames that arrived out of order or skipped a seq
  startedAtMs: number | null;
  lastFrameAtMs: number | null;
}

export class SessionClient {
  config: ConfigMsg | null = null;
  summary: SummaryMsg | null = null;
  readonly stats: SessionStats = { frames: 0, seqGaps: 0, startedAtMs: null, lastFrameAtMs: null };
  private lastSeq = -1;

  constructor(
    private ws: WireSocket,
    opts: SessionOptions,
    private cbs: SessionCallbacks,
    private angle: () => number,
    private now: () => number = () => Date.now(),
  ) {
    ws.onOpen(() => ws.send(encodeHello(opts.subject, opts.script, opts.sensitivity)));
    ws.onMessage((text) => this.handle(text));
    ws.onClose((code) => cbs.onClose?.(code));
  }

  /** Frames per second of wall time, measured over the whole session. */
  measuredFrameHz(): number {
    const { frames, startedAtMs, lastFrameAtMs } = this.stats;
    if (frames < 2 || startedAtMs === null || lastFrameAtMs === null) return 0;
    const span = (lastFrameAtMs - startedAtMs) / 1000;
    return span > 0 ? (frames - 1) / span : 0;
  }

  private handle(text: string): void {
    let msg;
    try {
      msg = parseServerMessage(text);
    } catch (e) {
      if (e instanceof ProtocolError) {
        this.cbs.onError?.("protocol", e.message);
        this.ws.close();
        return;
      }
      throw e;
    }
    switch (msg.kind) {
      case "config":
        this.config = msg;
        this.cbs.onConfig?.(msg);
        break;
      case "frame": {
        const t = this.now();
        if (this.stats.startedAtMs === null) this.stats.startedAtMs = t;
        this.stats.lastFrameAtMs = t;
        this.stats.frames += 1;
        if (msg.seq !== this.lastSeq + 1) this.stats.seqGaps += 1;
        this.lastSeq = msg.seq;
        this.cbs.onFrame?.(msg);
        this.ws.send(encodeInput(this.angle(), msg.seq));
        break;
      }
      case "event":
        this.cbs.onEvent?.(msg);
        break;
      case "summary":
        this.summary = msg;
        this.cbs.onSummary?.(msg);
        break;
      case "error":
        this.cbs.onError?.(msg.code, msg.message);
        break;
    }
  }
}

/** Browser WebSocket wrapped as a WireSocket. */
export function browserSocket(url: string): WireSocket {
  const ws = new WebSocket(url);
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onOpen: (cb) => ws.addEventListener("open", cb),
    onMessage: (cb) => ws.addEventListener("message", (ev) => cb(String(ev.data))),
    onClose: (cb) => ws.addEventListener("close", (ev) => cb(ev.code)),
  };
}
