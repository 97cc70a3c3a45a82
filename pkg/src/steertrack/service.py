"""Live session hosting over WebSocket.

One JSON text message per event; every message carries `kind` and `seq`.
Handshake: client sends `hello` (protocol version, subject id, script id,
optional sensitivity), server answers `config`, then paces `frame` messages
at the tick rate on absolute deadlines.  Client `input` messages carry the
latest wheel angle; the engine samples the most recent one each tick and
holds the previous angle (counting a late input) when none arrived.  The
session ends with a `summary` and the log written to disk; a disconnect
aborts the run but still writes the partial log, marked.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import anyio

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .analysis import block_norms
from .engine import Session, SessionConfig, write_log
from .script import ParameterSchedule
from .units import DEFAULT_MAX_ANGLE, DEFAULT_SENSITIVITY, PX_SCALE, TICK_HZ

PROTO_VERSION = 1

# application close codes
CLOSE_BAD_MESSAGE = 4000
CLOSE_BAD_VERSION = 4002
CLOSE_BAD_REQUEST = 4003

_session_counter = itertools.count(1)


@dataclass
class ServeConfig:
    scripts: dict[str, ParameterSchedule]
    out_dir: Path = Path("logs")
    seed: int = 0
    sensitivity: float = DEFAULT_SENSITIVITY
    sensitivity_range: tuple[float, float] = (1e-5, 1e-3)
    max_angle: float = DEFAULT_MAX_ANGLE
    ui_dir: Path | None = None

    def __post_init__(self):
        if not self.scripts:
            raise ValueError("serve needs at least one script")
        self.out_dir = Path(self.out_dir)


class _InputCell:
    __slots__ = ("angle", "fresh", "closed", "error")

    def __init__(self):
        self.angle = 0.0
        self.fresh = False
        self.closed = False
        self.error: str | None = None


def _catalog(cfg: ServeConfig) -> dict:
    scripts = []
    for sid, sched in sorted(cfg.scripts.items()):
        scripts.append(
            {
                "id": sid,
                "game": sched.metadata.get("game"),
                "duration_s": sched.duration_s,
                "blocks": [[b.start_s, b.end_s, b.label] for b in sched.blocks],
            }
        )
    lo, hi = cfg.sensitivity_range
    return {
        "proto_version": PROTO_VERSION,
        "tick_hz": TICK_HZ,
        "scripts": scripts,
        "sensitivity": {"default": cfg.sensitivity, "min": lo, "max": hi},
    }


async def _send(ws: WebSocket, payload: dict) -> None:
    await ws.send_text(json.dumps(payload, separators=(",", ":")))


async def _reject(ws: WebSocket, seq: int, code: int, reason: str, message: str) -> None:
    await _send(ws, {"kind": "error", "seq": seq, "code": reason, "message": message})
    await ws.close(code=code)


async def _reader(ws: WebSocket, cell: _InputCell) -> None:
    try:
        while True:
            text = await ws.receive_text()
            try:
                msg = json.loads(text)
                kind = msg.get("kind")
                if kind == "input":
                    angle = msg.get("angle")
                    if not isinstance(angle, (int, float)) or not math.isfinite(angle):
                        cell.error = f"input angle must be a finite number, got {angle!r}"
                        return
                    cell.angle = float(angle)
                    cell.fresh = True
                elif kind == "bye":
                    cell.closed = True
                    return
                else:
                    cell.error = f"unexpected message kind {kind!r}"
                    return
            except (json.JSONDecodeError, AttributeError):
                cell.error = "message is not a JSON object"
                return
    except WebSocketDisconnect:
        cell.closed = True
    except RuntimeError:
        cell.closed = True


def _frame_payload(session: Session, seq: int) -> dict:
    frame = session.frame()
    p = frame.params()
    zone = frame.zone()
    n = session.tick_index
    rec_u = session.last_u
    return {
        "kind": "frame",
        "seq": seq,
        "t": n / TICK_HZ,
        "player": frame.player(),
        "x": session.x * session.config.px_scale,
        "u": rec_u,
        "window": [[round(dt, 4), pos] for dt, pos in frame.window()],
        "params": {**p, "w": frame.bump()},
        "zone": [zone.center, zone.width] if zone else None,
        "rest": frame.in_rest(),
    }


async def _run_session(ws: WebSocket, cfg: ServeConfig) -> None:
    await ws.accept()
    try:
        raw = await asyncio.wait_for(ws.receive_text(), timeout=30.0)
    except (asyncio.TimeoutError, WebSocketDisconnect):
        return
    try:
        hello = json.loads(raw)
    except json.JSONDecodeError:
        hello = None
    if not isinstance(hello, dict):
        await _reject(ws, 0, CLOSE_BAD_MESSAGE, "bad_message", "hello is not a JSON object")
        return
    if hello.get("kind") != "hello":
        await _reject(ws, 0, CLOSE_BAD_MESSAGE, "bad_message", "first message must be hello")
        return
    if hello.get("proto_version") != PROTO_VERSION:
        await _reject(
            ws, 0, CLOSE_BAD_VERSION, "proto_version",
            f"server speaks protocol {PROTO_VERSION}, client sent {hello.get('proto_version')!r}",
        )
        return
    subject = str(hello.get("subject") or "").strip()
    if not subject:
        await _reject(ws, 0, CLOSE_BAD_REQUEST, "bad_subject", "subject id must be non-empty")
        return
    script_id = hello.get("script")
    if script_id not in cfg.scripts:
        await _reject(
            ws, 0, CLOSE_BAD_REQUEST, "unknown_script",
            f"unknown script {script_id!r}; see /catalog",
        )
        return
    sens = hello.get("sensitivity", cfg.sensitivity)
    lo, hi = cfg.sensitivity_range
    if not isinstance(sens, (int, float)) or not (lo <= sens <= hi):
        await _reject(
            ws, 0, CLOSE_BAD_REQUEST, "bad_sensitivity",
            f"sensitivity must be in [{lo}, {hi}]",
        )
        return

    schedule = cfg.scripts[script_id]
    session_id = f"{script_id}-{next(_session_counter)}-{int(time.time())}"
    config = SessionConfig(
        schedule=schedule,
        mode="model" if schedule.metadata.get("mode") == "model" else "game",
        seed=cfg.seed,
        subject=f"external:{subject}",
        sensitivity=float(sens),
        max_angle=cfg.max_angle,
    )
    session = Session(config)
    fitts = schedule.fitts
    await _send(
        ws,
        {
            "kind": "config",
            "seq": 0,
            "proto_version": PROTO_VERSION,
            "session_id": session_id,
            "tick_hz": TICK_HZ,
            "n_ticks": session.n_ticks,
            "duration_s": schedule.duration_s,
            "game": schedule.metadata.get("game"),
            "sensitivity": float(sens),
            "max_angle": cfg.max_angle,
            "px_scale": PX_SCALE,
            "schedule_hash": schedule.sha256(),
            "config_hash": config.config_hash(),
            "blocks": [[b.start_s, b.end_s, b.label] for b in schedule.blocks],
            "fitts": [[j.time_s, j.center, j.width] for j in fitts.jumps] if fitts else None,
        },
    )

    cell = _InputCell()
    reader = asyncio.create_task(_reader(ws, cell))
    loop = asyncio.get_running_loop()
    n_ticks = session.n_ticks
    frame = session.frame()
    aborted = False
    abort_reason = ""
    finished = False
    t0 = loop.time()
    try:
        last_label = None
        for n in range(n_ticks):
            label = frame.block_label()
            if label != last_label and label is not None:
                await _send(
                    ws,
                    {"kind": "event", "seq": n, "t": n / TICK_HZ,
                     "name": "rest_start" if label == "rest" else "block_start",
                     "label": label},
                )
            last_label = label
            await _send(ws, _frame_payload(session, n))
            deadline = t0 + (n + 1) / TICK_HZ
            delay = deadline - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            if cell.error is not None:
                aborted, abort_reason = True, "bad_input"
                await _reject(ws, n, CLOSE_BAD_MESSAGE, "bad_message", cell.error)
                break
            if cell.closed:
                aborted, abort_reason = True, "client_disconnected"
                break
            if not cell.fresh:
                session.diagnostics["late_inputs"] += 1
            cell.fresh = False
            session.tick_once(cell.angle)
        measured_hz = session.tick_index / max(loop.time() - t0, 1e-9)
        finished = True
    except (WebSocketDisconnect, RuntimeError, ConnectionError,
            anyio.ClosedResourceError, anyio.BrokenResourceError):
        aborted, abort_reason = True, "client_disconnected"
    finally:
        # always land the log, even if the transport cancelled us mid-send:
        # the write is synchronous file I/O, safe under CancelledError
        reader.cancel()
        if not finished:
            if not aborted:
                aborted, abort_reason = True, "client_disconnected"
            measured_hz = session.tick_index / max(loop.time() - t0, 1e-9)
        log = session.seal(aborted=aborted, reason=abort_reason)
        log.header["session_id"] = session_id
        log.header["measured_hz"] = f"{measured_hz:.3f}"
        path = write_log(log, cfg.out_dir / f"{session_id}.csv")

    if not aborted:
        blocks = block_norms(log, schedule)
        try:
            await _send_summary(ws, session, session_id, path, measured_hz, blocks, n_ticks)
        except (WebSocketDisconnect, RuntimeError):
            pass


async def _send_summary(ws, session, session_id, path, measured_hz, blocks, n_ticks) -> None:
    await _send(
        ws,
        {
            "kind": "summary",
            "seq": n_ticks,
            "session_id": session_id,
            "log": str(path),
            "measured_hz": measured_hz,
            "diagnostics": dict(session.diagnostics),
            "blocks": [
                {
                    "label": b.label,
                    "start_s": b.start_s,
                    "end_s": b.end_s,
                    "n": b.norms.n,
                    "L1": None if b.norms.n == 0 else b.norms.l1,
                    "L2": None if b.norms.n == 0 else b.norms.l2,
                    "Linf": None if b.norms.n == 0 else b.norms.linf,
                }
                for b in blocks
            ],
        },
    )
    await ws.close(code=1000)


def build_app(cfg: ServeConfig) -> FastAPI:
    app = FastAPI(title="steertrack service")

    @app.get("/catalog")
    def catalog():
        return _catalog(cfg)

    @app.websocket("/session")
    async def session_ws(ws: WebSocket):
        try:
            await _run_session(ws, cfg)
        except WebSocketDisconnect:
            pass

    if cfg.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(cfg.ui_dir), html=True), name="ui")
    return app


def serve(cfg: ServeConfig, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(build_app(cfg), host=host, port=port, log_level="warning")
