"""Fixed-tick session loop.

A Session owns one run of a schedule: each tick it takes the subject's wheel
angle, quantizes and delays it on the action path, steps the plant, and
appends one (t, x, u) record.  Everything a run needs is pinned by the
(schedule, config, seed) triple, so identical inputs give byte-identical
logs; a recorded input trace can be replayed to reproduce a log exactly.

Logged units follow the game convention: t in seconds, x in 100 px units,
u in wheel degrees.  Model mode drops the unit conversions and the
quantizers so sessions step the normalized theory plant directly.
"""

from __future__ import annotations

import hashlib
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .plant import NonFiniteInputError, step
from .prng import PRNG_ID
from .script import ParameterSchedule
from .signals import quantize_action, quantize_vision
from .units import (
    DEFAULT_BUMP_GAIN,
    DEFAULT_LOOKBEHIND,
    DEFAULT_MAX_ANGLE,
    DEFAULT_SENSITIVITY,
    PX_SCALE,
    TICK_HZ,
    to_ticks,
)

LOG_VERSION = 1


class EngineError(RuntimeError):
    pass


class ReplayHashError(EngineError):
    """Log header does not match the supplied schedule/config."""


class ReplayDivergenceError(EngineError):
    def __init__(self, tick: int, got, expected):
        self.tick = tick
        super().__init__(f"replay diverged at tick {tick}: got {got}, expected {expected}")


class SubjectFailure(EngineError):
    """The subject raised mid-run; .partial_log holds the sealed prefix."""

    def __init__(self, partial_log: "SessionLog", message: str):
        self.partial_log = partial_log
        super().__init__(message)


@dataclass
class SessionConfig:
    schedule: ParameterSchedule
    mode: str = "game"
    seed: int = 0
    subject: str = "anon"
    sensitivity: float = DEFAULT_SENSITIVITY  # (units/tick) per degree
    max_angle: float = DEFAULT_MAX_ANGLE
    bump_gain: float = DEFAULT_BUMP_GAIN
    px_scale: float = PX_SCALE
    lookbehind_s: float = DEFAULT_LOOKBEHIND

    def __post_init__(self):
        if self.mode not in ("game", "model"):
            raise ValueError(f"mode must be 'game' or 'model', got {self.mode!r}")
        if self.sensitivity <= 0 or self.max_angle <= 0 or self.px_scale <= 0:
            raise ValueError("sensitivity, max_angle and px_scale must be positive")
        if self.bump_gain < 0 or self.lookbehind_s < 0:
            raise ValueError("bump_gain and lookbehind_s must be >= 0")

    def config_hash(self) -> str:
        doc = {
            "log_version": LOG_VERSION,
            "mode": self.mode,
            "seed": self.seed,
            "subject": self.subject,
            "sensitivity": repr(self.sensitivity),
            "max_angle": repr(self.max_angle),
            "bump_gain": repr(self.bump_gain),
            "px_scale": repr(self.px_scale),
            "lookbehind_s": repr(self.lookbehind_s),
            "schedule": self.schedule.sha256(),
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


@dataclass
class SessionLog:
    header: dict[str, str]
    records: list[tuple[float, float, float]]  # (t s, x, u)
    inputs: list[tuple[float, float]]  # (t s, wheel angle)

    @property
    def aborted(self) -> bool:
        return self.header.get("aborted", "0") == "1"

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        a = np.asarray(self.records, dtype=np.float64).reshape(-1, 3)
        return a[:, 0], a[:, 1], a[:, 2]

    def sup_x(self) -> float:
        return max((abs(x) for _, x, _ in self.records), default=0.0)

    def sup_u(self) -> float:
        return max((abs(u) for _, _, u in self.records), default=0.0)


class Subject:
    """Base controller interface for headless runs."""

    def reset(self, session: "Session") -> None:
        pass

    def act(self, frame: "Frame") -> float:
        raise NotImplementedError


class Frame:
    """Live read-only view of a session at its current tick.

    One instance is reused across ticks; subjects must not hold samples by
    reference across calls.
    """

    __slots__ = ("_s",)

    def __init__(self, session: "Session"):
        self._s = session

    @property
    def tick(self) -> int:
        return self._s._n

    @property
    def t(self) -> float:
        return self._s._n / TICK_HZ

    @property
    def x(self) -> float:
        """Current tracking error, normalized units."""
        return self._s._x

    def player(self) -> float:
        """Bar position on screen (trail + error); model mode has no screen."""
        s = self._s
        if s.mode == "model":
            return s._x
        return float(s._trail[min(s._n, s._N - 1)]) + s._x

    def r_current(self) -> float:
        """Model mode: this tick's scripted disturbance increment."""
        return float(self._s._rinc[self._s._n])

    def bump(self) -> float:
        return float(self._s._bump[self._s._n])

    def params(self) -> dict[str, float]:
        s, n = self._s, self._s._n
        return {
            "R_act": int(s._abits[n]),
            "T_act": s._adelay[n] / TICK_HZ,
            "T_vis": s._vdelay[n] / TICK_HZ,
            "R_vis": int(s._vbits[n]),
        }

    def _sample(self, idx: int) -> float:
        s = self._s
        i = 0 if idx < 0 else (s._N - 1 if idx >= s._N else idx)
        pos = float(s._trail[i])
        if pos < 0.0 or pos > 1.0:
            s.diagnostics["vision_clamps"] += 1
        return quantize_vision(pos, int(s._vbits[min(self._s._n, s._N - 1)]))

    def newest_visible(self, max_ahead_ticks: int | None = None) -> tuple[float, float]:
        """(sample time s, quantized position) of the newest visible sample.

        max_ahead_ticks caps how much preview the caller wants to use.
        """
        s, n = self._s, self._s._n
        target = n - int(s._vdelay[min(n, s._N - 1)])
        if max_ahead_ticks is not None:
            target = min(target, n + max_ahead_ticks)
        idx = min(max(target, 0), s._N - 1)
        return idx / TICK_HZ, self._sample(idx)

    def window(self) -> list[tuple[float, float]]:
        """Visible quantized trail as (dt_s relative to now, position)."""
        s, n = self._s, self._s._n
        newest = n - int(s._vdelay[min(n, s._N - 1)])
        oldest = n - to_ticks(s.config.lookbehind_s)
        return [((i - n) / TICK_HZ, self._sample(i)) for i in range(oldest, newest + 1)]

    def zone(self):
        s = self._s
        return s._fitts.zone_at(self.t) if s._fitts else None

    def block_label(self) -> str | None:
        s = self._s
        if not s._block_starts:
            return None
        i = bisect_right(s._block_starts, self.t) - 1
        return s._block_labels[max(i, 0)]

    def in_rest(self) -> bool:
        return self.block_label() == "rest"


class Session:
    def __init__(self, config: SessionConfig, subject: Subject | None = None):
        self.config = config
        self._subject = subject
        sched = config.schedule
        cols = sched.per_tick()
        self._N = sched.n_ticks
        self._trail = cols["trail"]
        self._bump = cols["bump"]
        self._abits = cols["action_bits"]
        self._adelay = cols["action_delay_ticks"]
        self._vdelay = cols["vision_delay_ticks"]
        self._vbits = cols["vision_bits"]

        self.mode = config.mode
        if self.mode == "model":
            if len(self._trail) and float(np.max(np.abs(self._trail))) > 1.0 + 1e-12:
                raise EngineError("model mode requires |r| <= 1 in the script")
            self._rinc = self._trail
            self._k = 1.0
            self._gw = 1.0
            self._px = 1.0
            self._max_angle = math.inf
        else:
            rinc = np.zeros(self._N)
            if self._N > 1:
                rinc[:-1] = -np.diff(self._trail)
            self._rinc = rinc
            self._k = config.sensitivity
            self._gw = config.bump_gain
            self._px = config.px_scale
            self._max_angle = config.max_angle
        self._max_speed = self._k * (config.max_angle if self.mode == "game" else 1.0)

        self._fitts = sched.fitts
        blocks = sched.blocks if "blocks" in sched.metadata else ()
        self._block_starts = [b.start_s for b in blocks]
        self._block_labels = [b.label for b in blocks]

        self._x = 0.0
        self._n = 0
        self._act = [0.0] * self._N
        self._records: list[tuple[float, float, float]] = []
        self._inputs: list[tuple[float, float]] = []
        self.diagnostics = {"late_inputs": 0, "clamped_inputs": 0, "vision_clamps": 0}
        self._frame = Frame(self)

    # --- state -----------------------------------------------------------

    @property
    def n_ticks(self) -> int:
        return self._N

    @property
    def tick_index(self) -> int:
        return self._n

    @property
    def x(self) -> float:
        return self._x

    @property
    def k(self) -> float:
        return self._k

    @property
    def max_angle(self) -> float:
        return self._max_angle

    @property
    def done(self) -> bool:
        return self._n >= self._N

    @property
    def last_u(self) -> float:
        """u from the most recent record (0 before the first tick)."""
        return self._records[-1][2] if self._records else 0.0

    def frame(self) -> Frame:
        return self._frame

    # --- stepping ---------------------------------------------------------

    def tick_once(self, angle: float) -> None:
        """Apply one wheel sample: record (t, x, u), then step the plant."""
        n = self._n
        if n >= self._N:
            raise EngineError("session already complete")
        if not math.isfinite(angle):
            raise NonFiniteInputError(f"angle={angle!r} at tick {n}")
        self._inputs.append((n / TICK_HZ, angle))
        if self.mode == "game":
            a = angle
            if a > self._max_angle:
                a = self._max_angle
                self.diagnostics["clamped_inputs"] += 1
            elif a < -self._max_angle:
                a = -self._max_angle
                self.diagnostics["clamped_inputs"] += 1
            q = quantize_action(a, int(self._abits[n]), self._max_angle, self._max_speed)
        else:
            q = angle
        self._act[n] = q
        j = n - int(self._adelay[n])
        u = self._act[j] if j >= 0 else 0.0
        self._records.append((n / TICK_HZ, self._x * self._px, u / self._k))
        self._x = step(self._x, u, float(self._rinc[n]), self._gw * float(self._bump[n]))
        self._n = n + 1

    def run(self) -> SessionLog:
        if self._subject is None:
            raise EngineError("headless run needs a subject")
        self._subject.reset(self)
        frame = self._frame
        try:
            while self._n < self._N:
                self.tick_once(float(self._subject.act(frame)))
        except Exception as exc:
            log = self.seal(aborted=True, reason=type(exc).__name__)
            raise SubjectFailure(log, f"subject failed at tick {self._n}: {exc}") from exc
        return self.seal()

    def seal(self, aborted: bool = False, reason: str = "") -> SessionLog:
        cfg = self.config
        header = {
            "log_version": str(LOG_VERSION),
            "mode": cfg.mode,
            "subject": cfg.subject,
            "seed": str(cfg.seed),
            "prng": PRNG_ID,
            "schedule_hash": cfg.schedule.sha256(),
            "config_hash": cfg.config_hash(),
            "sensitivity": repr(cfg.sensitivity),
            "max_angle": repr(cfg.max_angle),
            "bump_gain": repr(cfg.bump_gain),
            "px_scale": repr(cfg.px_scale),
            "lookbehind_s": repr(cfg.lookbehind_s),
            "duration": repr(cfg.schedule.duration_s),
            "n_ticks": str(self._N),
        }
        if "game" in cfg.schedule.metadata:
            header["game"] = cfg.schedule.metadata["game"]
        for k, v in self.diagnostics.items():
            header[k] = str(v)
        header["aborted"] = "1" if aborted else "0"
        if reason:
            header["abort_reason"] = reason.replace(" ", "_").replace("\n", "_")
        return SessionLog(header, self._records, self._inputs)


def run_headless(config: SessionConfig, subject: Subject) -> SessionLog:
    return Session(config, subject).run()


def replay(log: SessionLog, schedule: ParameterSchedule, check: bool = True) -> SessionLog:
    """Re-run a recorded input trace; must reproduce the (t, x, u) records.

    Rejects schedules or headers that do not hash-match the log before
    stepping anything.
    """
    h = log.header
    if schedule.sha256() != h.get("schedule_hash"):
        raise ReplayHashError("schedule does not match the log's schedule_hash")
    config = SessionConfig(
        schedule=schedule,
        mode=h["mode"],
        seed=int(h["seed"]),
        subject=h["subject"],
        sensitivity=float(h["sensitivity"]),
        max_angle=float(h["max_angle"]),
        bump_gain=float(h["bump_gain"]),
        px_scale=float(h["px_scale"]),
        lookbehind_s=float(h["lookbehind_s"]),
    )
    if config.config_hash() != h.get("config_hash"):
        raise ReplayHashError("rebuilt config does not match the log's config_hash")
    if len(log.inputs) > schedule.n_ticks:
        raise EngineError("input trace longer than the schedule")
    session = Session(config)
    for _, angle in log.inputs:
        session.tick_once(angle)
    out = session.seal(aborted=log.aborted, reason=h.get("abort_reason", ""))
    if check:
        if len(out.records) != len(log.records):
            raise ReplayDivergenceError(len(out.records), None, "equal record count")
        for i, (got, want) in enumerate(zip(out.records, log.records)):
            if got != want:
                raise ReplayDivergenceError(i, got, want)
    return out


# --- log files ---------------------------------------------------------------


def log_text(log: SessionLog) -> str:
    lines = [f"# {k}={v}" for k, v in log.header.items()]
    lines.append("t,x,u")
    lines.extend(f"{t!r},{x!r},{u!r}" for t, x, u in log.records)
    return "\n".join(lines) + "\n"


def inputs_text(log: SessionLog) -> str:
    return "t,angle\n" + "".join(f"{t!r},{a!r}\n" for t, a in log.inputs)


def _inputs_path(path: Path) -> Path:
    return path.with_suffix(".inputs.csv")


def write_log(log: SessionLog, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(log_text(log))
    with open(_inputs_path(path), "w", encoding="utf-8", newline="\n") as f:
        f.write(inputs_text(log))
    return path


def read_log(path: str | Path) -> SessionLog:
    path = Path(path)
    header: dict[str, str] = {}
    records: list[tuple[float, float, float]] = []
    with open(path, encoding="utf-8") as f:
        for raw in f:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                header[k] = v
                continue
            if line == "t,x,u":
                continue
            t, x, u = line.split(",")
            records.append((float(t), float(x), float(u)))
    inputs: list[tuple[float, float]] = []
    ip = _inputs_path(path)
    if ip.exists():
        with open(ip, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line or line == "t,angle":
                    continue
                t, a = line.split(",")
                inputs.append((float(t), float(a)))
    return SessionLog(header, records, inputs)
