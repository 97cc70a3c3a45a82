"""Experiment script files.

A script is a UTF-8, LF-terminated CSV that pins down everything a session
needs: per-row `time,r,w,R_act,T_act,T_vis,R_vis`, plus one optional leading
`#` header line of `key=value` metadata (seed, duration, block table, zone
jumps).  Values are canonicalized to 6 significant digits so that parsing a
written schedule reproduces it exactly, and writing a parsed file is plain
canonicalization.

Rows hold their values until the next row's timestamp; queries before the
first row get the first row, queries past the last get the last.
"""

from __future__ import annotations

import hashlib
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .disturbance import (
    DEFAULT_TRAIL_SPEED,
    FittsSchedule,
    gen_bumps,
    gen_fitts,
    gen_trail,
)
from .prng import PRNG_ID, stream_seed
from .units import TICK_HZ, TICK_SECONDS, canon_float, to_ticks

FIELD_NAMES = ("time", "r", "w", "R_act", "T_act", "T_vis", "R_vis")
MAX_TIME_S = 10_000.0  # past this the 6-digit grid can no longer hold ticks


class ScriptError(ValueError):
    """Base for script file problems; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class FieldCountError(ScriptError):
    pass


class NumberFormatError(ScriptError):
    pass


class TimeOrderError(ScriptError):
    pass


class HeaderError(ScriptError):
    pass


class ConstraintError(ScriptError):
    """A parameter is outside its legal range; .constraint names which."""

    def __init__(self, constraint: str, message: str, line: int | None = None):
        self.constraint = constraint
        super().__init__(f"[{constraint}] {message}", line)


@dataclass(frozen=True)
class ScheduleRow:
    """One stamped parameter set (times in seconds, bits as integers)."""

    time: float
    trail: float  # `r` column: trail/zone position, or r(t) in model mode
    bump: float  # `w` column: square-wave force
    action_bits: int  # `R_act`
    action_delay: float  # `T_act`, seconds
    vision_delay: float  # `T_vis`, seconds; negative values preview ahead
    vision_bits: int  # `R_vis`


def _check_row(row: ScheduleRow, line: int | None = None) -> None:
    t = row.time
    if not (0.0 <= t < MAX_TIME_S):
        raise ConstraintError("time_range", f"time {t!r} outside [0, {MAX_TIME_S})", line)
    if abs(t * TICK_HZ - round(t * TICK_HZ)) > 1e-5:
        raise ConstraintError("time_resolution", f"time {t!r} is not on the 10 ms grid", line)
    if abs(row.trail) > 100.0:
        raise ConstraintError("trail_range", f"|r| must be <= 100, got {row.trail!r}", line)
    if abs(row.bump) > 100.0:
        raise ConstraintError("bump_range", f"|w| must be <= 100, got {row.bump!r}", line)
    if not 1 <= row.action_bits <= 10:
        raise ConstraintError("action_bits_range", f"R_act must be in [1, 10], got {row.action_bits}", line)
    if row.action_delay < 0:
        raise ConstraintError("action_delay_range", f"T_act must be >= 0, got {row.action_delay!r}", line)
    if not -1.0 <= row.vision_delay < 1.0:
        raise ConstraintError("vision_delay_range", f"T_vis must be in [-1, 1), got {row.vision_delay!r}", line)
    if not 1 <= row.vision_bits <= 10:
        raise ConstraintError("vision_bits_range", f"R_vis must be in [1, 10], got {row.vision_bits}", line)


def _canon_row(row: ScheduleRow) -> ScheduleRow:
    for name, v in (("action", row.action_bits), ("vision", row.vision_bits)):
        if v != int(v):
            raise ConstraintError(f"{name}_bits_integer", f"bit count must be an integer, got {v!r}")
    return ScheduleRow(
        canon_float(row.time),
        canon_float(row.trail),
        canon_float(row.bump),
        int(row.action_bits),
        canon_float(row.action_delay),
        canon_float(row.vision_delay),
        int(row.vision_bits),
    )


@dataclass(frozen=True)
class Block:
    """Labelled [start, end) span of a schedule, seconds."""

    start_s: float
    end_s: float
    label: str


class ParameterSchedule:
    """Validated, canonical, immutable sequence of ScheduleRows plus metadata."""

    def __init__(
        self,
        rows: Iterable[ScheduleRow],
        metadata: dict[str, str] | None = None,
        _trusted: bool = False,
    ):
        rows = tuple(rows) if _trusted else tuple(_canon_row(r) for r in rows)
        if not rows:
            raise ScriptError("a schedule needs at least one row")
        if not _trusted:
            for i, row in enumerate(rows):
                _check_row(row)
                if i and row.time <= rows[i - 1].time:
                    raise TimeOrderError(
                        f"time {row.time!r} does not increase past {rows[i - 1].time!r}"
                    )
        self.rows = rows
        self.metadata = dict(metadata) if metadata else {}
        for k, v in self.metadata.items():
            _check_meta_token(k, v)
        self._times = None
        self._per_tick = None

    # --- queries ---------------------------------------------------------

    @property
    def duration_s(self) -> float:
        if "duration" in self.metadata:
            return float(self.metadata["duration"])
        return self.rows[-1].time + TICK_SECONDS

    @property
    def n_ticks(self) -> int:
        return to_ticks(self.duration_s)

    def sample(self, tick: int) -> ScheduleRow:
        """Row in effect at a tick (hold-last; clamped at both ends)."""
        if self._times is None:
            self._times = [to_ticks(r.time) for r in self.rows]
        i = bisect_right(self._times, tick) - 1
        return self.rows[max(i, 0)]

    def per_tick(self) -> dict[str, np.ndarray]:
        """Dense per-tick parameter arrays for the engine (cached)."""
        if self._per_tick is None:
            n = self.n_ticks
            row_ticks = np.array([to_ticks(r.time) for r in self.rows])
            idx = np.searchsorted(row_ticks, np.arange(n), side="right") - 1
            idx = np.maximum(idx, 0)

            def col(get, dtype):
                return np.array([get(r) for r in self.rows], dtype=dtype)[idx]

            self._per_tick = {
                "trail": col(lambda r: r.trail, np.float64),
                "bump": col(lambda r: r.bump, np.float64),
                "action_bits": col(lambda r: r.action_bits, np.int16),
                "action_delay_ticks": col(lambda r: to_ticks(r.action_delay), np.int32),
                "vision_delay_ticks": col(lambda r: to_ticks(r.vision_delay), np.int32),
                "vision_bits": col(lambda r: r.vision_bits, np.int16),
            }
        return self._per_tick

    @property
    def fitts(self) -> FittsSchedule | None:
        text = self.metadata.get("fitts")
        return FittsSchedule.decode(text) if text else None

    @property
    def blocks(self) -> tuple[Block, ...]:
        """Block table from metadata, else inferred from parameter changes."""
        text = self.metadata.get("blocks")
        if text:
            out = []
            for part in text.split(","):
                a, b, label = part.split(":", 2)
                out.append(Block(float(a), float(b), label))
            return tuple(out)
        return self._inferred_blocks()

    def _inferred_blocks(self) -> tuple[Block, ...]:
        out: list[Block] = []
        start = self.rows[0].time
        cur = _param_tuple(self.rows[0])
        for row in self.rows[1:]:
            nxt = _param_tuple(row)
            if nxt != cur:
                out.append(Block(start, row.time, _param_label(self.rows, start)))
                start, cur = row.time, nxt
        out.append(Block(start, self.duration_s, _param_label(self.rows, start)))
        return tuple(out)

    def text(self) -> str:
        return write_script(self)

    def sha256(self) -> str:
        return hashlib.sha256(self.text().encode("utf-8")).hexdigest()

    def __eq__(self, other):
        return (
            isinstance(other, ParameterSchedule)
            and self.rows == other.rows
            and self.metadata == other.metadata
        )

    def __len__(self) -> int:
        return len(self.rows)


def _param_tuple(r: ScheduleRow):
    return (r.action_bits, r.action_delay, r.vision_delay, r.vision_bits)


def _param_label(rows: Sequence[ScheduleRow], start: float) -> str:
    for r in rows:
        if r.time == start:
            return (
                f"R_act={r.action_bits:.6g},T_act={r.action_delay:.6g},"
                f"T_vis={r.vision_delay:.6g},R_vis={r.vision_bits:.6g}"
            ).replace(",", ";")
    return "?"


def _check_meta_token(k: str, v: str) -> None:
    if not k or any(c in k for c in " =\n\t"):
        raise HeaderError(f"bad metadata key {k!r}")
    if any(c in v for c in " \n\t"):
        raise HeaderError(f"metadata value for {k!r} must not contain whitespace")


# --- parse / write ---------------------------------------------------------


def parse_script(text: str) -> ParameterSchedule:
    metadata: dict[str, str] = {}
    rows: list[ScheduleRow] = []
    prev_time: float | None = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if lineno != 1:
                raise HeaderError("metadata header allowed only on line 1", lineno)
            for token in line[1:].split():
                if "=" not in token:
                    raise HeaderError(f"metadata token {token!r} is not key=value", lineno)
                k, v = token.split("=", 1)
                if k in metadata:
                    raise HeaderError(f"duplicate metadata key {k!r}", lineno)
                metadata[k] = v
            continue
        fields = line.split(",")
        if len(fields) != len(FIELD_NAMES):
            raise FieldCountError(
                f"expected {len(FIELD_NAMES)} fields {FIELD_NAMES}, got {len(fields)}",
                lineno,
            )
        values = []
        for name, f in zip(FIELD_NAMES, fields):
            try:
                v = float(f)
            except ValueError:
                raise NumberFormatError(f"field {name}={f!r} is not a number", lineno) from None
            if not math.isfinite(v):
                raise NumberFormatError(f"field {name}={f!r} must be finite", lineno)
            values.append(v)
        for name, idx in (("R_act", 3), ("R_vis", 6)):
            if values[idx] != int(values[idx]):
                raise ConstraintError(
                    f"{'action' if name == 'R_act' else 'vision'}_bits_integer",
                    f"{name} must be an integer bit count, got {values[idx]!r}",
                    lineno,
                )
        row = _canon_row(
            ScheduleRow(
                time=values[0],
                trail=values[1],
                bump=values[2],
                action_bits=int(values[3]),
                action_delay=values[4],
                vision_delay=values[5],
                vision_bits=int(values[6]),
            )
        )
        _check_row(row, lineno)
        if prev_time is not None and row.time <= prev_time:
            raise TimeOrderError(
                f"time {row.time!r} does not increase past {prev_time!r}", lineno
            )
        prev_time = row.time
        rows.append(row)
    return ParameterSchedule(rows, metadata, _trusted=True)


def write_script(sched: ParameterSchedule) -> str:
    lines = []
    if sched.metadata:
        lines.append("# " + " ".join(f"{k}={sched.metadata[k]}" for k in sorted(sched.metadata)))
    for r in sched.rows:
        lines.append(
            f"{r.time:.6g},{r.trail:.6g},{r.bump:.6g},{r.action_bits:.6g},"
            f"{r.action_delay:.6g},{r.vision_delay:.6g},{r.vision_bits:.6g}"
        )
    return "\n".join(lines) + "\n"


def read_script(path: str | Path) -> ParameterSchedule:
    return parse_script(Path(path).read_text(encoding="utf-8"))


def save_script(sched: ParameterSchedule, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(write_script(sched))


def model_schedule(
    r_values, action_delay: float = 0.0, metadata: dict[str, str] | None = None
) -> ParameterSchedule:
    """Dense schedule for model mode: the `r` column is the per-tick
    disturbance increment itself (|r| <= 1)."""
    rows = [
        ScheduleRow(
            time=i / TICK_HZ,
            trail=canon_float(float(r)),
            bump=0.0,
            action_bits=10,
            action_delay=canon_float(action_delay),
            vision_delay=0.0,
            vision_bits=10,
        )
        for i, r in enumerate(r_values)
    ]
    md = {"mode": "model"}
    md.update(metadata or {})
    return ParameterSchedule(rows, md, _trusted=True)


# --- canonical demo games ---------------------------------------------------

GAME_IDS = (1, 2, 3, 4, 5, "fitts")

# preview/delay ladder of game 1: 1.0/0.75/0.5 s warnings, then 0.1 s steps
# down to a 0.5 s stale view
GAME1_VISION_DELAYS = (-1.0, -0.75, -0.5, -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
GAME2_ACTION_DELAYS = (0.0, 0.15, 0.3, 0.45, 0.6, 0.75)
GAME34_BITS = (1, 2, 3, 4, 5, 6, 7)
BLOCK_SECONDS = 30.0
GAME5_REST_S = 5.0
GAME5_SCENARIO_S = 60.0

_BASE = dict(bump=0.0, action_bits=10, action_delay=0.0, vision_delay=-1.0, vision_bits=10)


def _dense_rows(trail: np.ndarray, **cols) -> list[ScheduleRow]:
    """One row per tick; scalar kwargs broadcast, array kwargs index per tick."""
    n = len(trail)
    get = {}
    for name, v in {**_BASE, **cols}.items():
        get[name] = (lambda a: (lambda i: a[i]))(v) if isinstance(v, np.ndarray) else (lambda c: (lambda i: c))(v)
    return [
        ScheduleRow(
            time=i / TICK_HZ,
            trail=float(trail[i]),
            bump=float(get["bump"](i)),
            action_bits=int(get["action_bits"](i)),
            action_delay=float(get["action_delay"](i)),
            vision_delay=float(get["vision_delay"](i)),
            vision_bits=int(get["vision_bits"](i)),
        )
        for i in range(n)
    ]


def _meta(game, seed: int, duration: float, blocks=None, blocks_param=None, **extra) -> dict[str, str]:
    md = {
        "game": str(game),
        "seed": str(seed),
        "prng": PRNG_ID,
        "duration": f"{duration:.6g}",
    }
    if blocks:
        md["blocks"] = ",".join(f"{a:.6g}:{b:.6g}:{label}" for a, b, label in blocks)
    if blocks_param:
        md["blocks_param"] = blocks_param
    md.update(extra)
    return md


def _stepped(values, block_ticks: int, n: int, dtype) -> np.ndarray:
    out = np.empty(n, dtype=dtype)
    for i, v in enumerate(values):
        out[i * block_ticks : (i + 1) * block_ticks] = v
    return out


def _block_table(values, block_s: float):
    return [(i * block_s, (i + 1) * block_s, f"{v:.6g}") for i, v in enumerate(values)]


def build_game(game, seed: int) -> ParameterSchedule:
    """Deterministic schedule for one of the five demo games or "fitts"."""
    if game in (1, "1"):
        return _build_stepped_game(1, seed, "vision_delay", GAME1_VISION_DELAYS)
    if game in (2, "2"):
        return _build_stepped_game(2, seed, "action_delay", GAME2_ACTION_DELAYS)
    if game in (3, "3"):
        return _build_stepped_game(3, seed, "vision_bits", GAME34_BITS)
    if game in (4, "4"):
        return _build_stepped_game(4, seed, "action_bits", GAME34_BITS)
    if game in (5, "5"):
        return _build_game5(seed)
    if game == "fitts":
        return build_fitts(seed)
    raise ValueError(f"unknown game {game!r}; valid: {GAME_IDS}")


def _build_stepped_game(game_id: int, seed: int, param: str, values) -> ParameterSchedule:
    block_ticks = to_ticks(BLOCK_SECONDS)
    n = block_ticks * len(values)
    duration = n / TICK_HZ
    trail = gen_trail(duration, stream_seed(seed, "trail")).samples
    dtype = np.int16 if param.endswith("bits") else np.float64
    cols = {param: _stepped(values, block_ticks, n, dtype)}
    rows = _dense_rows(trail, **cols)
    md = _meta(game_id, seed, duration, _block_table(values, BLOCK_SECONDS), param)
    return ParameterSchedule(rows, md, _trusted=True)


def _build_game5(seed: int) -> ParameterSchedule:
    rest = to_ticks(GAME5_REST_S)
    span = to_ticks(GAME5_SCENARIO_S)
    n = 3 * (rest + span)
    duration = n / TICK_HZ

    # one 60 s trail and one 60 s bump track, each reused byte-identically
    # in the combined scenario
    trail_seg = gen_trail(GAME5_SCENARIO_S, stream_seed(seed, "trail")).samples
    bump_seg = gen_bumps(GAME5_SCENARIO_S, stream_seed(seed, "bumps")).samples

    trail = np.full(n, 0.5)
    bump = np.zeros(n)
    starts = [rest, 2 * rest + span, 3 * rest + 2 * span]
    bump[starts[0] : starts[0] + span] = bump_seg
    trail[starts[1] : starts[1] + span] = trail_seg
    trail[starts[2] : starts[2] + span] = trail_seg
    bump[starts[2] : starts[2] + span] = bump_seg

    blocks, t0 = [], 0.0
    for label in ("bumps", "trail", "combined"):
        blocks.append((t0, t0 + GAME5_REST_S, "rest"))
        t0 += GAME5_REST_S
        blocks.append((t0, t0 + GAME5_SCENARIO_S, label))
        t0 += GAME5_SCENARIO_S

    rows = _dense_rows(trail, bump=bump)
    md = _meta(5, seed, duration, blocks, "scenario")
    return ParameterSchedule(rows, md, _trusted=True)


def build_fitts(
    seed: int,
    duration_s: float = 120.0,
    widths=(0.05, 0.1, 0.2),
    distances=(0.2, 0.3, 0.4),
) -> ParameterSchedule:
    """Pointing-task schedule: sparse rows, one per zone jump."""
    sched = gen_fitts(duration_s, stream_seed(seed, "fitts"), widths, distances)
    rows = [
        ScheduleRow(
            time=j.time_s,
            trail=j.center,
            bump=0.0,
            action_bits=10,
            action_delay=0.0,
            vision_delay=0.0,
            vision_bits=10,
        )
        for j in sched.jumps
    ]
    md = _meta("fitts", seed, duration_s, fitts=sched.encode())
    return ParameterSchedule(rows, md, _trusted=True)
