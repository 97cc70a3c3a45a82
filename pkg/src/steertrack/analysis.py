"""Error norms, per-block summaries and pointing-task movement times."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import spearmanr

from .disturbance import FittsSchedule
from .engine import SessionLog
from .script import ParameterSchedule

DEFAULT_TRIM_S = 5.0


@dataclass(frozen=True)
class Norms:
    l1: float  # (1/n) sum |x|
    l2: float  # sqrt((1/n) sum x^2)
    linf: float  # max |x|
    n: int


def norms(x) -> Norms:
    a = np.abs(np.asarray(x, dtype=np.float64))
    if a.size == 0:
        return Norms(math.nan, math.nan, math.nan, 0)
    return Norms(
        float(a.mean()),
        float(np.sqrt(np.mean(np.square(a)))),
        float(a.max()),
        int(a.size),
    )


@dataclass(frozen=True)
class BlockNorms:
    index: int
    label: str
    start_s: float
    end_s: float
    norms: Norms


def block_norms(
    log: SessionLog, schedule: ParameterSchedule, trim_s: float = DEFAULT_TRIM_S
) -> list[BlockNorms]:
    """Per-block norms of the logged error, trimming trim_s at both block
    edges so settling transients don't leak across conditions.

    Blocks too short to survive the trim keep their row with n = 0 and NaN
    norms rather than silently vanishing.
    """
    if trim_s < 0:
        raise ValueError("trim_s must be >= 0")
    t, x, _ = log.arrays()
    out = []
    for i, b in enumerate(schedule.blocks):
        a, z = b.start_s + trim_s, b.end_s - trim_s
        core = x[(t >= a) & (t < z)] if z > a else x[:0]
        out.append(BlockNorms(i, b.label, b.start_s, b.end_s, norms(core)))
    return out


@dataclass(frozen=True)
class Movement:
    index: int
    t_jump_s: float
    center: float
    width: float
    distance: float  # |center - previous center|
    mt_s: float | None  # None: never reached the zone before the next jump


def movement_times(log: SessionLog, fitts: FittsSchedule) -> list[Movement]:
    """Movement time per zone jump: first entry of the bar into the zone.

    The log's x column is bar-minus-center in 100 px units (the schedule's
    `r` column carries the zone center), so in-zone is |x| <= width/2 * px.
    """
    t, x, _ = log.arrays()
    px = float(log.header.get("px_scale", "10.0"))
    jumps = fitts.jumps
    out = []
    for i in range(1, len(jumps)):
        j = jumps[i]
        t_end = jumps[i + 1].time_s if i + 1 < len(jumps) else math.inf
        half = j.width / 2.0 * px
        # jump applied during the tick at t_jump: the first record that can
        # reflect it is strictly after
        sel = (t > j.time_s + 1e-9) & (t < t_end - 1e-9)
        idx = np.nonzero(sel & (np.abs(x) <= half))[0]
        mt = float(t[idx[0]] - j.time_s) if idx.size else None
        out.append(Movement(i, j.time_s, j.center, j.width, abs(j.center - jumps[i - 1].center), mt))
    return out


def spearman(a, b) -> float:
    rho = spearmanr(a, b).correlation
    return float(rho)


def export_block_norms(rows: list[BlockNorms], path: str | Path) -> Path:
    path = Path(path)
    lines = ["block,label,start_s,end_s,n,L1,L2,Linf"]
    for r in rows:
        lines.append(
            f"{r.index},{r.label},{r.start_s:.6g},{r.end_s:.6g},{r.norms.n},"
            f"{r.norms.l1:.6g},{r.norms.l2:.6g},{r.norms.linf:.6g}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def export_movements(rows: list[Movement], path: str | Path) -> Path:
    path = Path(path)
    lines = ["jump,t_s,center,width,distance,mt_s"]
    for m in rows:
        mt = f"{m.mt_s:.6g}" if m.mt_s is not None else ""
        lines.append(
            f"{m.index},{m.t_jump_s:.6g},{m.center:.6g},{m.width:.6g},{m.distance:.6g},{mt}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
