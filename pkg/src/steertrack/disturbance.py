"""Seeded disturbance tracks: the wandering trail, square-wave force bumps,
and the jump schedule for the pointing task.

Trail positions are kept on an integer micro-unit grid (multiples of 1e-6)
so that serializing them at 6 significant digits and parsing them back is an
exact round trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prng import SplitMix64
from .units import DEFAULT_SENSITIVITY, TICK_HZ, TICK_SECONDS, to_ticks

SEGMENT_SECONDS = 0.1  # disturbances hold for 100 ms segments
TRAIL_MARGIN = 0.1
BUMP_AMPLITUDE = 100.0
_MICRO = 1_000_000


def trail_speed_for_wheel_rate(
    rate_deg_s: float,
    sensitivity: float = DEFAULT_SENSITIVITY,
    segment_s: float = SEGMENT_SECONDS,
) -> float:
    """Trail speed (units/s) that demands a given mean wheel rate (deg/s).

    Holding a trail of speed v takes a steady angle theta = v/(sensitivity *
    tick_hz); the sign flips with probability 1/2 per segment, so the wheel
    sweeps 2*theta about (1/2)/segment_s times a second.
    """
    flips_per_s = 0.5 / segment_s
    theta = rate_deg_s / (2.0 * flips_per_s)
    return theta * sensitivity * TICK_HZ


# calibrated so tracking demands roughly a 75 deg/s mean wheel rate
DEFAULT_TRAIL_SPEED = trail_speed_for_wheel_rate(75.0)


@dataclass(frozen=True)
class Track:
    """A per-tick disturbance sample array."""

    kind: str  # "trail-position" | "bump-force"
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        self.samples.setflags(write=False)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) * self.dt


def _n_ticks(duration_s: float) -> int:
    n = to_ticks(duration_s)
    if n < 1:
        raise ValueError(f"duration must cover at least one tick, got {duration_s} s")
    return n


def gen_trail(
    duration_s: float,
    seed: int,
    speed: float = DEFAULT_TRAIL_SPEED,
    margin: float = TRAIL_MARGIN,
    segment_s: float = SEGMENT_SECONDS,
    start: float = 0.5,
) -> Track:
    """Piecewise-linear trail in [margin, 1 - margin].

    Moves at +/- speed, re-drawing the sign each segment and forcing the
    direction inward whenever a step would cross a margin.
    """
    n = _n_ticks(duration_s)
    seg = _segment_ticks(segment_s)
    if not 0.0 <= margin < 0.5:
        raise ValueError(f"margin must be in [0, 0.5), got {margin}")
    step = round(speed * TICK_SECONDS * _MICRO)
    if speed <= 0 or step < 1:
        raise ValueError(f"speed {speed} u/s is below the 1e-6/tick resolution")
    lo = round(margin * _MICRO)
    hi = round((1.0 - margin) * _MICRO)
    if 2 * step > hi - lo:
        raise ValueError(
            f"speed {speed} u/s cannot respect margin {margin} within one tick"
        )
    pos = round(start * _MICRO)
    if not lo <= pos <= hi:
        raise ValueError(f"start {start} outside [{margin}, {1 - margin}]")

    rng = SplitMix64(seed)
    direction = rng.sign()
    out = np.empty(n, dtype=np.float64)
    out[0] = pos / _MICRO
    for i in range(1, n):
        if i % seg == 0:
            direction = rng.sign()
        tentative = pos + direction * step
        if tentative > hi:
            direction = -1
        elif tentative < lo:
            direction = 1
        pos += direction * step
        out[i] = pos / _MICRO
    return Track("trail-position", TICK_SECONDS, out)


def gen_bumps(
    duration_s: float,
    seed: int,
    amplitude: float = BUMP_AMPLITUDE,
    segment_s: float = SEGMENT_SECONDS,
    alternate: bool = False,
) -> Track:
    """Square-wave force of +/- amplitude, one sign per segment.

    Signs are re-drawn each segment by default; alternate=True flips them
    strictly instead (only the first sign is random).
    """
    n = _n_ticks(duration_s)
    seg = _segment_ticks(segment_s)
    if not 0.0 < amplitude <= 100.0:
        raise ValueError(f"amplitude must be in (0, 100], got {amplitude}")
    rng = SplitMix64(seed)
    out = np.empty(n, dtype=np.float64)
    sign = rng.sign()
    for s0 in range(0, n, seg):
        out[s0 : s0 + seg] = sign * amplitude
        sign = -sign if alternate else rng.sign()
    return Track("bump-force", TICK_SECONDS, out)


def _segment_ticks(segment_s: float) -> int:
    seg = segment_s * TICK_HZ
    if abs(seg - round(seg)) > 1e-9 or round(seg) < 1:
        raise ValueError(f"segment {segment_s} s is not a whole number of ticks")
    return int(round(seg))


@dataclass(frozen=True)
class FittsJump:
    time_s: float
    center: float
    width: float


@dataclass(frozen=True)
class FittsSchedule:
    """Target-zone jumps for the pointing task, first zone at t = 0."""

    jumps: tuple[FittsJump, ...]

    def zone_at(self, t_s: float) -> FittsJump:
        cur = self.jumps[0]
        for j in self.jumps:
            if j.time_s <= t_s + 1e-9:
                cur = j
            else:
                break
        return cur

    def encode(self) -> str:
        return ";".join(
            f"{j.time_s:.6g}:{j.center:.6g}:{j.width:.6g}" for j in self.jumps
        )

    @classmethod
    def decode(cls, text: str) -> "FittsSchedule":
        jumps = []
        for part in text.split(";"):
            t, c, w = part.split(":")
            jumps.append(FittsJump(float(t), float(c), float(w)))
        return cls(tuple(jumps))


def gen_fitts(
    duration_s: float,
    seed: int,
    widths: Sequence[float] = (0.05, 0.1, 0.2),
    distances: Sequence[float] = (0.2, 0.3, 0.4),
    interval_s: tuple[float, float] = (3.0, 6.0),
) -> FittsSchedule:
    """Random zone-jump schedule: after each dwell of interval_s seconds the
    zone center moves by one of `distances` in a random feasible direction
    and takes one of `widths`.

    Requires max(distances) <= (1 - max(widths)) / 2 so that from any center
    at least one direction keeps the whole zone on screen.
    """
    _n_ticks(duration_s)
    if not widths or not distances:
        raise ValueError("widths and distances must be non-empty")
    if any(not 0.0 < w <= 0.5 for w in widths):
        raise ValueError(f"widths must be in (0, 0.5], got {widths}")
    if any(d <= 0 for d in distances):
        raise ValueError(f"distances must be positive, got {distances}")
    if max(distances) > (1.0 - max(widths)) / 2.0 + 1e-12:
        raise ValueError(
            f"distance {max(distances)} with width {max(widths)} cannot always "
            "stay on screen; need d <= (1 - w)/2"
        )
    if not 0 < interval_s[0] <= interval_s[1]:
        raise ValueError(f"bad dwell interval {interval_s}")

    rng = SplitMix64(seed)
    center = 0.5
    jumps = [FittsJump(0.0, center, rng.choice(list(widths)))]
    tick = 0
    end = to_ticks(duration_s)
    while True:
        tick += max(1, to_ticks(rng.uniform_in(*interval_s)))
        if tick >= end:
            break
        w = rng.choice(list(widths))
        d = rng.choice(list(distances))
        cands = [c for c in (_canon(center + d), _canon(center - d))
                 if w / 2 - 1e-12 <= c <= 1 - w / 2 + 1e-12]
        center = rng.choice(cands) if len(cands) > 1 else cands[0]
        # divide, don't multiply by 0.01: n/100 is the exact grid value
        jumps.append(FittsJump(tick / TICK_HZ, center, w))
    return FittsSchedule(tuple(jumps))


def _canon(v: float) -> float:
    # keep centers on the 6-significant-digit grid used by the script format
    return float(f"{v:.6g}")
