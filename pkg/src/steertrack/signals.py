"""Transforms on the vision and action feedback paths.

The subject sees the trail through a delayed (or previewed) window whose
samples are quantized to bin centers; the subject acts through a wheel whose
angle is quantized to a signed, zero-free level set and delayed by a fixed
number of ticks.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .units import DEFAULT_LOOKBEHIND, TICK_SECONDS, to_ticks

MIN_BITS = 1
MAX_BITS = 10


def _check_bits(bits: int) -> None:
    if not isinstance(bits, int) or isinstance(bits, bool):
        raise ValueError(f"rate must be an integer bit count, got {bits!r}")
    if not MIN_BITS <= bits <= MAX_BITS:
        raise ValueError(f"rate must be in [{MIN_BITS}, {MAX_BITS}] bits, got {bits}")


class DelayLine:
    """Fixed FIFO: push(s) returns the sample pushed delay_ticks calls ago.

    The buffer starts zero-filled, so the first delay_ticks outputs are 0.0.
    """

    def __init__(self, delay_ticks: int):
        if not isinstance(delay_ticks, int) or delay_ticks < 0:
            raise ValueError(f"delay_ticks must be a non-negative int, got {delay_ticks!r}")
        self._delay = delay_ticks
        self._buf = deque([0.0] * delay_ticks)

    @property
    def delay_ticks(self) -> int:
        return self._delay

    def push(self, sample: float) -> float:
        if self._delay == 0:
            return sample
        self._buf.append(sample)
        return self._buf.popleft()


def quantize_vision(pos: float, bits: int) -> float:
    """Map a normalized position to the center of one of 2**bits equal bins.

    Out-of-range positions clamp to the nearest edge bin (callers that care
    track the clamp in their own diagnostics).
    """
    _check_bits(bits)
    n = 1 << bits
    if pos <= 0.0:
        return 0.5 / n
    cell = int(pos * n)
    if cell >= n:
        cell = n - 1
    return (cell + 0.5) / n


def quantize_action(angle: float, bits: int, max_angle: float, max_speed: float) -> float:
    """Map a wheel angle to one of 2**bits signed speeds.

    Levels are +/- k * max_speed / 2**(bits-1) for k = 1..2**(bits-1); there
    is no zero level, magnitude ties round up, and a perfectly centered wheel
    counts as positive.
    """
    _check_bits(bits)
    if max_angle <= 0 or max_speed <= 0:
        raise ValueError("max_angle and max_speed must be positive")
    half = 1 << (bits - 1)
    a = max(-max_angle, min(max_angle, angle))
    k = math.floor(abs(a) / max_angle * half + 0.5)
    if k < 1:
        k = 1
    elif k > half:
        k = half
    level = k * (max_speed / half)
    return level if a >= 0 else -level


def action_levels(bits: int, max_speed: float) -> tuple[float, ...]:
    """The full signed level set of quantize_action, ascending."""
    _check_bits(bits)
    if max_speed <= 0:
        raise ValueError("max_speed must be positive")
    half = 1 << (bits - 1)
    pos = [k * (max_speed / half) for k in range(1, half + 1)]
    return tuple([-v for v in reversed(pos)] + pos)


def nearest_level(value: float, levels: Sequence[float]) -> float:
    """Closest level to value; ties to the smaller magnitude, then negative."""
    return min(levels, key=lambda s: (abs(value - s), abs(s), s))


@dataclass(frozen=True)
class VisionWindow:
    """What part of the trail is on screen relative to the current tick.

    delay_s > 0 hides the newest samples (stale view); delay_s < 0 previews
    the trail ahead of the bar.  lookbehind_s is how much history stays
    visible below the bar.
    """

    delay_s: float
    lookbehind_s: float = DEFAULT_LOOKBEHIND

    def __post_init__(self):
        if not -1.0 <= self.delay_s < 1.0:
            raise ValueError(f"vision delay must be in [-1, 1) s, got {self.delay_s}")
        if self.lookbehind_s < 0:
            raise ValueError("lookbehind_s must be >= 0")


def visible_segment(
    trail: Sequence[float], tick: int, window: VisionWindow
) -> list[tuple[float, float]]:
    """(time_s, position) samples visible at `tick`, oldest first.

    The segment covers [tick - lookbehind, tick - delay] inclusive at tick
    resolution; indices beyond the track clamp to its edges.
    """
    if not len(trail):
        raise ValueError("empty trail")
    newest = tick - to_ticks(window.delay_s)
    oldest = tick - to_ticks(window.lookbehind_s)
    last = len(trail) - 1
    out = []
    for s in range(oldest, newest + 1):
        i = 0 if s < 0 else (last if s > last else s)
        out.append((s * TICK_SECONDS, trail[i]))
    return out
