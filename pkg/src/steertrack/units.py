"""Shared clock and unit conventions.

Everything runs on a fixed 10 ms tick.  Positions are normalized screen
coordinates in [0, 1]; logs report position error in units of 100 screen
pixels (a 1000 px wide screen spans 10 such units).  Wheel angles are in
degrees and are converted to screen speed through a sensitivity constant
expressed in (normalized units per tick) per degree.
"""

from __future__ import annotations

TICK_SECONDS = 0.01
TICK_HZ = 100

# Log / display scale: normalized units -> units of 100 px on a 1000 px screen.
PX_SCALE = 10.0

# Wheel-to-screen sensitivity, (units/tick)/degree.  At 90 deg the bar moves
# a full screen width in one second: 90 * 1e-4 * 100 ticks = 0.9 units/s.
DEFAULT_SENSITIVITY = 1e-4
DEFAULT_MAX_ANGLE = 90.0

# Force-to-speed gain for the bump track, (units/tick) per force unit.  A
# persistent +100 bump pushes the bar at half the subject's top speed:
# 100 * 4.5e-5 = 0.0045 u/tick vs 90 deg * 1e-4 = 0.009 u/tick.
DEFAULT_BUMP_GAIN = 4.5e-5

# How far back the scrolling trail stays visible, seconds.
DEFAULT_LOOKBEHIND = 2.0


def to_ticks(seconds: float) -> int:
    """Round a duration to the nearest whole tick."""
    return int(round(seconds * TICK_HZ))


def canon_float(v: float) -> float:
    """Snap to the 6-significant-digit grid used by the script file format.

    Idempotent: the nearest double to a 6-digit decimal re-renders to the
    same 6 digits.
    """
    return float(f"{v:.6g}")


def to_seconds(ticks: int) -> float:
    return ticks * TICK_SECONDS
