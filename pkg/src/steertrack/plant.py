"""Discrete error-state plant.

One step of the tracking error: x' = x + u + r + w, with x(0) = 0.  The
engine, the synthetic subjects and the game-tree oracle all step through
this module so there is a single source of truth for the dynamics.  Game
sessions express x in normalized screen units (logged as 100 px units) and
u as a wheel-induced speed; model sessions are dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class NonFiniteInputError(ValueError):
    """A NaN or infinity reached the plant."""


@dataclass(frozen=True)
class PlantState:
    t: int  # tick count, 10 ms each
    x: float  # tracking error


@dataclass(frozen=True)
class StepInputs:
    u: float  # control increment this tick
    r: float  # disturbance increment this tick
    w: float = 0.0  # auxiliary force increment this tick


def step(x: float, u: float, r: float, w: float = 0.0) -> float:
    # hot path: no validation, fixed association order (see telescoped_error)
    return ((x + u) + r) + w


def step_plant(state: PlantState, inp: StepInputs) -> PlantState:
    """Checked single step; rejects non-finite inputs."""
    for name, v in (("u", inp.u), ("r", inp.r), ("w", inp.w)):
        if not math.isfinite(v):
            raise NonFiniteInputError(f"{name}={v!r} at t={state.t}")
    return PlantState(state.t + 1, step(state.x, inp.u, inp.r, inp.w))


def telescoped_error(r_history: Sequence[float], delay_ticks: int) -> list[float]:
    """Error trajectory under the delayed inverse policy u(t) = -r(t - T).

    Commands issued before tick T are zero, so x(t) collapses to the sum of
    the last min(t, T) disturbances.  Uses the same association order as
    step() so the two agree to the last bit.
    """
    if delay_ticks < 0:
        raise ValueError(f"delay_ticks must be >= 0, got {delay_ticks}")
    out = [0.0]
    x = 0.0
    for t, r in enumerate(r_history):
        u = -r_history[t - delay_ticks] if t >= delay_ticks else 0.0
        x = step(x, u, r)
        out.append(x)
    return out
