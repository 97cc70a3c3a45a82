"""Exhaustive game-tree evaluation of the quantized tracking game.

The controller picks a level u from a finite set S knowing the whole history;
the adversary then picks r from its own finite set knowing u.  The value of
the game is the optimal worst-case sup over time of |x(t)| under
x' = x + u + r.  Horizons stay small enough to enumerate, which is the point:
an independent certificate, not a fast solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .plant import step
from .signals import action_levels

MAX_HORIZON = 12
MAX_LEVELS = 4
MAX_ADVERSARY = 3


class OracleBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    value: float  # optimal worst-case sup_t |x(t)|
    sup_u: float  # peak |u| on a certified optimal line of play
    nodes: int


def minimax_value(
    horizon: int, levels: Sequence[float], adversary: Sequence[float] = (-1.0, 1.0)
) -> OracleResult:
    """Alternating minimax from x = 0 over `horizon` plant steps.

    Ties between equal-value controller moves break toward the smaller
    reported |u| peak; the adversary breaks the same ties upward, so the
    reported sup_u is deterministic.
    """
    levels = tuple(levels)
    adversary = tuple(adversary)
    if not 1 <= horizon <= MAX_HORIZON:
        raise OracleBudgetError(f"horizon must be in [1, {MAX_HORIZON}], got {horizon}")
    if not 1 <= len(levels) <= MAX_LEVELS:
        raise OracleBudgetError(f"need 1..{MAX_LEVELS} control levels, got {len(levels)}")
    if not 1 <= len(adversary) <= MAX_ADVERSARY:
        raise OracleBudgetError(f"need 1..{MAX_ADVERSARY} adversary moves, got {len(adversary)}")

    memo: dict[tuple[float, int], tuple[float, float]] = {}
    nodes = 0

    def value(x: float, depth: int) -> tuple[float, float]:
        nonlocal nodes
        if depth == horizon:
            return (0.0, 0.0)
        key = (x, depth)
        hit = memo.get(key)
        if hit is not None:
            return hit
        nodes += 1
        best: tuple[float, float] | None = None
        for u in levels:
            worst: tuple[float, float] | None = None
            for r in adversary:
                x2 = step(x, u, r)
                future_v, future_u = value(x2, depth + 1)
                cand = (max(abs(x2), future_v), max(abs(u), future_u))
                if worst is None or cand > worst:
                    worst = cand
            if best is None or worst < best:
                best = worst
        memo[key] = best
        return best

    v, su = value(0.0, 0)
    return OracleResult(v, su, nodes)


def best_scale(
    bits: int,
    horizon: int,
    adversary: Sequence[float] = (-1.0, 1.0),
    lo: float = 0.05,
    hi: float = 2.5,
    coarse: int = 16,
    refine_iters: int = 24,
) -> tuple[float, OracleResult]:
    """Search the symmetric level scale minimizing the game value.

    Coarse grid scan over [lo, hi], then golden-section refinement around the
    best cell.  Returns (scale, result at that scale).
    """

    def res_at(a: float) -> OracleResult:
        return minimax_value(horizon, action_levels(bits, a), adversary)

    grid = [lo + (hi - lo) * i / (coarse - 1) for i in range(coarse)]
    values = [res_at(a).value for a in grid]
    i = min(range(coarse), key=lambda j: (values[j], grid[j]))
    a_lo = grid[max(i - 1, 0)]
    a_hi = grid[min(i + 1, coarse - 1)]

    phi = (5**0.5 - 1) / 2
    c = a_hi - phi * (a_hi - a_lo)
    d = a_lo + phi * (a_hi - a_lo)
    fc, fd = res_at(c).value, res_at(d).value
    for _ in range(refine_iters):
        if fc <= fd:
            a_hi, d, fd = d, c, fc
            c = a_hi - phi * (a_hi - a_lo)
            fc = res_at(c).value
        else:
            a_lo, c, fc = c, d, fd
            d = a_lo + phi * (a_hi - a_lo)
            fd = res_at(d).value
    a_best = c if fc <= fd else d
    return a_best, res_at(a_best)


def state_deviation_floor(bits: int) -> float:
    """No R-bit quantized controller beats this worst-case deviation."""
    return 1.0 / (1 << (bits - 1))


def control_effort_floor(bits: int) -> float:
    """Control effort bound (1 + 1/2**(R-1)) * (1 - 1/2**R); diagnostic only."""
    return (1.0 + 1.0 / (1 << (bits - 1))) * (1.0 - 1.0 / (1 << bits))
