"""Theory checks behind `steertrack verify`.

Two harnesses: the delay law (optimal worst-case error equals the loop delay
under a unit disturbance, with unit control effort) and the rate bound (no
R-bit quantized controller keeps the worst-case deviation below 1/2**(R-1)).
Both run the real engine or the exhaustive oracle, not closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import SessionConfig, run_headless
from .oracle import best_scale, control_effort_floor, state_deviation_floor
from .plant import telescoped_error
from .prng import SplitMix64, stream_seed
from .script import model_schedule
from .subjects import DelayedInverter

EPS = 1e-9


@dataclass(frozen=True)
class DelayCheck:
    delay_ticks: int
    sup_x: float  # engine, r = +1 every tick
    sup_u: float
    matches_telescoped: bool  # engine trajectory == windowed-sum form, exactly
    seeded_sup_x: float  # worst over seeded +/-1 square waves
    ok: bool


@dataclass(frozen=True)
class RateCheck:
    bits: int
    horizon: int
    scale: float
    value: float  # minimax worst-case sup|x| at the searched scale
    floor: float  # 1 / 2**(bits-1)
    sup_u: float
    effort_floor: float  # diagnostic only
    ok: bool


def _square_wave(seed: int, n_ticks: int, segment_ticks: int = 10) -> list[float]:
    rng = SplitMix64(seed)
    out = []
    while len(out) < n_ticks:
        out.extend([float(rng.sign())] * segment_ticks)
    return out[:n_ticks]


def check_delay_law(
    max_delay_ticks: int = 10, n_ticks: int = 200, seeds=(1, 2, 3, 4, 5)
) -> list[DelayCheck]:
    """For each delay T: run u(t) = -r(t-T) against r = 1 and seeded squares.

    sup|x| must equal T exactly for the unit disturbance (and never exceed it
    for any |r| <= 1), with sup|u| = 1.
    """
    out = []
    for delay in range(max_delay_ticks + 1):
        sched = model_schedule([1.0] * n_ticks)
        config = SessionConfig(schedule=sched, mode="model", subject=f"delayed-inverter:T={delay / 100}")
        log = run_headless(config, DelayedInverter(delay / 100.0))
        sup_x, sup_u = log.sup_x(), log.sup_u()

        reference = telescoped_error([1.0] * n_ticks, delay)
        matches = all(
            rec[1] == reference[i] for i, rec in enumerate(log.records)
        )

        seeded_sup = 0.0
        for seed in seeds:
            wave = _square_wave(stream_seed(seed, "delay-law-square"), n_ticks)
            slog = run_headless(
                SessionConfig(schedule=model_schedule(wave), mode="model", subject="delayed-inverter"),
                DelayedInverter(delay / 100.0),
            )
            seeded_sup = max(seeded_sup, slog.sup_x())

        ok = (
            sup_x == float(delay)
            and (sup_u == 1.0 if delay < n_ticks else sup_u == 0.0)
            and matches
            and seeded_sup <= delay + EPS
        )
        out.append(DelayCheck(delay, sup_x, sup_u, matches, seeded_sup, ok))
    return out


def check_rate_certificate(
    bits_list=(1, 2), horizon: int = 6, adversary=(-1.0, 1.0)
) -> list[RateCheck]:
    """Exhaustive minimax over uniform level sets: even the best scale cannot
    beat the 1/2**(R-1) deviation floor."""
    out = []
    for bits in bits_list:
        scale, res = best_scale(bits, horizon, adversary)
        floor = state_deviation_floor(bits)
        ok = res.value >= floor - EPS
        out.append(
            RateCheck(
                bits, horizon, scale, res.value, floor, res.sup_u, control_effort_floor(bits), ok
            )
        )
    return out
