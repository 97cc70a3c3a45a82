from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from steertrack.plant import (
    NonFiniteInputError,
    PlantState,
    StepInputs,
    step,
    step_plant,
    telescoped_error,
)


def test_step_is_plain_accumulation():
    assert step(0.0, 1.0, 2.0, 3.0) == 6.0
    assert step(1.5, -0.5, 0.0) == 1.0


def test_step_association_order_is_fixed():
    # ((x + u) + r) + w, bit for bit
    x, u, r, w = 0.1, 0.2, 0.3, 0.4
    assert step(x, u, r, w) == ((x + u) + r) + w


def test_step_plant_advances_time():
    s = step_plant(PlantState(0, 0.0), StepInputs(u=0.5, r=-0.25))
    assert s == PlantState(1, 0.25)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
@pytest.mark.parametrize("field", ["u", "r", "w"])
def test_step_plant_rejects_non_finite(bad, field):
    inp = {"u": 0.0, "r": 0.0, "w": 0.0}
    inp[field] = bad
    with pytest.raises(NonFiniteInputError) as ei:
        step_plant(PlantState(3, 0.0), StepInputs(**inp))
    assert field in str(ei.value)
    assert "t=3" in str(ei.value)


def test_telescoped_unit_disturbance_plateaus_at_delay():
    assert telescoped_error([1.0] * 5, 2) == [0.0, 1.0, 2.0, 2.0, 2.0, 2.0]


def test_telescoped_zero_delay_cancels_everything():
    assert telescoped_error([0.3, -0.7, 1.0], 0) == [0.0, 0.0, 0.0, 0.0]


def test_telescoped_rejects_negative_delay():
    with pytest.raises(ValueError):
        telescoped_error([1.0], -1)


@given(
    st.lists(st.floats(-1.0, 1.0, allow_nan=False), max_size=60),
    st.integers(0, 15),
)
def test_telescoped_equals_windowed_sum(r, delay):
    # x(t) collapses to the sum of the last min(t, T) disturbances; check
    # against an independently-summed window
    out = telescoped_error(r, delay)
    assert len(out) == len(r) + 1
    for t in range(len(r) + 1):
        window = r[max(0, t - delay) : t]
        assert out[t] == pytest.approx(math.fsum(window), abs=1e-12)


@given(st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=60))
def test_telescoped_sup_bounded_by_delay(r):
    # the delay law's easy half: |x| can never exceed T when |r| <= 1
    for delay in (0, 1, 3, 7):
        sup = max(abs(v) for v in telescoped_error(r, delay))
        assert sup <= delay + 1e-12
