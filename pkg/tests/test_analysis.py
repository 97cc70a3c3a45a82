from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steertrack.analysis import (
    block_norms,
    export_block_norms,
    export_movements,
    movement_times,
    norms,
    spearman,
)
from steertrack.disturbance import FittsJump, FittsSchedule
from steertrack.engine import SessionLog
from steertrack.script import ParameterSchedule, ScheduleRow


def test_norms_small_example():
    nm = norms([3.0, -4.0])
    assert nm.l1 == 3.5
    assert nm.l2 == pytest.approx(math.sqrt(12.5))
    assert nm.linf == 4.0
    assert nm.n == 2


def test_norms_empty_is_nan_not_crash():
    nm = norms([])
    assert nm.n == 0
    assert math.isnan(nm.l1) and math.isnan(nm.l2) and math.isnan(nm.linf)


def test_norms_match_direct_formulas():
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = rng.normal(size=rng.integers(1, 400)) * rng.uniform(0.01, 100)
        nm = norms(x)
        n = len(x)
        assert nm.l1 == pytest.approx(math.fsum(abs(v) for v in x) / n, rel=1e-12)
        assert nm.l2 == pytest.approx(math.sqrt(math.fsum(v * v for v in x) / n), rel=1e-12)
        assert nm.linf == max(abs(v) for v in x)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_power_mean_chain(x):
    nm = norms(x)
    slack = 1e-9 * max(1.0, nm.linf)
    assert nm.l1 <= nm.l2 + slack
    assert nm.l2 <= nm.linf + slack


@given(
    st.lists(st.floats(-100, 100), min_size=1, max_size=50),
    st.floats(-1000, 1000).filter(lambda c: abs(c) > 1e-6),
)
def test_norms_scale_equivariance(x, c):
    a, b = norms(x), norms([c * v for v in x])
    assert b.l1 == pytest.approx(abs(c) * a.l1, rel=1e-9, abs=1e-12)
    assert b.l2 == pytest.approx(abs(c) * a.l2, rel=1e-9, abs=1e-12)
    assert b.linf == pytest.approx(abs(c) * a.linf, rel=1e-9, abs=1e-12)


# --- per-block summaries -------------------------------------------------------


def _fake_log(x_by_tick, header=None) -> SessionLog:
    records = [(i / 100, float(x), 0.0) for i, x in enumerate(x_by_tick)]
    return SessionLog(header or {"px_scale": repr(10.0)}, records, [])


def _two_block_schedule() -> ParameterSchedule:
    rows = [
        ScheduleRow(0.0, 0.5, 0.0, 10, 0.0, 0.0, 10),
        ScheduleRow(10.0, 0.5, 0.0, 5, 0.0, 0.0, 10),
    ]
    return ParameterSchedule(rows, {"duration": "20", "blocks": "0:10:a,10:20:b"})


def test_block_norms_trims_both_edges():
    x = [1.0] * 1000 + [3.0] * 1000
    rows = block_norms(_fake_log(x), _two_block_schedule(), trim_s=2.0)
    assert [r.label for r in rows] == ["a", "b"]
    assert rows[0].norms.n == 600  # [2 s, 8 s) of a 10 s block
    assert rows[0].norms.l1 == 1.0 and rows[0].norms.linf == 1.0
    assert rows[1].norms.n == 600
    assert rows[1].norms.l1 == 3.0


def test_block_norms_keeps_overtrimmed_blocks_as_nan_rows():
    x = [1.0] * 2000
    rows = block_norms(_fake_log(x), _two_block_schedule(), trim_s=5.0)
    assert len(rows) == 2
    assert rows[0].norms.n == 0
    assert math.isnan(rows[0].norms.l1)


def test_block_norms_rejects_negative_trim():
    with pytest.raises(ValueError):
        block_norms(_fake_log([0.0]), _two_block_schedule(), trim_s=-1.0)


def test_spearman_endpoints():
    assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)
    assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)


# --- movement times -------------------------------------------------------------


def _jump_schedule() -> FittsSchedule:
    return FittsSchedule(
        (
            FittsJump(0.0, 0.5, 0.1),
            FittsJump(1.0, 0.3, 0.1),  # zone half-width: 0.05 units = 0.5 log units
            FittsJump(2.0, 0.7, 0.05),
        )
    )


def test_movement_times_first_zone_entry():
    # far from the zone until t = 1.25, inside afterwards; second jump never reached
    x = []
    for i in range(300):
        t = i / 100
        if 1.0 < t < 1.25 or t >= 2.0:
            x.append(2.0)
        elif t >= 1.25:
            x.append(0.2)
        else:
            x.append(0.0)
    moves = movement_times(_fake_log(x), _jump_schedule())
    assert len(moves) == 2  # the starting zone is not a movement
    assert moves[0].t_jump_s == 1.0
    assert moves[0].distance == pytest.approx(0.2)
    assert moves[0].mt_s == pytest.approx(0.25)
    assert moves[1].mt_s is None


def test_movement_entry_must_follow_the_jump():
    # already in-zone samples at the jump tick itself must not count
    x = [0.0] * 300
    moves = movement_times(_fake_log(x), _jump_schedule())
    assert moves[0].mt_s == pytest.approx(0.01)


# --- exports -------------------------------------------------------------------


def test_export_block_norms(tmp_path):
    rows = block_norms(_fake_log([1.0] * 2000), _two_block_schedule(), trim_s=2.0)
    p = export_block_norms(rows, tmp_path / "blocks.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "block,label,start_s,end_s,n,L1,L2,Linf"
    assert len(lines) == 3


def test_export_movements(tmp_path):
    moves = movement_times(_fake_log([0.0] * 300), _jump_schedule())
    p = export_movements(moves, tmp_path / "moves.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "jump,t_s,center,width,distance,mt_s"
    assert len(lines) == 3
