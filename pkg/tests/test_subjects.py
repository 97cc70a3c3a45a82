from __future__ import annotations

import numpy as np
import pytest

from steertrack.engine import Session, SessionConfig, log_text, run_headless
from steertrack.script import ParameterSchedule, ScheduleRow, model_schedule
from steertrack.subjects import (
    KINDS,
    NOISY_HUMAN_DEFAULTS,
    ConstantAngle,
    DelayedInverter,
    NoisyHuman,
    QuantizedGreedy,
    ScriptedTrace,
    SubjectConfigError,
    SubjectSpec,
    VelocitySeeker,
    build_subject,
    parse_subject_spec,
    quantized_greedy,
)

# --- specs ---------------------------------------------------------------


def test_parse_spec_with_params():
    spec = parse_subject_spec("noisy-human:gain=60,sd=0.5")
    assert spec.kind == "noisy-human"
    assert spec.params == {"gain": 60.0, "sd": 0.5}


def test_parse_spec_bare_kind():
    assert parse_subject_spec("quantized-greedy") == SubjectSpec("quantized-greedy", {})


def test_spec_text_round_trips():
    spec = parse_subject_spec("delayed-inverter:T=0.3")
    assert parse_subject_spec(spec.text()) == spec


def test_parse_spec_errors():
    with pytest.raises(SubjectConfigError):
        parse_subject_spec("robot")
    with pytest.raises(SubjectConfigError):
        parse_subject_spec("noisy-human:gain")
    with pytest.raises(SubjectConfigError):
        parse_subject_spec("noisy-human:gain=lots")


def test_build_subject_rejects_unknown_params():
    with pytest.raises(SubjectConfigError) as ei:
        build_subject("noisy-human:gains=60")
    assert "gains" in str(ei.value)


def test_external_kind_is_listed_but_not_buildable():
    assert "external" in KINDS
    with pytest.raises(SubjectConfigError):
        build_subject("external")


def test_build_subject_kinds():
    assert isinstance(build_subject("delayed-inverter:T=0.1"), DelayedInverter)
    assert isinstance(build_subject("quantized-greedy"), QuantizedGreedy)
    assert isinstance(build_subject("noisy-human"), NoisyHuman)


# --- delayed inverter ------------------------------------------------------


def test_inverter_achieves_the_delay_bound():
    for delay in (0, 1, 5):
        sched = model_schedule([1.0] * 80)
        log = run_headless(
            SessionConfig(schedule=sched, mode="model", subject="inv"),
            DelayedInverter(delay / 100),
        )
        assert log.sup_x() == float(delay)
        assert log.sup_u() == 1.0


def test_inverter_rejects_negative_delay():
    with pytest.raises(SubjectConfigError):
        DelayedInverter(-0.1)


def test_inverter_game_mode_needs_live_view():
    rows = [ScheduleRow(0.0, 0.5, 0.0, 10, 0.0, 0.3, 10)]
    sched = ParameterSchedule(rows, {"duration": "1"})
    with pytest.raises(SubjectConfigError):
        run_headless(SessionConfig(schedule=sched, subject="inv"), DelayedInverter(0.0))


# --- quantized greedy --------------------------------------------------------


def test_greedy_picks_the_best_level():
    levels = (-1.0, -0.5, 0.5, 1.0)
    assert quantized_greedy(0.7, 0.0, levels) == -0.5
    assert quantized_greedy(-0.7, 0.0, levels) == 0.5
    assert quantized_greedy(2.0, 0.0, levels) == -1.0
    # exact tie between +/-: smaller magnitude first, then negative
    assert quantized_greedy(0.0, 0.0, levels) == -0.5


def test_greedy_accounts_for_pending_control():
    levels = (-1.0, -0.5, 0.5, 1.0)
    assert quantized_greedy(0.7, -0.5, levels) == -0.5


def test_greedy_dither_floor_scales_with_rate():
    # with no disturbance at all, the zero-free level set forces a steady
    # dither whose amplitude is exactly the smallest level magnitude
    for bits in (1, 2, 3):
        rows = [ScheduleRow(i / 100, 0.5, 0.0, bits, 0.0, 0.0, 10) for i in range(300)]
        sched = ParameterSchedule(rows, None, _trusted=True)
        log = run_headless(SessionConfig(schedule=sched, subject="greedy"), QuantizedGreedy())
        t, x, _ = log.arrays()
        sup = np.abs(x[t >= 0.5]).max() / 10.0
        assert sup == 1e-4 * 90.0 / 2 ** (bits - 1)


def test_greedy_is_game_mode_only():
    sched = model_schedule([0.0] * 10)
    with pytest.raises(SubjectConfigError):
        run_headless(SessionConfig(schedule=sched, mode="model", subject="g"), QuantizedGreedy())


def test_greedy_takes_no_params():
    with pytest.raises(SubjectConfigError):
        build_subject("quantized-greedy:a=1")


# --- noisy human --------------------------------------------------------------


def _mini_game(n=200, **kw):
    base = dict(bump=0.0, action_bits=10, action_delay=0.0, vision_delay=0.0, vision_bits=10)
    base.update(kw)
    rows = [ScheduleRow(i / 100, 0.5, **base) for i in range(n)]
    return ParameterSchedule(rows, None, _trusted=True)


def test_noisy_human_documented_defaults():
    assert NOISY_HUMAN_DEFAULTS == {"gain": 80.0, "delay": 0.5, "rate": 8.0, "sd": 1.0}
    subject = NoisyHuman()
    assert subject.gain == 80.0
    assert subject.delay_ticks == 50
    assert subject.rate == 8
    assert subject.sd == 1.0
    built = build_subject("noisy-human")
    assert (built.gain, built.delay_ticks, built.rate, built.sd) == (80.0, 50, 8, 1.0)


def test_noisy_human_is_seed_deterministic():
    sched = _mini_game()
    a = log_text(run_headless(SessionConfig(schedule=sched, seed=4, subject="nh"), NoisyHuman()))
    b = log_text(run_headless(SessionConfig(schedule=sched, seed=4, subject="nh"), NoisyHuman()))
    c = log_text(run_headless(SessionConfig(schedule=sched, seed=5, subject="nh"), NoisyHuman()))
    assert a == b
    assert a != c


def test_noisy_human_zero_sd_removes_randomness():
    sched = _mini_game()
    a = run_headless(SessionConfig(schedule=sched, seed=1, subject="nh"), NoisyHuman(sd=0.0))
    b = run_headless(SessionConfig(schedule=sched, seed=2, subject="nh"), NoisyHuman(sd=0.0))
    assert a.records == b.records  # seed only feeds the motor noise


def test_noisy_human_validation():
    with pytest.raises(SubjectConfigError):
        NoisyHuman(gain=0.0)
    with pytest.raises(SubjectConfigError):
        NoisyHuman(delay_s=-0.1)
    with pytest.raises(SubjectConfigError):
        NoisyHuman(rate=11)
    with pytest.raises(SubjectConfigError):
        NoisyHuman(rate=2.5)
    with pytest.raises(SubjectConfigError):
        NoisyHuman(sd=-1.0)


def test_noisy_human_is_game_mode_only():
    sched = model_schedule([0.0] * 10)
    with pytest.raises(SubjectConfigError):
        run_headless(SessionConfig(schedule=sched, mode="model", subject="nh"), NoisyHuman())


def test_noisy_human_output_respects_its_internal_rate():
    # rate=2 leaves four angle levels: +/-45, +/-90
    sched = _mini_game()
    session = Session(SessionConfig(schedule=sched, seed=3, subject="nh"), NoisyHuman(rate=2))
    log = session.run()
    assert {abs(a) for _, a in log.inputs} <= {45.0, 90.0}


# --- simple drivers -----------------------------------------------------------


def test_constant_angle():
    sched = _mini_game(n=20)
    log = run_headless(SessionConfig(schedule=sched, subject="c"), ConstantAngle(30.0))
    assert {a for _, a in log.inputs} == {30.0}


def test_scripted_trace_replays_angles():
    sched = _mini_game(n=5)
    log = run_headless(
        SessionConfig(schedule=sched, subject="s"), ScriptedTrace([1.0, 2.0, 3.0, 4.0, 5.0])
    )
    assert [a for _, a in log.inputs] == [1.0, 2.0, 3.0, 4.0, 5.0]


def test_velocity_seeker_tracks_smoothly():
    sched = _mini_game(n=400)
    log = run_headless(SessionConfig(schedule=sched, subject="v"), VelocitySeeker())
    t, x, _ = log.arrays()
    assert np.max(np.abs(x[t >= 1.0])) < 0.5  # settles near the still trail
