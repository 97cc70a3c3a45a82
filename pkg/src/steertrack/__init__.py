"""steertrack: a fixed-tick steering/tracking testbed.

A subject (human over WebSocket, or a synthetic controller) steers a bar to
follow a moving trail while the testbed degrades the loop on schedule:
delayed or previewed vision, delayed action, quantized vision and action
channels, and square-wave force bumps.  Sessions are deterministic given
(script, seed, subject) and fully replayable from their input traces.
"""

from .analysis import Norms, block_norms, movement_times, norms, spearman
from .disturbance import FittsSchedule, Track, gen_bumps, gen_fitts, gen_trail
from .engine import (
    Frame,
    Session,
    SessionConfig,
    SessionLog,
    Subject,
    read_log,
    replay,
    run_headless,
    write_log,
)
from .oracle import best_scale, minimax_value
from .plant import PlantState, StepInputs, step, step_plant, telescoped_error
from .script import (
    ParameterSchedule,
    ScheduleRow,
    build_game,
    model_schedule,
    parse_script,
    read_script,
    save_script,
    write_script,
)
from .signals import DelayLine, VisionWindow, quantize_action, quantize_vision, visible_segment
from .subjects import build_subject, parse_subject_spec

__version__ = "0.1.0"
