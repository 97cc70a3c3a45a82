"""Synthetic subjects: scripted controllers that close the loop headlessly.

Specs are compact strings like "noisy-human:sd=2,delay=0.2" so the CLI and
the service can name a controller and its parameters in one token.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import Frame, Session, Subject
from .prng import gauss_block, stream_seed
from .signals import DelayLine, action_levels, quantize_action
from .units import to_ticks

KINDS = ("delayed-inverter", "quantized-greedy", "noisy-human", "external")


class SubjectConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SubjectSpec:
    kind: str
    params: dict[str, float]

    def text(self) -> str:
        if not self.params:
            return self.kind
        body = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{body}"


def parse_subject_spec(text: str) -> SubjectSpec:
    kind, _, body = text.partition(":")
    kind = kind.strip()
    if kind not in KINDS:
        raise SubjectConfigError(f"unknown subject kind {kind!r}; valid: {KINDS}")
    params: dict[str, float] = {}
    if body:
        for token in body.split(","):
            k, sep, v = token.partition("=")
            if not sep:
                raise SubjectConfigError(f"subject param {token!r} is not key=value")
            try:
                params[k.strip()] = float(v)
            except ValueError:
                raise SubjectConfigError(f"subject param {token!r} is not numeric") from None
    return SubjectSpec(kind, params)


def build_subject(spec: str | SubjectSpec) -> Subject:
    if isinstance(spec, str):
        spec = parse_subject_spec(spec)
    if spec.kind == "external":
        raise SubjectConfigError("external subjects drive sessions through `serve`")
    cls = {
        "delayed-inverter": DelayedInverter,
        "quantized-greedy": QuantizedGreedy,
        "noisy-human": NoisyHuman,
    }[spec.kind]
    return cls.from_params(spec.params)


def _take(params: dict[str, float], allowed: dict[str, float], kind: str) -> dict[str, float]:
    unknown = set(params) - set(allowed)
    if unknown:
        raise SubjectConfigError(f"{kind}: unknown params {sorted(unknown)}; valid: {sorted(allowed)}")
    return {**allowed, **params}


class DelayedInverter(Subject):
    """Cancels the disturbance it saw `delay` seconds ago.

    Model mode plays u(t) = -r(t - T) exactly, the policy behind the delay
    law.  Game mode is its screen analogue: a deadbeat tracker of the newest
    visible sample, with its own reaction delay of T; it needs T_act = 0 and
    no stale view (T_vis <= 0) to stay near-exact.
    """

    def __init__(self, delay_s: float = 0.0):
        if delay_s < 0:
            raise SubjectConfigError(f"delay must be >= 0, got {delay_s}")
        self.delay_ticks = to_ticks(delay_s)

    @classmethod
    def from_params(cls, params: dict[str, float]) -> "DelayedInverter":
        p = _take(params, {"T": 0.0}, "delayed-inverter")
        return cls(delay_s=p["T"])

    def reset(self, session: Session) -> None:
        self._mode = session.mode
        self._k = session.k
        self._r_seen: list[float] = []
        self._line = DelayLine(self.delay_ticks)
        if self._mode == "game":
            arrays = session.config.schedule.per_tick()
            if len(arrays["vision_delay_ticks"]) and int(arrays["vision_delay_ticks"].max()) > 0:
                raise SubjectConfigError("delayed-inverter needs T_vis <= 0 in game mode")

    def act(self, frame: Frame) -> float:
        if self._mode == "model":
            self._r_seen.append(frame.r_current())
            n = len(self._r_seen) - 1
            if n < self.delay_ticks:
                return 0.0
            return -self._r_seen[n - self.delay_ticks]
        _, target = frame.newest_visible(max_ahead_ticks=1)
        angle = (target - frame.player()) / self._k
        return self._line.push(angle)


def quantized_greedy(x: float, pending_u: float, levels) -> float:
    """Level that best cancels the predicted error x + pending_u.

    Ties go to the smaller magnitude, then to the negative level.
    """
    predicted = x + pending_u
    return min(levels, key=lambda s: (abs(predicted + s), abs(s), s))


class QuantizedGreedy(Subject):
    """Greedy one-step tracker through the action quantizer (game mode).

    Keeps its own record of emitted-but-not-yet-applied levels so the delayed
    action path does not double-correct.
    """

    @classmethod
    def from_params(cls, params: dict[str, float]) -> "QuantizedGreedy":
        _take(params, {}, "quantized-greedy")
        return cls()

    def reset(self, session: Session) -> None:
        if session.mode != "game":
            raise SubjectConfigError("quantized-greedy runs in game mode")
        self._k = session.k
        self._max_angle = session.max_angle
        self._max_speed = session.k * session.max_angle
        self._emitted: list[tuple[int, float]] = []

    def act(self, frame: Frame) -> float:
        p = frame.params()
        d = to_ticks(p["T_act"])
        n = frame.tick
        self._emitted = [(s, lev) for s, lev in self._emitted if s > n - d]
        pending = sum(lev for _, lev in self._emitted)
        levels = action_levels(int(p["R_act"]), self._max_speed)
        lev = quantized_greedy(frame.x, pending, levels)
        self._emitted.append((n, lev))
        return (lev / self._max_speed) * self._max_angle


NOISY_HUMAN_DEFAULTS = {"gain": 80.0, "delay": 0.5, "rate": 8.0, "sd": 1.0}


class NoisyHuman(Subject):
    """Proportional tracker with human-like imperfections.

    Follows the newest visible trail sample (using preview only as far as its
    own reaction delay can exploit it), passes the command through an internal
    delay line and a coarse internal angle quantizer, and adds seeded Gaussian
    motor noise.  Game mode only.
    """

    def __init__(self, gain: float = 80.0, delay_s: float = 0.5, rate: int = 8, sd: float = 1.0):
        if gain <= 0:
            raise SubjectConfigError(f"gain must be positive, got {gain}")
        if delay_s < 0:
            raise SubjectConfigError(f"delay must be >= 0, got {delay_s}")
        if not 1 <= int(rate) <= 10 or rate != int(rate):
            raise SubjectConfigError(f"rate must be an integer in [1, 10], got {rate}")
        if sd < 0:
            raise SubjectConfigError(f"sd must be >= 0, got {sd}")
        self.gain = gain
        self.delay_ticks = to_ticks(delay_s)
        self.rate = int(rate)
        self.sd = sd

    @classmethod
    def from_params(cls, params: dict[str, float]) -> "NoisyHuman":
        p = _take(params, dict(NOISY_HUMAN_DEFAULTS), "noisy-human")
        return cls(gain=p["gain"], delay_s=p["delay"], rate=int(p["rate"]), sd=p["sd"])

    def reset(self, session: Session) -> None:
        if session.mode != "game":
            raise SubjectConfigError("noisy-human runs in game mode")
        self._max_angle = session.max_angle
        self._line = DelayLine(self.delay_ticks)
        n = session.n_ticks
        if self.sd > 0:
            seed = stream_seed(session.config.seed, "subject-noise")
            self._noise = self.sd * gauss_block(seed, n)
        else:
            self._noise = [0.0] * n

    def act(self, frame: Frame) -> float:
        _, target = frame.newest_visible(max_ahead_ticks=self.delay_ticks)
        err = target - frame.player()
        delayed = self._line.push(self.gain * err)
        noisy = delayed + float(self._noise[frame.tick])
        return quantize_action(noisy, self.rate, self._max_angle, self._max_angle)


# --- simple drivers used by tests and the pointing task ----------------------


class ConstantAngle(Subject):
    def __init__(self, angle: float):
        self.angle = angle

    def act(self, frame: Frame) -> float:
        return self.angle


class ScriptedTrace(Subject):
    """Replays a fixed angle sequence, one entry per tick."""

    def __init__(self, angles):
        self.angles = [float(a) for a in angles]

    def act(self, frame: Frame) -> float:
        return self.angles[frame.tick]


class VelocitySeeker(Subject):
    """Moves the bar toward the current zone center at a capped speed.

    Deadbeat near the target, constant velocity when far; handy for
    predictable movement times in the pointing task.
    """

    def __init__(self, speed_units_s: float = 0.5):
        if speed_units_s <= 0:
            raise SubjectConfigError("speed must be positive")
        self.speed = speed_units_s

    def reset(self, session: Session) -> None:
        if session.mode != "game":
            raise SubjectConfigError("velocity-seeker runs in game mode")
        self._k = session.k
        self._cap = min(self.speed / (self._k * 100.0), session.max_angle)

    def act(self, frame: Frame) -> float:
        zone = frame.zone()
        target = zone.center if zone else 0.5
        angle = (target - frame.player()) / self._k
        return max(-self._cap, min(self._cap, angle))
