"""Simulated brain-command source.

A driver watches the lateral deviation and, through a rate-limited, delayed
and possibly error-prone command channel, nudges a persistent steering-wheel
setpoint in discrete steps. Interactive sessions push human commands through
the same queue, so delay, rate limiting and misrecognition apply identically.

BrainState is owned by a single simulation loop and must not be shared
across threads.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field


#: Steering-wheel setpoint is clamped to this magnitude (degrees).
SETPOINT_LIMIT = 180.0


@dataclass(frozen=True)
class DriverModel:
    threshold: float = 1.0       # m of (projected) deviation before acting
    delta: float = 75.0          # deg of steering wheel per command
    min_interval: float = 1.0    # s between accepted commands
    delay: float = 0.25          # s from issue to delivery
    error_rate: float = 0.0      # probability a command's sign is flipped
    preview: float = 9.0         # s of deviation-rate anticipation
    seed: int | None = None      # None: the run seed drives the channel rng

    def __post_init__(self):
        if self.threshold <= 0 or self.delta <= 0 or self.min_interval <= 0:
            raise ValueError("driver threshold, delta and min_interval must be positive")
        if self.delay < 0:
            raise ValueError("driver delay must be non-negative")
        if self.preview < 0:
            raise ValueError("driver preview must be non-negative")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError("driver error_rate must lie in [0, 1]")

    def sensed_deviation(self, e: float, de: float) -> float:
        """Deviation the driver reacts to: the current offset projected a
        short horizon ahead. Pure anticipation; zero preview degenerates to
        the raw offset."""
        return e + self.preview * de


@dataclass(frozen=True)
class BrainCommand:
    issue: float     # s, simulated time the command was produced
    delivery: float  # s, simulated time it reaches the wheel setpoint
    delta: float     # deg, signed step

    def __post_init__(self):
        if self.delivery < self.issue:
            raise ValueError("command delivery precedes issue")


@dataclass
class BrainState:
    """Mutable channel state: pending queue and the held wheel setpoint."""

    setpoint: float = 0.0
    queue: list[BrainCommand] = field(default_factory=list)
    last_issue: float = -math.inf
    regulations: int = 0
    _last_t: float = -math.inf

    def rate_limited(self, t: float, model: DriverModel) -> bool:
        return t - self.last_issue < model.min_interval

    def issue(
        self, sign: float, t: float, model: DriverModel, rng: random.Random
    ) -> BrainCommand | None:
        """Push one signed command into the channel, or None if rate-limited.

        Consumes exactly one rng draw per accepted command so that error-free
        and error-injected runs share issue times.
        """
        if self.rate_limited(t, model):
            return None
        if rng.random() < model.error_rate:
            sign = -sign
        cmd = BrainCommand(issue=t, delivery=t + model.delay, delta=sign * model.delta)
        self.queue.append(cmd)
        self.last_issue = t
        return cmd


def decide(
    e: float, t: float, model: DriverModel, state: BrainState, rng: random.Random
) -> BrainCommand | None:
    """Threshold driver policy: push back when the deviation grows too large.

    Call times must be non-decreasing. Returns the issued command, if any.
    """
    if t < state._last_t:
        raise ValueError(f"decide() called with t going backwards ({t} < {state._last_t})")
    state._last_t = t
    if abs(e) < model.threshold:
        return None
    return state.issue(-math.copysign(1.0, e), t, model, rng)


def deliver(t: float, state: BrainState) -> float:
    """Apply all queued commands due by time t; returns the new setpoint."""
    while state.queue and state.queue[0].delivery <= t:
        cmd = state.queue.pop(0)
        raw = state.setpoint + cmd.delta
        state.setpoint = max(-SETPOINT_LIMIT, min(SETPOINT_LIMIT, raw))
        state.regulations += 1
    return state.setpoint
