"""Arbitration between the brain setpoint and the auxiliary controller.

Two schemes: hard switching on a deviation threshold with hysteresis, and a
quadratic-cost blend that trades fidelity to the brain signal against
corrective action and output smoothness. One arbiter instance belongs to one
simulation run; its log can be read after the run completes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SCHEMES = ("threshold", "cost")

#: Log label used by the cost scheme, which never switches sources outright.
BLEND = "blend"


@dataclass(frozen=True)
class SharedConfig:
    scheme: str = "threshold"
    tau: float = 0.1           # m; defaults to the deviation universe edge
    hysteresis: float = 0.6    # release at hysteresis * tau
    smooth_weight: float = 0.2

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown arbitration scheme {self.scheme!r}")
        if self.tau <= 0:
            raise ValueError("switch threshold tau must be positive")
        if not 0.0 < self.hysteresis <= 1.0:
            raise ValueError("hysteresis ratio must lie in (0, 1]")
        if self.smooth_weight < 0:
            raise ValueError("smoothness weight must be non-negative")


@dataclass(frozen=True)
class StepRecord:
    u_brain: float
    u_fuzzy: float
    e: float
    u_out: float
    source: str


@dataclass
class ArbiterState:
    active: str = "brain"
    u_prev: float = 0.0
    switches: int = 0
    log: list[StepRecord] = field(default_factory=list)

    def _record(self, u_brain, u_fuzzy, e, u_out, source):
        self.log.append(StepRecord(u_brain, u_fuzzy, e, u_out, source))


def arbitrate_threshold(
    u_brain: float, u_fuzzy: float, e: float, cfg: SharedConfig, state: ArbiterState
) -> float:
    """Pure switching: the auxiliary takes over above tau, hands back below
    hysteresis * tau, and the output is always exactly one of the inputs."""
    if state.active == "brain":
        if abs(e) > cfg.tau:
            state.active = "fuzzy"
            state.switches += 1
    else:
        if abs(e) < cfg.hysteresis * cfg.tau:
            state.active = "brain"
            state.switches += 1
    u_out = u_brain if state.active == "brain" else u_fuzzy
    state.u_prev = u_out
    state._record(u_brain, u_fuzzy, e, u_out, state.active)
    return u_out


def cost_weights(e: float, cfg: SharedConfig) -> tuple[float, float]:
    """Deviation-scheduled weights: full trust in the brain at e = 0 fading
    linearly to full trust in the auxiliary at |e| >= tau."""
    ratio = abs(e) / cfg.tau
    w_brain = max(0.0, 1.0 - ratio)
    w_fuzzy = min(1.0, ratio)
    return w_brain, w_fuzzy


def arbitrate_cost(
    u_brain: float, u_fuzzy: float, e: float, cfg: SharedConfig, state: ArbiterState
) -> float:
    """Minimize w_b (u - u_brain)^2 + w_f (u - u_fuzzy)^2 + w_s (u - u_prev)^2.

    The quadratic is convex with w_b + w_f = 1, so the closed-form weighted
    mean is the exact minimizer.
    """
    w_b, w_f = cost_weights(e, cfg)
    w_s = cfg.smooth_weight
    u_out = (w_b * u_brain + w_f * u_fuzzy + w_s * state.u_prev) / (w_b + w_f + w_s)
    state.u_prev = u_out
    state._record(u_brain, u_fuzzy, e, u_out, BLEND)
    return u_out


def arbitrate(
    u_brain: float, u_fuzzy: float, e: float, cfg: SharedConfig, state: ArbiterState
) -> float:
    """Dispatch to the configured scheme."""
    if cfg.scheme == "threshold":
        return arbitrate_threshold(u_brain, u_fuzzy, e, cfg, state)
    return arbitrate_cost(u_brain, u_fuzzy, e, cfg, state)
