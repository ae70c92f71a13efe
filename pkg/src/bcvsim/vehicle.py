"""Kinematic bicycle plant.

Constant forward speed, steering-wheel command reduced through a fixed
ratio to a rate-limited road-wheel angle, pose integrated with RK4. The
step function is pure: no shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.7            # m
    steering_ratio: float = 5.5       # steering-wheel deg per road-wheel deg
    max_road_wheel: float = 8.0       # deg
    speed: float = 2.0                # m/s, constant
    slew_rate: float = 30.0           # road-wheel deg/s

    def __post_init__(self):
        for name in ("wheelbase", "steering_ratio", "max_road_wheel", "slew_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"vehicle parameter {name} must be positive")
        if self.speed < 0:
            raise ValueError("vehicle parameter speed must be non-negative")


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0        # m, world frame
    y: float = 0.0
    heading: float = 0.0  # rad, counterclockwise from +x
    road_wheel: float = 0.0  # deg, current front-wheel angle
    t: float = 0.0        # s


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else (hi if v > hi else v)


def step(
    state: VehicleState,
    params: VehicleParams,
    steering_wheel_cmd: float,
    dt: float,
) -> VehicleState:
    """Advance the pose by dt under a steering-wheel-angle command (degrees).

    The road wheel slews toward cmd/ratio at the rate limit and is clamped
    to the mechanical stop; the pose then integrates the bicycle kinematics
    x' = v cos(h), y' = v sin(h), h' = (v/L) tan(delta) with classic RK4,
    holding delta constant across the step.
    """
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"invalid state: dt {dt} outside (0, 0.1]")
    values = (state.x, state.y, state.heading, state.road_wheel, steering_wheel_cmd, dt)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("invalid state: non-finite input")

    target = _clamp(
        steering_wheel_cmd / params.steering_ratio,
        -params.max_road_wheel,
        params.max_road_wheel,
    )
    max_move = params.slew_rate * dt
    delta = state.road_wheel + _clamp(target - state.road_wheel, -max_move, max_move)
    delta = _clamp(delta, -params.max_road_wheel, params.max_road_wheel)

    v = params.speed
    omega = (v / params.wheelbase) * math.tan(math.radians(delta))

    # RK4 on (x, y, heading); omega is constant so the heading stage is exact.
    h = state.heading
    k1x, k1y = v * math.cos(h), v * math.sin(h)
    h2 = h + 0.5 * dt * omega
    k2x, k2y = v * math.cos(h2), v * math.sin(h2)
    k3x, k3y = k2x, k2y  # heading stages 2 and 3 coincide for constant omega
    h4 = h + dt * omega
    k4x, k4y = v * math.cos(h4), v * math.sin(h4)

    return replace(
        state,
        x=state.x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y=state.y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        heading=h + dt * omega,
        road_wheel=delta,
        t=state.t + dt,
    )
