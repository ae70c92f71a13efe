"""Closed-loop scenarios: configuration, simulation loop, metrics, exports.

One Simulation instance owns all mutable run state and is advanced one dt at
a time; the batch runner and the interactive session drive the identical
step() code path, which is what makes recorded command schedules replayable
bit-for-bit. Runs are deterministic in (config, seed).
"""

from __future__ import annotations

import math
import random
from functools import lru_cache
from dataclasses import dataclass, field, replace

from .bci import BrainState, DriverModel, decide, deliver
from .fuzzy import (
    DEFAULT_CENTERS,
    DEVIATION_SHAPES,
    OUTPUT_SHAPES,
    RATE_EDGE_REACH_FRACTION,
    RATE_SHAPES,
    RATE_ZO_REACH_FRACTION,
    LookupTable,
    MamdaniController,
    RuleTable,
    make_variable,
)
from .shared import ArbiterState, SharedConfig, arbitrate
from .track import StadiumTrack, deviation_rate
from .vehicle import VehicleParams, VehicleState, step as vehicle_step

MODES = ("brain-only", "shared-threshold", "shared-cost")
DRIVER_POLICIES = ("threshold", "scripted", "disabled")

#: A run aborts once the vehicle is this far beyond the road edge (m).
OFFROAD_MARGIN = 2.0

TRAJECTORY_COLUMNS = (
    "t", "x", "y", "heading", "e", "de",
    "u_brain", "u_fuzzy", "u_out", "source", "regulations",
)


@dataclass(frozen=True)
class ControllerSettings:
    """Numeric knobs of the auxiliary controller used by a run."""

    deviation_gain: float = 0.1
    rate_gain: float = 0.5
    output_gain: float = 70.0
    resolution: int = 201
    lookup_nodes: int = 101
    centers: tuple[float, ...] = DEFAULT_CENTERS
    deviation_shapes: tuple[str, ...] = DEVIATION_SHAPES
    rate_shapes: tuple[str, ...] = RATE_SHAPES
    output_shapes: tuple[str, ...] = OUTPUT_SHAPES
    rules: RuleTable = field(default_factory=RuleTable)

    def build(self) -> MamdaniController:
        return MamdaniController(
            deviation=make_variable(
                "e", self.deviation_gain, self.deviation_shapes, self.centers),
            rate=make_variable(
                "de", self.rate_gain, self.rate_shapes, self.centers,
                zo_reach_fraction=RATE_ZO_REACH_FRACTION,
                edge_reach_fraction=RATE_EDGE_REACH_FRACTION),
            output=make_variable(
                "u", self.output_gain, self.output_shapes, self.centers),
            rules=self.rules,
            resolution=self.resolution,
        )


@lru_cache(maxsize=8)
def _build_controller_and_lookup(settings: ControllerSettings):
    controller = settings.build()
    lookup = LookupTable.build(controller, settings.lookup_nodes, settings.lookup_nodes)
    return controller, lookup


@dataclass(frozen=True)
class RunConfig:
    mode: str = "shared-threshold"
    dt: float = 0.01
    max_time: float = 900.0
    seed: int = 0
    driver_policy: str = "threshold"
    schedule: tuple[tuple[float, str], ...] = ()
    track: StadiumTrack = field(default_factory=StadiumTrack)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    driver: DriverModel = field(default_factory=DriverModel)
    shared: SharedConfig = field(default_factory=SharedConfig)
    controller: ControllerSettings = field(default_factory=ControllerSettings)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode: unknown mode {self.mode!r}, expected one of {MODES}")
        if not 0.0 < self.dt <= 0.1:
            raise ValueError(f"dt: {self.dt} outside (0, 0.1]")
        if self.max_time <= 0:
            raise ValueError(f"max_time: must be positive, got {self.max_time}")
        if self.driver_policy not in DRIVER_POLICIES:
            raise ValueError(
                f"driver_policy: unknown policy {self.driver_policy!r}, "
                f"expected one of {DRIVER_POLICIES}"
            )
        for entry in self.schedule:
            t, direction = entry
            if t < 0 or direction not in ("left", "right"):
                raise ValueError(f"schedule: bad entry {entry!r}")

    def arbiter_config(self) -> SharedConfig:
        if self.mode == "shared-cost":
            return replace(self.shared, scheme="cost")
        return replace(self.shared, scheme="threshold")


@dataclass(frozen=True)
class Frame:
    t: float
    x: float
    y: float
    heading: float
    e: float
    de: float
    u_brain: float
    u_fuzzy: float
    u_out: float
    source: str
    regulations: int

    def row(self) -> tuple:
        return (self.t, self.x, self.y, self.heading, self.e, self.de,
                self.u_brain, self.u_fuzzy, self.u_out, self.source,
                self.regulations)


@dataclass(frozen=True)
class RunMetrics:
    max_abs_e: float
    rms_e: float
    regulations: int
    switches: int
    command_delta: float
    lap_completed: bool
    off_road: bool
    outcome: str
    final_time: float

    def as_dict(self) -> dict:
        return {
            "max_abs_e": self.max_abs_e,
            "rms_e": self.rms_e,
            "regulations": self.regulations,
            "switches": self.switches,
            "command_delta": self.command_delta,
            "lap_completed": self.lap_completed,
            "off_road": self.off_road,
            "outcome": self.outcome,
            "final_time": self.final_time,
        }


@dataclass
class RunResult:
    config: RunConfig
    frames: list[Frame]
    metrics: RunMetrics
    commands: list[tuple[float, str]]  # accepted command schedule (issue t, direction)


class Simulation:
    """Mutable closed-loop state advanced one control period per step()."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.track = config.track
        self.controller, self.lookup = _build_controller_and_lookup(config.controller)
        seed = config.driver.seed if config.driver.seed is not None else config.seed
        self.rng = random.Random(seed)
        self.brain = BrainState()
        self.arbiter = ArbiterState()
        self._arbiter_cfg = config.arbiter_config()
        x0, y0, h0 = self.track.centerline_point(0.0)
        self.state = VehicleState(x=x0, y=y0, heading=h0)
        self.frames: list[Frame] = []
        self.commands: list[tuple[float, str]] = []
        self._schedule = list(config.schedule)
        self._prev_pose = None
        self._prev_s: float | None = None
        self._progress = 0.0
        self.done = False
        self.outcome: str | None = None

    # -- command sources -------------------------------------------------

    def push_command(self, direction: str) -> bool:
        """Issue a human/scripted command at the current simulated time.

        Returns False when the channel rejects it (rate limit). Shares the
        queue, delay and error injection with the autonomous driver.
        """
        if direction not in ("left", "right"):
            raise ValueError(f"unknown command direction {direction!r}")
        sign = 1.0 if direction == "right" else -1.0
        cmd = self.brain.issue(sign, self.state.t, self.config.driver, self.rng)
        if cmd is None:
            return False
        self.commands.append((self.state.t, direction))
        return True

    def _issue_scheduled(self, t: float) -> None:
        while self._schedule and self._schedule[0][0] <= t:
            _, direction = self._schedule.pop(0)
            self.push_command(direction)

    # -- loop ------------------------------------------------------------

    def step(self) -> Frame:
        """One closed-loop iteration: sense, command, arbitrate, advance."""
        if self.done:
            raise RuntimeError("session over")
        cfg = self.config
        t = self.state.t
        pose = self.track.project(self.state.x, self.state.y)
        e = pose.lateral
        de = 0.0 if self._prev_pose is None else deviation_rate(self._prev_pose, pose, cfg.dt)

        if self._prev_s is not None:
            half = self.track.length / 2.0
            ds = (pose.s - self._prev_s + half) % self.track.length - half
            self._progress += ds
        self._prev_s = pose.s

        if cfg.driver_policy == "threshold":
            sensed = cfg.driver.sensed_deviation(e, de)
            cmd = decide(sensed, t, cfg.driver, self.brain, self.rng)
            if cmd is not None:
                # Record the requested direction (before error injection) so
                # the run can be replayed through the scripted policy.
                self.commands.append((t, "left" if sensed > 0 else "right"))
        elif cfg.driver_policy == "scripted":
            self._issue_scheduled(t)
        u_brain = deliver(t, self.brain)

        # The controller reasons in control-error convention (positive means
        # steer left); the track's offset is positive to the left, so the
        # corrective wheel angle is the negated surface value.
        u_fuzzy = -self.lookup.lookup(e, de)

        if cfg.mode == "brain-only":
            u_out = u_brain
            source = "brain"
        else:
            u_out = arbitrate(u_brain, u_fuzzy, e, self._arbiter_cfg, self.arbiter)
            source = self.arbiter.log[-1].source

        frame = Frame(
            t=t, x=self.state.x, y=self.state.y, heading=self.state.heading,
            e=e, de=de, u_brain=u_brain, u_fuzzy=u_fuzzy, u_out=u_out,
            source=source, regulations=self.brain.regulations,
        )
        self.frames.append(frame)
        self._prev_pose = pose

        limit = self.track.width / 2.0 + OFFROAD_MARGIN
        if self._progress >= self.track.length:
            self.done, self.outcome = True, "lap"
        elif abs(e) > limit:
            self.done, self.outcome = True, "offroad"
        elif t >= cfg.max_time:
            self.done, self.outcome = True, "timeout"
        else:
            self.state = vehicle_step(self.state, cfg.vehicle, u_out, cfg.dt)
        return frame

    def run(self) -> RunResult:
        while not self.done:
            self.step()
        return self.result()

    def result(self) -> RunResult:
        metrics = compute_metrics(
            self.frames, self.track, self.config.driver,
            regulations=self.brain.regulations, switches=self.arbiter.switches,
            outcome=self.outcome or "running",
        )
        return RunResult(
            config=self.config, frames=list(self.frames),
            metrics=metrics, commands=list(self.commands),
        )


def run_scenario(config: RunConfig) -> RunResult:
    """Run one scenario to completion (lap, road departure or timeout)."""
    return Simulation(config).run()


def compute_metrics(
    frames: list[Frame],
    track: StadiumTrack,
    driver: DriverModel,
    regulations: int,
    switches: int,
    outcome: str,
) -> RunMetrics:
    """Aggregate a frame series into the run comparison metrics.

    Error statistics cover the on-road samples; departure is flagged
    separately.
    """
    if not frames:
        raise ValueError("empty frame series")
    half_width = track.width / 2.0
    on_road = [f.e for f in frames if abs(f.e) <= half_width]
    pool = on_road if on_road else [f.e for f in frames]
    max_abs = max(abs(e) for e in pool)
    rms = math.sqrt(sum(e * e for e in pool) / len(pool))
    return RunMetrics(
        max_abs_e=max_abs,
        rms_e=rms,
        regulations=regulations,
        switches=switches,
        command_delta=driver.delta,
        lap_completed=outcome == "lap",
        off_road=any(abs(f.e) > half_width for f in frames),
        outcome=outcome,
        final_time=frames[-1].t,
    )


def metrics_from_rows(rows: list[tuple], track: StadiumTrack) -> dict:
    """Recompute the recomputable metrics from exported trajectory rows.

    Row layout must match TRAJECTORY_COLUMNS. Regulations are recovered as
    setpoint changes and switches as source changes.
    """
    if not rows:
        raise ValueError("empty trajectory")
    half_width = track.width / 2.0
    es = [r[4] for r in rows]
    pool = [e for e in es if abs(e) <= half_width] or es
    regulations = int(rows[-1][10])
    switches = sum(1 for a, b in zip(rows, rows[1:]) if a[9] != b[9])
    return {
        "max_abs_e": max(abs(e) for e in pool),
        "rms_e": math.sqrt(sum(e * e for e in pool) / len(pool)),
        "regulations": regulations,
        "switches": switches,
        "off_road": any(abs(e) > half_width for e in es),
    }


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    error_threshold: float
    command_delta: float
    regulations: int
    max_abs_e: float
    rms_e: float
    lap_completed: bool


def compare(config_a: RunConfig, config_b: RunConfig) -> tuple[ComparisonRow, ComparisonRow]:
    """Run two scenarios and tabulate their control-effect metrics.

    Callers pair configs sharing seed and driver parameters so the rows are
    directly comparable.
    """
    rows = []
    for cfg in (config_a, config_b):
        result = run_scenario(cfg)
        m = result.metrics
        rows.append(ComparisonRow(
            label=cfg.mode,
            error_threshold=cfg.driver.threshold,
            command_delta=m.command_delta,
            regulations=m.regulations,
            max_abs_e=m.max_abs_e,
            rms_e=m.rms_e,
            lap_completed=m.lap_completed,
        ))
    return rows[0], rows[1]


def format_comparison(rows: tuple[ComparisonRow, ComparisonRow]) -> str:
    header = (
        f"{'control method':<18} {'threshold/m':>11} {'deg/command':>11} "
        f"{'regulations':>11} {'max |e|/m':>10} {'rms e/m':>9} {'lap':>4}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.label:<18} {r.error_threshold:>11.3g} {r.command_delta:>11.3g} "
            f"{r.regulations:>11d} {r.max_abs_e:>10.4f} {r.rms_e:>9.4f} "
            f"{'yes' if r.lap_completed else 'no':>4}"
        )
    return "\n".join(lines)
