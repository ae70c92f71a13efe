"""Shared-control driving simulator.

A Mamdani fuzzy lane-keeping controller, a kinematic bicycle plant on a
stadium road, a simulated rate-limited/delayed brain-command driver, and an
arbiter that hands control between them, with batch experiments and an
interactive session server.
"""

from .bci import BrainCommand, BrainState, DriverModel, decide, deliver
from .experiment import (
    ControllerSettings,
    Frame,
    RunConfig,
    RunMetrics,
    RunResult,
    Simulation,
    compare,
    run_scenario,
)
from .fuzzy import (
    LABELS,
    FuzzyVariable,
    LookupTable,
    MamdaniController,
    RuleTable,
    make_variable,
)
from .shared import ArbiterState, SharedConfig, arbitrate
from .track import StadiumTrack, TrackPose, deviation_rate
from .vehicle import VehicleParams, VehicleState, step

__version__ = "0.1.0"

__all__ = [
    "ArbiterState", "BrainCommand", "BrainState", "ControllerSettings",
    "DriverModel", "Frame", "FuzzyVariable", "LABELS", "LookupTable",
    "MamdaniController", "RuleTable", "RunConfig", "RunMetrics", "RunResult",
    "SharedConfig", "Simulation", "StadiumTrack", "TrackPose", "VehicleParams",
    "VehicleState", "arbitrate", "compare", "decide", "deliver",
    "deviation_rate", "make_variable", "run_scenario", "step",
]
