"""Plain-text (YAML) run configuration.

Schema (all keys optional; omitted keys keep package defaults):

    controller:
      e_gain: 0.15          # m per normalized deviation unit
      de_gain: 1.0          # m/s per normalized rate unit
      u_gain: 70.0          # steering-wheel deg per normalized output unit
      resolution: 201       # centroid sample count (odd, >= 51)
      lookup_nodes: 101     # lookup grid nodes per axis
      rules:                # 7 rows of 7 labels, deviation rows x rate cols
        - NB NB NM NM NS NS ZO
        - ...
    track:
      straight_length: 200.0
      arc_length: 157.0
      width: 8.2
    vehicle:
      wheelbase: 2.7
      steering_ratio: 10.0
      max_road_wheel: 6.0
      speed: 2.0
      slew_rate: 30.0
    driver:
      threshold: 1.0
      delta: 75.0
      min_interval: 2.0
      delay: 0.5
      error_rate: 0.0
      preview: 8.0
      seed: null            # null: use run.seed
    shared:
      scheme: threshold     # threshold | cost
      tau: 0.15
      hysteresis: 0.8
      smooth_weight: 0.2
    run:
      mode: shared-threshold   # brain-only | shared-threshold | shared-cost
      dt: 0.01
      max_time: 900.0
      seed: 0
      driver_policy: threshold # threshold | scripted | disabled
      schedule: []             # [[t, left|right], ...] for the scripted policy

Errors name the offending section and key.
"""

from __future__ import annotations

import yaml

from .bci import DriverModel
from .experiment import ControllerSettings, RunConfig
from .fuzzy import RuleTable
from .shared import SharedConfig
from .track import StadiumTrack
from .vehicle import VehicleParams

_SECTION_FIELDS = {
    "controller": ("e_gain", "de_gain", "u_gain", "resolution", "lookup_nodes",
                   "centers", "e_shapes", "de_shapes", "u_shapes", "rules"),
    "track": ("straight_length", "arc_length", "width"),
    "vehicle": ("wheelbase", "steering_ratio", "max_road_wheel", "speed", "slew_rate"),
    "driver": ("threshold", "delta", "min_interval", "delay", "error_rate", "preview", "seed"),
    "shared": ("scheme", "tau", "hysteresis", "smooth_weight"),
    "run": ("mode", "dt", "max_time", "seed", "driver_policy", "schedule"),
}


class ConfigError(ValueError):
    pass


def _check_keys(section: str, data: dict) -> None:
    allowed = _SECTION_FIELDS[section]
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{section}: unknown key {key!r} (allowed: {', '.join(allowed)})")


def parse_rules(rows: list[str]) -> RuleTable:
    if len(rows) != 7:
        raise ConfigError(f"controller.rules: expected 7 rows, got {len(rows)}")
    grid = []
    for i, row in enumerate(rows):
        labels = tuple(str(row).split())
        if len(labels) != 7:
            raise ConfigError(f"controller.rules row {i}: expected 7 labels, got {len(labels)}")
        grid.append(labels)
    try:
        return RuleTable(tuple(grid))
    except ValueError as err:
        raise ConfigError(f"controller.rules: {err}") from err


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    for section in data:
        if section not in _SECTION_FIELDS:
            raise ConfigError(f"unknown section {section!r}")
        if data[section] is None:
            data[section] = {}
        _check_keys(section, data[section])

    def section(name: str) -> dict:
        return dict(data.get(name, {}))

    ctl = section("controller")
    rules = ctl.pop("rules", None)
    rename = {"e_gain": "deviation_gain", "de_gain": "rate_gain", "u_gain": "output_gain",
              "e_shapes": "deviation_shapes", "de_shapes": "rate_shapes",
              "u_shapes": "output_shapes"}
    ctl = {rename.get(k, k): v for k, v in ctl.items()}
    if "centers" in ctl:
        ctl["centers"] = tuple(float(c) for c in ctl["centers"])
    for key in ("deviation_shapes", "rate_shapes", "output_shapes"):
        if key in ctl:
            ctl[key] = tuple(str(v) for v in ctl[key])
    try:
        if rules is not None:
            ctl["rules"] = parse_rules(rules)
        controller = ControllerSettings(**ctl)
        controller.build()  # membership layout validated eagerly
        track = StadiumTrack(**section("track"))
        vehicle = VehicleParams(**section("vehicle"))
        driver = DriverModel(**section("driver"))
        shared = SharedConfig(**section("shared"))
        run = section("run")
        schedule = tuple(
            (float(t), str(d)) for t, d in run.pop("schedule", [])
        )
        return RunConfig(
            track=track, vehicle=vehicle, driver=driver, shared=shared,
            controller=controller, schedule=schedule, **run,
        )
    except TypeError as err:
        raise ConfigError(str(err)) from err
    except ValueError as err:
        raise ConfigError(str(err)) from err


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    c = cfg.controller
    return {
        "controller": {
            "e_gain": c.deviation_gain,
            "de_gain": c.rate_gain,
            "u_gain": c.output_gain,
            "resolution": c.resolution,
            "lookup_nodes": c.lookup_nodes,
            "centers": list(c.centers),
            "e_shapes": list(c.deviation_shapes),
            "de_shapes": list(c.rate_shapes),
            "u_shapes": list(c.output_shapes),
            "rules": [" ".join(row) for row in c.rules.rows],
        },
        "track": {
            "straight_length": cfg.track.straight_length,
            "arc_length": cfg.track.arc_length,
            "width": cfg.track.width,
        },
        "vehicle": {
            "wheelbase": cfg.vehicle.wheelbase,
            "steering_ratio": cfg.vehicle.steering_ratio,
            "max_road_wheel": cfg.vehicle.max_road_wheel,
            "speed": cfg.vehicle.speed,
            "slew_rate": cfg.vehicle.slew_rate,
        },
        "driver": {
            "threshold": cfg.driver.threshold,
            "delta": cfg.driver.delta,
            "min_interval": cfg.driver.min_interval,
            "delay": cfg.driver.delay,
            "error_rate": cfg.driver.error_rate,
            "preview": cfg.driver.preview,
            "seed": cfg.driver.seed,
        },
        "shared": {
            "scheme": cfg.shared.scheme,
            "tau": cfg.shared.tau,
            "hysteresis": cfg.shared.hysteresis,
            "smooth_weight": cfg.shared.smooth_weight,
        },
        "run": {
            "mode": cfg.mode,
            "dt": cfg.dt,
            "max_time": cfg.max_time,
            "seed": cfg.seed,
            "driver_policy": cfg.driver_policy,
            "schedule": [[t, d] for t, d in cfg.schedule],
        },
    }


def save_config(cfg: RunConfig, path: str) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)
