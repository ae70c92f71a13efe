"""Command-line interface.

Subcommands:
  run      simulate one scenario and export trajectory/metrics/overlay
  compare  run two control modes with shared seed and driver, print a table
  surface  dump the fuzzy control surface grid as CSV
  track    export the centerline polyline as plain text
  serve    host the interactive session endpoint (websocket or stdio)

Every run-configuration field is reachable by flag; --config loads the
documented YAML schema first and flags override it. The output directory
honors the BCVSIM_OUT_DIR environment variable, the serve port honors
BCVSIM_PORT. Exit code is 0 on success, 1 on any reported failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import exports
from .config import ConfigError, config_from_dict, config_to_dict, load_config
from .experiment import (
    MODES,
    RunConfig,
    compare,
    format_comparison,
    run_scenario,
)
from .session import run_stdio, serve_websocket


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML configuration file")
    run = parser.add_argument_group("run")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--dt", type=float)
    run.add_argument("--max-time", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--driver-policy", choices=("threshold", "scripted", "disabled"))
    run.add_argument("--schedule", help="CSV file of (t, direction) commands to replay")
    veh = parser.add_argument_group("vehicle")
    veh.add_argument("--wheelbase", type=float)
    veh.add_argument("--steering-ratio", type=float)
    veh.add_argument("--max-road-wheel", type=float)
    veh.add_argument("--speed", type=float)
    veh.add_argument("--slew-rate", type=float)
    trk = parser.add_argument_group("track")
    trk.add_argument("--straight-length", type=float)
    trk.add_argument("--arc-length", type=float)
    trk.add_argument("--road-width", type=float)
    drv = parser.add_argument_group("driver")
    drv.add_argument("--driver-threshold", type=float)
    drv.add_argument("--command-delta", type=float)
    drv.add_argument("--command-interval", type=float)
    drv.add_argument("--command-delay", type=float)
    drv.add_argument("--error-rate", type=float)
    drv.add_argument("--preview", type=float)
    shr = parser.add_argument_group("shared controller")
    shr.add_argument("--tau", type=float)
    shr.add_argument("--hysteresis", type=float)
    shr.add_argument("--smooth-weight", type=float)
    ctl = parser.add_argument_group("fuzzy controller")
    ctl.add_argument("--e-gain", type=float)
    ctl.add_argument("--de-gain", type=float)
    ctl.add_argument("--u-gain", type=float)
    ctl.add_argument("--resolution", type=int)
    ctl.add_argument("--lookup-nodes", type=int)


_FLAG_MAP = {
    # (section, key): attribute name on the parsed args
    ("run", "mode"): "mode",
    ("run", "dt"): "dt",
    ("run", "max_time"): "max_time",
    ("run", "seed"): "seed",
    ("run", "driver_policy"): "driver_policy",
    ("vehicle", "wheelbase"): "wheelbase",
    ("vehicle", "steering_ratio"): "steering_ratio",
    ("vehicle", "max_road_wheel"): "max_road_wheel",
    ("vehicle", "speed"): "speed",
    ("vehicle", "slew_rate"): "slew_rate",
    ("track", "straight_length"): "straight_length",
    ("track", "arc_length"): "arc_length",
    ("track", "width"): "road_width",
    ("driver", "threshold"): "driver_threshold",
    ("driver", "delta"): "command_delta",
    ("driver", "min_interval"): "command_interval",
    ("driver", "delay"): "command_delay",
    ("driver", "error_rate"): "error_rate",
    ("driver", "preview"): "preview",
    ("shared", "tau"): "tau",
    ("shared", "hysteresis"): "hysteresis",
    ("shared", "smooth_weight"): "smooth_weight",
    ("controller", "e_gain"): "e_gain",
    ("controller", "de_gain"): "de_gain",
    ("controller", "u_gain"): "u_gain",
    ("controller", "resolution"): "resolution",
    ("controller", "lookup_nodes"): "lookup_nodes",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    data = config_to_dict(cfg)
    for (section, key), attr in _FLAG_MAP.items():
        value = getattr(args, attr, None)
        if value is not None:
            data[section][key] = value
    if getattr(args, "schedule", None):
        data["run"]["schedule"] = [list(e) for e in exports.read_schedule_csv(args.schedule)]
        data["run"]["driver_policy"] = "scripted"
    return config_from_dict(data)


def _out_dir(args: argparse.Namespace) -> str:
    return os.environ.get("BCVSIM_OUT_DIR") or args.out_dir


def cmd_run(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    result = run_scenario(cfg)
    paths = exports.export(result, _out_dir(args), prefix=args.prefix)
    m = result.metrics
    print(f"outcome: {m.outcome}  max|e|: {m.max_abs_e:.4f} m  rms e: {m.rms_e:.4f} m")
    print(f"regulations: {m.regulations}  switches: {m.switches}  final t: {m.final_time:.2f} s")
    print(f"wrote {paths.trajectory}")
    print(f"wrote {paths.metrics}")
    print(f"wrote {paths.overlay}")
    print(f"wrote {paths.schedule}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg_a = replace(cfg, mode=args.mode_a)
    cfg_b = replace(cfg, mode=args.mode_b)
    rows = compare(cfg_a, cfg_b)
    print(format_comparison(rows))
    if args.out_dir or os.environ.get("BCVSIM_OUT_DIR"):
        out = _out_dir(args)
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, "comparison.txt")
        with open(path, "w") as fh:
            fh.write(format_comparison(rows) + "\n")
        print(f"wrote {path}")
    return 0


def cmd_surface(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    controller = cfg.controller.build()
    n = args.grid
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "surface.csv")
    e_gain, de_gain = controller.deviation.gain, controller.rate.gain
    with open(path, "w") as fh:
        fh.write("e,de,u\n")
        for i in range(n):
            e = -e_gain + 2.0 * e_gain * i / (n - 1)
            for j in range(n):
                de = -de_gain + 2.0 * de_gain * j / (n - 1)
                fh.write(f"{e!r},{de!r},{controller.evaluate(e, de)!r}\n")
    print(f"wrote {path}")
    return 0


def cmd_track(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "track.txt")
    exports.write_track_polyline(cfg.track, path, spacing=args.spacing)
    print(f"wrote {path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if args.stdio:
        run_stdio(cfg, record_dir=args.record)
        return 0
    port = args.port if args.port is not None else int(os.environ.get("BCVSIM_PORT", "8700"))
    serve_websocket(cfg, host=args.host, port=port, record_dir=args.record)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcvsim",
        description="Shared-control driving simulator: fuzzy lane-keeping "
                    "assistance arbitrated against a simulated brain-command driver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and export artifacts")
    _add_run_flags(p_run)
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--prefix", default="run")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="compare two control modes")
    _add_run_flags(p_cmp)
    p_cmp.add_argument("--mode-a", choices=MODES, default="brain-only")
    p_cmp.add_argument("--mode-b", choices=MODES, default="shared-threshold")
    p_cmp.add_argument("--out-dir", default=None)
    p_cmp.set_defaults(func=cmd_compare)

    p_surf = sub.add_parser("surface", help="dump the fuzzy control surface")
    _add_run_flags(p_surf)
    p_surf.add_argument("--grid", type=int, default=101)
    p_surf.add_argument("--out-dir", default="out")
    p_surf.set_defaults(func=cmd_surface)

    p_trk = sub.add_parser("track", help="export the centerline polyline")
    _add_run_flags(p_trk)
    p_trk.add_argument("--spacing", type=float, default=1.0)
    p_trk.add_argument("--out-dir", default="out")
    p_trk.set_defaults(func=cmd_track)

    p_srv = sub.add_parser("serve", help="host the interactive session endpoint")
    _add_run_flags(p_srv)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=None)
    p_srv.add_argument("--stdio", action="store_true", help="serve over stdin/stdout")
    p_srv.add_argument("--record", help="directory for recorded command schedules")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
