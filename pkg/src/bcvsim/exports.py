"""Run artifacts: trajectory CSV, metrics JSON, track/trajectory SVG overlay.

All writers are deterministic: identical results produce byte-identical
files (floats are emitted with shortest round-trip repr, no timestamps).
Nothing is written until the result validates, so failures leave no partial
files behind.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .experiment import RunResult, TRAJECTORY_COLUMNS
from .track import StadiumTrack


def _fmt(value: float) -> str:
    return repr(float(value))


def write_trajectory_csv(result: RunResult, path: str) -> None:
    """One header row, one row per step, columns per TRAJECTORY_COLUMNS."""
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for f in result.frames:
        row = f.row()
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path: str) -> list[tuple]:
    """Inverse of write_trajectory_csv; floats parse exactly (repr round-trip)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header {header!r}")
        rows = []
        for line in fh:
            parts = line.strip().split(",")
            if not line.strip():
                continue
            row = []
            for i, part in enumerate(parts):
                if i == 9:
                    row.append(part)
                elif i == 10:
                    row.append(int(part))
                else:
                    row.append(float(part))
            rows.append(tuple(row))
    return rows


def write_metrics_json(result: RunResult, path: str) -> None:
    payload = dict(result.metrics.as_dict())
    payload["mode"] = result.config.mode
    payload["seed"] = result.config.seed
    payload["dt"] = result.config.dt
    payload["steps"] = len(result.frames)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_schedule_csv(commands: list[tuple[float, str]], path: str) -> None:
    """Accepted command schedule in the replayable batch format."""
    lines = ["t,direction"]
    for t, direction in commands:
        lines.append(f"{_fmt(t)},{direction}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_schedule_csv(path: str) -> tuple[tuple[float, str], ...]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,direction":
            raise ValueError(f"unexpected schedule header {header!r}")
        entries = []
        for line in fh:
            if not line.strip():
                continue
            t_str, direction = line.strip().split(",")
            entries.append((float(t_str), direction))
    return tuple(entries)


# -- SVG overlay ----------------------------------------------------------


def _svg_path(points: list[tuple[float, float]], scale: float, ox: float, oy: float) -> str:
    # World y is flipped: SVG's y axis points down.
    cmds = []
    for i, (x, y) in enumerate(points):
        px = (x - ox) * scale
        py = (oy - y) * scale
        cmds.append(f"{'M' if i == 0 else 'L'}{px:.2f},{py:.2f}")
    return " ".join(cmds)


def write_overlay_svg(result: RunResult, path: str, size: int = 900) -> None:
    """Top-down plot: road edges, centerline, vehicle path, delivery markers."""
    track = result.config.track
    r = track.radius
    margin = track.width
    x_min, x_max = -r - margin, track.straight_length + r + margin
    y_min, y_max = -track.width / 2 - margin, 2 * r + track.width / 2 + margin
    scale = size / max(x_max - x_min, y_max - y_min)
    w = (x_max - x_min) * scale
    h = (y_max - y_min) * scale

    center = track.polyline(2.0)
    left = track.edge_polyline(track.width / 2.0, 2.0)
    right = track.edge_polyline(-track.width / 2.0, 2.0)
    path_pts = [(f.x, f.y) for f in result.frames]

    markers = []
    prev_reg = result.frames[0].regulations
    for f in result.frames:
        if f.regulations != prev_reg:
            markers.append((f.x, f.y))
            prev_reg = f.regulations

    def polyline(points, color, width, dash=""):
        d = _svg_path(points, scale, x_min, y_max)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<path d="{d}" fill="none" stroke="{color}" '
                f'stroke-width="{width}"{dash_attr}/>')

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.0f} {h:.0f}">',
        f'<rect width="{w:.0f}" height="{h:.0f}" fill="#fafafa"/>',
        polyline(left, "#888888", 1.5),
        polyline(right, "#888888", 1.5),
        polyline(center, "#bbbbbb", 1.0, dash="6,6"),
        polyline(path_pts, "#c0392b", 1.8),
    ]
    for mx, my in markers:
        px = (mx - x_min) * scale
        py = (y_max - my) * scale
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="#2980b9"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


@dataclass(frozen=True)
class ExportPaths:
    trajectory: str
    metrics: str
    overlay: str
    schedule: str


def export(result: RunResult, out_dir: str, prefix: str = "run") -> ExportPaths:
    """Write all artifacts for a run; raises before touching disk on an
    empty series, and surfaces I/O errors with the offending path."""
    if not result.frames:
        raise ValueError("empty series: nothing to export")
    os.makedirs(out_dir, exist_ok=True)
    paths = ExportPaths(
        trajectory=os.path.join(out_dir, f"{prefix}_trajectory.csv"),
        metrics=os.path.join(out_dir, f"{prefix}_metrics.json"),
        overlay=os.path.join(out_dir, f"{prefix}_overlay.svg"),
        schedule=os.path.join(out_dir, f"{prefix}_commands.csv"),
    )
    try:
        write_trajectory_csv(result, paths.trajectory)
        write_metrics_json(result, paths.metrics)
        write_overlay_svg(result, paths.overlay)
        write_schedule_csv(result.commands, paths.schedule)
    except OSError as err:
        raise OSError(f"export failed for {err.filename or out_dir}: {err}") from err
    return paths


def write_track_polyline(track: StadiumTrack, path: str, spacing: float = 1.0) -> None:
    """Plain-text polyline: comment header, then one "x y" pair per line."""
    pts = track.polyline(spacing)
    lines = [
        "# stadium centerline polyline",
        f"# width {_fmt(track.width)}",
        f"# length {_fmt(track.length)}",
        "x y",
    ]
    lines.extend(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
