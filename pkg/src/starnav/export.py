"""Run artifact export: trajectory CSV, scene SVG, batch summary CSV, and a
JSON record for post-hoc plotting. All writers are deterministic: identical
inputs produce byte-identical files."""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .episode import BatchSummary, Outcome, RunRecord
from .geometry import Point2
from .starshape import region_from_dict

TRAJECTORY_HEADER = "t,x,y,heading,v,w,control_ms"

_STATUS_COLORS = {"expanded": "#2a9d2a", "extendable": "#e8a020", "stuck": "#d03030"}


def _fmt(v: float) -> str:
    return format(float(v), ".9g")


def write_trajectory_csv(record: RunRecord, path: str) -> None:
    lines = [TRAJECTORY_HEADER]
    for row in record.trajectory:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


BATCH_HEADER = ("n_runs,n_success,success_rate,travel_time_mean,travel_time_std,"
                "path_length_mean,path_length_std,control_ms_mean,control_ms_std,"
                "fit_ms_mean,fit_ms_std")


def write_batch_csv(summary: BatchSummary, path: str) -> None:
    row = ",".join([
        str(summary.n_runs),
        str(summary.n_success),
        format(summary.success_rate, ".3f"),
        _fmt(summary.travel_time_mean), _fmt(summary.travel_time_std),
        _fmt(summary.path_length_mean), _fmt(summary.path_length_std),
        _fmt(summary.control_ms_mean), _fmt(summary.control_ms_std),
        _fmt(summary.fit_ms_mean), _fmt(summary.fit_ms_std),
    ])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(BATCH_HEADER + "\n" + row + "\n")


# -- SVG -------------------------------------------------------------------


def _svg_obstacle(obs: dict, tf) -> str:
    kind = obs["type"]
    if kind == "circle":
        cx, cy = tf(*obs["center"])
        r = obs["radius"] * tf.scale
        return (f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" '
                f'fill="#8a8a8a" stroke="#555" stroke-width="1"/>')
    if kind == "polygon":
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in (tf(*v) for v in obs["vertices"]))
        return f'<polygon points="{pts}" fill="#8a8a8a" stroke="#555" stroke-width="1"/>'
    if kind == "wall":
        ax, ay = tf(*obs["a"])
        bx, by = tf(*obs["b"])
        width = max(obs.get("thickness", 0.0) * tf.scale, 2.0)
        return (f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" '
                f'stroke="#555" stroke-width="{width:.2f}" stroke-linecap="round"/>')
    raise ValueError(f"unknown obstacle type {kind!r}")


class _Transform:
    """World to SVG pixel coordinates (y flipped)."""

    def __init__(self, bounds: list[float], size: float, margin: float) -> None:
        self.xmin, self.ymin, self.xmax, self.ymax = bounds
        self.scale = (size - 2 * margin) / max(self.xmax - self.xmin, self.ymax - self.ymin)
        self.margin = margin
        self.width = margin * 2 + (self.xmax - self.xmin) * self.scale
        self.height = margin * 2 + (self.ymax - self.ymin) * self.scale

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        return (self.margin + (x - self.xmin) * self.scale,
                self.margin + (self.ymax - y) * self.scale)


def render_svg(record: RunRecord) -> str:
    """Scene rendering: obstacles, region boundaries, roadmap, trajectory.

    Region boundaries are sampled at one-degree resolution; roadmap edges are
    one SVG path element each, nodes are colored by status.
    """
    tf = _Transform(record.world_dict["bounds"], 800.0, 20.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{tf.width:.0f}" '
        f'height="{tf.height:.0f}" viewBox="0 0 {tf.width:.2f} {tf.height:.2f}">',
        f'<rect x="0" y="0" width="{tf.width:.2f}" height="{tf.height:.2f}" fill="#ffffff"/>',
    ]
    bx0, by0 = tf(tf.xmin, tf.ymax)
    parts.append(
        f'<rect x="{bx0:.2f}" y="{by0:.2f}" '
        f'width="{(tf.xmax - tf.xmin) * tf.scale:.2f}" '
        f'height="{(tf.ymax - tf.ymin) * tf.scale:.2f}" '
        f'fill="none" stroke="#222" stroke-width="2"/>')

    for obs in record.world_dict["obstacles"]:
        parts.append(_svg_obstacle(obs, tf))

    nodes = record.roadmap.get("nodes", [])
    for node in nodes:
        if node.get("region") is None:
            continue
        region = region_from_dict(node["region"])
        pts = []
        for deg in range(360):
            theta = -math.pi + deg * (2.0 * math.pi / 360.0)
            r = region.boundary.radius(theta)
            x = region.p_ref.x + r * math.cos(theta)
            y = region.p_ref.y + r * math.sin(theta)
            pts.append("%.2f,%.2f" % tf(x, y))
        parts.append(f'<polygon points="{" ".join(pts)}" fill="#4488cc" '
                     f'fill-opacity="0.08" stroke="#4488cc" stroke-opacity="0.5" '
                     f'stroke-width="1"/>')

    pos = {n["id"]: n["position"] for n in nodes}
    for a, b in record.roadmap.get("edges", []):
        ax, ay = tf(*pos[a])
        bx, by = tf(*pos[b])
        parts.append(f'<path d="M {ax:.2f} {ay:.2f} L {bx:.2f} {by:.2f}" '
                     f'stroke="#336699" stroke-width="1.5" fill="none"/>')
    for node in nodes:
        x, y = tf(*node["position"])
        color = _STATUS_COLORS.get(node["status"], "#888")
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="{color}" '
                     f'stroke="#333" stroke-width="0.8"/>')

    if record.trajectory.shape[0] > 0:
        pts = " ".join("%.2f,%.2f" % tf(x, y)
                       for x, y in record.trajectory[:, 1:3])
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#1133bb" '
                     f'stroke-width="2"/>')

    sx, sy = tf(record.start.x, record.start.y)
    gx, gy = tf(record.goal.x, record.goal.y)
    parts.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="6" fill="#2a9d2a"/>')
    parts.append(f'<circle cx="{gx:.2f}" cy="{gy:.2f}" r="6" fill="#d03030"/>')
    parts.append(f'<text x="{tf.margin:.0f}" y="{tf.height - 6:.0f}" '
                 f'font-family="monospace" font-size="12">'
                 f'seed={record.seed} outcome={record.outcome.value}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(record: RunRecord, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg(record))


# -- record JSON -----------------------------------------------------------


def record_to_dict(record: RunRecord) -> dict:
    return {
        "schema": 1,
        "scenario_hash": record.scenario_hash,
        "seed": record.seed,
        "outcome": record.outcome.value,
        "start": [record.start.x, record.start.y],
        "goal": [record.goal.x, record.goal.y],
        "travel_time": record.travel_time,
        "path_length": record.path_length,
        "trajectory": [[float(v) for v in row] for row in record.trajectory],
        "events": [[t, kind, node] for t, kind, node in record.events],
        "roadmap": record.roadmap,
        "world": record.world_dict,
        "control_times": list(record.control_times),
        "fit_times": list(record.fit_times),
        "scenario": record.scenario,
    }


def record_from_dict(data: dict) -> RunRecord:
    return RunRecord(
        scenario_hash=data["scenario_hash"],
        seed=int(data["seed"]),
        outcome=Outcome(data["outcome"]),
        trajectory=np.array(data["trajectory"], dtype=float).reshape(-1, 7),
        events=[(float(t), str(kind), node) for t, kind, node in data["events"]],
        roadmap=data["roadmap"],
        world_dict=data["world"],
        start=Point2(*data["start"]),
        goal=Point2(*data["goal"]),
        travel_time=float(data["travel_time"]),
        path_length=float(data["path_length"]),
        control_times=[float(t) for t in data["control_times"]],
        fit_times=[float(t) for t in data["fit_times"]],
        scenario=data["scenario"],
    )


def save_record(record: RunRecord, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record_to_dict(record), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_record(path: str) -> RunRecord:
    with open(path, encoding="utf-8") as fh:
        return record_from_dict(json.load(fh))


def export_artifacts(item: RunRecord | BatchSummary, out_dir: str) -> list[str]:
    """Write the standard artifacts for a run record or a batch summary into
    out_dir; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if isinstance(item, RunRecord):
        base = os.path.join(out_dir, f"run_{item.seed}")
        write_trajectory_csv(item, base + "_traj.csv")
        paths.append(base + "_traj.csv")
        write_svg(item, base + ".svg")
        paths.append(base + ".svg")
        save_record(item, base + "_record.json")
        paths.append(base + "_record.json")
    elif isinstance(item, BatchSummary):
        path = os.path.join(out_dir, "batch_summary.csv")
        write_batch_csv(item, path)
        paths.append(path)
    else:
        raise TypeError(f"cannot export {type(item)!r}")
    return paths
