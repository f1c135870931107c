"""Scenario configuration: JSON scenario/scan files, seeded resolution into a
concrete world with start and goal, and stable scenario hashing."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .control import ControllerConfig
from .geometry import Point2, Scan
from .sim import (Circle, ConvexPolygon, LidarModel, Obstacle, Rect, Wall,
                  World, check_collision, gen_forest, gen_maze)
from .starshape import FitConfig

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Scenario file is malformed or inconsistent."""


@dataclass(frozen=True)
class ForestParams:
    bounds: Rect = Rect(0.0, 0.0, 20.0, 20.0)
    n_cylinders: int = 25
    cylinder_radius: float = 0.5
    min_gap: float = 1.5
    start_zone: Rect = Rect(1.0, 1.0, 4.0, 4.0)
    goal_zone: Rect = Rect(16.0, 16.0, 19.0, 19.0)


@dataclass(frozen=True)
class EpisodeLimits:
    max_sim_time: float = 120.0
    goal_tolerance: float = 0.3


@dataclass(frozen=True)
class LoopParams:
    """Episode loop cadence and arrival/stall thresholds.

    stall_expand_slack: a stalled approach that got within this distance of an
    Extendable target counts as having arrived there (the controller's
    obstacle repulsion can pin the robot about a meter short of a frontier
    placed between obstacles); stalling further away defers the target for
    stall_defer seconds so a different route gets tried first.
    """

    dt: float = 0.005
    scan_period: float = 0.05
    reach_tolerance: float = 0.2
    stall_timeout: float = 3.0
    stall_distance: float = 0.15
    stall_expand_slack: float = 1.1
    stall_defer: float = 15.0


@dataclass(frozen=True)
class FrontierParams:
    eps: float = 0.3
    min_pts: int = 3


@dataclass(frozen=True)
class ScenarioSpec:
    """A complete episode configuration.

    Exactly one world source must be present: an explicit world, forest
    generator parameters, or a maze layout id. Start/goal may be fixed points
    or zones sampled per episode seed.
    """

    world: World | None = None
    forest: ForestParams | None = None
    maze_layout: str | None = None
    start: Point2 | None = None
    goal: Point2 | None = None
    start_zone: Rect | None = None
    goal_zone: Rect | None = None
    lidar: LidarModel = LidarModel()
    controller: ControllerConfig = ControllerConfig()
    fit: FitConfig = FitConfig()
    frontier: FrontierParams = FrontierParams()
    limits: EpisodeLimits = EpisodeLimits()
    loop: LoopParams = LoopParams()
    seed: int = 0

    def __post_init__(self) -> None:
        sources = sum(x is not None for x in (self.world, self.forest, self.maze_layout))
        if sources != 1:
            raise ScenarioError(f"need exactly one world source, got {sources}")

    def resolve(self, seed: int) -> tuple[World, Point2, Point2]:
        """Concrete (world, start, goal) for one episode seed."""
        if self.forest is not None:
            f = self.forest
            return gen_forest(seed, f.bounds, f.n_cylinders, f.cylinder_radius,
                              f.min_gap, f.start_zone, f.goal_zone)
        if self.maze_layout is not None:
            world, start_zone, goal_zone = gen_maze(self.maze_layout)
            start_zone = self.start_zone or start_zone
            goal_zone = self.goal_zone or goal_zone
        else:
            world = self.world
            start_zone = self.start_zone
            goal_zone = self.goal_zone
        rng = np.random.default_rng(seed)
        start = self.start or self._sample_free(world, start_zone, rng, "start")
        goal = self.goal or self._sample_free(world, goal_zone, rng, "goal")
        return world, start, goal

    def _sample_free(self, world: World, zone: Rect | None,
                     rng: np.random.Generator, what: str) -> Point2:
        if zone is None:
            raise ScenarioError(f"no {what} point and no {what} zone")
        r = self.controller.robot_radius
        for _ in range(200):
            p = zone.sample(rng)
            if not check_collision(world, p, r):
                return p
        raise ScenarioError(f"could not sample a collision-free {what} in {zone}")

    def to_dict(self) -> dict:
        d: dict = {"schema": SCHEMA_VERSION, "seed": self.seed}
        if self.world is not None:
            b = self.world.bounds
            d["bounds"] = [b.xmin, b.ymin, b.xmax, b.ymax]
            d["obstacles"] = [obstacle_to_dict(o) for o in self.world.obstacles]
        if self.forest is not None:
            f = self.forest
            d["generator"] = {
                "kind": "forest",
                "bounds": [f.bounds.xmin, f.bounds.ymin, f.bounds.xmax, f.bounds.ymax],
                "n_cylinders": f.n_cylinders,
                "cylinder_radius": f.cylinder_radius,
                "min_gap": f.min_gap,
                "start_zone": _rect_list(f.start_zone),
                "goal_zone": _rect_list(f.goal_zone),
            }
        if self.maze_layout is not None:
            d["generator"] = {"kind": "maze", "layout": self.maze_layout}
        if self.start is not None:
            d["start"] = [self.start.x, self.start.y]
        if self.goal is not None:
            d["goal"] = [self.goal.x, self.goal.y]
        if self.start_zone is not None:
            d["start_zone"] = _rect_list(self.start_zone)
        if self.goal_zone is not None:
            d["goal_zone"] = _rect_list(self.goal_zone)
        d["lidar"] = {"n_beams": self.lidar.n_beams, "max_range": self.lidar.max_range,
                      "noise": self.lidar.noise_stddev}
        d["robot"] = {"radius": self.controller.robot_radius,
                      "v_max": self.controller.v_max, "w_max": self.controller.w_max}
        d["controller"] = {"sigma": self.controller.sigma, "rho": self.controller.rho,
                           "k_heading": self.controller.k_heading,
                           "k_speed": self.controller.k_speed}
        d["fit"] = {"order": self.fit.order, "rate_threshold": self.fit.rate_threshold,
                    "max_segment_span": self.fit.max_segment_span,
                    "min_points_per_segment": self.fit.min_points_per_segment}
        d["frontier"] = {"eps": self.frontier.eps, "min_pts": self.frontier.min_pts}
        d["limits"] = {"max_sim_time": self.limits.max_sim_time,
                       "goal_tolerance": self.limits.goal_tolerance}
        d["loop"] = {"dt": self.loop.dt, "scan_period": self.loop.scan_period,
                     "reach_tolerance": self.loop.reach_tolerance,
                     "stall_timeout": self.loop.stall_timeout,
                     "stall_distance": self.loop.stall_distance,
                     "stall_expand_slack": self.loop.stall_expand_slack,
                     "stall_defer": self.loop.stall_defer}
        return d

    def hash(self) -> str:
        """Stable digest of the full configuration (seed excluded)."""
        d = self.to_dict()
        d.pop("seed", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _rect_list(r: Rect) -> list[float]:
    return [r.xmin, r.ymin, r.xmax, r.ymax]


def _rect_from(v: list) -> Rect:
    return Rect(float(v[0]), float(v[1]), float(v[2]), float(v[3]))


def obstacle_to_dict(obs: Obstacle) -> dict:
    if isinstance(obs, Circle):
        return {"type": "circle", "center": [obs.center.x, obs.center.y],
                "radius": obs.radius}
    if isinstance(obs, ConvexPolygon):
        return {"type": "polygon", "vertices": [[v.x, v.y] for v in obs.vertices]}
    if isinstance(obs, Wall):
        return {"type": "wall", "a": [obs.a.x, obs.a.y], "b": [obs.b.x, obs.b.y],
                "thickness": obs.thickness}
    raise TypeError(f"unknown obstacle type {type(obs)!r}")


def obstacle_from_dict(d: dict) -> Obstacle:
    kind = d.get("type")
    if kind == "circle":
        return Circle(Point2(*d["center"]), float(d["radius"]))
    if kind == "polygon":
        return ConvexPolygon(tuple(Point2(*v) for v in d["vertices"]))
    if kind == "wall":
        return Wall(Point2(*d["a"]), Point2(*d["b"]), float(d.get("thickness", 0.0)))
    raise ScenarioError(f"unknown obstacle type {kind!r}")


def scenario_from_dict(data: dict) -> ScenarioSpec:
    if data.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema {data.get('schema')!r}")

    world = None
    forest = None
    maze_layout = None
    gen = data.get("generator")
    if gen is not None:
        kind = gen.get("kind")
        if kind == "forest":
            defaults = ForestParams()
            forest = ForestParams(
                bounds=_rect_from(gen["bounds"]) if "bounds" in gen else defaults.bounds,
                n_cylinders=int(gen.get("n_cylinders", defaults.n_cylinders)),
                cylinder_radius=float(gen.get("cylinder_radius", defaults.cylinder_radius)),
                min_gap=float(gen.get("min_gap", defaults.min_gap)),
                start_zone=_rect_from(gen["start_zone"]) if "start_zone" in gen else defaults.start_zone,
                goal_zone=_rect_from(gen["goal_zone"]) if "goal_zone" in gen else defaults.goal_zone,
            )
        elif kind == "maze":
            maze_layout = str(gen["layout"])
        else:
            raise ScenarioError(f"unknown generator kind {kind!r}")
    elif "bounds" in data:
        world = World(_rect_from(data["bounds"]),
                      tuple(obstacle_from_dict(o) for o in data.get("obstacles", [])))
    else:
        raise ScenarioError("scenario needs either bounds/obstacles or a generator")

    lidar_d = data.get("lidar", {})
    lidar = LidarModel(n_beams=int(lidar_d.get("n_beams", 360)),
                       max_range=float(lidar_d.get("max_range", 5.0)),
                       noise_stddev=float(lidar_d.get("noise", 0.0)))
    robot_d = data.get("robot", {})
    ctrl_d = data.get("controller", {})
    robot_radius = float(robot_d.get("radius", 0.25))
    controller = ControllerConfig(
        robot_radius=robot_radius,
        sigma=float(ctrl_d.get("sigma", 1.0)),
        rho=float(ctrl_d.get("rho", 2.0 * robot_radius)),
        v_max=float(robot_d.get("v_max", 0.5)),
        w_max=float(robot_d.get("w_max", 2.0)),
        k_heading=float(ctrl_d.get("k_heading", 2.0)),
        k_speed=float(ctrl_d.get("k_speed", 1.0)),
    )
    fit_d = data.get("fit", {})
    fit = FitConfig(
        order=int(fit_d.get("order", 3)),
        rate_threshold=fit_d.get("rate_threshold"),
        max_segment_span=float(fit_d.get("max_segment_span", math.pi / 4.0)),
        min_points_per_segment=fit_d.get("min_points_per_segment"),
    )
    frontier_d = data.get("frontier", {})
    frontier = FrontierParams(eps=float(frontier_d.get("eps", 0.3)),
                              min_pts=int(frontier_d.get("min_pts", 3)))
    limits_d = data.get("limits", {})
    limits = EpisodeLimits(max_sim_time=float(limits_d.get("max_sim_time", 120.0)),
                           goal_tolerance=float(limits_d.get("goal_tolerance", 0.3)))
    loop_d = data.get("loop", {})
    loop = LoopParams(
        dt=float(loop_d.get("dt", 0.005)),
        scan_period=float(loop_d.get("scan_period", 0.05)),
        reach_tolerance=float(loop_d.get("reach_tolerance", 0.2)),
        stall_timeout=float(loop_d.get("stall_timeout", 3.0)),
        stall_distance=float(loop_d.get("stall_distance", 0.15)),
        stall_expand_slack=float(loop_d.get("stall_expand_slack", 1.1)),
        stall_defer=float(loop_d.get("stall_defer", 15.0)),
    )

    def point(key: str) -> Point2 | None:
        return Point2(*data[key]) if key in data else None

    def rect(key: str) -> Rect | None:
        return _rect_from(data[key]) if key in data else None

    return ScenarioSpec(
        world=world, forest=forest, maze_layout=maze_layout,
        start=point("start"), goal=point("goal"),
        start_zone=rect("start_zone"), goal_zone=rect("goal_zone"),
        lidar=lidar, controller=controller, fit=fit, frontier=frontier,
        limits=limits, loop=loop, seed=int(data.get("seed", 0)),
    )


def load_scenario(path: str) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(spec: ScenarioSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- scan files ------------------------------------------------------------


def scan_to_dict(scan: Scan) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "origin": [scan.origin.x, scan.origin.y],
        "max_range": scan.max_range,
        "beams": [
            {"angle": float(a), "range": float(r), "at_max_range": bool(m)}
            for a, r, m in zip(scan.angles, scan.ranges, scan.at_max)
        ],
    }


def scan_from_dict(data: dict) -> Scan:
    if data.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema {data.get('schema')!r}")
    beams = data["beams"]
    angles = np.array([b["angle"] for b in beams], dtype=float)
    ranges = np.array([b["range"] for b in beams], dtype=float)
    at_max = np.array([b["at_max_range"] for b in beams], dtype=bool)
    return Scan(Point2(*data["origin"]), angles, ranges, at_max, float(data["max_range"]))


def load_scan(path: str) -> Scan:
    with open(path, encoding="utf-8") as fh:
        return scan_from_dict(json.load(fh))


def save_scan(scan: Scan, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scan_to_dict(scan), fh)
        fh.write("\n")
