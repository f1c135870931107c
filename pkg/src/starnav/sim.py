"""Deterministic 2D world simulation: obstacles, range sensing, unicycle
integration, collision checks, and seeded scenario generators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Point2, Pose2, Scan
from .control import ControlCommand


class PoseOutOfBounds(ValueError):
    """Scan requested from a pose outside the world bounds."""


class PlacementFailed(RuntimeError):
    """Rejection sampling could not place all obstacles under the constraints."""


class UnknownLayout(KeyError):
    """Requested maze layout id does not exist."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, used for world bounds and start/goal zones."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"degenerate rect {self}")

    def contains(self, p: Point2) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    def shrunk(self, margin: float) -> "Rect":
        return Rect(self.xmin + margin, self.ymin + margin,
                    self.xmax - margin, self.ymax - margin)

    def center(self) -> Point2:
        return Point2(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def sample(self, rng: np.random.Generator) -> Point2:
        return Point2(float(rng.uniform(self.xmin, self.xmax)),
                      float(rng.uniform(self.ymin, self.ymax)))

    def distance_to(self, p: Point2) -> float:
        dx = max(self.xmin - p.x, 0.0, p.x - self.xmax)
        dy = max(self.ymin - p.y, 0.0, p.y - self.ymax)
        return math.hypot(dx, dy)

    def corners(self) -> list[Point2]:
        return [Point2(self.xmin, self.ymin), Point2(self.xmax, self.ymin),
                Point2(self.xmax, self.ymax), Point2(self.xmin, self.ymax)]


@dataclass(frozen=True)
class Circle:
    center: Point2
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ValueError("circle radius must be positive")


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with CCW vertices."""

    vertices: tuple[Point2, ...]

    def __post_init__(self) -> None:
        v = self.vertices
        if len(v) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        n = len(v)
        for i in range(n):
            a, b, c = v[i], v[(i + 1) % n], v[(i + 2) % n]
            cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
            if cross <= 0.0:
                raise ValueError("vertices must be strictly convex and CCW")


@dataclass(frozen=True)
class Wall:
    """Thick wall segment, modeled as the segment dilated by thickness/2."""

    a: Point2
    b: Point2
    thickness: float = 0.0

    def __post_init__(self) -> None:
        if self.thickness < 0.0:
            raise ValueError("thickness must be >= 0")
        if self.a.x == self.b.x and self.a.y == self.b.y:
            raise ValueError("wall endpoints coincide")


Obstacle = Circle | ConvexPolygon | Wall


@dataclass(frozen=True)
class World:
    bounds: Rect
    obstacles: tuple[Obstacle, ...] = ()


@dataclass(frozen=True)
class LidarModel:
    n_beams: int = 360
    max_range: float = 5.0
    noise_stddev: float = 0.0

    def __post_init__(self) -> None:
        if self.n_beams < 8:
            raise ValueError("n_beams must be >= 8")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be positive")
        if self.noise_stddev < 0.0:
            raise ValueError("noise_stddev must be >= 0")


@dataclass(frozen=True)
class SimState:
    pose: Pose2
    time: float = 0.0
    collided: bool = False


# -- ray casting ----------------------------------------------------------


def _ray_circle(ox: float, oy: float, dirs: np.ndarray, cx: float, cy: float,
                r: float) -> np.ndarray:
    """First positive hit parameter per ray against a circle; inf where none."""
    ocx = ox - cx
    ocy = oy - cy
    b = dirs[:, 0] * ocx + dirs[:, 1] * ocy
    c0 = ocx * ocx + ocy * ocy - r * r
    disc = b * b - c0
    t = np.full(dirs.shape[0], np.inf)
    ok = disc >= 0.0
    if not ok.any():
        return t
    sq = np.sqrt(disc[ok])
    t1 = -b[ok] - sq
    t2 = -b[ok] + sq
    chosen = np.where(t1 > 1e-12, t1, np.where(t2 > 1e-12, t2, np.inf))
    t[ok] = chosen
    return t


def _ray_segment(ox: float, oy: float, dirs: np.ndarray, ax: float, ay: float,
                 bx: float, by: float) -> np.ndarray:
    """First positive hit parameter per ray against a segment; inf where none."""
    abx = bx - ax
    aby = by - ay
    aox = ax - ox
    aoy = ay - oy
    denom = dirs[:, 0] * aby - dirs[:, 1] * abx
    t = np.full(dirs.shape[0], np.inf)
    ok = np.abs(denom) > 1e-15
    if not ok.any():
        return t
    tt = (aox * aby - aoy * abx) / denom[ok]
    ss = (aox * dirs[ok, 1] - aoy * dirs[ok, 0]) / denom[ok]
    hit = (tt > 1e-12) & (ss >= 0.0) & (ss <= 1.0)
    tt = np.where(hit, tt, np.inf)
    t[ok] = tt
    return t


def _wall_geometry(w: Wall) -> tuple[float, tuple[Point2, Point2] | None]:
    """Half thickness and the unit normal offset applied to the segment."""
    h = 0.5 * w.thickness
    if h == 0.0:
        return 0.0, None
    ux = w.b.x - w.a.x
    uy = w.b.y - w.a.y
    norm = math.hypot(ux, uy)
    nx, ny = -uy / norm, ux / norm
    return h, (Point2(nx, ny), Point2(-nx, -ny))


def _ray_obstacle(ox: float, oy: float, dirs: np.ndarray, obs: Obstacle) -> np.ndarray:
    if isinstance(obs, Circle):
        return _ray_circle(ox, oy, dirs, obs.center.x, obs.center.y, obs.radius)
    if isinstance(obs, ConvexPolygon):
        t = np.full(dirs.shape[0], np.inf)
        verts = obs.vertices
        for i in range(len(verts)):
            a = verts[i]
            b = verts[(i + 1) % len(verts)]
            t = np.minimum(t, _ray_segment(ox, oy, dirs, a.x, a.y, b.x, b.y))
        return t
    if isinstance(obs, Wall):
        h, normals = _wall_geometry(obs)
        if normals is None:
            return _ray_segment(ox, oy, dirs, obs.a.x, obs.a.y, obs.b.x, obs.b.y)
        t = np.minimum(
            _ray_circle(ox, oy, dirs, obs.a.x, obs.a.y, h),
            _ray_circle(ox, oy, dirs, obs.b.x, obs.b.y, h),
        )
        for n in normals:
            t = np.minimum(t, _ray_segment(
                ox, oy, dirs,
                obs.a.x + h * n.x, obs.a.y + h * n.y,
                obs.b.x + h * n.x, obs.b.y + h * n.y))
        return t
    raise TypeError(f"unknown obstacle type {type(obs)!r}")


def raycast_scan(world: World, pose: Pose2, lidar: LidarModel,
                 rng_seed: int | np.random.SeedSequence | None = None) -> Scan:
    """Cast uniformly spaced world-frame beams over [-pi, pi) from the pose.

    Each range is the nearest intersection with any obstacle or the world
    bounds, clamped to max_range. With noise_stddev > 0, seeded Gaussian noise
    perturbs the hit ranges (never the open max-range beams).
    """
    o = pose.position
    if not world.bounds.contains(o):
        raise PoseOutOfBounds(f"scan origin {o} outside bounds {world.bounds}")
    n = lidar.n_beams
    angles = -math.pi + 2.0 * math.pi * np.arange(n) / n
    dirs = np.empty((n, 2))
    dirs[:, 0] = np.cos(angles)
    dirs[:, 1] = np.sin(angles)

    t = np.full(n, np.inf)
    c = world.bounds.corners()
    for i in range(4):
        a, b = c[i], c[(i + 1) % 4]
        t = np.minimum(t, _ray_segment(o.x, o.y, dirs, a.x, a.y, b.x, b.y))
    for obs in world.obstacles:
        t = np.minimum(t, _ray_obstacle(o.x, o.y, dirs, obs))

    ranges = np.minimum(t, lidar.max_range)
    if lidar.noise_stddev > 0.0:
        rng = np.random.default_rng(rng_seed)
        hit = ranges < lidar.max_range
        ranges[hit] += rng.normal(0.0, lidar.noise_stddev, int(hit.sum()))
        ranges = np.clip(ranges, 1e-6, lidar.max_range)
    at_max = ranges >= lidar.max_range
    ranges = np.where(at_max, lidar.max_range, ranges)
    return Scan(o, angles, ranges, at_max, lidar.max_range)


# -- robot integration and collision --------------------------------------


def step_robot(state: SimState, cmd: ControlCommand, dt: float) -> SimState:
    """Advance the unicycle along an exact circular arc (straight line for
    negligible turn rate). Composes exactly: two dt steps equal one 2*dt step."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    p = state.pose.position
    h = state.pose.heading
    v, w = cmd.v, cmd.w
    if abs(w) < 1e-9:
        x = p.x + v * dt * math.cos(h)
        y = p.y + v * dt * math.sin(h)
        nh = h + w * dt
    else:
        nh = h + w * dt
        x = p.x + (v / w) * (math.sin(nh) - math.sin(h))
        y = p.y - (v / w) * (math.cos(nh) - math.cos(h))
    return SimState(Pose2(Point2(x, y), nh), state.time + dt, state.collided)


def _point_segment_distance(px: float, py: float, ax: float, ay: float,
                            bx: float, by: float) -> float:
    abx = bx - ax
    aby = by - ay
    denom = abx * abx + aby * aby
    s = ((px - ax) * abx + (py - ay) * aby) / denom
    s = max(0.0, min(1.0, s))
    return math.hypot(px - (ax + s * abx), py - (ay + s * aby))


def _polygon_contains(poly: ConvexPolygon, p: Point2) -> bool:
    verts = poly.vertices
    for i in range(len(verts)):
        a = verts[i]
        b = verts[(i + 1) % len(verts)]
        if (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0.0:
            return False
    return True


def obstacle_distance(obs: Obstacle, p: Point2) -> float:
    """Distance from p to the obstacle surface; negative when p is inside."""
    if isinstance(obs, Circle):
        return p.distance_to(obs.center) - obs.radius
    if isinstance(obs, ConvexPolygon):
        verts = obs.vertices
        edge = min(_point_segment_distance(p.x, p.y, verts[i].x, verts[i].y,
                                           verts[(i + 1) % len(verts)].x,
                                           verts[(i + 1) % len(verts)].y)
                   for i in range(len(verts)))
        return -edge if _polygon_contains(obs, p) else edge
    if isinstance(obs, Wall):
        return _point_segment_distance(p.x, p.y, obs.a.x, obs.a.y,
                                       obs.b.x, obs.b.y) - 0.5 * obs.thickness
    raise TypeError(f"unknown obstacle type {type(obs)!r}")


def check_collision(world: World, p: Point2, robot_radius: float) -> bool:
    """True when a disk robot at p intersects any obstacle or exits the bounds."""
    b = world.bounds
    if (p.x - robot_radius < b.xmin or p.x + robot_radius > b.xmax
            or p.y - robot_radius < b.ymin or p.y + robot_radius > b.ymax):
        return True
    return any(obstacle_distance(obs, p) <= robot_radius for obs in world.obstacles)


# -- scenario generators ---------------------------------------------------


def gen_forest(seed: int, bounds: Rect = Rect(0.0, 0.0, 20.0, 20.0),
               n_cylinders: int = 25, cylinder_radius: float = 0.5,
               min_gap: float = 1.5,
               start_zone: Rect = Rect(1.0, 1.0, 4.0, 4.0),
               goal_zone: Rect = Rect(16.0, 16.0, 19.0, 19.0),
               ) -> tuple[World, Point2, Point2]:
    """Seeded random cylinder forest.

    Cylinders keep at least min_gap of clear space between surfaces and leave
    the start/goal zones clear by twice that. Start and goal are sampled
    uniformly inside their zones; everything is determined by the seed.
    """
    rng = np.random.default_rng(seed)
    r = cylinder_radius
    lo_x, hi_x = bounds.xmin + r, bounds.xmax - r
    lo_y, hi_y = bounds.ymin + r, bounds.ymax - r
    centers: list[Point2] = []
    attempts = 0
    max_attempts = max(2000, 400 * n_cylinders)
    while len(centers) < n_cylinders and attempts < max_attempts:
        attempts += 1
        c = Point2(float(rng.uniform(lo_x, hi_x)), float(rng.uniform(lo_y, hi_y)))
        if any(c.distance_to(o) < 2.0 * r + min_gap for o in centers):
            continue
        if start_zone.distance_to(c) < r + 2.0 * min_gap:
            continue
        if goal_zone.distance_to(c) < r + 2.0 * min_gap:
            continue
        centers.append(c)
    if len(centers) < n_cylinders:
        raise PlacementFailed(
            f"placed {len(centers)}/{n_cylinders} cylinders in {max_attempts} attempts")
    world = World(bounds, tuple(Circle(c, r) for c in centers))
    return world, start_zone.sample(rng), goal_zone.sample(rng)


def _utrap_layout() -> tuple[World, Rect, Rect]:
    bounds = Rect(0.0, 0.0, 12.0, 10.0)
    walls = (
        Wall(Point2(5.0, 6.2), Point2(7.5, 6.2), 0.2),
        Wall(Point2(5.0, 3.8), Point2(7.5, 3.8), 0.2),
        Wall(Point2(7.5, 3.8), Point2(7.5, 6.2), 0.2),
        Circle(Point2(2.5, 8.8), 0.4),
        Circle(Point2(9.5, 1.2), 0.4),
    )
    return World(bounds, walls), Rect(0.8, 4.2, 2.2, 5.8), Rect(10.0, 4.2, 11.2, 5.8)


def _slit_layout() -> tuple[World, Rect, Rect]:
    bounds = Rect(0.0, 0.0, 12.0, 10.0)
    obstacles = (
        Wall(Point2(6.0, 0.0), Point2(6.0, 4.4), 0.2),
        Wall(Point2(6.0, 5.6), Point2(6.0, 10.0), 0.2),
        Circle(Point2(3.0, 7.5), 0.5),
        Circle(Point2(9.0, 2.5), 0.5),
    )
    return World(bounds, obstacles), Rect(1.0, 4.0, 2.5, 6.0), Rect(9.5, 4.0, 11.0, 6.0)


def _zigzag_layout() -> tuple[World, Rect, Rect]:
    bounds = Rect(0.0, 0.0, 12.0, 10.0)
    obstacles = (
        Wall(Point2(3.0, 0.0), Point2(3.0, 7.0), 0.2),
        Wall(Point2(7.0, 3.0), Point2(7.0, 10.0), 0.2),
        Circle(Point2(5.0, 8.6), 0.4),
    )
    return World(bounds, obstacles), Rect(0.8, 0.8, 2.2, 2.2), Rect(9.8, 7.8, 11.2, 9.2)


MAZE_LAYOUTS = {
    "utrap": _utrap_layout,
    "slit": _slit_layout,
    "zigzag": _zigzag_layout,
}


def gen_maze(layout_id: str) -> tuple[World, Rect, Rect]:
    """Fixed maze layout by id; returns (world, start zone, goal zone).

    "utrap" places a U-shaped dead end with its opening facing the start zone,
    directly between start and goal.
    """
    try:
        factory = MAZE_LAYOUTS[layout_id]
    except KeyError:
        raise UnknownLayout(layout_id) from None
    return factory()
