"""Frontier candidate extraction from scan clusters.

Obstacle returns are density-clustered in Cartesian space; the angular gaps
between cyclically adjacent clusters yield candidate points for extending the
roadmap beyond the current region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import DBSCAN

from .geometry import Point2, Scan, wrap_angle
from .starshape import StarshapedRegion

DEFAULT_EPS = 0.3
DEFAULT_MIN_PTS = 3

# Candidates are pulled radially inward to this fraction of the boundary radius
# so they are strictly interior to the source region.
INTERIOR_FRACTION = 0.95

# A gap spanning more than this is open space, not a passage between obstacles:
# the chord midpoint of its side points collapses toward the reference point,
# so such gaps are subdivided into arcs this wide at most, each contributing a
# candidate placed radially at OPEN_FRACTION of the boundary. The fully open
# scan (no clusters) is the 2*pi case of the same policy: four cardinal
# candidates at 0.8 of the boundary radius.
WIDE_GAP_SPAN = math.pi / 2.0
OPEN_FRACTION = 0.8

# A candidate closer than this many robot radii to any sensed return cannot be
# settled on: with the default blend range of two robot radii, repulsion
# saturates within three radii of a return, so the controller would always
# push the robot back off such a target. Dropping them up front avoids
# discovering the same thing through a stall later.
STANDOFF_RADII = 3.0

RADIUS_EPS = 1e-3


@dataclass(frozen=True)
class Cluster:
    """One obstacle cluster: member polar points about the scan origin."""

    thetas: np.ndarray
    dists: np.ndarray

    def __post_init__(self) -> None:
        thetas = np.asarray(self.thetas, dtype=float)
        dists = np.asarray(self.dists, dtype=float)
        if thetas.ndim != 1 or thetas.shape != dists.shape or thetas.size == 0:
            raise ValueError("cluster needs matching nonempty theta/dist arrays")
        thetas.setflags(write=False)
        dists.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "dists", dists)

    def __len__(self) -> int:
        return int(self.thetas.size)


@dataclass(frozen=True)
class SidePointPair:
    """Extreme angular members of a cluster: the endpoints of its minimal
    covering arc (theta_max may be numerically smaller than theta_min for a
    cluster straddling the -pi/pi seam)."""

    theta_min: float
    theta_max: float
    dist_at_min: float
    dist_at_max: float


@dataclass(frozen=True)
class FrontierCandidate:
    """A candidate roadmap extension point beyond the sensed obstacles."""

    position: Point2
    theta_f: float
    gap_width: float

    def __post_init__(self) -> None:
        if not self.gap_width >= 0.0:
            raise ValueError("gap_width must be >= 0")


def dbscan_labels(points: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Density-cluster 2D points; returns labels with -1 for noise."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return np.empty(0, dtype=int)
    return DBSCAN(eps=eps, min_samples=min_pts).fit(points).labels_


def cluster_scan(scan: Scan, eps: float = DEFAULT_EPS, min_pts: int = DEFAULT_MIN_PTS) -> list[Cluster]:
    """Cluster the scan's obstacle returns, sorted by minimum member angle.

    Max-range beams carry no obstacle evidence and are excluded; noise points
    are discarded.
    """
    hit = ~scan.at_max
    pts = scan.points_xy[hit]
    if pts.shape[0] == 0:
        return []
    labels = dbscan_labels(pts, eps, min_pts)
    thetas = scan.angles[hit]
    dists = scan.ranges[hit]
    clusters = []
    for lab in range(labels.max() + 1):
        sel = labels == lab
        clusters.append(Cluster(thetas[sel], dists[sel]))
    clusters.sort(key=lambda c: float(c.thetas.min()))
    return clusters


def side_points(cluster: Cluster) -> SidePointPair:
    """Endpoints of the minimal arc covering the cluster's member bearings."""
    order = np.argsort(cluster.thetas, kind="stable")
    th = cluster.thetas[order]
    di = cluster.dists[order]
    n = th.size
    if n == 1:
        return SidePointPair(float(th[0]), float(th[0]), float(di[0]), float(di[0]))
    gaps = np.empty(n)
    gaps[:-1] = np.diff(th)
    gaps[-1] = th[0] + 2.0 * math.pi - th[-1]
    k = int(np.argmax(gaps))
    # the covering arc starts just after the widest empty gap
    i_min = (k + 1) % n
    i_max = k
    return SidePointPair(float(th[i_min]), float(th[i_max]), float(di[i_min]), float(di[i_max]))


def _clamp_interior(region: StarshapedRegion, x: float, y: float) -> Point2 | None:
    """Pull a world point radially inside the region boundary; None if degenerate."""
    dx = x - region.p_ref.x
    dy = y - region.p_ref.y
    r = math.hypot(dx, dy)
    if r < 1e-9:
        return None
    theta = math.atan2(dy, dx)
    cap = INTERIOR_FRACTION * region.boundary.radius(theta)
    if r <= cap:
        return Point2(x, y)
    return Point2(region.p_ref.x + cap * math.cos(theta), region.p_ref.y + cap * math.sin(theta))


def extract_frontiers(clusters: list[Cluster], region: StarshapedRegion,
                      robot_radius: float) -> list[FrontierCandidate]:
    """Frontier candidates for the gaps between cyclically adjacent clusters.

    The clusters must come from the scan the region was fitted to, so their
    polar coordinates share the region's reference point. A gap no wider than
    WIDE_GAP_SPAN yields the Cartesian midpoint of its two side points, clamped
    radially inside the boundary; wider gaps are open space and are subdivided
    into boundary-interior candidates instead. Candidates narrower than the
    robot diameter are impassable and dropped. With no clusters at all the scan
    saw open space everywhere and four cardinal candidates are emitted.
    """
    ref = region.p_ref
    candidates: list[FrontierCandidate] = []
    if not clusters:
        reach = 0.8 * _open_space_reach(region)
        for theta in (-math.pi, -math.pi / 2.0, 0.0, math.pi / 2.0):
            pos = _clamp_interior(region,
                                  ref.x + reach * math.cos(theta),
                                  ref.y + reach * math.sin(theta))
            if pos is not None:
                candidates.append(FrontierCandidate(pos, theta, 2.0 * reach))
        candidates.sort(key=lambda c: (c.theta_f, c.gap_width))
        return candidates

    all_th = np.concatenate([c.thetas for c in clusters])
    all_di = np.concatenate([c.dists for c in clusters])
    hits_x = ref.x + all_di * np.cos(all_th)
    hits_y = ref.y + all_di * np.sin(all_th)
    standoff = STANDOFF_RADII * robot_radius

    def approach_clear(pt: Point2) -> bool:
        d2 = (hits_x - pt.x) ** 2 + (hits_y - pt.y) ** 2
        return bool(d2.min() >= standoff * standoff)

    sides = [side_points(c) for c in clusters]
    order = sorted(range(len(clusters)), key=lambda i: sides[i].theta_min)
    k = len(order)
    for idx in range(k):
        a = sides[order[idx]]
        b = sides[order[(idx + 1) % k]]
        span = (b.theta_min - a.theta_max) % (2.0 * math.pi)
        if span <= WIDE_GAP_SPAN:
            # passage between obstacles: chord midpoint of the side points
            ax = ref.x + a.dist_at_max * math.cos(a.theta_max)
            ay = ref.y + a.dist_at_max * math.sin(a.theta_max)
            bx = ref.x + b.dist_at_min * math.cos(b.theta_min)
            by = ref.y + b.dist_at_min * math.sin(b.theta_min)
            gap_width = math.hypot(bx - ax, by - ay)
            if gap_width < 2.0 * robot_radius:
                continue
            pos = _clamp_interior(region, 0.5 * (ax + bx), 0.5 * (ay + by))
            if pos is None or not approach_clear(pos):
                continue
            theta_f = wrap_angle(a.theta_max + 0.5 * span)
            candidates.append(FrontierCandidate(pos, theta_f, gap_width))
        else:
            # open arc: subdivide and place candidates on the boundary interior
            n_sub = math.ceil(span / WIDE_GAP_SPAN)
            half_sub = span / (2.0 * n_sub)
            for j in range(n_sub):
                theta_j = wrap_angle(a.theta_max + span * (2 * j + 1) / (2.0 * n_sub))
                r_j = OPEN_FRACTION * region.boundary.radius(theta_j)
                width_j = 2.0 * r_j * math.sin(half_sub)
                if r_j < RADIUS_EPS or width_j < 2.0 * robot_radius:
                    continue
                pos = Point2(ref.x + r_j * math.cos(theta_j),
                             ref.y + r_j * math.sin(theta_j))
                if not approach_clear(pos):
                    continue
                candidates.append(FrontierCandidate(pos, theta_j, width_j))
    candidates.sort(key=lambda c: (c.theta_f, c.gap_width))
    return candidates


def _open_space_reach(region: StarshapedRegion) -> float:
    """Nominal free radius for the no-obstacle fallback: the boundary radius
    averaged over the cardinal directions."""
    b = region.boundary
    vals = [b.radius(t) for t in (-math.pi, -math.pi / 2.0, 0.0, math.pi / 2.0)]
    return max(RADIUS_EPS, sum(vals) / len(vals))
