"""Starshaped free-space regions bounded by piecewise polynomials in bearing.

A region is the set of points whose distance from the reference point does not
exceed a boundary radius function Phi(theta). Phi is represented as polynomial
segments tiling [-pi, pi); segments are fit per-interval by ordinary least
squares against scan samples.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import Point2, Scan, wrap_angle

# Radii are clamped below at evaluation so gamma and the modulation basis stay finite.
RADIUS_FLOOR = 1e-3


class TooFewPoints(ValueError):
    """Scan does not carry enough beams to fit the requested polynomial order."""


@dataclass(frozen=True)
class FitConfig:
    """Boundary fitting parameters.

    rate_threshold=None selects the adaptive default, 3x the median absolute
    range rate |delta d / delta theta| of the scan. min_points_per_segment=None
    defaults to order + 2.
    """

    order: int = 3
    rate_threshold: float | None = None
    max_segment_span: float = math.pi / 4.0
    min_points_per_segment: int | None = None

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.rate_threshold is not None and self.rate_threshold < 0.0:
            raise ValueError("rate_threshold must be >= 0")
        if not 0.0 < self.max_segment_span <= 2.0 * math.pi:
            raise ValueError("max_segment_span must lie in (0, 2*pi]")
        if self.min_points_per_segment is not None and self.min_points_per_segment < self.order + 1:
            raise ValueError("min_points_per_segment must be >= order + 1")

    @property
    def min_points(self) -> int:
        return self.min_points_per_segment if self.min_points_per_segment is not None else self.order + 2


@dataclass(frozen=True)
class PolySegment:
    """One polynomial piece of the boundary on the interval (theta_lo, theta_hi].

    coeffs are ascending powers of theta (radians in, meters out).
    """

    coeffs: tuple[float, ...]
    theta_lo: float
    theta_hi: float

    def __post_init__(self) -> None:
        if len(self.coeffs) < 1:
            raise ValueError("empty coefficient list")
        if not self.theta_lo < self.theta_hi:
            raise ValueError(f"invalid interval ({self.theta_lo}, {self.theta_hi}]")

    def value(self, theta: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * theta + c
        return acc

    def deriv(self, theta: float) -> float:
        acc = 0.0
        for i in range(len(self.coeffs) - 1, 0, -1):
            acc = acc * theta + i * self.coeffs[i]
        return acc


@dataclass(frozen=True)
class PiecewiseBoundary:
    """Segments tiling [-pi, pi). Intervals are lower-open/upper-closed, so a
    breakpoint value belongs to the segment it closes; theta == -pi is looked up
    as pi."""

    segments: tuple[PolySegment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("boundary needs at least one segment")
        segs = self.segments
        if not math.isclose(segs[0].theta_lo, -math.pi, abs_tol=1e-12):
            raise ValueError("first segment must start at -pi")
        if not math.isclose(segs[-1].theta_hi, math.pi, abs_tol=1e-12):
            raise ValueError("last segment must end at pi")
        for a, b in zip(segs, segs[1:]):
            if a.theta_hi != b.theta_lo:
                raise ValueError("segments must tile [-pi, pi) without gaps or overlap")

    @cached_property
    def _uppers(self) -> tuple[float, ...]:
        return tuple(s.theta_hi for s in self.segments)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior breakpoints, excluding the -pi/pi seam."""
        return self._uppers[:-1]

    def segment_at(self, theta: float) -> PolySegment:
        w = wrap_angle(theta)
        if w == -math.pi:
            w = math.pi
        idx = bisect_left(self._uppers, w)
        if idx >= len(self.segments):
            idx = len(self.segments) - 1
        return self.segments[idx]

    def radius(self, theta: float) -> float:
        w = wrap_angle(theta)
        if w == -math.pi:
            w = math.pi
        idx = bisect_left(self._uppers, w)
        if idx >= len(self.segments):
            idx = len(self.segments) - 1
        r = self.segments[idx].value(w)
        return r if r > RADIUS_FLOOR else RADIUS_FLOOR

    def radius_deriv(self, theta: float) -> float:
        w = wrap_angle(theta)
        if w == -math.pi:
            w = math.pi
        idx = bisect_left(self._uppers, w)
        if idx >= len(self.segments):
            idx = len(self.segments) - 1
        return self.segments[idx].deriv(w)


@dataclass(frozen=True)
class StarshapedRegion:
    """A starshaped free-space region: reference point plus boundary radius function."""

    id: str
    p_ref: Point2
    boundary: PiecewiseBoundary


def _shift_coeffs(coeffs_local: np.ndarray, shift: float) -> np.ndarray:
    """Convert p(t) with t = theta - shift into ascending coefficients in theta."""
    out = np.zeros(len(coeffs_local))
    base = np.array([1.0])
    for c in coeffs_local:
        out[: len(base)] += c * base
        base = np.convolve(base, np.array([-shift, 1.0]))
    return out


def _sample_polar(p_ref: Point2, scan: Scan) -> tuple[np.ndarray, np.ndarray]:
    """Scan samples as sorted (theta, dist) about p_ref. Max-range beams included."""
    if p_ref.x == scan.origin.x and p_ref.y == scan.origin.y:
        return np.asarray(scan.angles, dtype=float), np.asarray(scan.ranges, dtype=float)
    rel = scan.points_xy - np.array([p_ref.x, p_ref.y])
    dist = np.hypot(rel[:, 0], rel[:, 1])
    keep = dist > 0.0
    thetas = np.arctan2(rel[keep, 1], rel[keep, 0])
    thetas[thetas >= math.pi] = -math.pi
    order = np.argsort(thetas, kind="stable")
    return thetas[order], dist[keep][order]


def _choose_edges(thetas: np.ndarray, dists: np.ndarray, cfg: FitConfig) -> list[float]:
    """Segment edges over [-pi, pi]: adaptive rate breakpoints, then span splits."""
    threshold = cfg.rate_threshold
    dtheta = np.diff(thetas)
    if threshold is None:
        with np.errstate(divide="ignore"):
            rates = np.abs(np.diff(dists)) / dtheta
        threshold = 3.0 * float(np.median(rates)) if rates.size else 0.0
    edges = [-math.pi]
    for i in range(len(thetas) - 1):
        if dtheta[i] > 0.0 and abs(dists[i + 1] - dists[i]) / dtheta[i] > threshold:
            edges.append(0.5 * (thetas[i] + thetas[i + 1]))
    edges.append(math.pi)
    # split any interval wider than the span cap into equal parts
    split: list[float] = [edges[0]]
    for lo, hi in zip(edges, edges[1:]):
        span = hi - lo
        if span > cfg.max_segment_span:
            parts = math.ceil(span / cfg.max_segment_span)
            for k in range(1, parts):
                split.append(lo + span * k / parts)
        split.append(hi)
    return split


def fit_region(p_ref: Point2, scan: Scan, cfg: FitConfig = FitConfig(),
               region_id: str = "region") -> StarshapedRegion:
    """Fit a starshaped region boundary to a scan taken at p_ref.

    Beams at max range are used as samples (they bound free space); segment
    boundaries are chosen adaptively where the range rate jumps, wide segments
    are split, and segments with too few samples are merged into a neighbor.
    A rank-deficient segment falls back to a constant at its samples' mean.
    """
    if len(scan) < 2 * (cfg.order + 2):
        raise TooFewPoints(f"need at least {2 * (cfg.order + 2)} beams, got {len(scan)}")
    thetas, dists = _sample_polar(p_ref, scan)
    edges = _choose_edges(thetas, dists, cfg)

    # sample index ranges per interval (lo, hi]; a sample at exactly -pi belongs
    # to the closing segment at pi, matching the wrapped lookup convention
    lookup = np.where(thetas == -math.pi, math.pi, thetas)
    counts: list[int] = []
    members: list[np.ndarray] = []
    for lo, hi in zip(edges, edges[1:]):
        sel = (lookup > lo) & (lookup <= hi)
        members.append(sel)
        counts.append(int(np.count_nonzero(sel)))

    # merge undersized segments into the smaller neighbor
    min_pts = cfg.min_points
    while len(counts) > 1:
        idx = next((i for i, c in enumerate(counts) if c < min_pts), None)
        if idx is None:
            break
        if idx == 0:
            nbr = 1
        elif idx == len(counts) - 1:
            nbr = idx - 1
        else:
            nbr = idx - 1 if counts[idx - 1] <= counts[idx + 1] else idx + 1
        lo_i, hi_i = min(idx, nbr), max(idx, nbr)
        members[lo_i] = members[lo_i] | members[hi_i]
        counts[lo_i] = counts[lo_i] + counts[hi_i]
        del members[hi_i], counts[hi_i], edges[hi_i]

    segments: list[PolySegment] = []
    ncoef = cfg.order + 1
    for (lo, hi), sel in zip(zip(edges, edges[1:]), members):
        seg_t = lookup[sel] - lo
        seg_d = dists[sel]
        coeffs = None
        if seg_t.size >= ncoef:
            vand = np.vander(seg_t, ncoef, increasing=True)
            sol, _, rank, _ = np.linalg.lstsq(vand, seg_d, rcond=None)
            if rank == ncoef:
                coeffs = _shift_coeffs(sol, lo)
        if coeffs is None:
            mean = float(np.mean(seg_d)) if seg_d.size else RADIUS_FLOOR
            coeffs = np.zeros(ncoef)
            coeffs[0] = mean
        segments.append(PolySegment(tuple(float(c) for c in coeffs), lo, hi))
    return StarshapedRegion(region_id, p_ref, PiecewiseBoundary(tuple(segments)))


def eval_radius(region: StarshapedRegion, theta: float) -> float:
    """Boundary radius Phi(theta), clamped below at RADIUS_FLOOR."""
    return region.boundary.radius(theta)


def eval_radius_deriv(region: StarshapedRegion, theta: float) -> float:
    """Boundary radius derivative dPhi/dtheta of the active segment."""
    return region.boundary.radius_deriv(theta)


def gamma(region: StarshapedRegion, p: Point2, sigma: float = 1.0) -> float:
    """Inverse-distance measure (Phi(theta(p)) / ||p - p_ref||)^sigma.

    Greater than 1 strictly inside, 1 on the boundary, +inf at p_ref itself.
    """
    dx = p.x - region.p_ref.x
    dy = p.y - region.p_ref.y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return math.inf
    theta = math.atan2(dy, dx)
    return (region.boundary.radius(theta) / dist) ** sigma


def contains(region: StarshapedRegion, p: Point2, margin: float = 0.0) -> bool:
    """True when p lies within the region boundary shrunk by margin."""
    dx = p.x - region.p_ref.x
    dy = p.y - region.p_ref.y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return True
    theta = math.atan2(dy, dx)
    return dist <= region.boundary.radius(theta) - margin


def region_to_dict(region: StarshapedRegion) -> dict:
    """Structured record of a region for run persistence."""
    return {
        "id": region.id,
        "p_ref": [region.p_ref.x, region.p_ref.y],
        "breakpoints": list(region.boundary.breakpoints),
        "segments": [
            {"interval": [s.theta_lo, s.theta_hi], "coeffs": list(s.coeffs)}
            for s in region.boundary.segments
        ],
    }


def region_from_dict(data: dict) -> StarshapedRegion:
    segments = tuple(
        PolySegment(tuple(s["coeffs"]), s["interval"][0], s["interval"][1])
        for s in data["segments"]
    )
    return StarshapedRegion(data["id"], Point2(*data["p_ref"]), PiecewiseBoundary(segments))
