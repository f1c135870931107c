"""Planar geometry primitives: points, poses, angle wrapping, polar transforms, scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi


class DegeneratePoint(ValueError):
    """Polar conversion requested for the reference point itself."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to [-pi, pi). By convention wrap(pi) == -pi."""
    wrapped = math.remainder(angle, TWO_PI)
    return -math.pi if wrapped >= math.pi else wrapped


@dataclass(frozen=True)
class Point2:
    """A point in the plane, meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def offset(self, dx: float, dy: float) -> "Point2":
        return Point2(self.x + dx, self.y + dy)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class Pose2:
    """Robot pose: position plus heading. Heading is wrapped to [-pi, pi) on construction."""

    position: Point2
    heading: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "heading", wrap_angle(self.heading))


@dataclass(frozen=True)
class PolarCoord:
    """Polar coordinates about some reference point: bearing in [-pi, pi) and distance > 0."""

    theta: float
    dist: float

    def __post_init__(self) -> None:
        if not -math.pi <= self.theta < math.pi:
            raise ValueError(f"theta {self.theta} outside [-pi, pi)")
        if not self.dist > 0.0:
            raise ValueError(f"dist must be positive, got {self.dist}")


def cart_to_polar(ref: Point2, p: Point2) -> PolarCoord:
    """Polar coordinates of p about ref.

    Raises DegeneratePoint when p coincides with ref (bearing undefined).
    """
    dx = p.x - ref.x
    dy = p.y - ref.y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise DegeneratePoint(f"point coincides with reference {ref}")
    return PolarCoord(wrap_angle(math.atan2(dy, dx)), dist)


def polar_to_cart(ref: Point2, pc: PolarCoord) -> Point2:
    """Inverse of cart_to_polar."""
    return Point2(ref.x + pc.dist * math.cos(pc.theta),
                  ref.y + pc.dist * math.sin(pc.theta))


@dataclass(frozen=True)
class Scan:
    """One full range scan: beams at strictly increasing world-frame angles in [-pi, pi).

    ranges are in (0, max_range]; at_max marks beams that hit nothing within range
    (at_max[i] is True exactly when ranges[i] == max_range).
    """

    origin: Point2
    angles: np.ndarray
    ranges: np.ndarray
    at_max: np.ndarray
    max_range: float

    def __post_init__(self) -> None:
        angles = np.asarray(self.angles, dtype=float)
        ranges = np.asarray(self.ranges, dtype=float)
        at_max = np.asarray(self.at_max, dtype=bool)
        if angles.ndim != 1 or angles.shape != ranges.shape or angles.shape != at_max.shape:
            raise ValueError("angles, ranges, at_max must be 1-d arrays of equal length")
        if angles.size == 0:
            raise ValueError("empty scan")
        if not (angles[0] >= -math.pi and angles[-1] < math.pi):
            raise ValueError("beam angles must lie in [-pi, pi)")
        if angles.size > 1 and not np.all(np.diff(angles) > 0.0):
            raise ValueError("beam angles must be strictly increasing")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be positive")
        if not np.all((ranges > 0.0) & (ranges <= self.max_range)):
            raise ValueError("ranges must lie in (0, max_range]")
        if not np.array_equal(at_max, ranges == self.max_range):
            raise ValueError("at_max must hold exactly where range == max_range")
        for name, arr in (("angles", angles), ("ranges", ranges), ("at_max", at_max)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.angles.size)

    @cached_property
    def points_xy(self) -> np.ndarray:
        """Cartesian beam endpoints, shape (n, 2), world frame."""
        xy = np.empty((len(self), 2))
        xy[:, 0] = self.origin.x + self.ranges * np.cos(self.angles)
        xy[:, 1] = self.origin.y + self.ranges * np.sin(self.angles)
        xy.setflags(write=False)
        return xy

    @cached_property
    def hit_points(self) -> np.ndarray:
        """Cartesian endpoints of beams that hit something, shape (m, 2)."""
        pts = self.points_xy[~self.at_max]
        pts.setflags(write=False)
        return pts
