"""Reactive guidance by dynamic system modulation inside starshaped regions.

The raw guidance vector (toward the short-term goal) is reshaped by a
region-dependent linear map that cancels the component heading into the
boundary as the boundary is approached, blended with a pure repulsion from the
nearest sensed obstacle point, and finally tracked by a unicycle law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Point2, Pose2, Scan, wrap_angle
from .starshape import StarshapedRegion


class AtReferencePoint(ValueError):
    """Modulation basis requested exactly at the region reference point."""


class OutsideRegion(ValueError):
    """Modulation basis requested for a point outside the region."""


class SingularBasis(ValueError):
    """Basis directions are numerically collinear."""


class EmptyRegionList(ValueError):
    """combine_overlaps needs at least one region."""


@dataclass(frozen=True)
class ControllerConfig:
    """Controller gains and geometry. rho is the blend falloff distance,
    conventionally twice the robot radius."""

    robot_radius: float = 0.25
    sigma: float = 1.0
    rho: float = 0.5
    v_max: float = 0.5
    w_max: float = 2.0
    k_heading: float = 2.0
    k_speed: float = 1.0


@dataclass(frozen=True)
class ModulationBasis:
    """Decomposition frame at a point: unit direction toward the reference
    point, unit boundary-tangent direction (oriented along increasing bearing),
    and the eigenvalues applied to each component."""

    r_dir: np.ndarray
    e_dir: np.ndarray
    lambda_r: float
    lambda_e: float
    gamma: float


@dataclass(frozen=True)
class ControlCommand:
    v: float
    w: float


def raw_guidance(p: Point2, p_sg: Point2) -> np.ndarray:
    """Unmodulated guidance: displacement from the robot to the short-term goal."""
    return np.array([p_sg.x - p.x, p_sg.y - p.y])


def _basis(region: StarshapedRegion, p: Point2, sigma: float, clamp: bool) -> ModulationBasis:
    dx = p.x - region.p_ref.x
    dy = p.y - region.p_ref.y
    d = math.hypot(dx, dy)
    if d == 0.0:
        raise AtReferencePoint(region.id)
    theta = math.atan2(dy, dx)
    boundary = region.boundary
    phi = boundary.radius(theta)
    dphi = boundary.radius_deriv(theta)
    g = (phi / d) ** sigma
    if not clamp and g < 1.0 - 1e-6:
        raise OutsideRegion(f"gamma={g:.6f} at {p} in region {region.id}")

    r_dir = np.array([-dx / d, -dy / d])
    ct = math.cos(theta)
    st = math.sin(theta)
    tx = dphi * ct - phi * st
    ty = dphi * st + phi * ct
    tn = math.hypot(tx, ty)
    e_dir = np.array([tx / tn, ty / tn])

    if clamp and g < 1.0:
        lam_r, lam_e = 0.0, 2.0
    else:
        lam_r = 1.0 - 1.0 / g
        lam_e = 1.0 + 1.0 / g
    return ModulationBasis(r_dir, e_dir, lam_r, lam_e, g)


def modulation_basis(region: StarshapedRegion, p: Point2, sigma: float = 1.0) -> ModulationBasis:
    """Modulation frame at p, which must lie inside the region (within tolerance)."""
    return _basis(region, p, sigma, clamp=False)


def modulate(basis: ModulationBasis, v: np.ndarray) -> np.ndarray:
    """Scale v's components along the basis directions by their eigenvalues."""
    rx, ry = basis.r_dir
    ex, ey = basis.e_dir
    det = rx * ey - ex * ry
    if abs(det) < 1e-9:
        raise SingularBasis(f"det={det}")
    vx, vy = float(v[0]), float(v[1])
    a = (vx * ey - ex * vy) / det
    b = (rx * vy - vx * ry) / det
    a *= basis.lambda_r
    b *= basis.lambda_e
    return np.array([a * rx + b * ex, a * ry + b * ey])


# gamma is +inf at a region's reference point; cap it so weights stay finite
_GAMMA_CAP = 1e15


def combine_overlaps(regions: list[StarshapedRegion], p: Point2, v_in: np.ndarray,
                     sigma: float = 1.0) -> np.ndarray:
    """Weighted sum of per-region modulations, weights proportional to
    max(gamma, 1) so deeper containment dominates. Regions not containing p
    degrade gracefully (full boundary-parallel eigenvalues)."""
    if not regions:
        raise EmptyRegionList("no regions to combine")
    bases: list[ModulationBasis | None] = []
    for r in regions:
        try:
            bases.append(_basis(r, p, sigma, clamp=True))
        except AtReferencePoint:
            # at p_ref both eigenvalues tend to 1, so the modulation is the
            # identity; represent it directly with the cap weight
            bases.append(None)
    weights = [_GAMMA_CAP if b is None else min(max(b.gamma, 1.0), _GAMMA_CAP)
               for b in bases]
    total = sum(weights)
    out = np.zeros(2)
    for b, w in zip(bases, weights):
        out += (w / total) * (v_in if b is None else modulate(b, v_in))
    return out


def blend_nearest(v_mod: np.ndarray, p: Point2, scan: Scan, cfg: ControllerConfig) -> np.ndarray:
    """Blend the modulated guidance with pure repulsion from the nearest sensed
    obstacle point. The repulsion share alpha ramps from 0 beyond rho of the
    robot surface to 1 at contact; an all-max-range scan leaves v_mod unchanged.
    """
    pts = scan.hit_points
    if pts.shape[0] == 0:
        return v_mod
    d2 = (pts[:, 0] - p.x) ** 2 + (pts[:, 1] - p.y) ** 2
    i = int(np.argmin(d2))
    dist = math.sqrt(float(d2[i]))
    gap = dist - cfg.robot_radius
    if gap <= 0.0:
        alpha = 1.0
    else:
        alpha = min(cfg.rho / gap, 1.0)
    if alpha == 0.0:
        return v_mod
    if dist < 1e-12:
        away = np.zeros(2)
    else:
        away = np.array([(p.x - pts[i, 0]) / dist, (p.y - pts[i, 1]) / dist])
    speed = math.hypot(float(v_mod[0]), float(v_mod[1]))
    return (1.0 - alpha) * v_mod + alpha * speed * away


def track_unicycle(v_desired: np.ndarray, pose: Pose2, cfg: ControllerConfig) -> ControlCommand:
    """Turn-then-drive tracking of a desired velocity direction.

    Heading error drives the turn rate; forward speed scales with the desired
    magnitude and the cosine of the heading error, never negative. A zero
    desired vector stops the robot.
    """
    vx, vy = float(v_desired[0]), float(v_desired[1])
    mag = math.hypot(vx, vy)
    if mag == 0.0:
        return ControlCommand(0.0, 0.0)
    err = wrap_angle(math.atan2(vy, vx) - pose.heading)
    w = max(-cfg.w_max, min(cfg.w_max, cfg.k_heading * err))
    v = cfg.k_speed * mag * max(0.0, math.cos(err))
    v = max(0.0, min(cfg.v_max, v))
    return ControlCommand(v, w)
