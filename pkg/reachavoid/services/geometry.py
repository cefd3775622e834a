"""
Apollonius loci of a pursuer/evader pair and their closest point to the target.

For a speed ratio alpha = U/V < 1 the points both players reach at the same
time form a sphere around the evader's side; at alpha = 1 the sphere
degenerates to the perpendicular bisector plane of the two positions.
"""
from dataclasses import dataclass
import numpy as np
from config import Config
from reachavoid.errors import DegenerateGeometryError, RegionMismatchError, UnsupportedRegimeError


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class Plane:
    """The set {x : unit_normal . x = offset}."""
    unit_normal: np.ndarray
    offset: float


ApolloniusLocus = Sphere | Plane


def is_equal_speed(alpha, switch=None):
    switch = Config.LOCUS_PLANE_SWITCH if switch is None else switch
    return abs(1.0 - alpha) < switch


def is_supported(alpha, switch=None):
    """Value functions exist only for alpha <= 1 (with the plane switch as slack)."""
    return alpha < 1.0 or is_equal_speed(alpha, switch)


def apollonius_locus(x_E, x_P, alpha, coincidence_radius=0.0) -> ApolloniusLocus:
    x_E = np.asarray(x_E, dtype=float)
    x_P = np.asarray(x_P, dtype=float)
    alpha = float(getattr(alpha, 'alpha', alpha))

    if not is_supported(alpha):
        raise UnsupportedRegimeError(f"no Apollonius locus for alpha={alpha:.6g} > 1")

    d = float(np.linalg.norm(x_P - x_E))
    if d <= coincidence_radius or d == 0.0:
        raise DegenerateGeometryError(f"evader and pursuer coincide (distance {d:.3g})")

    if is_equal_speed(alpha):
        unit_normal = (x_P - x_E) / d
        offset = (x_P @ x_P - x_E @ x_E) / (2.0 * d)
        return Plane(unit_normal=unit_normal, offset=float(offset))

    k = 1.0 - alpha ** 2
    center = (x_E - alpha ** 2 * x_P) / k
    radius = alpha * d / k
    return Sphere(center=center, radius=float(radius))


def closest_point_to_origin(locus: ApolloniusLocus) -> tuple[np.ndarray, float]:
    if isinstance(locus, Plane):
        return locus.offset * locus.unit_normal, abs(locus.offset)

    R_c = float(np.linalg.norm(locus.center))
    if R_c <= locus.radius:
        raise RegionMismatchError(
            f"target lies inside the Apollonius sphere (|center|={R_c:.6g}, radius={locus.radius:.6g})"
        )
    point = (1.0 - locus.radius / R_c) * locus.center
    return point, R_c - locus.radius


def fibonacci_sphere(count):
    """Deterministic, nearly uniform unit vectors."""
    k = np.arange(count, dtype=float) + 0.5
    polar = np.arccos(1.0 - 2.0 * k / count)
    azimuth = np.pi * (1.0 + 5.0 ** 0.5) * k
    return np.column_stack([
        np.cos(azimuth) * np.sin(polar),
        np.sin(azimuth) * np.sin(polar),
        np.cos(polar),
    ])


def sample_locus(locus: ApolloniusLocus, count=100, extent=None):
    """Points on the locus; plane samples cover a disc of radius `extent` around its closest point."""
    if isinstance(locus, Sphere):
        return locus.center + locus.radius * fibonacci_sphere(count)

    foot, distance = closest_point_to_origin(locus)
    extent = extent if extent is not None else max(1.0, 4.0 * distance)
    helper = np.eye(3)[np.argmin(np.abs(locus.unit_normal))]
    e1 = np.cross(locus.unit_normal, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(locus.unit_normal, e1)
    directions = fibonacci_sphere(count)
    # radial spread in [0, extent]; the polar angle supplies the radius
    radii = extent * np.sqrt((1.0 + directions[:, 2]) / 2.0)
    angles = np.arctan2(directions[:, 1], directions[:, 0])
    return foot + np.outer(radii * np.cos(angles), e1) + np.outer(radii * np.sin(angles), e2)
