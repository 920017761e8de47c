"""Closed-form convex roofs for one- and two-root rank-2 states.

All formulas work with an arbitrary polynomial measure kappa |P_d|^p: on the
sphere the measure is N_p * prod |b - z_i|^(p * mult_i), and the one/two-root
roofs are the concurrence geometry raised to the power d*p/2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import RayError, StructureError
from .geometry import (
    GeometrySummary,
    RootProfile,
    Structure,
    bloch_of_density,
    fibonacci_sphere,
    omega_state,
    state_of_bloch,
)
from .measures import PolynomialMeasure, eval_measure
from .quantum import DensityMatrix, PureState

SURFACE_TOL = 1e-12


class Method(str, enum.Enum):
    PURE = "pure"
    IDENTICALLY_ZERO = "identically-zero"
    ZERO_POLYTOPE = "zero-polytope"
    ONE_ROOT = "one-root"
    TWO_ROOT = "two-root"
    ORTHOGONAL_ROOTS = "orthogonal-roots"
    SEPARABLE_RAY = "ray"
    GHZW_AXIS = "ghzw"
    ORACLE = "oracle"


@dataclass(frozen=True, eq=False)
class RoofResult:
    value: float
    method: Method
    geometry: GeometrySummary = field(default_factory=GeometrySummary)
    witness: Optional[list] = None  # [(weight, PureState), ...]
    exact: bool = True

    def witness_average(self, m: PolynomialMeasure) -> float:
        return sum(w * eval_measure(m, s) for w, s in self.witness)

    def witness_matrix(self) -> np.ndarray:
        return sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in self.witness)


def _exponent(m: PolynomialMeasure) -> float:
    return m.homogeneous_degree / 2


def _scale(profile: RootProfile, m: PolynomialMeasure) -> float:
    return m.adjusted_normalization(profile.normalization_N)


def _require(profile: RootProfile, *allowed: Structure):
    if profile.structure not in allowed:
        names = ", ".join(s.value for s in allowed)
        raise StructureError(f"formula needs structure {names}, got {profile.structure.value}")


def _on_surface(r: np.ndarray) -> bool:
    return np.linalg.norm(r) > 1 - SURFACE_TOL


def _pure_result(profile: RootProfile, m: PolynomialMeasure, r: np.ndarray, geometry, value: float) -> RoofResult:
    """A state on the surface is its own decomposition.

    ``value`` is the closed form evaluated there, which agrees with the pure
    measure but stays accurate next to a multiple root, where the invariant
    itself is dominated by rounding.
    """
    psi = state_of_bloch(profile.sphere, r)
    return RoofResult(value, Method.PURE, geometry, [(1.0, psi)])


def _chord_through(r: np.ndarray, u: np.ndarray):
    """Parameters t1 <= 0 <= t2 where the line r + t u meets the unit sphere."""
    b = float(r @ u)
    c = float(r @ r) - 1
    disc = math.sqrt(max(b * b - c, 0.0))
    return -b - disc, -b + disc


def _unit_perpendicular(a: np.ndarray) -> np.ndarray:
    trial = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e = trial - (trial @ a) * a
    return e / np.linalg.norm(e)


# ------------------------------------------------------------------ one root

def one_root_witness(basis, z: np.ndarray, r: np.ndarray) -> list:
    """Equilateral triangle on the small circle through r perpendicular to z, one vertex along r."""
    c = (r @ z) * z
    radius = math.sqrt(max(1 - float(r @ z) ** 2, 0.0))
    v = r - c
    t = np.linalg.norm(v) / radius if radius > 0 else 0.0
    e0 = v / np.linalg.norm(v) if np.linalg.norm(v) > 1e-14 else _unit_perpendicular(z)
    e1 = np.cross(z, e0)
    weights = [1 / 3 + 2 * t / 3, 1 / 3 - t / 3, 1 / 3 - t / 3]
    out = []
    for k, w in enumerate(weights):
        ang = 2 * math.pi * k / 3
        b = c + radius * (math.cos(ang) * e0 + math.sin(ang) * e1)
        if w > 1e-15:
            out.append((w, state_of_bloch(basis, b)))
    return out


def roof_one_root(profile: RootProfile, m: PolynomialMeasure, rho: DensityMatrix) -> RoofResult:
    _require(profile, Structure.ONE_ROOT)
    r = bloch_of_density(profile.sphere, rho)
    z = profile.root_blochs()[0]
    h_c = max(1 - float(r @ z), 0.0)
    geometry = GeometrySummary(h_c=h_c)
    value = _scale(profile, m) * (2 * h_c) ** _exponent(m)
    if _on_surface(r):
        return _pure_result(profile, m, r, geometry, value)
    return RoofResult(value, Method.ONE_ROOT, geometry, one_root_witness(profile.sphere, z, r))


# ------------------------------------------------------------------ two roots

def two_root_geometry(z1: np.ndarray, z2: np.ndarray, r: np.ndarray) -> GeometrySummary:
    u = (z2 - z1) / np.linalg.norm(z2 - z1)
    off = (r - z1) - ((r - z1) @ u) * u
    h = float(np.linalg.norm(off))
    if h < 1e-14:
        return GeometrySummary(h=0.0)
    n = np.cross(u, off / h)
    s = min(abs(float(n @ z1)), 1.0)
    return GeometrySummary(h=h, R=math.sqrt(1 - s * s), s=s)


def roof_two_root(profile: RootProfile, m: PolynomialMeasure, rho: DensityMatrix) -> RoofResult:
    _require(profile, Structure.TWO_ROOT_EQUAL)
    basis = profile.sphere
    r = bloch_of_density(basis, rho)
    z1, z2 = profile.root_blochs()
    geometry = two_root_geometry(z1, z2, r)
    if _on_surface(r):
        value = _scale(profile, m) * float(profile.distance_product(r)) ** m.p
        return _pure_result(profile, m, r, geometry, value)
    u = (z2 - z1) / np.linalg.norm(z2 - z1)
    if geometry.h == 0.0:
        # on the zero line: mixture of the two root states
        t = float((r - z1) @ u) / np.linalg.norm(z2 - z1)
        t = min(max(t, 0.0), 1.0)
        witness = [(w, omega_state(basis, z)) for w, (z, _) in zip((1 - t, t), profile.roots) if w > 1e-15]
        return RoofResult(0.0, Method.TWO_ROOT, geometry, witness)
    value = _scale(profile, m) * (2 * geometry.R * geometry.h) ** _exponent(m)
    t1, t2 = _chord_through(r, u)
    witness = [
        (t2 / (t2 - t1), state_of_bloch(basis, r + t1 * u)),
        (-t1 / (t2 - t1), state_of_bloch(basis, r + t2 * u)),
    ]
    return RoofResult(value, Method.TWO_ROOT, geometry, witness)


def roof_orthogonal_roots(profile: RootProfile, m: PolynomialMeasure, rho: DensityMatrix) -> RoofResult:
    """Two antipodal roots: the roof is a power of the root-basis coherence 2|<z1|rho|z2>|."""
    _require(profile, Structure.TWO_ROOT_EQUAL)
    (w1, _), (w2, _) = profile.roots
    k1 = omega_state(profile.sphere, w1).amplitudes
    k2 = omega_state(profile.sphere, w2).amplitudes
    if abs(np.vdot(k1, k2)) > 1e-8:
        raise StructureError(f"roots are not orthogonal (overlap {abs(np.vdot(k1, k2)):.3g})")
    h = 2 * abs(np.vdot(k1, rho.matrix @ k2))
    value = _scale(profile, m) * (2 * h) ** _exponent(m)
    return RoofResult(value, Method.ORTHOGONAL_ROOTS, GeometrySummary(h=h, R=1.0, s=0.0))


# ------------------------------------------------------------------ separable ray

def nearest_zero_point(profile: RootProfile, r: np.ndarray) -> np.ndarray:
    zs = profile.root_blochs()
    if profile.structure is Structure.ONE_ROOT:
        return zs[0]
    z1, z2 = zs
    t = float((r - z1) @ (z2 - z1)) / float((z2 - z1) @ (z2 - z1))
    return z1 + min(max(t, 0.0), 1.0) * (z2 - z1)


def roof_separable_ray(
    profile: RootProfile, m: PolynomialMeasure, rho: DensityMatrix, z_m: Optional[np.ndarray] = None
) -> RoofResult:
    """Decompose rho into a separable point z_m of the zero line and the pure state hit by the ray."""
    _require(profile, Structure.ONE_ROOT, Structure.TWO_ROOT_EQUAL)
    basis = profile.sphere
    r = bloch_of_density(basis, rho)
    zs = profile.root_blochs()
    if z_m is None:
        z_m = nearest_zero_point(profile, r)
    z_m = np.asarray(z_m, dtype=float)
    if profile.structure is Structure.ONE_ROOT:
        t_line = 0.0
        if np.linalg.norm(z_m - zs[0]) > 1e-9:
            raise RayError("for a single root the separable point must be the root itself")
    else:
        z1, z2 = zs
        t_line = float((z_m - z1) @ (z2 - z1)) / float((z2 - z1) @ (z2 - z1))
        if np.linalg.norm(z1 + t_line * (z2 - z1) - z_m) > 1e-9 or not -1e-12 <= t_line <= 1 + 1e-12:
            raise RayError("separable point is not on the zero line segment")
        t_line = min(max(t_line, 0.0), 1.0)
    gap = float(np.linalg.norm(r - z_m))
    if gap < 1e-14:
        raise RayError("state coincides with the separable point; its value is 0")
    u = (r - z_m) / gap
    _, t2 = _chord_through(z_m, u)
    psi_b = z_m + t2 * u
    psi_b = psi_b / np.linalg.norm(psi_b)
    psi = state_of_bloch(basis, psi_b)
    frac = gap / float(np.linalg.norm(psi_b - z_m))
    value = eval_measure(m, psi) * frac ** _exponent(m)

    witness = [(frac, psi)]
    if profile.structure is Structure.ONE_ROOT:
        witness.append((1 - frac, omega_state(basis, profile.roots[0][0])))
    else:
        for wt, (w, _) in zip((1 - t_line, t_line), profile.roots):
            witness.append(((1 - frac) * wt, omega_state(basis, w)))
    witness = [(w, s) for w, s in witness if w > 1e-15]
    return RoofResult(value, Method.SEPARABLE_RAY, GeometrySummary(), witness)


# ------------------------------------------------------------------ iso-curves

def iso_curve_frame(profile: RootProfile):
    """(pole, e1, e2): pole at the first root (north pole if there are none)."""
    zs = profile.root_blochs()
    pole = zs[0] if len(zs) else np.array([0.0, 0.0, 1.0])
    e1 = _unit_perpendicular(pole)
    return pole, e1, np.cross(pole, e1)


def sphere_measure(profile: RootProfile, m: PolynomialMeasure, bloch) -> np.ndarray:
    return _scale(profile, m) * profile.distance_product(bloch) ** m.p


def iso_curve_sample(
    profile: RootProfile, m: PolynomialMeasure, level: float, count: int, samples: int = 512
) -> list:
    """Points on the sphere where the measure equals ``level``.

    Bisection along ``count`` meridians of the frame from :func:`iso_curve_frame`.
    Points are ordered by crossing index, then by meridian, so each ring of
    crossings traces one curve.
    """
    if level <= 0:
        raise ValueError("level must be positive")
    pole, e1, e2 = iso_curve_frame(profile)
    thetas = np.linspace(0, np.pi, samples)
    rings: dict = {}
    for k in range(count):
        phi = 2 * np.pi * k / count
        direction = math.cos(phi) * e1 + math.sin(phi) * e2

        def point(th):
            return math.cos(th) * pole + math.sin(th) * direction

        def g(th):
            return float(sphere_measure(profile, m, point(th))) - level

        vals = sphere_measure(profile, m, np.cos(thetas)[:, None] * pole + np.sin(thetas)[:, None] * direction) - level
        crossing = 0
        for i in range(samples - 1):
            if vals[i] == 0 or np.sign(vals[i]) != np.sign(vals[i + 1]):
                lo, hi = thetas[i], thetas[i + 1]
                glo = g(lo)
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    gm = g(mid)
                    if (gm > 0) == (glo > 0):
                        lo, glo = mid, gm
                    else:
                        hi = mid
                    if hi - lo < 1e-15:
                        break
                rings.setdefault(crossing, []).append(point(0.5 * (lo + hi)))
                crossing += 1
    return [p for c in sorted(rings) for p in rings[c]]


def max_on_sphere(profile: RootProfile, m: PolynomialMeasure, count: int = 4000) -> float:
    return float(np.max(sphere_measure(profile, m, fibonacci_sphere(count))))


# ------------------------------------------------------------------ zero polytope

def in_zero_polytope(profile: RootProfile, r: np.ndarray, tol: float = 1e-10) -> Optional[np.ndarray]:
    """Barycentric weights of r over the root Bloch vectors, or None if r is outside their hull."""
    zs = profile.root_blochs()
    k = len(zs)
    a = np.vstack([zs.T, np.ones(k)])
    b = np.append(r, 1.0)
    w, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.linalg.norm(a @ w - b) > tol or np.any(w < -tol):
        return None
    return np.clip(w, 0, None) / np.clip(w, 0, None).sum()


def pure_value(m: PolynomialMeasure, psi: PureState) -> RoofResult:
    return RoofResult(eval_measure(m, psi), Method.PURE, GeometrySummary(), [(1.0, psi)])
