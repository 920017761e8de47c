"""Pick the right roof formula for a state and fall back to the oracle otherwise."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import RankError, StructureError
from .geometry import GeometrySummary, RootProfile, Structure, bloch_of_density, omega_state, root_profile, state_of_bloch
from .ghzw import axis_envelope
from .measures import PolynomialMeasure
from .oracle import brute_force_roof
from .quantum import DensityMatrix, PureState, spectral_decompose_rank2
from .roof import (
    Method,
    RoofResult,
    in_zero_polytope,
    pure_value,
    roof_one_root,
    roof_separable_ray,
    roof_two_root,
)

AXIS_TOL = 1e-8
METHODS = ("auto", "one-root", "two-root", "ray", "ghzw", "oracle")


def ghzw_axis_frame(profile: RootProfile, tol: float = AXIS_TOL):
    """(lone root, triangle roots, x_O) if the roots sit in the GHZ/W configuration, else None.

    The configuration is four simple roots, one of which is a pole for an
    equilateral triangle formed by the other three.
    """
    if profile.structure is not Structure.FOUR_ROOT or any(k != 1 for k in profile.multiplicities):
        return None
    zs = profile.root_blochs()
    for i in range(4):
        pole = zs[i]
        tri = np.delete(zs, i, axis=0)
        heights = tri @ pole
        sides = [np.linalg.norm(tri[a] - tri[b]) for a, b in ((0, 1), (1, 2), (0, 2))]
        if np.ptp(heights) < tol and np.ptp(sides) < tol:
            return pole, tri, float(np.mean(heights))
    return None


def _oracle_result(m, rho, oracle_kw) -> RoofResult:
    value, ensemble, _ = brute_force_roof(m, rho, **oracle_kw)
    return RoofResult(value, Method.ORACLE, GeometrySummary(), list(ensemble.members), exact=False)


def roof_ghzw_axis(profile: RootProfile, m: PolynomialMeasure, rho: DensityMatrix, grid: int = 2000) -> RoofResult:
    """Tangle of a state on the symmetry axis of a GHZ/W-type sphere via the convexified flat product."""
    frame = ghzw_axis_frame(profile)
    if frame is None:
        raise StructureError("roots are not in the GHZ/W configuration")
    if m.degree_d != 4 or m.power_p != 1:
        raise StructureError("the axis envelope is built for the tangle (d = 4, p = 1)")
    lone, tri, x_o = frame
    basis = profile.sphere
    r = bloch_of_density(basis, rho)
    axis = -lone
    u = float(r @ axis)
    if np.linalg.norm(r - u * axis) > AXIS_TOL:
        raise StructureError("state is off the symmetry axis")
    x = u + x_o
    env = axis_envelope(m.adjusted_normalization(profile.normalization_N), x_o, grid)
    value = env(x)
    geometry = GeometrySummary(h=max(x, 0.0))
    if x <= 0:
        w = in_zero_polytope(profile, r, tol=1e-8)
        witness = [(wi, omega_state(basis, z)) for wi, (z, _) in zip(w, profile.roots) if wi > 1e-15]
        return RoofResult(0.0, Method.GHZW_AXIS, geometry, witness)

    horiz = [(z - (z @ axis) * axis) / np.linalg.norm(z - (z @ axis) * axis) for z in tri]

    def triangle(height):
        rad = math.sqrt(max(1 - height * height, 0.0))
        return [state_of_bloch(basis, height * axis + rad * e) for e in horiz]

    if env.tangent_x is None or x < env.tangent_x:
        witness = [(1 / 3, s) for s in triangle(u)]
    else:
        end = x_o + 1
        lam = (x - env.tangent_x) / (end - env.tangent_x)
        witness = [((1 - lam) / 3, s) for s in triangle(env.tangent_x - x_o)]
        witness.append((lam, state_of_bloch(basis, axis)))
        witness = [(w, s) for w, s in witness if w > 1e-15]
    return RoofResult(value, Method.GHZW_AXIS, geometry, witness)


def roof_dispatch(
    m: PolynomialMeasure,
    rho: DensityMatrix,
    method: str = "auto",
    profile: Optional[RootProfile] = None,
    oracle_kw: Optional[dict] = None,
) -> RoofResult:
    """Convex roof of ``m`` at ``rho`` by the best available route.

    Exact routes: pure input, vanishing measure, the zero polytope, one or two
    simple roots, and the GHZ/W axis for the tangle. Everything else is the
    oracle's upper bound with ``exact=False``. ``method`` forces one route.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    oracle_kw = dict(oracle_kw or {})
    rank = rho.rank()
    if rank > 2:
        raise RankError(f"convex roofs here need rank <= 2, found rank {rank}")
    if rank == 1:
        _, v = np.linalg.eigh(rho.matrix)
        return pure_value(m, PureState.from_vector(v[:, -1]))
    if method == "oracle":
        return _oracle_result(m, rho, oracle_kw)
    if profile is None:
        profile = root_profile(m, spectral_decompose_rank2(rho))

    if method == "one-root":
        return roof_one_root(profile, m, rho)
    if method == "two-root":
        return roof_two_root(profile, m, rho)
    if method == "ray":
        return roof_separable_ray(profile, m, rho)
    if method == "ghzw":
        return roof_ghzw_axis(profile, m, rho)

    if profile.structure is Structure.IDENTICALLY_ZERO:
        return RoofResult(0.0, Method.IDENTICALLY_ZERO)
    if m.homogeneous_degree < 2:
        return _oracle_result(m, rho, oracle_kw)
    if profile.structure is Structure.ONE_ROOT:
        return roof_one_root(profile, m, rho)
    if profile.structure is Structure.TWO_ROOT_EQUAL:
        return roof_two_root(profile, m, rho)
    r = bloch_of_density(profile.sphere, rho)
    weights = in_zero_polytope(profile, r)
    if weights is not None:
        witness = [(w, omega_state(profile.sphere, z)) for w, (z, _) in zip(weights, profile.roots) if w > 1e-15]
        return RoofResult(0.0, Method.ZERO_POLYTOPE, GeometrySummary(), witness)
    if m.degree_d == 4 and m.power_p == 1 and ghzw_axis_frame(profile) is not None:
        try:
            return roof_ghzw_axis(profile, m, rho)
        except StructureError:
            pass
    return _oracle_result(m, rho, oracle_kw)

