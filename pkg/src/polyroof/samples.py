"""Random rank-2 three-qubit states with a known one- or two-root tangle structure.

One-root spheres come from marginals of the G5, G7 and G8 families; two-root
spheres from G3 and G6 marginals and from generalized W / flipped-W pairs.
Every sphere is moved by a random near-identity SLOCC operation and a random
interior point is picked, so the instances are not tied to special axes.
"""
from __future__ import annotations

import numpy as np

from .atlas import FamilySpec, draw_params, marginal
from .geometry import Structure, density_of_bloch, root_profile
from .measures import TANGLE
from .quantum import DensityMatrix, PureState, Rank2Spectral, random_slocc, spectral_decompose_rank2

ONE_ROOT_SOURCES = ((5, (2, 4)), (7, (2, 3, 4)), (8, (2, 3, 4)))
TWO_ROOT_SOURCES = ((6, (2, 3, 4)), (3, (2, 4)), ("ww", (None,)))


def random_ball_point(rng: np.random.Generator, radius: float = 0.95) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v) * radius * rng.uniform() ** (1 / 3)


def ww_tilde_basis(params) -> Rank2Spectral:
    """Sphere with the generalized W state at the north pole and the flipped W at the south pole."""
    a, b, c, d, e, f = params
    w = np.zeros(8, dtype=complex)
    wt = np.zeros(8, dtype=complex)
    w[0b001], w[0b010], w[0b100] = a, b, c
    wt[0b110], wt[0b101], wt[0b011] = d, e, f
    return Rank2Spectral(PureState.from_vector(w), PureState.from_vector(wt), 0.5, 0.5)


def random_ww_params(rng: np.random.Generator):
    z = rng.normal(size=6) + 1j * rng.normal(size=6)
    z[:3] /= np.linalg.norm(z[:3])
    z[3:] /= np.linalg.norm(z[3:])
    return tuple(z)


def ww_closed_form(params, rho: DensityMatrix) -> float:
    a, b, c, d, e, f = params
    basis = ww_tilde_basis(params)
    k = abs(a * a * d * d + b * b * e * e + c * c * f * f - 2 * (a * b * d * e + a * c * d * f + b * c * e * f))
    coherence = abs(np.vdot(basis.phi0.amplitudes, rho.matrix @ basis.phi1.amplitudes))
    return float(2 * np.sqrt(k) * coherence)


def _sphere_from_source(family, k, rng, perturb):
    if family == "ww":
        return ww_tilde_basis(random_ww_params(rng))
    spec = draw_params(family, "generic", rng) if family in (3, 5, 6) else FamilySpec(family)
    rho = marginal(spec, k)
    if perturb:
        rho = marginal(spec, k, random_slocc(3, rng, scale=0.2, near_identity=True))
    return spectral_decompose_rank2(rho)


def sample_instances(structure: Structure, count: int, rng: np.random.Generator, perturb: bool = True):
    """``count`` (density matrix, source label) pairs whose sphere has the requested structure."""
    sources = ONE_ROOT_SOURCES if structure is Structure.ONE_ROOT else TWO_ROOT_SOURCES
    choices = [(fam, k) for fam, ks in sources for k in ks]
    out = []
    while len(out) < count:
        fam, k = choices[len(out) % len(choices)]
        basis = _sphere_from_source(fam, k, rng, perturb)
        if root_profile(TANGLE, basis).structure is not structure:
            continue
        rho = density_of_bloch(basis, random_ball_point(rng))
        out.append((rho, f"G{fam}/Tr{k}" if fam != "ww" else "W/flipped-W"))
    return out
