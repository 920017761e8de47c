"""Bloch-sphere picture of a rank-2 range.

Pure states in the range are |omega> ~ phi0 + omega * phi1 with omega in the
extended complex plane (phi1 sits at omega = infinity). A degree-d measure
restricted to the range is a degree-d polynomial in omega, and its modulus
equals N times the product of chordal distances to the polynomial's roots.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateError, RangeError
from .measures import PolynomialMeasure
from .quantum import DensityMatrix, PureState, Rank2Spectral, spectral_decompose_rank2

INF = complex(math.inf, 0.0)

ROOT_TOL = 1e-6
LEAD_TOL = 1e-10
ABS_TOL = 1e-12
REFINE_REACH = 1e-7


def is_inf(w) -> bool:
    return cmath.isinf(w)


class Structure(str, enum.Enum):
    IDENTICALLY_ZERO = "identically-zero"
    ONE_ROOT = "one-root"
    TWO_ROOT_EQUAL = "two-root"
    TWO_ROOT_UNEQUAL = "two-root-unequal"
    THREE_ROOT = "three-root"
    FOUR_ROOT = "four-root"
    MANY_ROOT = "many-root"


@dataclass(frozen=True)
class GeometrySummary:
    h: Optional[float] = None
    R: Optional[float] = None
    s: Optional[float] = None
    h_c: Optional[float] = None

    def as_dict(self) -> dict:
        return {"h": self.h, "R": self.R, "s": self.s, "h_c": self.h_c}


@dataclass(frozen=True, eq=False)
class RootProfile:
    roots: tuple  # ((omega, multiplicity), ...)
    structure: Structure
    normalization_N: float
    sphere: Rank2Spectral
    degree: int

    @property
    def multiplicities(self) -> list:
        return [m for _, m in self.roots]

    def root_blochs(self) -> np.ndarray:
        return np.array([bloch_of_omega(w) for w, _ in self.roots]).reshape(-1, 3)

    def distance_product(self, bloch: np.ndarray) -> np.ndarray:
        """prod_i |b - z_i|^mult_i for one point or a stack of points."""
        bloch = np.asarray(bloch, dtype=float)
        out = np.ones(bloch.shape[:-1])
        for z, mult in zip(self.root_blochs(), self.multiplicities):
            out = out * np.linalg.norm(bloch - z, axis=-1) ** mult
        return out


# --------------------------------------------------------------- coordinates

def omega_state(basis: Rank2Spectral, w) -> PureState:
    if is_inf(w):
        return basis.phi1
    vec = basis.phi0.amplitudes + w * basis.phi1.amplitudes
    return PureState(basis.n_qubits, vec / math.sqrt(1 + abs(w) ** 2))


def bloch_of_omega(w) -> np.ndarray:
    if is_inf(w):
        return np.array([0.0, 0.0, -1.0])
    r2 = abs(w) ** 2
    return np.array([2 * w.real, 2 * w.imag, 1 - r2]) / (1 + r2)


def omega_of_bloch(b) -> complex:
    x, y, z = (float(c) for c in b)
    if 1 + z < 1e-15:
        return INF
    return complex(x, y) / (1 + z)


def spinor_of_bloch(b) -> np.ndarray:
    """(alpha, beta) with |alpha|^2 + |beta|^2 = 1 for a point on the unit sphere."""
    b = np.asarray(b, dtype=float)
    b = b / np.linalg.norm(b)
    theta = math.acos(max(-1.0, min(1.0, b[2])))
    phi = math.atan2(b[1], b[0])
    return np.array([math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2)])


def state_of_bloch(basis: Rank2Spectral, b) -> PureState:
    alpha, beta = spinor_of_bloch(b)
    return PureState(basis.n_qubits, alpha * basis.phi0.amplitudes + beta * basis.phi1.amplitudes)


def range_block(basis: Rank2Spectral, rho: DensityMatrix) -> np.ndarray:
    """M_ij = <phi_i|rho|phi_j>; raises RangeError if rho has weight outside the span."""
    f = basis.frame
    m = f.conj().T @ rho.matrix @ f
    if np.linalg.norm(rho.matrix - f @ m @ f.conj().T) > 1e-9:
        raise RangeError("state is not supported on the two-dimensional range")
    return m


def bloch_of_block(m: np.ndarray) -> np.ndarray:
    return np.array([2 * m[1, 0].real, 2 * m[1, 0].imag, (m[0, 0] - m[1, 1]).real])


def bloch_of_density(basis: Rank2Spectral, rho: DensityMatrix) -> np.ndarray:
    return bloch_of_block(range_block(basis, rho))


def density_of_bloch(basis: Rank2Spectral, b) -> DensityMatrix:
    x, y, z = b
    m = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
    f = basis.frame
    return DensityMatrix.from_matrix(f @ m @ f.conj().T)


def chordal_distance(a, b) -> float:
    if is_inf(a) and is_inf(b):
        return 0.0
    if is_inf(a):
        a, b = b, a
    if is_inf(b):
        return 2 / math.sqrt(1 + abs(a) ** 2)
    return 2 * abs(a - b) / (math.sqrt(1 + abs(a) ** 2) * math.sqrt(1 + abs(b) ** 2))


def fibonacci_sphere(count: int) -> np.ndarray:
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    r = np.sqrt(1 - z**2)
    phi = np.pi * (3 - np.sqrt(5)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


# --------------------------------------------------------------- polynomials

def polynomial_coefficients(m: PolynomialMeasure, basis: Rank2Spectral) -> np.ndarray:
    """c_0..c_d with P(phi0 + w phi1) = sum_k c_k w^k.

    Evaluates P at the (d+1)-st roots of unity and inverts the DFT, which is
    exact for a polynomial of degree d.
    """
    if basis.phi0.amplitudes.shape[0] != m.arity:
        raise ValueError(f"{m.name} acts on {m.n_qubits} qubits, basis has {basis.n_qubits}")
    n = m.degree_d + 1
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    vecs = basis.phi0.amplitudes[None, :] + nodes[:, None] * basis.phi1.amplitudes[None, :]
    vals = np.array([m.invariant(v) for v in vecs], dtype=np.complex128)
    return np.fft.fft(vals) / n


def eval_poly(coeffs, w) -> complex:
    """Evaluate sum_k c_k w^k at finite w."""
    return np.polyval(np.asarray(coeffs)[::-1], w)


def eval_homogeneous(coeffs, alpha, beta):
    """F(alpha, beta) = sum_k c_k alpha^(d-k) beta^k."""
    coeffs = np.asarray(coeffs)
    d = coeffs.shape[0] - 1
    k = np.arange(d + 1)
    alpha = np.asarray(alpha)[..., None]
    beta = np.asarray(beta)[..., None]
    return np.sum(coeffs * alpha ** (d - k) * beta**k, axis=-1)


def polynomial_from_roots(roots: Sequence, degree: int, lead: complex = 1.0) -> np.ndarray:
    """Ascending coefficients of lead * prod (w - z) over finite roots, padded to ``degree``.

    Roots at infinity (or missing multiplicity) lower the actual degree.
    """
    finite = []
    for w, mult in roots:
        if not is_inf(w):
            finite.extend([w] * mult)
    asc = lead * np.poly(finite)[::-1] if finite else np.array([lead], dtype=complex)
    out = np.zeros(degree + 1, dtype=np.complex128)
    out[: asc.shape[0]] = asc
    return out


def _newton(desc: np.ndarray, w: complex, iters: int = 30) -> complex:
    der = np.polyder(desc)
    for _ in range(iters):
        f = np.polyval(desc, w)
        g = np.polyval(der, w)
        if g == 0:
            break
        step = f / g
        w = w - step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            break
    return w


def _refine_cluster(desc: np.ndarray, members: list, mult: int) -> complex:
    """A root of multiplicity m is a simple root of the (m-1)-th derivative.

    Rounding splits an m-fold root into a tight cluster whose centre can sit
    well off the true root, so Newton is allowed to move somewhat beyond the
    cluster spread; other critical points are at least ``REFINE_REACH`` away.
    """
    guess = complex(np.mean(members))
    target = desc
    for _ in range(mult - 1):
        target = np.polyder(target)
    if target.shape[0] < 2:
        return guess
    spread = max((abs(z - guess) for z in members), default=0.0)
    w = _newton(target, guess)
    if not np.isfinite(w) or abs(w - guess) > 10 * spread + REFINE_REACH * max(1.0, abs(guess)):
        return guess
    return w


def _chart_chordal(a: complex, b: complex) -> float:
    return 2 * abs(a - b) / (math.sqrt(1 + abs(a) ** 2) * math.sqrt(1 + abs(b) ** 2))


def _linkage_levels(points: list):
    """Single-linkage partitions from finest to coarsest, with the merge distance of each."""
    k = len(points)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def partition():
        groups = {}
        for i in range(k):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    edges = sorted(
        (_chart_chordal(points[i], points[j]), i, j) for i in range(k) for j in range(i + 1, k)
    )
    levels = [(0.0, partition())]
    for dist, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            levels.append((dist, partition()))
    return levels


def _cluster(desc: np.ndarray, raw: list, root_tol: float):
    """Group numerically split multiple roots.

    A partition is acceptable if its merge distance is below ``root_tol`` or if
    the polynomial rebuilt from the merged roots reproduces the coefficients to
    within ``root_tol**2`` (the size of the residual left by merging two distinct
    roots a chordal distance ~root_tol apart). The coarsest acceptable one wins.

    When the coefficients carry heavy cancellation the unmerged roots themselves
    miss the coefficients by more than ``root_tol**2``. A merge that does no worse
    than ten times that floor is then indistinguishable from the raw split.
    """
    scale = np.linalg.norm(desc)
    best, floor = None, None
    for dist, groups in _linkage_levels(raw):
        clusters = []
        for g in groups:
            members = [raw[i] for i in g]
            clusters.append((_refine_cluster(desc, members, len(g)), len(g)))
        rebuilt = desc[0] * np.poly([c for c, mult in clusters for _ in range(mult)])
        residual = np.linalg.norm(rebuilt - desc) / scale
        if floor is None:
            floor = residual
        if dist <= root_tol or residual < max(root_tol**2, 10 * floor):
            if best is None or len(clusters) <= len(best):
                best = clusters
    return best


def find_roots(coeffs, root_tol: float = ROOT_TOL, lead_tol: float = LEAD_TOL, abs_tol: float = ABS_TOL):
    """Roots in the extended plane of sum_k c_k w^k, counted as a degree-d form.

    Returns a list of (omega, multiplicity) with multiplicities summing to d,
    or an empty list if the polynomial vanishes identically. Missing leading
    coefficients show up as a root at infinity.

    Internally the sphere is rotated so that the new pole sits where |P| is
    largest on a coarse grid; in that chart every root is finite and away from
    the pole, so companion-matrix eigenvalues are well conditioned. Rotations
    preserve chordal distances, so clustering is unaffected.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    d = coeffs.shape[0] - 1
    if d < 1 or np.max(np.abs(coeffs)) < abs_tol:
        return []
    grid = np.array([spinor_of_bloch(b) for b in fibonacci_sphere(64)])
    vals = np.abs(eval_homogeneous(coeffs, grid[:, 0], grid[:, 1]))
    a1, b1 = grid[int(np.argmax(vals))]
    a0, b0 = -np.conj(b1), np.conj(a1)

    n = d + 1
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    chart_vals = eval_homogeneous(coeffs, a0 + nodes * a1, b0 + nodes * b1)
    desc = (np.fft.fft(chart_vals) / n)[::-1]

    raw = [_newton(desc, complex(w)) for w in np.roots(desc)]
    clusters = _cluster(desc, raw, root_tol)

    finite = []
    at_infinity = 0
    for w, mult in clusters:
        alpha = a0 + w * a1
        beta = b0 + w * b1
        if 2 * abs(alpha) / math.hypot(abs(alpha), abs(beta)) < lead_tol:
            at_infinity += mult
        else:
            finite.append((complex(beta / alpha), mult))
    finite.sort(key=lambda r: (-r[1], abs(r[0]), cmath.phase(r[0])))
    roots = finite + ([(INF, at_infinity)] if at_infinity else [])
    return roots


def classify_structure(roots) -> Structure:
    if not roots:
        return Structure.IDENTICALLY_ZERO
    k = len(roots)
    if k == 1:
        return Structure.ONE_ROOT
    if k == 2:
        return Structure.TWO_ROOT_EQUAL if roots[0][1] == roots[1][1] else Structure.TWO_ROOT_UNEQUAL
    return {3: Structure.THREE_ROOT, 4: Structure.FOUR_ROOT}.get(k, Structure.MANY_ROOT)


def _product_of_distances(roots, points: np.ndarray) -> np.ndarray:
    out = np.ones(points.shape[0])
    for w, mult in roots:
        out *= np.linalg.norm(points - bloch_of_omega(w), axis=1) ** mult
    return out


def normalization_constant(m: PolynomialMeasure, basis: Rank2Spectral, roots) -> float:
    """N with kappa |P(|omega>)| = N prod_i |omega - z_i|^mult_i on the whole sphere.

    Evaluated where the distance product is largest on a coarse grid, then
    checked at further random points.
    """
    if not roots:
        raise DegenerateError("no normalization constant for an identically vanishing measure")
    probes = fibonacci_sphere(200)
    prods = _product_of_distances(roots, probes)
    k = int(np.argmax(prods))
    if prods[k] <= 1e-12:
        raise DegenerateError("distance product vanishes on every probe")
    value = m.prefactor_kappa * abs(m.invariant(state_of_bloch(basis, probes[k]).amplitudes))
    N = value / prods[k]

    rng = np.random.default_rng(0)
    checks = rng.normal(size=(10, 3))
    checks /= np.linalg.norm(checks, axis=1, keepdims=True)
    expected = N * _product_of_distances(roots, checks)
    for b, e in zip(checks, expected):
        got = m.prefactor_kappa * abs(m.invariant(state_of_bloch(basis, b).amplitudes))
        if abs(got - e) > 1e-8 * max(got, e, 1e-3 * value):
            raise DegenerateError(
                f"distance-product identity fails at probe {b}: {got} vs {e}; roots are inconsistent"
            )
    return float(N)


def root_profile(
    m: PolynomialMeasure,
    basis: Rank2Spectral,
    root_tol: float = ROOT_TOL,
    lead_tol: float = LEAD_TOL,
) -> RootProfile:
    coeffs = polynomial_coefficients(m, basis)
    roots = find_roots(coeffs, root_tol=root_tol, lead_tol=lead_tol)
    structure = classify_structure(roots)
    N = 0.0 if structure is Structure.IDENTICALLY_ZERO else normalization_constant(m, basis, roots)
    return RootProfile(tuple(roots), structure, N, basis, m.degree_d)


def profile_of_density(m: PolynomialMeasure, rho: DensityMatrix, **kw) -> RootProfile:
    return root_profile(m, spectral_decompose_rank2(rho), **kw)
