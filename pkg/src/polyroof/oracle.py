"""Ground truth that does not lean on the sphere geometry.

Two providers live here. ``wootters_concurrence`` is the spin-flip formula for
two qubits. ``brute_force_roof`` minimizes the ensemble average directly over
purification isometries with a multistart simplex search. Neither touches the
root finder or the closed forms, so they can be used to test both.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._simplex import nelder_mead
from .errors import RankError
from .measures import PolynomialMeasure, eval_measure
from .quantum import DensityMatrix, PureState, Rank2Spectral, RANK_TOL

MAX_EVALS = 20000
XTOL = 1e-10
INIT_STEP = 0.25
ISOMETRY_TOL = 1e-10
WOOTTERS_SUPPORT_TOL = 1e-13

_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Spin-flip concurrence, computed on the support of rho.

    The values mu_i are the singular values of V^T (sigma_y x sigma_y) V with
    V the eigenvectors scaled by sqrt(lambda), which equals the usual square
    roots of the eigenvalues of rho rho~ but never takes the square root of a
    rounding-level eigenvalue.
    """
    if rho.matrix.shape != (4, 4):
        raise ValueError(f"Wootters formula needs a two-qubit state, got dimension {rho.matrix.shape[0]}")
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > WOOTTERS_SUPPORT_TOL * w[-1]
    V = v[:, keep] * np.sqrt(w[keep])
    mu = np.zeros(4)
    sv = np.linalg.svd(V.T @ _SIGMA_YY @ V, compute_uv=False)
    mu[: sv.shape[0]] = sv
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


@dataclass(frozen=True, eq=False)
class DecompositionEnsemble:
    members: tuple  # ((weight, PureState), ...)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.members])

    def matrix(self) -> np.ndarray:
        return sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in self.members)

    def average(self, m: PolynomialMeasure, exact: bool = False) -> float:
        if exact:
            return float(sum(w * exact_measure(m, s.amplitudes) for w, s in self.members))
        return float(sum(w * eval_measure(m, s) for w, s in self.members))


def _orthonormalize(V: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the two columns, in the same order as the compiled objective."""
    v0 = V[:, 0] / np.linalg.norm(V[:, 0])
    v1 = V[:, 1] - np.vdot(v0, V[:, 1]) * v0
    v1 = v1 - np.vdot(v0, v1) * v0
    return np.stack([v0, v1 / np.linalg.norm(v1)], axis=1)


def ensemble_from_isometry(basis: Rank2Spectral, V) -> DecompositionEnsemble:
    V = np.asarray(V, dtype=np.complex128)
    if V.ndim != 2 or V.shape[1] != 2:
        raise ValueError(f"isometry must be m x 2, got shape {V.shape}")
    if np.max(np.abs(V.conj().T @ V - np.eye(2))) > ISOMETRY_TOL:
        raise ValueError("V does not have orthonormal columns")
    sqrt_lam = np.sqrt([basis.lambda0, basis.lambda1])
    unnormalized = (V * sqrt_lam) @ basis.frame.T
    members = []
    for vec in unnormalized:
        w = float(np.vdot(vec, vec).real)
        if w > 1e-15:
            members.append((w, PureState(basis.n_qubits, vec / np.sqrt(w))))
    total = sum(w for w, _ in members)
    return DecompositionEnsemble(tuple((w / total, s) for w, s in members))


def binary_form(m: PolynomialMeasure, basis: Rank2Spectral) -> np.ndarray:
    """Coefficients c_k with P(a phi0 + b phi1) = sum_k c_k a^(d-k) b^k.

    Fitted by least squares through P(phi0 + t phi1) at scattered t, which is
    exact for a degree-d polynomial and shares no code with the root finder.
    """
    d = m.degree_d
    count = 3 * (d + 1)
    t = 0.9 * np.exp(2j * np.pi * (np.arange(count) + 0.37) / count) * (1 + 0.2 * np.cos(np.arange(count)))
    vecs = basis.phi0.amplitudes[None, :] + t[:, None] * basis.phi1.amplitudes[None, :]
    vals = m.invariant(vecs)
    vander = t[:, None] ** np.arange(d + 1)[None, :]
    coeffs, *_ = np.linalg.lstsq(vander, vals, rcond=None)
    return coeffs.astype(np.complex128)


class _Exact:
    """Complex number with Fraction parts; enough arithmetic for polynomial invariants."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=Fraction(0)):
        self.re, self.im = re, im

    @staticmethod
    def of(o) -> "_Exact":
        if isinstance(o, np.ndarray):
            o = o.item()
        if isinstance(o, _Exact):
            return o
        if isinstance(o, (int, Fraction)):
            return _Exact(Fraction(o))
        o = complex(o)
        return _Exact(Fraction(o.real), Fraction(o.imag))

    def __add__(self, o):
        o = _Exact.of(o)
        return _Exact(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _Exact.of(o)
        return _Exact(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _Exact.of(o) - self

    def __neg__(self):
        return _Exact(-self.re, -self.im)

    def __mul__(self, o):
        o = _Exact.of(o)
        return _Exact(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = _Exact(Fraction(1))
        for _ in range(int(n)):
            out = out * self
        return out


def exact_measure(m: PolynomialMeasure, amplitudes) -> float:
    """kappa |P|^p with P evaluated in exact rational arithmetic on the given doubles.

    Near a multiple root the double-precision value of P is pure rounding noise
    (about 1e-16 absolute), which a fractional power inflates to 1e-8. Falls back
    to floating point for invariants that need numpy ufuncs.
    """
    vec = np.empty(len(amplitudes), dtype=object)
    for i, z in enumerate(np.asarray(amplitudes, dtype=np.complex128)):
        vec[i] = _Exact.of(z)
    try:
        P = _Exact.of(m.invariant(vec))
    except (TypeError, AttributeError):
        return float(m.of_vector(np.asarray(amplitudes)))
    modulus_sq = float(P.re * P.re + P.im * P.im)
    return float(m.prefactor_kappa * modulus_sq ** (m.p / 2))


def _unpack(x: np.ndarray, size: int) -> np.ndarray:
    return (x[: 2 * size] + 1j * x[2 * size :]).reshape(size, 2)


def _pack(V: np.ndarray) -> np.ndarray:
    flat = V.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def _one_restart(seed_seq, size, coeffs, sqrt_lam, kappa, p, dp):
    rng = np.random.default_rng(seed_seq)
    V = _orthonormalize(rng.standard_normal((size, 2)) + 1j * rng.standard_normal((size, 2)))
    x, val, evals = nelder_mead(_pack(V), INIT_STEP, coeffs, sqrt_lam, kappa, p, dp, size, MAX_EVALS, XTOL)
    return x, float(val), int(evals)


def brute_force_roof(
    m: PolynomialMeasure,
    rho: DensityMatrix,
    ensemble_size: int = 4,
    restarts: int = 64,
    seed: int = 0,
    threads: int = 1,
):
    """Best ensemble average over ``restarts`` simplex searches.

    Returns (value, DecompositionEnsemble, total objective evaluations). Each
    restart's final ensemble is scored with :func:`exact_measure`, so the value
    is a true upper bound on the roof rather than a rounding artefact. Restart
    i always uses the i-th child of SeedSequence(seed), so adding restarts can
    only lower the value and the result does not depend on ``threads``.
    """
    if ensemble_size < 2:
        raise ValueError("ensemble_size must be at least 2")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    w, v = np.linalg.eigh(rho.matrix)
    w, v = w[::-1], v[:, ::-1]
    rank = int(np.sum(w > RANK_TOL * w[0]))
    if rank > 2:
        raise RankError(f"the oracle handles rank <= 2, found rank {rank}")
    if rank == 1:
        psi = PureState.from_vector(v[:, 0])
        return eval_measure(m, psi), DecompositionEnsemble(((1.0, psi),)), 0

    lam = w[:2] / w[:2].sum()
    basis = Rank2Spectral(
        PureState(rho.n_qubits, v[:, 0]), PureState(rho.n_qubits, v[:, 1]), float(lam[0]), float(lam[1])
    )
    coeffs = binary_form(m, basis)
    args = (ensemble_size, coeffs, np.sqrt(lam), float(m.prefactor_kappa), m.p, m.homogeneous_degree)
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(lambda s: _one_restart(s, *args), seeds))
    else:
        runs = [_one_restart(s, *args) for s in seeds]

    scored = []
    for x, _, _ in runs:
        ensemble = ensemble_from_isometry(basis, _orthonormalize(_unpack(x, ensemble_size)))
        scored.append((ensemble.average(m, exact=True), ensemble))
    best = min(range(restarts), key=lambda i: (scored[i][0], i))
    value, ensemble = scored[best]
    return value, ensemble, sum(r[2] for r in runs)
