"""Polynomial SLOCC invariants and the pure-state measures kappa * |P_d|^p built on them."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .quantum import PureState, SloccOperator, apply_slocc


def concurrence_invariant(v) -> complex:
    """psi_00 psi_11 - psi_01 psi_10; broadcasts over leading axes."""
    v = np.asarray(v)
    if v.shape[-1] != 4:
        raise ValueError(f"concurrence needs 4 amplitudes, got {v.shape[-1]}")
    return v[..., 0] * v[..., 3] - v[..., 1] * v[..., 2]


def three_tangle_invariant(v) -> complex:
    """Cayley hyperdeterminant of the 2x2x2 amplitude tensor; broadcasts over leading axes."""
    v = np.asarray(v)
    if v.shape[-1] != 8:
        raise ValueError(f"three-tangle needs 8 amplitudes, got {v.shape[-1]}")
    p000, p001, p010, p011, p100, p101, p110, p111 = (v[..., i] for i in range(8))
    d1 = p000**2 * p111**2 + p001**2 * p110**2 + p010**2 * p101**2 + p100**2 * p011**2
    d2 = (
        p000 * p111 * p001 * p110
        + p000 * p111 * p010 * p101
        + p000 * p111 * p100 * p011
        + p001 * p110 * p010 * p101
        + p001 * p110 * p011 * p100
        + p100 * p011 * p010 * p101
    )
    d3 = p000 * p011 * p101 * p110 + p111 * p100 * p010 * p001
    return d1 - 2 * d2 + 4 * d3


@dataclass(frozen=True)
class PolynomialMeasure:
    """Pure-state measure E = kappa * |P_d|^p for a degree-d homogeneous invariant P_d.

    ``invariant`` must accept an unnormalized amplitude vector (and, for the
    built-ins, a stack of them along the leading axes) and return P_d itself,
    not its modulus.
    """

    name: str
    degree_d: int
    power_p: Fraction
    prefactor_kappa: float
    invariant: Callable
    n_qubits: int

    def __post_init__(self):
        object.__setattr__(self, "power_p", Fraction(self.power_p).limit_denominator(1000))
        if self.degree_d < 1 or self.power_p <= 0 or self.prefactor_kappa <= 0:
            raise ValueError("degree, power and prefactor must be positive")
        if self.degree_d * self.power_p > 4:
            warnings.warn(
                f"{self.name}: d*p = {self.degree_d * self.power_p} > 4, "
                "not guaranteed to be an entanglement monotone",
                stacklevel=2,
            )

    @property
    def p(self) -> float:
        return float(self.power_p)

    @property
    def homogeneous_degree(self) -> float:
        """d * p, the scaling degree of the measure in the amplitudes."""
        return self.degree_d * self.p

    @property
    def arity(self) -> int:
        return 2**self.n_qubits

    def of_vector(self, v) -> np.ndarray:
        """kappa |P(v)|^p for unnormalized vectors (homogeneous of degree d*p)."""
        return self.prefactor_kappa * np.abs(self.invariant(v)) ** self.p

    def adjusted_normalization(self, N: float) -> float:
        """Map N for kappa|P| (power one) onto the constant for kappa|P|^p."""
        return self.prefactor_kappa * (N / self.prefactor_kappa) ** self.p


CONCURRENCE = PolynomialMeasure("concurrence", 2, Fraction(1), 2.0, concurrence_invariant, 2)
TANGLE = PolynomialMeasure("tangle", 4, Fraction(1), 4.0, three_tangle_invariant, 3)
SQRT_TANGLE = PolynomialMeasure("sqrt-tangle", 4, Fraction(1, 2), 2.0, three_tangle_invariant, 3)

_REGISTRY = {m.name: m for m in (CONCURRENCE, TANGLE, SQRT_TANGLE)}


def register_measure(m: PolynomialMeasure) -> None:
    _REGISTRY[m.name] = m


def get_measure(name: str) -> PolynomialMeasure:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown measure {name!r}; known: {sorted(_REGISTRY)}") from None


def eval_measure(m: PolynomialMeasure, psi: PureState) -> float:
    if psi.amplitudes.shape[0] != m.arity:
        raise ValueError(f"{m.name} acts on {m.n_qubits} qubits, state has {psi.n_qubits}")
    return float(m.of_vector(psi.amplitudes))


def slocc_covariance_check(m: PolynomialMeasure, L: SloccOperator, psi: PureState):
    """Both sides of E(L psi / |L psi|) = E(psi) / |L psi|^(d p)."""
    raw = apply_slocc(L, psi, normalize=False)
    nrm = raw.norm()
    lhs = eval_measure(m, raw.normalized())
    rhs = eval_measure(m, psi) / nrm ** m.homogeneous_degree
    return lhs, rhs
