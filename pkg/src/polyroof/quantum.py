"""Dense few-qubit states, partial traces, rank-2 spectra and local SL(2,C) operators.

Qubit 1 is the most significant bit of the computational-basis index, so the
amplitude of |i j k> sits at index 4i + 2j + k.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import RankError

RANK_TOL = 1e-9


def _n_qubits_of(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if n < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.shape[0] != 2**self.n_qubits:
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got {amp.shape[0]}")
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_vector(cls, vec, normalize: bool = True) -> "PureState":
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        if normalize:
            nrm = np.linalg.norm(vec)
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            vec = vec / nrm
        return cls(_n_qubits_of(vec.shape[0]), vec)

    @classmethod
    def basis(cls, bits: str) -> "PureState":
        vec = np.zeros(2 ** len(bits), dtype=np.complex128)
        vec[int(bits, 2)] = 1
        return cls(len(bits), vec)

    def normalized(self) -> "PureState":
        return PureState.from_vector(self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        dim = 2**self.n_qubits
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat) - 1) > 1e-12:
            raise ValueError(f"density matrix has trace {np.trace(mat).real}, expected 1")
        if np.linalg.eigvalsh(mat)[0] < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_matrix(cls, mat, normalize: bool = True) -> "DensityMatrix":
        """Symmetrize and (optionally) trace-normalize before validation."""
        mat = np.asarray(mat, dtype=np.complex128)
        mat = (mat + mat.conj().T) / 2
        if normalize:
            mat = mat / np.trace(mat).real
        return cls(_n_qubits_of(mat.shape[0]), mat)

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        mat = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(weights, states))
        return cls.from_matrix(mat)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in decreasing order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def rank(self, tol: float = RANK_TOL) -> int:
        ev = self.eigenvalues()
        return int(np.sum(ev > tol * ev[0]))


@dataclass(frozen=True, eq=False)
class Rank2Spectral:
    phi0: PureState
    phi1: PureState
    lambda0: float
    lambda1: float

    @property
    def n_qubits(self) -> int:
        return self.phi0.n_qubits

    @property
    def frame(self) -> np.ndarray:
        """Columns phi0, phi1 as a (2^n, 2) matrix."""
        return np.stack([self.phi0.amplitudes, self.phi1.amplitudes], axis=1)

    def reconstruct(self) -> np.ndarray:
        f = self.frame
        return (f * np.array([self.lambda0, self.lambda1])) @ f.conj().T


@dataclass(frozen=True, eq=False)
class SloccOperator:
    factors: tuple

    def __post_init__(self):
        facs = tuple(np.array(a, dtype=np.complex128).reshape(2, 2) for a in self.factors)
        for a in facs:
            if abs(np.linalg.det(a) - 1) > 1e-10:
                raise ValueError(f"SLOCC factor has determinant {np.linalg.det(a)}, expected 1")
        object.__setattr__(self, "factors", facs)

    @classmethod
    def from_invertible(cls, factors) -> "SloccOperator":
        """Rescale each invertible 2x2 factor onto SL(2,C)."""
        out = []
        for a in factors:
            a = np.asarray(a, dtype=np.complex128)
            out.append(a / np.sqrt(np.linalg.det(a)))
        return cls(tuple(out))

    @classmethod
    def identity(cls, n: int) -> "SloccOperator":
        return cls(tuple(np.eye(2) for _ in range(n)))

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    def dense(self) -> np.ndarray:
        return reduce(np.kron, self.factors)


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(vec)))
    if vec[k] == 0:
        return vec
    return vec * (abs(vec[k]) / vec[k])


def tensor_product(a: PureState, b: PureState) -> PureState:
    return PureState(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def partial_trace(rho: DensityMatrix, traced_qubit: int) -> DensityMatrix:
    """Trace out qubit ``traced_qubit`` (1-based, qubit 1 most significant)."""
    n = rho.n_qubits
    if not 1 <= traced_qubit <= n or n < 2:
        raise IndexError(f"cannot trace qubit {traced_qubit} of a {n}-qubit state")
    left = 2 ** (traced_qubit - 1)
    right = 2 ** (n - traced_qubit)
    t = rho.matrix.reshape(left, 2, right, left, 2, right)
    red = np.einsum("aibcid->abcd", t).reshape(left * right, left * right)
    return DensityMatrix.from_matrix(red, normalize=False)


def partial_trace_pure(psi: PureState, traced_qubit: int) -> DensityMatrix:
    """Marginal of a pure state, computed without forming the full projector."""
    n = psi.n_qubits
    if not 1 <= traced_qubit <= n or n < 2:
        raise IndexError(f"cannot trace qubit {traced_qubit} of a {n}-qubit state")
    t = np.moveaxis(psi.amplitudes.reshape((2,) * n), traced_qubit - 1, 0).reshape(2, -1)
    return DensityMatrix.from_matrix(t.T @ t.conj(), normalize=False)


def spectral_decompose_rank2(rho: DensityMatrix, rank_tol: float = RANK_TOL) -> Rank2Spectral:
    """Eigenpairs of a numerically rank-2 density matrix, with lambda0 >= lambda1."""
    w, v = np.linalg.eigh(rho.matrix)
    w, v = w[::-1], v[:, ::-1]
    rank = int(np.sum(w > rank_tol * w[0]))
    if rank != 2:
        raise RankError(f"expected numerical rank 2, found {rank}")
    lam = w[:2] / w[:2].sum()
    phi0 = PureState(rho.n_qubits, fix_phase(v[:, 0]))
    phi1 = PureState(rho.n_qubits, fix_phase(v[:, 1]))
    return Rank2Spectral(phi0, phi1, float(lam[0]), float(lam[1]))


def _apply_factors(factors, vec: np.ndarray) -> np.ndarray:
    n = len(factors)
    t = vec.reshape((2,) * n)
    for k, a in enumerate(factors):
        t = np.moveaxis(np.tensordot(a, t, axes=([1], [k])), 0, k)
    return t.reshape(-1)


def apply_slocc(L: SloccOperator, psi: PureState, normalize: bool = True) -> PureState:
    """Return L|psi>, normalized unless ``normalize`` is False."""
    if L.n_qubits != psi.n_qubits:
        raise ValueError(f"operator acts on {L.n_qubits} qubits, state has {psi.n_qubits}")
    out = _apply_factors(L.factors, psi.amplitudes)
    if normalize:
        return PureState.from_vector(out)
    return PureState(psi.n_qubits, out)


def apply_slocc_density(L: SloccOperator, rho: DensityMatrix, normalize: bool = True):
    """L rho L^dagger. With ``normalize=False`` returns (unnormalized matrix, trace)."""
    if L.n_qubits != rho.n_qubits:
        raise ValueError(f"operator acts on {L.n_qubits} qubits, state has {rho.n_qubits}")
    big = L.dense()
    mat = big @ rho.matrix @ big.conj().T
    if normalize:
        return DensityMatrix.from_matrix(mat)
    return mat, float(np.trace(mat).real)


# ----------------------------------------------------------------- named states

def ghz(n: int = 3) -> PureState:
    vec = np.zeros(2**n, dtype=np.complex128)
    vec[0] = vec[-1] = 1
    return PureState.from_vector(vec)


def w_state(n: int = 3) -> PureState:
    vec = np.zeros(2**n, dtype=np.complex128)
    for k in range(n):
        vec[1 << k] = 1
    return PureState.from_vector(vec)


def random_state(n: int, rng: np.random.Generator) -> PureState:
    dim = 2**n
    return PureState.from_vector(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_rank2(n: int, rng: np.random.Generator, weights=None) -> DensityMatrix:
    """Mixture of two random orthonormal vectors; weights drawn uniformly if not given."""
    dim = 2**n
    q, _ = np.linalg.qr(rng.normal(size=(dim, 2)) + 1j * rng.normal(size=(dim, 2)))
    if weights is None:
        lam = rng.uniform(0.05, 0.95)
        weights = (lam, 1 - lam)
    return DensityMatrix.from_matrix((q * np.asarray(weights)) @ q.conj().T)


def random_sl2(rng: np.random.Generator, scale: float = 1.0, near_identity: bool = False) -> np.ndarray:
    a = scale * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    if near_identity:
        a = np.eye(2) + a
    return a / np.sqrt(np.linalg.det(a))


def random_slocc(n: int, rng: np.random.Generator, scale: float = 1.0, near_identity: bool = False) -> SloccOperator:
    return SloccOperator(tuple(random_sl2(rng, scale, near_identity) for _ in range(n)))
