"""Four-qubit generating families, their degenerate subclasses, and the root counts of their marginals.

A subclass constraint is a short string over the parameter names:

``"generic"``
    no constraint.
``"a=+b"``, ``"a=-b=+c"``
    every later name equals the first one times the given sign.
``"c=0"``, ``"a=c=0"``
    every listed name vanishes.

``"±"`` in a constraint is expanded into every sign choice by
:func:`expand_signs`; all expansions must land on the same table entry.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateError, PolyroofError
from .geometry import ROOT_TOL, Structure, root_profile
from .measures import SQRT_TANGLE, TANGLE
from .quantum import (
    DensityMatrix,
    PureState,
    SloccOperator,
    apply_slocc_density,
    partial_trace_pure,
    spectral_decompose_rank2,
)

ARITY = {1: 4, 2: 3, 3: 2, 4: 2, 5: 1, 6: 1, 7: 0, 8: 0, 9: 0}
NAMES = "abcd"
MAG_RANGE = (0.2, 2.0)
MIN_GAP = 0.05
S2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class FamilySpec:
    family: int
    params: tuple = ()
    subclass: tuple = ("generic",)

    def __post_init__(self):
        if self.family not in ARITY:
            raise ValueError(f"family must be 1..9, got {self.family}")
        if len(self.params) != ARITY[self.family]:
            raise ValueError(f"family {self.family} takes {ARITY[self.family]} parameters, got {len(self.params)}")
        object.__setattr__(self, "params", tuple(complex(p) for p in self.params))
        object.__setattr__(self, "subclass", tuple(self.subclass))

    def named(self) -> dict:
        return dict(zip(NAMES, self.params))

    def satisfies(self, tol: float = 0.0) -> bool:
        vals = self.named()
        for con in self.subclass:
            for name, sign, ref in _relations(con):
                target = 0 if ref is None else sign * vals[ref]
                if abs(vals[name] - target) > tol:
                    return False
        return True


def _relations(con: str):
    """(name, sign, reference name or None for zero) for each tied parameter."""
    if con == "generic":
        return []
    parts = con.split("=")
    if parts[-1] == "0":
        return [(p, 1, None) for p in parts[:-1]]
    first = parts[0]
    out = []
    for tok in parts[1:]:
        sign = -1 if tok[0] == "-" else 1
        out.append((tok.lstrip("+-"), sign, first))
    return out


def expand_signs(con: str) -> list:
    n = con.count("±")
    if n == 0:
        return [con]
    out = []
    for signs in itertools.product("+-", repeat=n):
        s = con
        for sg in signs:
            s = s.replace("±", sg, 1)
        out.append(s)
    return out


def _basis_term(bits: str) -> np.ndarray:
    v = np.zeros(16, dtype=np.complex128)
    v[int(bits, 2)] = 1
    return v


def _ket(*pairs) -> np.ndarray:
    return sum(c * _basis_term(b) for c, b in pairs)


def generating_state(spec: FamilySpec) -> PureState:
    mu = spec.family
    a, b, c, d = (list(spec.params) + [0j] * 4)[:4]
    if mu == 1:
        v = _ket(
            ((a + d) / 2, "0000"), ((a + d) / 2, "1111"), ((a - d) / 2, "0011"), ((a - d) / 2, "1100"),
            ((b + c) / 2, "0101"), ((b + c) / 2, "1010"), ((b - c) / 2, "0110"), ((b - c) / 2, "1001"),
        )
    elif mu == 2:
        v = _ket(
            ((a + b) / 2, "0000"), ((a + b) / 2, "1111"), ((a - b) / 2, "0011"), ((a - b) / 2, "1100"),
            (c, "0101"), (c, "1010"), (1, "0110"),
        )
    elif mu == 3:
        v = _ket((a, "0000"), (a, "1111"), (b, "0101"), (b, "1010"), (1, "0110"), (1, "0011"))
    elif mu == 4:
        v = _ket(
            (a, "0000"), (a, "1111"), ((a + b) / 2, "0101"), ((a + b) / 2, "1010"),
            ((a - b) / 2, "0110"), ((a - b) / 2, "1001"),
            (-1j * S2, "0001"), (-1j * S2, "0010"), (1j * S2, "0111"), (1j * S2, "1011"),
        )
    elif mu == 5:
        v = _ket((a, "0000"), (a, "0101"), (a, "1010"), (a, "1111"), (1j, "0001"), (1, "0110"), (-1j, "1011"))
    elif mu == 6:
        v = _ket((a, "0000"), (a, "1111"), (1, "0011"), (1, "0101"), (1, "0110"))
    elif mu == 7:
        v = _ket((1, "0000"), (1, "0101"), (1, "1000"), (1, "1110"))
    elif mu == 8:
        v = _ket((1, "0000"), (1, "1011"), (1, "1101"), (1, "1110"))
    else:
        v = _ket((1, "0000"), (1, "0111"))
    if np.linalg.norm(v) < 1e-14:
        raise ValueError(f"family {mu} with parameters {spec.params} is the zero vector")
    return PureState.from_vector(v)


# ----------------------------------------------------------------- classification

PURE = "pure"
TWO_STAR = "2*"
FAILED = "fail"

_ENTRY = {
    Structure.ONE_ROOT: "1",
    Structure.TWO_ROOT_EQUAL: "2",
    Structure.TWO_ROOT_UNEQUAL: TWO_STAR,
    Structure.THREE_ROOT: "3",
    Structure.FOUR_ROOT: "4",
    # tangle vanishing on the whole range: every point is a root, the table lists it as 4
    Structure.IDENTICALLY_ZERO: "4",
}


def marginal(spec: FamilySpec, traced_qubit: int, L: Optional[SloccOperator] = None) -> DensityMatrix:
    """Tr_k of the generating state, optionally followed by L rho L^dagger (normalized)."""
    rho = partial_trace_pure(generating_state(spec), traced_qubit)
    if L is not None:
        rho = apply_slocc_density(L, rho)
    return rho


def marginal_structure(rho: DensityMatrix, root_tol: float = ROOT_TOL):
    """Structure of the tangle on the marginal's sphere, or None for a pure marginal."""
    if rho.rank() == 1:
        return None
    return root_profile(TANGLE, spectral_decompose_rank2(rho), root_tol=root_tol).structure


def classify_density(rho: DensityMatrix, root_tol: float = ROOT_TOL) -> str:
    try:
        structure = marginal_structure(rho, root_tol)
    except PolyroofError:
        return FAILED
    if structure is None:
        return PURE
    return _ENTRY.get(structure, FAILED)


def classify_marginal(spec: FamilySpec, traced_qubit: int, root_tol: float = ROOT_TOL) -> str:
    """'pure', '1'..'4', '2*', or 'fail' when the marginal could not be analysed."""
    try:
        rho = marginal(spec, traced_qubit)
    except (PolyroofError, ValueError):
        return FAILED
    return classify_density(rho, root_tol)


# ----------------------------------------------------------------- marginal root table

@dataclass(frozen=True)
class TableRow:
    family: int
    label: str
    constraints: tuple
    expected: tuple


def _row(mu, label, constraints, expected):
    if isinstance(expected, str):
        expected = (expected,) * 4
    return TableRow(mu, label, tuple(constraints), tuple(expected))


TABLE_I = (
    _row(1, "generic", ["generic"], "4"),
    _row(1, "a=±b, a=±c, a=±d, b=±c, b=±d, c=±d", ["a=±b", "a=±c", "a=±d", "b=±c", "b=±d", "c=±d"], "2"),
    _row(1, "a=±b=±c, a=±b=±d, a=±c=±d, b=±c=±d", ["a=±b=±c", "a=±b=±d", "a=±c=±d", "b=±c=±d"], "4"),
    _row(2, "generic", ["generic"], "3"),
    _row(2, "a=±b, c=0", ["a=±b", "c=0"], "2"),
    _row(2, "a=±c, b=±c", ["a=±c", "b=±c"], "1"),
    _row(2, "a=±b=±c, a=c=0", ["a=±b=±c", "a=c=0"], "4"),
    _row(2, "a=b=c=0", ["a=b=c=0"], PURE),
    _row(3, "generic", ["generic"], ("3", "2", "3", "2")),
    _row(3, "a=±b", ["a=±b"], ("1", "4", "1", "4")),
    _row(3, "a=0, b=0", ["a=0", "b=0"], "2"),
    _row(3, "a=b=0", ["a=b=0"], (PURE, "4", PURE, "4")),
    _row(4, "generic", ["generic"], TWO_STAR),
    _row(4, "a=±b, a=0, b=0", ["a=±b", "a=0", "b=0"], "1"),
    _row(4, "a=b=0", ["a=b=0"], "4"),
    _row(5, "generic", ["generic"], (TWO_STAR, "1", TWO_STAR, "1")),
    _row(5, "a=0", ["a=0"], ("1", "4", "1", "4")),
    _row(6, "generic", ["generic"], ("3", "2", "2", "2")),
    _row(6, "a=0", ["a=0"], (PURE, "4", "4", "4")),
    _row(7, "generic", ["generic"], ("4", "1", "1", "1")),
    _row(8, "generic", ["generic"], (TWO_STAR, "1", "1", "1")),
    _row(9, "generic", ["generic"], (PURE, "4", "4", "4")),
)


def _draw_free(rng: np.random.Generator) -> complex:
    mag = rng.uniform(*MAG_RANGE)
    phase = rng.uniform(-math.pi / 2, math.pi / 2)
    return mag * complex(math.cos(phase), math.sin(phase))


def draw_params(family: int, constraint: str, rng: np.random.Generator, max_tries: int = 1000) -> FamilySpec:
    """Random parameters obeying ``constraint`` and otherwise away from accidental coincidences.

    Free parameters have nonnegative real part and modulus in MAG_RANGE. A
    parameter tied with a minus sign inherits a negative real part.
    """
    names = NAMES[: ARITY[family]]
    rels = _relations(constraint)
    tied = {name: (sign, ref) for name, sign, ref in rels}
    groups = {}
    for name, sign, ref in rels:
        groups[name] = ref if ref is not None else "0"
        if ref is not None:
            groups[ref] = ref
    for _ in range(max_tries):
        vals = {n: _draw_free(rng) for n in names if n not in tied}
        for n, (sign, ref) in tied.items():
            vals[n] = 0j if ref is None else sign * vals[ref]
        ok = True
        for x, y in itertools.combinations(names, 2):
            if groups.get(x, x) == groups.get(y, y):
                continue
            if abs(vals[x] - vals[y]) < MIN_GAP or abs(vals[x] + vals[y]) < MIN_GAP:
                ok = False
                break
        if ok:
            return FamilySpec(family, tuple(vals[n] for n in names), (constraint,))
    raise DegenerateError(f"could not draw parameters for family {family} under {constraint}")


@dataclass
class CellReport:
    family: int
    label: str
    traced_qubit: int
    expected: str
    observed: str
    votes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.observed == self.expected


def _cell_seed(seed: int, row_index: int, variant: int, k: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, row_index, variant, k])


def reproduce_row(row: TableRow, row_index: int, samples_per_cell: int, seed: int, root_tol: float = ROOT_TOL):
    """One CellReport per traced qubit; the modal entry over every variant and sample."""
    reports = []
    variants = [v for con in row.constraints for v in expand_signs(con)]
    for k in range(1, 5):
        votes = Counter()
        per_variant = {}
        for j, con in enumerate(variants):
            rng = np.random.default_rng(_cell_seed(seed, row_index, j, k))
            local = Counter()
            for _ in range(samples_per_cell):
                spec = draw_params(row.family, con, rng)
                local[classify_marginal(spec, k, root_tol)] += 1
            per_variant[con] = local.most_common(1)[0][0]
            votes.update(local)
        modal = votes.most_common(1)[0][0]
        # every sign/constraint variant must agree, not just the pooled vote
        observed = modal if all(v == modal for v in per_variant.values()) else "mixed"
        reports.append(CellReport(row.family, row.label, k, row.expected[k - 1], observed, dict(per_variant)))
    return reports


def reproduce_table(samples_per_cell: int = 5, seed: int = 0, root_tol: float = ROOT_TOL, threads: int = 1):
    """(all cell reports, True if every cell matches TABLE_I)."""
    if samples_per_cell < 1:
        raise ValueError("samples_per_cell must be at least 1")
    jobs = list(enumerate(TABLE_I))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda j: reproduce_row(j[1], j[0], samples_per_cell, seed, root_tol), jobs))
    else:
        chunks = [reproduce_row(row, i, samples_per_cell, seed, root_tol) for i, row in jobs]
    reports = [r for chunk in chunks for r in chunk]
    return reports, all(r.ok for r in reports)


def table_markdown(reports) -> str:
    lines = ["| Class | Subclass | Tr1 | Tr2 | Tr3 | Tr4 |", "|---|---|---|---|---|---|"]
    rows = {}
    for r in reports:
        rows.setdefault((r.family, r.label), {})[r.traced_qubit] = r
    for (mu, label), cells in rows.items():
        entries = [cells[k].observed for k in range(1, 5)]
        lines.append(f"| G{mu} | {label} | " + " | ".join(entries) + " |")
    diffs = [r for r in reports if not r.ok]
    lines.append("")
    if diffs:
        lines.append("Differences from the reference table:")
        for r in diffs:
            lines.append(f"- G{r.family} [{r.label}] Tr{r.traced_qubit}: expected {r.expected}, got {r.observed} {r.votes}")
        lines.append("")
        lines.append("FAIL")
    else:
        lines.append("PASS")
    return "\n".join(lines)


# ----------------------------------------------------------------- SLOCC scaling

def slocc_scaling_check(spec: FamilySpec, L: SloccOperator, traced_qubit: int, root_tol: float = ROOT_TOL):
    """Both sides of sqrt-tau(L rho L^dag / t) = sqrt-tau(rho) / t with t = Tr(L rho L^dag).

    ``rho`` is the normalized marginal. Each side gets its own root analysis:
    the left on the transformed sphere, the right on the original one.
    """
    from .dispatch import roof_dispatch
    from .errors import StructureError

    rho = marginal(spec, traced_qubit)
    mat, trace = apply_slocc_density(L, rho, normalize=False)
    moved = DensityMatrix.from_matrix(mat)
    allowed = (Structure.ONE_ROOT, Structure.TWO_ROOT_EQUAL)
    for state in (rho, moved):
        s = marginal_structure(state, root_tol)
        if s not in allowed:
            raise StructureError(f"marginal has structure {s}, the scaling check needs one or two roots")
    lhs = roof_dispatch(SQRT_TANGLE, moved).value
    rhs = roof_dispatch(SQRT_TANGLE, rho).value / trace
    return lhs, rhs
