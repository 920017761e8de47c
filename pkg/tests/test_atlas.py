import numpy as np
import pytest

from polyroof.atlas import (
    ARITY,
    FAILED,
    PURE,
    TABLE_I,
    TWO_STAR,
    FamilySpec,
    classify_density,
    classify_marginal,
    draw_params,
    expand_signs,
    generating_state,
    marginal,
    reproduce_row,
    slocc_scaling_check,
    table_markdown,
)
from polyroof.errors import StructureError
from polyroof.quantum import SloccOperator, apply_slocc_density, random_slocc


def kets(psi):
    return {format(i, "04b"): z for i, z in enumerate(psi.amplitudes) if abs(z) > 1e-12}


def test_family_arity_and_constraints(rng):
    with pytest.raises(ValueError):
        FamilySpec(2, (1, 2))
    with pytest.raises(ValueError):
        FamilySpec(10)
    for family, arity in ARITY.items():
        assert len(generating_state(draw_params(family, "generic", rng)).amplitudes) == 16
        assert len(draw_params(family, "generic", rng).params) == arity


@pytest.mark.parametrize("con", ["a=+b", "a=-b", "a=+b=-c", "a=c=0", "b=0"])
def test_draws_satisfy_constraints_exactly(rng, con):
    spec = draw_params(2, con, rng)
    assert spec.satisfies(tol=0.0)
    for z in spec.params:
        assert z == 0 or 0.2 <= abs(z) <= 2


def test_expand_signs():
    assert expand_signs("a=±b=±c") == ["a=+b=+c", "a=+b=-c", "a=-b=+c", "a=-b=-c"]
    assert expand_signs("c=0") == ["c=0"]


def test_generating_state_examples():
    assert kets(generating_state(FamilySpec(9))) == pytest.approx({"0000": 2**-0.5, "0111": 2**-0.5})
    g7 = kets(generating_state(FamilySpec(7)))
    assert set(g7) == {"0000", "0101", "1000", "1110"}
    assert all(z == pytest.approx(0.5) for z in g7.values())
    g1 = kets(generating_state(FamilySpec(1, (1, 0, 0, 1))))
    assert g1 == pytest.approx({"0000": 2**-0.5, "1111": 2**-0.5})


@pytest.mark.parametrize(
    "family, k, expected",
    [(9, 1, PURE), (7, 2, "1"), (8, 1, TWO_STAR), (9, 2, "4")],
)
def test_classify_examples(family, k, expected):
    assert classify_marginal(FamilySpec(family), k) == expected


def test_classify_parametrized_examples(rng):
    for _ in range(3):
        assert all(classify_marginal(draw_params(1, "generic", rng), k) == "4" for k in range(1, 5))
        assert all(classify_marginal(draw_params(2, "a=+b", rng), k) == "2" for k in range(1, 5))
        spec = draw_params(3, "a=+b", rng)
        assert [classify_marginal(spec, k) for k in range(1, 5)] == ["1", "4", "1", "4"]


def test_classify_reports_failure_on_rank_three():
    from polyroof.quantum import DensityMatrix

    assert classify_density(DensityMatrix(3, np.eye(8) / 8)) == FAILED


def kept_qubit_slocc(rng, scale=0.2):
    return random_slocc(3, rng, scale=scale, near_identity=True)


@pytest.mark.parametrize("family", range(1, 10))
def test_root_count_invariant_under_slocc_on_kept_qubits(family):
    rng = np.random.default_rng(100 + family)
    spec = draw_params(family, "generic", rng)
    for trial in range(50):
        k = trial % 4 + 1
        base = classify_marginal(spec, k)
        moved = classify_density(apply_slocc_density(kept_qubit_slocc(rng), marginal(spec, k)))
        assert moved == base, (family, k, base, moved)


@pytest.mark.parametrize("row_index", [i for i, row in enumerate(TABLE_I) if any("±" in c for c in row.constraints)])
def test_sign_variants_agree(row_index):
    row = TABLE_I[row_index]
    for report in reproduce_row(row, row_index, samples_per_cell=2, seed=5):
        for con in row.constraints:
            outcomes = {report.votes[v] for v in expand_signs(con)}
            assert len(outcomes) == 1, (row.family, con, report.traced_qubit, report.votes)


def test_table_markdown_footer():
    reports = reproduce_row(TABLE_I[0], 0, samples_per_cell=1, seed=0)
    text = table_markdown(reports)
    assert text.splitlines()[0].startswith("| Class")
    assert text.rstrip().endswith("PASS")


def test_slocc_scaling_examples(rng):
    spec5 = draw_params(5, "generic", rng)
    lhs, rhs = slocc_scaling_check(spec5, SloccOperator.identity(3), 2)
    assert lhs == rhs
    c = 1.3
    L = SloccOperator((np.diag([c, 1 / c]), np.eye(2), np.eye(2)))
    lhs, rhs = slocc_scaling_check(spec5, L, 2)
    assert abs(lhs - rhs) < 1e-6
    for _ in range(5):
        lhs, rhs = slocc_scaling_check(FamilySpec(7), random_slocc(3, rng, scale=0.1, near_identity=True), 2)
        assert abs(lhs - rhs) < 1e-6


def test_slocc_scaling_needs_one_or_two_roots(rng):
    with pytest.raises(StructureError):
        slocc_scaling_check(draw_params(1, "generic", rng), SloccOperator.identity(3), 1)
