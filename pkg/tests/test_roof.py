import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyroof.errors import RayError, StructureError
from polyroof.geometry import (
    Structure,
    bloch_of_density,
    bloch_of_omega,
    density_of_bloch,
    omega_state,
    root_profile,
)
from polyroof.measures import CONCURRENCE, SQRT_TANGLE, TANGLE, eval_measure
from polyroof.oracle import wootters_concurrence
from polyroof.quantum import DensityMatrix, random_rank2, spectral_decompose_rank2
from polyroof.roof import (
    Method,
    in_zero_polytope,
    iso_curve_sample,
    max_on_sphere,
    roof_one_root,
    roof_orthogonal_roots,
    roof_separable_ray,
    roof_two_root,
)
from polyroof.samples import random_ball_point, random_ww_params, sample_instances, ww_closed_form, ww_tilde_basis

from conftest import ellipse_residuals, frob

seeds = st.integers(0, 2**32 - 1)


def one_root_profile(r, m=SQRT_TANGLE):
    rho, _ = sample_instances(Structure.ONE_ROOT, 1, r)[0]
    return root_profile(m, spectral_decompose_rank2(rho))


def two_root_profile(r, m=SQRT_TANGLE):
    rho, _ = sample_instances(Structure.TWO_ROOT_EQUAL, 1, r)[0]
    return root_profile(m, spectral_decompose_rank2(rho))


def two_qubit_profile(r):
    return root_profile(CONCURRENCE, spectral_decompose_rank2(random_rank2(2, r)))


def check_witness(result, rho, m):
    assert frob(result.witness_matrix(), rho.matrix) < 1e-8
    assert abs(sum(w for w, _ in result.witness) - 1) < 1e-10
    assert abs(result.witness_average(m) - result.value) < 1e-6


# ------------------------------------------------------------------ one root

def test_one_root_examples(rng):
    profile = one_root_profile(rng)
    z = profile.root_blochs()[0]
    basis = profile.sphere
    at_root = roof_one_root(profile, SQRT_TANGLE, density_of_bloch(basis, z))
    assert at_root.value < 1e-12
    antipode = roof_one_root(profile, SQRT_TANGLE, density_of_bloch(basis, -z))
    assert antipode.geometry.h_c == pytest.approx(2.0)
    assert antipode.value == pytest.approx(max_on_sphere(profile, SQRT_TANGLE), rel=1e-3)
    assert antipode.value == pytest.approx(SQRT_TANGLE.adjusted_normalization(profile.normalization_N) * 4, rel=1e-9)


def test_one_root_requires_structure(rng):
    profile = two_root_profile(rng)
    with pytest.raises(StructureError):
        roof_one_root(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, [0, 0, 0]))


@given(seeds, st.sampled_from([SQRT_TANGLE, TANGLE]))
def test_one_root_witness(seed, m):
    r = np.random.default_rng(seed)
    profile = one_root_profile(r, m)
    rho = density_of_bloch(profile.sphere, random_ball_point(r))
    result = roof_one_root(profile, m, rho)
    assert result.method is Method.ONE_ROOT
    check_witness(result, rho, m)


@given(seeds)
def test_one_root_affine_for_sqrt_tangle(seed):
    r = np.random.default_rng(seed)
    profile = one_root_profile(r)
    a, b = random_ball_point(r), random_ball_point(r)
    t = r.uniform()
    val = [roof_one_root(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, p)).value for p in (a, b)]
    mixed = roof_one_root(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, t * a + (1 - t) * b)).value
    assert abs(mixed - (t * val[0] + (1 - t) * val[1])) < 1e-9


# ------------------------------------------------------------------ two roots

def test_two_root_zero_line_midpoint(rng):
    profile = two_root_profile(rng)
    z1, z2 = profile.root_blochs()
    rho = density_of_bloch(profile.sphere, 0.5 * (z1 + z2))
    result = roof_two_root(profile, SQRT_TANGLE, rho)
    assert result.value == 0.0
    check_witness(result, rho, SQRT_TANGLE)


@given(seeds)
def test_two_root_matches_wootters(seed):
    r = np.random.default_rng(seed)
    rho = random_rank2(2, r)
    profile = root_profile(CONCURRENCE, spectral_decompose_rank2(rho))
    result = roof_two_root(profile, CONCURRENCE, rho)
    assert abs(result.value - wootters_concurrence(rho)) < 1e-8
    check_witness(result, rho, CONCURRENCE)


@given(seeds)
def test_two_root_geometry_scalars(seed):
    r = np.random.default_rng(seed)
    profile = two_qubit_profile(r)
    rho = density_of_bloch(profile.sphere, random_ball_point(r))
    g = roof_two_root(profile, CONCURRENCE, rho).geometry
    if g.R is not None:
        assert abs(g.R**2 + g.s**2 - 1) < 1e-10


@given(seeds)
def test_ww_closed_form(seed):
    r = np.random.default_rng(seed)
    params = random_ww_params(r)
    basis = ww_tilde_basis(params)
    profile = root_profile(SQRT_TANGLE, basis)
    rho = density_of_bloch(basis, random_ball_point(r))
    two = roof_two_root(profile, SQRT_TANGLE, rho)
    assert abs(two.value - ww_closed_form(params, rho)) < 1e-8
    ortho = roof_orthogonal_roots(profile, SQRT_TANGLE, rho)
    assert abs(ortho.value - two.value) < 1e-10


def test_orthogonal_roots_examples(rng):
    params = random_ww_params(rng)
    basis = ww_tilde_basis(params)
    profile = root_profile(SQRT_TANGLE, basis)
    diag = density_of_bloch(basis, [0, 0, 0.3])
    assert roof_orthogonal_roots(profile, SQRT_TANGLE, diag).value < 1e-14
    equator = [roof_orthogonal_roots(profile, SQRT_TANGLE, density_of_bloch(basis, [math.cos(a), math.sin(a), 0])).value
               for a in np.linspace(0, 2 * np.pi, 7)]
    inside = roof_orthogonal_roots(profile, SQRT_TANGLE, density_of_bloch(basis, [0.3, 0.2, 0.4])).value
    assert np.ptp(equator) < 1e-12 and inside < equator[0]
    assert equator[0] == pytest.approx(max_on_sphere(profile, SQRT_TANGLE), rel=1e-3)


def test_orthogonal_roots_rejects_non_antipodal(rng):
    profile = two_root_profile(rng)
    z1, z2 = profile.root_blochs()
    if np.linalg.norm(z1 + z2) > 1e-6:
        with pytest.raises(StructureError):
            roof_orthogonal_roots(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, [0, 0, 0]))


@given(seeds, st.sampled_from([SQRT_TANGLE, TANGLE]))
def test_two_root_convexity(seed, m):
    r = np.random.default_rng(seed)
    profile = two_root_profile(r, m)
    a, b = random_ball_point(r), random_ball_point(r)
    t = r.uniform()
    va, vb = (roof_two_root(profile, m, density_of_bloch(profile.sphere, p)).value for p in (a, b))
    mixed = roof_two_root(profile, m, density_of_bloch(profile.sphere, t * a + (1 - t) * b)).value
    assert mixed <= t * va + (1 - t) * vb + 1e-9


@given(seeds, st.sampled_from([SQRT_TANGLE, TANGLE]))
def test_two_root_witness(seed, m):
    r = np.random.default_rng(seed)
    profile = two_root_profile(r, m)
    rho = density_of_bloch(profile.sphere, random_ball_point(r))
    result = roof_two_root(profile, m, rho)
    check_witness(result, rho, m)
    values = [eval_measure(m, s) for _, s in result.witness]
    assert np.ptp(values) < 1e-8 * max(1, max(values))


@given(seeds)
def test_ellipse_level_sets(seed):
    r = np.random.default_rng(seed)
    profile = two_root_profile(r)
    forms, expected = ellipse_residuals(profile, SQRT_TANGLE, level_fraction=r.uniform(0.2, 0.8))
    assert np.max(np.abs(forms - expected)) < 1e-8


# ------------------------------------------------------------------ separable ray

@given(seeds)
def test_ray_with_projection_and_midpoint(seed):
    r = np.random.default_rng(seed)
    profile = two_qubit_profile(r)
    rho = density_of_bloch(profile.sphere, random_ball_point(r))
    reference = roof_two_root(profile, CONCURRENCE, rho).value
    projected = roof_separable_ray(profile, CONCURRENCE, rho)
    z1, z2 = profile.root_blochs()
    midpoint = roof_separable_ray(profile, CONCURRENCE, rho, z_m=0.5 * (z1 + z2))
    assert abs(projected.value - reference) < 1e-9
    assert abs(midpoint.value - reference) < 1e-9
    check_witness(projected, rho, CONCURRENCE)
    check_witness(midpoint, rho, CONCURRENCE)


@given(seeds)
def test_ray_one_root_matches_closed_form(seed):
    r = np.random.default_rng(seed)
    profile = one_root_profile(r)
    rho = density_of_bloch(profile.sphere, random_ball_point(r))
    assert abs(roof_separable_ray(profile, SQRT_TANGLE, rho).value - roof_one_root(profile, SQRT_TANGLE, rho).value) < 1e-9


def test_ray_on_pure_state_and_errors(rng):
    profile = two_qubit_profile(rng)
    b = random_ball_point(rng)
    b /= np.linalg.norm(b)
    pure = density_of_bloch(profile.sphere, b)
    from polyroof.geometry import state_of_bloch

    expect = eval_measure(CONCURRENCE, state_of_bloch(profile.sphere, b))
    assert roof_separable_ray(profile, CONCURRENCE, pure).value == pytest.approx(expect, abs=1e-9)
    z1, z2 = profile.root_blochs()
    with pytest.raises(RayError):
        roof_separable_ray(profile, CONCURRENCE, density_of_bloch(profile.sphere, 0.5 * (z1 + z2)), 0.5 * (z1 + z2))
    with pytest.raises(RayError):
        roof_separable_ray(profile, CONCURRENCE, pure, z_m=np.array([0.0, 0.0, 0.0]) + 0.5 * (z1 - z2) + 0.1)


# ------------------------------------------------------------------ iso-curves and zero polytope

def test_iso_curve_examples(rng):
    profile = two_qubit_profile(rng)
    top = max_on_sphere(profile, CONCURRENCE)
    assert iso_curve_sample(profile, CONCURRENCE, 1.01 * top + 0.01, 16) == []
    b = random_ball_point(rng)
    b /= np.linalg.norm(b)
    level = roof_two_root(profile, CONCURRENCE, density_of_bloch(profile.sphere, b)).value
    pts = iso_curve_sample(profile, CONCURRENCE, level, 720)
    assert pts
    assert min(np.linalg.norm(p - b) for p in pts) < 2e-2
    for p in pts[:50]:
        got = roof_two_root(profile, CONCURRENCE, density_of_bloch(profile.sphere, p)).value
        assert abs(got - level) < 1e-9
    tiny = iso_curve_sample(profile, CONCURRENCE, 1e-6 * top, 12)
    zs = profile.root_blochs()
    assert max(min(np.linalg.norm(p - z) for z in zs) for p in tiny) < 1e-4


def test_iso_curve_contains_state_on_its_meridian(rng):
    profile = two_qubit_profile(rng)
    from polyroof.roof import iso_curve_frame

    pole, e1, _ = iso_curve_frame(profile)
    theta = 1.1
    b = math.cos(theta) * pole + math.sin(theta) * e1
    level = float(CONCURRENCE.adjusted_normalization(profile.normalization_N) * profile.distance_product(b))
    pts = iso_curve_sample(profile, CONCURRENCE, level, 8)
    assert min(np.linalg.norm(p - b) for p in pts) < 1e-6


def test_iso_curve_rejects_nonpositive_level(rng):
    with pytest.raises(ValueError):
        iso_curve_sample(two_qubit_profile(rng), CONCURRENCE, 0.0, 4)


@given(seeds)
def test_zero_polytope(seed):
    r = np.random.default_rng(seed)
    profile = two_root_profile(r)
    z1, z2 = profile.root_blochs()
    t = r.uniform()
    inside = t * z1 + (1 - t) * z2
    assert in_zero_polytope(profile, inside) is not None
    assert roof_two_root(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, inside)).value == 0.0
    outside = inside + 0.05 * random_ball_point(r, 1.0) / max(np.linalg.norm(random_ball_point(r, 1.0)), 1e-3)
    if np.linalg.norm(outside) < 1 and roof_two_root(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, outside)).geometry.h > 1e-9:
        assert in_zero_polytope(profile, outside) is None
        assert roof_two_root(profile, SQRT_TANGLE, density_of_bloch(profile.sphere, outside)).value > 0
