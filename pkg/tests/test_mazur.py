import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banachgap import mazur

EXPONENTS = [1.0, 1.5, 2.0, 3.0, 4.0]


def test_identity_exponent_is_identity():
    x = mazur.SphereVector(np.array([0.6, -0.8]), 2.0)
    y = mazur.mazur_map(x, 2.0)
    assert np.allclose(y.coords, x.coords)


def test_basis_vectors_fixed():
    x = mazur.SphereVector(np.array([1.0, 0.0, 0.0]), 4.0)
    y = mazur.mazur_map(x, 2.0)
    assert np.allclose(y.coords, [1.0, 0.0, 0.0])


def test_half_half_example():
    x = mazur.SphereVector(np.array([0.5, 0.5]), 1.0)
    y = mazur.mazur_map(x, 2.0)
    assert y.exponent == 2.0
    assert np.allclose(y.coords, [math.sqrt(0.5), math.sqrt(0.5)], atol=1e-12)


def test_non_unit_input_rejected():
    with pytest.raises(ValueError, match="unit"):
        mazur.SphereVector(np.array([1.0, 1.0]), 2.0)


@given(
    st.sampled_from(EXPONENTS),
    st.sampled_from(EXPONENTS),
    st.integers(0, 10_000),
    st.integers(2, 16),
)
@settings(max_examples=60, deadline=None)
def test_norm_preservation_and_bijectivity(p, q, seed, d):
    rng = np.random.Generator(np.random.PCG64(seed))
    x = mazur.sphere_sample(rng, 8, d, p)
    fwd = mazur.mazur_sphere_map(p, q)
    y = fwd.fn(x)
    norms = (np.abs(y) ** q).sum(axis=1) ** (1.0 / q)
    assert np.allclose(norms, 1.0, atol=1e-12)
    back = mazur.mazur_sphere_map(q, p)
    assert np.abs(back.fn(y) - x).max() < 1e-10


def test_modulus_catalog():
    assert mazur.mazur_sphere_map(4.0, 2.0).modulus == (2.0, 1.0)
    assert mazur.mazur_sphere_map(3.0, 2.0).modulus == (1.5, 1.0)
    assert mazur.mazur_sphere_map(1.0, 2.0).modulus == (4.0, 0.5)
    assert mazur.mazur_sphere_map(1.5, 2.0).modulus == (4.0, 0.75)
    assert mazur.mazur_sphere_map(3.0, 1.5).modulus is None
    with pytest.raises(ValueError, match="modulus"):
        mazur.stabilized_modulus(mazur.mazur_sphere_map(3.0, 1.5))


def test_canonical_extension_values():
    phi = mazur.mazur_sphere_map(1.0, 2.0)
    assert np.allclose(mazur.canonical_extension(phi, np.zeros(3)), 0.0)
    ident = mazur.identity_sphere_map(2.0)
    v = np.array([3.0, -4.0])
    assert np.allclose(mazur.canonical_extension(ident, v), v)
    out = mazur.canonical_extension(phi, np.array([1.0, 1.0]))
    assert np.allclose(out, [math.sqrt(2.0), math.sqrt(2.0)], atol=1e-12)


def test_stabilized_single_block_reduces_to_base_map():
    phi = mazur.mazur_sphere_map(4.0, 2.0)
    rng = np.random.Generator(np.random.PCG64(0))
    x = mazur.sphere_sample(rng, 1, 6, 4.0)
    out = mazur.stabilized_map(phi, x, p=2.0)
    assert np.allclose(out, phi.fn(x), atol=1e-14)


def test_stabilized_norm_one_and_equal_blocks():
    phi = mazur.mazur_sphere_map(4.0, 2.0)
    rng = np.random.Generator(np.random.PCG64(1))
    block = rng.standard_normal(5)
    xi = np.vstack([block, block])
    xi /= ((np.abs(xi) ** 4).sum(axis=1) ** (2.0 / 4.0)).sum() ** 0.5  # block l_2 of l_4 rows
    out = mazur.stabilized_map(phi, xi, p=2.0)
    assert np.allclose(out[0], out[1])
    nrm = ((np.abs(out) ** 2).sum(axis=1) ** (2.0 / 2.0)).sum() ** 0.5
    assert nrm == pytest.approx(1.0, abs=1e-12)


@given(st.permutations(list(range(5))), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_stabilized_block_permutation_equivariance(perm, seed):
    phi = mazur.mazur_sphere_map(3.0, 2.0)
    rng = np.random.Generator(np.random.PCG64(seed))
    xi = rng.standard_normal((5, 4))
    nrm = (((np.abs(xi) ** 3).sum(axis=1) ** (1 / 3.0)) ** 2).sum() ** 0.5
    xi /= nrm
    direct = mazur.stabilized_map(phi, xi[list(perm)], p=2.0)
    permuted = mazur.stabilized_map(phi, xi, p=2.0)[list(perm)]
    assert np.array_equal(direct, permuted)


def test_stabilized_full_reversal_equivariance():
    phi = mazur.mazur_sphere_map(1.5, 2.0)
    rng = np.random.Generator(np.random.PCG64(3))
    xi = rng.standard_normal((6, 3))
    xi /= (((np.abs(xi) ** 1.5).sum(axis=1) ** (1 / 1.5)) ** 3).sum() ** (1 / 3.0)
    out = mazur.stabilized_map(phi, xi, p=3.0)
    rev = mazur.stabilized_map(phi, xi[::-1], p=3.0)
    assert np.array_equal(rev, out[::-1])


@pytest.mark.parametrize("p", [1.0, 4.0])
def test_moduli_hold_in_low_dimension(p):
    phi = mazur.mazur_sphere_map(p, 2.0)
    est = mazur.estimate_modulus(phi, "near_pairs", 20000, seed=4, d=2, bound=phi.modulus)
    assert est.violations == 0


def test_estimate_modulus_identity():
    est = mazur.estimate_modulus(mazur.identity_sphere_map(2.0), "near_pairs", 20000, seed=3, d=8)
    assert est.fitted_alpha == pytest.approx(1.0, abs=0.02)
    assert est.fitted_C == pytest.approx(1.0, rel=0.02)


def test_estimate_modulus_counts_violations_against_false_bound():
    phi = mazur.mazur_sphere_map(4.0, 2.0)
    est = mazur.estimate_modulus(phi, "uniform_sphere", 5000, seed=2, d=8, bound=(0.5, 1.0))
    assert est.violations > 0


def test_antipodal_sampler_hits_the_large_end():
    est = mazur.estimate_modulus(mazur.identity_sphere_map(2.0), "antipodal_pairs", 100, seed=0, d=4)
    assert est.eps.max() == pytest.approx(2.0)


def test_check_stabilized_identity():
    chk = mazur.check_stabilized_modulus(mazur.identity_sphere_map(2.0), k=1, p=2.0, n_samples=5000, seed=0)
    assert chk.bound_C == 4.0 and chk.alpha == 1.0
    assert chk.violations == 0


def test_sphere_sample_is_on_sphere():
    rng = np.random.Generator(np.random.PCG64(5))
    for p in EXPONENTS:
        x = mazur.sphere_sample(rng, 32, 6, p)
        assert np.allclose((np.abs(x) ** p).sum(axis=1), 1.0, atol=1e-10)
