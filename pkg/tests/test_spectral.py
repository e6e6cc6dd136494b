import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banachgap.graphs import build_graph, gen_family
from banachgap.spectral import (
    extrapolation_report,
    gap_estimate,
    gap_exact_2,
    gap_oracle_small,
    mean_zero_basis,
    rayleigh_quotient,
)

C6 = gen_family("cycle", [6])
K4 = gen_family("complete", [4])
H3 = gen_family("hamming", [3])


def test_quotient_single_edge():
    K2 = build_graph(2, [(0, 1, 1)])
    assert rayleigh_quotient(K2, np.array([0.0, 1.0]), p=2, q=2) == pytest.approx(2.0)


def test_quotient_c4_eigenvector():
    C4 = gen_family("cycle", [4])
    f = np.array([1.0, 0.0, -1.0, 0.0])
    assert rayleigh_quotient(C4, f, p=2, q=2) == pytest.approx(2.0)


def test_quotient_constant_map_rejected():
    with pytest.raises(ValueError, match="constant"):
        rayleigh_quotient(C6, np.ones(6), p=2, q=2)


def test_quotient_ignores_loops_and_counts_multiplicity():
    G = build_graph(2, [(0, 1, 2), (0, 0, 3)])
    assert rayleigh_quotient(G, np.array([0.0, 1.0]), p=2, q=2) == pytest.approx(4.0)


@given(
    st.sampled_from([C6, K4, H3]),
    st.lists(st.integers(-50, 50), min_size=8, max_size=8),
    st.integers(1, 9),
    st.integers(-40, 40),
    st.sampled_from([1.0, 1.5, 2.0, 3.0]),
)
@settings(max_examples=80, deadline=None)
def test_translation_and_scaling_invariance(G, vals, alpha, shift, p):
    f = np.array(vals[: G.n], dtype=float)
    if np.allclose(f, f[0]):
        f[0] += 1.0
    base = rayleigh_quotient(G, f, p=p, q=2)
    moved = rayleigh_quotient(G, alpha * f + shift, p=p, q=2)
    assert moved == pytest.approx(base, rel=1e-9)


@pytest.mark.parametrize("n", range(2, 11))
def test_exact_gap_complete(n):
    assert gap_exact_2(gen_family("complete", [n])).value == pytest.approx(n, rel=1e-12)


@pytest.mark.parametrize("n", [3, 4, 6, 12, 32])
def test_exact_gap_cycle(n):
    want = 4 * math.sin(math.pi / n) ** 2
    assert gap_exact_2(gen_family("cycle", [n])).value == pytest.approx(want, rel=1e-11)


@pytest.mark.parametrize("n", range(1, 7))
def test_exact_gap_hamming(n):
    assert gap_exact_2(gen_family("hamming", [n])).value == pytest.approx(2.0, rel=1e-11)


def test_exact_gap_requires_connected():
    with pytest.raises(ValueError):
        gap_exact_2(build_graph(4, [(0, 1, 1), (2, 3, 1)]))


@pytest.mark.parametrize(
    "kind,params",
    [("cycle", [8]), ("cycle", [64]), ("complete", [16]), ("complete", [64]), ("hamming", [6]),
     ("path", [33]), ("margulis", [8]), ("random_regular", [24, 3]), ("random_regular", [48, 5])],
)
def test_estimate_matches_exact_at_p2(kind, params):
    G = gen_family(kind, params, seed=5)
    exact = gap_exact_2(G).value
    est = gap_estimate(G, p=2.0, q=2.0, d=1, seed=2, restarts=8)
    assert est.bound_kind == "upper"
    assert est.value == pytest.approx(exact, rel=1e-6)


def test_estimate_block_dimension_independent_at_p2():
    exact = gap_exact_2(K4).value
    est = gap_estimate(K4, p=2.0, q=2.0, d=3, seed=2)
    assert est.value == pytest.approx(exact, rel=1e-6)


def test_estimate_matched_exponent_q1():
    # single-edge graph at p=q=1 has gap 1 regardless of block dimension
    K2 = build_graph(2, [(0, 1, 1)])
    assert gap_estimate(K2, p=1.0, q=1.0, d=2, seed=0, restarts=8).value == pytest.approx(1.0, abs=1e-6)


def test_estimate_deterministic_for_seed():
    a = gap_estimate(C6, p=1.5, seed=11)
    b = gap_estimate(C6, p=1.5, seed=11)
    assert a.value == b.value
    assert np.array_equal(a.minimizer.values, b.minimizer.values)


def test_estimate_threads_match_serial():
    a = gap_estimate(H3, p=3.0, seed=4, threads=1)
    b = gap_estimate(H3, p=3.0, seed=4, threads=4)
    assert a.value == b.value


def test_estimate_rejects_bad_exponents():
    with pytest.raises(ValueError):
        gap_estimate(C6, p=0.5)
    with pytest.raises(ValueError):
        gap_estimate(C6, p=2.0, q=0.9)


def test_mean_zero_basis_orthonormal():
    B = mean_zero_basis(5)
    assert np.allclose(B.sum(axis=0), 0.0, atol=1e-14)
    assert np.allclose(B.T @ B, np.eye(4), atol=1e-14)


def test_oracle_two_vertices():
    K2 = build_graph(2, [(0, 1, 1)])
    assert gap_oracle_small(K2, p=2.0).value == pytest.approx(2.0)


def test_oracle_triangle():
    est = gap_oracle_small(gen_family("complete", [3]), p=2.0, resolution=1e-4)
    assert est.value == pytest.approx(3.0, abs=1e-3)
    assert est.method == "grid_oracle"


def test_oracle_cross_checks_descent_on_kinked_case():
    C4 = gen_family("cycle", [4])
    oracle = gap_oracle_small(C4, p=1.0, resolution=4e-3)
    est = gap_estimate(C4, p=1.0, seed=1)
    tol = max(1e-3, oracle.diagnostics["grid_error_bound"])
    assert abs(est.value - oracle.value) <= tol


def test_oracle_size_gate():
    with pytest.raises(ValueError, match="4 vertices"):
        gap_oracle_small(C6, p=2.0)


def test_extrapolation_report():
    rep = extrapolation_report([gen_family("cycle", [4])], [2.0])
    assert rep["rows"][0]["ratio"] == pytest.approx(1.0)
    rep = extrapolation_report([gen_family("complete", [3])], [4.0], restarts=8)
    ratio = rep["rows"][0]["ratio"]
    assert 0.0 < ratio < math.inf
    lo, hi = rep["bands"][4.0]
    assert lo <= ratio <= hi
