import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banachgap.graphs import (
    all_pairs_distances,
    build_graph,
    gen_family,
    graph_to_json,
    read_edge_list,
    write_edge_list,
)


def test_build_single_edge():
    G = build_graph(2, [(0, 1, 1)])
    assert G.degrees == (1, 1)
    assert G.connected


def test_loop_counts_twice():
    G = build_graph(1, [(0, 0, 1)])
    assert G.degrees == (2,)


def test_triangle_merges_duplicates():
    G = build_graph(3, [(0, 1, 1), (1, 0, 2), (1, 2, 1), (0, 2, 1)])
    assert G.edge_multiset()[(0, 1)] == 3
    assert G.max_degree == 4


@pytest.mark.parametrize(
    "edges, err",
    [([(0, 3, 1)], "out of range"), ([(0, 1, 0)], "multiplicity")],
)
def test_build_errors(edges, err):
    with pytest.raises(ValueError, match=err):
        build_graph(2, edges)


@given(
    st.integers(2, 8).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(
                st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 3)),
                min_size=1,
                max_size=12,
            ),
        )
    )
)
@settings(max_examples=60, deadline=None)
def test_handshake(case):
    n, edges = case
    G = build_graph(n, edges)
    assert sum(G.degrees) == G.oriented_edge_count == 2 * sum(m for _, _, m in G.edges)


def test_hamming_properties():
    for n in range(1, 6):
        H = gen_family("hamming", [n])
        assert H.n == 2**n
        assert set(H.degrees) == {n}
        assert all_pairs_distances(H).diameter == n


def test_hamming2_is_a_4_cycle():
    H = gen_family("hamming", [2])
    assert H.n == 4 and set(H.degrees) == {2} and H.connected
    assert all_pairs_distances(H).diameter == 2


def test_complete_4():
    K = gen_family("complete", [4])
    assert set(K.degrees) == {3}
    assert all_pairs_distances(K).diameter == 1


def test_cycle_small_cases():
    assert gen_family("cycle", [1]).edges == ((0, 0, 1),)
    assert gen_family("cycle", [2]).edges == ((0, 1, 2),)
    assert len(gen_family("cycle", [6]).edges) == 6


def test_path():
    P = gen_family("path", [5])
    assert len(P.edges) == 4
    assert all_pairs_distances(P).diameter == 4


def test_metric_values():
    assert all_pairs_distances(gen_family("cycle", [6])).diameter == 3
    K5 = all_pairs_distances(gen_family("complete", [5]))
    off = K5.d[~np.eye(5, dtype=bool)]
    assert set(off.tolist()) == {1}
    H3 = all_pairs_distances(gen_family("hamming", [3]))
    assert H3.d[0, 7] == 3


@pytest.mark.parametrize("kind,params", [("cycle", [7]), ("hamming", [3]), ("complete", [5])])
def test_vertex_transitive_row_multisets(kind, params):
    G = gen_family(kind, params)
    met = all_pairs_distances(G)
    rows = {tuple(sorted(met.d[v].tolist())) for v in range(G.n)}
    assert len(rows) == 1


def test_random_regular_basics():
    G = gen_family("random_regular", [20, 3], seed=7)
    assert set(G.degrees) == {3}
    assert G.connected
    assert gen_family("random_regular", [20, 3], seed=7).edges == G.edges


def test_random_regular_dense_case():
    G = gen_family("random_regular", [8, 5], seed=3)
    assert set(G.degrees) == {5} and G.connected


def test_random_regular_parity_error():
    with pytest.raises(ValueError, match="even"):
        gen_family("random_regular", [7, 3])


def test_margulis():
    G = gen_family("margulis", [3])
    assert G.n == 9
    assert set(G.degrees) == {8}
    assert G.connected


def test_disconnected_flag_and_metric_error():
    G = build_graph(4, [(0, 1, 1), (2, 3, 1)])
    assert not G.connected
    with pytest.raises(ValueError):
        all_pairs_distances(G)


def test_edge_list_roundtrip(tmp_path):
    G = gen_family("margulis", [2])
    path = tmp_path / "g.edges"
    write_edge_list(G, str(path))
    assert read_edge_list(str(path)).edges == G.edges
    assert '"n": 4' in graph_to_json(G)


def test_edge_list_header_mismatch(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("2 2\n0 1 1\n")
    with pytest.raises(ValueError, match="header"):
        read_edge_list(str(path))
