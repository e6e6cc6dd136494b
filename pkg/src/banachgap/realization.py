"""Even regularization and realization of multigraphs as Schreier graphs.

Any connected multigraph G becomes an even-regular multigraph G' by
doubling every edge and padding vertices with self-loops up to degree
2*max_degree(G).  Loops do not move the gap and doubling scales it by
exactly 2.  An even-regular connected multigraph decomposes into 2-factors:
orient an Euler circuit, split the resulting in/out-regular bipartite
multigraph into perfect matchings, and read each matching as a permutation
of the vertex set.  The permutations with their formal inverses generate a
free action whose Schreier graph reproduces G' edge-for-edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import MultiGraph, build_graph
from .groups import PermutationAction, validate_action

__all__ = [
    "SchreierSpec",
    "even_regularize",
    "two_factorize",
    "reassemble",
    "schreier_realize",
    "verify_realization",
    "spec_to_action",
]


@dataclass(frozen=True)
class SchreierSpec:
    """A realization certificate: the even regularization and the
    permutations whose functional graphs tile it."""

    base: MultiGraph
    perms: tuple[np.ndarray, ...]
    provenance: tuple[str, ...]


def even_regularize(G: MultiGraph) -> MultiGraph:
    """Double every edge, then pad each vertex with loops to degree 2*max."""
    if not G.connected:
        raise ValueError("even_regularize requires a connected graph")
    delta = G.max_degree
    edges = [(u, v, 2 * m) for u, v, m in G.edges]
    for v in range(G.n):
        pad = delta - G.degrees[v]  # each loop adds 2 to the doubled degree
        if pad > 0:
            edges.append((v, v, pad))
    return build_graph(G.n, edges)


def _euler_circuit(G: MultiGraph, seed: int) -> list[tuple[int, int]]:
    """Oriented edges (a, b) of an Euler circuit over all edge copies.

    Every vertex must have even degree.  Loops are traversed once and
    contribute one in- and one out-orientation at their vertex.
    """
    copies: list[tuple[int, int]] = []
    for u, v, m in G.edges:
        copies.extend([(u, v)] * m)
    if not copies:
        return []
    adj: list[list[tuple[int, int]]] = [[] for _ in range(G.n)]
    for cid, (u, v) in enumerate(copies):
        adj[u].append((cid, v))
        if u != v:
            adj[v].append((cid, u))
    rng = np.random.Generator(np.random.PCG64(seed))
    for lst in adj:
        rng.shuffle(lst)
    used = [False] * len(copies)
    ptr = [0] * G.n
    start = copies[0][0]
    stack: list[tuple[int, int]] = [(start, -1)]
    oriented: list[tuple[int, int]] = []
    while stack:
        v, inc = stack[-1]
        advanced = False
        while ptr[v] < len(adj[v]):
            cid, w = adj[v][ptr[v]]
            if used[cid]:
                ptr[v] += 1
                continue
            used[cid] = True
            stack.append((w, cid))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if inc >= 0:
                oriented.append((stack[-1][0], v))
    if len(oriented) != len(copies):
        raise ValueError("graph has no Euler circuit (is it connected with even degrees?)")
    return oriented


def _peel_matchings(n: int, oriented: list[tuple[int, int]], k: int) -> list[np.ndarray]:
    """Split a k-in/k-out orientation into k permutations via repeated
    perfect matching on the out/in bipartite multigraph.  Ties break by
    lowest index, so the output is determined by the orientation."""
    remaining: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for cid, (a, b) in enumerate(oriented):
        remaining[a].append((b, cid))
    for lst in remaining:
        lst.sort()
    perms: list[np.ndarray] = []
    for _ in range(k):
        match_right: dict[int, tuple[int, int]] = {}  # right vertex -> (left vertex, copy id)

        def augment(u: int, visited: set[int]) -> bool:
            for b, cid in remaining[u]:
                if b in visited:
                    continue
                visited.add(b)
                if b not in match_right or augment(match_right[b][0], visited):
                    match_right[b] = (u, cid)
                    return True
            return False

        for u in range(n):
            if not augment(u, set()):
                raise RuntimeError("matching peel failed: bipartite regularity broken")
        sigma = np.empty(n, dtype=np.int64)
        consumed = set()
        for b, (u, cid) in match_right.items():
            sigma[u] = b
            consumed.add(cid)
        perms.append(sigma)
        for u in range(n):
            remaining[u] = [(b, cid) for b, cid in remaining[u] if cid not in consumed]
    if any(remaining[u] for u in range(n)):
        raise RuntimeError("orientation not fully consumed by matchings")
    return perms


def two_factorize(Gp: MultiGraph, seed: int = 0) -> list[np.ndarray]:
    """Decompose a connected 2k-regular multigraph into k permutations whose
    functional graphs (one undirected edge per application, loops at fixed
    points) reproduce the edge multiset exactly."""
    degs = set(Gp.degrees)
    if len(degs) != 1:
        raise ValueError(f"graph is not regular: degrees {sorted(degs)}")
    deg = degs.pop()
    if deg % 2 != 0:
        raise ValueError(f"degree {deg} is odd; 2-factorization needs even degree")
    if not Gp.connected:
        raise ValueError("two_factorize requires a connected graph")
    k = deg // 2
    if k == 0:
        return []
    oriented = _euler_circuit(Gp, seed)
    return _peel_matchings(Gp.n, oriented, k)


def reassemble(n: int, perms: list[np.ndarray]) -> MultiGraph:
    """Union of functional graphs: one undirected edge {v, sigma(v)} per
    vertex per permutation; fixed points become loops."""
    edges = []
    for sigma in perms:
        for v in range(n):
            w = int(sigma[v])
            edges.append((min(v, w), max(v, w), 1))
    if not edges:
        return build_graph(n, [])
    return build_graph(n, edges)


def schreier_realize(G: MultiGraph, seed: int = 0) -> SchreierSpec:
    """Even-regularize, then 2-factorize; the returned permutations realize
    the regularization as the Schreier graph of their free symmetric set."""
    Gp = even_regularize(G)
    perms = two_factorize(Gp, seed=seed)
    provenance = tuple(f"two-factor {i} of Euler orientation (seed {seed})" for i in range(len(perms)))
    return SchreierSpec(base=Gp, perms=tuple(perms), provenance=provenance)


def verify_realization(spec: SchreierSpec) -> tuple[bool, dict]:
    """Rebuild the multigraph from the permutations and compare edge
    multisets exactly; on mismatch return the symmetric difference."""
    rebuilt = reassemble(spec.base.n, list(spec.perms))
    want = spec.base.edge_multiset()
    got = rebuilt.edge_multiset()
    if want == got:
        return True, {}
    diff = {}
    for key in set(want) | set(got):
        a, b = want.get(key, 0), got.get(key, 0)
        if a != b:
            diff[key] = {"expected": a, "rebuilt": b}
    return False, diff


def spec_to_action(spec: SchreierSpec) -> PermutationAction:
    """The free symmetric generating set {sigma_i, sigma_i^-1} as a
    permutation action (formal inverses stay distinct slots even for
    involutions or identity factors, matching the free-group convention)."""
    labels = []
    rows = []
    inverse = []
    for i, sigma in enumerate(spec.perms):
        labels.extend([f"t{i}", f"t{i}~"])
        rows.append(sigma)
        rows.append(np.argsort(sigma))
        inverse.extend([2 * i + 1, 2 * i])
    a = PermutationAction(
        m=spec.base.n,
        labels=tuple(labels),
        perms=np.asarray(rows, dtype=np.int64),
        inverse=tuple(inverse),
    )
    validate_action(a, allow_identity=True)
    return a
