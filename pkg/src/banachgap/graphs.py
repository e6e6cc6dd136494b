"""Finite connected multigraphs: construction, generators, metrics, and I/O.

Vertices are dense integer indices ``0..n-1``.  Edges are stored as merged
``(u, v, mult)`` triples with ``u <= v``; self-loops (``u == v``) are
allowed and contribute 2 to the degree of their vertex.  The oriented-edge
view used by the gap computations contains, per non-loop edge of
multiplicity m, m oriented copies in each direction, and per loop of
multiplicity m, 2m copies ``(v, v)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "MultiGraph",
    "MetricTable",
    "build_graph",
    "gen_family",
    "all_pairs_distances",
    "write_edge_list",
    "read_edge_list",
    "graph_to_json",
]


@dataclass(frozen=True)
class MultiGraph:
    """Immutable undirected multigraph with loop and multiplicity support."""

    n: int
    edges: tuple[tuple[int, int, int], ...]
    degrees: tuple[int, ...]
    connected: bool

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.n else 0

    @property
    def average_degree(self) -> float:
        return sum(self.degrees) / self.n

    @property
    def oriented_edge_count(self) -> int:
        # Equals sum of degrees (handshake, loops counted twice).
        return 2 * sum(m for _, _, m in self.edges)

    def edge_multiset(self) -> dict[tuple[int, int], int]:
        return {(u, v): m for u, v, m in self.edges}

    def nonloop_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, v, mult) int64 arrays over non-loop edges, for the kernels."""
        eu, ev, em = [], [], []
        for u, v, m in self.edges:
            if u != v:
                eu.append(u)
                ev.append(v)
                em.append(m)
        return (
            np.asarray(eu, dtype=np.int64),
            np.asarray(ev, dtype=np.int64),
            np.asarray(em, dtype=np.int64),
        )

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists without multiplicities, loops skipped."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            if u != v:
                adj[u].append(v)
                adj[v].append(u)
        return adj

    def laplacian(self) -> np.ndarray:
        """Dense combinatorial Laplacian; loops drop out entirely."""
        L = np.zeros((self.n, self.n))
        for u, v, m in self.edges:
            if u == v:
                continue
            L[u, u] += m
            L[v, v] += m
            L[u, v] -= m
            L[v, u] -= m
        return L


@dataclass(frozen=True)
class MetricTable:
    """All-pairs hop distances of a connected multigraph."""

    d: np.ndarray
    diameter: int

    def row(self, v: int) -> np.ndarray:
        return self.d[v]


def build_graph(n: int, edges: Iterable[tuple[int, int, int]]) -> MultiGraph:
    """Normalize an edge list into a MultiGraph.

    Duplicate pairs are merged by summing multiplicities.  Raises on
    out-of-range endpoints or non-positive multiplicity.
    """
    if n < 1:
        raise ValueError("vertex count must be >= 1")
    merged: dict[tuple[int, int], int] = {}
    for u, v, m in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge endpoint out of range: ({u}, {v}) with n={n}")
        if m < 1:
            raise ValueError(f"multiplicity must be >= 1, got {m}")
        key = (u, v) if u <= v else (v, u)
        merged[key] = merged.get(key, 0) + m
    edge_tuple = tuple(sorted((u, v, m) for (u, v), m in merged.items()))
    degrees = [0] * n
    for u, v, m in edge_tuple:
        if u == v:
            degrees[u] += 2 * m
        else:
            degrees[u] += m
            degrees[v] += m
    connected = _is_connected(n, edge_tuple)
    return MultiGraph(n=n, edges=edge_tuple, degrees=tuple(degrees), connected=connected)


def _is_connected(n: int, edges: Sequence[tuple[int, int, int]]) -> bool:
    if n == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in edges:
        if u != v:
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                queue.append(y)
    return count == n


# ----------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------

_KINDS = ("cycle", "complete", "hamming", "random_regular", "margulis", "path")


def gen_family(kind: str, params: Sequence[int], seed: int | None = None) -> MultiGraph:
    """Standard graph generators, deterministic for a fixed seed.

    cycle(n), complete(n), hamming(n), path(n), margulis(n) on (Z/n)^2,
    random_regular(n, d).
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown generator kind {kind!r}; choose from {_KINDS}")
    params = tuple(int(x) for x in params)
    if kind == "cycle":
        (n,) = params
        if n < 1:
            raise ValueError("cycle needs n >= 1")
        if n == 1:
            return build_graph(1, [(0, 0, 1)])
        if n == 2:
            return build_graph(2, [(0, 1, 2)])
        return build_graph(n, [(i, (i + 1) % n, 1) for i in range(n)])
    if kind == "complete":
        (n,) = params
        if n < 2:
            raise ValueError("complete needs n >= 2")
        return build_graph(n, [(i, j, 1) for i in range(n) for j in range(i + 1, n)])
    if kind == "hamming":
        (n,) = params
        if n < 1:
            raise ValueError("hamming needs n >= 1")
        edges = [(v, v ^ (1 << i), 1) for v in range(1 << n) for i in range(n) if v < v ^ (1 << i)]
        return build_graph(1 << n, edges)
    if kind == "path":
        (n,) = params
        if n < 1:
            raise ValueError("path needs n >= 1")
        return build_graph(n, [(i, i + 1, 1) for i in range(n - 1)])
    if kind == "margulis":
        (n,) = params
        if n < 1:
            raise ValueError("margulis needs n >= 1")
        return _margulis(n)
    # random_regular
    n, d = params
    return _random_regular(n, d, seed)


def _margulis(n: int) -> MultiGraph:
    """8-regular expander on (Z/n)^2: four affine maps plus their inverses.

    Each map T contributes one undirected edge {v, T(v)} per vertex, so each
    vertex meets 4 images and 4 preimages (loops count twice).
    """

    def idx(a: int, b: int) -> int:
        return a * n + b

    maps = (
        lambda a, b: ((a + b) % n, b),
        lambda a, b: ((a + b + 1) % n, b),
        lambda a, b: (a, (b + a) % n),
        lambda a, b: (a, (b + a + 1) % n),
    )
    edges = []
    for a in range(n):
        for b in range(n):
            for T in maps:
                c, e = T(a, b)
                edges.append((idx(a, b), idx(c, e), 1))
    return build_graph(n * n, edges)


def _random_regular(n: int, d: int, seed: int | None, max_tries: int = 2000) -> MultiGraph:
    """Random simple d-regular graph by incremental stub pairing: draw stub
    pairs, skip loops/repeats, restart when stuck.  Handles dense cases the
    one-shot pairing model almost never survives."""
    if d >= n:
        raise ValueError("random_regular needs d < n")
    if (n * d) % 2 != 0:
        raise ValueError("random_regular needs n*d even")
    if d == 0:
        raise ValueError("random_regular needs d >= 1")
    if d == n - 1:
        return gen_family("complete", [n])
    rng = np.random.Generator(np.random.PCG64(0 if seed is None else seed))
    for _ in range(max_tries):
        stubs = list(np.repeat(np.arange(n), d))
        rng.shuffle(stubs)
        taken: set[tuple[int, int]] = set()
        stuck = False
        while stubs and not stuck:
            for _attempt in range(200):
                i = int(rng.integers(len(stubs)))
                j = int(rng.integers(len(stubs)))
                u, v = stubs[i], stubs[j]
                key = (min(u, v), max(u, v))
                if u != v and key not in taken:
                    taken.add(key)
                    for k in sorted((i, j), reverse=True):
                        stubs.pop(k)
                    break
            else:
                stuck = True
        if stuck:
            continue
        G = build_graph(n, [(u, v, 1) for u, v in sorted(taken)])
        if G.connected:
            return G
    raise RuntimeError(f"no connected simple {d}-regular graph on {n} vertices found in {max_tries} tries")


# ----------------------------------------------------------------------
# Metrics
# ----------------------------------------------------------------------


def all_pairs_distances(G: MultiGraph) -> MetricTable:
    """BFS hop distances; multiplicities and loops do not change them."""
    if not G.connected:
        raise ValueError("all_pairs_distances requires a connected graph")
    n = G.n
    adj = G.adjacency()
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        row = dist[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if row[y] < 0:
                    row[y] = row[x] + 1
                    queue.append(y)
    return MetricTable(d=dist, diameter=int(dist.max()))


# ----------------------------------------------------------------------
# File I/O: "n m" header, then "u v mult" lines; '#' comments.
# ----------------------------------------------------------------------


def write_edge_list(G: MultiGraph, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"{G.n} {len(G.edges)}\n")
        for u, v, m in G.edges:
            fh.write(f"{u} {v} {m}\n")


def read_edge_list(path: str) -> MultiGraph:
    rows: list[list[int]] = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append([int(tok) for tok in line.split()])
    if not rows:
        raise ValueError(f"empty edge-list file: {path}")
    n, m = rows[0]
    if len(rows) - 1 != m:
        raise ValueError(f"header declares {m} edges but file has {len(rows) - 1}")
    return build_graph(n, [(u, v, k) for u, v, k in rows[1:]])


def graph_to_json(G: MultiGraph) -> str:
    return json.dumps({"n": G.n, "edges": [list(e) for e in G.edges]})
