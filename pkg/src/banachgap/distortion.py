"""Distortion bounds for embedding finite graphs into l_q^d.

Two lower-bound routes feed the report: a concentration route built from
the normalized radius r_eps (smallest subset-diameter fraction at mass
eps) and a displacement route built from the maximal displacement D(G)
(the best over permutations of the worst distance any vertex moves).
Upper bounds come from explicit embeddings whose bi-Lipschitz constants
are evaluated exactly over all pairs.  A coarse-union builder and a
compression-exclusion check cover the asymptotic corollaries at family
level.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import MetricTable, MultiGraph, all_pairs_distances
from .groups import PermutationAction
from .spectral import GapEstimate

__all__ = [
    "DistortionResult",
    "REpsBound",
    "Displacement",
    "BoundValue",
    "DistortionBounds",
    "CoarseUnion",
    "ExclusionVerdict",
    "map_distortion",
    "map_distortion_exact_sq",
    "hamming_identity_embedding",
    "frechet_embedding",
    "r_eps_lower",
    "r_eps_exact",
    "max_displacement",
    "gn_bound",
    "jv_bound",
    "jv_bound_exact_sq",
    "coarse_union",
    "austin_exclude",
]


# ----------------------------------------------------------------------
# Exact distortion of explicit embeddings
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionResult:
    value: float
    lip: float
    lip_inv: float
    witness_expand: tuple[int, int]
    witness_contract: tuple[int, int]


def map_distortion(
    G: MultiGraph, F: np.ndarray, q: float, metric: MetricTable | None = None
) -> DistortionResult:
    """Exact over all vertex pairs: ||f||_Lip * ||f^-1||_Lip for an
    injective embedding F (n rows) into l_q^d."""
    F = np.asarray(F, dtype=np.float64)
    if F.ndim == 1:
        F = F[:, None]
    metric = metric or all_pairs_distances(G)
    n = G.n
    lip = 0.0
    lip_inv = 0.0
    we = wc = (0, 1)
    for u in range(n - 1):
        diff = F[u + 1 :] - F[u]
        nrm = (np.abs(diff) ** q).sum(axis=1) ** (1.0 / q)
        dd = metric.d[u, u + 1 :].astype(np.float64)
        if np.any(nrm == 0.0):
            v = u + 1 + int(np.nonzero(nrm == 0.0)[0][0])
            raise ValueError(f"embedding is not injective: vertices {u} and {v} collide")
        e = nrm / dd
        c = dd / nrm
        ie, ic = int(np.argmax(e)), int(np.argmax(c))
        if e[ie] > lip:
            lip, we = float(e[ie]), (u, u + 1 + ie)
        if c[ic] > lip_inv:
            lip_inv, wc = float(c[ic]), (u, u + 1 + ic)
    return DistortionResult(value=lip * lip_inv, lip=lip, lip_inv=lip_inv, witness_expand=we, witness_contract=wc)


def map_distortion_exact_sq(G: MultiGraph, F: np.ndarray, metric: MetricTable | None = None) -> Fraction:
    """Squared distortion of an integer embedding at q=2, in exact rational
    arithmetic over squared distances."""
    F = np.asarray(F)
    if not np.issubdtype(F.dtype, np.integer):
        raise ValueError("exact distortion needs integer coordinates")
    metric = metric or all_pairs_distances(G)
    n = G.n
    max_e = Fraction(0)
    max_c = Fraction(0)
    for u in range(n):
        for v in range(u + 1, n):
            nsq = int(((F[u] - F[v]) ** 2).sum())
            dsq = int(metric.d[u, v]) ** 2
            if nsq == 0:
                raise ValueError(f"embedding is not injective: vertices {u} and {v} collide")
            max_e = max(max_e, Fraction(nsq, dsq))
            max_c = max(max_c, Fraction(dsq, nsq))
    return max_e * max_c


def hamming_identity_embedding(n: int) -> np.ndarray:
    """Cube vertices as 0/1 coordinate rows (vertex index = bitmask)."""
    return np.array([[(v >> i) & 1 for i in range(n)] for v in range(1 << n)], dtype=np.int64)


def frechet_embedding(G: MultiGraph, metric: MetricTable | None = None) -> np.ndarray:
    """Distance-row embedding v -> (d(v, w))_w; 1-Lipschitz into l_inf and a
    generic integer embedding for upper bounds in any l_q."""
    metric = metric or all_pairs_distances(G)
    return metric.d.copy()


# ----------------------------------------------------------------------
# Normalized subset radius r_eps
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class REpsBound:
    value: float
    radius: int
    center: int
    diameter: int
    exact: bool
    subset: tuple[int, ...] | None = None


def r_eps_lower(G: MultiGraph, metric: MetricTable, eps: float) -> REpsBound:
    """Ball certificate: any subset with >= eps*n vertices lies in a ball of
    its diameter around each of its points, so the smallest radius whose
    ball reaches mass eps lower-bounds the subset diameter."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    k = math.ceil(eps * G.n)
    best_r, best_v = None, 0
    for v in range(G.n):
        row = np.sort(metric.d[v])
        r = int(row[k - 1])
        if best_r is None or r < best_r:
            best_r, best_v = r, v
    return REpsBound(
        value=best_r / metric.diameter,
        radius=int(best_r),
        center=best_v,
        diameter=metric.diameter,
        exact=False,
    )


def r_eps_exact(G: MultiGraph, metric: MetricTable, eps: float) -> REpsBound:
    """Exact minimum of diam(A)/diam(G) over subsets with |A| >= ceil(eps n),
    by enumeration (growing A beyond the threshold cannot shrink diam)."""
    if G.n > 16:
        raise ValueError("exact subset enumeration is gated at 16 vertices")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    k = math.ceil(eps * G.n)
    best = None
    best_subset: tuple[int, ...] = ()
    for subset in itertools.combinations(range(G.n), k):
        dia = 0
        for a, b in itertools.combinations(subset, 2):
            if metric.d[a, b] > dia:
                dia = int(metric.d[a, b])
            if best is not None and dia >= best:
                break
        else:
            if best is None or dia < best:
                best, best_subset = dia, subset
            continue
    return REpsBound(
        value=best / metric.diameter,
        radius=int(best),
        center=best_subset[0],
        diameter=metric.diameter,
        exact=True,
        subset=best_subset,
    )


# ----------------------------------------------------------------------
# Maximal displacement
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Displacement:
    value: int
    permutation: np.ndarray
    exact: bool
    mode: str


def _min_disp(metric: MetricTable, perm) -> int:
    return int(min(metric.d[v, perm[v]] for v in range(len(perm))))


def max_displacement(
    G: MultiGraph,
    metric: MetricTable,
    mode: str = "heuristic",
    seed: int = 0,
    samples: int = 200,
    action: PermutationAction | None = None,
) -> Displacement:
    """Best-over-permutations worst vertex movement D(G).

    brute: exact enumeration, |V| <= 8.  heuristic: seeded random
    permutations plus greedy 2-swaps (certified lower bound).  cayley: for
    a transitive action on itself, right translations are isometries; the
    best one gives a certified lower bound which equals D(G) whenever it
    reaches the diameter.
    """
    n = G.n
    if mode == "brute":
        if n > 8:
            raise ValueError("brute displacement is gated at 8 vertices")
        best, best_perm = -1, None
        for perm in itertools.permutations(range(n)):
            v = _min_disp(metric, perm)
            if v > best:
                best, best_perm = v, perm
        return Displacement(value=best, permutation=np.array(best_perm, dtype=np.int64), exact=True, mode=mode)
    if mode == "heuristic":
        rng = np.random.Generator(np.random.PCG64(seed))
        best, best_perm = -1, np.arange(n)
        for _ in range(samples):
            perm = rng.permutation(n)
            val = _min_disp(metric, perm)
            improved = True
            while improved:
                improved = False
                worst = [v for v in range(n) if metric.d[v, perm[v]] == val]
                for v in worst:
                    for w in range(n):
                        pv, pw = perm[v], perm[w]
                        new_v, new_w = metric.d[v, pw], metric.d[w, pv]
                        if min(new_v, new_w) > val:
                            perm[v], perm[w] = pw, pv
                            nval = _min_disp(metric, perm)
                            if nval > val:
                                val, improved = nval, True
                            break
                    if improved:
                        break
            if val > best:
                best, best_perm = val, perm.copy()
        return Displacement(value=int(best), permutation=best_perm, exact=best == metric.diameter, mode=mode)
    if mode == "cayley":
        if action is None or action.right_translations is None:
            raise ValueError("cayley mode needs an action on itself with right translations")
        if action.m != n:
            raise ValueError("action size does not match the graph")
        best, best_g = -1, 0
        for gidx in range(action.m):
            val = _min_disp(metric, action.right_translations[gidx])
            if val > best:
                best, best_g = val, gidx
        return Displacement(
            value=int(best),
            permutation=action.right_translations[best_g].copy(),
            exact=best == metric.diameter,
            mode=mode,
        )
    raise ValueError(f"unknown displacement mode {mode!r}")


# ----------------------------------------------------------------------
# Gap-based lower bounds
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BoundValue:
    value: float
    certified: bool
    label: str
    inputs: dict


def gn_bound(
    G: MultiGraph, gap: GapEstimate, p: float, eps: float, r_eps: float, metric: MetricTable | None = None
) -> BoundValue:
    """Concentration route:
    (1-eps)^(1/p) * r_eps/2 * diam * (gap / max_degree)^(1/p).

    Certified only when the gap value is exact; a descent estimate
    over-reports the infimum and the result is then a heuristic."""
    metric = metric or all_pairs_distances(G)
    value = (1 - eps) ** (1.0 / p) * (r_eps / 2.0) * metric.diameter * (gap.value / G.max_degree) ** (1.0 / p)
    certified = gap.bound_kind == "exact"
    return BoundValue(
        value=float(value),
        certified=certified,
        label="lower" if certified else "heuristic lower",
        inputs={"eps": eps, "r_eps": r_eps, "diam": metric.diameter, "max_degree": G.max_degree, "gap": gap.value},
    )


def jv_bound(G: MultiGraph, gap: GapEstimate, p: float, D: float | Displacement) -> BoundValue:
    """Displacement route: 2^(-(p-1)/p) * D * (gap / avg_degree)^(1/p)."""
    if isinstance(D, Displacement):
        d_val, d_cert = D.value, True  # any permutation's worst move lower-bounds D(G)
    else:
        d_val, d_cert = float(D), True
    k = G.average_degree
    value = 2.0 ** (-(p - 1.0) / p) * d_val * (gap.value / k) ** (1.0 / p)
    certified = gap.bound_kind == "exact" and d_cert
    return BoundValue(
        value=float(value),
        certified=certified,
        label="lower" if certified else "heuristic lower",
        inputs={"D": d_val, "avg_degree": k, "gap": gap.value},
    )


def jv_bound_exact_sq(D: int, gap: Fraction, avg_degree: Fraction) -> Fraction:
    """Squared displacement bound at p=2 in rational arithmetic:
    D^2 * gap / (2 * avg_degree)."""
    return Fraction(D) ** 2 * gap / (2 * avg_degree)


@dataclass(frozen=True)
class DistortionBounds:
    graph_id: str
    p: float
    q: float
    d: int
    gn_lower: float
    gn_eps: float
    jv_lower: float
    upper: float
    upper_description: str
    certified: bool

    def to_dict(self) -> dict:
        return {
            "graph": self.graph_id,
            "p": self.p,
            "q": self.q,
            "d": self.d,
            "gn_lower": self.gn_lower,
            "gn_eps": self.gn_eps,
            "jv_lower": self.jv_lower,
            "upper": self.upper,
            "upper_description": self.upper_description,
            "certified": self.certified,
        }


# ----------------------------------------------------------------------
# Coarse disjoint unions
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CoarseUnion:
    components: tuple[MultiGraph, ...]
    offsets: tuple[int, ...]  # first global index of each component
    metrics: tuple[MetricTable, ...]

    def component_index(self, global_v: int) -> tuple[int, int]:
        for i in range(len(self.components) - 1, -1, -1):
            if global_v >= self.offsets[i]:
                return i, global_v - self.offsets[i]
        raise IndexError(global_v)

    def cross_distance(self, i: int, j: int) -> int:
        # components are indexed from 1 in the separation rule
        a, b = self.metrics[i].diameter, self.metrics[j].diameter
        return a + b + (i + 1) + (j + 1)

    def distance(self, x: int, y: int) -> int:
        i, xi = self.component_index(x)
        j, yj = self.component_index(y)
        if i == j:
            return int(self.metrics[i].d[xi, yj])
        return self.cross_distance(i, j)

    @property
    def total_size(self) -> int:
        return self.offsets[-1] + self.components[-1].n

    def distance_matrix(self) -> np.ndarray:
        N = self.total_size
        M = np.zeros((N, N), dtype=np.int64)
        for x in range(N):
            for y in range(x + 1, N):
                M[x, y] = M[y, x] = self.distance(x, y)
        return M


def coarse_union(graphs: list[MultiGraph]) -> CoarseUnion:
    """Assemble the family into one metric space: path metric inside each
    component, and the minimal admissible constant
    diam_i + diam_j + (i+1) + (j+1) across components i < j.  The triangle
    inequality of the assembled matrix is verified as a construction guard.
    """
    if not graphs:
        raise ValueError("coarse_union needs at least one component")
    metrics = []
    offsets = []
    total = 0
    for G in graphs:
        if not G.connected:
            raise ValueError("coarse_union components must be connected")
        offsets.append(total)
        metrics.append(all_pairs_distances(G))
        total += G.n
    cu = CoarseUnion(components=tuple(graphs), offsets=tuple(offsets), metrics=tuple(metrics))
    if total <= 64:
        M = cu.distance_matrix()
        viol = (M[:, :, None] + M[None, :, :] < M[:, None, :]).any()
        if viol:
            raise AssertionError("triangle inequality violated in coarse union assembly")
    return cu


# ----------------------------------------------------------------------
# Compression-function exclusion
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExclusionVerdict:
    verdict: str  # excluded | not_excluded | inconclusive
    slope: float
    hypothesis_ok: bool
    details: dict


def austin_exclude(
    diams,
    c_lower,
    rho,
    slope_tol: float = 0.02,
    validation_points: int = 64,
) -> ExclusionVerdict:
    """Exclude rho as a compression function for coarse embeddings of the
    family union.

    Requires rho nondecreasing with rho(t)/t nonincreasing on the sampled
    range (else "inconclusive").  With valid certified lower bounds
    c_lower_n on the component distortions, a strictly growing trend of
    c_lower_n * rho(diam_n) / diam_n across the family (log-log slope above
    ``slope_tol``) yields "excluded"; otherwise "not_excluded".
    """
    diams = np.asarray(diams, dtype=np.float64)
    c_lower = np.asarray(c_lower, dtype=np.float64)
    if diams.shape != c_lower.shape or diams.size < 2:
        raise ValueError("need matching diam and lower-bound sequences of length >= 2")
    ts = np.geomspace(max(diams.min() * 0.5, 1e-9), diams.max() * 2.0, validation_points)
    vals = np.array([rho(t) for t in ts], dtype=np.float64)
    ok = bool(np.all(vals > 0)) and bool(np.all(np.diff(vals) >= -1e-12))
    ratio = vals / ts
    ok = ok and bool(np.all(np.diff(ratio) <= 1e-12 * np.abs(ratio[:-1]) + 1e-15))
    if not ok:
        return ExclusionVerdict(
            verdict="inconclusive",
            slope=float("nan"),
            hypothesis_ok=False,
            details={"reason": "rho fails the monotonicity hypotheses on the sampled range"},
        )
    growth = c_lower * np.array([rho(t) for t in diams]) / diams
    slope = float(np.polyfit(np.log(diams), np.log(growth), 1)[0])
    verdict = "excluded" if slope > slope_tol else "not_excluded"
    return ExclusionVerdict(
        verdict=verdict,
        slope=slope,
        hypothesis_ok=True,
        details={"growth_first": float(growth[0]), "growth_last": float(growth[-1]), "slope_tol": slope_tol},
    )
