"""Signed-power maps between unit spheres of l_p^d spaces, homogeneous
extensions, blockwise stabilizations, and empirical modulus estimation.

The sphere map with source exponent p and target exponent q sends
``a_i -> sign(a_i) |a_i|^(p/q)`` coordinatewise; it carries S(l_p^d) onto
S(l_q^d) exactly and inverts to the (q, p) map.  For target exponent 2 the
classical upper moduli of continuity are ``(p/2) t`` when p >= 2 and
``4 t^(p/2)`` when p < 2.  A sphere map with modulus C t^alpha stabilizes
blockwise (extend by homogeneity, apply per block) with modulus
``(2C+2) t^alpha`` in the block-l_p norm, for every p >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SphereVector",
    "SphereMap",
    "ModulusEstimate",
    "StabilizedCheck",
    "mazur_map",
    "mazur_sphere_map",
    "identity_sphere_map",
    "canonical_extension",
    "stabilized_map",
    "stabilized_modulus",
    "sphere_sample",
    "estimate_modulus",
    "check_stabilized_modulus",
    "SAMPLERS",
]

_UNIT_TOL = 1e-9


def _lp_norm(x: np.ndarray, p: float, axis=None):
    return (np.abs(x) ** p).sum(axis=axis) ** (1.0 / p)


@dataclass(frozen=True)
class SphereVector:
    """A point of the unit sphere of l_r^d."""

    coords: np.ndarray
    exponent: float

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=np.float64)
        object.__setattr__(self, "coords", arr)
        nrm = float(_lp_norm(arr, self.exponent))
        if abs(nrm - 1.0) > _UNIT_TOL:
            raise ValueError(f"not a unit vector: ||x||_{self.exponent} = {nrm}")


@dataclass(frozen=True)
class SphereMap:
    """A map between unit spheres, with an optional known power modulus.

    ``fn`` acts on batches: (N, d) -> (N, d).  ``modulus = (C, alpha)``
    certifies ||phi(x)-phi(y)|| <= C ||x-y||^alpha on the source sphere.
    """

    source_p: float
    target_p: float
    fn: Callable[[np.ndarray], np.ndarray]
    name: str
    modulus: tuple[float, float] | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.fn(x)


def _signed_power(a: np.ndarray, e: float) -> np.ndarray:
    return np.sign(a) * np.abs(a) ** e


def mazur_map(x: SphereVector, q: float) -> SphereVector:
    """Send a unit vector of l_p to the unit vector of l_q with the same
    coordinate mass distribution."""
    p = x.exponent
    return SphereVector(_signed_power(x.coords, p / q), q)


def mazur_sphere_map(p: float, q: float) -> SphereMap:
    if p < 1 or q < 1:
        raise ValueError("exponents must be >= 1")
    mod = None
    if q == 2.0:
        mod = (p / 2.0, 1.0) if p >= 2.0 else (4.0, p / 2.0)

    def fn(batch: np.ndarray) -> np.ndarray:
        return _signed_power(batch, p / q)

    return SphereMap(source_p=float(p), target_p=float(q), fn=fn, name=f"M[{p}->{q}]", modulus=mod)


def identity_sphere_map(p: float) -> SphereMap:
    return SphereMap(source_p=float(p), target_p=float(p), fn=lambda b: b.copy(), name="id", modulus=(1.0, 1.0))


def canonical_extension(phi: SphereMap, x: np.ndarray) -> np.ndarray:
    """Degree-1 homogeneous extension: ||x|| phi(x/||x||), and 0 at 0."""
    x = np.asarray(x, dtype=np.float64)
    nrm = float(_lp_norm(x, phi.source_p))
    if nrm == 0.0:
        return np.zeros_like(x)
    return nrm * phi.fn(x[None, :] / nrm)[0]


def _extension_batch(phi: SphereMap, rows: np.ndarray) -> np.ndarray:
    """canonical_extension applied to each row of (k, d)."""
    nrm = _lp_norm(rows, phi.source_p, axis=1)
    out = np.zeros_like(rows)
    pos = nrm > 0.0
    if pos.any():
        out[pos] = nrm[pos, None] * phi.fn(rows[pos] / nrm[pos, None])
    return out


def stabilized_map(phi: SphereMap, xi: np.ndarray, p: float) -> np.ndarray:
    """Blockwise homogeneous extension on a block-l_p unit vector.

    ``xi`` is (k, d): k blocks on the sphere of l_p(blocks, source space).
    The output has block-l_p norm 1 and commutes with block permutations by
    construction.
    """
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim != 2:
        raise ValueError("xi must be a (blocks, dim) array")
    src = _lp_norm(_lp_norm(xi, phi.source_p, axis=1), p)
    if abs(src - 1.0) > _UNIT_TOL:
        raise ValueError(f"input block norm is {src}, expected 1")
    return _extension_batch(phi, xi)


def stabilized_modulus(phi: SphereMap) -> tuple[float, float]:
    """(2C+2, alpha) from the base modulus (C, alpha)."""
    if phi.modulus is None:
        raise ValueError(f"sphere map {phi.name} carries no certified modulus")
    C, alpha = phi.modulus
    return 2.0 * C + 2.0, alpha


# ----------------------------------------------------------------------
# Sampling
# ----------------------------------------------------------------------


def sphere_sample(rng: np.random.Generator, count: int, d: int, p: float) -> np.ndarray:
    """Uniform samples on the l_p^d unit sphere (generalized-normal trick)."""
    g = rng.gamma(shape=1.0 / p, scale=1.0, size=(count, d)) ** (1.0 / p)
    g *= rng.choice(np.array([-1.0, 1.0]), size=(count, d))
    return g / _lp_norm(g, p, axis=1)[:, None]


def _pairs_uniform(rng, count, d, p):
    return sphere_sample(rng, count, d, p), sphere_sample(rng, count, d, p)


def _pairs_antipodal(rng, count, d, p):
    x = sphere_sample(rng, count, d, p)
    return x, -x


def _pairs_near(rng, count, d, p):
    # Perturbation scale log-uniform in [1e-6, 1]: moduli matter as eps -> 0,
    # which uniform pairs almost never probe.
    x = sphere_sample(rng, count, d, p)
    scale = 10.0 ** rng.uniform(-6.0, 0.0, size=count)
    y = x + scale[:, None] * rng.standard_normal((count, d))
    nrm = _lp_norm(y, p, axis=1)
    nrm[nrm == 0.0] = 1.0
    return x, y / nrm[:, None]


SAMPLERS = {
    "uniform_sphere": _pairs_uniform,
    "antipodal_pairs": _pairs_antipodal,
    "near_pairs": _pairs_near,
}


@dataclass(frozen=True)
class ModulusEstimate:
    eps: np.ndarray
    delta: np.ndarray
    fitted_C: float
    fitted_alpha: float
    violations: int | None
    n_samples: int

    def summary(self) -> dict:
        return {
            "C": self.fitted_C,
            "alpha": self.fitted_alpha,
            "violations": self.violations,
            "n_samples": self.n_samples,
        }


def _fit_envelope(eps: np.ndarray, delta: np.ndarray, bins: int = 64) -> tuple[float, float]:
    """log-log regression through per-bin maxima of delta over log-spaced
    eps bins; robust upper-envelope estimate."""
    pos = (eps > 0) & (delta > 0)
    eps, delta = eps[pos], delta[pos]
    if eps.size < 2:
        return 1.0, 1.0
    lo, hi = eps.min(), eps.max()
    if hi <= lo:
        return float(delta.max() / lo), 1.0
    edges = np.geomspace(lo, hi * (1 + 1e-12), bins + 1)
    idx = np.clip(np.searchsorted(edges, eps, side="right") - 1, 0, bins - 1)
    xs, ys = [], []
    for b in range(bins):
        sel = np.nonzero(idx == b)[0]
        if sel.size:
            top = sel[int(np.argmax(delta[sel]))]
            xs.append(math.log(eps[top]))
            ys.append(math.log(delta[top]))
    if len(xs) < 2:
        return float(delta.max() / eps.max()), 1.0
    slope, intercept = np.polyfit(np.array(xs), np.array(ys), 1)
    alpha = float(min(max(slope, 1e-9), 1.0))
    return float(math.exp(intercept)), alpha


def estimate_modulus(
    phi: SphereMap,
    sampler: str,
    n_samples: int,
    seed: int = 0,
    d: int = 16,
    bound: tuple[float, float] | None = None,
) -> ModulusEstimate:
    """Sample pairs on the source sphere, record (eps, delta) and fit the
    upper envelope to C t^alpha.  If ``bound=(C0, alpha0)`` is supplied,
    count pairs with delta > C0 eps^alpha0 (up to 1e-9 relative float
    slack)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if sampler not in SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    x, y = SAMPLERS[sampler](rng, n_samples, d, phi.source_p)
    eps = _lp_norm(x - y, phi.source_p, axis=1)
    delta = _lp_norm(phi.fn(x) - phi.fn(y), phi.target_p, axis=1)
    C, alpha = _fit_envelope(eps, delta)
    violations = None
    if bound is not None:
        C0, a0 = bound
        violations = int((delta > C0 * eps**a0 * (1 + 1e-9)).sum())
    return ModulusEstimate(eps=eps, delta=delta, fitted_C=C, fitted_alpha=alpha, violations=violations, n_samples=n_samples)


@dataclass(frozen=True)
class StabilizedCheck:
    violations: int
    max_ratio: float
    bound_C: float
    alpha: float
    n_samples: int


def _block_pairs(rng, count, k, d, p, phi_p):
    """Pairs on the sphere of l_p(k blocks, l_{phi_p}^d); half of them near."""
    def normalize(z):
        nrm = _lp_norm(_lp_norm(z, phi_p, axis=2), p, axis=1)
        nrm[nrm == 0.0] = 1.0
        return z / nrm[:, None, None]

    x = normalize(rng.standard_normal((count, k, d)))
    y = rng.standard_normal((count, k, d))
    half = count // 2
    scale = 10.0 ** rng.uniform(-6.0, 0.0, size=half)
    y[:half] = x[:half] + scale[:, None, None] * y[:half]
    return x, normalize(y)


def check_stabilized_modulus(
    phi: SphereMap,
    k: int,
    p: float,
    n_samples: int,
    seed: int = 0,
    d: int = 8,
) -> StabilizedCheck:
    """Count violations of the stabilized bound (2C+2) t^alpha over sampled
    block-vector pairs; the expected count is 0."""
    bound_C, alpha = stabilized_modulus(phi)
    rng = np.random.Generator(np.random.PCG64(seed))
    x, y = _block_pairs(rng, n_samples, k, d, p, phi.source_p)
    eps = _lp_norm(_lp_norm(x - y, phi.source_p, axis=2), p, axis=1)
    fx = np.stack([_extension_batch(phi, row) for row in x])
    fy = np.stack([_extension_batch(phi, row) for row in y])
    delta = _lp_norm(_lp_norm(fx - fy, phi.target_p, axis=2), p, axis=1)
    pos = eps > 0
    ratio = delta[pos] / (bound_C * eps[pos] ** alpha)
    violations = int((ratio > 1 + 1e-9).sum())
    return StabilizedCheck(
        violations=violations,
        max_ratio=float(ratio.max()) if ratio.size else 0.0,
        bound_C=bound_C,
        alpha=alpha,
        n_samples=n_samples,
    )
