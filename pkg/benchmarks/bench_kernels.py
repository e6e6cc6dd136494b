"""Benchmark the hot kernels: numba-jitted loops vs the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--repeats 5]

The numpy path is what you get with BANACHGAP_NO_NUMBA=1; this script times
both implementations in one process (when numba is importable) so the
numbers are directly comparable.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from banachgap._kernels import IMPLEMENTATIONS
from banachgap.graphs import gen_family
from banachgap.groups import action_from_group
from banachgap.spectral import mean_zero_basis


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def make_cases(seed: int = 7):
    rng = np.random.Generator(np.random.PCG64(seed))
    G = gen_family("random_regular", [60, 3], seed=seed)
    eu, ev, em = G.nonloop_arrays()
    F0 = np.ascontiguousarray(rng.standard_normal((G.n, 2)))

    K4 = gen_family("complete", [4])
    ku, kv, km = K4.nonloop_arrays()
    B = mean_zero_basis(4)
    b1, b2, b3 = (np.ascontiguousarray(B[:, j]) for j in range(3))

    cube = action_from_group("boolean_cube", 4)
    perms = np.ascontiguousarray(cube.perms)
    xi0 = np.ascontiguousarray(rng.standard_normal((cube.m, 4)))
    betas = np.array([1e1, 1e2, 1e3, 1e4])

    return {
        "descend (n=60, d=2, p=3)": lambda impl: impl["descend"](F0, eu, ev, em, 3.0, 2.0, 2000, 1e-12),
        "grid oracle sphere (K4, p=1.5)": lambda impl: impl["oracle_sphere"](b1, b2, b3, ku, kv, km, 1.5, 300, 600),
        "kappa descend (cube(4), d=4, p=3)": lambda impl: impl["kappa_descend"](xi0, perms, 3.0, betas, 250, 1e-12),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    cases = make_cases()
    numba_impl = IMPLEMENTATIONS["numba"]
    numpy_impl = IMPLEMENTATIONS["numpy"]
    if numba_impl is not None:
        for fn in cases.values():
            fn(numba_impl)  # compile outside the timings

    print(f"{'kernel':<36} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for name, fn in cases.items():
        t_np, out_np = _time(lambda: fn(numpy_impl), args.repeats)
        if numba_impl is None:
            print(f"{name:<36} {t_np * 1e3:9.1f}ms {'n/a':>10} {'n/a':>9}")
            continue
        t_nb, out_nb = _time(lambda: fn(numba_impl), args.repeats)
        v_np, v_nb = float(out_np[1]), float(out_nb[1])
        agree = abs(v_np - v_nb) <= 1e-6 * max(1.0, abs(v_np))
        note = "" if agree else f"  (values differ: {v_np:.6g} vs {v_nb:.6g})"
        print(f"{name:<36} {t_np * 1e3:9.1f}ms {t_nb * 1e3:9.1f}ms {t_np / t_nb:8.1f}x{note}")


if __name__ == "__main__":
    main()
