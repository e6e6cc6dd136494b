"""Command-line surface.

Subcommands: gen, gap, kappa, gross, distort, mazur, verify.  Artifacts are
JSON (floats serialized at 12 significant digits, so a fixed seed and
acceleration mode reproduce byte-identical output) or CSV.  Exit codes:
0 success, 1 failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import mazur as mazur_mod
from .acceptance import FAST_IDS, SUITE_IDS, format_table, run_suite
from .distortion import (
    DistortionBounds,
    frechet_embedding,
    gn_bound,
    hamming_identity_embedding,
    jv_bound,
    map_distortion,
    max_displacement,
    r_eps_lower,
)
from .graphs import MultiGraph, all_pairs_distances, gen_family, graph_to_json, read_edge_list, write_edge_list
from .groups import action_from_group, verify_sandwich, write_action_file
from .realization import schreier_realize, spec_to_action, verify_realization
from .spectral import gap_estimate, gap_exact_2, gap_oracle_small

__all__ = ["main"]


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round_floats(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return _round_floats(float(obj))
    return obj


def dump_json(obj, path: str | None = None) -> str:
    text = json.dumps(_round_floats(obj), sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def dump_csv(rows: list[dict], path: str) -> None:
    if not rows:
        return
    cols = list(rows[0].keys())
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(row[c]) for c in cols) + "\n")


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _load_graph(args) -> MultiGraph:
    if getattr(args, "file", None):
        return read_edge_list(args.file)
    if getattr(args, "gen", None):
        kind, _, rest = args.gen.partition(":")
        params = [int(x) for x in rest.split(",")] if rest else []
        return gen_family(kind, params, seed=args.seed)
    raise SystemExit("one of --gen KIND:PARAMS or --file PATH is required")


def _load_action(spec: str):
    kind, _, rest = spec.partition(":")
    params = [int(x) for x in rest.split(",")] if rest else []
    return action_from_group(kind, *params)


def _out_path(args, name: str) -> str | None:
    if not args.out:
        return None
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _emit(args, payload: dict, name: str) -> None:
    text = dump_json(payload, _out_path(args, name))
    sys.stdout.write(text)


# ----------------------------------------------------------------------


def cmd_gen(args) -> int:
    G = _load_graph(args)
    if args.out:
        write_edge_list(G, _out_path(args, "graph.edges"))
    sys.stdout.write(graph_to_json(G) + "\n")
    return 0


def cmd_gap(args) -> int:
    G = _load_graph(args)
    method = args.method
    if method == "auto":
        method = "exact" if (args.p == 2.0 and args.q == 2.0 and args.d == 1) else "estimate"
    if method == "exact":
        est = gap_exact_2(G)
    elif method == "oracle":
        est = gap_oracle_small(G, p=args.p, resolution=args.resolution)
    else:
        est = gap_estimate(
            G, p=args.p, q=args.q, d=args.d, restarts=args.restarts, max_iter=args.max_iter,
            tol=args.tol, seed=args.seed, threads=args.threads,
        )
    _emit(args, est.to_dict(), "gap.json")
    if args.dump_minimizer and args.out:
        dump_csv(
            [{f"c{j}": float(x) for j, x in enumerate(row)} for row in est.minimizer.values],
            _out_path(args, "minimizer.csv"),
        )
    return 0


def cmd_kappa(args) -> int:
    action = _load_action(args.group)
    rep = verify_sandwich(
        action, p=args.p, d=args.d, nu=args.nu, seed=args.seed, restarts=args.restarts
    )
    payload = {
        "group": args.group,
        "kappa": rep.kappa.to_dict(),
        "gap": rep.gap.to_dict(),
        "generators": rep.generators,
        "sandwich": {
            "lower_ok": rep.lower_ok,
            "upper_ok": rep.upper_ok,
            "orbit_lower_ok": rep.orbit_lower_ok,
            "slacks": rep.slacks,
            "tolerance": rep.tolerance,
        },
    }
    _emit(args, payload, "kappa.json")
    return 0 if rep.ok else 1


def cmd_gross(args) -> int:
    G = _load_graph(args)
    spec = schreier_realize(G, seed=args.seed)
    ok, diff = verify_realization(spec)
    payload = {
        "input_n": G.n,
        "regularized_degree": spec.base.max_degree,
        "factors": len(spec.perms),
        "verified": ok,
        "diff": {f"{k}": v for k, v in diff.items()},
        "provenance": list(spec.provenance),
    }
    if args.out:
        write_action_file(spec_to_action(spec), _out_path(args, "action.txt"))
        write_edge_list(spec.base, _out_path(args, "regularized.edges"))
        dump_json({"provenance": list(spec.provenance), "seed": args.seed}, _out_path(args, "provenance.json"))
    _emit(args, payload, "gross.json")
    if args.verify and not ok:
        return 1
    return 0


def _distortion_row(G: MultiGraph, graph_id: str, kind: str, p: float, q: float, d: int, eps: float, seed: int, restarts: int) -> DistortionBounds:
    met = all_pairs_distances(G)
    gap = gap_exact_2(G) if p == 2.0 else gap_estimate(G, p=p, q=p, d=1, seed=seed, restarts=restarts)
    reps = r_eps_lower(G, met, eps)
    if kind == "hamming":
        nbits = int(round(np.log2(G.n)))
        F = hamming_identity_embedding(nbits)
        upper_desc = "identity cube embedding"
        disp = max_displacement(G, met, "cayley", action=action_from_group("boolean_cube", nbits))
    else:
        F = frechet_embedding(G, met)
        upper_desc = "distance-row embedding"
        mode = "brute" if G.n <= 8 else "heuristic"
        disp = max_displacement(G, met, mode, seed=seed)
    upper = map_distortion(G, F, q=q, metric=met).value
    gn = gn_bound(G, gap, p=p, eps=eps, r_eps=reps.value, metric=met)
    jv = jv_bound(G, gap, p=p, D=disp)
    return DistortionBounds(
        graph_id=graph_id,
        p=p,
        q=q,
        d=d,
        gn_lower=gn.value,
        gn_eps=eps,
        jv_lower=jv.value,
        upper=upper,
        upper_description=upper_desc,
        certified=gn.certified and jv.certified,
    )


def cmd_distort(args) -> int:
    if args.family:
        kind = (args.gen or "hamming").partition(":")[0]
        lo, _, hi = args.family.partition(":")
        rows = []
        for n in range(int(lo), int(hi) + 1):
            G = gen_family(kind, [n], seed=args.seed)
            row = _distortion_row(G, f"{kind}:{n}", kind, args.p, args.q, args.d, args.eps, args.seed, args.restarts)
            met_diam = all_pairs_distances(G).diameter
            if kind == "hamming":
                target = n ** (1.0 - 1.0 / args.p) if args.p < 2.0 else n**0.5
            else:
                target = float("nan")
            rows.append(
                {
                    "n": n,
                    "diam": met_diam,
                    "gn_lower": row.gn_lower,
                    "jv_lower": row.jv_lower,
                    "upper": row.upper,
                    "target_order": target,
                }
            )
        if args.out:
            dump_csv(rows, _out_path(args, "family.csv"))
        sys.stdout.write(dump_json(rows))
        return 0
    G = _load_graph(args)
    kind = args.gen.partition(":")[0] if args.gen else ""
    row = _distortion_row(G, args.gen or args.file, kind, args.p, args.q, args.d, args.eps, args.seed, args.restarts)
    _emit(args, row.to_dict(), "distortion.json")
    return 0


def cmd_mazur(args) -> int:
    phi = mazur_mod.mazur_sphere_map(args.p, args.q)
    est = mazur_mod.estimate_modulus(
        phi, args.sampler, args.pairs, seed=args.seed, d=args.dim, bound=phi.modulus
    )
    payload = {"map": phi.name, **est.summary()}
    if phi.modulus:
        payload["bound"] = {"C": phi.modulus[0], "alpha": phi.modulus[1]}
    if args.blocks:
        chk = mazur_mod.check_stabilized_modulus(phi, k=args.blocks, p=args.block_p, n_samples=args.pairs, seed=args.seed)
        payload["stabilized"] = {
            "blocks": args.blocks,
            "block_p": args.block_p,
            "violations": chk.violations,
            "bound_C": chk.bound_C,
            "alpha": chk.alpha,
            "max_ratio": chk.max_ratio,
        }
    if args.out:
        dump_csv(
            [{"eps": float(e), "delta": float(dl)} for e, dl in zip(est.eps, est.delta)],
            _out_path(args, "modulus.csv"),
        )
    _emit(args, payload, "mazur.json")
    bad = (est.violations or 0) + (payload.get("stabilized", {}).get("violations", 0) if args.blocks else 0)
    return 1 if bad else 0


def cmd_verify(args) -> int:
    if args.suite == "all":
        ids = SUITE_IDS
    elif args.suite == "fast":
        ids = FAST_IDS
    else:
        ids = [tok.strip() for tok in args.suite.split(",")]
        unknown = [i for i in ids if i not in SUITE_IDS]
        if unknown:
            raise SystemExit(f"unknown criterion ids: {unknown}")
    results = run_suite(ids, seed=args.seed)
    sys.stdout.write(format_table(results) + "\n")
    if args.out:
        dump_json(
            [
                {"id": r.cid, "title": r.title, "passed": r.passed, "elapsed": r.elapsed, "details": r.details}
                for r in results
            ],
            _out_path(args, "verify.json"),
        )
    return 0 if all(r.passed for r in results) else 1


# ----------------------------------------------------------------------


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gen", help="generator spec KIND:P1,P2 (cycle, complete, hamming, random_regular, margulis, path)")
    p.add_argument("--file", help="edge-list file (header 'n m', lines 'u v mult')")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory for artifacts")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="banachgap", description=__doc__)
    ap.add_argument("--version", action="version", version="banachgap 0.1.0")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph and write/echo it")
    _add_graph_source(g)
    _add_common(g)
    g.set_defaults(fn=cmd_gen)

    g = sub.add_parser("gap", help="spectral gap (exact at p=q=2, d=1; descent otherwise)")
    _add_graph_source(g)
    _add_common(g)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--q", type=float, default=2.0)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--method", choices=("auto", "exact", "estimate", "oracle"), default="auto")
    g.add_argument("--restarts", type=int, default=32)
    g.add_argument("--max-iter", type=int, default=5000)
    g.add_argument("--tol", type=float, default=1e-10)
    g.add_argument("--resolution", type=float, default=1e-3, help="grid oracle resolution")
    g.add_argument("--dump-minimizer", action="store_true")
    g.set_defaults(fn=cmd_gap)

    g = sub.add_parser("kappa", help="displacement constant and the two-sided gap sandwich")
    _add_common(g)
    g.add_argument("--group", required=True, help="cyclic:N | boolean_cube:N | symmetric:N | sl_mod:N,K")
    g.add_argument("--p", type=float, default=2.0)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--nu", type=int, help="generator-orbit symmetry factor for the sharpened lower bound")
    g.add_argument("--restarts", type=int, default=16)
    g.set_defaults(fn=cmd_kappa)

    g = sub.add_parser("gross", help="even regularization + 2-factorization realization")
    _add_graph_source(g)
    _add_common(g)
    g.add_argument("--verify", action="store_true", help="exit 1 if the realization check fails")
    g.set_defaults(fn=cmd_gross)

    g = sub.add_parser("distort", help="distortion bounds (concentration, displacement, embedding upper)")
    _add_graph_source(g)
    _add_common(g)
    g.add_argument("--p", type=float, default=2.0)
    g.add_argument("--q", type=float, default=2.0)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--eps", type=float, default=0.5)
    g.add_argument("--restarts", type=int, default=16)
    g.add_argument("--family", help="LO:HI size sweep of the --gen kind, emitted as a CSV table")
    g.set_defaults(fn=cmd_distort)

    g = sub.add_parser("mazur", help="sphere-map modulus estimation and checks")
    _add_common(g)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--q", type=float, default=2.0)
    g.add_argument("--dim", type=int, default=16)
    g.add_argument("--pairs", type=int, default=100000)
    g.add_argument("--sampler", choices=tuple(mazur_mod.SAMPLERS), default="near_pairs")
    g.add_argument("--blocks", type=int, default=0, help="also check the k-block stabilized modulus")
    g.add_argument("--block-p", type=float, default=2.0)
    g.set_defaults(fn=cmd_mazur)

    g = sub.add_parser("verify", help="run the acceptance suite")
    _add_common(g)
    g.add_argument("--suite", default="all", help="all | fast | comma-separated ids")
    g.set_defaults(fn=cmd_verify)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, RuntimeError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
