"""Command-line interface.

Exit codes are the machine contract:
  solve    0 stable, 3 subdivision, 4 regime failure, 2 bad input/parameters
  verify   0 certificate valid, 1 invalid, 2 bad input
  bench    0 all runs verified, 1 any verification failure, 2 bad input
  oracle   0 computed, 2 bad input
  gen      0 written, 2 bad input

Certificates and oracle answers go to stdout as JSON (or to --out when
given); prose reports go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path as FsPath

from .certificates import (
    CertificateSchemaError,
    StableSetCertificate,
    SubdivisionCertificate,
    certificate_from_json,
    certificate_to_json,
    verify_stable,
    verify_subdivision,
)
from .extractor import Params, extract
from .generators import chordal, gnp, planted_subdivision
from .graph import Graph, GraphFormatError, load_graph, save_graph
from .oracle import (
    OracleBudgetError,
    exact_max_stable,
    exhaustive_subdivision_search,
    induced_cycle_in_range,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_SUBDIVISION = 3
EXIT_REGIME = 4

_SCALED_DEFAULTS = {"star_constant": 8.0, "log_exponent": 1.0, "density_margin": 0.25}


def _err(msg: str):
    print(msg, file=sys.stderr)


def _load_graph_or_exit(path: str) -> Graph:
    try:
        return load_graph(path)
    except (OSError, GraphFormatError, ValueError) as exc:
        _err(f"error: cannot load graph {path}: {exc}")
        raise SystemExit(EXIT_INPUT)


def _build_params(args) -> Params:
    overrides = {}
    for name in ("star_constant", "log_exponent", "density_margin"):
        val = getattr(args, name)
        if val is not None:
            overrides[name] = val
    if args.mode == "faithful" and (overrides or args.force_pipeline):
        _err("error: faithful mode accepts no scaled overrides or --force-pipeline")
        raise SystemExit(EXIT_INPUT)
    merged = dict(_SCALED_DEFAULTS)
    merged.update(overrides)
    try:
        return Params(
            t=args.t, k=args.k, mode=args.mode,
            star_constant=merged["star_constant"],
            log_exponent=merged["log_exponent"],
            density_margin=merged["density_margin"],
            force_pipeline=args.force_pipeline,
            rng_seed=args.seed,
        )
    except ValueError as exc:
        _err(f"error: {exc}")
        raise SystemExit(EXIT_INPUT)


def _write_or_print(payload: str, out: str | None):
    if out:
        FsPath(out).write_text(payload + "\n")
    else:
        print(payload)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    g = _load_graph_or_exit(args.graph)
    params = _build_params(args)
    try:
        outcome = extract(g, params)
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    cert = outcome.certificate
    _write_or_print(certificate_to_json(cert), args.out)
    if args.trace:
        FsPath(args.trace).write_text("\n".join(outcome.trace) + "\n")
    if outcome.kind == "stable":
        _err(f"stable set of size {cert.size} (mode {cert.claimed_mode})")
        return EXIT_OK
    if outcome.kind == "subdivision":
        lens = sorted(cert.total_length(p) for p in cert.paths)
        _err(f"induced subdivision on {len(cert.branch)} branch vertices, "
             f"path lengths {lens}")
        return EXIT_SUBDIVISION
    _err(f"regime failure: {outcome.diagnostic}; "
         f"best stable set of size {cert.size} attached")
    return EXIT_REGIME


# ---------------------------------------------------------------------------
# verify


def _certificate_valid(g: Graph, cert) -> tuple[bool, str]:
    if isinstance(cert, StableSetCertificate):
        rep = verify_stable(g, cert)
        if not rep.is_stable:
            return False, "; ".join(rep.violations)
        if cert.claimed_mode == "faithful" and not rep.meets_faithful_bound:
            return False, "faithful certificate misses the guaranteed size"
        return True, f"stable set of size {rep.size}"
    rep = verify_subdivision(g, cert)
    if not rep.ok:
        return False, "; ".join(rep.violations)
    return True, f"subdivision on {len(cert.branch)} branch vertices"


def cmd_verify(args) -> int:
    g = _load_graph_or_exit(args.graph)
    try:
        cert = certificate_from_json(FsPath(args.certificate).read_text())
    except (OSError, CertificateSchemaError) as exc:
        _err(f"error: cannot load certificate: {exc}")
        return EXIT_INPUT
    try:
        ok, detail = _certificate_valid(g, cert)
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    if ok:
        _err(f"valid: {detail}")
        return EXIT_OK
    _err(f"invalid: {detail}")
    return EXIT_INVALID


# ---------------------------------------------------------------------------
# bench


def _deepest_claim(trace: tuple[str, ...]) -> int:
    deepest = 0
    for line in trace:
        if line.startswith("claim="):
            deepest = max(deepest, int(line.split(" ", 1)[0][6:]))
    return deepest


def _bench_one(task):
    path, params_kw = task
    g = load_graph(path)
    params = Params(**params_kw)
    started = time.perf_counter()
    outcome = extract(g, params)
    elapsed = time.perf_counter() - started
    cert = outcome.certificate
    ok, _ = _certificate_valid(g, cert)
    if outcome.kind == "stable" or outcome.kind == "regime-failure":
        size = f"|S|={cert.size}"
    else:
        lens = sorted(cert.total_length(p) for p in cert.paths)
        size = "lens=" + ",".join(map(str, lens))
    return {
        "name": FsPath(path).name,
        "n": g.n,
        "m": g.m,
        "outcome": outcome.kind,
        "detail": size,
        "seconds": elapsed,
        "deepest": _deepest_claim(outcome.trace),
        "verified": ok,
        "json": certificate_to_json(cert),
        "trace": "\n".join(outcome.trace),
    }


def cmd_bench(args) -> int:
    corpus = sorted(FsPath(args.corpus).glob("*.graph"))
    if not corpus:
        _err(f"error: no *.graph files under {args.corpus}")
        return EXIT_INPUT
    params = _build_params(args)
    params_kw = {
        "t": params.t, "k": params.k, "mode": params.mode,
        "star_constant": params.star_constant,
        "log_exponent": params.log_exponent,
        "density_margin": params.density_margin,
        "force_pipeline": params.force_pipeline,
        "rng_seed": params.rng_seed,
    }
    tasks = [(str(p), params_kw) for p in corpus]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    rows.sort(key=lambda r: r["name"])

    if args.out_dir:
        outd = FsPath(args.out_dir)
        outd.mkdir(parents=True, exist_ok=True)
        for row in rows:
            stem = row["name"].removesuffix(".graph")
            (outd / f"{stem}.cert.json").write_text(row["json"] + "\n")
            (outd / f"{stem}.trace").write_text(row["trace"] + "\n")

    header = f"{'instance':<28} {'n':>6} {'m':>8} {'outcome':<15} {'detail':<22} {'sec':>8} {'claim':>5} ok"
    print(header)
    print("-" * len(header))
    fails = 0
    for row in rows:
        mark = "y" if row["verified"] else "N"
        if not row["verified"]:
            fails += 1
        print(f"{row['name']:<28} {row['n']:>6} {row['m']:>8} {row['outcome']:<15} "
              f"{row['detail']:<22} {row['seconds']:>8.3f} {row['deepest']:>5} {mark}")
    total = len(rows)
    _err(f"verified {total - fails}/{total} outcomes "
         f"({100.0 * (total - fails) / total:.1f}%)")
    return EXIT_OK if fails == 0 else EXIT_INVALID


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle(args) -> int:
    g = _load_graph_or_exit(args.graph)
    try:
        if args.which == "stable":
            members = exact_max_stable(g, size_limit=args.size_limit,
                                       node_budget=args.node_budget)
            payload = {"op": "stable", "size": len(members), "members": list(members)}
        elif args.which == "cycle":
            cyc = induced_cycle_in_range(g, args.lo, args.hi,
                                         node_budget=args.node_budget)
            payload = {"op": "cycle", "found": cyc is not None,
                       "vertices": list(cyc) if cyc else None}
        else:
            max_len = args.max_len if args.max_len > 0 else None
            cert = exhaustive_subdivision_search(
                g, args.t, min_len=args.min_len, max_len=max_len,
                size_limit=args.size_limit, node_budget=args.node_budget)
            payload = {"op": "subdivision", "found": cert is not None,
                       "certificate": None if cert is None
                       else json.loads(certificate_to_json(cert))}
    except (ValueError, OracleBudgetError) as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    _write_or_print(json.dumps(payload, sort_keys=True, separators=(",", ":")),
                    args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _parse_lengths(t: int, raw: str | None, uniform: int | None):
    pairs = [(i, j) for i in range(1, t + 1) for j in range(i + 1, t + 1)]
    if raw is None:
        return {p: (uniform if uniform else 3) for p in pairs}
    vals = [int(v) for v in raw.split(",")]
    if len(vals) != len(pairs):
        raise ValueError(
            f"--lengths needs {len(pairs)} comma-separated values "
            f"(pairs in lexicographic order {pairs})")
    return dict(zip(pairs, vals))


def cmd_gen(args) -> int:
    meta = {"generator": args.kind, "seed": args.seed}
    try:
        if args.kind == "gnp":
            g = gnp(args.n, args.p, args.seed)
            meta.update(n=args.n, p=args.p)
            cert = None
        elif args.kind == "chordal":
            g, peo = chordal(args.n, args.seed, max_clique_size=args.max_clique_size)
            meta.update(n=args.n, max_clique_size=args.max_clique_size,
                        elimination_order=peo)
            cert = None
        else:
            lengths = _parse_lengths(args.t, args.lengths, args.length)
            g, cert = planted_subdivision(args.t, lengths, args.noise_n,
                                          args.noise_p, args.seed)
            meta.update(t=args.t, noise_n=args.noise_n, noise_p=args.noise_p,
                        lengths={f"{i},{j}": v for (i, j), v in lengths.items()})
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT
    save_graph(g, args.out)
    meta.update(vertices=g.n, edges=g.m)
    if args.meta:
        FsPath(args.meta).write_text(
            json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n")
    if cert is not None and args.cert:
        FsPath(args.cert).write_text(certificate_to_json(cert) + "\n")
    _err(f"wrote {args.out}: n={g.n} m={g.m}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_solve_params(p: argparse.ArgumentParser):
    p.add_argument("--t", type=int, default=3, help="branch vertex count (>= 3)")
    p.add_argument("--k", type=int, default=2, help="declared clique bound (>= 1)")
    p.add_argument("--mode", choices=("faithful", "scaled"), default="faithful")
    p.add_argument("--star-constant", dest="star_constant", type=float, default=None)
    p.add_argument("--log-exponent", dest="log_exponent", type=float, default=None)
    p.add_argument("--density-margin", dest="density_margin", type=float, default=None)
    p.add_argument("--force-pipeline", action="store_true",
                   help="scaled mode only: skip early stable exits at top level")
    p.add_argument("--seed", type=int, default=0, help="reserved; runs are deterministic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stablediv",
        description="certified stable-set / induced-subdivision dichotomy")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the extraction on a graph file")
    p.add_argument("graph")
    _add_solve_params(p)
    p.add_argument("--out", default=None, help="write certificate JSON here")
    p.add_argument("--trace", default=None, help="write the decision trace here")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="check a certificate against a graph")
    p.add_argument("graph")
    p.add_argument("certificate")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="run and verify a corpus of graph files")
    p.add_argument("corpus", help="directory containing *.graph files")
    _add_solve_params(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", dest="out_dir", default=None,
                   help="write per-instance certificates and traces here")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("oracle", help="exhaustive reference computations")
    osub = p.add_subparsers(dest="which", required=True)
    for which in ("stable", "cycle", "subdivision"):
        q = osub.add_parser(which)
        q.add_argument("graph")
        q.add_argument("--out", default=None)
        q.add_argument("--node-budget", dest="node_budget", type=int,
                       default=5_000_000)
        if which == "stable":
            q.add_argument("--size-limit", dest="size_limit", type=int, default=40)
        elif which == "cycle":
            q.add_argument("--lo", type=int, required=True)
            q.add_argument("--hi", type=int, required=True)
        else:
            q.add_argument("--t", type=int, default=3)
            q.add_argument("--min-len", dest="min_len", type=int, default=3)
            q.add_argument("--max-len", dest="max_len", type=int, default=0,
                           help="0 means floor(log2 n)^2")
            q.add_argument("--size-limit", dest="size_limit", type=int, default=40)
        q.set_defaults(fn=cmd_oracle, which=which)

    p = sub.add_parser("gen", help="write a deterministic test instance")
    gsub = p.add_subparsers(dest="kind", required=True)
    q = gsub.add_parser("gnp")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--p", type=float, required=True)
    q = gsub.add_parser("chordal")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--max-clique-size", dest="max_clique_size", type=int, default=6)
    q = gsub.add_parser("planted")
    q.add_argument("--t", type=int, default=3)
    q.add_argument("--lengths", default=None,
                   help="comma-separated total lengths, pairs in lexicographic order")
    q.add_argument("--length", type=int, default=None,
                   help="one total length for every pair")
    q.add_argument("--noise-n", dest="noise_n", type=int, default=0)
    q.add_argument("--noise-p", dest="noise_p", type=float, default=0.0)
    q.add_argument("--cert", default=None, help="write the planted certificate here")
    for q in gsub.choices.values():
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", required=True)
        q.add_argument("--meta", default=None, help="write generator metadata here")
        q.set_defaults(fn=cmd_gen)
    for kind, q in gsub.choices.items():
        q.set_defaults(kind=kind)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
