#!/usr/bin/env python3
"""Microbenchmark of the packed-bitset kernels: numpy baseline vs the
compiled backend, plus an optional end-to-end extraction comparison.

Usage:
    python3 benchmarks/kernel_bench.py [--sizes 256,1024,4096] [--repeats 9]
                                       [--end-to-end]

The end-to-end pass launches subprocesses with STABLEDIV_BACKEND set, since
the backend is chosen at import time.
"""

import argparse
import statistics
import subprocess
import sys
import time

import numpy as np

from stablediv import _kernels as K


def random_instance(n: int, density: float, seed: int):
    rng = np.random.default_rng(seed)
    words = K.words_for(n)
    adj = rng.integers(0, 2 ** 63, size=(n, words), dtype=np.int64).view(np.uint64)
    keep = rng.random((n, words)) < density
    adj *= keep.astype(np.uint64)
    # clear the tail bits past n so popcounts stay honest
    tail = n & 63
    if tail:
        adj[:, -1] &= np.uint64((1 << tail) - 1)
    active = np.empty(words, dtype=np.uint64)
    active.fill(np.uint64(0xFFFFFFFFFFFFFFFF))
    if tail:
        active[-1] = np.uint64((1 << tail) - 1)
    idx = rng.choice(n, size=max(1, n // 4), replace=False).astype(np.int64)
    idx.sort()
    return adj, active, idx


def bench_one(fn, args, repeats: int) -> float:
    fn(*args)  # warm (JIT compile, cache fill)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def kernel_table(sizes, repeats):
    impls = {"numpy": K.IMPLS["numpy"]}
    try:
        impls["numba"] = K.load_numba_impl()
    except ImportError:
        print("numba unavailable; benchmarking the numpy baseline only")

    header = f"{'kernel':<16}{'n':>6}" + "".join(f"{name:>12}" for name in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for n in sizes:
        adj, active, idx = random_instance(n, 0.3, seed=n)
        mask = active
        workloads = {
            "popcount_words": lambda impl: (impl.popcount_words, (adj[0],)),
            "or_rows": lambda impl: (impl.or_rows, (adj, idx)),
            "counts_within": lambda impl: (impl.counts_within, (adj, mask, idx)),
            "greedy_stable": lambda impl: (impl.greedy_stable, (adj, active, n)),
        }
        for kname, make in workloads.items():
            row = f"{kname:<16}{n:>6}"
            medians = []
            for impl in impls.values():
                fn, args = make(impl)
                med = bench_one(fn, args, repeats)
                medians.append(med)
                row += f"{med * 1e6:>10.1f}us"
            if len(medians) == 2 and medians[1] > 0:
                row += f"{medians[0] / medians[1]:>9.1f}x"
            print(row)


END_TO_END = """
import time
t0 = time.perf_counter()
from stablediv import BACKEND, Params, extract, gnp
t_import = time.perf_counter() - t0
gs = [gnp(1024, 0.05, seed=s) for s in range(6)]
t0 = time.perf_counter()
extract(gs[0], Params(mode="scaled", force_pipeline=True))
t_first = time.perf_counter() - t0  # includes loading the compiled cache
t0 = time.perf_counter()
for g in gs:
    extract(g, Params(mode="scaled", force_pipeline=True))
    extract(g, Params())
t_work = time.perf_counter() - t0
print(f"{BACKEND}: import {t_import:.2f}s, first extraction {t_first:.2f}s, "
      f"then 12 extractions at n=1024 in {t_work:.2f}s")
"""


def end_to_end():
    for backend in ("numpy", "numba"):
        res = subprocess.run(
            [sys.executable, "-c", END_TO_END],
            capture_output=True, text=True,
            env={"STABLEDIV_BACKEND": backend, "PATH": "/usr/bin:/usr/local/bin"},
        )
        out = (res.stdout or res.stderr).strip()
        print(out if res.returncode == 0 else f"{backend}: failed\n{res.stderr}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="256,1024,4096")
    ap.add_argument("--repeats", type=int, default=9)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    kernel_table(sizes, args.repeats)
    if args.end_to_end:
        print()
        end_to_end()
    return 0


if __name__ == "__main__":
    sys.exit(main())
