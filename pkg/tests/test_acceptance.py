"""Acceptance gate.

Each test here is one release criterion, checked at its stated tolerance
(exact unless the criterion itself defines a tolerance). The shared corpus
fixture runs the full two-mode sweep once per session; individual criteria
then interrogate the recorded outcomes.
"""

import itertools
import json
import math
import random
import re
import time
from fractions import Fraction

import pytest

from stablediv import (
    Graph,
    Params,
    StarSystem,
    VertexSet,
    bound_main,
    build_star_system,
    certificate_to_json,
    check_star_system,
    chordal,
    exact_max_stable,
    exhaustive_subdivision_search,
    extract,
    floor_log2_sq,
    gnp,
    greedy_stable,
    induced_cycle_in_range,
    max_degree,
    planted_subdivision,
    save_graph,
    shortest_pair_path,
    sparsify_star_system,
    star_semi_sparsity,
    star_sparsity,
    verify_stable,
    verify_subdivision,
)

GRID_N = (16, 32, 64, 128, 256, 512, 1024, 2048)
GRID_P = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5)
SCALED = Params(mode="scaled", force_pipeline=True)


def all_pairs(t):
    return list(itertools.combinations(range(1, t + 1), 2))


def _build_corpus():
    """400 random graphs over the density grid, 50 chordal, 50 planted:
    500 instances total. Planted certificates ride along for the recovery
    criterion."""
    items = []
    planted_certs = {}
    for n, p in itertools.product(GRID_N, GRID_P):
        for seed in range(8):
            items.append((f"gnp-{n}-{p}-{seed}", gnp(n, p, seed=seed)))
    for n in GRID_N:
        for p in GRID_P[:2]:
            items.append((f"gnp-{n}-{p}-8", gnp(n, p, seed=8)))
    for i in range(50):
        g, _ = chordal(16 + 13 * i, seed=i)
        items.append((f"chordal-{i}", g))
    for i in range(50):
        t = 3 if i < 30 else 4
        rng = random.Random(900 + i)
        lengths = {pr: rng.randint(3, 6) for pr in all_pairs(t)}
        g, cert = planted_subdivision(
            t, lengths, noise_n=(i * 3) % 31, noise_p=0.05 + 0.03 * (i % 5), seed=i)
        name = f"planted-{t}-{i}"
        items.append((name, g))
        planted_certs[name] = cert
    return items, planted_certs


@pytest.fixture(scope="session")
def sweep():
    corpus, planted_certs = _build_corpus()
    assert len(corpus) == 500
    t0 = time.perf_counter()
    outcomes = {}
    for name, g in corpus:
        outcomes[name] = {
            "faithful": extract(g, Params()),
            "scaled": extract(g, SCALED),
        }
    elapsed = time.perf_counter() - t0
    return {"corpus": dict(corpus), "outcomes": outcomes,
            "planted_certs": planted_certs, "elapsed": elapsed}


# ---------------------------------------------------------------------------
# criterion: soundness sweep, both modes, 100% verified, under 10 minutes


def test_soundness_sweep(sweep):
    checked = 0
    kinds = {"faithful": {}, "scaled": {}}
    for name, g in sweep["corpus"].items():
        for mode, out in sweep["outcomes"][name].items():
            kinds[mode][out.kind] = kinds[mode].get(out.kind, 0) + 1
            if out.kind == "subdivision":
                rep = verify_subdivision(g, out.subdivision)
                assert rep.ok, f"{name}/{mode}: {rep.violations}"
            else:
                rep = verify_stable(g, out.stable)
                assert rep.is_stable, f"{name}/{mode}: {rep.violations}"
            checked += 1
    assert checked == 1000  # 500 instances x 2 modes, all verified
    assert sweep["elapsed"] < 600, f"sweep took {sweep['elapsed']:.1f}s"
    print(f"\nsweep: 1000/1000 certificates verified in {sweep['elapsed']:.1f}s; "
          f"outcome mix faithful={kinds['faithful']} scaled={kinds['scaled']}")


# ---------------------------------------------------------------------------
# criterion: faithful mode always returns a stable set meeting its bound


def test_faithful_bound_and_floor(sweep):
    for name, g in sweep["corpus"].items():
        out = sweep["outcomes"][name]["faithful"]
        assert out.kind == "stable", f"{name}: faithful returned {out.kind}"
        size = out.stable.size
        n = g.n
        delta = max_degree(g, VertexSet.full(n))[1] if n else 0
        need = math.ceil(bound_main(n, 2, 3, max(2, delta))) if n >= 2 else 0
        assert size >= need, f"{name}: {size} < bound {need}"
        floor = math.ceil(n / (delta + 1))
        assert size >= floor, f"{name}: {size} < greedy floor {floor}"
        rep = verify_stable(g, out.stable)
        assert rep.meets_faithful_bound, name


# ---------------------------------------------------------------------------
# criterion: oracle agreement on hosts with known answers


def test_oracle_agreement_chordal_and_small(sweep):
    # chordal hosts have no induced cycle above a triangle, hence no
    # admissible witness; forced runs must agree, and the cycle oracle
    # confirms the structural reason
    for i in range(100):
        n = 10 + (i % 31)
        g, _ = chordal(n, seed=i)
        out = extract(g, SCALED)
        assert out.kind != "subdivision", f"chordal seed {i} emitted a witness"
        assert induced_cycle_in_range(g, 4, 3 * floor_log2_sq(n)) is None, i

    # every witness emitted on a tiny general instance is re-found
    # exhaustively; tiny hosts rarely emit, so the count is reported
    refound = 0
    for n, p, seed in itertools.product((9, 12, 15), (0.1, 0.3, 0.5), range(5)):
        g = gnp(n, p, seed=seed)
        out = extract(g, SCALED)
        if out.kind == "subdivision":
            again = exhaustive_subdivision_search(g, t=3)
            assert again is not None, f"gnp({n},{p},{seed}) witness not re-found"
            refound += 1
    print(f"\noracle agreement: 100 chordal hosts clean; "
          f"{refound} tiny-host witnesses re-found exhaustively")


# ---------------------------------------------------------------------------
# criterion: never exceeds the exact stability number; ties known optima


def test_oracle_tightness():
    checked = 0
    for i in range(94):
        n = 4 + (i % 27)
        g = gnp(n, (0.1, 0.25, 0.5)[i % 3], seed=i)
        out = extract(g, Params())
        alpha = len(exact_max_stable(g))
        assert out.stable.size <= alpha, f"instance {i}: {out.stable.size} > {alpha}"
        checked += 1
    # equality on edgeless graphs
    for n in (1, 5, 12):
        g = Graph.from_edges(n, [])
        out = extract(g, Params())
        assert out.stable.size == len(exact_max_stable(g)) == n
        checked += 1
    # equality on matchings (one endpoint per edge plus all isolated)
    for n, m in ((10, 5), (13, 6), (8, 3)):
        g = Graph.from_edges(n, [(2 * i, 2 * i + 1) for i in range(m)])
        out = extract(g, Params())
        assert out.stable.size == len(exact_max_stable(g)) == n - m
        checked += 1
    assert checked == 100


# ---------------------------------------------------------------------------
# criterion: claim-level batteries, all exact


def _random_star_system(seed):
    """A valid star system over a fresh graph: complete centers, stable and
    pairwise disjoint leaf sets, sparse random cross edges."""
    rng = random.Random(seed)
    p = rng.choice((2, 2, 3))
    sizes = [rng.randint(30, 60) for _ in range(p)]
    n = p + sum(sizes)
    edges = []
    blocks = []
    base = p
    for c in range(p):
        block = list(range(base, base + sizes[c]))
        edges += [(c, v) for v in block]
        blocks.append(block)
        base += sizes[c]
    cross = 0.012 if p == 2 else 0.006
    for i in range(p):
        for j in range(i + 1, p):
            for u in blocks[i]:
                for v in blocks[j]:
                    if rng.random() < cross:
                        edges.append((u, v))
    g = Graph.from_edges(n, edges)
    sys = StarSystem(tuple(range(p)),
                     tuple(VertexSet.of(n, b) for b in blocks))
    return g, sys


def test_claim_sparsify_halving():
    q = Fraction(1, 4)
    kept = 0
    trimmed_any = 0
    seed = 0
    while kept < 200:
        seed += 1
        assert seed < 3000, "rejection sampling budget exhausted"
        g, sys = _random_star_system(seed)
        if star_semi_sparsity(g, sys) > q / (2 * sys.length):
            continue
        assert check_star_system(g, sys) == []
        cut = sparsify_star_system(g, sys, q)
        for before, after in zip(sys.leaves, cut.leaves):
            assert len(after) >= math.ceil(len(before) / 2)
        assert star_sparsity(g, cut) <= q
        assert check_star_system(g, cut) == []
        if any(len(a) < len(b) for a, b in zip(cut.leaves, sys.leaves)):
            trimmed_any += 1
        kept += 1
    print(f"\nsparsify: 200 systems accepted from {seed} samples, "
          f"{trimmed_any} had at least one vertex trimmed")


def test_claim_star_battery():
    built = 0
    for n, p, seed in itertools.product((128, 256), (0.05, 0.08, 0.1), range(4)):
        g = gnp(n, p, seed=seed)
        res = build_star_system(g, 3, Fraction(1, 4), Params(mode="scaled"))
        if not isinstance(res, StarSystem):
            continue  # a win-win exit fired first; nothing to audit
        assert check_star_system(g, res) == [], (n, p, seed)
        for q in (Fraction(1, 4), Fraction(1, 8)):
            cut = sparsify_star_system(g, res, q)
            assert check_star_system(g, cut) == [], (n, p, seed, q)
        built += 1
    assert built >= 10, f"only {built} systems built; battery too thin"
    print(f"\nstar battery: {built} built systems, zero invariant violations")


def test_claim_shortest_path_inducedness():
    rng = random.Random(77)
    found = 0
    for trial in range(500):
        n = rng.randint(20, 60)
        g = gnp(n, rng.choice((0.05, 0.1, 0.2)), seed=trial)
        ids = rng.sample(range(n), rng.randint(6, min(20, n)))
        cut = rng.randint(1, len(ids) - 2)
        frm = VertexSet.of(n, ids[:cut])
        to = VertexSet.of(n, ids[cut:])
        allowed = VertexSet.of(n, rng.sample(range(n), rng.randint(5, n)))
        path = shortest_pair_path(g, frm, to, allowed)
        if path is None:
            continue
        found += 1
        verts = path.vertices
        for a in range(len(verts)):
            for b in range(a + 2, len(verts)):
                assert not g.has_edge(verts[a], verts[b]), (trial, verts)
    assert found >= 100, f"only {found}/500 triples admitted a path"
    print(f"\nshortest paths: {found}/500 triples routable, all chordless")


def test_claim_faithful_growth_steps(sweep):
    """Every accepted faithful expansion step grows by at least 1 + 2/log n.
    The in-run check enforces the exact per-subgraph bound; this recheck
    parses the recorded factor against the weaker whole-graph bound. At
    these sizes faithful runs exit greedily before any expansion, so the
    observed count is expected to be zero and is reported."""
    steps = 0
    for name, g in sweep["corpus"].items():
        out = sweep["outcomes"][name]["faithful"]
        for line in out.trace:
            if "branch=layer-step" not in line:
                continue
            growth = float(re.search(r"growth=([0-9.]+)", line).group(1))
            assert growth >= 1 + 2 / math.log2(g.n), (name, line)
            steps += 1
    print(f"\nfaithful growth: {steps} expansion steps observed "
          f"(greedy exits dominate at these sizes)")


# ---------------------------------------------------------------------------
# criterion: planted instances always terminate verified, and the planted
# witness itself always verifies


def test_planted_recovery(sweep):
    recovered = {"stable": 0, "subdivision": 0, "regime-failure": 0}
    for name, cert in sweep["planted_certs"].items():
        g = sweep["corpus"][name]
        assert verify_subdivision(g, cert).ok, f"{name}: planted witness rejected"
        t = len(cert.branch)
        out = extract(g, Params(mode="scaled", force_pipeline=True, t=t))
        recovered[out.kind] += 1
        if out.kind == "subdivision":
            assert verify_subdivision(g, out.subdivision).ok, name
        else:
            assert verify_stable(g, out.stable).is_stable, name
    assert sum(recovered.values()) == 50
    print(f"\nplanted recovery: 50/50 planted witnesses verified; "
          f"forced outcomes {recovered}")


# ---------------------------------------------------------------------------
# criterion: byte-level determinism, in process and across worker counts


def test_determinism_repeat_runs(sweep):
    picks = ["gnp-512-0.05-7", "gnp-256-0.05-3", "gnp-128-0.1-1",
             "gnp-2048-0.01-0", "gnp-256-0.2-4", "chordal-3",
             "planted-3-0", "planted-4-40"]
    for name in picks:
        g = sweep["corpus"][name]
        for params in (Params(), SCALED):
            a = extract(g, params)
            b = extract(g, params)
            assert a.trace == b.trace, name
            assert a.kind == b.kind, name
            assert certificate_to_json(a.certificate) == \
                certificate_to_json(b.certificate), name


def test_determinism_across_jobs(tmp_path):
    from stablediv import cli
    import contextlib, io

    corp = tmp_path / "corp"
    corp.mkdir()
    for n, p, seed in ((128, 0.1, 1), (256, 0.05, 3), (512, 0.05, 7),
                       (64, 0.2, 0), (100, 0.3, 0)):
        save_graph(gnp(n, p, seed=seed), corp / f"g{n}-{seed}.graph")

    def bench(jobs, dest):
        out = io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
            code = cli.main(["bench", str(corp), "--mode", "scaled",
                             "--force-pipeline", "--jobs", str(jobs),
                             "--out-dir", str(dest)])
        assert code == 0
        return out.getvalue()

    t1 = bench(1, tmp_path / "r1")
    t2 = bench(3, tmp_path / "r2")
    strip = lambda s: re.sub(r"\d+\.\d{3}", "T", s)  # wall times differ
    assert strip(t1) == strip(t2)
    names = sorted(p.name for p in (tmp_path / "r1").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "r2").iterdir())
    for name in names:
        a = (tmp_path / "r1" / name).read_bytes()
        b = (tmp_path / "r2" / name).read_bytes()
        assert a == b, f"{name} differs across --jobs"
