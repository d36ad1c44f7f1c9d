"""Recursive dichotomy extraction.

extract() returns either a stable-set certificate or an induced
complete-graph-subdivision certificate, and self-checks every certificate
with the independent verifiers before handing it back. The algorithm is a
chain of win-win stages: each stage either makes progress toward the
subdivision or exits with a stable set that the failed progress condition
itself hands over (a halved-degree remainder, an under-expanding
neighborhood, and so on).

Faithful mode keeps the exact bound constants and asserts every internal
inequality. Those constants put the guaranteed stable-set size below one
vertex for any input that fits in memory, so a faithful run wins at the
greedy check and never reaches the construction stages; the assertions are
still wired so that a violation aborts loudly instead of degrading.

Scaled mode substitutes small activation thresholds (star_constant,
log_exponent, density_margin) so the full pipeline runs on test-sized
inputs. It keeps soundness (certificates are still verified) but drops the
size guarantee, and with force_pipeline it may end in a regime failure that
carries the best verified stable set found along the way.

Trace vocabulary (one line per decision, format "claim=<id> branch=<name>
|set|=<int> ..."): ids 0..9 tag the pipeline stages in proof order, with 0
for entry and base cases, 1 and 2 for the degree branches, 3 and 4 for star
building and sparsification, 5 for expansion-or-merge, 6 for obstruction
bookkeeping, 7 and 8 for layer growth, 9 for routing and assembly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .certificates import (
    Outcome,
    StableSetCertificate,
    SubdivisionCertificate,
    big_constant,
    bound_main,
    floor_log2_sq,
    verify_stable,
    verify_subdivision,
)
from .graph import (
    Graph,
    VertexSet,
    closed_neighborhood,
    degree_into,
    greedy_stable,
    is_stable,
    max_degree,
    shortest_pair_path,
)


class FaithfulInvariantError(AssertionError):
    """An inequality that faithful mode guarantees was measured false.

    This aborts the run: a violation falsifies the implementation (or the
    input's declared clique bound), never the mathematics."""


class _RegimeFailure(Exception):
    """Internal signal: scaled-mode pipeline cannot continue."""

    def __init__(self, diagnostic: str):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


_MODES = ("faithful", "scaled")


@dataclass(frozen=True)
class Params:
    """Extraction parameters.

    t and k are the certificate parameters. Faithful mode accepts no
    overrides: the scaled knobs must stay at their defaults and
    force_pipeline must be off, so a faithful result is unmistakably tied to
    the exact constants. rng_seed is reserved; the algorithm is
    deterministic."""

    t: int = 3
    k: int = 2
    mode: str = "faithful"
    star_constant: float = 8.0
    log_exponent: float = 1.0
    density_margin: float = 0.25
    force_pipeline: bool = False
    rng_seed: int = 0
    recursion_depth_limit: int = 64

    def __post_init__(self):
        if self.t < 3:
            raise ValueError("t must be at least 3")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if not (self.star_constant > 0 and self.log_exponent > 0):
            raise ValueError("scaled constants must be positive")
        if not (0 < self.density_margin <= 1):
            raise ValueError("density_margin must be in (0, 1]")
        if self.recursion_depth_limit < 1:
            raise ValueError("recursion_depth_limit must be positive")
        if self.mode == "faithful":
            defaults = (8.0, 1.0, 0.25)
            got = (self.star_constant, self.log_exponent, self.density_margin)
            if got != defaults or self.force_pipeline:
                raise ValueError(
                    "faithful mode accepts no scaled overrides or force_pipeline")

    @property
    def faithful(self) -> bool:
        return self.mode == "faithful"


@dataclass(frozen=True)
class StarSystem:
    """Pairwise nonadjacent centers with disjoint stable leaf sets; each
    center is complete to its own leaf set and has no neighbor in any
    other."""

    centers: tuple[int, ...]
    leaves: tuple[VertexSet, ...]

    def __post_init__(self):
        if len(self.centers) != len(self.leaves):
            raise ValueError("centers and leaves must have equal length")

    @property
    def length(self) -> int:
        return len(self.centers)

    def size(self, universe: int) -> int:
        if not self.leaves:
            return universe
        return min(len(b) for b in self.leaves)

    def leaf_union(self, n: int) -> VertexSet:
        out = VertexSet.empty(n)
        for b in self.leaves:
            out = out | b
        return out


@dataclass
class ObstructionContext:
    """Forbidden sets for one routing step: x1 = neighbors of centers, x2 =
    vertices too dense to some leaf set, y = vertices of already-routed
    paths, x3 = closed neighborhood of y."""

    x1: VertexSet
    x2: VertexSet
    y: VertexSet
    x3: VertexSet


@dataclass
class LayerState:
    leaf_index: int
    radius: int
    layer: VertexSet
    history: list[int] = field(default_factory=list)


# ---------------------------------------------------------------------------
# star-system measurement and validation


def sparsity_of(g: Graph, a: VertexSet, b: VertexSet) -> Fraction:
    """Smallest x with every vertex of `a` having at most x*|b| neighbors in
    `b`; exact rational. Zero when either set is empty."""
    if len(a) == 0 or len(b) == 0:
        return Fraction(0)
    worst = max(degree_into(g, v, b) for v in a)
    return Fraction(worst, len(b))


def star_semi_sparsity(g: Graph, sys: StarSystem) -> Fraction:
    worst = Fraction(0)
    for i in range(sys.length):
        for j in range(i + 1, sys.length):
            worst = max(worst, sparsity_of(g, sys.leaves[j], sys.leaves[i]))
    return worst


def star_sparsity(g: Graph, sys: StarSystem) -> Fraction:
    worst = Fraction(0)
    for i in range(sys.length):
        for j in range(sys.length):
            if i != j:
                worst = max(worst, sparsity_of(g, sys.leaves[i], sys.leaves[j]))
    return worst


def check_star_system(g: Graph, sys: StarSystem) -> list[str]:
    """Every structural invariant, measured from raw adjacency. Empty list
    means the system is valid."""
    errs: list[str] = []
    cs = sys.centers
    if len(set(cs)) != len(cs):
        errs.append("centers not distinct")
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            if g.has_edge(cs[i], cs[j]):
                errs.append(f"centers {cs[i]} and {cs[j]} adjacent")
    center_set = set(cs)
    for i, b in enumerate(sys.leaves):
        if not is_stable(g, b):
            errs.append(f"leaf set {i} not stable")
        if any(v in center_set for v in b):
            errs.append(f"leaf set {i} contains a center")
        for j in range(i + 1, sys.length):
            if not b.isdisjoint(sys.leaves[j]):
                errs.append(f"leaf sets {i} and {j} intersect")
    for i, (a, b) in enumerate(zip(cs, sys.leaves)):
        if degree_into(g, a, b) != len(b):
            errs.append(f"center {i} not complete to its leaf set")
        for j, other in enumerate(sys.leaves):
            if j != i and degree_into(g, a, other) != 0:
                errs.append(f"center {i} has a neighbor in leaf set {j}")
    return errs


def sparsify_star_system(g: Graph, sys: StarSystem, q) -> StarSystem:
    """Trim leaf sets from last to first, dropping any vertex with more than
    q*|C_j| neighbors in some later trimmed set C_j. When the input's
    semi-sparsity is at most q/(2*length), the output keeps at least half of
    every leaf set and has sparsity at most q in both directions; the
    trimming itself is performed unconditionally."""
    q = q if isinstance(q, Fraction) else Fraction(q)
    p = sys.length
    if p <= 1:
        return sys
    trimmed: list[VertexSet | None] = [None] * p
    trimmed[p - 1] = sys.leaves[p - 1]
    for i in range(p - 2, -1, -1):
        keep = []
        for v in sys.leaves[i]:
            ok = True
            for j in range(i + 1, p):
                cj = trimmed[j]
                if len(cj) and Fraction(degree_into(g, v, cj)) > q * len(cj):
                    ok = False
                    break
            if ok:
                keep.append(v)
        trimmed[i] = VertexSet.of(g.n, keep)
    return StarSystem(sys.centers, tuple(trimmed))


# ---------------------------------------------------------------------------
# run state


class _Run:
    """Mutable state shared across one extract() call tree."""

    def __init__(self, g: Graph, params: Params):
        self.g = g
        self.params = params
        self.top_n = g.n
        self.max_total_len = floor_log2_sq(g.n)
        self.trace: list[str] = []
        self.best: VertexSet | None = None

    def note_stable(self, s: VertexSet):
        if self.best is None or len(s) > len(self.best):
            self.best = s

    def line(self, claim: int, branch: str, setsize: int, **extra):
        parts = [f"claim={claim}", f"branch={branch}", f"|set|={setsize}"]
        for key, val in extra.items():
            if isinstance(val, float):
                parts.append(f"{key}={val:.6f}")
            else:
                parts.append(f"{key}={val}")
        self.trace.append(" ".join(parts))

    def faithful_check(self, ok: bool, what: str):
        # measured in both modes, fatal only under the exact constants
        if self.params.faithful and not ok:
            raise FaithfulInvariantError(
                what + "\ntrace:\n" + "\n".join(self.trace))

    def structural_check(self, ok: bool, what: str):
        # holds by construction in both modes; a failure is a bug
        if not ok:
            raise AssertionError(
                "internal invariant broken: " + what + "\ntrace:\n" + "\n".join(self.trace))


def _counts_into(g: Graph, candidates, target: VertexSet):
    """Neighbor counts in `target` for each candidate id, via the packed
    kernels. candidates is an int array or list; returns a list of ints."""
    idx = np.asarray(list(candidates), dtype=np.int64)
    if idx.size == 0:
        return idx, []
    counts = K.counts_within(g.adjacency_words(), target.words, idx)
    return idx, [int(c) for c in counts]


# ---------------------------------------------------------------------------
# the recursive algorithm


def extract(g: Graph, params: Params) -> Outcome:
    """Run the dichotomy on g. The returned Outcome's certificate has already
    passed the matching independent verifier.

    Raises ValueError when k=1 is declared for a graph with edges in
    faithful mode (the clique hypothesis is part of the parameter domain),
    and FaithfulInvariantError if a faithful-mode internal inequality fails.
    """
    run = _Run(g, params)
    n = g.n
    top_d = 2
    if n:
        top_d = max(2, max_degree(g, VertexSet.full(n))[1])
    if n and params.k == 1 and g.m > 0 and params.faithful:
        raise ValueError(
            "k=1 declares an edgeless graph, but the input has edges")

    try:
        if n == 0:
            run.line(0, "empty-input", 0)
            result = ("stable", VertexSet.empty(0))
        elif run.max_total_len < 3:
            # no subdivision is representable below total length 3
            s = greedy_stable(g)
            run.note_stable(s)
            run.line(0, "degenerate-size", len(s), n=n)
            result = ("stable", s)
        else:
            result = _extract(run, VertexSet.full(n), params.k, 0,
                              forced=params.force_pipeline)
    except _RegimeFailure as rf:
        best = run.best if run.best is not None else VertexSet.empty(n)
        cert = StableSetCertificate(
            n=n, k=params.k, t=params.t, d=top_d,
            claimed_mode="best-effort", members=tuple(best.to_list()))
        report = verify_stable(g, cert)
        if not report.is_stable:
            raise AssertionError("best-effort stable set failed verification")
        run.line(0, "regime-failure", len(best), reason=rf.diagnostic.replace(" ", "-"))
        return Outcome(kind="regime-failure", stable=cert,
                       diagnostic=rf.diagnostic, trace=tuple(run.trace))

    if result[0] == "stable":
        s = result[1]
        if params.faithful:
            # the stable outcome must dominate the plain greedy floor
            gr = greedy_stable(g) if n else VertexSet.empty(0)
            if len(gr) > len(s):
                s = gr
            if n >= 2:
                need = math.ceil(bound_main(n, params.k, params.t, top_d))
                run.faithful_check(len(s) >= need,
                                   f"stable outcome {len(s)} below bound {need}")
        cert = StableSetCertificate(
            n=n, k=params.k, t=params.t, d=top_d,
            claimed_mode=params.mode, members=tuple(s.to_list()))
        report = verify_stable(g, cert)
        if not report.is_stable:
            raise AssertionError("stable outcome failed verification")
        run.line(0, "done-stable", len(s))
        return Outcome(kind="stable", stable=cert, trace=tuple(run.trace))

    cert = result[1]
    report = verify_subdivision(g, cert)
    if not report.ok:
        raise AssertionError(
            f"subdivision outcome failed verification: {report.violations}")
    run.line(0, "done-subdivision", len(cert.branch))
    return Outcome(kind="subdivision", subdivision=cert, trace=tuple(run.trace))


def _extract(run: _Run, active: VertexSet, k: int, depth: int, forced: bool):
    """Returns ("stable", VertexSet) or ("subdiv", SubdivisionCertificate).
    All vertex ids are top-level graph ids; `active` selects the induced
    subgraph under consideration."""
    params = run.params
    g = run.g
    n_a = len(active)
    if depth > params.recursion_depth_limit:
        if params.faithful:
            raise RuntimeError("recursion depth limit exceeded")
        raise _RegimeFailure("recursion depth limit exceeded")
    if n_a == 0:
        return ("stable", active)

    # base: a declared clique bound of 1 promises an edgeless graph
    if k == 1:
        sub_edgeless = all(degree_into(g, v, active) == 0 for v in active)
        if sub_edgeless:
            run.note_stable(active)
            run.line(0, "edgeless-base", n_a, depth=depth)
            return ("stable", active)
        if params.faithful:
            raise FaithfulInvariantError(
                "clique bound 1 violated on a subgraph with edges")
        s = greedy_stable(g, active)
        run.note_stable(s)
        run.line(0, "clique-hypothesis-fallback", len(s), depth=depth)
        return ("stable", s)

    v_top, delta = max_degree(g, active)
    if delta <= 1:
        # isolated vertices plus disjoint edges: greedy is exact here
        s = greedy_stable(g, active)
        run.note_stable(s)
        run.line(0, "matching-base", len(s), depth=depth)
        return ("stable", s)

    d = delta  # maximum degree inside the active set, at least 2
    log_n = math.log2(n_a)
    log_d = math.log2(d)
    target = bound_main(n_a, k, params.t, d)
    greedy = greedy_stable(g, active)
    run.note_stable(greedy)

    if not forced:
        if len(greedy) >= math.ceil(target):
            run.line(0, "greedy", len(greedy), bound=target, depth=depth)
            return ("stable", greedy)
        # high-degree neighborhood recursion with a tighter clique bound
        hood = closed_neighborhood(g, VertexSet.of(g.n, [v_top])) & active
        hood = hood - VertexSet.of(g.n, [v_top])
        res = _extract(run, hood, k - 1, depth + 1, forced=False)
        if res[0] == "subdiv":
            return res
        cand = res[1]
        run.note_stable(cand)
        if len(cand) >= math.ceil(target):
            run.line(1, "neighborhood-stable", len(cand), v=v_top)
            return ("stable", cand)
        big_c = big_constant(params.t)
        run.line(1, "pass", len(cand), v=v_top, d=d)
        run.faithful_check(d * log_d ** 3 <= n_a / big_c,
                           "degree-size inequality failed at the pass branch")
        run.faithful_check(
            d + 1 >= big_c ** (k - 1) * log_n ** (3 * (k - 1)) * log_d,
            "degree floor inequality failed at the pass branch")
    else:
        big_c = big_constant(params.t)
        run.line(1, "skipped-forced", len(greedy), d=d,
                 lhs=d * log_d ** 3, rhs=n_a / big_c)

    return _Pipeline(run, active, k, d, depth, forced).execute()


def _scaled_count_threshold(margin: float, size: int) -> int:
    return max(2, math.ceil(margin * size))


class _Pipeline:
    """The construction stages for one active set: star building, trimming,
    layer growth, routing, assembly. Instantiated only after the early
    branches have passed."""

    def __init__(self, run: _Run, active: VertexSet, k: int, d: int,
                 depth: int, forced: bool):
        self.run = run
        self.g = run.g
        self.params = run.params
        self.active = active
        self.k = k
        self.d = d
        self.depth = depth
        self.forced = forced
        self.n_a = len(active)
        self.log_n = math.log2(self.n_a)
        self.log_d = math.log2(d)
        self.big_c = big_constant(run.params.t)

    # -- entry ------------------------------------------------------------

    def execute(self):
        t = self.params.t
        q_full = Fraction(1, 4 * t * t)
        q_semi = q_full / (2 * t)
        built = self.build_star_system(t, q_semi)
        if not isinstance(built, StarSystem):
            return built
        errs = check_star_system(self.g, built)
        self.run.structural_check(not errs, f"star system after build: {errs}")
        if self.params.faithful:
            q_trim = q_full
        else:
            q_trim = Fraction(self.params.density_margin).limit_denominator(10 ** 6)
        sys = sparsify_star_system(self.g, built, q_trim)
        errs = check_star_system(self.g, sys)
        self.run.structural_check(not errs, f"star system after trim: {errs}")
        semi_in = star_semi_sparsity(self.g, built)
        if semi_in <= q_trim / (2 * t):
            for orig, cut in zip(built.leaves, sys.leaves):
                self.run.structural_check(
                    len(cut) >= math.ceil(len(orig) / 2),
                    "sparsify kept less than half a leaf set")
            self.run.structural_check(star_sparsity(self.g, sys) <= q_trim,
                                      "sparsify output too dense")
        size = sys.size(self.n_a)
        self.run.line(4, "sparsified", size,
                      semi=float(semi_in), sparsity=float(star_sparsity(self.g, sys)))
        if size == 0:
            if self.params.faithful:
                raise FaithfulInvariantError("leaf set emptied by sparsify")
            raise _RegimeFailure("leaf set emptied by sparsify")
        return self.route_and_assemble(sys)

    # -- star building ----------------------------------------------------

    def star_x1(self, centers: list[int]) -> VertexSet:
        if not centers:
            return VertexSet.empty(self.g.n)
        cset = VertexSet.of(self.g.n, centers)
        return (closed_neighborhood(self.g, cset) - cset) & self.active

    def star_x2(self, leaves: list[VertexSet], x1: VertexSet,
                q_semi: Fraction) -> VertexSet:
        """Vertices outside x1 too dense toward some leaf set to stay
        available. The faithful threshold q_semi*|B_i| drops below one
        vertex at test scale, where the rule becomes exact anticompleteness;
        scaled mode keeps the same density threshold it uses for routing, so
        lightly touching vertices remain usable."""
        out = []
        candidates = (self.active - x1).indices()
        for b in leaves:
            if len(b) == 0:
                continue
            idx, counts = _counts_into(self.g, candidates, b)
            if self.params.faithful:
                bound = q_semi * len(b)
                hits = [int(v) for v, c in zip(idx, counts)
                        if c and Fraction(c) >= bound]
            else:
                thr = _scaled_count_threshold(self.params.density_margin, len(b))
                hits = [int(v) for v, c in zip(idx, counts) if c >= thr]
            out.extend(hits)
        return VertexSet.of(self.g.n, out)

    def build_star_system(self, p_len: int, q_semi: Fraction):
        centers: list[int] = []
        leaves: list[VertexSet] = []
        for p in range(1, p_len + 1):
            x1 = self.star_x1(centers)
            x2 = self.star_x2(leaves, x1, q_semi)
            # prior centers are never available again; the faithful density
            # rule already covers them, the scaled one may not
            x = x1 | x2 | VertexSet.of(self.g.n, centers)
            if self.params.faithful:
                self.run.faithful_check(
                    len(x) <= self.n_a / self.log_d,
                    "forbidden set too large while building stars")
                self.run.faithful_check(
                    len(x2) <= (p - 1) * self.d / float(q_semi) if p > 1 else True,
                    "dense-vertex count exceeded its edge-counting bound")
            res = self.removal_branch(x)
            if res is not None:
                return res
            remaining = self.active - x
            a_p, deg_out = max_degree(self.g, remaining)
            self.run.structural_check(deg_out * 2 > self.d,
                                      "witness degree at most half the maximum")
            hood = closed_neighborhood(self.g, VertexSet.of(self.g.n, [a_p]))
            c_set = (hood & remaining) - VertexSet.of(self.g.n, [a_p])
            res = _extract(self.run, c_set, self.k - 1, self.depth + 1, forced=False)
            if res[0] == "subdiv":
                return res
            b_p = res[1]
            self.run.note_stable(b_p)
            if not self.forced and len(b_p) >= math.ceil(
                    bound_main(self.n_a, self.k, self.params.t, self.d)):
                self.run.line(3, "oversized-stable", len(b_p), p=p)
                return ("stable", b_p)
            star_target = self.star_target()
            if len(b_p) < star_target:
                self.run.line(3, "star-short", len(b_p), p=p, target=star_target)
                if self.params.faithful:
                    raise FaithfulInvariantError(
                        "stable leaf set below its guaranteed size")
                raise _RegimeFailure("stable leaf set below the scaled star target")
            # a new center may touch earlier leaf sets only below the
            # sparsity threshold; remove those neighbors outright so the
            # anticompleteness invariant is exact
            for i in range(len(leaves)):
                leaves[i] = leaves[i] - hood
            centers.append(a_p)
            leaves.append(b_p)
            self.run.line(3, "center-accepted", len(b_p), p=p, v=a_p)
        return StarSystem(tuple(centers), tuple(leaves))

    def star_target(self) -> float:
        if self.params.faithful:
            return self.d / (2 * self.big_c ** (self.k - 2)
                             * self.log_d ** (3 * self.k - 5))
        return self.d / (2 * self.params.star_constant)

    def removal_branch(self, x: VertexSet):
        """Degree-halving exit: when deleting x halves the maximum degree,
        recursing on the remainder already wins. Returns None to pass
        through (a witness of degree above d/2 exists outside x)."""
        remaining = self.active - x
        if len(remaining) == 0:
            if self.params.faithful:
                raise FaithfulInvariantError("forbidden set swallowed the graph")
            raise _RegimeFailure("forbidden set swallowed the graph")
        _, delta_out = max_degree(self.g, remaining)
        if delta_out * 2 > self.d:
            return None
        self.run.line(2, "degree-halved", len(remaining), delta=delta_out, d=self.d)
        res = _extract(self.run, remaining, self.k, self.depth + 1, forced=False)
        if res[0] == "stable":
            self.run.note_stable(res[1])
            if self.params.faithful:
                need = math.ceil(bound_main(self.n_a, self.k, self.params.t, self.d))
                self.run.faithful_check(
                    len(res[1]) >= need,
                    "halved-degree remainder returned too small a stable set")
        return res

    # -- routing ----------------------------------------------------------

    def route_x2(self, leaves) -> VertexSet:
        """Vertices too dense to some leaf set to serve on any path. The
        faithful threshold is |B_i|/(2 t^2 log^2 n); scaled mode uses
        max(2, ceil(density_margin*|B_i|)) so single-neighbor vertices stay
        routable."""
        t = self.params.t
        out = []
        x1 = self.route_x1_cache
        candidates = (self.active - x1).indices()
        for b in leaves:
            if len(b) == 0:
                continue
            idx, counts = _counts_into(self.g, candidates, b)
            if self.params.faithful:
                thr = len(b) / (2 * t * t * self.log_n ** 2)
                hits = [int(v) for v, c in zip(idx, counts) if c >= thr]
            else:
                thr = _scaled_count_threshold(self.params.density_margin, len(b))
                hits = [int(v) for v, c in zip(idx, counts) if c >= thr]
            out.extend(hits)
        return VertexSet.of(self.g.n, out)

    def route_and_assemble(self, sys: StarSystem):
        g, t = self.g, self.params.t
        center_vs = VertexSet.of(g.n, list(sys.centers))
        self.route_x1_cache = self.star_x1(list(sys.centers))
        x1 = self.route_x1_cache
        x2 = self.route_x2(sys.leaves)
        self.run.line(6, "forbidden-sets", len(x1), x2=len(x2))

        leaf_union = sys.leaf_union(g.n)
        paths: dict[tuple[int, int], tuple[int, ...]] = {}
        routed: list[VertexSet] = []
        pairs = [(i, j) for i in range(1, t + 1) for j in range(i + 1, t + 1)]
        for (i, j) in pairs:
            y = VertexSet.empty(g.n)
            for p_verts in routed:
                y = y | p_verts
            x3 = closed_neighborhood(g, y) & self.active if len(y) else VertexSet.empty(g.n)
            ctx = ObstructionContext(x1=x1, x2=x2, y=y, x3=x3)
            self.check_obstruction(ctx, sys, leaf_union)
            res = self.route_path(ctx, sys, i, j, center_vs)
            if res[0] != "path":
                return res
            path = res[1]
            paths[(i, j)] = path
            routed.append(VertexSet.of(g.n, list(path)))
            self.run.line(9, "routed", len(path), pair=f"{i},{j}")
        return ("subdiv", self.assemble(sys, paths))

    def check_obstruction(self, ctx: ObstructionContext, sys: StarSystem,
                          leaf_union: VertexSet):
        t = self.params.t
        y, x1, x2, x3 = ctx.y, ctx.x1, ctx.x2, ctx.x3
        # these hold by construction whenever routing respects the
        # forbidden sets, in both modes
        self.run.structural_check(len(y & x2) == 0,
                                  "routed vertices entered the dense set")
        self.run.structural_check((y & x1).issubset(leaf_union),
                                  "a routed internal vertex touches a center")
        self.run.structural_check(len(y & x1) <= t * t,
                                  "too many routed endpoints")
        limit_y = 0.5 * t * t * self.log_n ** 2
        self.run.structural_check(len(y) <= limit_y, "path union too large")
        x3_bound = 0.5 * t * t * self.log_n ** 2 * self.d
        halved = [len(x3 & b) <= len(b) / 2 for b in sys.leaves]
        if self.params.faithful:
            self.run.faithful_check(len(x3) <= x3_bound, "obstruction shadow too large")
            self.run.faithful_check(all(halved), "a leaf set lost over half to the shadow")
        self.run.line(6, "obstruction", len(x3), y=len(y),
                      leaf_halved=int(all(halved)))

    def expansion_threshold(self) -> float:
        if self.params.faithful:
            return (self.big_c ** (self.k - 1)
                    * self.log_n ** (3 * (self.k - 1)) * self.log_d)
        return self.log_n ** self.params.log_exponent

    def expand_or_merge(self, a: VertexSet, threshold: float,
                        goal: int | None = None):
        """Either the closed neighborhood of the stable set `a` is large
        (return ("expanded", size)), or deleting it leaves a remainder whose
        recursive stable set merges with `a` into a stable exit.

        `goal` is the layer size the caller wants certified. Scaled mode
        tests expansion on just enough of `a` to cover the goal at the given
        threshold; asking a set already larger than active/threshold to
        expand threshold-fold can only fail, and the full set is not needed.
        """
        g = self.g
        if goal is not None and not self.params.faithful and len(a):
            want = max(1, math.ceil(goal / threshold))
            if want < len(a):
                a = VertexSet.of(g.n, a.to_list()[:want])
        s = closed_neighborhood(g, a) & self.active
        if len(s) >= threshold * len(a):
            return ("expanded", len(s))
        res = _extract(self.run, self.active - s, self.k, self.depth + 1, forced=False)
        if res[0] == "subdiv":
            return res
        merged = res[1] | a
        self.run.structural_check(is_stable(g, merged),
                                  "merged stable union has an internal edge")
        self.run.note_stable(merged)
        self.run.line(5, "merged", len(merged), part=len(a))
        if self.params.faithful:
            need = math.ceil(bound_main(self.n_a, self.k, self.params.t, self.d))
            self.run.faithful_check(len(merged) >= need,
                                    "merged stable union below the bound")
        return ("stable", merged)

    def grow_layers(self, sources: VertexSet, allowed: VertexSet, leaf_index: int):
        """Grow the reachability ball from `sources` through `allowed` until
        it covers more than half the active set. Each step first certifies
        expansion via a stable subset of the current ball (the merge exit
        fires when expansion fails)."""
        t = self.params.t
        cap = math.floor(self.log_n ** 2 / 2) - 1
        state = LayerState(leaf_index=leaf_index, radius=0, layer=sources,
                           history=[len(sources)])
        threshold = self.expansion_threshold()
        while len(state.layer) * 2 <= self.n_a:
            if state.radius >= cap:
                self.run.line(8, "layer-cap", len(state.layer),
                              i=leaf_index, r=state.radius)
                if self.params.faithful:
                    raise FaithfulInvariantError("expansion cap hit below half size")
                raise _RegimeFailure("expansion cap hit below half the graph")
            sub = _extract(self.run, state.layer, self.k, self.depth + 1, forced=False)
            if sub[0] == "subdiv":
                return sub
            a = sub[1]
            self.run.note_stable(a)
            goal = math.ceil((1 + 2 / self.log_n) * len(state.layer))
            res = self.expand_or_merge(a, threshold, goal)
            if res[0] != "expanded":
                return res
            grown = state.layer | (closed_neighborhood(self.g, state.layer) & allowed)
            if len(grown) == len(state.layer):
                self.run.line(8, "layer-stalled", len(state.layer),
                              i=leaf_index, r=state.radius)
                if self.params.faithful:
                    raise FaithfulInvariantError("expansion stalled below half size")
                raise _RegimeFailure("expansion stalled below half the graph")
            growth = len(grown) / len(state.layer)
            state.radius += 1
            state.layer = grown
            state.history.append(len(grown))
            if state.radius == 1:
                self.run.line(7, "layer-init", len(grown), i=leaf_index,
                              floor=3 * t ** 3 * self.log_n ** 3 * self.d)
                self.run.faithful_check(
                    len(grown) >= 3 * t ** 3 * self.log_n ** 3 * self.d,
                    "first layer below its guaranteed size")
            else:
                self.run.line(8, "layer-step", len(grown), i=leaf_index,
                              r=state.radius, growth=growth)
                self.run.faithful_check(
                    growth >= 1 + 2 / self.log_n,
                    "layer growth factor below its guarantee")
        return state

    def route_path(self, ctx: ObstructionContext, sys: StarSystem,
                   i: int, j: int, center_vs: VertexSet):
        g = self.g
        from_set = sys.leaves[i - 1] - ctx.x3
        to_set = sys.leaves[j - 1] - ctx.x3
        if len(from_set) == 0 or len(to_set) == 0:
            self.run.line(9, "leaf-exhausted", 0, pair=f"{i},{j}")
            if self.params.faithful:
                raise FaithfulInvariantError("leaf set exhausted before routing")
            raise _RegimeFailure("leaf set exhausted before routing")
        allowed = self.active - ctx.x1 - ctx.x2 - ctx.x3 - center_vs
        for leaf_index, sources in ((i, from_set), (j, to_set)):
            grown = self.grow_layers(sources, allowed, leaf_index)
            if not isinstance(grown, LayerState):
                return grown
        path = shortest_pair_path(g, from_set, to_set, allowed)
        max_edges = self.log_n ** 2 - 2
        if path is None or path.length > max_edges \
                or path.length + 2 > self.run.max_total_len:
            plen = -1 if path is None else path.length
            self.run.line(9, "route-failed", max(0, plen), pair=f"{i},{j}")
            if self.params.faithful:
                raise FaithfulInvariantError("no short enough routed path")
            raise _RegimeFailure("no short enough routed path")
        verts = path.vertices
        self.run.structural_check(
            all(v not in ctx.x2 and v not in ctx.x3 for v in verts)
            and all(v not in ctx.x1 for v in verts[1:-1]),
            "routed path entered a forbidden set")
        return ("path", verts)

    def assemble(self, sys: StarSystem, paths) -> SubdivisionCertificate:
        cert = SubdivisionCertificate(
            n=self.run.top_n, k=self.params.k, t=self.params.t, d=self.d,
            claimed_mode=self.params.mode, branch=tuple(sys.centers),
            paths=paths, min_len=3, max_len=self.run.max_total_len)
        report = verify_subdivision(self.g, cert)
        if not report.ok:
            raise AssertionError(
                "assembled certificate failed verification: "
                f"{report.violations}\ntrace:\n" + "\n".join(self.run.trace))
        self.run.line(9, "assembled", len(cert.branch),
                      pairs=len(paths), max_len=cert.max_len)
        return cert


# ---------------------------------------------------------------------------
# standalone star building (the same machinery outside a full run)


def build_star_system(g: Graph, p_len: int, q, params: Params):
    """Build a star system of the requested length with per-leaf density
    threshold q (exact anticompleteness once q*|B_i| drops below one).
    Returns a StarSystem, or an Outcome when a win-win exit fires first."""
    q = q if isinstance(q, Fraction) else Fraction(q)
    run = _Run(g, params)
    n = g.n
    if n == 0 or p_len < 0:
        raise ValueError("graph must be nonempty and p_len nonnegative")
    active = VertexSet.full(n)
    _, delta = max_degree(g, active) if n else (0, 0)
    if delta <= 1:
        raise ValueError("star building needs maximum degree at least 2")
    pipe = _Pipeline(run, active, params.k, delta, 0, forced=True)
    res = pipe.build_star_system(p_len, q)
    if isinstance(res, StarSystem):
        return res
    top_d = max(2, delta)
    if res[0] == "stable":
        cert = StableSetCertificate(
            n=n, k=params.k, t=params.t, d=top_d,
            claimed_mode=params.mode, members=tuple(res[1].to_list()))
        return Outcome(kind="stable", stable=cert, trace=tuple(run.trace))
    return Outcome(kind="subdivision", subdivision=res[1], trace=tuple(run.trace))
