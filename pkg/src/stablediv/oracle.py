"""Reference oracles: slow, exact, and written against raw adjacency only.

These deliberately share no code with the extraction pipeline or the packed
bitset kernels. Tests use them to pin expected values and to cross-check the
extractor's certificates, so each one is a straight transcription of a
textbook algorithm with deterministic tie-breaking.
"""

from __future__ import annotations

from itertools import combinations

from .certificates import SubdivisionCertificate, floor_log2_sq, verify_subdivision
from .graph import Graph


class OracleBudgetError(RuntimeError):
    """Raised when a search exceeds its node budget instead of returning a
    possibly wrong answer."""


def _adjacency_sets(g: Graph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in g.edges():
        adj[u].add(v)
        adj[v].add(u)
    return adj


# ---------------------------------------------------------------------------
# exact maximum stable set


def exact_max_stable(
    g: Graph,
    within: list[int] | None = None,
    size_limit: int = 40,
    node_budget: int = 2_000_000,
) -> tuple[int, ...]:
    """Maximum stable set, found as a maximum clique of the complement with
    branch and bound (greedy-coloring upper bound). Exponential worst case;
    refuses inputs larger than size_limit. Returns sorted vertex ids."""
    verts = sorted(set(within)) if within is not None else list(range(g.n))
    for v in verts:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex id {v} out of range")
    n = len(verts)
    if n > size_limit:
        raise ValueError(f"instance has {n} vertices, over the size limit {size_limit}")
    if n == 0:
        return ()

    # Order by descending degree inside the instance, then by id. High-degree
    # vertices in g are low-degree in the complement, which the bound likes late.
    deg = {v: sum(1 for u in verts if u != v and g.has_edge(u, v)) for v in verts}
    order = sorted(verts, key=lambda v: (-deg[v], v))
    comp = [0] * n  # complement adjacency over local indices, as int bitmasks
    for i in range(n):
        for j in range(i + 1, n):
            if not g.has_edge(order[i], order[j]):
                comp[i] |= 1 << j
                comp[j] |= 1 << i

    best_size = 0
    best: list[int] = []
    nodes = 0

    def color_bound(pmask: int) -> tuple[list[int], list[int]]:
        # Greedy coloring of the candidate set; color number bounds the clique.
        seq: list[int] = []
        bounds: list[int] = []
        uncolored = pmask
        color = 0
        while uncolored:
            color += 1
            avail = uncolored
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= avail - 1
                avail &= ~comp[v]
                uncolored &= ~(1 << v)
                seq.append(v)
                bounds.append(color)
        return seq, bounds

    def expand(r: list[int], pmask: int):
        nonlocal best_size, best, nodes
        nodes += 1
        if nodes > node_budget:
            raise OracleBudgetError(f"exact_max_stable exceeded {node_budget} nodes")
        seq, bounds = color_bound(pmask)
        for i in range(len(seq) - 1, -1, -1):
            if len(r) + bounds[i] <= best_size:
                return
            v = seq[i]
            r.append(v)
            child = pmask & comp[v]
            if child:
                expand(r, child)
            elif len(r) > best_size:
                best_size = len(r)
                best = list(r)
            r.pop()
            pmask &= ~(1 << v)

    expand([], (1 << n) - 1)
    return tuple(sorted(order[i] for i in best))


# ---------------------------------------------------------------------------
# induced cycles


def induced_cycle_in_range(
    g: Graph, lo: int, hi: int, node_budget: int = 5_000_000
) -> tuple[int, ...] | None:
    """First induced (chordless) cycle with vertex count in [lo, hi], in
    canonical order: smallest vertex first, then the smaller neighbor as the
    second vertex. Returns the cycle's vertex sequence, or None."""
    lo = max(3, lo)
    if hi < lo or g.n < lo:
        return None
    adj = _adjacency_sets(g)
    nodes = 0

    def extend(v0: int, path: list[int], on_path: set[int]) -> tuple[int, ...] | None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise OracleBudgetError(f"induced_cycle_in_range exceeded {node_budget} nodes")
        last = path[-1]
        for w in sorted(adj[last]):
            if w <= v0 or w in on_path:
                continue
            if v0 in adj[w]:
                # w can only ever close the cycle; as an interior vertex the
                # edge (w, v0) would be a chord.
                if lo <= len(path) + 1 <= hi and path[1] < w:
                    if all(w not in adj[p] for p in path[1:-1]):
                        return tuple(path + [w])
                continue
            if len(path) >= hi - 1:
                continue
            if any(w in adj[p] for p in path[:-1]):
                continue
            path.append(w)
            on_path.add(w)
            found = extend(v0, path, on_path)
            if found:
                return found
            path.pop()
            on_path.remove(w)
        return None

    for v0 in range(g.n):
        for v1 in sorted(adj[v0]):
            if v1 <= v0:
                continue
            found = extend(v0, [v0, v1], {v0, v1})
            if found:
                return found
    return None


# ---------------------------------------------------------------------------
# exhaustive subdivision search


def exhaustive_subdivision_search(
    g: Graph,
    t: int,
    min_len: int = 3,
    max_len: int | None = None,
    size_limit: int = 40,
    node_budget: int = 5_000_000,
) -> SubdivisionCertificate | None:
    """Search every branch-vertex combination (ascending) for an induced
    complete-graph subdivision on t vertices with all path lengths in
    [min_len, max_len]. Supports t in {3, 4}. Returns the first certificate
    found, already checked by the verifier, or None."""
    if t not in (3, 4):
        raise ValueError("exhaustive search supports t = 3 or 4")
    if g.n > size_limit:
        raise ValueError(f"instance has {g.n} vertices, over the size limit {size_limit}")
    if min_len < 3:
        raise ValueError("min_len must be at least 3")
    if max_len is None:
        max_len = floor_log2_sq(g.n)
    if max_len < min_len:
        return None

    adj = _adjacency_sets(g)
    pairs = [(i, j) for i in range(1, t + 1) for j in range(i + 1, t + 1)]
    nodes = 0
    min_m, max_m = min_len - 1, max_len - 1  # interior vertex counts

    def pair_paths(branch, bi, bj, used, used_adj):
        """Yield interior tuples for an induced path from bi to bj whose
        interiors avoid `used`, have no neighbors among other paths'
        interiors (`used_adj`), and touch branch vertices only as the
        subdivision allows."""
        nonlocal nodes
        other_branch = [b for b in branch if b not in (bi, bj)]

        def usable(w: int, position: int, path: list[int]) -> bool:
            if w in used or w in path:
                return False
            if w in used_adj:
                return False
            if any(w in adj[b] for b in other_branch):
                return False
            if position > 0 and w in adj[bi]:
                return False
            # non-predecessor adjacency inside the current path is a chord
            if any(w in adj[p] for p in path[:-1]):
                return False
            return True

        def walk(path: list[int]):
            nonlocal nodes
            nodes += 1
            if nodes > node_budget:
                raise OracleBudgetError(
                    f"exhaustive_subdivision_search exceeded {node_budget} nodes")
            last = path[-1]
            for w in sorted(adj[last]):
                if not usable(w, len(path), path):
                    continue
                if bj in adj[w] or w in adj[bj]:
                    # forced closure: w may only be the final interior vertex
                    if min_m <= len(path) + 1 <= max_m:
                        yield tuple(path + [w])
                    continue
                if len(path) + 1 < max_m:
                    path.append(w)
                    yield from walk(path)
                    path.pop()

        for w0 in sorted(adj[bi]):
            if not usable(w0, 0, []):
                continue
            if w0 in adj[bj]:
                continue  # total length 2, below the floor of 3
            yield from walk([w0])

    def place(branch, idx, assignment, used, used_adj):
        if idx == len(pairs):
            return dict(assignment)
        i, j = pairs[idx]
        bi, bj = branch[i - 1], branch[j - 1]
        for interior in pair_paths(branch, bi, bj, used, used_adj):
            assignment[(i, j)] = interior
            added_adj = set()
            for w in interior:
                used.add(w)
                for u in adj[w]:
                    if u not in used_adj:
                        used_adj.add(u)
                        added_adj.add(u)
            result = place(branch, idx + 1, assignment, used, used_adj)
            if result is not None:
                return result
            del assignment[(i, j)]
            for w in interior:
                used.remove(w)
            used_adj -= added_adj
        return None

    d = 2
    if g.n:
        d = max(2, max(len(a) for a in adj))
    for branch in combinations(range(g.n), t):
        if any(b2 in adj[b1] for b1, b2 in combinations(branch, 2)):
            continue
        found = place(branch, 0, {}, set(branch), set())
        if found is not None:
            cert = SubdivisionCertificate(
                n=g.n, k=1, t=t, d=d, claimed_mode="best-effort",
                branch=tuple(branch), paths=found,
                min_len=min_len, max_len=max_len,
            )
            report = verify_subdivision(g, cert)
            if not report.ok:
                raise AssertionError(
                    f"oracle produced an invalid certificate: {report.violations}")
            return cert
    return None
