"""Deterministic test-instance generators.

Every generator takes an explicit seed and uses numpy's Generator so the same
(seed, parameters) pair always yields the same graph, byte for byte, across
platforms.
"""

from __future__ import annotations

import numpy as np

from .certificates import SubdivisionCertificate, floor_log2_sq, verify_subdivision
from .graph import Graph


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p). One uniform draw per unordered pair, in row-major
    upper-triangle order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must be in [0, 1]")
    rng = np.random.default_rng(seed)
    if n < 2:
        return Graph.from_edges(n, [])
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random(iu.shape[0])
    hit = draws < p
    edges = list(zip(iu[hit].tolist(), ju[hit].tolist()))
    return Graph.from_edges(n, edges)


def chordal(n: int, seed: int, max_clique_size: int = 6) -> tuple[Graph, list[int]]:
    """Chordal graph built by attaching each new vertex to a clique subset,
    so the vertex is simplicial at insertion time. Returns the graph and a
    perfect elimination order (reverse insertion order: each vertex's
    neighbors later in the order form a clique)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_clique_size < 2:
        raise ValueError("max_clique_size must be at least 2")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    cliques: list[list[int]] = [[0]]
    for v in range(1, n):
        base = cliques[int(rng.integers(0, len(cliques)))]
        hi = min(len(base), max_clique_size - 1)
        s = int(rng.integers(1, hi + 1))
        picked = rng.choice(len(base), size=s, replace=False)
        subset = sorted(base[i] for i in picked)
        for u in subset:
            edges.append((u, v))
        cliques.append(subset + [v])
    return Graph.from_edges(n, edges), list(range(n - 1, -1, -1))


def planted_subdivision(
    t: int,
    lengths: dict[tuple[int, int], int],
    noise_n: int,
    noise_p: float,
    seed: int,
) -> tuple[Graph, SubdivisionCertificate]:
    """Graph containing a known induced complete-graph subdivision on t branch
    vertices with the requested total length per pair, plus noise_n extra
    vertices. Noise edges appear with probability noise_p and may touch
    certificate vertices, but never join two of them, so the planted
    certificate stays valid by construction; it is re-checked before
    returning.

    Layout is deterministic: branch vertices take ids 0..t-1, path interiors
    follow in lexicographic pair order, noise ids come last. With t=3 and
    every length 3 the core is a 9-cycle."""
    if t < 3:
        raise ValueError("t must be at least 3")
    pairs = [(i, j) for i in range(1, t + 1) for j in range(i + 1, t + 1)]
    if set(lengths) != set(pairs):
        raise ValueError(f"lengths must map exactly the pairs {pairs}")
    for pair, ell in lengths.items():
        if not isinstance(ell, int) or ell < 3:
            raise ValueError(f"length for pair {pair} must be an integer >= 3")
    if noise_n < 0:
        raise ValueError("noise_n must be nonnegative")
    if not (0.0 <= noise_p <= 1.0):
        raise ValueError("noise_p must be in [0, 1]")

    core = t + sum(ell - 1 for ell in lengths.values())
    n = core + noise_n
    branch = tuple(range(t))
    edges: list[tuple[int, int]] = []
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    cursor = t
    for i, j in pairs:
        interior = tuple(range(cursor, cursor + lengths[(i, j)] - 1))
        cursor += len(interior)
        paths[(i, j)] = interior
        chain = (branch[i - 1],) + interior + (branch[j - 1],)
        edges.extend(zip(chain, chain[1:]))

    if noise_n and noise_p > 0.0:
        # one draw per eligible pair, row-major upper-triangle order
        rng = np.random.default_rng(seed)
        for u in range(n):
            for v in range(max(u + 1, core), n):
                if rng.random() < noise_p:
                    edges.append((u, v))

    g = Graph.from_edges(n, edges)
    d = max(2, max((len(g.neighbors(v)) for v in range(n)), default=2))
    max_len = max(floor_log2_sq(n), max(lengths.values()))
    cert = SubdivisionCertificate(
        n=n, k=1, t=t, d=d, claimed_mode="best-effort",
        branch=branch, paths=paths, min_len=3, max_len=max_len,
    )
    report = verify_subdivision(g, cert)
    if not report.ok:
        raise AssertionError(f"planted certificate failed verification: {report.violations}")
    return g, cert
