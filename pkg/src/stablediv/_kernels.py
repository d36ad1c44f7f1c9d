"""Bit-level kernels over packed uint64 adjacency words.

Every hot loop in the library funnels through four kernels: popcount over a
word array, OR-reduction of adjacency rows (set neighborhood), per-vertex
popcount against a mask (degrees restricted to a set), and the greedy
stable-set sweep. Each kernel has a numba implementation and a vectorized
numpy implementation with identical semantics, including tie-breaking.

Backend selection happens once at import time. Set STABLEDIV_BACKEND=numpy to
force the pure-numpy path; STABLEDIV_BACKEND=numba to require the compiled
path (import error if numba is unavailable). Default: numba when importable,
numpy otherwise. Both implementations stay importable for benchmarks and
equivalence tests via the IMPLS mapping.

Word-array convention: bit v lives in word v >> 6 at offset v & 63, and bits
at positions >= n are always zero. All kernels preserve that invariant.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

WORD_BITS = 64


def words_for(n: int) -> int:
    """Number of uint64 words needed to hold n bit positions (at least 1)."""
    return max(1, (n + 63) >> 6)


def indices_to_words(n: int, indices) -> np.ndarray:
    words = np.zeros(words_for(n), dtype=np.uint64)
    for v in indices:
        v = int(v)
        if v < 0 or v >= n:
            raise ValueError(f"vertex id {v} out of range for n={n}")
        words[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    return words


def words_to_indices(words: np.ndarray, n: int) -> np.ndarray:
    """Ascending int64 indices of the set bits below position n."""
    bits = np.unpackbits(words.view(np.uint8), bitorder="little", count=n)
    return np.flatnonzero(bits).astype(np.int64)


# ---------------------------------------------------------------------------
# numpy implementations


def _np_popcount_words(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def _np_or_rows(adj: np.ndarray, idx: np.ndarray) -> np.ndarray:
    if idx.size == 0:
        return np.zeros(adj.shape[1], dtype=np.uint64)
    return np.bitwise_or.reduce(adj[idx], axis=0)


def _np_counts_within(adj: np.ndarray, mask: np.ndarray, idx: np.ndarray) -> np.ndarray:
    if idx.size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.bitwise_count(adj[idx] & mask).sum(axis=1, dtype=np.int64)


def _np_greedy_stable(adj: np.ndarray, active: np.ndarray, n: int) -> np.ndarray:
    # Repeatedly take the minimum-degree remaining vertex (smallest id on
    # ties) and delete its closed neighborhood.
    remaining = active.copy()
    chosen = np.zeros_like(active)
    while True:
        ridx = words_to_indices(remaining, n)
        if ridx.size == 0:
            break
        degs = np.bitwise_count(adj[ridx] & remaining).sum(axis=1, dtype=np.int64)
        v = int(ridx[int(np.argmin(degs))])
        chosen[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        remaining &= ~adj[v]
        remaining[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
    return chosen


_NUMPY_IMPL = SimpleNamespace(
    name="numpy",
    popcount_words=_np_popcount_words,
    or_rows=_np_or_rows,
    counts_within=_np_counts_within,
    greedy_stable=_np_greedy_stable,
)


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily on first import of this module)


def _build_numba_impl():
    from . import _kernels_numba as nb

    def popcount_words(words):
        return int(nb.popcount_words(words))

    def counts_within(adj, mask, idx):
        return nb.counts_within(adj, mask, np.asarray(idx, dtype=np.int64))

    def or_rows(adj, idx):
        return nb.or_rows(adj, np.asarray(idx, dtype=np.int64))

    def greedy_stable(adj, active, n):
        return nb.greedy_stable(adj, active, n)

    return SimpleNamespace(
        name="numba",
        popcount_words=popcount_words,
        or_rows=or_rows,
        counts_within=counts_within,
        greedy_stable=greedy_stable,
    )


def _select_backend():
    requested = os.environ.get("STABLEDIV_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise RuntimeError(f"STABLEDIV_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numpy":
        return _NUMPY_IMPL
    try:
        impl = _build_numba_impl()
    except ImportError:
        if requested == "numba":
            raise
        return _NUMPY_IMPL
    return impl


IMPLS = {"numpy": _NUMPY_IMPL}
_ACTIVE = _select_backend()
if _ACTIVE.name == "numba":
    IMPLS["numba"] = _ACTIVE

BACKEND = _ACTIVE.name

popcount_words = _ACTIVE.popcount_words
or_rows = _ACTIVE.or_rows
counts_within = _ACTIVE.counts_within
greedy_stable = _ACTIVE.greedy_stable


def load_numba_impl():
    """Return the numba namespace, building it on demand (for benchmarks)."""
    if "numba" not in IMPLS:
        IMPLS["numba"] = _build_numba_impl()
    return IMPLS["numba"]
