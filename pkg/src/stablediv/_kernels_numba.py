"""Compiled bitset kernels.

Separate module so the jitted functions live at top level: numba's on-disk
cache cannot re-identify functions defined inside a builder closure, which
makes every process recompile (and append a fresh cache entry). Module
globals are baked in as compile-time constants instead. Importing this
module requires numba; callers go through _kernels, which falls back to the
numpy implementations when the import fails.
"""

import numpy as np
from numba import njit

U1 = np.uint64(1)
M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
H01 = np.uint64(0x0101010101010101)
S1 = np.uint64(1)
S2 = np.uint64(2)
S4 = np.uint64(4)
S56 = np.uint64(56)


@njit(cache=True, inline="always")
def _pop64(x):
    x = x - ((x >> S1) & M1)
    x = (x & M2) + ((x >> S2) & M2)
    x = (x + (x >> S4)) & M4
    return np.int64((x * H01) >> S56)


@njit(cache=True)
def popcount_words(words):
    total = np.int64(0)
    for j in range(words.shape[0]):
        total += _pop64(words[j])
    return total


@njit(cache=True)
def or_rows(adj, idx):
    w = adj.shape[1]
    out = np.zeros(w, dtype=np.uint64)
    for i in range(idx.shape[0]):
        v = idx[i]
        for j in range(w):
            out[j] |= adj[v, j]
    return out


@njit(cache=True)
def counts_within(adj, mask, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    w = adj.shape[1]
    for i in range(idx.shape[0]):
        v = idx[i]
        c = np.int64(0)
        for j in range(w):
            c += _pop64(adj[v, j] & mask[j])
        out[i] = c
    return out


@njit(cache=True)
def greedy_stable(adj, active, n):
    w = adj.shape[1]
    remaining = active.copy()
    chosen = np.zeros(w, dtype=np.uint64)
    while True:
        best_v = -1
        best_deg = np.int64(n + 1)
        for v in range(n):
            if (remaining[v >> 6] >> np.uint64(v & 63)) & U1:
                deg = np.int64(0)
                for j in range(w):
                    deg += _pop64(adj[v, j] & remaining[j])
                if deg < best_deg:
                    best_deg = deg
                    best_v = v
        if best_v < 0:
            break
        chosen[best_v >> 6] |= U1 << np.uint64(best_v & 63)
        for j in range(w):
            remaining[j] &= ~adj[best_v, j]
        remaining[best_v >> 6] &= ~(U1 << np.uint64(best_v & 63))
    return chosen
