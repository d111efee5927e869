"""Numba kernels for the graph objectives.

All kernels are compiled with ``nogil=True`` so that chunks of a batch can be
evaluated on separate threads concurrently.  Each kernel writes only to the
output slice it was handed, and per-element results never depend on how the
batch was chunked, which keeps batch results identical for any worker count.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Sentinel for "node never touched by the sequence"; larger than any position.
NO_POS = np.iinfo(np.int64).max


@njit(cache=True, nogil=True)
def csr_scatter(src, dst, cursor, indices):
    """Counting-sort fill of a CSR indices array; cursor holds per-row write heads."""
    for e in range(src.shape[0]):
        s = src[e]
        pos = cursor[s]
        indices[pos] = dst[e]
        cursor[s] = pos + 1


@njit(cache=True, nogil=True)
def csr_scatter_weighted(src, dst, w, cursor, indices, weights):
    for e in range(src.shape[0]):
        s = src[e]
        pos = cursor[s]
        indices[pos] = dst[e]
        weights[pos] = w[e]
        cursor[s] = pos + 1


@njit(cache=True, nogil=True)
def cover_add(indptr, indices, covered, a):
    """Mark the neighbors of `a` covered; return the number newly covered."""
    gained = 0
    for e in range(indptr[a], indptr[a + 1]):
        v = indices[e]
        if covered[v] == 0:
            covered[v] = 1
            gained += 1
    return gained


@njit(cache=True, nogil=True)
def cover_marginals(indptr, indices, covered, cands, out, lo, hi):
    """out[i] = number of uncovered neighbors of cands[i], for i in [lo, hi)."""
    for i in range(lo, hi):
        a = cands[i]
        c = 0
        for e in range(indptr[a], indptr[a + 1]):
            if covered[indices[e]] == 0:
                c += 1
        out[i] = c


@njit(cache=True, nogil=True)
def cover_first_touch(indptr, indices, seq, lo, hi, firstpos):
    """Min-scatter: firstpos[v] = min position j in [lo, hi) with v adjacent to seq[j].

    Meant to run on a worker-private `firstpos` array; partial arrays are
    merged with an elementwise min afterwards, so the result is independent
    of the chunking.
    """
    for j in range(lo, hi):
        a = seq[j]
        for e in range(indptr[a], indptr[a + 1]):
            v = indices[e]
            if firstpos[v] > j:
                firstpos[v] = j


@njit(cache=True, nogil=True)
def cover_seq_marginals(indptr, indices, covered, firstpos, seq, positions, out, lo, hi):
    """Marginal of seq[p] against base-solution ∪ seq[0:p] for each requested position.

    A neighbor counts while it is uncovered by the base solution and first
    touched by the sequence at position >= p.
    """
    for i in range(lo, hi):
        p = positions[i]
        a = seq[p]
        c = 0
        for e in range(indptr[a], indptr[a + 1]):
            v = indices[e]
            if covered[v] == 0 and firstpos[v] >= p:
                c += 1
        out[i] = c


@njit(cache=True, nogil=True)
def cover_prefix_marginals(indptr, indices, covered, firstpos, prefix_len, cands, out, lo, hi):
    """Marginals of arbitrary candidates against base-solution ∪ seq[0:prefix_len]."""
    for i in range(lo, hi):
        a = cands[i]
        c = 0
        for e in range(indptr[a], indptr[a + 1]):
            v = indices[e]
            if covered[v] == 0 and firstpos[v] >= prefix_len:
                c += 1
        out[i] = c


@njit(cache=True, nogil=True)
def influence_add(indptr, indices, in_set, hits, q, a):
    """Add `a` to the influence state; return the value gain.

    `hits[v]` counts neighbors of v inside the solution; a node v outside the
    solution contributes 1 - q**hits[v], a member contributes 1.
    """
    gain = q ** hits[a]  # a's own term jumps from 1 - q**hits[a] to 1
    for e in range(indptr[a], indptr[a + 1]):
        v = indices[e]
        if in_set[v] == 0:
            gain += (1.0 - q) * q ** hits[v]
        hits[v] += 1
    in_set[a] = 1
    return gain


@njit(cache=True, nogil=True)
def influence_marginals(indptr, indices, in_set, hits, q, cands, out, lo, hi):
    for i in range(lo, hi):
        a = cands[i]
        g = q ** hits[a]
        for e in range(indptr[a], indptr[a + 1]):
            v = indices[e]
            if in_set[v] == 0:
                g += (1.0 - q) * q ** hits[v]
        out[i] = g


@njit(cache=True, nogil=True)
def revenue_add(indptr, indices, weights, pot, alpha, a):
    """Add `a` to the revenue state; returns the value gain.

    `pot[v]` is the total edge weight from v into the solution; node v
    contributes pot[v]**alpha.
    """
    gain = 0.0
    for e in range(indptr[a], indptr[a + 1]):
        v = indices[e]
        w = weights[e]
        gain += (pot[v] + w) ** alpha - pot[v] ** alpha
        pot[v] += w
    return gain


@njit(cache=True, nogil=True)
def revenue_marginals(indptr, indices, weights, pot, alpha, cands, out, lo, hi):
    for i in range(lo, hi):
        a = cands[i]
        g = 0.0
        for e in range(indptr[a], indptr[a + 1]):
            v = indices[e]
            w = weights[e]
            g += (pot[v] + w) ** alpha - pot[v] ** alpha
        out[i] = g


@njit(cache=True, nogil=True)
def directed_cover_add(out_indptr, out_indices, out_weights,
                       in_indptr, in_indices, in_weights, in_set, a):
    """Add `a` to the directed edge-cover state; returns the weight newly covered."""
    gain = 0.0
    for e in range(out_indptr[a], out_indptr[a + 1]):
        if in_set[out_indices[e]] == 0:
            gain += out_weights[e]
    for e in range(in_indptr[a], in_indptr[a + 1]):
        if in_set[in_indices[e]] == 0:
            gain += in_weights[e]
    in_set[a] = 1
    return gain


@njit(cache=True, nogil=True)
def directed_cover_marginals(out_indptr, out_indices, out_weights,
                             in_indptr, in_indices, in_weights, in_set,
                             cands, out, lo, hi):
    for i in range(lo, hi):
        a = cands[i]
        g = 0.0
        for e in range(out_indptr[a], out_indptr[a + 1]):
            if in_set[out_indices[e]] == 0:
                g += out_weights[e]
        for e in range(in_indptr[a], in_indptr[a + 1]):
            if in_set[in_indices[e]] == 0:
                g += in_weights[e]
        out[i] = g
