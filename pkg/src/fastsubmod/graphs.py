"""Graph container, synthetic graph generators, and edge-list ingestion.

All generator randomness comes from numpy's Philox generator (a 64-bit
counter-based PRNG), so instances are reproducible across platforms for a
fixed seed.  Generated graphs are simple: no self-loops, no parallel edges.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """The project-wide PRNG: Philox, keyed by the given seed."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class Graph:
    """CSR adjacency.  Undirected graphs store each edge in both directions;
    directed graphs carry the reverse adjacency too so in-edges are reachable.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray | None = None
    directed: bool = False
    in_indptr: np.ndarray | None = None
    in_indices: np.ndarray | None = None
    in_weights: np.ndarray | None = None

    @property
    def n_edges(self) -> int:
        m = len(self.indices)
        return m if self.directed else m // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]


def _csr_from_arcs(n: int, src: np.ndarray, dst: np.ndarray,
                   w: np.ndarray | None) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Counting-sort CSR build; avoids argsort to keep peak memory low."""
    from . import _kernels

    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(len(src), dtype=np.int32)
    cursor = indptr[:-1].copy()
    if w is not None:
        weights = np.empty(len(src), dtype=np.float64)
        _kernels.csr_scatter_weighted(src, dst, w, cursor, indices, weights)
    else:
        weights = None
        _kernels.csr_scatter(src, dst, cursor, indices)
    return indptr, indices, weights


def build_graph(n: int, u: np.ndarray, v: np.ndarray,
                w: np.ndarray | None = None, directed: bool = False) -> Graph:
    """Assemble a Graph from parallel edge-endpoint arrays."""
    u = np.asarray(u, dtype=np.int32)
    v = np.asarray(v, dtype=np.int32)
    if w is not None:
        w = np.asarray(w, dtype=np.float64)
        if np.any(w < 0):
            raise ValueError("edge weights must be non-negative")
    if len(u) and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
        raise ValueError("edge endpoint out of range")
    if np.any(u == v):
        raise ValueError("self-loops are not allowed")
    if directed:
        indptr, indices, weights = _csr_from_arcs(n, u, v, w)
        in_indptr, in_indices, in_weights = _csr_from_arcs(n, v, u, w)
        return Graph(n, indptr, indices, weights, True, in_indptr, in_indices, in_weights)
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    ww = np.concatenate([w, w]) if w is not None else None
    indptr, indices, weights = _csr_from_arcs(n, src, dst, ww)
    return Graph(n, indptr, indices, weights, False)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _pairs_from_linear(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map row-major upper-triangle linear indices to (i, j) pairs, i < j."""
    t = t.astype(np.int64)
    tf = t.astype(np.float64)
    # row i holds the linear indices [S(i), S(i+1)) with S(i) = i*(2n - i - 1)/2
    i = np.floor((2 * n - 1 - np.sqrt(float(2 * n - 1) ** 2 - 8.0 * tf)) / 2).astype(np.int64)
    np.clip(i, 0, n - 2, out=i)
    # one-step correction for float rounding at the row boundaries
    i[i * (2 * n - i - 1) // 2 > t] -= 1
    i[(i + 1) * (2 * n - i - 2) // 2 <= t] += 1
    j = i + 1 + (t - i * (2 * n - i - 1) // 2)
    return i.astype(np.int32), j.astype(np.int32)


def _sample_pair_indices(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of successes among `total` Bernoulli(p) trials via geometric gaps."""
    if total <= 0:
        return np.empty(0, dtype=np.int64)
    out = []
    pos = -1
    log1mp = np.log1p(-p)
    batch = max(1024, int(total * p * 1.2))
    batch = min(batch, 8_000_000)
    while pos < total:
        r = rng.random(batch)
        gaps = np.floor(np.log(r) / log1mp).astype(np.int64) + 1
        idx = pos + np.cumsum(gaps)
        out.append(idx)
        pos = int(idx[-1])
    idx = np.concatenate(out)
    return idx[idx < total]


def gen_er(n: int, p: float = 0.01, seed=0) -> Graph:
    """Erdős–Rényi G(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = make_rng(seed)
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return build_graph(n, np.empty(0, np.int32), np.empty(0, np.int32))
    if p == 1.0:
        i, j = np.triu_indices(n, k=1)
        return build_graph(n, i.astype(np.int32), j.astype(np.int32))
    t = _sample_pair_indices(total, p, rng)
    u, v = _pairs_from_linear(n, t)
    return build_graph(n, u, v)


def gen_sbm(cluster_sizes, p: float = 0.1, seed=0) -> Graph:
    """Stochastic block model: independent ER(p) inside each cluster, nothing across."""
    sizes = [int(s) for s in cluster_sizes]
    if any(s <= 0 for s in sizes):
        raise ValueError("cluster sizes must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    n = sum(sizes)
    us, vs = [], []
    offset = 0
    for s in sizes:
        total = s * (s - 1) // 2
        if total and p > 0.0:
            if p == 1.0:
                t = np.arange(total, dtype=np.int64)
            else:
                t = _sample_pair_indices(total, p, rng)
            u, v = _pairs_from_linear(s, t)
            us.append(u + offset)
            vs.append(v + offset)
        offset += s
    if us:
        u = np.concatenate(us).astype(np.int32)
        v = np.concatenate(vs).astype(np.int32)
    else:
        u = v = np.empty(0, np.int32)
    return build_graph(n, u, v)


def gen_ws(n: int, ring_neighbors: int = 2, rewire: float = 0.1, seed=0) -> Graph:
    """Watts–Strogatz small world.

    Starts from a ring lattice of degree ``ring_neighbors`` (connections to
    the ring_neighbors/2 nearest nodes on each side) and rewires each lattice
    edge independently with probability ``rewire`` to a uniformly random
    non-neighbor.  Edge count is preserved.
    """
    if ring_neighbors < 2 or ring_neighbors % 2:
        raise ValueError("ring_neighbors must be an even integer >= 2")
    if n < ring_neighbors + 1:
        raise ValueError(f"need n >= ring_neighbors + 1, got n={n}")
    if not 0.0 <= rewire <= 1.0:
        raise ValueError("rewire probability must lie in [0, 1]")
    rng = make_rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    edges: list[tuple[int, int]] = []
    for off in range(1, ring_neighbors // 2 + 1):
        for uu in range(n):
            vv = (uu + off) % n
            if vv not in adj[uu]:
                adj[uu].add(vv)
                adj[vv].add(uu)
                edges.append((uu, vv))
    flips = rng.random(len(edges))
    for e, (uu, vv) in enumerate(edges):
        if flips[e] >= rewire:
            continue
        if len(adj[uu]) >= n - 1:
            continue  # u saturated, nowhere to rewire to
        while True:
            w = int(rng.integers(n))
            if w != uu and w not in adj[uu]:
                break
        adj[uu].discard(vv)
        adj[vv].discard(uu)
        adj[uu].add(w)
        adj[w].add(uu)
        edges[e] = (uu, w)
    u = np.array([a for a, _ in edges], dtype=np.int32)
    v = np.array([b for _, b in edges], dtype=np.int32)
    return build_graph(n, u, v)


def gen_ba(n: int, m: int = 1, seed=0) -> Graph:
    """Barabási–Albert preferential attachment with m edges per new node."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if n < m + 1:
        raise ValueError(f"need n >= m + 1, got n={n}")
    rng = make_rng(seed)
    # endpoint-repetition list makes degree-proportional sampling O(1)
    targets: list[int] = list(range(m))  # seed nodes, attached uniformly at first
    us: list[int] = []
    vs: list[int] = []
    repeated: list[int] = []
    for v_new in range(m, n):
        chosen: set[int] = set()
        while len(chosen) < m:
            if repeated:
                cand = repeated[int(rng.integers(len(repeated)))]
            else:
                cand = targets[int(rng.integers(len(targets)))]
            chosen.add(cand)
        for c in chosen:
            us.append(v_new)
            vs.append(c)
            repeated.append(c)
            repeated.append(v_new)
    return build_graph(n, np.array(us, np.int32), np.array(vs, np.int32))


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def load_edge_list(path, directed: bool = False, remap_ids: bool = False) -> Graph:
    """Parse a `u v [w]` edge list; `#` starts a comment, blank lines skipped.

    Node ids are taken literally (n = max id + 1, gaps become isolated nodes)
    unless ``remap_ids`` densifies them.  Duplicate edges keep the maximum
    weight and emit a warning; self-loops are dropped with a warning.
    """
    seen: dict[tuple[int, int], float] = {}
    weighted = False
    dupes = 0
    loops = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 'u v [w]', got {line.rstrip()!r}")
            try:
                uu, vv = int(parts[0]), int(parts[1])
                ww = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if uu < 0 or vv < 0:
                raise ValueError(f"{path}:{lineno}: negative node id")
            if not np.isfinite(ww) or ww < 0:
                raise ValueError(f"{path}:{lineno}: bad edge weight {parts[2]}")
            if len(parts) == 3:
                weighted = True
            if uu == vv:
                loops += 1
                continue
            key = (uu, vv) if directed else (min(uu, vv), max(uu, vv))
            if key in seen:
                dupes += 1
                seen[key] = max(seen[key], ww)
            else:
                seen[key] = ww
    if dupes:
        warnings.warn(f"{path}: {dupes} duplicate edge(s), kept maximum weight")
    if loops:
        warnings.warn(f"{path}: dropped {loops} self-loop(s)")
    if not seen:
        return Graph(0, np.zeros(1, np.int64), np.empty(0, np.int32),
                     None, directed,
                     np.zeros(1, np.int64) if directed else None,
                     np.empty(0, np.int32) if directed else None,
                     np.empty(0, np.float64) if directed and weighted else None)
    u = np.array([k[0] for k in seen], dtype=np.int64)
    v = np.array([k[1] for k in seen], dtype=np.int64)
    w = np.array(list(seen.values()), dtype=np.float64) if weighted else None
    if remap_ids:
        ids = np.unique(np.concatenate([u, v]))
        lookup = {int(old): new for new, old in enumerate(ids)}
        u = np.array([lookup[int(x)] for x in u], dtype=np.int64)
        v = np.array([lookup[int(x)] for x in v], dtype=np.int64)
        n = len(ids)
    else:
        n = int(max(u.max(), v.max())) + 1
    return build_graph(n, u.astype(np.int32), v.astype(np.int32), w, directed)
