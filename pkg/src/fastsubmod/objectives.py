"""The benchmark objective families.

Five monotone submodular objectives: max cover, weighted directed edge cover,
movie recommendation, revenue maximization, and influence maximization.  Each
carries a pure from-scratch ``value`` (the reference used by tests and brute
force) plus an incremental state so marginals cost O(degree).

Max cover counts a node iff it has a neighbor inside the solution; membership
alone does not cover a node.  Many cover implementations include the node
itself, which changes values (not algorithm behavior), so this choice is
deliberate and test-pinned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graphs import Graph, make_rng
from .oracle import Objective, PrefixScanner, WorkerPool

#: Ratings strictly above this value count as "highly rated".
HIGH_RATING = 4.5


# ---------------------------------------------------------------------------
# Max cover
# ---------------------------------------------------------------------------

class _CoverState:
    __slots__ = ("members", "covered", "value")

    def __init__(self, members, covered, value):
        self.members = members
        self.covered = covered
        self.value = value


class _CoverScanner(PrefixScanner):
    """Random-access prefix marginals for cover.

    One pass records, for every node, the first sequence position that
    touches it; a candidate's marginal at prefix length L is then the count
    of its neighbors untouched by both the base solution and positions < L.
    Both the pass and the per-position counts chunk across workers.
    """

    def __init__(self, objective: "MaxCoverObjective", base_state: _CoverState, seq: np.ndarray):
        self._obj = objective
        self.seq = np.asarray(seq, dtype=np.int64)
        self._covered = base_state.covered.copy()
        self._firstpos: np.ndarray | None = None

    def _ensure_firstpos(self, pool: WorkerPool) -> np.ndarray:
        if self._firstpos is not None:
            return self._firstpos
        g = self._obj.graph
        n = g.n
        length = len(self.seq)
        if pool.workers == 1 or length < 4 * pool.workers:
            fp = np.full(n, _kernels.NO_POS, dtype=np.int64)
            _kernels.cover_first_touch(g.indptr, g.indices, self.seq, 0, length, fp)
        else:
            # each chunk min-scatters into its own array; the elementwise min
            # of the partials is independent of the chunking
            bounds = np.linspace(0, length, pool.workers + 1).astype(np.int64)
            spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
            partials = [np.full(n, _kernels.NO_POS, dtype=np.int64) for _ in spans]

            def task(span, part):
                return lambda: _kernels.cover_first_touch(
                    g.indptr, g.indices, self.seq, span[0], span[1], part)

            pool.run_tasks([task(s, p) for s, p in zip(spans, partials)])
            fp = partials[0]
            for part in partials[1:]:
                np.minimum(fp, part, out=fp)
        self._firstpos = fp
        return fp

    def eval_positions(self, positions, pool) -> np.ndarray:
        g = self._obj.graph
        fp = self._ensure_firstpos(pool)
        positions = np.asarray(positions, dtype=np.int64)
        out = np.empty(len(positions), dtype=np.float64)
        pool.map_chunks(len(positions), lambda lo, hi: _kernels.cover_seq_marginals(
            g.indptr, g.indices, self._covered, fp, self.seq, positions, out, lo, hi))
        return out

    def prefix_marginals(self, cands, prefix_len, pool) -> np.ndarray:
        g = self._obj.graph
        fp = self._ensure_firstpos(pool)
        cands = np.asarray(cands, dtype=np.int64)
        out = np.empty(len(cands), dtype=np.float64)
        pool.map_chunks(len(cands), lambda lo, hi: _kernels.cover_prefix_marginals(
            g.indptr, g.indices, self._covered, fp, prefix_len, cands, out, lo, hi))
        return out

    def rebase(self, state: _CoverState) -> "_CoverScanner":
        sib = _CoverScanner.__new__(_CoverScanner)
        sib._obj = self._obj
        sib.seq = self.seq
        sib._covered = state.covered.copy()
        sib._firstpos = self._firstpos
        return sib


class MaxCoverObjective(Objective):
    """f(S) = number of nodes with at least one neighbor in S."""

    def __init__(self, graph: Graph):
        if graph.directed:
            raise ValueError("max cover expects an undirected graph")
        self.graph = graph
        self.n = graph.n
        self.description = f"max-cover(n={graph.n}, m={graph.n_edges})"

    def value(self, elements) -> float:
        mask = np.zeros(self.n, dtype=bool)
        for a in elements:
            g = self.graph
            mask[g.indices[g.indptr[a]:g.indptr[a + 1]]] = True
        return float(mask.sum())

    def empty_state(self):
        return _CoverState(set(), np.zeros(self.n, dtype=np.uint8), 0.0)

    def copy_state(self, state):
        return _CoverState(set(state.members), state.covered.copy(), state.value)

    def state_add(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        gained = float(_kernels.cover_add(g.indptr, g.indices, state.covered, a))
        state.members.add(a)
        state.value += gained
        return gained

    def state_marginal(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        out = np.empty(1, dtype=np.float64)
        _kernels.cover_marginals(g.indptr, g.indices, state.covered,
                                 np.array([a], dtype=np.int64), out, 0, 1)
        return float(out[0])

    def state_marginals(self, state, cands, pool=None) -> np.ndarray:
        g = self.graph
        cands = np.asarray(cands, dtype=np.int64)
        out = np.empty(len(cands), dtype=np.float64)
        pool = pool or WorkerPool(1)
        pool.map_chunks(len(cands), lambda lo, hi: _kernels.cover_marginals(
            g.indptr, g.indices, state.covered, cands, out, lo, hi))
        return out

    def prefix_scanner(self, state, seq) -> _CoverScanner:
        return _CoverScanner(self, state, seq)


def max_cover(graph: Graph, elements) -> float:
    """Reference evaluation of the cover objective."""
    return MaxCoverObjective(graph).value(list(elements))


# ---------------------------------------------------------------------------
# Weighted directed edge cover (traffic sensor placement)
# ---------------------------------------------------------------------------

class _DirCoverState:
    __slots__ = ("members", "in_set", "value")

    def __init__(self, members, in_set, value):
        self.members = members
        self.in_set = in_set
        self.value = value


class WeightedDirectedCoverObjective(Objective):
    """f(S) = total weight of directed edges with at least one endpoint in S."""

    def __init__(self, graph: Graph):
        if not graph.directed:
            raise ValueError("weighted directed cover expects a directed graph")
        if graph.weights is None:
            raise ValueError("weighted directed cover requires edge weights")
        self.graph = graph
        self.n = graph.n
        self.description = f"weighted-cover(n={graph.n}, m={graph.n_edges})"

    def value(self, elements) -> float:
        g = self.graph
        in_set = np.zeros(self.n, dtype=bool)
        members = list(elements)
        if members:
            in_set[np.asarray(members, dtype=np.int64)] = True
        src = np.repeat(np.arange(self.n), np.diff(g.indptr))
        covered = in_set[src] | in_set[g.indices]
        return float(g.weights[covered].sum())

    def empty_state(self):
        return _DirCoverState(set(), np.zeros(self.n, dtype=np.uint8), 0.0)

    def copy_state(self, state):
        return _DirCoverState(set(state.members), state.in_set.copy(), state.value)

    def state_add(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        gained = float(_kernels.directed_cover_add(
            g.indptr, g.indices, g.weights,
            g.in_indptr, g.in_indices, g.in_weights, state.in_set, a))
        state.members.add(a)
        state.value += gained
        return gained

    def state_marginal(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        out = np.empty(1, dtype=np.float64)
        _kernels.directed_cover_marginals(
            g.indptr, g.indices, g.weights,
            g.in_indptr, g.in_indices, g.in_weights, state.in_set,
            np.array([a], dtype=np.int64), out, 0, 1)
        return float(out[0])

    def state_marginals(self, state, cands, pool=None) -> np.ndarray:
        g = self.graph
        cands = np.asarray(cands, dtype=np.int64)
        out = np.empty(len(cands), dtype=np.float64)
        pool = pool or WorkerPool(1)
        pool.map_chunks(len(cands), lambda lo, hi: _kernels.directed_cover_marginals(
            g.indptr, g.indices, g.weights,
            g.in_indptr, g.in_indices, g.in_weights, state.in_set,
            cands, out, lo, hi))
        return out


def weighted_directed_cover(graph: Graph, elements) -> float:
    return WeightedDirectedCoverObjective(graph).value(list(elements))


# ---------------------------------------------------------------------------
# Movie recommendation
# ---------------------------------------------------------------------------

@dataclass
class RatingsMatrix:
    """Users × movies ratings plus per-movie genre sets."""

    ratings: np.ndarray
    genres: list[np.ndarray]
    high_rating_threshold: float = HIGH_RATING

    def __post_init__(self):
        self.ratings = np.asarray(self.ratings, dtype=np.float64)
        if self.ratings.ndim != 2:
            raise ValueError("ratings must be a 2-D users × movies matrix")
        if not np.all(np.isfinite(self.ratings)) or np.any(self.ratings < 0):
            raise ValueError("ratings must be finite and non-negative")
        if len(self.genres) != self.ratings.shape[1]:
            raise ValueError("need one genre set per movie")
        self.genres = [np.asarray(g, dtype=np.int64) for g in self.genres]

    @property
    def n_users(self) -> int:
        return self.ratings.shape[0]

    @property
    def n_movies(self) -> int:
        return self.ratings.shape[1]


class _MovieState:
    __slots__ = ("members", "genre_covered", "user_high", "value")

    def __init__(self, members, genre_covered, user_high, value):
        self.members = members
        self.genre_covered = genre_covered
        self.user_high = user_high
        self.value = value


class MovieRecommendationObjective(Objective):
    """Rating mass plus weighted genre coverage plus weighted user coverage.

    f(S) = Σ_{users i} Σ_{j in S} r_ij + alpha · |genres covered by S|
           + beta · |users with at least one movie in S rated above 4.5|.

    Defaults: alpha = 0.5 · max_j Σ_i r_ij and beta = 1.
    """

    def __init__(self, ratings: RatingsMatrix, alpha: float | None = None, beta: float = 1.0):
        self.data = ratings
        self.n = ratings.n_movies
        self.col_sums = ratings.ratings.sum(axis=0)
        self.alpha = float(alpha) if alpha is not None else 0.5 * float(self.col_sums.max(initial=0.0))
        self.beta = float(beta)
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        self.high = ratings.ratings > ratings.high_rating_threshold
        self.n_genres = int(max((int(g.max()) + 1 for g in ratings.genres if len(g)), default=0))
        self.description = f"movie-recommendation(movies={self.n}, users={ratings.n_users})"

    def value(self, elements) -> float:
        movies = list(elements)
        if not movies:
            return 0.0
        idx = np.asarray(movies, dtype=np.int64)
        rating_mass = float(self.col_sums[idx].sum())
        covered_genres = set()
        for j in movies:
            covered_genres.update(self.data.genres[j].tolist())
        user_cov = float(self.high[:, idx].any(axis=1).sum())
        return rating_mass + self.alpha * len(covered_genres) + self.beta * user_cov

    def empty_state(self):
        return _MovieState(set(), np.zeros(self.n_genres, dtype=bool),
                           np.zeros(self.data.n_users, dtype=bool), 0.0)

    def copy_state(self, state):
        return _MovieState(set(state.members), state.genre_covered.copy(),
                           state.user_high.copy(), state.value)

    def state_add(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        gain = self._gain(state, a)
        state.genre_covered[self.data.genres[a]] = True
        state.user_high |= self.high[:, a]
        state.members.add(a)
        state.value += gain
        return gain

    def _gain(self, state, a: int) -> float:
        new_genres = int((~state.genre_covered[self.data.genres[a]]).sum())
        new_users = int((self.high[:, a] & ~state.user_high).sum())
        return float(self.col_sums[a]) + self.alpha * new_genres + self.beta * new_users

    def state_marginal(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        return self._gain(state, a)


def movie_recommendation(ratings: RatingsMatrix, elements,
                         alpha: float | None = None, beta: float = 1.0) -> float:
    return MovieRecommendationObjective(ratings, alpha, beta).value(list(elements))


# ---------------------------------------------------------------------------
# Revenue maximization
# ---------------------------------------------------------------------------

class _RevenueState:
    __slots__ = ("members", "pot", "value")

    def __init__(self, members, pot, value):
        self.members = members
        self.pot = pot
        self.value = value


class RevenueObjective(Objective):
    """f(S) = Σ_nodes (Σ_{j in S} w_ij)^alpha with 0 < alpha < 1 and 0^alpha = 0."""

    def __init__(self, graph: Graph, alpha: float = 0.9):
        if graph.directed:
            raise ValueError("revenue expects an undirected weighted graph")
        if graph.weights is None:
            raise ValueError("revenue requires edge weights")
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if np.any(graph.weights < 0):
            raise ValueError("edge weights must be non-negative")
        self.graph = graph
        self.alpha = float(alpha)
        self.n = graph.n
        self.description = f"revenue(n={graph.n}, m={graph.n_edges}, alpha={alpha})"

    def value(self, elements) -> float:
        g = self.graph
        pot = np.zeros(self.n, dtype=np.float64)
        seen = set()
        for a in elements:
            if a in seen:
                continue
            seen.add(a)
            lo, hi = g.indptr[a], g.indptr[a + 1]
            np.add.at(pot, g.indices[lo:hi], g.weights[lo:hi])
        return float((pot ** self.alpha).sum())

    def empty_state(self):
        return _RevenueState(set(), np.zeros(self.n, dtype=np.float64), 0.0)

    def copy_state(self, state):
        return _RevenueState(set(state.members), state.pot.copy(), state.value)

    def state_add(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        gained = float(_kernels.revenue_add(g.indptr, g.indices, g.weights,
                                            state.pot, self.alpha, a))
        state.members.add(a)
        state.value += gained
        return gained

    def state_marginal(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        out = np.empty(1, dtype=np.float64)
        _kernels.revenue_marginals(g.indptr, g.indices, g.weights, state.pot,
                                   self.alpha, np.array([a], dtype=np.int64), out, 0, 1)
        return float(out[0])

    def state_marginals(self, state, cands, pool=None) -> np.ndarray:
        g = self.graph
        cands = np.asarray(cands, dtype=np.int64)
        out = np.empty(len(cands), dtype=np.float64)
        pool = pool or WorkerPool(1)
        pool.map_chunks(len(cands), lambda lo, hi: _kernels.revenue_marginals(
            g.indptr, g.indices, g.weights, state.pot, self.alpha, cands, out, lo, hi))
        return out


def revenue(graph: Graph, elements, alpha: float = 0.9) -> float:
    return RevenueObjective(graph, alpha).value(list(elements))


def draw_uniform_weights(graph: Graph, low: float = 1.0, high: float = 2.0, seed=0) -> Graph:
    """Rebuild an undirected graph with symmetric U(low, high) edge weights."""
    if graph.directed:
        raise ValueError("uniform weight drawing is for undirected graphs")
    from .graphs import build_graph

    rng = make_rng(seed)
    n = graph.n
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(graph.indptr))
    dst = graph.indices.astype(np.int64)
    fwd = src < dst
    u, v = src[fwd], dst[fwd]
    order = np.lexsort((v, u))  # canonical edge order, independent of CSR layout
    u, v = u[order], v[order]
    w = rng.uniform(low, high, size=len(u))
    return build_graph(n, u.astype(np.int32), v.astype(np.int32), w, directed=False)


# ---------------------------------------------------------------------------
# Influence maximization
# ---------------------------------------------------------------------------

class _InfluenceState:
    __slots__ = ("members", "in_set", "hits", "value")

    def __init__(self, members, in_set, hits, value):
        self.members = members
        self.in_set = in_set
        self.hits = hits
        self.value = value


class InfluenceObjective(Objective):
    """Expected count of influenced users under independent influence.

    A member counts 1; a non-member with h neighbors inside the solution
    counts 1 - (1 - p)^h.
    """

    def __init__(self, graph: Graph, p: float = 0.01):
        if graph.directed:
            raise ValueError("influence expects an undirected graph")
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")
        self.graph = graph
        self.p = float(p)
        self.q = 1.0 - float(p)
        self.n = graph.n
        self.description = f"influence(n={graph.n}, m={graph.n_edges}, p={p})"

    def value(self, elements) -> float:
        members = set(int(a) for a in elements)
        if not members:
            return 0.0
        g = self.graph
        hits = np.zeros(self.n, dtype=np.int64)
        for a in members:
            hits[g.indices[g.indptr[a]:g.indptr[a + 1]]] += 1
        vals = 1.0 - self.q ** hits
        idx = np.asarray(sorted(members), dtype=np.int64)
        vals[idx] = 1.0
        return float(vals.sum())

    def empty_state(self):
        return _InfluenceState(set(), np.zeros(self.n, dtype=np.uint8),
                               np.zeros(self.n, dtype=np.int64), 0.0)

    def copy_state(self, state):
        return _InfluenceState(set(state.members), state.in_set.copy(),
                               state.hits.copy(), state.value)

    def state_add(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        gained = float(_kernels.influence_add(g.indptr, g.indices, state.in_set,
                                              state.hits, self.q, a))
        state.members.add(a)
        state.value += gained
        return gained

    def state_marginal(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        g = self.graph
        out = np.empty(1, dtype=np.float64)
        _kernels.influence_marginals(g.indptr, g.indices, state.in_set, state.hits,
                                     self.q, np.array([a], dtype=np.int64), out, 0, 1)
        return float(out[0])

    def state_marginals(self, state, cands, pool=None) -> np.ndarray:
        g = self.graph
        cands = np.asarray(cands, dtype=np.int64)
        out = np.empty(len(cands), dtype=np.float64)
        pool = pool or WorkerPool(1)
        pool.map_chunks(len(cands), lambda lo, hi: _kernels.influence_marginals(
            g.indptr, g.indices, state.in_set, state.hits, self.q, cands, out, lo, hi))
        return out


def influence(graph: Graph, elements, p: float = 0.01) -> float:
    return InfluenceObjective(graph, p).value(list(elements))


# ---------------------------------------------------------------------------
# Ratings ingestion
# ---------------------------------------------------------------------------

def load_ratings(path, genres_path) -> RatingsMatrix:
    """Parse `user movie rating` triples plus a `movie genre...` map file.

    Ids are taken literally (dense 0-based expected); `#` comments allowed.
    """
    users: list[int] = []
    movies: list[int] = []
    vals: list[float] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'user movie rating'")
            try:
                users.append(int(parts[0]))
                movies.append(int(parts[1]))
                vals.append(float(parts[2]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if users and (min(users) < 0 or min(movies) < 0):
        raise ValueError(f"{path}: negative ids")
    n_users = max(users, default=-1) + 1
    n_movies = max(movies, default=-1) + 1
    ratings = np.zeros((n_users, n_movies), dtype=np.float64)
    ratings[users, movies] = vals
    genre_sets: list[set[int]] = [set() for _ in range(n_movies)]
    with open(genres_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            try:
                movie = int(parts[0])
                ids = [int(x) for x in parts[1:]]
            except ValueError as exc:
                raise ValueError(f"{genres_path}:{lineno}: {exc}") from None
            if not 0 <= movie < n_movies:
                raise ValueError(f"{genres_path}:{lineno}: movie {movie} out of range")
            genre_sets[movie].update(ids)
    genres = [np.array(sorted(s), dtype=np.int64) for s in genre_sets]
    return RatingsMatrix(ratings, genres)
