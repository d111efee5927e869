"""Black-box oracle layer: objectives, query accounting, and batch evaluation.

Algorithms see a monotone submodular function only through value and
marginal-gain queries.  Every query is charged to a :class:`QueryLedger`;
queries issued together as one synchronized batch count as a single adaptive
round, while serial algorithms charge one round per query.  Marginals of
elements already in the solution are known to be zero and are never charged.

Concurrency contract: objectives are immutable after construction, batch
evaluations may fan out over a :class:`WorkerPool`, all randomness is drawn
by the orchestrating thread, and ledgers are updated only by the orchestrator
at batch boundaries.  Batch results are therefore identical for any worker
count.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

#: Absolute tolerance for all value comparisons; threshold tests accept
#: marginals >= t - VALUE_TOL.
VALUE_TOL = 1e-9

#: Below this batch size the dispatch overhead dominates; evaluate inline.
_MIN_PARALLEL_ITEMS = 64


class WorkerPool:
    """Fixed-size thread pool for batched oracle evaluation.

    Work is split into contiguous chunks whose outputs land in disjoint
    slices of a preallocated array, so results never depend on the worker
    count.  The evaluation kernels release the GIL, which is what makes
    threads useful here.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def map_chunks(self, n_items: int, chunk_fn) -> None:
        """Run ``chunk_fn(lo, hi)`` over a partition of ``range(n_items)``."""
        if n_items <= 0:
            return
        if self._executor is None or n_items < _MIN_PARALLEL_ITEMS:
            chunk_fn(0, n_items)
            return
        bounds = np.linspace(0, n_items, self.workers + 1).astype(np.int64)
        futures = [
            self._executor.submit(chunk_fn, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()

    def run_tasks(self, tasks) -> None:
        """Run zero-argument callables, concurrently when the pool has workers."""
        if self._executor is None or len(tasks) <= 1:
            for t in tasks:
                t()
            return
        futures = [self._executor.submit(t) for t in tasks]
        for f in futures:
            f.result()

    def barrier(self) -> None:
        """Block until every worker thread has checked in (used around timing)."""
        if self._executor is None:
            return
        gate = threading.Barrier(self.workers)
        futures = [self._executor.submit(gate.wait) for _ in range(self.workers)]
        for f in futures:
            f.result()

    def shutdown(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()


#: Shared no-op pool for serial callers.
SERIAL_POOL = WorkerPool(1)


# ---------------------------------------------------------------------------
# Objective protocol
# ---------------------------------------------------------------------------

class _SetState:
    """Generic evaluation state: the member set plus the current value."""

    __slots__ = ("members", "value")

    def __init__(self, members, value):
        self.members = members
        self.value = value


class Objective:
    """A monotone submodular set function over the ground set {0, ..., n-1}.

    Subclasses must implement :meth:`value`, a pure from-scratch evaluation.
    The incremental-state protocol below has generic fallbacks built on
    :meth:`value`; concrete objectives override it so a marginal costs
    O(degree) work instead of a full evaluation.  States are private to one
    caller and never shared between threads; everything else is immutable.
    """

    n: int = 0
    description: str = "objective"

    def value(self, elements) -> float:
        raise NotImplementedError

    def check_element(self, a: int) -> None:
        if not 0 <= a < self.n:
            raise ValueError(f"element {a} out of range for ground set of size {self.n}")

    # -- incremental evaluation protocol ------------------------------------

    def empty_state(self):
        return _SetState(set(), 0.0)

    def copy_state(self, state):
        return _SetState(set(state.members), state.value)

    def state_value(self, state) -> float:
        return state.value

    def state_add(self, state, a: int) -> float:
        """Add ``a`` to the state; returns the value gain (0 for members)."""
        if a in state.members:
            return 0.0
        new = self.value(sorted(state.members | {a}))
        gain = new - state.value
        state.members.add(a)
        state.value = new
        return gain

    def state_marginal(self, state, a: int) -> float:
        if a in state.members:
            return 0.0
        return self.value(sorted(state.members | {a})) - state.value

    def state_marginals(self, state, cands, pool: WorkerPool | None = None) -> np.ndarray:
        """Marginals of many candidates against one fixed state."""
        out = np.empty(len(cands), dtype=np.float64)
        for i, a in enumerate(cands):
            out[i] = self.state_marginal(state, int(a))
        return out

    def prefix_scanner(self, state, seq: np.ndarray) -> "PrefixScanner":
        """Evaluator for marginals against state ∪ seq[0:j] prefixes."""
        return SerialPrefixScanner(self, state, seq)


class PrefixScanner:
    """Evaluates marginals against a base state extended by sequence prefixes.

    The prefix of length L is the first L sequence elements regardless of
    whether they later join the solution, so every query in a batch is fully
    determined before dispatch.
    """

    seq: np.ndarray

    def eval_positions(self, positions: np.ndarray, pool: WorkerPool) -> np.ndarray:
        """out[i] = marginal of seq[p] against base ∪ seq[0:p] for p = positions[i].

        ``positions`` must be strictly increasing.
        """
        raise NotImplementedError

    def prefix_marginals(self, cands: np.ndarray, prefix_len: int, pool: WorkerPool) -> np.ndarray:
        """Marginals of ``cands`` against base ∪ seq[0:prefix_len]."""
        raise NotImplementedError

    def rebase(self, state) -> "PrefixScanner":
        """Same sequence, different base state (reuses sequence-derived caches)."""
        raise NotImplementedError


class SerialPrefixScanner(PrefixScanner):
    """Generic scanner: walks the sequence with a scratch copy of the state."""

    def __init__(self, objective: Objective, base_state, seq: np.ndarray):
        self._obj = objective
        self._base = base_state  # treated as read-only; copied per pass
        self.seq = seq

    def eval_positions(self, positions, pool) -> np.ndarray:
        obj = self._obj
        st = obj.copy_state(self._base)
        out = np.empty(len(positions), dtype=np.float64)
        nxt = 0
        for j in range(len(self.seq)):
            if nxt == len(positions):
                break
            a = int(self.seq[j])
            if positions[nxt] == j:
                out[nxt] = obj.state_marginal(st, a)
                nxt += 1
            obj.state_add(st, a)
        return out

    def prefix_marginals(self, cands, prefix_len, pool) -> np.ndarray:
        obj = self._obj
        st = obj.copy_state(self._base)
        for a in self.seq[:prefix_len]:
            obj.state_add(st, int(a))
        return obj.state_marginals(st, cands, pool)

    def rebase(self, state) -> "SerialPrefixScanner":
        return SerialPrefixScanner(self._obj, state, self.seq)


# ---------------------------------------------------------------------------
# Accounting types
# ---------------------------------------------------------------------------

class ObjectiveHandle:
    """Counted access to an objective.

    ``evals_served`` counts every oracle evaluation that actually executed
    through the charged query layer; tests cross-check it against ledgers.
    Test plumbing (brute force, re-evaluation) goes straight to
    ``handle.objective`` and stays invisible to both counters.
    """

    def __init__(self, objective: Objective):
        self.objective = objective
        self.evals_served = 0

    @property
    def n(self) -> int:
        return self.objective.n

    @property
    def description(self) -> str:
        return self.objective.description

    def reset_counter(self) -> None:
        self.evals_served = 0


@dataclass
class QueryLedger:
    """Counts oracle queries and adaptive rounds (synchronized batches)."""

    per_round_queries: list[int] = field(default_factory=list)
    total_queries: int = 0

    @property
    def adaptive_rounds(self) -> int:
        return len(self.per_round_queries)

    def charge_round(self, queries: int) -> None:
        if queries < 0:
            raise ValueError("cannot charge a negative query count")
        self.per_round_queries.append(queries)
        self.total_queries += queries

    def snapshot(self) -> tuple[int, int]:
        return self.total_queries, self.adaptive_rounds

    def delta(self, snap: tuple[int, int]) -> tuple[int, int]:
        q0, r0 = snap
        return self.total_queries - q0, self.adaptive_rounds - r0


class SolutionSet:
    """Ordered solution; insertion order defines the prefixes A_i.

    ``cached_value`` tracks f(elements) exactly through the objective's
    incremental state, so threshold computations never need a fresh query.
    ``failed`` marks a run that hit its round cap and was cut short.
    """

    def __init__(self, elements=(), cached_value: float = 0.0):
        self.elements: list[int] = [int(a) for a in elements]
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("solution contains duplicate elements")
        self.cached_value = float(cached_value)
        self.failed = False
        self.run_bounds: np.ndarray | None = None  # final lazy bounds of the producing run
        self._members = set(self.elements)
        self._state = None  # objective evaluation state, built on demand

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, a: int) -> bool:
        return a in self._members

    def __repr__(self) -> str:
        return f"SolutionSet(|S|={len(self)}, f={self.cached_value:.6g})"

    def prefix(self, i: int) -> "SolutionSet":
        """The first ``i`` elements in insertion order (no cached state)."""
        return SolutionSet(self.elements[:i])

    def members_array(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        if self.elements:
            mask[np.asarray(self.elements, dtype=np.int64)] = True
        return mask

    def ensure_state(self, objective: Objective):
        """Build the incremental state from scratch (uncharged bookkeeping)."""
        if self._state is None:
            st = objective.empty_state()
            value = 0.0
            for a in self.elements:
                value += objective.state_add(st, a)
            self._state = st
            self.cached_value = value
        return self._state

    def grow(self, objective: Objective, a: int, min_gain: float | None = None) -> float:
        """Append ``a``; updates the cached value exactly via the state.

        ``min_gain`` asserts the threshold contract for elements accepted by
        a >= t test; prefix additions only assert monotonicity.
        """
        if a in self._members:
            raise ValueError(f"element {a} already in solution")
        st = self.ensure_state(objective)
        gain = objective.state_add(st, a)
        check = -VALUE_TOL if min_gain is None else min_gain - VALUE_TOL
        assert gain >= check, f"element {a} gained {gain}, below required {check}"
        self.elements.append(a)
        self._members.add(a)
        self.cached_value += gain
        return gain


#: Chunk size for the batched capacity fill below.
_FILL_CHUNK = 4096


def lazy_fill(oracle: "ObjectiveHandle", S: "SolutionSet", k: int,
              ledger: "QueryLedger", upper_bounds: np.ndarray,
              pool: WorkerPool | None = None) -> None:
    """Grow ``S`` toward k elements by greedy selection over cached bounds.

    Used to spend leftover capacity when a thresholded run stalls below k.
    Candidates are swept in descending bound order in chunked batches (one
    adaptive round per chunk); a sweep stops as soon as the best fresh
    marginal provably beats every bound still unevaluated, so tight bounds
    make later additions nearly free.  Elements with no provable gain are
    never added, so the solution may stay below k on a saturated objective.
    The bounds must be valid against the current solution.
    """
    obj = oracle.objective
    pool = pool if pool is not None else SERIAL_POOL
    if len(S) >= k:
        return
    st = S.ensure_state(obj)
    bounds = np.asarray(upper_bounds, dtype=np.float64).copy()
    while len(S) < k:
        in_sol = S.members_array(obj.n)
        cands = np.flatnonzero(~in_sol & (bounds > VALUE_TOL))
        if not cands.size:
            break
        order = cands[np.lexsort((cands, -bounds[cands]))]
        chunk_size = max(64, min(_FILL_CHUNK, (len(order) + 7) // 8))
        best_a = -1
        best_val = -np.inf
        pos = 0
        while pos < len(order):
            if best_val >= float(bounds[order[pos]]) - VALUE_TOL:
                break  # nothing unevaluated can beat the incumbent
            chunk = order[pos:pos + chunk_size]
            vals = serve_marginals(oracle, st, chunk, ledger, pool)
            bounds[chunk] = vals
            top = int(np.argmax(vals))
            if vals[top] > best_val + VALUE_TOL:
                best_a = int(chunk[top])
                best_val = float(vals[top])
            pos += len(chunk)
        if best_a < 0 or best_val <= VALUE_TOL:
            break
        S.grow(obj, best_a)
        bounds[best_a] = 0.0


class LazyBoundCache:
    """Submodularity-sound upper bounds on marginals against a growing solution.

    A bound recorded against any earlier (subset) solution upper-bounds the
    current marginal, so elements whose bound sits below the threshold are
    filtered without spending a query.
    """

    def __init__(self, n: int, init: np.ndarray | None = None):
        if init is not None:
            if len(init) != n:
                raise ValueError("bound seed has wrong length")
            self.upper_bound = np.asarray(init, dtype=np.float64).copy()
            self.solution_version = np.zeros(n, dtype=np.int64)
        else:
            self.upper_bound = np.full(n, np.inf)
            self.solution_version = np.full(n, -1, dtype=np.int64)

    def update(self, elements: np.ndarray, values: np.ndarray, version: int) -> None:
        self.upper_bound[elements] = values
        self.solution_version[elements] = version

    def skippable(self, elements: np.ndarray, threshold: float) -> np.ndarray:
        """Mask of elements that provably fail a >= threshold test."""
        return self.upper_bound[elements] < threshold - VALUE_TOL


# ---------------------------------------------------------------------------
# Charged query operations
# ---------------------------------------------------------------------------

def value(oracle: ObjectiveHandle, S: SolutionSet, ledger: QueryLedger) -> float:
    """Full evaluation of f(S): one query, one round."""
    obj = oracle.objective
    for a in S.elements:
        obj.check_element(a)
    result = float(obj.value(S.elements))
    oracle.evals_served += 1
    ledger.charge_round(1)
    return result


def marginal(oracle: ObjectiveHandle, a: int, S: SolutionSet, ledger: QueryLedger) -> float:
    """f(S ∪ {a}) - f(S).  Members short-circuit to 0 at no query cost."""
    obj = oracle.objective
    obj.check_element(a)
    if a in S:
        return 0.0
    st = S.ensure_state(obj)
    g = float(obj.state_marginal(st, a))
    oracle.evals_served += 1
    ledger.charge_round(1)
    return g


def batch_marginals(oracle: ObjectiveHandle, pairs, ledger: QueryLedger,
                    pool: WorkerPool | None = None) -> list[float]:
    """Evaluate (element, solution) marginals as one synchronized batch.

    All pairs are determined before dispatch; the batch counts as exactly one
    adaptive round (an empty batch is not a round) and charges one query per
    pair that did not short-circuit on membership.
    """
    if not pairs:
        return []
    obj = oracle.objective
    out: list[float] = []
    executed = 0
    states: dict[int, object] = {}
    for a, S in pairs:
        obj.check_element(a)
        if a in S:
            out.append(0.0)
            continue
        key = id(S)
        if key not in states:
            states[key] = S.ensure_state(obj)
        out.append(float(obj.state_marginal(states[key], int(a))))
        executed += 1
    oracle.evals_served += executed
    ledger.charge_round(executed)
    return out


def singleton_values(oracle: ObjectiveHandle, ledger: QueryLedger,
                     pool: WorkerPool | None = None) -> np.ndarray:
    """All n singleton values f({a}) in one round of n queries."""
    obj = oracle.objective
    empty = obj.empty_state()
    cands = np.arange(obj.n, dtype=np.int64)
    vals = obj.state_marginals(empty, cands, pool or SERIAL_POOL)
    oracle.evals_served += obj.n
    ledger.charge_round(obj.n)
    return vals


def top_k_singleton_sum(oracle: ObjectiveHandle, k: int, ledger: QueryLedger,
                        pool: WorkerPool | None = None) -> float:
    """Sum of the k largest singleton values; an upper bound on OPT.

    Uses n queries in a single adaptive round.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if k > oracle.n:
        raise ValueError(f"k={k} exceeds ground set size {oracle.n}")
    vals = singleton_values(oracle, ledger, pool)
    if k == oracle.n:
        return float(vals.sum())
    return float(np.partition(vals, -k)[-k:].sum())


def serve_marginals(oracle: ObjectiveHandle, state, cands: np.ndarray,
                    ledger: QueryLedger, pool: WorkerPool) -> np.ndarray:
    """One round of marginal queries for ``cands`` against a fixed state.

    Internal batch form used by the algorithms; the caller guarantees no
    candidate is a member of the state's set.
    """
    vals = oracle.objective.state_marginals(state, cands, pool)
    oracle.evals_served += len(cands)
    ledger.charge_round(len(cands))
    return vals


def serve_sequence_positions(oracle: ObjectiveHandle, scanner: PrefixScanner,
                             positions: np.ndarray, ledger: QueryLedger,
                             pool: WorkerPool) -> np.ndarray:
    """One round evaluating seq[p] against base ∪ seq[0:p] at each position."""
    vals = scanner.eval_positions(positions, pool)
    oracle.evals_served += len(positions)
    ledger.charge_round(len(positions))
    return vals


def serve_prefix_marginals(oracle: ObjectiveHandle, scanner: PrefixScanner,
                           cands: np.ndarray, prefix_len: int,
                           ledger: QueryLedger, pool: WorkerPool) -> np.ndarray:
    """One round of marginals for ``cands`` against base ∪ seq[0:prefix_len]."""
    vals = scanner.prefix_marginals(cands, prefix_len, pool)
    oracle.evals_served += len(cands)
    ledger.charge_round(len(cands))
    return vals


def batch_set_values(oracle: ObjectiveHandle, element_sets, ledger: QueryLedger) -> np.ndarray:
    """Value queries for several independent sets in one round (one query each)."""
    obj = oracle.objective
    out = np.array([obj.value(s) for s in element_sets], dtype=np.float64)
    oracle.evals_served += len(out)
    ledger.charge_round(len(out))
    return out
