"""Baseline maximizers: lazy greedy, stochastic greedy with lazy updates,
random sets, and an exhaustive optimum for small test instances.

Serial greedy charges one adaptive round per query.  The stochastic variant
evaluates its per-step sample concurrently and counts a round where the lazy
test succeeded as a single-query round.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .fast import RunResult
from .graphs import make_rng
from .oracle import (
    SERIAL_POOL,
    VALUE_TOL,
    ObjectiveHandle,
    QueryLedger,
    SolutionSet,
    WorkerPool,
    batch_set_values,
    marginal,
)

#: Refuse exhaustive search beyond this many subsets.
BRUTE_FORCE_LIMIT = 10 ** 7


def lazy_greedy(oracle: ObjectiveHandle, k: int, ledger: QueryLedger, *,
                pool: WorkerPool | None = None) -> RunResult:
    """Exact greedy via a max-heap of stale marginal bounds.

    Pops the stalest-best element and re-evaluates it until its fresh
    marginal tops the next stale bound; submodularity makes the stale values
    sound upper bounds.  Ties re-evaluate in id order so the solution matches
    plain greedy under the lowest-id tie-break exactly.
    """
    obj = oracle.objective
    n = obj.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    started = time.perf_counter()
    snap = ledger.snapshot()
    S = SolutionSet()
    S.ensure_state(obj)
    heap: list[tuple[float, int]] = []
    evaluated_at = np.full(n, -1, dtype=np.int64)
    stale: dict[int, float] = {}
    for a in range(n):
        g = marginal(oracle, a, S, ledger)
        heap.append((-g, a))
        evaluated_at[a] = 0
        stale[a] = g
    heapq.heapify(heap)
    for step in range(k):
        while True:
            neg, a = heapq.heappop(heap)
            if evaluated_at[a] == step:
                fresh = -neg  # already exact for this step, no query needed
            else:
                fresh = marginal(oracle, a, S, ledger)
                evaluated_at[a] = step
            if not heap:
                break
            top_stale = -heap[0][0]
            if fresh > top_stale + VALUE_TOL:
                break
            if fresh >= top_stale - VALUE_TOL and a < heap[0][1]:
                break  # tie resolved in id order, matching plain greedy
            heapq.heappush(heap, (-fresh, a))
        S.grow(obj, a)
        # next step: all stored gains are stale again
    dq, dr = ledger.delta(snap)
    return RunResult("lazy_greedy", S, S.cached_value, dq, dr,
                     time.perf_counter() - started)


def reference_greedy(oracle: ObjectiveHandle, k: int, ledger: QueryLedger) -> RunResult:
    """Plain greedy: re-evaluates every remaining marginal at every step.

    The un-lazy yardstick for correctness and query-count comparisons;
    lowest element id wins ties.
    """
    obj = oracle.objective
    n = obj.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    started = time.perf_counter()
    snap = ledger.snapshot()
    S = SolutionSet()
    S.ensure_state(obj)
    for _ in range(k):
        best_a, best_g = -1, -np.inf
        for a in range(n):
            if a in S:
                continue
            g = marginal(oracle, a, S, ledger)
            if g > best_g + VALUE_TOL:
                best_a, best_g = a, g
        S.grow(obj, best_a)
    dq, dr = ledger.delta(snap)
    return RunResult("reference_greedy", S, S.cached_value, dq, dr,
                     time.perf_counter() - started)


@dataclass
class LtlgConfig:
    """Stochastic-greedy parameters; the sample size defaults to
    ceil((n/k)·ln(1/epsilon)), capped at the remaining pool size."""

    epsilon: float = 0.1
    sample_size: int | None = None
    seed: int = 0
    workers: int = 1

    def resolve_sample_size(self, n: int, k: int) -> int:
        if self.sample_size is not None:
            if self.sample_size < 1:
                raise ValueError("sample_size must be >= 1")
            return self.sample_size
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        return max(1, math.ceil((n / k) * math.log(1.0 / self.epsilon)))


def parallel_ltlg(oracle: ObjectiveHandle, k: int, cfg: LtlgConfig,
                  ledger: QueryLedger, *, pool: WorkerPool | None = None) -> RunResult:
    """Stochastic greedy with lazy updates.

    Per step: draw s uniform samples of the remaining elements, then test
    whether the sample's stale-best element's fresh marginal still beats the
    second-highest stale value among the samples.  On success the step costs
    one counted query; on failure all s sample marginals are evaluated
    concurrently (a single round of s queries) and the argmax is added.
    """
    obj = oracle.objective
    n = obj.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    s = cfg.resolve_sample_size(n, k)
    started = time.perf_counter()
    snap = ledger.snapshot()
    rng = make_rng(cfg.seed)
    pool = pool if pool is not None else SERIAL_POOL
    S = SolutionSet()
    st = S.ensure_state(obj)
    stale = np.full(n, np.inf)
    remaining = np.arange(n, dtype=np.int64)
    for _ in range(k):
        remaining = remaining[~S.members_array(n)[remaining]]
        take = min(s, len(remaining))
        R = np.sort(rng.choice(remaining, size=take, replace=False))
        best_pos = int(np.argmax(stale[R]))  # ties resolve to the lowest id
        best = int(R[best_pos])
        fresh_best = float(obj.state_marginal(st, best))
        others = np.delete(R, best_pos)
        second = float(stale[others].max()) if others.size else -np.inf
        # a tie with the runner-up bound is accepted only when no tied element
        # has a smaller id; otherwise fall through and evaluate the sample, so
        # the selection matches plain greedy's lowest-id tie-break exactly
        tied = others[stale[others] >= second - VALUE_TOL] if others.size else others
        lazy_ok = fresh_best > second + VALUE_TOL or (
            fresh_best >= second - VALUE_TOL
            and (tied.size == 0 or best < int(tied.min())))
        if lazy_ok:
            oracle.evals_served += 1
            ledger.charge_round(1)
            stale[best] = fresh_best
            S.grow(obj, best)
            continue
        vals = np.empty(take)
        vals[best_pos] = fresh_best
        if others.size:
            other_vals = obj.state_marginals(st, others, pool)
            vals[np.arange(take) != best_pos] = other_vals
        oracle.evals_served += take
        ledger.charge_round(take)
        stale[R] = vals
        S.grow(obj, int(R[int(np.argmax(vals))]))
    dq, dr = ledger.delta(snap)
    return RunResult("parallel_ltlg", S, S.cached_value, dq, dr,
                     time.perf_counter() - started)


def random_baseline(oracle: ObjectiveHandle, k: int, trials: int, seed,
                    ledger: QueryLedger) -> float:
    """Mean value of `trials` uniform k-subsets; one value query per subset,
    all independent, so the whole estimate is a single adaptive round."""
    n = oracle.n
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = make_rng(seed)
    subsets = [np.sort(rng.choice(n, size=k, replace=False)).tolist() for _ in range(trials)]
    vals = batch_set_values(oracle, subsets, ledger)
    return float(vals.mean())


def brute_force_opt(oracle, k: int) -> tuple[SolutionSet, float]:
    """Exact optimum by subset enumeration (test oracle, never charged).

    Guarded to C(n, k) <= 10^7 subsets; the lexicographically smallest
    maximizer wins ties.
    """
    obj = oracle.objective if isinstance(oracle, ObjectiveHandle) else oracle
    n = obj.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if math.comb(n, k) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"C({n}, {k}) = {math.comb(n, k)} subsets exceeds the brute-force guard")
    best_val = -np.inf
    best: tuple[int, ...] | None = None
    for combo in itertools.combinations(range(n), k):
        val = obj.value(combo)
        if val > best_val:
            best_val = val
            best = combo
    sol = SolutionSet(best, float(best_val))
    return sol, float(best_val)
