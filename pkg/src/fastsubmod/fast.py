"""Adaptive-sequencing maximization under a cardinality constraint.

Three entry points:

* :func:`fast` — one run of the thresholded adaptive-sequencing subroutine
  for a fixed guess ``v`` of the optimum, with all the practical speedups:
  sequence preprocessing, lazy upper bounds, sampled position search.
* :func:`fast_full` — the complete algorithm: a single optimistic guess (the
  top-k singleton sum) first, then a binary search over a geometric guess
  ladder when needed.
* :func:`adaptive_sequencing_vanilla` — the unoptimized variant that assumes
  the optimum is known, kept as a reference point with its own hard query
  and round bounds.

Natural logarithms are used everywhere a bound or sample size calls for a
logarithm, so reported counts are reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graphs import make_rng
from .oracle import (
    SERIAL_POOL,
    VALUE_TOL,
    LazyBoundCache,
    ObjectiveHandle,
    QueryLedger,
    SolutionSet,
    WorkerPool,
    lazy_fill,
    serve_marginals,
    serve_prefix_marginals,
    serve_sequence_positions,
    singleton_values,
)

APPROX_TARGET = 1.0 - 1.0 / math.e


@dataclass
class FastConfig:
    """Run parameters.

    ``epsilon`` above 0.1 voids the approximation guarantee and is refused
    unless ``unsafe_epsilon`` is set (the sample-size formula still needs
    epsilon < 1/3).  ``inner_round_cap`` defaults to ceil(ln(n)/epsilon) at
    run time; a run that exceeds it declares failure and returns its partial
    solution flagged.  ``k`` is informational (the entry points take the
    cardinality explicitly).
    """

    epsilon: float = 0.025
    delta: float = 0.05
    k: int | None = None
    seed: int = 0
    threads: int = 1
    m_override: int | None = None
    inner_round_cap: int | None = None
    single_guess_first: bool = True
    unsafe_epsilon: bool = False

    def validate(self) -> None:
        if not 0.0 < self.epsilon < 1.0 / 3.0:
            raise ValueError(f"epsilon must lie in (0, 1/3), got {self.epsilon}")
        if self.epsilon > 0.1 and not self.unsafe_epsilon:
            raise ValueError(
                f"epsilon={self.epsilon} is outside the guaranteed range (0, 0.1]; "
                "set unsafe_epsilon=True to run anyway")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.m_override is not None and self.m_override < 1:
            raise ValueError("m_override must be >= 1")
        if self.inner_round_cap is not None and self.inner_round_cap < 1:
            raise ValueError("inner_round_cap must be >= 1")


@dataclass
class RunResult:
    """Outcome of one algorithm run; query/round counts are ledger deltas."""

    algorithm: str
    solution: SolutionSet
    value: float
    queries: int
    rounds: int
    wall_seconds: float
    failed: bool = False
    guess_used: float = float("nan")


@dataclass
class FastTrace:
    """Optional instrumentation for invariant tests."""

    thresholds: list[float] = field(default_factory=list)
    inner_events: list[dict] = field(default_factory=list)


def _ell(k: int, epsilon: float) -> float:
    """Ladder-length scale ln(ln(k)/epsilon); needs k >= 3 to be positive."""
    return math.log(math.log(k) / epsilon)


def geometric(low: float, high: float, ratio_complement: float) -> list[float]:
    """Values low·(1-eps)^{-j}, ending at the first value >= high (inclusive)."""
    eps = ratio_complement
    if low <= 0:
        raise ValueError(f"low must be positive, got {low}")
    if high < low:
        raise ValueError(f"need low <= high, got low={low}, high={high}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"ratio complement must lie in (0, 1), got {eps}")
    ratio = 1.0 / (1.0 - eps)
    vals = [low]
    while vals[-1] < high:
        vals.append(low * ratio ** len(vals))
    return vals


def sample_complexity(epsilon: float, delta: float, n: int | None = None,
                      k: int | None = None, mode: str = "full") -> int:
    """Sample size m for the position search.

    ``full`` mode covers every guess probed by the ladder binary search;
    ``single_guess`` is the smaller size that suffices when only the top-k
    singleton sum is tried.  All logarithms are natural.
    """
    if not 0.0 < epsilon < 1.0 / 3.0:
        raise ValueError(f"epsilon must lie in (0, 1/3), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    base = (2.0 + epsilon) / (epsilon ** 2 * (1.0 - 3.0 * epsilon))
    if mode == "single_guess":
        return math.ceil(base * math.log(2.0 / delta))
    if mode != "full":
        raise ValueError(f"unknown mode {mode!r}")
    if n is None or k is None:
        raise ValueError("full mode needs n and k")
    if k < 3:
        raise ValueError(f"full mode needs k >= 3 so ln(ln(k)) is positive, got k={k}")
    if n < 2:
        raise ValueError(f"full mode needs n >= 2, got n={n}")
    ell = _ell(k, epsilon)
    return math.ceil(base * math.log(4.0 * ell * math.log(n) / (delta * epsilon ** 2)))


def binary_search_max(ladder, predicate):
    """Largest ladder element satisfying a monotone (true-then-false) predicate.

    Returns None when even the first element fails.  Uses at most
    ceil(log2(len)) + 1 predicate evaluations; each evaluation may be
    expensive (one adaptive round, or a full subroutine run).
    """
    lo, hi = -1, len(ladder)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if predicate(ladder[mid]):
            lo = mid
        else:
            hi = mid
    return ladder[lo] if lo >= 0 else None


def position_ladder(kmax: int, epsilon: float) -> np.ndarray:
    """Geometric positions 1, ..., kmax (deduplicated after rounding down)."""
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    reals = geometric(1.0, float(kmax), epsilon)
    ints = {min(int(v), kmax) for v in reals}
    ints.add(kmax)
    return np.array(sorted(ints), dtype=np.int64)


def _fill_to_k(oracle: ObjectiveHandle, S: SolutionSet, k: int, ledger: QueryLedger) -> None:
    """Degenerate-threshold path: every element clears the bar, so fill the
    solution with the lowest-id remaining elements and refresh its value with
    a single query in one round."""
    obj = oracle.objective
    for a in range(obj.n):
        if len(S) == k:
            break
        if a not in S:
            S.grow(obj, a)
    fresh = float(obj.value(S.elements))
    oracle.evals_served += 1
    ledger.charge_round(1)
    assert abs(fresh - S.cached_value) <= 1e-6 + 1e-9 * abs(fresh), \
        "incremental value drifted from a fresh evaluation"
    S.cached_value = fresh


def fast(oracle: ObjectiveHandle, k: int, v: float, cfg: FastConfig,
         ledger: QueryLedger, *, pool: WorkerPool | None = None,
         m: int | None = None, singleton_bounds: np.ndarray | None = None,
         rng: np.random.Generator | None = None,
         trace: FastTrace | None = None) -> SolutionSet:
    """One adaptive-sequencing run against a fixed guess ``v`` of the optimum.

    Per outer iteration the candidate pool resets to the full ground set and
    the threshold t = (1-eps)(v - f(S))/k is fixed.  Each inner iteration:

    1. draw a uniformly random sequence of the surviving elements;
    2. evaluate all sequence-prefix marginals in one round and add every
       element clearing t, in sequence order, stopping at k;
    3. filter survivors against the updated solution in one round;
    4. if the filter removed less than an eps fraction, binary-search
       geometric prefix positions with a uniform sample of survivors and add
       the best prefix wholesale.

    Elements whose cached upper bound sits below t are skipped without
    queries, and a batch in which nothing needs evaluation consumes no round.
    A run exceeding the inner round cap returns its partial solution with
    ``failed`` set.
    """
    cfg.validate()
    obj = oracle.objective
    n = obj.n
    if v <= 0:
        raise ValueError(f"guess v must be positive, got {v}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    eps = cfg.epsilon
    rng = rng if rng is not None else make_rng(cfg.seed)
    own_pool = pool is None
    pool = pool if pool is not None else WorkerPool(cfg.threads)
    if m is None:
        m = cfg.m_override
    if m is None:
        m = (sample_complexity(eps, cfg.delta, n, k) if k >= 3 and n >= 2
             else sample_complexity(eps, cfg.delta, mode="single_guess"))
    cap = cfg.inner_round_cap
    if cap is None:
        cap = max(1, math.ceil(math.log(max(n, 2)) / eps))
    snap = ledger.snapshot()
    bounds = LazyBoundCache(n, init=singleton_bounds)
    S = SolutionSet()
    S.ensure_state(obj)
    try:
        outer = 0
        max_outer = math.ceil(1.0 / eps)
        while len(S) < k and outer < max_outer:
            outer += 1
            t = (1.0 - eps) * (v - S.cached_value) / k
            if trace is not None:
                trace.thresholds.append(t)
            if t <= VALUE_TOL:
                _fill_to_k(oracle, S, k, ledger)
                break
            X = np.arange(n, dtype=np.int64)
            inner = 0
            while X.size and len(S) < k:
                inner += 1
                if inner > cap:
                    S.failed = True
                    S.run_bounds = bounds.upper_bound
                    return S
                seq = rng.permutation(X)
                scanner = None
                in_sol = S.members_array(n)
                size_before = X.size

                # 1-2. sequence draw + thresholded prefix additions
                evaluable = ~in_sol[seq] & ~bounds.skippable(seq, t)
                eval_pos = np.flatnonzero(evaluable)
                if eval_pos.size:
                    scanner = obj.prefix_scanner(S._state, seq)
                    gains = serve_sequence_positions(oracle, scanner, eval_pos, ledger, pool)
                    for p, g in zip(eval_pos, gains):
                        if g >= t - VALUE_TOL and len(S) < k:
                            S.grow(obj, int(seq[p]), min_gain=t)
                    if len(S) == k:
                        if trace is not None:
                            trace.inner_events.append(
                                {"outer": outer, "inner": inner, "x": size_before,
                                 "path": "filled", "istar": None})
                        break
                    in_sol = S.members_array(n)

                # 3. filter survivors against the updated solution
                cand = X[~in_sol[X] & ~bounds.skippable(X, t)]
                if cand.size:
                    fresh = serve_marginals(oracle, S._state, cand, ledger, pool)
                    bounds.update(cand, fresh, version=len(S))
                    X0 = cand[fresh >= t - VALUE_TOL]
                else:
                    X0 = cand
                if X0.size <= (1.0 - eps) * X.size + VALUE_TOL:
                    if trace is not None:
                        trace.inner_events.append(
                            {"outer": outer, "inner": inner, "x": size_before,
                             "x0": X0.size, "path": "filter", "istar": None})
                    X = X0
                    continue

                # 4. sampled binary search for the best prefix position
                r_size = int(min(m, X.size))
                R = rng.choice(X, size=r_size, replace=False)
                if scanner is None:
                    scanner = obj.prefix_scanner(S._state, seq)
                probe_scanner = scanner.rebase(S._state)
                seqpos = np.full(n, _kernels.NO_POS, dtype=np.int64)
                seqpos[seq] = np.arange(len(seq), dtype=np.int64)
                ladder = position_ladder(k - len(S), eps)
                need = (1.0 - 2.0 * eps) * r_size - VALUE_TOL

                def clears_threshold(i: int) -> bool:
                    prefix_len = i - 1
                    mask = (~in_sol[R] & (seqpos[R] >= prefix_len)
                            & ~bounds.skippable(R, t))
                    cands = R[mask]
                    passing = 0
                    if cands.size:
                        vals = serve_prefix_marginals(
                            oracle, probe_scanner, cands, prefix_len, ledger, pool)
                        passing = int(np.count_nonzero(vals >= t - VALUE_TOL))
                    return passing >= need

                istar = binary_search_max(ladder, clears_threshold)
                if istar is not None:
                    for a in seq[:istar]:
                        if len(S) == k:
                            break
                        if int(a) not in S:
                            S.grow(obj, int(a))
                if trace is not None:
                    trace.inner_events.append(
                        {"outer": outer, "inner": inner, "x": size_before,
                         "x0": X0.size, "path": "sample", "istar": istar})
                # X is only reduced by the filter; the next iteration's filter
                # enforces the discard guarantee implied by the choice of istar
        dq, _ = ledger.delta(snap)
        if k >= 3 and n >= 2:
            ell = _ell(k, eps)
            q_bound = 2.0 * ell * n / eps ** 2 + ell ** 2 * math.log(n) * m / eps ** 2
            if dq > q_bound:
                raise AssertionError(
                    f"query bound violated: {dq} queries for one guess, cap {q_bound:.1f}")
        S.run_bounds = bounds.upper_bound
        return S
    finally:
        if own_pool:
            pool.shutdown()


def fast_full(oracle: ObjectiveHandle, k: int, cfg: FastConfig,
              ledger: QueryLedger, *, pool: WorkerPool | None = None,
              trace: FastTrace | None = None) -> RunResult:
    """The complete algorithm: singleton scan, one optimistic guess, then a
    binary search over a geometric guess ladder.

    The first guess is the top-k singleton sum, an upper bound on the
    optimum: a solution reaching the 1-1/e fraction of it certifies the
    approximation outright and skips the ladder.  Two practical touches on
    top of that skeleton, neither of which can lower a solution's value:

    * every probed run that stalls below k spends its leftover capacity with
      a lazy fill against its own bound cache;
    * a certifying first guess brackets the optimum inside [f(S), guess], so
      three extra probes at the bracket's geometric interior points chase the
      value a single coarse threshold schedule leaves behind.

    The returned solution is the most valuable probe; ``guess_used`` records
    the guess of the run that produced it.
    """
    cfg.validate()
    obj = oracle.objective
    n = obj.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    eps = cfg.epsilon
    own_pool = pool is None
    pool = pool if pool is not None else WorkerPool(cfg.threads)
    rng = make_rng(cfg.seed)
    started = time.perf_counter()
    snap = ledger.snapshot()
    try:
        singles = singleton_values(oracle, ledger, pool)
        vmax = float(singles.max())
        if k == n:
            top_k = float(singles.sum())
        else:
            top_k = float(np.partition(singles, -k)[-k:].sum())
        if vmax <= VALUE_TOL:
            # all singletons are worthless, so by submodularity everything is
            S = SolutionSet()
            S.ensure_state(obj)
            dq, dr = ledger.delta(snap)
            return RunResult("fast", S, 0.0, dq, dr,
                             time.perf_counter() - started, False, 0.0)

        probes: list[tuple[float, SolutionSet]] = []

        def run_guess(guess: float, m_run: int) -> SolutionSet:
            sol = fast(oracle, k, guess, cfg, ledger, pool=pool, m=m_run,
                       singleton_bounds=singles, rng=rng, trace=trace)
            if len(sol) < k and not sol.failed:
                bounds = sol.run_bounds if sol.run_bounds is not None else singles
                lazy_fill(oracle, sol, k, ledger, bounds, pool)
            probes.append((guess, sol))
            return sol

        certified = False
        if cfg.single_guess_first:
            m_single = cfg.m_override or sample_complexity(eps, cfg.delta, mode="single_guess")
            sol = run_guess(top_k, m_single)
            if sol.cached_value >= APPROX_TARGET * top_k - VALUE_TOL:
                certified = True
                # the optimum is bracketed by [f(S), top_k]; probe the
                # bracket's geometric interior for better threshold schedules
                f1 = sol.cached_value
                if f1 < top_k * (1.0 - VALUE_TOL):
                    for j in (1, 2, 3):
                        run_guess(f1 * (top_k / f1) ** (j / 4.0), m_single)

        if not certified:
            if k >= 3 and n >= 2:
                m_full = cfg.m_override or sample_complexity(eps, cfg.delta, n, k)
            else:
                m_full = cfg.m_override or sample_complexity(eps, cfg.delta, mode="single_guess")
            ladder = geometric(vmax, top_k, eps)

            def certifies(guess: float) -> bool:
                sol_g = run_guess(guess, m_full)
                return sol_g.cached_value >= APPROX_TARGET * guess - VALUE_TOL

            binary_search_max(ladder, certifies)

        # return the most valuable probed solution; it dominates the literal
        # "solution of the largest certifying guess" choice
        guess, S = max(probes, key=lambda p: p[1].cached_value)
        dq, dr = ledger.delta(snap)
        if k >= 3 and n >= 2:
            ell = _ell(k, eps)
            r_bound = math.log(n) * ell ** 2 / eps ** 2
            if dr > r_bound:
                raise AssertionError(
                    f"round bound violated: {dr} adaptive rounds, cap {r_bound:.1f}")
        return RunResult("fast", S, S.cached_value, dq, dr,
                         time.perf_counter() - started, S.failed, guess)
    finally:
        if own_pool:
            pool.shutdown()


def adaptive_sequencing_vanilla(oracle: ObjectiveHandle, k: int, epsilon: float,
                                opt_value: float, ledger: QueryLedger, *,
                                seed: int = 0, pool: WorkerPool | None = None) -> SolutionSet:
    """Reference adaptive sequencing with the optimum supplied externally.

    Per inner iteration it draws k i.i.d. elements of the survivor pool,
    evaluates every survivor against every sequence prefix (one round of
    k·|X| queries minus membership short-circuits), takes the smallest
    position at which at most a (1-eps) fraction of survivors still clears
    the threshold, adds the elements before it, and keeps only the clearing
    survivors.  Hard caps: eps^-2·n·k queries and eps^-2·ln(n) rounds.
    """
    obj = oracle.objective
    n = obj.n
    if opt_value <= 0:
        raise ValueError(f"opt_value must be positive, got {opt_value}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = make_rng(seed)
    pool = pool if pool is not None else SERIAL_POOL
    snap = ledger.snapshot()
    S = SolutionSet()
    S.ensure_state(obj)
    stall_cap = max(1, math.ceil(math.log(max(n, 2)) / epsilon))
    outer = 0
    while len(S) < k and outer < 1.0 / epsilon:
        outer += 1
        t = (1.0 - epsilon) * (opt_value - S.cached_value) / k
        if t <= VALUE_TOL:
            _fill_to_k(oracle, S, k, ledger)
            break
        X = np.arange(n, dtype=np.int64)
        inner = 0
        while X.size and len(S) < k:
            inner += 1
            if inner > stall_cap:
                break  # pathological stall (no position ever discards); resample t
            seq = rng.choice(X, size=k, replace=True)
            first_occ = np.full(n, _kernels.NO_POS, dtype=np.int64)
            np.minimum.at(first_occ, seq, np.arange(k, dtype=np.int64))
            in_sol = S.members_array(n)
            scanner = obj.prefix_scanner(S._state, seq)
            surviving: list[np.ndarray] = []
            executed = 0
            for i in range(1, k + 1):
                prefix_len = i - 1
                cands = X[~in_sol[X] & (first_occ[X] >= prefix_len)]
                if cands.size:
                    vals = scanner.prefix_marginals(cands, prefix_len, pool)
                    executed += int(cands.size)
                    surviving.append(cands[vals >= t - VALUE_TOL])
                else:
                    surviving.append(cands)
            oracle.evals_served += executed
            ledger.charge_round(executed)
            limit = (1.0 - epsilon) * X.size + VALUE_TOL
            istar = None
            for i in range(1, k + 1):
                if surviving[i - 1].size <= limit:
                    istar = i
                    break
            if istar is not None:
                for a in seq[:istar - 1]:
                    if len(S) == k:
                        break
                    if int(a) not in S:
                        S.grow(obj, int(a))
                X = surviving[istar - 1]
            else:
                # even the full sequence discards too little; add it all
                for a in seq:
                    if len(S) == k:
                        break
                    if int(a) not in S:
                        S.grow(obj, int(a))
    dq, dr = ledger.delta(snap)
    if dq > n * k / epsilon ** 2:
        raise AssertionError(
            f"query bound violated: {dq} > eps^-2·n·k = {n * k / epsilon ** 2:.1f}")
    if n >= 2 and dr > math.log(n) / epsilon ** 2:
        raise AssertionError(
            f"round bound violated: {dr} > eps^-2·ln(n) = {math.log(n) / epsilon ** 2:.1f}")
    return S
