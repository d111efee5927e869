"""Benchmark harness: experiment specs, presets, timed sweeps, CSV/JSON output.

Cells (algorithm × k × seed) run sequentially for timing integrity; only the
algorithm under test parallelizes internally.  Wall time is measured with a
monotonic clock between worker barriers and excludes objective construction
and data loading.  One warm-up run per cell is discarded by default to damp
allocator and JIT noise at desk scale.

CLI::

    bench run --preset ws-small --out results.csv --format csv --threads 4 --seeds 0,1,2
    bench run --spec my_experiment.txt --out results.json --format json

Spec files are flat ``key = value`` text; see :func:`parse_spec_file`.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, fields, replace

from .baselines import (
    BRUTE_FORCE_LIMIT,
    LtlgConfig,
    brute_force_opt,
    lazy_greedy,
    parallel_ltlg,
    random_baseline,
)
from .fast import FastConfig, adaptive_sequencing_vanilla, fast_full
from .graphs import gen_ba, gen_er, gen_sbm, gen_ws, load_edge_list, make_rng
from .objectives import (
    InfluenceObjective,
    MaxCoverObjective,
    MovieRecommendationObjective,
    RevenueObjective,
    WeightedDirectedCoverObjective,
    draw_uniform_weights,
    load_ratings,
)
from .oracle import ObjectiveHandle, QueryLedger, WorkerPool

CSV_COLUMNS = ("experiment", "algorithm", "n", "k", "seed", "threads",
               "value", "queries", "rounds", "wall_seconds", "failed")

KNOWN_ALGORITHMS = ("fast", "lazy_greedy", "parallel_ltlg", "random", "adaptive_seq")
KNOWN_OBJECTIVES = ("max_cover", "weighted_cover", "movie", "revenue", "influence")
KNOWN_GENERATORS = ("er", "sbm", "ws", "ba", "file")


class ConfigError(ValueError):
    """Bad experiment configuration; reported before any cell runs."""


@dataclass
class ExperimentSpec:
    """Fully parameterized experiment: objective + instance + algorithm grid."""

    name: str
    objective: str = "max_cover"
    generator: str = "er"
    n: int = 500
    er_p: float = 0.01
    sbm_clusters: int = 10
    sbm_size_low: int = 10
    sbm_size_high: int = 100
    sbm_p: float = 0.1
    ws_neighbors: int = 2
    ws_rewire: float = 0.1
    ba_m: int = 1
    revenue_alpha: float = 0.9
    influence_p: float = 0.01
    data_path: str | None = None
    genres_path: str | None = None
    draw_weights: bool = False
    algorithms: tuple[str, ...] = ("fast", "lazy_greedy", "parallel_ltlg", "random")
    k_values: tuple[int, ...] = (25, 50, 100)
    seeds: tuple[int, ...] = (0,)
    threads: int = 1
    epsilon_fast: float = 0.025
    epsilon_ltlg: float = 0.1
    epsilon_seq: float = 0.1
    delta: float = 0.05
    random_trials: int = 20
    warmup: bool = True

    def validate(self) -> None:
        for alg in self.algorithms:
            if alg not in KNOWN_ALGORITHMS:
                raise ConfigError(f"unknown algorithm {alg!r}; known: {KNOWN_ALGORITHMS}")
        if self.objective not in KNOWN_OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}; known: {KNOWN_OBJECTIVES}")
        if self.generator not in KNOWN_GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; known: {KNOWN_GENERATORS}")
        if self.generator == "file" and not self.data_path:
            raise ConfigError("generator 'file' needs data_path")
        if self.objective == "movie" and not (self.data_path and self.genres_path):
            raise ConfigError("movie objective needs data_path and genres_path")
        if not self.k_values:
            raise ConfigError("need at least one k")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


@dataclass
class ResultRow:
    """One benchmark cell in the output schema."""

    experiment: str
    algorithm: str
    n: int
    k: int
    seed: int
    threads: int
    value: float
    queries: int
    rounds: int
    wall_seconds: float
    failed: bool

    def to_record(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


def build_instance(spec: ExperimentSpec, seed: int):
    """Construct the objective for one seed (excluded from timed sections)."""
    if spec.objective == "movie":
        ratings = load_ratings(spec.data_path, spec.genres_path)
        return MovieRecommendationObjective(ratings)
    if spec.generator == "er":
        graph = gen_er(spec.n, spec.er_p, seed=(seed, 0))
    elif spec.generator == "sbm":
        sizes_rng = make_rng((seed, 1))
        sizes = sizes_rng.integers(spec.sbm_size_low, spec.sbm_size_high + 1,
                                   size=spec.sbm_clusters)
        graph = gen_sbm(sizes.tolist(), spec.sbm_p, seed=(seed, 0))
    elif spec.generator == "ws":
        graph = gen_ws(spec.n, spec.ws_neighbors, spec.ws_rewire, seed=(seed, 0))
    elif spec.generator == "ba":
        graph = gen_ba(spec.n, spec.ba_m, seed=(seed, 0))
    else:  # file
        directed = spec.objective == "weighted_cover"
        graph = load_edge_list(spec.data_path, directed=directed)
    if spec.objective == "max_cover":
        return MaxCoverObjective(graph)
    if spec.objective == "weighted_cover":
        return WeightedDirectedCoverObjective(graph)
    if spec.objective == "revenue":
        if graph.weights is None or spec.draw_weights:
            graph = draw_uniform_weights(graph, 1.0, 2.0, seed=(seed, 2))
        return RevenueObjective(graph, spec.revenue_alpha)
    if spec.objective == "influence":
        return InfluenceObjective(graph, spec.influence_p)
    raise ConfigError(f"unknown objective {spec.objective!r}")


def _execute(spec: ExperimentSpec, handle: ObjectiveHandle, algorithm: str,
             k: int, seed: int, pool: WorkerPool) -> tuple[float, int, int, bool]:
    ledger = QueryLedger()
    if algorithm == "fast":
        cfg = FastConfig(epsilon=spec.epsilon_fast, delta=spec.delta,
                         seed=seed, threads=spec.threads)
        rr = fast_full(handle, k, cfg, ledger, pool=pool)
        return rr.value, rr.queries, rr.rounds, rr.failed
    if algorithm == "lazy_greedy":
        rr = lazy_greedy(handle, k, ledger, pool=pool)
        return rr.value, rr.queries, rr.rounds, rr.failed
    if algorithm == "parallel_ltlg":
        cfg = LtlgConfig(epsilon=spec.epsilon_ltlg, seed=seed, workers=spec.threads)
        rr = parallel_ltlg(handle, k, cfg, ledger, pool=pool)
        return rr.value, rr.queries, rr.rounds, rr.failed
    if algorithm == "random":
        val = random_baseline(handle, k, spec.random_trials, seed, ledger)
        return val, ledger.total_queries, ledger.adaptive_rounds, False
    if algorithm == "adaptive_seq":
        if math.comb(handle.n, k) > BRUTE_FORCE_LIMIT:
            raise ConfigError(
                "adaptive_seq needs the exact optimum; instance too large to brute-force")
        _, opt = brute_force_opt(handle, k)
        sol = adaptive_sequencing_vanilla(handle, k, spec.epsilon_seq, opt,
                                          ledger, seed=seed, pool=pool)
        return sol.cached_value, ledger.total_queries, ledger.adaptive_rounds, sol.failed
    raise ConfigError(f"unknown algorithm {algorithm!r}")


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Run every (seed, k, algorithm) cell; one row per cell.

    Wall time covers only the algorithm, between two pool barriers; the
    optional warm-up run per cell is discarded.
    """
    spec.validate()
    rows: list[ResultRow] = []
    for seed in spec.seeds:
        obj = build_instance(spec, seed)
        for k in spec.k_values:
            if not 1 <= k <= obj.n:
                raise ConfigError(f"k={k} out of range for instance with n={obj.n}")
        for k in spec.k_values:
            for algorithm in spec.algorithms:
                handle = ObjectiveHandle(obj)
                with WorkerPool(spec.threads) as pool:
                    if spec.warmup:
                        _execute(spec, handle, algorithm, k, seed, pool)
                    pool.barrier()
                    t0 = time.perf_counter()
                    value, queries, rounds, failed = _execute(
                        spec, handle, algorithm, k, seed, pool)
                    pool.barrier()
                    wall = time.perf_counter() - t0
                rows.append(ResultRow(spec.name, algorithm, obj.n, k, seed,
                                      spec.threads, value, queries, rounds,
                                      wall, failed))
    return rows


# ---------------------------------------------------------------------------
# Result serialization
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest exact round-trip form
    return str(value)


def emit_results(rows: list[ResultRow], fmt: str, path) -> None:
    """Write rows as CSV (schema header + one line per row) or a JSON array."""
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    text = render_results(rows, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def render_results(rows: list[ResultRow], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.to_record() for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_format_cell(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def parse_results(path) -> list[ResultRow]:
    """Read back rows emitted by :func:`emit_results` (either format)."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        records = json.loads(text)
    else:
        records = list(csv.DictReader(io.StringIO(text)))
    rows = []
    for rec in records:
        rows.append(ResultRow(
            experiment=str(rec["experiment"]),
            algorithm=str(rec["algorithm"]),
            n=int(rec["n"]),
            k=int(rec["k"]),
            seed=int(rec["seed"]),
            threads=int(rec["threads"]),
            value=float(rec["value"]),
            queries=int(rec["queries"]),
            rounds=int(rec["rounds"]),
            wall_seconds=float(rec["wall_seconds"]),
            failed=(rec["failed"] in (True, "true", "True")),
        ))
    return rows


# ---------------------------------------------------------------------------
# Presets and spec files
# ---------------------------------------------------------------------------

_SMALL = dict(k_values=(25, 50, 100), seeds=(0,))
_LARGE = dict(k_values=(100, 1000), seeds=(0,),
              algorithms=("fast", "parallel_ltlg", "random"))

_PRESETS: dict[str, dict] = {
    "er-small": dict(objective="max_cover", generator="er", n=500, er_p=0.01, **_SMALL),
    "sbm-small": dict(objective="max_cover", generator="sbm", sbm_clusters=10,
                      sbm_size_low=10, sbm_size_high=100, sbm_p=0.1, **_SMALL),
    "ws-small": dict(objective="max_cover", generator="ws", n=500,
                     ws_neighbors=2, ws_rewire=0.1, **_SMALL),
    "ba-small": dict(objective="max_cover", generator="ba", n=500, ba_m=1, **_SMALL),
    "er-large": dict(objective="max_cover", generator="er", n=100_000, er_p=0.01, **_LARGE),
    "ws-large": dict(objective="max_cover", generator="ws", n=100_000,
                     ws_neighbors=2, ws_rewire=0.1, **_LARGE),
    "ba-large": dict(objective="max_cover", generator="ba", n=100_000, ba_m=1, **_LARGE),
    "sbm-large": dict(objective="max_cover", generator="sbm", sbm_clusters=50,
                      sbm_size_low=100, sbm_size_high=5000, sbm_p=0.1, **_LARGE),
    "traffic-small": dict(objective="weighted_cover", generator="file", **_SMALL),
    "movies-small": dict(objective="movie", generator="file", **_SMALL),
    "youtube-small": dict(objective="revenue", generator="file",
                          revenue_alpha=0.9, draw_weights=True, **_SMALL),
    "influence-small": dict(objective="influence", generator="file",
                            influence_p=0.01, **_SMALL),
}


def preset(name: str, data_path=None, genres_path=None) -> ExperimentSpec:
    """A fully parameterized spec for a named benchmark configuration."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(_PRESETS)}")
    spec = ExperimentSpec(name=name, **_PRESETS[name])
    if data_path is not None:
        spec = replace(spec, data_path=str(data_path))
    if genres_path is not None:
        spec = replace(spec, genres_path=str(genres_path))
    return spec


def preset_names() -> list[str]:
    return sorted(_PRESETS)


_LIST_FIELDS = {"algorithms": str, "k_values": int, "seeds": int}
_ALIASES = {"k": "k_values", "seed": "seeds", "algorithm": "algorithms"}


def parse_spec_file(path) -> ExperimentSpec:
    """Parse a flat ``key = value`` spec file.

    Keys are ExperimentSpec field names (k, seed, algorithm accepted as
    aliases for the list fields); lists are comma-separated; `#` comments.
    """
    known = {f.name for f in fields(ExperimentSpec)}
    values: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = text.partition("=")
            key = key.strip().lower()
            raw = raw.strip()
            key = _ALIASES.get(key, key)
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _parse_value(key, raw)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if "name" not in values:
        raise ConfigError(f"{path}: spec must set a name")
    return ExperimentSpec(**values)


def _parse_value(key: str, raw: str):
    if key in _LIST_FIELDS:
        cast = _LIST_FIELDS[key]
        return tuple(cast(x.strip()) for x in raw.split(",") if x.strip())
    sample = getattr(ExperimentSpec(name="x"), key)
    if isinstance(sample, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if isinstance(sample, int):
        return int(raw)
    if isinstance(sample, float):
        return float(raw)
    return raw


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(x.strip()) for x in raw.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench", description="Submodular maximization benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help=f"one of: {', '.join(preset_names())}")
    src.add_argument("--spec", help="path to a key=value spec file")
    run.add_argument("--out", default=None, help="output path (default: stdout)")
    run.add_argument("--format", default="csv", choices=("csv", "json"))
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--seeds", type=_parse_int_list, default=None,
                     help="comma-separated seed list")
    run.add_argument("--k", type=_parse_int_list, default=None,
                     help="comma-separated k list")
    run.add_argument("--algorithms", default=None,
                     help="comma-separated algorithm list")
    run.add_argument("--data", default=None, help="input data file for file presets")
    run.add_argument("--genres", default=None, help="genre map file (movie objective)")
    run.add_argument("--no-warmup", action="store_true",
                     help="skip the discarded warm-up run per cell")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.preset:
            spec = preset(args.preset, data_path=args.data, genres_path=args.genres)
        else:
            spec = parse_spec_file(args.spec)
            if args.data:
                spec = replace(spec, data_path=args.data)
            if args.genres:
                spec = replace(spec, genres_path=args.genres)
        if args.threads is not None:
            spec = replace(spec, threads=args.threads)
        if args.seeds is not None:
            spec = replace(spec, seeds=args.seeds)
        if args.k is not None:
            spec = replace(spec, k_values=args.k)
        if args.algorithms is not None:
            spec = replace(spec, algorithms=tuple(
                a.strip() for a in args.algorithms.split(",") if a.strip()))
        if args.no_warmup:
            spec = replace(spec, warmup=False)
        rows = run_experiment(spec)
        emit_results(rows, args.format, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


def cli_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_main()
