"""Harness: sweeps, serialization round-trips, presets, spec files, CLI."""

import json
import math
import subprocess
import sys

import pytest

from fastsubmod import ExperimentSpec, emit_results, parse_results, preset, run_experiment
from fastsubmod.bench import (
    ConfigError,
    ResultRow,
    build_instance,
    main,
    parse_spec_file,
    preset_names,
    render_results,
)


def tiny_spec(**overrides):
    base = dict(
        name="tiny",
        objective="max_cover",
        generator="er",
        n=30,
        er_p=0.2,
        algorithms=("fast", "lazy_greedy", "parallel_ltlg", "random"),
        k_values=(3,),
        seeds=(0,),
        warmup=False,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestRunExperiment:
    def test_single_cell_single_row(self):
        rows = run_experiment(tiny_spec(algorithms=("lazy_greedy",)))
        assert len(rows) == 1
        row = rows[0]
        assert row.algorithm == "lazy_greedy"
        assert row.n == 30 and row.k == 3 and row.seed == 0
        assert row.wall_seconds >= 0

    def test_row_count_is_grid_size(self):
        rows = run_experiment(tiny_spec(k_values=(2, 3), seeds=(0, 1)))
        assert len(rows) == 4 * 2 * 2

    def test_rerun_reproduces_counts_exactly(self):
        spec = tiny_spec(seeds=(0, 1))
        a = run_experiment(spec)
        b = run_experiment(spec)
        key = lambda r: (r.algorithm, r.k, r.seed, r.value, r.queries, r.rounds)
        assert sorted(map(key, a)) == sorted(map(key, b))

    def test_thread_count_changes_nothing_but_wall_time(self):
        rows1 = run_experiment(tiny_spec(threads=1))
        rows8 = run_experiment(tiny_spec(threads=8))
        for r1, r8 in zip(rows1, rows8):
            assert (r1.value, r1.queries, r1.rounds) == (r8.value, r8.queries, r8.rounds)

    def test_unknown_algorithm_fails_before_running(self):
        with pytest.raises(ConfigError, match="unknown algorithm"):
            run_experiment(tiny_spec(algorithms=("fast", "nope")))

    def test_k_beyond_n_rejected(self):
        with pytest.raises(ConfigError, match="out of range"):
            run_experiment(tiny_spec(k_values=(31,)))

    def test_adaptive_seq_wired_through(self):
        rows = run_experiment(tiny_spec(algorithms=("adaptive_seq",)))
        assert rows[0].queries <= 30 * 3 / 0.1 ** 2

    def test_warmup_run_is_discarded(self):
        rows = run_experiment(tiny_spec(algorithms=("random",), warmup=True))
        assert len(rows) == 1
        assert rows[0].queries == 20  # only the measured run is reported


class TestSerialization:
    def rows(self):
        return [
            ResultRow("exp", "fast", 30, 3, 0, 1, 1.0 / 3.0, 123, 7, 0.0512345, False),
            ResultRow("exp", "random", 30, 3, 1, 1, 17.25, 20, 1, 1e-7, True),
        ]

    def test_single_row_csv_is_two_lines(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_results(self.rows()[:1], "csv", path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 2
        assert lines[0] == ("experiment,algorithm,n,k,seed,threads,"
                            "value,queries,rounds,wall_seconds,failed")

    def test_csv_round_trip_is_lossless(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_results(self.rows(), "csv", path)
        back = parse_results(path)
        assert back == self.rows()

    def test_json_round_trip_and_parity_with_csv(self, tmp_path):
        rows = self.rows()
        jpath = tmp_path / "r.json"
        emit_results(rows, "json", jpath)
        assert parse_results(jpath) == rows
        records = json.loads(jpath.read_text())
        assert list(records[0].keys()) == list(rows[0].to_record().keys())

    def test_floats_carry_nine_significant_digits(self):
        text = render_results(self.rows()[:1], "csv")
        value_field = text.strip().split("\n")[1].split(",")[6]
        digits = [c for c in value_field if c.isdigit()]
        assert len(digits) >= 9
        assert float(value_field) == 1.0 / 3.0

    def test_empty_rows_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_results([], "csv", tmp_path / "r.csv")

    def test_real_rows_round_trip(self, tmp_path):
        rows = run_experiment(tiny_spec(algorithms=("random", "lazy_greedy")))
        for fmt, name in (("csv", "a.csv"), ("json", "a.json")):
            path = tmp_path / name
            emit_results(rows, fmt, path)
            assert parse_results(path) == rows


class TestPresets:
    def test_ws_small_matches_reported_setup(self):
        spec = preset("ws-small")
        assert spec.n == 500
        assert spec.ws_neighbors == 2
        assert spec.epsilon_fast == 0.025
        assert spec.epsilon_ltlg == 0.1
        assert spec.delta == 0.05

    def test_er_small_edge_probability(self):
        assert preset("er-small").er_p == 0.01

    def test_ba_small_attachment(self):
        assert preset("ba-small").ba_m == 1

    def test_er_large_scale(self):
        spec = preset("er-large")
        assert spec.n == 100_000

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset("no-such-preset")

    def test_file_preset_requires_data(self):
        spec = preset("traffic-small")
        with pytest.raises(ConfigError, match="data_path"):
            run_experiment(spec)

    def test_all_presets_materialize(self):
        for name in preset_names():
            assert preset(name).name == name

    def test_instances_are_deterministic(self):
        spec = preset("ws-small")
        a = build_instance(spec, seed=3)
        b = build_instance(spec, seed=3)
        assert a.value(list(range(0, 500, 7))) == b.value(list(range(0, 500, 7)))


class TestSpecFiles:
    def test_parse_round_trip(self, tmp_path):
        p = tmp_path / "exp.txt"
        p.write_text(
            "# comment line\n"
            "name = my-exp\n"
            "objective = max_cover\n"
            "generator = ws\n"
            "n = 120\n"
            "ws_neighbors = 4\n"
            "algorithms = fast, random\n"
            "k = 5, 10\n"
            "seeds = 0, 1, 2\n"
            "epsilon_fast = 0.05\n"
            "warmup = no\n"
        )
        spec = parse_spec_file(p)
        assert spec.name == "my-exp"
        assert spec.n == 120
        assert spec.algorithms == ("fast", "random")
        assert spec.k_values == (5, 10)
        assert spec.seeds == (0, 1, 2)
        assert spec.epsilon_fast == 0.05
        assert spec.warmup is False

    def test_unknown_key_reports_line(self, tmp_path):
        p = tmp_path / "exp.txt"
        p.write_text("name = x\nwat = 7\n")
        with pytest.raises(ConfigError, match=":2"):
            parse_spec_file(p)

    def test_name_required(self, tmp_path):
        p = tmp_path / "exp.txt"
        p.write_text("n = 10\n")
        with pytest.raises(ConfigError, match="name"):
            parse_spec_file(p)


class TestCli:
    def spec_file(self, tmp_path):
        p = tmp_path / "exp.txt"
        p.write_text(
            "name = cli-test\nobjective = max_cover\ngenerator = er\n"
            "n = 25\ner_p = 0.2\nalgorithms = random\nk = 3\nseeds = 0\nwarmup = 0\n")
        return p

    def test_run_spec_to_csv(self, tmp_path):
        out = tmp_path / "res.csv"
        code = main(["run", "--spec", str(self.spec_file(tmp_path)),
                     "--out", str(out), "--format", "csv"])
        assert code == 0
        rows = parse_results(out)
        assert len(rows) == 1
        assert rows[0].experiment == "cli-test"

    def test_override_flags(self, tmp_path):
        out = tmp_path / "res.json"
        code = main(["run", "--spec", str(self.spec_file(tmp_path)),
                     "--out", str(out), "--format", "json",
                     "--seeds", "0,1", "--k", "2,3"])
        assert code == 0
        assert len(parse_results(out)) == 4

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("name = x\nalgorithms = nope\nk = 2\nseeds = 0\nn = 10\n")
        assert main(["run", "--spec", str(bad), "--out", str(tmp_path / "r.csv")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_unwritable_output_exit_code(self, tmp_path):
        code = main(["run", "--spec", str(self.spec_file(tmp_path)),
                     "--out", str(tmp_path / "missing-dir" / "r.csv")])
        assert code == 1

    def test_console_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "fastsubmod.bench", "run",
             "--spec", str(self.spec_file(tmp_path))],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0].startswith("experiment,algorithm")


class TestFastBoundsThroughBench:
    def test_ws_preset_run_respects_hard_bounds(self):
        # bound checks live inside the algorithms; a clean run means they held
        spec = tiny_spec(name="ws-bounds", generator="ws", n=200,
                         algorithms=("fast",), k_values=(20,), seeds=(0, 1),
                         epsilon_fast=0.05)
        rows = run_experiment(spec)
        eps, k, n = 0.05, 20, 200
        ell = math.log(math.log(k) / eps)
        for row in rows:
            assert row.rounds <= ell ** 2 * math.log(n) / eps ** 2
            assert not row.failed
