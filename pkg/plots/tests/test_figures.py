"""Figure rendering from the benchmark CSV schema."""

import os

import pytest

from benchplots import FigureSpec, SchemaError, read_rows, render, series_data
from benchplots.cli import main

HERE = os.path.dirname(__file__)
SMALL_PRESETS = os.path.join(HERE, "data", "small_presets.csv")

HEADER = "experiment,algorithm,n,k,seed,threads,value,queries,rounds,wall_seconds,failed\n"


def write_csv(path, rows):
    path.write_text(HEADER + "".join(rows))
    return str(path)


def row(experiment="exp", algorithm="alg", k=10, seed=0, value=1.0, wall=0.5):
    return f"{experiment},{algorithm},500,{k},{seed},1,{value},10,2,{wall},false\n"


class TestSeriesData:
    def test_single_row_single_point(self, tmp_path):
        path = write_csv(tmp_path / "r.csv", [row()])
        fig = FigureSpec(inputs=[path])
        panels = series_data(read_rows([path]), fig)
        assert list(panels) == ["exp"]
        series = panels["exp"]["alg"]
        assert series.ks == [10]
        assert series.mean == [1.0]

    def test_two_algorithms_five_k(self, tmp_path):
        rows = [row(algorithm=a, k=k, value=k * (1 if a == "a1" else 2))
                for a in ("a1", "a2") for k in (1, 2, 3, 4, 5)]
        path = write_csv(tmp_path / "r.csv", rows)
        panels = series_data(read_rows([path]), FigureSpec(inputs=[path]))
        assert set(panels["exp"]) == {"a1", "a2"}
        assert panels["exp"]["a1"].ks == [1, 2, 3, 4, 5]
        assert panels["exp"]["a2"].mean == [2.0, 4.0, 6.0, 8.0, 10.0]

    def test_mean_and_minmax_whiskers_over_seeds(self, tmp_path):
        rows = [row(seed=s, value=v) for s, v in enumerate((1.0, 2.0, 6.0))]
        path = write_csv(tmp_path / "r.csv", rows)
        s = series_data(read_rows([path]), FigureSpec(inputs=[path]))["exp"]["alg"]
        assert s.mean == [3.0]
        assert s.lo == [1.0]
        assert s.hi == [6.0]

    def test_deterministic_for_identical_bytes(self, tmp_path):
        rows = [row(k=k, seed=s, value=k + s) for k in (2, 4) for s in (0, 1)]
        p1 = write_csv(tmp_path / "a.csv", rows)
        p2 = write_csv(tmp_path / "b.csv", rows)
        fig = FigureSpec(inputs=[p1])
        d1 = series_data(read_rows([p1]), fig)
        d2 = series_data(read_rows([p2]), FigureSpec(inputs=[p2]))
        assert d1 == d2

    def test_time_axis_uses_wall_seconds(self, tmp_path):
        path = write_csv(tmp_path / "r.csv", [row(wall=0.25)])
        s = series_data(read_rows([path]),
                        FigureSpec(inputs=[path], y_axis="time"))["exp"]["alg"]
        assert s.mean == [0.25]

    def test_missing_column_named_in_error(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("experiment,algorithm,k\nexp,alg,1\n")
        with pytest.raises(SchemaError, match="wall_seconds"):
            read_rows([str(p)])


class TestRender:
    def test_one_png_per_panel(self, tmp_path):
        rows = [row(experiment=e, k=k) for e in ("e1", "e2") for k in (1, 2)]
        path = write_csv(tmp_path / "r.csv", rows)
        written = render(FigureSpec(inputs=[path]), tmp_path / "figs")
        assert len(written) == 2
        assert all(os.path.exists(w) and os.path.getsize(w) > 0 for w in written)

    def test_log_time_clamps_zero_with_warning(self, tmp_path):
        rows = [row(k=1, wall=0.0), row(k=2, wall=0.5)]
        path = write_csv(tmp_path / "r.csv", rows)
        fig = FigureSpec(inputs=[path], y_axis="time", log_time=True)
        with pytest.warns(UserWarning, match="clamped"):
            written = render(fig, tmp_path / "figs")
        assert len(written) == 1

    def test_legend_lists_every_algorithm_in_panel(self, tmp_path):
        import matplotlib.pyplot as plt

        rows = [row(algorithm=a, k=k) for a in ("fast", "greedy", "random")
                for k in (1, 2)]
        path = write_csv(tmp_path / "r.csv", rows)
        recorded = []
        orig = plt.Figure.savefig

        def spy(self, *a, **kw):
            for ax in self.axes:
                legend = ax.get_legend()
                recorded.extend(t.get_text() for t in legend.get_texts())
            return orig(self, *a, **kw)

        plt.Figure.savefig = spy
        try:
            render(FigureSpec(inputs=[path]), tmp_path / "figs")
        finally:
            plt.Figure.savefig = orig
        assert set(recorded) == {"fast", "greedy", "random"}


class TestSmallPresetFixture:
    """Acceptance: the full small-preset CSV renders into 4 panels with every
    algorithm present, and the series data round-trips deterministically."""

    def test_four_panels_all_algorithms(self, tmp_path):
        fig = FigureSpec(inputs=[SMALL_PRESETS])
        panels = series_data(read_rows([SMALL_PRESETS]), fig)
        assert set(panels) == {"er-small", "sbm-small", "ws-small", "ba-small"}
        for panel, by_alg in panels.items():
            assert set(by_alg) == {"fast", "lazy_greedy", "parallel_ltlg", "random"}
            for series in by_alg.values():
                assert series.ks == [25, 50, 100]
        written = render(fig, tmp_path / "figs")
        assert len(written) == 4
        print("ACCEPTANCE secondary figure-rendering: PASS "
              "(4 panels, 4 series each, 3 points per series)")

    def test_series_round_trip_is_deterministic(self):
        fig = FigureSpec(inputs=[SMALL_PRESETS])
        first = series_data(read_rows([SMALL_PRESETS]), fig)
        second = series_data(read_rows([SMALL_PRESETS]), fig)
        assert first == second

    def test_time_render_with_log_axis(self, tmp_path):
        fig = FigureSpec(inputs=[SMALL_PRESETS], y_axis="time", log_time=True)
        written = render(fig, tmp_path / "figs")
        assert len(written) == 4


class TestCli:
    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "figs"
        code = main(["--in", SMALL_PRESETS, "--out", str(out), "--y", "time",
                     "--log-time"])
        assert code == 0
        assert len(capsys.readouterr().out.strip().split("\n")) == 4

    def test_schema_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n1\n")
        assert main(["--in", str(bad), "--out", str(tmp_path / "f")]) == 1
        assert "error" in capsys.readouterr().err
