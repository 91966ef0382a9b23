"""CLI tests for the figure renderer."""

import csv
import os

import pytest

from figtools.cli import main

from test_figtools_figures import RESULT_FIELDS, TRACE_FIELDS, _write_csv


@pytest.fixture
def sweep_dir(tmp_path):
    d = tmp_path / "sweep"
    d.mkdir()
    rows = [
        dict.fromkeys(RESULT_FIELDS, "")
        | {"slice": 0, "method": m, "R": R, "psnr_db": 60, "rmse": f"{0.1 * R:.3f}"}
        for m in ("vc", "primo", "txlr")
        for R in (2, 4)
    ]
    _write_csv(d / "results.csv", RESULT_FIELDS, rows)
    traces = [
        {"slice": 0, "method": "txlr", "R": 4, "psnr_db": 60, "iteration": i,
         "chi": f"{10.0 / i}", "rmse": f"{1.0 / i}", "resid": "0.1"}
        for i in range(1, 6)
    ]
    _write_csv(d / "traces.csv", TRACE_FIELDS, traces)
    return d


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["plot", "unknown_figure", "--in", "x.csv", "--out", "y.png"])
    assert exc.value.code == 2


def test_plot_single_figure(sweep_dir, tmp_path, capsys):
    out = str(tmp_path / "fig.png")
    rc = main(["plot", "rmse_vs_R", "--in", str(sweep_dir / "results.csv"),
               "--out", out])
    assert rc == 0
    assert capsys.readouterr().out.strip() == out
    assert os.path.getsize(out) > 0


def test_plot_schema_error_exits_1(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    rc = main(["plot", "rmse_vs_R", "--in", str(empty),
               "--out", str(tmp_path / "x.png")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_all_renders_available_figures(sweep_dir, tmp_path, capsys):
    out_dir = tmp_path / "figs"
    rc = main(["all", "--sweep-dir", str(sweep_dir), "--out-dir", str(out_dir)])
    assert rc == 0
    made = sorted(os.listdir(out_dir))
    # no spectra.csv in this sweep directory, so that figure is skipped
    assert made == ["convergence.png", "rmse_vs_R.png", "rmse_vs_psnr.png"]
    err = capsys.readouterr().err
    assert "spectra" in err


def test_all_with_nothing_to_render(tmp_path, capsys):
    empty = tmp_path / "none"
    empty.mkdir()
    rc = main(["all", "--sweep-dir", str(empty), "--out-dir", str(tmp_path / "o")])
    assert rc == 1
