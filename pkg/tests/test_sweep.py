import io
import math

import pytest

from pindelay.errors import DomainError
from pindelay.graph import DirectedGraph, PinSet, laplacian
from pindelay.sweep import SweepAxis, SweepSettings, gnuplot_script, run_sweep, worker_count

pair = laplacian(DirectedGraph([[0, 1], [1, 0]]))
pins = PinSet((0,), 2)


def test_axis_parsing():
    assert SweepAxis.parse("c=1,2.5").values == (1.0, 2.5)
    assert SweepAxis.parse("tau_p=0:1:5").values == (0.0, 0.25, 0.5, 0.75, 1.0)
    for bad in ("c", "c=", "gain=1"):
        with pytest.raises(DomainError):
            SweepAxis.parse(bad)


def test_grid_layout_and_values():
    grid = run_sweep(pair, pins, SweepAxis.parse("c=0.5,1"), SweepAxis.parse("tau_p=0.1,5"),
                     ["bound", "charroots"], SweepSettings(tau_r=0.1))
    assert grid.columns == ["c", "tau_p", "tau_r", "bound_value", "bound_verdict",
                            "charroots_value", "charroots_verdict"]
    assert [(r["c"], r["tau_p"]) for r in grid.cells] == [(0.5, 0.1), (0.5, 5), (1, 0.1), (1, 5)]
    assert grid.cells[0]["charroots_verdict"] == "Stable"
    assert grid.cells[3]["charroots_verdict"] == "Unstable"
    buf = io.StringIO()
    grid.to_csv(buf)
    assert len(buf.getvalue().splitlines()) == 5
    assert "palette" in gnuplot_script(grid, "out.csv")


def test_tau_p_times_c_links_the_axes():
    grid = run_sweep(pair, pins, SweepAxis.parse("c=1,4"), None, ["bound"],
                     SweepSettings(tau_p_times_c=0.5))
    assert [r["tau_p"] for r in grid.cells] == [0.5, 0.125]


def test_cell_errors_do_not_stop_the_sweep():
    grid = run_sweep(pair, PinSet((0, 1), 2), SweepAxis.parse("c=1"), None, ["large_c", "bound"])
    cell = grid.cells[0]
    assert cell["large_c_verdict"] == "ERROR:AllPinned" and math.isnan(cell["large_c_value"])
    assert cell["bound_verdict"] == "Stable"


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("PINDELAY_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.delenv("PINDELAY_THREADS")
    assert worker_count(None) == 1
