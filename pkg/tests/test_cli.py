import json

import numpy as np
import pandas as pd
import pytest

from curvephase import RunConfig, run
from curvephase.cli import main
from curvephase.io import (
    METRICS_COLUMNS,
    TRACE_COLUMNS,
    read_metrics_csv,
    read_trace_csv,
    trace_frame,
    write_metrics_csv,
    write_trace_csv,
)

ROSE_CURVE = {"family": "polar_rose", "a": 10.0, "b": 6, "s": 5.0, "center": [0.0, 0.0]}


def write_config(tmp_path, name="run.json", **overrides):
    data = {
        "curve": {"family": "circle", "radius": 10.0, "center": [0.0, 0.0]},
        "graph": {"n": 3, "circulant_offsets": [1]},
        "gains": {"K_C": 2.5, "K": -0.5},
        "delta": 5.0,
        "u_max": 0.2,
        "dt": 0.01,
        "T": 600.0,
        "initial_conditions": {"random": {"seed": 7, "count": 3}},
        "output_dir": str(tmp_path / "out"),
    }
    data.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_simulate_success_and_artifacts(tmp_path):
    path = write_config(tmp_path)
    assert main(["simulate", "--config", str(path)]) == 0
    out = tmp_path / "out"
    trace = read_trace_csv(out / "run_trace.csv")
    metrics = read_metrics_csv(out / "run_metrics.csv")
    verdict = json.loads((out / "run_verdict.json").read_text())
    assert verdict["verdicts"]["all_ok"] is True
    assert trace["x"].shape[1] == 3
    assert len(metrics["t"]) == len(trace["t"]) == 60001
    assert verdict["config"]["gains"]["K"] == -0.5
    assert "H_interval" in verdict["bounds"]


def test_simulate_invalid_config(tmp_path):
    path = write_config(tmp_path, delta=0.0)
    assert main(["simulate", "--config", str(path)]) == 2
    path = write_config(tmp_path, name="bad_gain.json", gains={"K_C": -1.0, "K": -0.5})
    assert main(["simulate", "--config", str(path)]) == 2
    missing = tmp_path / "nope.json"
    assert main(["simulate", "--config", str(missing)]) == 2


def test_simulate_infeasible_initials(tmp_path):
    path = write_config(
        tmp_path,
        initial_conditions={"x": [100.0, 120.0, 140.0], "y": [0.0, 0.0, 0.0],
                            "theta_deg": [10.0, 20.0, 30.0]},
    )
    assert main(["simulate", "--config", str(path)]) == 3


def test_simulate_verdict_failure_is_exit_one(tmp_path):
    # too short to converge: clean run, failed verdict
    path = write_config(tmp_path, T=2.0)
    assert main(["simulate", "--config", str(path)]) == 1


def test_simulate_barrier_breach(tmp_path):
    # turn rate clipped far below the curvature demand: the barrier
    # cannot be defended and the run aborts
    path = write_config(
        tmp_path, name="tiny_turn.json", curve=ROSE_CURVE, delta=3.0,
        u_max=0.004, T=300.0,
        initial_conditions={"random": {"seed": 11, "count": 3}})
    with pytest.warns(RuntimeWarning):
        assert main(["simulate", "--config", str(path)]) == 4


def test_simulate_inadmissible_offset_distance_still_runs(tmp_path):
    # barrier distances beyond the offset-admissibility threshold are
    # simulable; only the boundary report is unavailable
    path = write_config(tmp_path, name="big_delta.json", delta=15.0, T=2.0)
    assert main(["simulate", "--config", str(path)]) in (0, 1)
    assert (tmp_path / "out" / "big_delta_trace.csv").exists()


def test_curve_report_command(tmp_path):
    path = write_config(tmp_path, name="rose.json", curve=ROSE_CURVE, delta=12.0)
    assert main(["curve", "--config", str(path)]) == 0
    report = json.loads((tmp_path / "out" / "rose_report.json").read_text())
    assert set(report) >= {
        "perimeter", "area", "kappa_max", "min_turn_radius",
        "total_signed_curvature", "boundary_perimeters", "boundary_areas",
        "assumption1_ok",
    }
    assert report["perimeter"] == pytest.approx(340.82, rel=5e-3)
    assert report["assumption1_ok"] is True
    bnd = pd.read_csv(tmp_path / "out" / "rose_boundaries.csv")
    assert list(bnd.columns) == [
        "phi", "x_curve", "y_curve", "x_exterior", "y_exterior",
        "x_interior", "y_interior"]


def test_curve_report_circle_offsets(tmp_path):
    path = write_config(tmp_path, name="circ.json")
    assert main(["curve", "--config", str(path)]) == 0
    report = json.loads((tmp_path / "out" / "circ_report.json").read_text())
    assert report["boundary_perimeters"]["exterior"] == pytest.approx(
        30.0 * np.pi, rel=1e-6)
    assert report["boundary_perimeters"]["interior"] == pytest.approx(
        10.0 * np.pi, rel=1e-6)


def test_curve_report_inadmissible_delta(tmp_path):
    path = write_config(tmp_path, name="rose.json", curve=ROSE_CURVE, delta=12.0)
    assert main(["curve", "--config", str(path), "--delta", "14.0"]) == 5


def test_output_dir_env_override(tmp_path, monkeypatch):
    override = tmp_path / "elsewhere"
    monkeypatch.setenv("CURVEPHASE_OUTDIR", str(override))
    path = write_config(tmp_path, name="rose.json", curve=ROSE_CURVE, delta=12.0)
    assert main(["curve", "--config", str(path)]) == 0
    assert (override / "rose_report.json").exists()


def test_trace_csv_round_trip(tmp_path):
    config = RunConfig.from_dict(json.loads(write_config(tmp_path, T=1.0).read_text()))
    trace = run(config)
    tpath = tmp_path / "trace.csv"
    mpath = tmp_path / "metrics.csv"
    write_trace_csv(trace, tpath)
    write_metrics_csv(trace, mpath)

    assert tpath.read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)
    assert mpath.read_text().splitlines()[0] == ",".join(METRICS_COLUMNS)

    back = read_trace_csv(tpath)
    assert np.array_equal(back["x"], trace.r.real)
    assert np.array_equal(back["y"], trace.r.imag)
    for name in ("theta", "phi", "psi", "e_abs", "zeta", "u"):
        assert np.array_equal(back[name], getattr(trace, name)), name
    metrics = read_metrics_csv(mpath)
    assert np.array_equal(metrics["V"], trace.V)
    assert np.array_equal(metrics["p_psi_abs"], trace.p_psi_abs)
    assert np.array_equal(metrics["Psi"], trace.big_psi)


def test_trace_frame_agent_order(tmp_path):
    config = RunConfig.from_dict(json.loads(write_config(tmp_path, T=0.1).read_text()))
    trace = run(config)
    df = trace_frame(trace)
    assert list(df.columns) == TRACE_COLUMNS
    assert df["agent"].tolist()[:6] == [0, 1, 2, 0, 1, 2]
    assert df["t"].iloc[3] == pytest.approx(0.01)


def test_verify_fast_mode(capsys):
    assert main(["verify", "--fast"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith("[PASS]") for line in lines)
    assert not any(line.startswith("[FAIL]") for line in lines)


def test_verify_reports_failures(monkeypatch, capsys):
    from curvephase import cli as cli_mod
    from curvephase.acceptance import Check

    monkeypatch.setattr(cli_mod, "full_checklist",
                        lambda fast: [Check("doomed", False, "injected")])
    assert main(["verify"]) == 1
    assert "[FAIL] doomed" in capsys.readouterr().out
