import json

import pytest

from csflab.cli import main


def write_config(path, **overrides):
    cfg = {
        "alpha": 1.0,
        "grid_size": 64,
        "t_end": 0.5,
        "cfl_safety": 0.25,
        "recipe": {"kind": "exact_translator"},
        "checks": {"stationarity": {"tol": 1e-2}, "width": {"tol": 0.05}},
        "sample_step": 0.05,
        "seed": 0,
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return cfg


def test_soliton_writes_profile_and_metadata(tmp_path):
    out = tmp_path / "sol"
    assert main(["soliton", "--alpha", "1", "--n", "512", "--out", str(out)]) == 0
    meta = json.loads((out / "soliton.json").read_text())
    assert meta["speed"] == pytest.approx(1.5708, abs=5e-5)
    assert meta["regime"] == "strip_bound"
    rows = (out / "soliton.csv").read_text().splitlines()
    assert rows[0] == "theta,x1,x2,u_star"
    assert len(rows) == 513
    graph_rows = (out / "soliton_graph.csv").read_text().splitlines()
    assert graph_rows[0] == "x,f,fx"


def test_soliton_entire_graph_regime(tmp_path):
    out = tmp_path / "sol"
    assert main(["soliton", "--alpha", "0.4", "--out", str(out)]) == 0
    meta = json.loads((out / "soliton.json").read_text())
    assert meta["regime"] == "entire_graph"
    assert meta["speed"] is None
    assert not (out / "soliton.csv").exists()


def test_soliton_invalid_alpha_usage_error(tmp_path):
    assert main(["soliton", "--alpha", "-1", "--out", str(tmp_path)]) == 2


def test_evolve_translator_passes_checks(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path)
    out = tmp_path / "out"
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["all_passed"]
    names = {c["name"] for c in report["checks"]}
    assert {"stationarity", "width_conservation"} <= names
    assert (out / "trace.csv").exists()
    assert (out / "config.json").exists()
    curve_rows = (out / "final_curve.csv").read_text().splitlines()
    assert curve_rows[0] == "theta,x1,x2"


def test_evolve_failing_check_exit_one(tmp_path):
    cfg_path = tmp_path / "run.json"
    # impossible stationarity tolerance forces a controlled failure
    write_config(cfg_path, checks={"stationarity": {"tol": 1e-16}})
    out = tmp_path / "out"
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text())
    assert not report["all_passed"]


def test_evolve_subcritical_alpha_rejected(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path, alpha=0.5)
    assert main(["evolve", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 2


def test_evolve_malformed_config_rejected(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["evolve", "--config", str(bad)]) == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"alpha": 1.0}))  # no t_end
    assert main(["evolve", "--config", str(missing)]) == 2
    unknown = tmp_path / "unknown.json"
    write_config(unknown, checks={"no_such_check": {}})
    assert main(["evolve", "--config", str(unknown), "--out", str(tmp_path / "u")]) == 2


def test_evolve_deterministic_outputs(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(
        cfg_path,
        recipe={"kind": "multiplicative_perturbation", "random_modes": 3,
                "random_amplitude": 0.05},
        seed=42,
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out2)]) == 0
    for name in ("trace.csv", "config.json", "report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    # the resolved config records the drawn coefficients
    resolved = json.loads((out1 / "config.json").read_text())
    assert resolved["recipe"]["random_modes"] == 0
    assert len(resolved["recipe"]["sin"]) == 3


def test_check_reruns_on_existing_trace(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path)
    out = tmp_path / "out"
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert (
        main(["check", "--trace", str(out / "trace.csv"), "--config", str(cfg_path)])
        == 0
    )
    recheck = json.loads((out / "recheck.json").read_text())
    assert recheck["all_passed"]
    # re-ingested trace reproduces the original verdict constants
    original = json.loads((out / "report.json").read_text())
    re_station = next(c for c in recheck["checks"] if c["name"] == "stationarity")
    or_station = next(c for c in original["checks"] if c["name"] == "stationarity")
    assert re_station["constants"]["sup_rel_drift"] == pytest.approx(
        or_station["constants"]["sup_rel_drift"], rel=1e-12
    )


def test_sweep_runs_and_summarizes(tmp_path):
    cfg_path = tmp_path / "base.json"
    write_config(cfg_path, t_end=0.2)
    out = tmp_path / "sweep"
    code = main([
        "sweep", "--alphas", "0.75,1.0,1.0", "--config", str(cfg_path),
        "--out", str(out), "--jobs", "1",
    ])
    assert code == 0
    rows = (out / "summary.csv").read_text().splitlines()
    assert rows[0].startswith("alpha,speed,final_sup_error")
    assert len(rows) == 3  # duplicates removed
    assert (out / "alpha_0.75" / "report.json").exists()
    assert (out / "alpha_1" / "report.json").exists()


def test_sweep_empty_and_subcritical_rejected(tmp_path):
    assert main(["sweep", "--alphas", "", "--out", str(tmp_path / "s1")]) == 2
    assert main(["sweep", "--alphas", "0.4,1.0", "--out", str(tmp_path / "s2")]) == 2


def test_evolve_null_sample_times_means_unset(tmp_path):
    cfg_path = tmp_path / "run.json"
    write_config(cfg_path, sample_times=None, sample_step=0.05)
    out = tmp_path / "out"
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out)]) == 0


def test_evolve_integration_failure_exit_three(tmp_path):
    # an un-normalized absurdly fast initial profile blows past the speed
    # cap immediately; the run must exit 3 and leave a failure report
    cfg_path = tmp_path / "run.json"
    pts = [[0.3, 1e49], [1.0, 1e49], [2.0, 1e49], [2.8, 1e49]]
    write_config(
        cfg_path,
        recipe={"kind": "piecewise", "points": pts, "normalize_width": False},
        checks={},
    )
    out = tmp_path / "out"
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out)]) == 3
    report = json.loads((out / "report.json").read_text())
    assert "failure" in report


def test_sweep_parallel_workers(tmp_path):
    cfg_path = tmp_path / "base.json"
    write_config(cfg_path, t_end=0.1)
    out = tmp_path / "sweep"
    code = main([
        "sweep", "--alphas", "0.75,2.0", "--config", str(cfg_path),
        "--out", str(out), "--jobs", "2",
    ])
    assert code == 0
    rows = (out / "summary.csv").read_text().splitlines()
    assert len(rows) == 3