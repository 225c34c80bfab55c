import json
import math

import numpy as np
import pytest

import qomspec as q
from qomspec.cli import main as cli_main
from qomspec.sweeps import run_preset

from conftest import BISTABILITY_CONFIG, SPECTRUM_CONFIG, detuning_grid


def _write_config(tmp_path, config, name="params.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return path


def test_single_point_sweep_equals_direct_evaluation():
    base = q.load_params(SPECTRUM_CONFIG)
    spec = q.SweepSpec(base=base, axis1=("g_hz", [10e6]), axis2=None,
                       quantity="mu_p", delta_hz=100e6)
    result = q.run_sweep(spec)
    assert len(result.rows) == 1
    value = result.rows[0][1]
    (s,) = q.solve_steady_states(base)
    r = q.compute_response(base, s, 100e6 * 2e-6 * math.pi)
    want = q.spectrum_point(base, s, r).mu_p
    assert value == pytest.approx(want, rel=1e-12)
    assert result.rows[0][-1] == ""


def test_window_splitting_grows_as_twice_the_coupling():
    gs_hz = np.array([4e6, 6e6, 8e6, 10e6])
    splittings = []
    for g_hz in gs_hz:
        p = q.load_params(dict(SPECTRUM_CONFIG, g_hz=g_hz))
        points = q.spectrum_sweep(p, detuning_grid(p, 0.8, 1.2, 1501))
        report = q.window_analysis(points, p.gamma_a)
        assert report.count == 2
        splittings.append(report.splitting)
    g_rad = gs_hz * 2e-6 * math.pi
    slope = np.polyfit(g_rad, splittings, 1)[0]
    assert slope == pytest.approx(2.0, rel=0.05)


def test_two_axis_sweep_axis_major_order():
    base = q.load_params(SPECTRUM_CONFIG)
    spec = q.SweepSpec(base=base,
                       axis1=("omega_q_hz", [90e6, 100e6]),
                       axis2=("delta_hz", [95e6, 100e6, 105e6]),
                       quantity="mu_p")
    result = q.run_sweep(spec)
    assert len(result.rows) == 6
    assert [row[0] for row in result.rows] == [90e6] * 3 + [100e6] * 3
    assert [row[1] for row in result.rows] == [95e6, 100e6, 105e6] * 2
    assert all(row[-1] == "" for row in result.rows)


def test_sweep_records_point_failures_without_aborting():
    # middle drive value sits in a two-stable-branch fold: the amplitude
    # quantity is ambiguous there and must be recorded as a failure
    base = q.load_params(dict(BISTABILITY_CONFIG, gamma_b_hz=1e6, probe_hz=0.0))
    spec = q.SweepSpec(base=base,
                       axis1=("drive_hz", [1e6, 50e6]),
                       axis2=None, quantity="photon_number")
    result = q.run_sweep(spec)
    assert len(result.rows) == 2
    ok_row, bad_row = result.rows
    assert ok_row[-1] == "" and np.isfinite(ok_row[1])
    assert "BranchSelectionError" in bad_row[-1]
    assert math.isnan(bad_row[1])


def test_sweep_spec_validation():
    base = q.load_params(SPECTRUM_CONFIG)
    with pytest.raises(q.ValidationError, match="quantity"):
        q.SweepSpec(base=base, axis1=("g_hz", [1.0]), axis2=None,
                    quantity="bogus")
    with pytest.raises(q.ValidationError, match="axis field"):
        q.SweepSpec(base=base, axis1=("nope", [1.0]), axis2=None,
                    quantity="branch_count")
    with pytest.raises(q.ValidationError, match="needs a detuning"):
        q.SweepSpec(base=base, axis1=("g_hz", [1.0]), axis2=None,
                    quantity="mu_p")
    spec = q.SweepSpec(base=base, axis1=("g_hz", [0.0, 10e6]), axis2=None,
                       quantity="branch_count")
    assert spec.quantity == "branch_count"
    # amplitude-squared spellings are accepted
    alias = q.SweepSpec(base=base, axis1=("g_hz", [1.0]), axis2=None,
                        quantity="|A0|^2")
    assert alias.quantity == "photon_number"


def test_preset_manifest_reconstructs_parameters(tmp_path):
    manifest_path = run_preset("fig5", tmp_path)
    manifest = json.loads(manifest_path.read_text())
    assert len(manifest["curves"]) == 2
    for curve in manifest["curves"]:
        params = q.load_params(curve["params_hz"])
        assert params.omega_b == pytest.approx(2 * math.pi * 100, rel=1e-12)
        assert (tmp_path / curve["file"]).exists()
    labels = {c["label"]: c for c in manifest["curves"]}
    assert labels["fig5_g0"]["windows"]["count"] == 1
    assert labels["fig5_g10MHz"]["windows"]["count"] == 2


def test_preset_fig7_manifest_window_counts(tmp_path):
    manifest = json.loads(run_preset("fig7", tmp_path).read_text())
    assert manifest["window_counts"] == {
        "fig7_wq100MHz": 2, "fig7_wq80MHz": 2, "fig7_wq120MHz": 2,
        "fig7_wq10MHz": 1, "fig7_wq200MHz": 1}


def test_preset_fig2_bistability_manifest(tmp_path):
    manifest = json.loads(run_preset("fig2", tmp_path).read_text())
    entry = manifest["curves"][0]
    assert entry["z0_fixed"] == -0.99
    assert entry["monotonic"] is False
    assert entry["count_pattern"] == [1, 3, 1]
    assert (tmp_path / entry["counts_file"]).exists()


def test_preset_fig9_has_three_curves(tmp_path):
    manifest = json.loads(run_preset("fig9", tmp_path).read_text())
    assert [c["label"] for c in manifest["curves"]] == [
        "fig9_wq100MHz", "fig9_wq80MHz", "fig9_wq120MHz"]


def test_preset_rejects_unknown_name(tmp_path):
    with pytest.raises(q.ValidationError):
        run_preset("fig1", tmp_path)


def test_cli_spectrum_deterministic(tmp_path):
    cfg = _write_config(tmp_path, SPECTRUM_CONFIG)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    for out in (out1, out2):
        code = cli_main(["spectrum", "--config", str(cfg), "--points", "201",
                         "--out", str(out)])
        assert code == 0
    csv1 = (out1 / "spectrum.csv").read_bytes()
    csv2 = (out2 / "spectrum.csv").read_bytes()
    assert csv1 == csv2
    windows = json.loads((out1 / "windows.json").read_text())
    assert windows["count"] == 2
    header = csv1.decode().splitlines()[0]
    assert header == "delta,delta_over_omega_b,mu_p,nu_p,G_s,G_as,re_eps_T,im_eps_T"


def test_cli_spectrum_response_dump(tmp_path):
    cfg = _write_config(tmp_path, SPECTRUM_CONFIG)
    out = tmp_path / "dump"
    code = cli_main(["spectrum", "--config", str(cfg), "--points", "201",
                     "--dump-response", "--out", str(out)])
    assert code == 0
    lines = (out / "response_dump.jsonl").read_text().splitlines()
    assert len(lines) == 201
    record = json.loads(lines[0])
    assert "lambda6" in record and "Z_minus" in record


def test_cli_spectrum_rejects_coarse_grid(tmp_path):
    cfg = _write_config(tmp_path, SPECTRUM_CONFIG)
    code = cli_main(["spectrum", "--config", str(cfg), "--points", "11",
                     "--out", str(tmp_path / "coarse")])
    assert code == 2  # window analysis needs spacing below gamma_a/10


def test_cli_validation_error_exit_code(tmp_path):
    cfg = _write_config(tmp_path, dict(SPECTRUM_CONFIG, gamma_a_hz=0.0))
    assert cli_main(["spectrum", "--config", str(cfg)]) == 2


def test_cli_branch_ambiguity_exit_code(tmp_path):
    config = dict(BISTABILITY_CONFIG, gamma_b_hz=1e6, drive_hz=50e6,
                  probe_hz=50e3)
    cfg = _write_config(tmp_path, config)
    out = tmp_path / "bi"
    assert cli_main(["spectrum", "--config", str(cfg), "--points", "201",
                     "--out", str(out)]) == 2
    assert cli_main(["spectrum", "--config", str(cfg), "--points", "201",
                     "--branch", "0", "--out", str(out)]) == 0


def test_cli_bistability(tmp_path):
    cfg = _write_config(tmp_path, BISTABILITY_CONFIG)
    out = tmp_path / "bist"
    code = cli_main(["bistability", "--config", str(cfg), "--mode", "photon",
                     "--z0", "-0.99", "--points", "301", "--out", str(out)])
    assert code == 0
    lines = (out / "bistability_photon.csv").read_text().splitlines()
    assert lines[0] == "x,omega_abs,branch_id,z0,defect"
    assert len(lines) == 302


def test_cli_sweep(tmp_path):
    spec = {
        "base": SPECTRUM_CONFIG,
        "axis1": {"field": "g_hz", "values_hz": [0.0, 10e6]},
        "axis2": None,
        "quantity": "branch_count",
    }
    spec_path = tmp_path / "sweep.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "sw"
    assert cli_main(["sweep", "--spec", str(spec_path), "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "g_hz,branch_count,error"
    assert len(lines) == 3


def test_cli_oracle_check(tmp_path):
    cfg = _write_config(tmp_path, SPECTRUM_CONFIG)
    out = tmp_path / "oc"
    # grid kept off the exact dressed resonances, where second-order
    # qubit saturation exceeds the first-order threshold (see README)
    code = cli_main(["oracle-check", "--config", str(cfg),
                     "--eps-ratio", "1e-3", "--points", "3",
                     "--grid-lo", "0.95", "--grid-hi", "1.05",
                     "--out", str(out)])
    assert code == 0
    report = json.loads((out / "oracle_check.json").read_text())
    assert report["passed"] is True
    assert report["max_err_a_minus"] <= 1e-3


def test_cli_oracle_check_trajectory_dump(tmp_path):
    cfg = _write_config(tmp_path, SPECTRUM_CONFIG)
    out = tmp_path / "ocdump"
    code = cli_main(["oracle-check", "--config", str(cfg),
                     "--eps-ratio", "1e-3", "--points", "1",
                     "--grid-lo", "1.0", "--grid-hi", "1.0",
                     "--dump-trajectories", "--out", str(out)])
    assert code == 0
    csv_lines = (out / "trajectory_000.csv").read_text().splitlines()
    assert csv_lines[0] == "t,re_a,im_a,re_b,im_b,re_s_minus,im_s_minus,s_z"
    assert len(csv_lines) == 64 * 32 + 1
    harm = json.loads((out / "harmonics_000.json").read_text())
    assert harm["stable"] is True
    assert "a_minus" in harm


def test_cli_preset_smoke(tmp_path):
    assert cli_main(["preset", "fig5", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig5_manifest.json").exists()


def test_worker_pool_is_deterministic(monkeypatch):
    base = q.load_params(SPECTRUM_CONFIG)
    spec = q.SweepSpec(base=base,
                       axis1=("delta_hz", [95e6, 100e6, 105e6]),
                       axis2=None, quantity="mu_p")
    serial = q.run_sweep(spec, workers=1)
    threaded = q.run_sweep(spec, workers=3)
    assert serial.rows == threaded.rows
    deltas = base.omega_b * np.array([0.97, 1.0, 1.03])
    one = q.oracle_check(base, deltas, 1e-3, workers=1)
    two = q.oracle_check(base, deltas, 1e-3, workers=2)
    assert one.err_a_minus == two.err_a_minus
    monkeypatch.setenv("QOMSPEC_WORKERS", "4")
    assert q.sweeps.worker_count() == 4
    monkeypatch.setenv("QOMSPEC_WORKERS", "zebra")
    with pytest.raises(q.ValidationError):
        q.sweeps.worker_count()


def test_oracle_check_validation(spectrum_params):
    with pytest.raises(q.ValidationError, match="eps_ratio"):
        q.oracle_check(spectrum_params, [spectrum_params.omega_b], 0.1)
    no_drive = q.load_params(dict(SPECTRUM_CONFIG, drive_hz=0.0, probe_hz=0.0))
    with pytest.raises(q.ValidationError):
        q.oracle_check(no_drive, [no_drive.omega_b], 1e-3)


def test_oracle_check_refuses_unstable_branch():
    # both non-trivial branches of this fold are unstable at z0-selection
    # time, so there is no valid operating point without an explicit branch
    p = q.load_params(dict(BISTABILITY_CONFIG, gamma_b_hz=1e6, drive_hz=50e6))
    with pytest.raises((q.BranchSelectionError, q.UnstableOperatingPointError)):
        q.oracle_check(p, [p.omega_b], 1e-3)
