"""End-to-end smoke tests for the python surface (built extension on PYTHONPATH)."""

import json
import math
import os

import pytest

import dsqw


def test_version_and_exports():
    assert dsqw.__version__ == "0.1.0"
    for name in dsqw.__all__:
        assert hasattr(dsqw, name)


def test_quasienergies_match_the_closed_form():
    t1, t2, phi, k = 0.35 * math.pi, 0.2 * math.pi, 0.3, 0.7
    lo, hi = dsqw.quasienergies(t1, t2, phi, k)
    arg = math.cos(t1) * math.cos(t2) * math.cos(k) - math.sin(t1) * math.sin(t2) * math.cos(phi)
    assert hi == pytest.approx(math.acos(arg), abs=1e-14)
    assert lo == pytest.approx(-hi, abs=0.0)


def test_band_curve_is_flat_for_the_flat_protocol():
    curve = dsqw.band_curve(0.5 * math.pi, 0.0, 0.2 * math.pi, n_k=64)
    assert len(curve["k"]) == 64
    assert all(abs(e - 0.5 * math.pi) < 1e-13 for e in curve["e_plus"])
    assert all(abs(e + 0.5 * math.pi) < 1e-13 for e in curve["e_minus"])


def test_dfs_momentum_folds_phi_plus_pi():
    (k,) = dsqw.dfs_momenta(0.3)
    assert k == pytest.approx(0.3 - math.pi, abs=1e-15)


def test_noise_coefficients_gaussian_closed_forms():
    c = dsqw.noise_coefficients("gaussian", 0.3)
    s2 = 0.3 * 0.3
    assert c["moments"]["cos"] == pytest.approx(math.exp(-s2 / 2), abs=1e-15)
    assert c["gamma_plus"] == pytest.approx((1 - math.exp(-2 * s2)) / 2, abs=1e-15)
    assert c["moments"]["sin"] == 0.0
    # Pythagoras holds for every admissible distribution.
    u = dsqw.noise_coefficients("uniform", 0.4 * math.pi)
    assert u["moments"]["cos2"] + u["moments"]["sin2"] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        dsqw.noise_coefficients("triangular", 0.1)


def test_presets_round_trip_through_the_parser():
    names = dsqw.preset_names()
    assert "fig3c" in names and "fig4" in names
    for name in names:
        canon = dsqw.canonical_config(dsqw.preset_text(name))
        assert dsqw.canonical_config(canon) == canon
        assert json.loads(canon)["name"] == name
    with pytest.raises(ValueError):
        dsqw.canonical_config("{}")


def test_edge_states_for_the_flat_band_protocol():
    rep = dsqw.edge_states(0.5 * math.pi, 0.0, 0.2 * math.pi, 44)
    assert rep["pi_gap_open"] and rep["zero_gap_open"]
    sides = {st["side"] for st in rep["states"]}
    assert sides == {"left", "right"}
    left_pi = [st for st in rep["states"] if st["side"] == "left" and st["gap"] == "pi"]
    assert left_pi and left_pi[0]["quasienergy"] == pytest.approx(0.8 * math.pi, abs=1e-10)
    assert all(st["ipr"] > 4.0 / 44 for st in rep["states"])
    assert all(abs(sum(st["weight"]) - 1.0) < 1e-12 for st in rep["states"])


def test_run_dfs_writes_artifacts(tmp_path):
    config = json.dumps(
        {
            "name": "smoke-dfs",
            "protocol": {
                "theta1": "0.35pi",
                "theta2": "0.2pi",
                "phi": 0.3,
                "n_sites": 16,
                "boundary": "periodic",
            },
            "steps": 4,
        }
    )
    res = dsqw.run("dfs", config, threads=1, out=str(tmp_path / "dfs"))
    assert res["exit_code"] == 0
    assert res["outputs"] == ["dfs.csv", "dfs_momenta.csv", "manifest.json"]
    for name in res["outputs"]:
        assert os.path.exists(os.path.join(res["out_dir"], name))
    with open(os.path.join(res["out_dir"], "dfs_momenta.csv")) as f:
        header, row = f.read().splitlines()
    assert header == "k,residual_plus,residual_minus"
    k, rp, rm = (float(x) for x in row.split(","))
    assert k == pytest.approx(0.3 - math.pi, abs=1e-15)
    assert rp < 1e-12 and rm < 1e-12


def test_run_master_reports_return_series(tmp_path):
    config = json.dumps(
        {
            "name": "smoke-master",
            "protocol": {
                "theta1": "0.5pi",
                "theta2": 0.0,
                "phi": "0.2pi",
                "n_sites": 20,
                "boundary": "open",
            },
            "noise": {
                "distribution": "gaussian",
                "sigma": "0.12pi",
                "schedule": "stroboscopic",
            },
            "engine": "master",
            "initial": {"kind": "edge_state", "side": "left"},
            "periods": 30,
            "observables": ["return", "norm"],
        }
    )
    res = dsqw.run("master", config, threads=1, out=str(tmp_path / "master"))
    assert res["exit_code"] == 0, res["message"]
    with open(os.path.join(res["out_dir"], "return.csv")) as f:
        lines = f.read().splitlines()
    assert lines[0] == "period,value"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert len(values) == 31
    assert values[0] == pytest.approx(1.0, abs=1e-12)
    # Pure dephasing empties the edge state at the closed-form rate early on.
    c2 = (1 + math.exp(-2 * (0.12 * math.pi) ** 2)) / 2
    assert values[1] == pytest.approx(c2, rel=1e-6)
    assert all(b < a for a, b in zip(values[:10], values[1:11]))
    assert all(0.0 < v <= 1.0 for v in values)


def test_resource_refusals_surface_as_exit_codes(tmp_path):
    config = json.dumps(
        {
            "protocol": {"theta1": 0, "theta2": "0.25pi", "phi": 0, "n_sites": 200},
            "engine": "master",
            "steps": 4,
        }
    )
    res = dsqw.run("master", config, threads=1, out=str(tmp_path / "big"))
    assert res["exit_code"] == 3
    assert "trajectory engine" in res["message"]


def test_verify_runs_the_full_check_suite():
    results = dsqw.verify(threads=1)
    assert len(results) == 12
    assert [r["id"] for r in results] == list(range(1, 13))
    for r in results:
        assert r["passed"], f"check {r['id']} {r['name']}: {r['detail']}"
        assert r["name"] and r["detail"]
        assert r["seconds"] >= 0.0
