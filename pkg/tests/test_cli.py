import json
import math
import subprocess
import sys

import numpy as np
import pytest

from maxsurf.cli import load_config, main
from maxsurf.errors import ConfigError
from maxsurf.invariants import read_field_csv
from maxsurf.surface import read_patch_csv, read_patch_json


def _job(tmp_path, **over):
    cfg = {
        "domain": {"u0": 1.5, "u1": 2.5, "v0": 0, "v1": 1, "nu": 17, "nv": 17},
        "t0": [2.0, 0.5],
        "generators": {"kind": "pair", "g1": "z", "g2": "2*z"},
    }
    cfg.update(over)
    path = tmp_path / "job.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def _run(tmp_path, cmd, **over):
    out = tmp_path / "out"
    code = main([cmd, "--config", _job(tmp_path, **over), "--out", str(out)])
    return code, out


def _provenance_ok(doc, cmd):
    prov = doc["provenance"]
    assert prov["command"] == cmd and prov["generators"]["g1"]
    assert "tolerances" in prov and "tool" in prov


def test_invariants_command(tmp_path):
    code, out = _run(tmp_path, "invariants")
    assert code == 0
    cols = read_field_csv((out / "invariants.csv").read_text())
    row = np.flatnonzero((cols["u"] == 2.0) & (cols["v"] == 0.0))[0]
    assert cols["E"][row] == 5.625
    summary = json.loads((out / "summary.json").read_text())
    assert summary["K_minus_abs_kappa"]["min"] > 0
    _provenance_ok(summary, "invariants")
    _provenance_ok(json.loads((out / "invariants.csv.provenance.json").read_text()), "invariants")


def test_invariants_mixed_moduli_exit_2(tmp_path):
    code, out = _run(tmp_path, "invariants", generators={"kind": "pair", "g1": "2+z", "g2": "3*z"},
                     domain={"u0": -0.2, "u1": 0.2, "v0": -0.2, "v1": 0.2, "nu": 9, "nv": 9})
    assert code == 2
    rep = json.loads((out / "validity.json").read_text())
    assert rep["any_metric_degenerate"] and rep["failures"]


def test_invariants_r31_columns(tmp_path):
    code, out = _run(tmp_path, "invariants", generators={"kind": "r31", "g": "z"})
    assert code == 0
    assert (out / "invariants.csv").read_text().splitlines()[0] == "u,v,E,nu,valid"


def test_invariants_triple(tmp_path):
    code, out = _run(tmp_path, "invariants", generators={"kind": "triple", "f": "1/(2*sqrt(2))", "g1": "z", "g2": "2*z"})
    assert code == 0
    cols = read_field_csv((out / "invariants.csv").read_text())
    row = np.flatnonzero((cols["u"] == 2.0) & (cols["v"] == 0.0))[0]
    assert abs(cols["E"][row] - 5.625) < 1e-12


def test_verify_reports_order(tmp_path):
    code, out = _run(tmp_path, "verify", verify={"equations": ["natural-kkappa", "gauss", "ricci"], "bound": 1.0})
    assert code == 0
    doc = json.loads((out / "residuals.json").read_text())
    _provenance_ok(doc, "verify")
    fine = [r for r in doc["reports"] if r["h"] < 1 / 16 + 1e-12 and "order_estimate" in r]
    assert fine and all(abs(r["order_estimate"] - 2) < 0.2 for r in fine)


def test_verify_bound_exceeded_exit_3(tmp_path):
    code, _ = _run(tmp_path, "verify", verify={"equations": ["gauss"], "bound": 1e-12})
    assert code == 3


def test_verify_frenet_hyperplane_flag(tmp_path):
    code, out = _run(tmp_path, "verify", generators={"kind": "pair", "g1": "z^2+3", "g2": "z^2+3"},
                     domain={"u0": 1, "u1": 2, "v0": 0, "v1": 1, "nu": 17, "nv": 17}, t0=[1.5, 0.5],
                     verify={"equations": ["frenet"], "bound": 1.0})
    assert code == 0
    doc = json.loads((out / "residuals.json").read_text())
    assert any("mu-identically-zero" in f for r in doc["reports"] for f in r.get("flags", []))


def test_verify_r31(tmp_path):
    code, out = _run(tmp_path, "verify", generators={"kind": "r31", "g": "2*z"}, verify={"bound": 1.0})
    assert code == 0
    doc = json.loads((out / "residuals.json").read_text())
    assert [r["equation_id"] for r in doc["reports"]] == ["r31", "r31"]


def test_build_theta_pair(tmp_path):
    code, out = _run(tmp_path, "build", theta=0.0)
    assert code == 0
    x0 = read_patch_csv((out / "patch.csv").read_bytes())["x"]
    code, out2 = _run(tmp_path, "build", theta=math.pi / 2)
    x1 = read_patch_csv((out2 / "patch.csv").read_bytes())["x"]
    assert not np.allclose(x0, x1)
    doc = read_patch_json((out2 / "patch.json").read_bytes())
    np.testing.assert_array_equal(doc["x"], x1)
    _provenance_ok(json.loads((out2 / "patch_report.json").read_text()), "build")


def test_build_hyperplane_x4_constant(tmp_path):
    code, out = _run(tmp_path, "build", generators={"kind": "pair", "g1": "z^2+3", "g2": "z^2+3"},
                     domain={"u0": 1, "u1": 2, "v0": 0, "v1": 1, "nu": 9, "nv": 9}, t0=[1.5, 0.5])
    assert code == 0
    x = read_patch_csv((out / "patch.csv").read_bytes())["x"]
    assert np.ptp(x[..., 3]) <= 1e-10


@pytest.mark.parametrize("block,expect", [
    ({"kind": "motion", "motion": {"m1": {"a": [1, 0], "b": [0, 0]}, "m2": {"a": [1, 0], "b": [0, 0]}, "swap": False}},
     "invariant"),
    ({"kind": "motion", "motion": {"m1": {"a": [1, 0], "b": [0, 0]}, "m2": {"a": [1, 0], "b": [0, 0]}, "swap": True}},
     "kappa-flipped"),
    ({"kind": "homothety", "k": 4}, "scaled"),
    ({"kind": "associated", "theta": 0.7}, "invariant"),
    ({"kind": "coordinate", "delta": [0, 1], "c": [0.1, 0], "antiholo": True}, "invariant"),
])
def test_transform(tmp_path, block, expect):
    code, out = _run(tmp_path, "transform", transform=block)
    assert code == 0
    doc = json.loads((out / "transform.json").read_text())
    assert doc["comparison"]["law"] == expect
    assert doc["comparison"]["max_rel_error"] <= 1e-10
    assert doc["generators"]["g1"]


def test_correspond(tmp_path):
    code, out = _run(tmp_path, "correspond", correspond={"direction": "to_r42"})
    assert code == 0
    doc = json.loads((out / "correspond.json").read_text())
    assert doc["K_kappa_max_rel_error"] <= 1e-10 and doc["E_max_rel_error"] <= 1e-12
    assert all(3.5 <= r["reduction_ratio"] <= 4.5 for r in doc["r31_residuals"] if "reduction_ratio" in r)
    assert (out / "r31_g1.csv").exists() and (out / "r31_g2.csv").exists()
    code, out = _run(tmp_path, "correspond", correspond={"direction": "from_r42"})
    assert code == 0
    assert json.loads((out / "correspond.json").read_text())["nu_max_rel_error"] <= 1e-10


def test_usage_errors(tmp_path, capsys):
    assert main(["invariants", "--config", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["invariants", "--config", str(bad)]) == 1
    assert _run(tmp_path, "invariants", generators={"kind": "pair", "g1": "z^1.5", "g2": "z"})[0] == 1
    assert _run(tmp_path, "invariants", domain={"u0": 0, "u1": 1, "v0": 0, "v1": 2, "nu": 9, "nv": 9})[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config({"domain": {"u0": 0}})
    with pytest.raises(ConfigError):
        load_config({"domain": {"u0": 0, "u1": 1, "v0": 0, "v1": 1, "nu": 9, "nv": 9},
                     "generators": {"kind": "quad"}})
    cfg = load_config({"domain": {"u0": 0, "u1": 1, "v0": 0, "v1": 1, "h": 0.125},
                       "generators": {"kind": "pair", "g1": "z+2", "g2": "z+3"}})
    assert cfg.grid.nu == 9 and cfg.t0 == 0.5 + 0.5j


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "maxsurf.cli", "invariants", "--config", _job(tmp_path),
                        "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
