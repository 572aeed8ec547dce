import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qchancoh.cli import Task, alpha_grid, evaluate, main
from qchancoh.quantum import random_channel, save_channel
from qchancoh.zoo import reference_value


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def value_of(text, measure="C"):
    for line in text.splitlines():
        if line.startswith(measure + ":"):
            return float(line.split()[1])
    raise AssertionError(text)


def test_compute_phase_flip(capsys):
    code, out, _ = run(capsys, "compute", "--channel", "phase-flip", "--param", "0",
                       "--alpha", "0.5", "--z", "1", "--measure", "C")
    assert code == 0
    assert value_of(out) == pytest.approx(1.0, abs=1e-12)
    gap = float(out.split("|gap| = ")[1].split()[0])
    assert gap < 1e-9
    assert "method: ClosedFormZ1" in out and "certificate:" in out


def test_compute_dephasing_z_ne_1(capsys):
    code, out, _ = run(capsys, "compute", "--channel", "dephasing", "--alpha", "0.7", "--z", "0.7")
    assert code == 0 and abs(value_of(out)) < 1e-12


def test_compute_hadamard_ctilde(capsys):
    code, out, _ = run(capsys, "compute", "--channel", "hadamard", "--alpha", "0.5", "--measure", "Ctilde")
    assert code == 0 and value_of(out, "Ctilde") == pytest.approx(1.0, abs=1e-9)


def test_compute_both_and_limit(capsys):
    code, out, _ = run(capsys, "compute", "--channel", "amplitude-damping", "--param", "0.3",
                       "--alpha", "1", "--measure", "both")
    assert code == 0
    assert value_of(out, "C") == pytest.approx(reference_value("amplitude-damping", 0.3, 1.0), abs=1e-12)
    assert abs(value_of(out, "Ctilde")) < 1e-9


def test_json_channel(tmp_path, capsys):
    path = tmp_path / "ch.json"
    save_channel(random_channel(2, np.random.default_rng(0), n_kraus=2), path)
    code, out, _ = run(capsys, "compute", "--channel", str(path), "--alpha", "1.5", "--z", "1.5")
    assert code == 0 and value_of(out) > 0


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "compute", "--channel", "hadamard", "--alpha", "3")[0] == 3
    assert run(capsys, "compute", "--channel", "hadamard", "--alpha", "3", "--allow-outside-regime")[0] == 0
    assert run(capsys, "compute", "--channel", "phase-flip", "--param", "2", "--alpha", "0.5")[0] == 2
    assert run(capsys, "compute", "--channel", "no-such", "--alpha", "0.5")[0] == 2
    assert run(capsys, "compute", "--channel", "hadamard")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"input_dim": 2, "output_dim": 2, "kraus": [[[[2, 0], [0, 0]], [[0, 0], [1, 0]]]]}))
    code, _, err = run(capsys, "compute", "--channel", str(bad), "--alpha", "0.5")
    assert code == 2 and "residual" in err
    code = run(capsys, "sweep", "--channel", "depolarizing", "--param-range", "0", "1", "3",
               "--alpha", "0.5", "--out", str(tmp_path / "missing" / "x.csv"))[0]
    assert code == 2


def test_alpha_grid_puncture():
    g = alpha_grid(0, 2, 40)
    assert len(g) == 40 and g[0] == pytest.approx(0.05) and 1.0 in g
    assert all(abs(a - 1) >= 1e-3 or a == 1.0 for a in g)
    g = alpha_grid(0.9995, 1.5, 3)
    assert g[0] == 1.0 and 0.9995 not in g
    assert 1.0 not in alpha_grid(1.2, 1.8, 4)


def _sweep(tmp_path, capsys, *extra, name="out.csv"):
    out = tmp_path / name
    code, _, _ = run(capsys, "sweep", *extra, "--out", str(out))
    assert code == 0
    return out


def test_sweep_fig1_surface(tmp_path, capsys):
    out = _sweep(tmp_path, capsys, "--channel", "phase-flip", "--param-range", "0", "1", "51",
                 "--alpha-range", "0", "2", "40")
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["param", "alpha", "measure", "value", "method"]
    assert len(rows) == 51 * 40
    spot = [r for r in rows if float(r["param"]) == 0 and float(r["alpha"]) == 0.5]
    assert float(spot[0]["value"]) == pytest.approx(1.0, abs=1e-12)
    keys = [(float(r["param"]), float(r["alpha"])) for r in rows]
    assert keys == sorted(keys)
    assert any(r["alpha"] == "1" for r in rows)


def test_sweep_fig4_and_depolarizing(tmp_path, capsys):
    out = _sweep(tmp_path, capsys, "--channel", "isotropic-hadamard", "--param-range", str(-1 / 3), "1", "51",
                 "--alpha", "0.5", "--measure", "both", "--workers", "2")
    for r in csv.DictReader(out.open()):
        if r["measure"] == "Ctilde":
            t = float(r["param"])
            assert float(r["value"]) == pytest.approx(1 - math.sqrt(1 - t * t), abs=1e-5)
    out = _sweep(tmp_path, capsys, "--channel", "depolarizing", "--param-range", "0", "1", "6",
                 "--alpha-range", "0.5", "1.5", "3", "--measure", "Ctilde", name="d.csv")
    assert all(abs(float(r["value"])) < 1e-9 for r in csv.DictReader(out.open()))


def test_sweep_deterministic_and_reproducible(tmp_path, capsys):
    args = ("--channel", "amplitude-damping", "--param-range", "0", "1", "4",
            "--alpha-range", "0.6", "1.4", "3", "--z", "1", "--measure", "both")
    a = _sweep(tmp_path, capsys, *args, "--workers", "3", name="a.csv").read_bytes()
    b = _sweep(tmp_path, capsys, *args, "--workers", "1", name="b.csv").read_bytes()
    assert a == b
    for r in list(csv.DictReader(a.decode().splitlines()))[:6]:
        t = Task("amplitude-damping", float(r["param"]), float(r["alpha"]), 1.0, r["measure"])
        assert repr(evaluate(t).value) == repr(float(r["value"]))


def test_sweep_json(tmp_path, capsys):
    out = _sweep(tmp_path, capsys, "--channel", "s-gate", "--alpha", "0.5", "--format", "json", name="s.json")
    recs = json.loads(out.read_text())
    assert recs == [{"param": None, "alpha": 0.5, "measure": "C", "value": pytest.approx(1.0), "method": "ClosedFormZ1"}]


def test_sweep_rejects_outside_regime(tmp_path, capsys):
    code = run(capsys, "sweep", "--channel", "phase-flip", "--param-range", "0", "1", "3",
               "--alpha-range", "0.5", "3", "4", "--out", str(tmp_path / "x.csv"))[0]
    assert code == 3


def test_verify_table1_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "table1", "--quick")
    assert code == 0 and "[FAIL]" not in out and "amplitude-damping" in out


def test_entry_point_subprocess():
    r = subprocess.run([sys.executable, "-m", "qchancoh.cli", "compute", "--channel", "s-gate", "--alpha", "0.5"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "C: 1" in r.stdout
