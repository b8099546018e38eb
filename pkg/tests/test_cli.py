import csv
import json

import numpy as np
import pytest

from qrframes import cli, spin


def run(argv, capsys=None):
    code = cli.main(argv)
    out = capsys.readouterr().out if capsys else ""
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_bloch_outputs(tmp_path):
    assert cli.main(["bloch", "--beta", "90", "--grid", "3", "--out", str(tmp_path)]) == 0
    affine = json.loads((tmp_path / "affine.json").read_text())
    assert affine["det_a"] == pytest.approx(2 / 9, abs=1e-12)
    assert len(affine["A"]) == 9
    rows = read_csv(tmp_path / "image.csv")
    assert rows[0] == ["theta_deg", "phi_deg", "Rx", "Ry", "Rz"] and len(rows) == 10
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "bloch" and len(manifest["config_hash"]) == 64


def test_bloch_aligned_and_grid_two(tmp_path):
    assert cli.main(["bloch", "--beta", "0", "--grid", "2", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "image.csv")[1:]
    assert len(rows) == 4
    assert all(float(r[2]) == 0 and float(r[3]) == 0 for r in rows)


def test_csv_format(tmp_path):
    cli.main(["bloch", "--grid", "4", "--out", str(tmp_path)])
    raw = (tmp_path / "image.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    for row in read_csv(tmp_path / "image.csv")[1:]:
        for cell in row:
            assert len(cell.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 12


def test_neg_values(tmp_path, capsys):
    code, out = run(["neg", "--out", str(tmp_path / "a")], capsys)
    assert code == 0 and "fraction of singlet" in out
    rep = json.loads((tmp_path / "a" / "neg.json").read_text())
    assert rep["singlet_fraction"] == pytest.approx(0.23570, abs=1e-5)
    assert rep["total_negativity"] == pytest.approx(0.23570 / 2, abs=1e-5)
    cli.main(["neg", "--beta", "0", "--out", str(tmp_path / "b")])
    assert json.loads((tmp_path / "b" / "neg.json").read_text())["total_negativity"] == 0
    cli.main(["neg", "--beta", "83", "--both", "--out", str(tmp_path / "c")])
    assert json.loads((tmp_path / "c" / "neg.json").read_text())["singlet_fraction"] == pytest.approx(0.07, abs=0.005)


def test_rerun_is_byte_identical(tmp_path):
    argv = ["opt", "neg", "--product-only", "--grid", "beta:0:180:19"]
    cli.main(argv + ["--out", str(tmp_path / "x")])
    cli.main(argv + ["--out", str(tmp_path / "y")])
    for name in ("optimum.json", "trace.csv", "grid.csv"):
        assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()
    mx = json.loads((tmp_path / "x" / "manifest.json").read_text())
    my = json.loads((tmp_path / "y" / "manifest.json").read_text())
    assert mx["config_hash"] == my["config_hash"] and mx["config"] == my["config"]


def test_default_out_dir_uses_hash(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.main(["pythagoras", "--L", "0.5"]) == 0
    (d,) = (tmp_path / "runs").iterdir()
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["config_hash"].startswith(d.name)
    rows = read_csv(d / "pythagoras.csv")
    assert rows[0] == ["J", "J_over_L", "p"] and len(rows) == 3
    assert sum(float(r[2]) for r in rows[1:]) == pytest.approx(1.0)


def test_pythagoras_seventeen(tmp_path):
    cli.main(["pythagoras", "--L", "17", "--out", str(tmp_path)])
    rows = read_csv(tmp_path / "pythagoras.csv")[1:]
    assert float(max(rows, key=lambda r: float(r[2]))[0]) == 24


def test_opt_volume(tmp_path):
    assert cli.main(["opt", "volume", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "optimum.json").read_text())
    assert res["best_value"] == pytest.approx(64 / 243, abs=1e-6)
    assert res["radius"] == pytest.approx(0.641, abs=1e-3)


def test_opt_both(tmp_path):
    assert cli.main(["opt", "neg", "--both", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "optimum.json").read_text())
    assert res["best_value"] == pytest.approx(0.07, abs=0.005)
    assert abs(res["best_params_deg"]["beta"] - 83) <= 2


def test_classical_small(tmp_path):
    assert cli.main(["classical", "--lmax", "1", "--steps", "61", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "classical.csv")
    assert rows[0] == ["L", "beta_opt_deg", "n_max", "fraction"]
    assert float(rows[1][1]) < 90 < float(rows[2][1])


def test_verify_passes_and_is_deterministic(tmp_path, capsys):
    code1, out1 = run(["verify", "--out", str(tmp_path / "a")], capsys)
    code2, out2 = run(["verify", "--out", str(tmp_path / "b")], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    assert (tmp_path / "a" / "report.txt").read_bytes() == (tmp_path / "b" / "report.txt").read_bytes()


def test_verify_catches_tampered_cg_sign(tmp_path, monkeypatch, capsys):
    original = spin._cg_blocks

    def tampered(two_j1, two_j2):
        blocks = [(tJ, C.copy()) for tJ, C in original(two_j1, two_j2)]
        tJ, C = blocks[-1]
        idx = tuple(np.argwhere(C)[0])
        C[idx] = -C[idx]
        return tuple(blocks)

    monkeypatch.setattr(spin, "_cg_blocks", tampered)
    spin.clear_caches()
    try:
        code, _ = run(["verify", "--out", str(tmp_path)], capsys)
        assert code == 1
        assert "FAIL" in (tmp_path / "report.txt").read_text()
    finally:
        monkeypatch.undo()
        spin.clear_caches()


def test_argument_and_io_errors(tmp_path, capsys):
    assert cli.main(["opt", "neg", "--grid", "beta:0:180"]) == 2
    assert cli.main(["opt", "volume", "--free-gamma", "--out", str(tmp_path)]) == 2
    assert cli.main(["nonsense"]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["bloch", "--out", str(blocker / "sub")]) == 2
    assert cli.main(["neg", "--beta", "200", "--out", str(tmp_path / "n")]) == 2


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("QRF_THREADS", "2")
    assert cli.main(["opt", "neg", "--product-only", "--grid", "beta:0:180:10", "--out", str(tmp_path)]) == 0
    monkeypatch.setenv("QRF_THREADS", "zero")
    assert cli.main(["opt", "neg", "--product-only", "--out", str(tmp_path)]) == 2
