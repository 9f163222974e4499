import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from condspec import cli, frobenius, variational


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_truncate_n2(capsys):
    code, out, _ = run(capsys, "truncate", "--gamma", "0", "--n", "2", "--b", "1")
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "i", "root", "w"]
    roots = [float(r[2]) for r in table[1:]]
    np.testing.assert_allclose(roots, [-1.940551663, 1.190016441, 5.250535221], atol=1e-8)
    assert all(float(r[3]) == 5.75 for r in table[1:])


def test_truncate_n1(capsys):
    _, out, _ = run(capsys, "truncate", "--n", "1", "--b", "1")
    parsed = [(int(n), int(i), float(r), float(w)) for n, i, r, w in rows(out)[1:]]
    assert parsed == [(1, 1, -0.5, 3.75), (1, 2, 2.5, 3.75)]


def test_truncate_b_roots(capsys):
    code, out, _ = run(capsys, "truncate", "--n", "1", "--a", "2.5")
    assert code == 0
    assert any(abs(float(r[2]) - 1) < 1e-11 for r in rows(out)[1:])


def test_truncate_rejects_n0(capsys):
    code, _, err = run(capsys, "truncate", "--n", "0", "--b", "1")
    assert code == 1
    assert "n must be a positive integer" in err


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "truncate", "--n", "2")[0] == 1
    for argv in (["truncate", "--n", "x", "--b", "1"], ["bogus"]):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 1


def test_csv_is_byte_stable(tmp_path):
    paths = [tmp_path / f"t{k}.csv" for k in range(2)]
    for p in paths:
        cli.main(["truncate", "--gamma", "0.5", "--n", "4", "--b", "-1.3", "-o", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"\r" not in paths[0].read_bytes()


def test_spectrum_off_curve(capsys):
    code, out, _ = run(capsys, "spectrum", "--gamma", "0", "--a", "2", "--b", "1", "--count", "5")
    assert code == 0
    data = json.loads(out)
    assert data["method"] == "rayleigh-ritz"
    assert all(isinstance(w, str) for w in data["eigenvalues"])
    np.testing.assert_allclose(
        [float(w) for w in data["eigenvalues"]],
        [-3.230518994, 4.510929109, 9.532275968, 14.19728140, 18.70978427],
        atol=1e-6,
    )
    assert data["converged_digits"] > 6


def test_spectrum_oscillator_and_third_root(capsys):
    _, out, _ = run(capsys, "spectrum", "--a", "0", "--b", "0", "--count", "3")
    np.testing.assert_allclose([float(w) for w in json.loads(out)["eigenvalues"]], [2, 6, 10], atol=1e-8)
    _, out, _ = run(capsys, "spectrum", "--a", "5.250535221", "--b", "1", "--count", "4")
    assert float(json.loads(out)["eigenvalues"][2]) == pytest.approx(5.75, abs=1e-6)


def test_spectrum_double_guard(capsys):
    code, _, err = run(capsys, "spectrum", "--a", "2", "--b", "1", "--precision", "double", "--basis-size", "30")
    assert code == 2
    assert "--precision extended" in err


def test_spectrum_double_numbers(capsys):
    code, out, _ = run(capsys, "spectrum", "--a", "2", "--b", "1", "--count", "2", "--precision", "double", "--basis-size", "10")
    assert code == 0
    assert all(isinstance(w, float) for w in json.loads(out)["eigenvalues"])


def test_sweep_curves_and_overlay(tmp_path, capsys):
    curves, overlay = tmp_path / "c.csv", tmp_path / "o.csv"
    argv = ["sweep", "--gamma", "0", "--b", "1", "--a-min", "-2", "--a-max", "14", "--steps", "160",
            "--nu-max", "8", "--n-max", "8", "--curves", str(curves), "--overlay", str(overlay)]
    code, _, err = run(capsys, *argv)
    assert code == 0 and err == ""
    crows = rows(curves.read_text())[1:]
    orows = rows(overlay.read_text())[1:]
    assert rows(curves.read_text())[0] == ["a", "nu", "w"]
    curve = {}
    for a, nu, w in crows:
        curve.setdefault(int(nu), []).append((float(a), float(w)))
    for nu, pts in curve.items():
        assert pts == sorted(pts)
    for n, i, a_root, w in orows:
        a_root, w = float(a_root), float(w)
        a_vals, w_vals = zip(*curve[int(i) - 1])
        assert abs(np.interp(a_root, a_vals, w_vals) - w) < 1e-6
        assert w == (8 * (int(n) + 1) - 1) / 4
    line = [float(w) for n, _, _, w in orows if n == "8"]
    assert line and all(w == 17.75 for w in line)


def test_sweep_two_steps(tmp_path, capsys):
    curves, overlay = tmp_path / "c.csv", tmp_path / "o.csv"
    code, _, _ = run(capsys, "sweep", "--b", "1", "--a-min", "0", "--a-max", "1", "--steps", "2",
                     "--nu-max", "2", "--n-max", "1", "--curves", str(curves), "--overlay", str(overlay))
    assert code == 0
    body = rows(curves.read_text())[1:]
    # the n = 1 root a = 2.5 lies outside [0, 1] and is dropped; no overlay point is merged
    assert len(body) == 3 * 2
    assert rows(overlay.read_text()) == [["n", "i", "a_root", "w"]]


def test_sweep_rejects_bad_range(capsys):
    assert run(capsys, "sweep", "--b", "1", "--a-min", "2", "--a-max", "1")[0] == 1
    assert run(capsys, "sweep", "--b", "1", "--a-min", "0", "--a-max", "1", "--steps", "1")[0] == 1


def test_map(capsys):
    code, out, _ = run(capsys, "map", "--m", "1", "--omega", "1", "--kappa", "4", "--a1", "0", "--l", "1", "--s", "1")
    data = json.loads(out)
    assert code == 0
    assert data["gamma"] == 1.0
    assert data["a"] == pytest.approx(1.261345, abs=1e-6)
    assert data["b"] == pytest.approx(2.378414, abs=1e-6)


def test_map_attractive_singularity(capsys):
    code, _, err = run(capsys, "map", "--m", "1", "--omega", "1", "--kappa", "1", "--a1", "-1")
    assert code == 2
    assert "AttractiveSingularity" in err


def test_map_conflicting_couplings(capsys):
    assert run(capsys, "map", "--m", "1", "--omega", "1", "--kappa", "1", "--g-factor", "2")[0] == 1


def test_allowed_omega(capsys):
    code, out, _ = run(capsys, "allowed-omega", "--m", "1", "--kappa", "8", "--l", "0", "--s", "1", "--n", "1", "--range", "0.1:10")
    assert code == 0
    (root,) = json.loads(out)["roots"]
    assert abs(root["omega"] - 1.490) < 5e-4
    assert abs(root["residual"]) < 1e-10
    comp = root["companion"]
    assert comp["omega"] == pytest.approx(1.05 * root["omega"])
    assert len(comp["eigenvalues"]) >= 3 and np.all(np.diff(comp["eigenvalues"]) > 0)


@pytest.mark.parametrize("rng", ["0:10", "5:1", "abc"])
def test_allowed_omega_bad_range(capsys, rng):
    assert run(capsys, "allowed-omega", "--m", "1", "--kappa", "8", "--n", "1", "--range", rng)[0] == 1


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 0
    assert out.count("PASS") == 5


def test_verify_catches_flipped_truncation_sign(capsys, monkeypatch):
    flipped = frobenius.truncation_w
    monkeypatch.setattr(frobenius, "truncation_w", lambda g, n, b: (8 * (g + n + 1) + b * b) / 4)
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 3
    assert "FAIL  truncation-roots-n2" in out
    monkeypatch.setattr(frobenius, "truncation_w", flipped)


def test_verify_catches_flipped_coulomb_sign(capsys, monkeypatch):
    solve = variational._solve
    monkeypatch.setattr(variational, "_solve", lambda frame, a, b, count: solve(frame, -a, b, count))
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 3
    assert "FAIL  reference-list-off-curve" in out


def test_module_entry_point_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "condspec", "truncate", "--n", "1", "--b", "0"], capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout.startswith("n,i,root,w\n")
    bad = subprocess.run([sys.executable, "-m", "condspec", "truncate"], capture_output=True, text=True)
    assert bad.returncode == 1
