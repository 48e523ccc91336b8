import csv
import json

import pytest

from dkcalc import cli


def run(tmp_path, *argv, name="report.json"):
    out = tmp_path / name
    code = cli.main(list(argv) + ["--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_config_defaults_validate():
    cfg = cli.RunConfig().validate()
    assert cfg.lattice == (3, 3, 3, 3) and cfg.tol == 1e-12


@pytest.mark.parametrize("kwargs", [
    {"tol": 0.0}, {"tol": -1.0}, {"tol": float("nan")}, {"seed": -1}, {"seed": 2 ** 64},
    {"lattice": (2, 2, 2)}, {"lattice": (2, 0, 2, 2)}, {"boundary": "open"}, {"trials": 0},
])
def test_config_rejects(kwargs):
    with pytest.raises(cli.UsageError):
        cli.RunConfig(**kwargs).validate()


def test_unknown_config_field(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lattice": [2, 2, 2, 2], "colour": "red"}))
    assert cli.main(["verify", "--config", str(cfg)]) == cli.EXIT_USAGE
    assert "colour" in capsys.readouterr().err


def test_tol_zero_is_usage_error(tmp_path):
    code, report = run(tmp_path, "verify", "--tol", "0")
    assert code == cli.EXIT_USAGE and report is None


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lattice": [3, 3, 3, 3], "seed": 1}))
    code, report = run(tmp_path, "spectrum", "--config", str(cfg), "--lattice", "1,1,1,1")
    assert code == cli.EXIT_OK
    assert report["config"]["lattice"] == [1, 1, 1, 1] and report["config"]["seed"] == 1


def test_spectrum_csv(tmp_path):
    path = tmp_path / "s.csv"
    code, report = run(tmp_path, "spectrum", "--lattice", "2,2,2,2", "--csv", str(path))
    assert code == cli.EXIT_OK and report["n_eigenvalues"] == 256
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["index", "re", "im"] and len(rows) == 257


def test_spectrum_single_site_is_zero(tmp_path):
    path = tmp_path / "s.csv"
    code, _ = run(tmp_path, "spectrum", "--lattice", "1,1,1,1", "--csv", str(path))
    rows = list(csv.reader(path.open()))[1:]
    assert code == cli.EXIT_OK and len(rows) == 16
    assert all(float(r[1]) == 0 and float(r[2]) == 0 for r in rows)


@pytest.mark.parametrize("argv", [
    ["spectrum", "--lattice", "4,3,3,3"],
    ["spectrum", "--lattice", "2,2,2,2", "--boundary", "ghost"],
    ["chirality", "--lattice", "1,1,1,1", "--mass", "-1"],
])
def test_usage_errors(tmp_path, argv):
    code, _ = run(tmp_path, *argv)
    assert code == cli.EXIT_USAGE


def test_chirality_small(tmp_path):
    code, report = run(tmp_path, "chirality", "--lattice", "1,1,1,1", "--mass", "1.0")
    assert code == cli.EXIT_OK
    ids = [c["id"] for c in report["checks"]]
    assert "chiral_invariance.kernel" in ids and report["kernel_dimension"] == 16


def test_verify_report_shape_and_determinism(tmp_path):
    argv = ["verify", "--lattice", "2,2,2,2", "--trials", "2", "--seed", "7"]
    code1, r1 = run(tmp_path, *argv)
    code2, r2 = run(tmp_path, *argv)
    assert code1 == code2
    assert cli.dumps_report(cli.strip_runtime(r1)) == cli.dumps_report(cli.strip_runtime(r2))
    first = r1["checks"][0]
    assert set(first) == {"id", "ref", "status", "residual", "tolerance", "runtime_ms"}
    assert [c["id"] for c in r1["checks"]] == sorted(c["id"] for c in r1["checks"])
    failed = [c["id"] for c in r1["checks"] if c["status"] == "fail"]
    # forward differences are not skew-adjoint on a periodic lattice
    assert failed == ["calculus.green_periodic_adjoint"] and code1 == cli.EXIT_FAIL


def test_seed_changes_residuals(tmp_path):
    _, a = run(tmp_path, "verify", "--lattice", "2,2,2,2", "--trials", "2", "--seed", "1", name="a.json")
    _, b = run(tmp_path, "verify", "--lattice", "2,2,2,2", "--trials", "2", "--seed", "2", name="b.json")
    assert cli.strip_runtime(a)["checks"] != cli.strip_runtime(b)["checks"]


def test_dump_formats_floats():
    text = cli.dumps_report({"x": 0.1, "y": float("inf"), "z": [1, True, None]})
    data = json.loads(text)
    assert data == {"x": 0.1, "y": None, "z": [1, True, None]}
    assert "0.10000000000000001" in text
