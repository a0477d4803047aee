import json

import pytest

from djlong.cli import EXIT_FAILED, EXIT_INVALID, EXIT_IO, EXIT_OK, main, resolve_seed


def solve(out, *extra):
    return main(["solve", "--beta", "-0.5", "--out", str(out), *extra])


def test_solve_is_byte_identical(tmp_path):
    assert solve(tmp_path / "a") == EXIT_OK
    assert solve(tmp_path / "b") == EXIT_OK
    for name in ("bundle.json", "profile.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_solve_then_verify(tmp_path, capsys):
    assert solve(tmp_path) == EXIT_OK
    assert main(["verify", str(tmp_path / "bundle.json")]) == EXIT_OK
    report = json.loads((tmp_path / "bundle.verify.json").read_text())
    assert report["passed"] is True
    assert "verification passed" in capsys.readouterr().out


def test_verify_flags_corrupted_profile(tmp_path, capsys):
    assert solve(tmp_path) == EXIT_OK
    path = tmp_path / "bundle.json"
    data = json.loads(path.read_text())
    data["w"] = [v * 1.05 for v in data["w"]]
    path.write_text(json.dumps(data))
    assert main(["verify", str(path)]) == EXIT_FAILED
    assert "diagnostics_reproduced" in capsys.readouterr().out


def test_verify_io_errors(tmp_path):
    assert main(["verify", str(tmp_path / "missing.json")]) == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert main(["verify", str(bad)]) == EXIT_IO


@pytest.mark.parametrize("argv", [
    ["solve", "--beta", "-1.5", "--c2", "0.5"],
    ["solve", "--beta", "0"],
    ["solve", "--beta", "0.5", "--c1", "1", "--C1", "1"],
    ["solve", "--beta", "0.5", "--eps-schedule", "1:1e-3:0.1"],
    ["solve"],
    ["sweep", "--mode", "regular", "--beta-list", ""],
    ["reference", "--kind", "nonsense"],
])
def test_invalid_input_exit_code(argv, tmp_path):
    assert main([*argv, "--out", str(tmp_path)]) == EXIT_INVALID


def test_seed_fallback(monkeypatch):
    monkeypatch.setenv("DJLONG_SEED", "17")
    assert resolve_seed(None) == 17
    assert resolve_seed(4) == 4
    monkeypatch.delenv("DJLONG_SEED")
    assert resolve_seed(None) == 0


def test_regular_solve_with_physical_constants(tmp_path):
    assert main(["solve", "--beta", "1.5", "--C1", "-1", "--C2", "0.5", "--grid-n", "512",
                 "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "bundle.json").read_text())
    assert data["kind"] == "regular" and data["params"]["C1"] == -1.0


def test_continuation_solver_with_random_init(tmp_path):
    assert main(["solve", "--beta", "-0.5", "--c2", "1", "--init", "random",
                 "--seed", "5", "--out", str(tmp_path)]) == EXIT_OK
    assert main(["verify", str(tmp_path / "bundle.json")]) == EXIT_OK


def test_sweep_singular_range(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "--mode", "singular", "--beta-range", "-1.5:-0.3:0.6", "--jobs", "2",
                 "--out", str(out)]) == EXIT_OK
    rows = (out / "summary.csv").read_text().splitlines()
    assert rows[0].startswith("beta,status")
    assert len(rows) == 4
    assert all((out / f"beta={b:.6f}" / "bundle.json").exists() for b in (-1.5, -0.9, -0.3))


def test_sweep_records_failed_points(tmp_path):
    assert main(["sweep", "--mode", "singular", "--beta-list", "-1,-0.5",
                 "--out", str(tmp_path)]) == EXIT_FAILED
    assert "failed" in (tmp_path / "summary.csv").read_text()


def test_sweep_desing(tmp_path):
    assert main(["sweep", "--mode", "desing", "--beta-list", "0.5,0.3,0.2", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "summary.csv").exists()


@pytest.mark.parametrize("kind", ["irrotational", "sheet", "static", "clm", "gclm-half", "burgers", "emden", "green"])
def test_reference_kinds(kind, tmp_path):
    extra = ["--quad-n", "128"] if kind == "sheet" else []
    assert main(["reference", "--kind", kind, *extra, "--out", str(tmp_path)]) == EXIT_OK
    assert json.loads((tmp_path / "report.json").read_text())["passed"] is True


def test_export(tmp_path):
    assert solve(tmp_path) == EXIT_OK
    before = (tmp_path / "bundle.json").read_bytes()
    out = tmp_path / "export"
    assert main(["export", str(tmp_path / "bundle.json"), "--what", "bundle,profile,field,streamlines",
                 "--n", "64", "--out", str(out)]) == EXIT_OK
    assert (out / "bundle.json").read_bytes() == before
    assert (out / "field.csv").read_text().startswith("r,phi,x1,x2,u1,u2,p,rho,omega,Pi\n")
    assert (out / "streamlines.csv").exists()
