"""Command-line interface: dispatch, schemas, determinism, exit codes."""

import json

import pytest

from pbl.cli import run_cli
from pbl.errors import NumericalStall


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cayley_true(capsys):
    code, out, err = run(
        capsys, "cayley", "--sig", "1,1", "--axes", "2,1",
        "--caustics", "0.6666666667", "--n", "4",
    )
    assert code == 0
    assert out.strip() == "true"


def test_cayley_false(capsys):
    code, out, _ = run(
        capsys, "cayley", "--sig", "1,1", "--axes", "2,1",
        "--caustics", "0.5", "--n", "4",
    )
    assert code == 0
    assert out.strip() == "false"


def test_cayley_exact_fraction(capsys):
    code, out, _ = run(
        capsys, "cayley", "--sig", "1,1", "--axes", "2,1",
        "--caustics", "2/3", "--n", "4", "--exact",
    )
    assert code == 0
    assert out.strip() == "true"


def test_caustics_schema(capsys):
    code, out, _ = run(
        capsys, "caustics", "--sig", "2,1", "--axes", "5,3,2",
        "--start", "0.1,0.1,0.1", "--dir", "1,0.2,0.3",
    )
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"caustics", "lineType", "interlacingPassed"}
    assert data["lineType"] == "space-like"
    assert data["interlacingPassed"] is True
    assert data["caustics"] == pytest.approx([-2.6489572230170335, 3.068536170385456])


def test_classify_point(capsys):
    code, out, _ = run(
        capsys, "classify-point", "--sig", "2,1", "--axes", "5,3,2",
        "--point", "0,0,0", "--lambda0", "-2",
    )
    assert code == 0
    data = json.loads(out)
    assert data["coordinates"] == pytest.approx([-2.0, 3.0, 5.0])
    assert data["complexPair"] is None
    assert data["type"] == "E"


def test_decorate(capsys):
    code, out, _ = run(
        capsys, "decorate", "--sig", "2,1", "--axes", "5,3,2", "--point", "0,0,0",
    )
    assert code == 0
    data = json.loads(out)
    assert [c["type"] for c in data["coordinates"]] == ["E", "H^1", "H^2"]
    assert [c["lambda"] for c in data["coordinates"]] == pytest.approx([-2.0, 3.0, 5.0])


def test_search_periodic(capsys):
    code, out, _ = run(
        capsys, "search-periodic", "--sig", "1,1", "--axes", "2,1", "--n", "4",
    )
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 4
    assert data["caustics"] == pytest.approx([-2.0, -2.0 / 3.0, 2.0 / 3.0], abs=1e-9)


def test_lightlike(capsys):
    code, out, _ = run(capsys, "lightlike", "--axes", "3,1")
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 6 and data["k"] == 2
    assert data["rectangleRatio"] == pytest.approx(0.5)


def test_trace_verify_round_trip(tmp_path, capsys):
    out_file = tmp_path / "traj.json"
    code, _, _ = run(
        capsys, "trace", "--sig", "2,1", "--axes", "5,3,2",
        "--start", "0.1,0.2,0.1", "--dir", "1,0.4,-0.3",
        "--bounces", "40", "--out", str(out_file),
    )
    assert code == 0
    data = json.loads(out_file.read_text())
    assert len(data["bounces"]) == 40
    code, out, _ = run(capsys, "verify", str(out_file))
    assert code == 0
    report = json.loads(out)
    assert report["driftMatches"] is True
    assert report["driftRecorded"] == report["driftRecomputed"]


def test_verify_detects_tampering(tmp_path, capsys):
    out_file = tmp_path / "traj.json"
    run(
        capsys, "trace", "--sig", "1,1", "--axes", "2,1",
        "--start", "0.1,0.2", "--dir", "1,0.3",
        "--bounces", "10", "--out", str(out_file),
    )
    data = json.loads(out_file.read_text())
    data["bounces"][4]["p"][0] += 1e-3
    out_file.write_text(json.dumps(data))
    code, out, err = run(capsys, "verify", str(out_file))
    assert code == 2


def test_trace_deterministic(tmp_path, capsys):
    f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
    args = [
        "trace", "--sig", "2,1", "--axes", "5,3,2",
        "--start", "0.1,0.2,0.1", "--dir", "1,0.4,-0.3", "--bounces", "25",
    ]
    assert run(capsys, *args, "--out", str(f1))[0] == 0
    assert run(capsys, *args, "--out", str(f2))[0] == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_tropic_csv(tmp_path, capsys):
    out_file = tmp_path / "surf.csv"
    code, _, _ = run(
        capsys, "tropic", "--axes", "5,3,2", "--grid", "12x10", "--out", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "sheet,lambda,t,x,y,z"
    assert len(lines) == 1 + 2 * 12 * 10
    # spot check: every row satisfies the pencil equation of its lambda
    for row in lines[1:20]:
        sheet, lam, t, x, y, z = row.split(",")
        lam, x, y, z = float(lam), float(x), float(y), float(z)
        q = x * x / (5.0 - lam) + y * y / (3.0 - lam) + z * z / (2.0 + lam)
        assert q == pytest.approx(1.0, abs=1e-10)


def test_poncelet_cli(capsys):
    code, out, _ = run(
        capsys, "poncelet", "--sig", "1,1", "--axes", "2,1",
        "--caustics", "0.6666666666666666", "--n", "4", "--samples", "5",
    )
    assert code == 0
    data = json.loads(out)
    assert data["condition"] is True and data["closed"] == 5
    assert data["worstPositionError"] <= 1e-6


def test_exit_code_validation_error(capsys):
    # poncelet on a non-periodic caustic violates its precondition
    code, out, err = run(
        capsys, "poncelet", "--sig", "1,1", "--axes", "2,1",
        "--caustics", "0.5", "--n", "4", "--samples", "3",
    )
    assert code == 2
    assert "error:" in err


def test_exit_code_bad_input(capsys):
    code, _, err = run(
        capsys, "caustics", "--sig", "2,1", "--axes", "5,3,2",
        "--start", "10,10,0", "--dir", "0,0,1",
    )
    assert code == 2
    assert "error:" in err


def test_exit_code_numerical(monkeypatch, capsys):
    import pbl.cli as cli

    def boom(args):
        raise NumericalStall("forced")

    monkeypatch.setattr(cli, "_cmd_cayley", boom)
    # rebuild the parser so the monkeypatched handler is picked up
    code = cli.run_cli(
        ["cayley", "--sig", "1,1", "--axes", "2,1", "--caustics", "0.5", "--n", "4"]
    )
    err = capsys.readouterr().err
    assert code == 3
    assert "numerical failure:" in err
