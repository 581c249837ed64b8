import json
from pathlib import Path

import pytest

from apollonius import classification
from apollonius.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main

DOCS = Path(__file__).resolve().parent.parent / "docs"
ONE = str(DOCS / "scenario_1v1.yaml")
MPSE = str(DOCS / "scenario_mpse.yaml")
MPME = str(DOCS / "scenario_mpme.yaml")


def stderr_json(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_validate(capsys):
    assert main(["validate", MPME]) == EXIT_OK
    assert "10 pursuer(s), 5 evader(s)" in capsys.readouterr().out


def test_run_1v1(tmp_path, capsys):
    assert main(["run", ONE, "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "trace.csv").is_file() and (tmp_path / "events.jsonl").is_file()
    out = capsys.readouterr().out
    assert "E1: captured at t=2.25" in out and "{P1}" in out


def test_run_a1_violation(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(Path(ONE).read_text().replace("speed: 0.6", "speed: 1.5"))
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == EXIT_FAIL
    err = stderr_json(capsys)
    assert err["error"] == "InvalidScenario" and "A1 violated" in err["message"]


def test_missing_file_is_io_error(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.yaml")]) == EXIT_IO
    assert stderr_json(capsys)["error"] == "FileNotFoundError"


def test_run_max_time(tmp_path, capsys):
    assert main(["run", ONE, "--max-time", "0.5", "--out", str(tmp_path)]) == EXIT_FAIL
    assert stderr_json(capsys)["error"] == "MaxTimeExceeded"
    assert (tmp_path / "trace.csv").is_file()


def test_run_overrides_and_batch(tmp_path, capsys):
    assert main(["run", MPSE, "--dt", "0.01", "--seeds", "0..2", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    for s in range(3):
        assert f"[seed {s}]" in out
        assert (tmp_path / f"seed_{s}" / "trace.csv").is_file()


@pytest.mark.parametrize("argv", [
    ["oracle", MPSE, "--n-headings", "3"],
    ["oracle", MPSE, "--n-headings", "many"],
    ["run", ONE, "--dt", "-1"],
    ["run", ONE, "--seeds", "5..2"],
    ["explode", ONE],
    [],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_oracle_worked_example(tmp_path, capsys):
    assert main(["oracle", MPSE, "--n-headings", "72", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "E1: active=['P1'] winners=['P1'] [ok]" in out
    records = [json.loads(line) for line in (tmp_path / "oracle.jsonl").read_text().splitlines()]
    assert {"OracleSample", "OracleVerdict", "CstSlope", "CstVerdict"} <= {r["kind"] for r in records}


def test_oracle_catches_corrupted_classifier(tmp_path, capsys, monkeypatch):
    def broken(snapshot, tol=1e-9):
        # drop the nearest pursuer: it wins headings but is now called redundant
        return frozenset(p.id for p in snapshot.pursuers[1:])

    monkeypatch.setattr(classification, "active_set", broken)
    assert main(["oracle", MPSE, "--n-headings", "36", "--out", str(tmp_path)]) == EXIT_FAIL
    err = stderr_json(capsys)
    assert err["error"] == "ValidationFailure"
    assert err["counterexample"]["winner"] == "P1" and "heading" in err["counterexample"]


def test_render_1v1(tmp_path, capsys):
    assert main(["run", ONE, "--dt", "0.01", "--out", str(tmp_path)]) == EXIT_OK
    assert main(["render", str(tmp_path / "trace.csv")]) == EXIT_OK
    svgs = sorted(p.name for p in tmp_path.glob("*.svg"))
    assert svgs == ["snapshot_t0p0000.svg", "trajectories.svg"]


def test_render_mpme_panels_and_voronoi(tmp_path, capsys):
    run_dir = tmp_path / "run"
    assert main(["run", MPME, "--out", str(run_dir)]) == EXIT_OK
    plain, vor = tmp_path / "plain", tmp_path / "vor"
    assert main(["render", str(run_dir / "trace.csv"), "--at", "0,mid,end", "--out", str(plain)]) == 0
    assert main(["render", str(run_dir / "trace.csv"), "--at", "0,mid,end", "--voronoi",
                 "--out", str(vor)]) == EXIT_OK
    snaps = sorted(p.name for p in plain.glob("snapshot_*.svg"))
    assert len(snaps) == 3
    first = snaps[0]
    assert (vor / first).read_bytes() != (plain / first).read_bytes()
    # the overlay adds dashed grey ridge lines
    assert (vor / first).read_text().count("stroke-dasharray") > \
        (plain / first).read_text().count("stroke-dasharray")


def test_render_is_byte_deterministic(tmp_path, capsys):
    assert main(["run", MPSE, "--dt", "0.01", "--out", str(tmp_path)]) == EXIT_OK
    trace = str(tmp_path / "trace.csv")
    assert main(["render", trace, "--at", "0,end", "--voronoi", "--out", str(tmp_path / "a")]) == 0
    assert main(["render", trace, "--at", "0,end", "--voronoi", "--out", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_render_malformed_trace(tmp_path, capsys):
    bad = tmp_path / "trace.csv"
    bad.write_text("not,a,trace\n")
    assert main(["render", str(bad)]) == EXIT_FAIL
    assert stderr_json(capsys)["error"] == "MalformedTrace"
