import csv
from pathlib import Path

import pytest
from typer.testing import CliRunner

from ..src.app_cli import app

runner = CliRunner()


def test_bench_constant_writes_csv_and_summary(tmp_path: Path) -> None:
    out = tmp_path / "runs.csv"
    result = runner.invoke(
        app, ["bench", "--bench", "constant", "--cores", "1", "--reps", "5", "--seed", "1:3", "--csv", str(out)]
    )
    assert result.exit_code == 0, result.output
    with open(out, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5
    assert all(r["tests_run"] == "100" for r in rows)
    assert (tmp_path / "runs_summary.csv").exists()


def test_bench_seed_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("PARQC_SEED", "11:13")
    result = runner.invoke(app, ["bench", "--bench", "constant", "--reps", "1"])
    assert result.exit_code == 0, result.output
    assert "Seed: 11:13" in result.output


@pytest.mark.parametrize(
    "args",
    [
        ["bench", "--bench", "nope"],
        ["bench", "--bench", "constant", "--seed", "garbage"],
        ["bench", "--bench", "constant", "--seed", "1:2"],
        ["bench", "--bench", "constant", "--cores", "a,b"],
        ["bench", "--bench", "constant", "--shrink", "fast"],
    ],
)
def test_usage_errors_exit_2(args: list) -> None:
    result = runner.invoke(app, args)
    assert result.exit_code == 2


def test_seeds_then_replay_reproduces_failure() -> None:
    result = runner.invoke(app, ["seeds", "--bench", "expr_bug", "-n", "2", "--seed", "5:7"])
    assert result.exit_code == 0, result.output
    lines = [line for line in result.output.splitlines() if line.strip()]
    assert len(lines) == 2
    seed, size = lines[0].split()

    first = runner.invoke(app, ["replay", "--bench", "expr_bug", "--seed", seed, "--size", size])
    second = runner.invoke(app, ["replay", "--bench", "expr_bug", "--seed", seed, "--size", size])
    assert first.exit_code == 0, first.output
    assert "*** Failed!" in first.output
    assert f"Replay: {seed} size {size}" in first.output
    assert first.output == second.output


def test_replay_requires_a_seed(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("PARQC_SEED", raising=False)
    result = runner.invoke(app, ["replay", "--bench", "expr_bug", "--size", "3"])
    assert result.exit_code == 2


def test_version_and_doctor() -> None:
    assert "parqc v" in runner.invoke(app, ["version"]).output
    result = runner.invoke(app, ["doctor"])
    assert result.exit_code == 0
    assert "physical cores" in result.output
