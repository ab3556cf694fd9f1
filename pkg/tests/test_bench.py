"""Benchmark runner: CSV shape, figures, parallel execution."""

import csv

import pytest

from hampattern.bench import CSV_HEADER, SUITES, run_suite


def test_suites_declared():
    assert set(SUITES) == {"smoke", "standard", "large"}
    for specs in SUITES.values():
        for spec in specs:
            assert spec["n"] >= 350


def test_run_suite_parallel(tmp_path):
    csv_path = str(tmp_path / "out.csv")
    figdir = str(tmp_path / "figs")
    path, figures = run_suite("smoke", seeds=2, jobs=2, csv_path=csv_path, figdir=figdir)
    assert path == csv_path
    with open(csv_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4  # 2 specs x 2 seeds
    assert set(rows[0]) == set(CSV_HEADER)
    for row in rows:
        assert row["outcome"] == "cycle"
        assert int(row["ms"]) > 0
        assert int(row["retries"]) >= 0
    names = {f.rsplit("/", 1)[-1] for f in figures}
    assert {"success_rate.png", "runtime_ms.png", "trajectory.png"} <= names
    assert (tmp_path / "figs" / "sample_trace.json").exists()


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
