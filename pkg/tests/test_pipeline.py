"""End-to-end solver: construction, delegation, refusals, traces."""

import pytest

from hampattern.core import ColourPattern, SolverParams, verify_pattern_cycle
from hampattern.instances import (
    gen_counterexample,
    gen_identical,
    gen_random_dirac,
    make_pattern,
)
from hampattern.pipeline import STAGE_ORDER, audit_run, solve


def test_solve_identity_end_to_end():
    col = gen_random_dirac(400, 400, 0.25, seed=3)
    res = solve(col)
    assert res.status == "cycle"
    chi = ColourPattern.identity(400)
    assert verify_pattern_cycle(col, chi, res.cycle).ok
    assert res.cycle.num_edges == 400
    audit = audit_run(res.trace)
    assert audit["ok"], audit


def test_solve_few_colours():
    col = gen_random_dirac(420, 8, 0.25, seed=1)
    chi = make_pattern("random", 420, 8, seed=5)
    res = solve(col, chi)
    assert res.status == "cycle"
    assert verify_pattern_cycle(col, chi, res.cycle).ok
    assert audit_run(res.trace)["ok"]


def test_trace_schema():
    col = gen_random_dirac(400, 400, 0.2, seed=0)
    res = solve(col)
    trace = res.trace
    names = [s["name"] for s in trace["stages"]]
    assert names == list(STAGE_ORDER)
    for stage in trace["stages"]:
        assert stage["attempts"] >= 1
        assert isinstance(stage["stats"], dict)
        assert stage["ok"]
    assert trace["colours_used"] == 400
    assert sorted(trace["cycle"]) == list(range(400))
    plan = trace["plan"]
    assert plan["t"] + plan["steps"] * (plan["k"] + 1) + plan["tail_colours"] == 400


def test_determinism():
    col = gen_random_dirac(400, 400, 0.25, seed=8)
    a = solve(col)
    b = solve(col)
    assert a.status == b.status == "cycle"
    assert a.cycle.vertices == b.cycle.vertices
    c = solve(col, params=SolverParams(seed=99))
    assert c.status == "cycle"


def test_small_instances_delegate():
    col = gen_random_dirac(10, 10, 0.3, seed=4)
    res = solve(col)
    assert res.status == "cycle"
    names = [s["name"] for s in res.trace["stages"]]
    assert names == ["precondition", "verify"]
    assert res.trace["stages"][0]["stats"]["delegated"]
    assert verify_pattern_cycle(col, ColourPattern.identity(10), res.cycle).ok


def test_tight_margin_refused():
    col, chi = gen_counterexample(10)
    res = solve(col, chi)
    assert res.status == "refused"
    assert "margin" in res.reason
    assert res.cycle is None


def test_midrange_refused_with_arithmetic():
    col = gen_random_dirac(100, 100, 0.3, seed=0)
    res = solve(col)
    assert res.status == "refused"
    assert "colours" in res.reason


def test_alpha_floor_override():
    col = gen_random_dirac(12, 12, 0.25, seed=0)
    res = solve(col, params=SolverParams(alpha=0.4, alpha_floor=0.45))
    assert res.status == "refused"


def test_identical_collection():
    base = gen_random_dirac(400, 1, 0.25, seed=6)[0]
    col = gen_identical(base, 400)
    res = solve(col)
    assert res.status == "cycle"
    assert verify_pattern_cycle(col, ColourPattern.identity(400), res.cycle).ok


def test_identity_needs_enough_graphs():
    col = gen_random_dirac(20, 4, 0.3, seed=0)
    with pytest.raises(ValueError):
        solve(col)


def test_blocks_pattern():
    col = gen_random_dirac(500, 2, 0.25, seed=2)
    chi = make_pattern("blocks", 500, 2)
    res = solve(col, chi)
    assert res.status == "cycle"
    assert verify_pattern_cycle(col, chi, res.cycle).ok
    assert audit_run(res.trace)["ok"]
