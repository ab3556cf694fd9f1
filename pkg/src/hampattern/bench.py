"""Benchmark suites: solve batches of generated instances, write a CSV of
per-run outcomes, and render summary figures next to it."""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .core import SolverParams
from .instances import gen_random_dirac, make_pattern
from .pipeline import solve

__all__ = ["CSV_HEADER", "SUITES", "run_suite"]

CSV_HEADER = ["instance", "n", "m", "alpha", "K", "seed", "stage", "outcome", "retries", "ms"]


def _spec(n, m, alpha, pattern):
    return {"n": n, "m": m, "alpha": alpha, "pattern": pattern}


SUITES = {
    "smoke": [
        _spec(350, 350, 0.2, "identity"),
        _spec(350, 8, 0.2, "random"),
    ],
    "standard": [
        _spec(n, m, 0.2, kind)
        for n in (500, 800)
        for kind, m in (("identity", None), ("random", 8), ("alternating", 2), ("blocks", 2))
    ],
    "large": [
        _spec(1000, m, 0.2, kind)
        for kind, m in (("identity", None), ("random", 8), ("alternating", 2), ("blocks", 2))
    ],
}


def _label(spec):
    return f"{spec['pattern']}-n{spec['n']}"


def _bench_worker(job):
    spec, seed, keep_trace = job
    n = spec["n"]
    m = spec["m"] or n
    t0 = time.perf_counter()
    collection = gen_random_dirac(n, m, spec["alpha"], seed=seed)
    pattern = make_pattern(spec["pattern"], n, m, seed=seed)
    result = solve(collection, pattern, SolverParams(alpha=spec["alpha"], seed=seed))
    ms = round((time.perf_counter() - t0) * 1000)
    stages = result.trace.get("stages", [])
    stage = stages[-1]["name"] if stages else "precondition"
    retries = sum(s["attempts"] for s in stages) - len(stages)
    plan = result.trace.get("plan") or {}
    row = {
        "instance": _label(spec),
        "n": n,
        "m": m,
        "alpha": spec["alpha"],
        "K": plan.get("k", ""),
        "seed": seed,
        "stage": stage,
        "outcome": result.status,
        "retries": retries,
        "ms": ms,
    }
    return row, (result.trace if keep_trace else None)


def run_suite(suite, seeds=3, jobs=1, csv_path=None, figdir=None):
    """Run every (instance spec, seed) pair of a suite, returning the CSV
    path and figure paths.  keep one successful trace for the trajectory
    figure."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}, have {sorted(SUITES)}")
    csv_path = csv_path or f"bench_{suite}.csv"
    jobs = max(1, jobs)
    work = [
        (spec, seed, seed == 0)
        for spec in SUITES[suite]
        for seed in range(seeds)
    ]
    rows = []
    sample_trace = None
    if jobs == 1:
        outs = map(_bench_worker, work)
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        outs = pool.map(_bench_worker, work)
    for row, trace in outs:
        rows.append(row)
        if sample_trace is None and trace is not None and row["outcome"] == "cycle":
            sample_trace = trace
    if jobs > 1:
        pool.shutdown()

    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        writer.writerows(rows)

    figdir = figdir or os.path.splitext(csv_path)[0] + "_figs"
    figures = _render_figures(rows, sample_trace, figdir)
    return csv_path, figures


def _render_figures(rows, sample_trace, figdir):
    os.makedirs(figdir, exist_ok=True)
    paths = []

    labels = sorted({r["instance"] for r in rows})
    rates = [
        sum(1 for r in rows if r["instance"] == lab and r["outcome"] == "cycle")
        / sum(1 for r in rows if r["instance"] == lab)
        for lab in labels
    ]
    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(labels)), 3.5))
    ax.bar(range(len(labels)), rates, color="#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("cycle rate")
    fig.tight_layout()
    p = os.path.join(figdir, "success_rate.png")
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    good = [r for r in rows if r["outcome"] == "cycle"]
    bad = [r for r in rows if r["outcome"] != "cycle"]
    ax.scatter([r["n"] for r in good], [r["ms"] for r in good], label="cycle", s=18)
    if bad:
        ax.scatter(
            [r["n"] for r in bad], [r["ms"] for r in bad],
            label="other", s=18, marker="x", color="#b04040",
        )
        ax.legend()
    ax.set_xlabel("n")
    ax.set_ylabel("ms")
    ax.set_yscale("log")
    fig.tight_layout()
    p = os.path.join(figdir, "runtime_ms.png")
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    if sample_trace is not None:
        stats = next(
            (s["stats"] for s in sample_trace["stages"] if s["name"] == "path_cover"),
            None,
        )
        if stats and "trajectory" in stats:
            fig, ax = plt.subplots(figsize=(5, 3.5))
            ax.plot(stats["trajectory"], lw=1.2)
            ax.axhline(0.5, color="#b04040", ls="--", lw=0.8)
            ax.set_xlabel("step")
            ax.set_ylabel("worst interface degree / part size")
            fig.tight_layout()
            p = os.path.join(figdir, "trajectory.png")
            fig.savefig(p, dpi=120)
            plt.close(fig)
            paths.append(p)
            with open(os.path.join(figdir, "sample_trace.json"), "w", encoding="utf-8") as fh:
                json.dump(sample_trace, fh, indent=1)
    return paths
