"""Instance generators and bit-exact serialization.

The JSON layout is normative:

    {"n": int, "m": int, "graphs": [[[u, v], ...], ...], "pattern": [...] | null}

with every edge list sorted (u < v, lexicographic) and pattern entries being
0-based graph indices.  load_instance rejects anything that deviates, with the
offending field in the message.
"""

from __future__ import annotations

import json
import math
import random

import numpy as np

from .core import ColourPattern, Graph, GraphCollection

__all__ = [
    "degree_threshold",
    "gen_counterexample",
    "gen_identical",
    "gen_random_dirac",
    "load_instance",
    "make_pattern",
    "save_instance",
]

PATTERN_KINDS = ("identity", "constant", "random", "alternating", "blocks")


def degree_threshold(n: int, alpha: float) -> int:
    """Minimum degree promised by the generator: ceil((1/2+alpha)n), capped at n-1."""
    return min(math.ceil((0.5 + alpha) * n - 1e-9), n - 1)


def _rows_from_matrix(adj: np.ndarray) -> list[int]:
    packed = np.packbits(adj, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def gen_random_dirac(
    n: int, m: int, alpha: float, seed: int = 0, margin: float = 0.15
) -> GraphCollection:
    """Random collection with min degree >= ceil((1/2+alpha)n) in every graph.

    Each graph is drawn independently at edge probability 1/2 + alpha + margin
    and then repaired: any vertex short of the threshold gets edges to its
    lowest-degree non-neighbours (ties by id) until it clears.  The default
    margin keeps repairs rare and leaves the solver's randomized stages slack
    beyond the bare degree hypothesis; margin=0 sits right at it.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if m < 1:
        raise ValueError("need m >= 1")
    if not 0 < alpha <= 0.5:
        raise ValueError("need 0 < alpha <= 1/2")
    if margin < 0:
        raise ValueError("margin must be non-negative")
    thr = degree_threshold(n, alpha)
    p = min(0.5 + alpha + margin, 1.0)
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(m):
        upper = np.triu(rng.random((n, n)) < p, 1)
        g = Graph.from_rows(n, _rows_from_matrix(upper | upper.T))
        _repair_min_degree(g, thr)
        graphs.append(g)
    return GraphCollection(graphs)


def _repair_min_degree(g: Graph, thr: int) -> None:
    deg = [g.degree(v) for v in range(g.n)]
    for v in range(g.n):
        while deg[v] < thr:
            partner = min(
                (u for u in range(g.n) if u != v and not g.has_edge(v, u)),
                key=lambda u: (deg[u], u),
            )
            g.add_edge(v, partner)
            deg[v] += 1
            deg[partner] += 1


def gen_counterexample(n: int) -> tuple[GraphCollection, ColourPattern]:
    """Tight instance: min degree exactly n/2 yet the returned pattern is unsolvable.

    Graph 0 is two disjoint cliques on {0..n/2-1} and {n/2..n-1} joined by the
    perfect matching (i, i+n/2); graph 1 is the complete bipartite graph
    between the same halves.  The pattern asks for two consecutive edges from
    graph 0 and the rest from graph 1: any graph-0 edge inside a clique
    strands the walk on one side by parity, and two consecutive matching
    edges would repeat a vertex.
    """
    if n < 6 or n % 2:
        raise ValueError("need even n >= 6")
    h = n // 2
    low = (1 << h) - 1
    high = low << h
    g1 = Graph.from_rows(
        n,
        [(low ^ (1 << i)) | (1 << (i + h)) for i in range(h)]
        + [(high ^ (1 << i)) | (1 << (i - h)) for i in range(h, n)],
    )
    g2 = Graph.from_rows(n, [high] * h + [low] * h)
    pattern = ColourPattern([0, 0] + [1] * (n - 2))
    return GraphCollection([g1, g2]), pattern


def gen_identical(base: Graph, m: int) -> GraphCollection:
    """Collection of m logical copies of one graph (storage shared)."""
    if m < 1:
        raise ValueError("need m >= 1")
    return GraphCollection([base] * m)


def make_pattern(kind: str, n: int, m: int, seed: int = 0) -> ColourPattern:
    """Named pattern families used by the CLI and the end-to-end tests.

    identity needs m >= n; alternating and blocks need m >= 2.  blocks splits
    the cycle into a first-half run of colour 0 and a second-half run of
    colour 1.
    """
    if kind == "identity":
        if m < n:
            raise ValueError("identity pattern needs m >= n")
        return ColourPattern.identity(n)
    if kind == "constant":
        return ColourPattern.constant(n, 0)
    if kind == "random":
        rng = random.Random(seed)
        return ColourPattern(rng.randrange(m) for _ in range(n))
    if kind == "alternating":
        if m < 2:
            raise ValueError("alternating pattern needs m >= 2")
        return ColourPattern(i % 2 for i in range(n))
    if kind == "blocks":
        if m < 2:
            raise ValueError("blocks pattern needs m >= 2")
        return ColourPattern([0] * (n // 2) + [1] * (n - n // 2))
    raise ValueError(f"unknown pattern kind {kind!r}, expected one of {PATTERN_KINDS}")


# ---------------------------------------------------------------------------
# serialization


def save_instance(path, collection: GraphCollection, pattern: ColourPattern | None = None) -> None:
    if pattern is not None:
        pattern.validate_for(collection)
    obj = {
        "n": collection.n,
        "m": collection.m,
        "graphs": [[[u, v] for u, v in g.edges()] for g in collection],
        "pattern": list(pattern) if pattern is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def load_instance(path) -> tuple[GraphCollection, ColourPattern | None]:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON at line {e.lineno} col {e.colno}: {e.msg}") from e
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: top level must be an object")

    def fail(field, msg):
        raise ValueError(f"{path}: {field}: {msg}")

    n = obj.get("n")
    if not isinstance(n, int) or n < 1:
        fail("n", "must be a positive integer")
    m = obj.get("m")
    if not isinstance(m, int) or m < 1:
        fail("m", "must be a positive integer")
    graphs_raw = obj.get("graphs")
    if not isinstance(graphs_raw, list) or len(graphs_raw) != m:
        fail("graphs", f"must be a list of exactly m={m} edge lists")

    graphs = []
    for c, edges in enumerate(graphs_raw):
        field = f"graphs[{c}]"
        if not isinstance(edges, list):
            fail(field, "must be a list of [u, v] pairs")
        g = Graph(n)
        prev = None
        for k, e in enumerate(edges):
            ef = f"{field}[{k}]"
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
                fail(ef, "must be a pair of integers")
            u, v = e
            if not 0 <= u < v < n:
                fail(ef, f"edge [{u}, {v}] must satisfy 0 <= u < v < n")
            if prev is not None and (u, v) <= prev:
                fail(ef, f"edge [{u}, {v}] out of sorted order (duplicates included)")
            prev = (u, v)
            g.add_edge(u, v)
        graphs.append(g)
    collection = GraphCollection(graphs)

    pattern_raw = obj.get("pattern")
    if pattern_raw is None:
        return collection, None
    if not (isinstance(pattern_raw, list) and all(isinstance(x, int) for x in pattern_raw)):
        fail("pattern", "must be null or a list of integers")
    if len(pattern_raw) != n:
        fail("pattern", f"length {len(pattern_raw)} != n={n}")
    bad = [x for x in pattern_raw if not 0 <= x < m]
    if bad:
        fail("pattern", f"colour {bad[0]} out of range for m={m}")
    return collection, ColourPattern(pattern_raw)
