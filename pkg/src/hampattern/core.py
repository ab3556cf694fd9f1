"""Core data types: graphs, collections, colour patterns, coloured walks.

An instance is an ordered collection of graphs ``G_0, ..., G_{m-1}`` on the
common vertex set ``{0, ..., n-1}`` plus a pattern assigning a colour (a graph
index) to each edge position of the target Hamilton cycle.  Edge ``i`` of the
cycle, joining cycle positions ``i`` and ``i+1 (mod n)``, must belong to the
graph the pattern names at position ``i``.

Graphs store one Python-int bitmask per vertex, so degree counts restricted to
a vertex subset are single ``&``/``bit_count`` operations and neighbourhood
intersections across several graphs stay cheap at n ~ 1000.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

__all__ = [
    "ColourPattern",
    "ColouredWalk",
    "Graph",
    "GraphCollection",
    "SolverParams",
    "VerifyResult",
    "bits",
    "canonical_cycle",
    "min_collection_degree",
    "reduce_pattern_to_identity",
    "verify_coloured_walk",
    "verify_pattern_cycle",
    "vertex_mask",
]


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def vertex_mask(vertices: Iterable[int]) -> int:
    """Pack an iterable of vertex ids into a bitmask."""
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


# ---------------------------------------------------------------------------
# graphs


class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with bitmask rows."""

    __slots__ = ("n", "_rows")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = n
        self._rows = [0] * n

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    @classmethod
    def from_rows(cls, n: int, rows: list[int]) -> "Graph":
        """Wrap precomputed adjacency rows.

        The caller guarantees symmetry and a zero diagonal; nothing is
        re-checked here because the dense generators build rows in bulk.
        """
        if len(rows) != n:
            raise ValueError("need one row per vertex")
        g = cls(n)
        g._rows = list(rows)
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        g = cls(n)
        g._rows = [full ^ (1 << v) for v in range(n)]
        return g

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
        self._rows[u] |= 1 << v
        self._rows[v] |= 1 << u

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u] >> v) & 1)

    def row(self, v: int) -> int:
        """Adjacency bitmask of ``v``."""
        return self._rows[v]

    def degree(self, v: int) -> int:
        return self._rows[v].bit_count()

    def degree_into(self, v: int, mask: int) -> int:
        """Number of neighbours of ``v`` inside the bitmask ``mask``."""
        return (self._rows[v] & mask).bit_count()

    def neighbours(self, v: int) -> Iterator[int]:
        return bits(self._rows[v])

    def neighbours_in(self, v: int, mask: int) -> Iterator[int]:
        return bits(self._rows[v] & mask)

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as ordered pairs u < v."""
        for u in range(self.n):
            for v in bits(self._rows[u] >> (u + 1)):
                yield u, u + 1 + v

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self._rows) // 2

    def min_degree(self) -> int:
        return min(r.bit_count() for r in self._rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._rows == other._rows

    def __hash__(self):
        return hash((self.n, tuple(self._rows)))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges()})"


class GraphCollection(Sequence):
    """Ordered collection of graphs on a common vertex set."""

    __slots__ = ("_graphs", "n")

    def __init__(self, graphs: Sequence[Graph]):
        if not graphs:
            raise ValueError("empty collection")
        n = graphs[0].n
        for g in graphs:
            if g.n != n:
                raise ValueError("graphs must share the vertex set")
        self._graphs = list(graphs)
        self.n = n

    @property
    def m(self) -> int:
        return len(self._graphs)

    def distinct(self) -> list[Graph]:
        """Distinct graph objects, first-occurrence order.

        Deduplication is by object identity: pattern reduction repeats the
        same Graph objects, so degree scans over a reduced collection stay
        proportional to the number of underlying graphs.
        """
        seen: set[int] = set()
        out = []
        for g in self._graphs:
            if id(g) not in seen:
                seen.add(id(g))
                out.append(g)
        return out

    def __getitem__(self, i):
        return self._graphs[i]

    def __len__(self) -> int:
        return len(self._graphs)

    def __repr__(self) -> str:
        return f"GraphCollection(n={self.n}, m={self.m})"


def min_collection_degree(collection: GraphCollection) -> int:
    """Minimum vertex degree over every graph of the collection."""
    return min(g.min_degree() for g in collection.distinct())


# ---------------------------------------------------------------------------
# patterns


class ColourPattern(Sequence):
    """Colour (graph index) for each edge position of the target cycle."""

    __slots__ = ("_colours",)

    def __init__(self, colours: Iterable[int]):
        cols = tuple(int(c) for c in colours)
        if not cols:
            raise ValueError("empty pattern")
        if any(c < 0 for c in cols):
            raise ValueError("negative colour")
        self._colours = cols

    @classmethod
    def identity(cls, n: int) -> "ColourPattern":
        """Pattern using colour ``i`` at position ``i`` (rainbow setting)."""
        return cls(range(n))

    @classmethod
    def constant(cls, n: int, colour: int = 0) -> "ColourPattern":
        return cls([colour] * n)

    def rotate(self, r: int) -> "ColourPattern":
        """Pattern whose position ``j`` reads this pattern at ``j + r``."""
        n = len(self._colours)
        return ColourPattern(self._colours[(j + r) % n] for j in range(n))

    def max_colour(self) -> int:
        return max(self._colours)

    def validate_for(self, collection: GraphCollection) -> None:
        """Raise unless this pattern fits the collection as a cycle pattern."""
        if len(self._colours) != collection.n:
            raise ValueError(
                f"pattern length {len(self._colours)} != n={collection.n}"
            )
        if self.max_colour() >= collection.m:
            raise ValueError(
                f"colour {self.max_colour()} out of range for m={collection.m}"
            )

    def __getitem__(self, i):
        return self._colours[i]

    def __len__(self) -> int:
        return len(self._colours)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ColourPattern):
            return self._colours == other._colours
        return NotImplemented

    def __hash__(self):
        return hash(self._colours)

    def __repr__(self) -> str:
        if len(self._colours) > 12:
            head = ", ".join(map(str, self._colours[:10]))
            return f"ColourPattern([{head}, ...], len={len(self._colours)})"
        return f"ColourPattern({list(self._colours)})"


# ---------------------------------------------------------------------------
# walks


class ColouredWalk:
    """Path or cycle with one colour per edge.

    For an open walk ``len(colours) == len(vertices) - 1``; for a closed one
    ``len(colours) == len(vertices)`` and the last colour belongs to the edge
    back to the start.  Vertices are all distinct (the start is not repeated
    at the end of a closed walk); ill-formed candidate cycles coming from
    outside, e.g. a file, go to verify_pattern_cycle as bare sequences, which
    reports instead of raising.
    """

    __slots__ = ("vertices", "colours", "closed")

    def __init__(self, vertices: Iterable[int], colours: Iterable[int], closed: bool = False):
        vs = tuple(vertices)
        cs = tuple(colours)
        if not vs:
            raise ValueError("empty walk")
        if closed:
            if len(vs) < 3:
                raise ValueError("closed walk needs at least 3 vertices")
            if len(cs) != len(vs):
                raise ValueError("closed walk needs one colour per vertex")
        elif len(cs) != len(vs) - 1:
            raise ValueError("open walk needs len(vertices)-1 colours")
        if len(set(vs)) != len(vs):
            raise ValueError("walk vertices must be distinct")
        self.vertices = vs
        self.colours = cs
        self.closed = closed

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.colours)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield (u, v, colour) triples in walk order."""
        vs = self.vertices
        for i, c in enumerate(self.colours):
            yield vs[i], vs[(i + 1) % len(vs)], c

    def reversed_(self) -> "ColouredWalk":
        """Same open walk traversed end to start."""
        if self.closed:
            raise ValueError("reversal is only defined for open walks")
        return ColouredWalk(self.vertices[::-1], self.colours[::-1])

    @staticmethod
    def join(walks: Sequence["ColouredWalk"]) -> "ColouredWalk":
        """Concatenate open walks that chain end-to-start."""
        if not walks:
            raise ValueError("nothing to join")
        vs = list(walks[0].vertices)
        cs = list(walks[0].colours)
        for w in walks[1:]:
            if w.closed:
                raise ValueError("cannot join a closed walk")
            if w.start != vs[-1]:
                raise ValueError(f"walks do not chain: {vs[-1]} != {w.start}")
            vs.extend(w.vertices[1:])
            cs.extend(w.colours)
        return ColouredWalk(vs, cs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColouredWalk):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.colours == other.colours
            and self.closed == other.closed
        )

    def __hash__(self):
        return hash((self.vertices, self.colours, self.closed))

    def __repr__(self) -> str:
        kind = "closed" if self.closed else "open"
        return f"ColouredWalk({kind}, {self.num_vertices} vertices)"


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of a walk or cycle check.

    ``reason`` is one of ``not-closed``, ``not-spanning``, ``repeat-vertex``,
    ``colour-mismatch``, ``missing-edge`` when ``ok`` is False, else None.
    ``position`` points at the offending walk position where that makes sense.
    """

    ok: bool
    reason: str | None = None
    position: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def good(cls) -> "VerifyResult":
        return cls(True)

    @classmethod
    def bad(cls, reason: str, position: int | None = None, detail: str = "") -> "VerifyResult":
        return cls(False, reason, position, detail)


def verify_coloured_walk(collection: GraphCollection, walk: ColouredWalk) -> VerifyResult:
    """Check every walk edge against the graph of its colour.

    Structure (consecutive distinctness, colour counts) is already enforced by
    the walk itself; this only tests edge membership.  Vertices or colours out
    of range are caller errors and raise.
    """
    n, m = collection.n, collection.m
    for v in walk.vertices:
        if not (0 <= v < n):
            raise ValueError(f"vertex {v} out of range for n={n}")
    for pos, (u, v, c) in enumerate(walk.edges()):
        if not (0 <= c < m):
            raise ValueError(f"colour {c} out of range for m={m}")
        if not collection[c].has_edge(u, v):
            return VerifyResult.bad(
                "missing-edge", pos, f"edge ({u}, {v}) not in graph {c}"
            )
    return VerifyResult.good()


def verify_pattern_cycle(
    collection: GraphCollection,
    pattern: ColourPattern,
    cycle: "ColouredWalk | Sequence[int]",
) -> VerifyResult:
    """Check that ``cycle`` is a Hamilton cycle following ``pattern``.

    ``cycle`` is a closed ColouredWalk or a bare vertex sequence (then the
    pattern supplies the colours).  Position ``i`` of the cycle must be an
    edge of graph ``pattern[i]``.  A malformed pattern for the collection
    raises; problems with the cycle come back as a failed VerifyResult.
    """
    pattern.validate_for(collection)
    n = collection.n

    if isinstance(cycle, ColouredWalk):
        if not cycle.closed:
            return VerifyResult.bad("not-closed")
        vs = cycle.vertices
        colours = cycle.colours
    else:
        vs = tuple(cycle)
        colours = tuple(pattern)

    if len(vs) != n or any(not (0 <= v < n) for v in vs):
        return VerifyResult.bad(
            "not-spanning", detail=f"{len(vs)} vertices, need all of 0..{n - 1}"
        )
    seen: set[int] = set()
    for i, v in enumerate(vs):
        if v in seen:
            return VerifyResult.bad("repeat-vertex", i, f"vertex {v} repeats")
        seen.add(v)

    for i in range(n):
        if colours[i] != pattern[i]:
            return VerifyResult.bad(
                "colour-mismatch", i, f"walk colour {colours[i]} != pattern {pattern[i]}"
            )
    for i in range(n):
        u, v = vs[i], vs[(i + 1) % n]
        if not collection[pattern[i]].has_edge(u, v):
            return VerifyResult.bad(
                "missing-edge", i, f"edge ({u}, {v}) not in graph {pattern[i]}"
            )
    return VerifyResult.good()


# ---------------------------------------------------------------------------
# solver configuration


@dataclass(frozen=True)
class SolverParams:
    """Tuning knobs for the constructive solver.

    Fractions left as None are derived from the instance: alpha from the
    actual degree margin, the flexible-set size and reservoir slack from n
    (beta and gamma, when given, override that sizing as round(beta*n) and
    round(gamma*n)), epsilon and k_part from the part-count feasibility rule.
    All randomness of a run flows from ``seed``.
    """

    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    epsilon: float | None = None
    k_part: int | None = None
    max_retries: int = 20
    seed: int = 0
    flex_size: int | None = None        # absorbed-set size, overrides beta sizing
    reservoir_slack: int | None = None  # coverage slack in Z, overrides gamma sizing
    small_threshold: int = 14           # at or below this n, delegate to the oracle
    oracle_budget: int = 5_000_000
    alpha_floor: float = 0.02           # refuse margins below this when alpha is inferred

    def __post_init__(self):
        if self.alpha is not None and not 0 < self.alpha <= 0.5:
            raise ValueError("alpha must be in (0, 0.5]")
        for name in ("beta", "gamma"):
            v = getattr(self, name)
            if v is not None and not 0 < v < 1:
                raise ValueError(f"{name} must be in (0, 1)")
        if self.beta is not None and self.gamma is not None and self.gamma >= self.beta:
            raise ValueError("need gamma < beta")
        if self.beta is not None and self.alpha is not None and self.beta >= self.alpha:
            raise ValueError("need beta < alpha")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if self.k_part is not None and self.k_part < 2:
            raise ValueError("k_part must be at least 2")
        if self.max_retries < 1:
            raise ValueError("max_retries must be at least 1")


def reduce_pattern_to_identity(
    collection: GraphCollection, pattern: ColourPattern
) -> GraphCollection:
    """Collection whose position-``i`` graph is the pattern's colour-``i`` graph.

    A cycle follows ``pattern`` in ``collection`` exactly when it follows the
    identity pattern in the result.  Graph objects are shared, not copied, so
    ``distinct()`` on the result still sees the original graphs only.
    """
    pattern.validate_for(collection)
    return GraphCollection([collection[c] for c in pattern])


def canonical_cycle(vertices: Sequence[int]) -> tuple[int, ...]:
    """Canonical form of a cycle's vertex sequence, for deduplication only.

    Rotates the lowest vertex to the front and picks the lexicographically
    smaller direction.  This identifies all 2n traversals of one cycle, so it
    must never be used to decide pattern validity (colour alignment is
    position-sensitive); the oracle quotients by pattern symmetries instead.
    """
    n = len(vertices)
    r = min(range(n), key=lambda i: vertices[i])
    fwd = tuple(vertices[(r + i) % n] for i in range(n))
    bwd = tuple(vertices[(r - i) % n] for i in range(n))
    return min(fwd, bwd)
