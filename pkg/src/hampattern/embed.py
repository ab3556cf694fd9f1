"""Embedding primitives: reservoir sampling, cherries, greedy pattern embedding,
and verified balanced partitions.

The randomized operations here are sample-then-verify: concentration is never
trusted, every accepted sample has passed its predicate, and the predicates
(reservoir_check, partition_check) are public so callers and tests can re-run
them independently.  Failures raise carrying the last sample and the worst
ratio observed, which the solver uses to relax margins explicitly rather than
silently.
"""

from __future__ import annotations

import math
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .core import Graph, GraphCollection, bits, vertex_mask

__all__ = [
    "CheckReport",
    "EmbedStuck",
    "EmbeddingRequest",
    "Partition",
    "PartitionError",
    "ReservoirError",
    "cherry_connect",
    "greedy_pattern_embed",
    "partition_check",
    "random_balanced_partition",
    "reservoir_check",
    "sample_reservoir",
]


class EmbedStuck(RuntimeError):
    """A greedy choice had no candidate; callers treat this as retryable."""

    def __init__(self, msg: str, pattern_vertex=None):
        super().__init__(msg)
        self.pattern_vertex = pattern_vertex


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a degree predicate.

    worst_ratio is the smallest relative degree seen before returning: the
    global minimum when ok, the first violating ratio otherwise (the scan
    stops there so rejected samples stay cheap).
    """

    ok: bool
    worst_ratio: float
    vertex: int | None = None
    colour: int | None = None

    def __bool__(self) -> bool:
        return self.ok


class ReservoirError(RuntimeError):
    def __init__(self, msg, attempts, worst: CheckReport, sample):
        super().__init__(msg)
        self.attempts = attempts
        self.worst = worst
        self.sample = sample


class PartitionError(RuntimeError):
    def __init__(self, msg, attempts, worst: CheckReport, sample):
        super().__init__(msg)
        self.attempts = attempts
        self.worst = worst
        self.sample = sample


def _colour_index(collection: GraphCollection) -> list[tuple[int, Graph]]:
    firsts: dict[int, tuple[int, Graph]] = {}
    for c, g in enumerate(collection):
        firsts.setdefault(id(g), (c, g))
    return list(firsts.values())


# ---------------------------------------------------------------------------
# reservoir


def reservoir_check(collection: GraphCollection, zset: Iterable[int], margin: float) -> CheckReport:
    """Every vertex keeps relative degree >= 1/2 + margin into Z and into V minus Z,
    in every distinct graph of the collection."""
    zmask = vertex_mask(zset)
    zsize = zmask.bit_count()
    n = collection.n
    comask = ((1 << n) - 1) ^ zmask
    cosize = n - zsize
    if zsize == 0 or cosize == 0:
        raise ValueError("reservoir must be a proper nonempty subset")
    need = 0.5 + margin - 1e-12
    worst = 1.0
    for colour, g in _colour_index(collection):
        for v in range(n):
            row = g.row(v)
            for mask, size in ((zmask, zsize), (comask, cosize)):
                ratio = (row & mask).bit_count() / size
                if ratio < worst:
                    worst = ratio
                if ratio < need:
                    return CheckReport(False, ratio, v, colour)
    return CheckReport(True, worst)


def sample_reservoir(
    collection: GraphCollection,
    beta: float | None = None,
    margin: float = 0.05,
    seed: int = 0,
    size: int | None = None,
    max_retries: int = 20,
):
    """Sample a vertex set Z of the requested size until reservoir_check passes.

    The size is floor(beta*n) unless ``size`` pins it exactly (the solver
    passes the exact reservoir size its plan needs).  Exhausting the retry
    budget raises ReservoirError carrying the attempt count, the worst report,
    and the last sample, so callers can retry at a weaker margin or proceed
    deliberately unverified.
    """
    n = collection.n
    if size is None:
        if beta is None:
            raise ValueError("give either beta or size")
        size = int(beta * n)
    if not 0 < size < n:
        raise ValueError(f"reservoir size {size} out of range")
    rng = random.Random(seed)
    worst_report = None
    sample = None
    for _ in range(max_retries):
        sample = tuple(sorted(rng.sample(range(n), size)))
        report = reservoir_check(collection, sample, margin)
        if report:
            return sample
        if worst_report is None or report.worst_ratio > worst_report.worst_ratio:
            worst_report = report
    raise ReservoirError(
        f"no reservoir of size {size} passed margin {margin} in {max_retries} tries "
        f"(best violating ratio {worst_report.worst_ratio:.3f})",
        max_retries,
        worst_report,
        sample,
    )


# ---------------------------------------------------------------------------
# cherries


def cherry_connect(
    collection: GraphCollection,
    c1: int,
    c2: int,
    x: int,
    y: int,
    candidates: Iterable[int],
    forbidden: Iterable[int] = (),
) -> int:
    """Smallest z among candidates with xz in graph c1 and zy in graph c2.

    x and y must be distinct; a cherry through x itself is not meaningful for
    path splicing.  No valid middle raises EmbedStuck.
    """
    if x == y:
        raise ValueError("cherry endpoints must be distinct")
    mask = vertex_mask(candidates)
    mask &= ~vertex_mask(forbidden)
    mask &= ~((1 << x) | (1 << y))
    mask &= collection[c1].row(x) & collection[c2].row(y)
    if not mask:
        raise EmbedStuck(f"no cherry middle between {x} and {y} in colours ({c1}, {c2})")
    return (mask & -mask).bit_length() - 1


# ---------------------------------------------------------------------------
# exact-pattern greedy embedding


@dataclass(frozen=True)
class EmbeddingRequest:
    """A small coloured pattern graph to embed greedily.

    ``edges`` are (u, v, colour) over hashable pattern-vertex labels;
    ``order`` lists all pattern vertices with the anchored independent set
    ``independent`` as its initial segment, and every later vertex may have at
    most k earlier neighbours.  New images land in ``target`` minus
    ``forbidden``; anchor images are exempt from ``forbidden``.
    """

    edges: tuple
    independent: frozenset
    anchors: dict
    target: tuple
    forbidden: tuple
    order: tuple
    k: int = 2

    def __init__(self, edges, independent, anchors, target, forbidden, order, k=2):
        object.__setattr__(self, "edges", tuple((u, v, int(c)) for u, v, c in edges))
        object.__setattr__(self, "independent", frozenset(independent))
        object.__setattr__(self, "anchors", dict(anchors))
        object.__setattr__(self, "target", tuple(target))
        object.__setattr__(self, "forbidden", tuple(forbidden))
        object.__setattr__(self, "order", tuple(order))
        object.__setattr__(self, "k", int(k))
        self._validate()

    def _validate(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        verts = set(self.order)
        if len(self.order) != len(verts):
            raise ValueError("order repeats a vertex")
        pos = {u: i for i, u in enumerate(self.order)}
        seen_pairs = set()
        for u, v, c in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in verts or v not in verts:
                raise ValueError(f"edge ({u!r}, {v!r}) uses a vertex missing from order")
            if c < 0:
                raise ValueError("negative colour")
            key = frozenset((u, v))
            if key in seen_pairs:
                raise ValueError(f"duplicate edge ({u!r}, {v!r})")
            seen_pairs.add(key)
            if u in self.independent and v in self.independent:
                raise ValueError("anchored set is not independent")
        if not self.independent <= verts:
            raise ValueError("independent set must consist of pattern vertices")
        if set(self.order[: len(self.independent)]) != self.independent:
            raise ValueError("order must start with the independent set")
        if set(self.anchors) != self.independent:
            raise ValueError("anchors must map exactly the independent set")
        if len(set(self.anchors.values())) != len(self.anchors):
            raise ValueError("anchor map must be injective")
        nbrs = {u: [] for u in self.order}
        for u, v, _ in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        for u in self.order:
            if u in self.independent:
                continue
            earlier = sum(1 for w in nbrs[u] if pos[w] < pos[u])
            if earlier > self.k:
                raise ValueError(f"{u!r} has {earlier} earlier neighbours, k={self.k}")


def greedy_pattern_embed(collection: GraphCollection, req: EmbeddingRequest) -> dict:
    """Extend the anchor map over all pattern vertices, smallest-candidate first.

    Each non-anchored vertex, taken in request order, is mapped to the lowest
    host in target minus forbidden that realizes the coloured edges to its
    already-embedded neighbours.  Raises EmbedStuck naming the pattern vertex
    whose candidate set came up empty.
    """
    coloured = {}
    for u, v, c in req.edges:
        coloured.setdefault(u, []).append((v, c))
        coloured.setdefault(v, []).append((u, c))
    mapping = dict(req.anchors)
    base = vertex_mask(req.target) & ~vertex_mask(req.forbidden)
    used = vertex_mask(mapping.values())
    for u in req.order:
        if u in req.independent:
            continue
        mask = base & ~used
        for w, c in coloured.get(u, ()):
            if w in mapping:
                mask &= collection[c].row(mapping[w])
        if not mask:
            raise EmbedStuck(f"no host for pattern vertex {u!r}", pattern_vertex=u)
        host = (mask & -mask).bit_length() - 1
        mapping[u] = host
        used |= 1 << host
    return mapping


# ---------------------------------------------------------------------------
# balanced partitions


@dataclass(frozen=True)
class Partition:
    parts: tuple
    rest: tuple
    part_size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "part_size", len(self.parts[0]) if self.parts else 0)


def partition_check(collection: GraphCollection, parts: Sequence[Sequence[int]], margin: float) -> CheckReport:
    """Bipartite min degree >= (1/2+margin)*|part| between consecutive parts,
    in every distinct graph."""
    p = len(parts[0])
    need = (0.5 + margin) * p - 1e-9
    worst = 1.0
    part_masks = [vertex_mask(part) for part in parts]
    for j in range(len(parts) - 1):
        for colour, g in _colour_index(collection):
            for a, b in ((j, j + 1), (j + 1, j)):
                mask = part_masks[b]
                for v in parts[a]:
                    d = g.degree_into(v, mask)
                    ratio = d / p
                    if ratio < worst:
                        worst = ratio
                    if d < need:
                        return CheckReport(False, ratio, v, colour)
    return CheckReport(True, worst)


def random_balanced_partition(
    vertices: Iterable[int],
    K: int,
    collection: GraphCollection,
    margin: float,
    seed: int = 0,
    max_retries: int = 20,
) -> Partition:
    """Shuffle vertices into K parts of equal size plus a remainder.

    Accepted only when partition_check passes for consecutive parts; the
    remainder (fewer than K vertices) carries no guarantee and is handed back
    for leftover coverage.  Retries exhaust into PartitionError with the last
    sample and worst report.
    """
    pool = sorted(vertices)
    if K < 2:
        raise ValueError("need at least two parts")
    p = len(pool) // K
    if p < 1:
        raise ValueError("not enough vertices for K parts")
    rng = random.Random(seed)
    worst_report = None
    partition = None
    for _ in range(max_retries):
        rng.shuffle(pool)
        parts = tuple(tuple(sorted(pool[j * p : (j + 1) * p])) for j in range(K))
        partition = Partition(parts, tuple(sorted(pool[K * p :])))
        report = partition_check(collection, parts, margin)
        if report:
            return partition
        if worst_report is None or report.worst_ratio > worst_report.worst_ratio:
            worst_report = report
    raise PartitionError(
        f"no {K}-partition passed margin {margin} in {max_retries} tries "
        f"(best violating ratio {worst_report.worst_ratio:.3f})",
        max_retries,
        worst_report,
        partition,
    )
