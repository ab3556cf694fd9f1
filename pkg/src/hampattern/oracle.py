"""Exact brute-force reference solver for small instances.

A tracing assigns one vertex per pattern position so that the edge leaving
position j lies in the graph of the j-th colour.  The search anchors vertex
0 at position 0; sweeping the anchor over rotated copies of the pattern
recovers every tracing exactly once, which is what makes counting sound.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ColourPattern, ColouredWalk, GraphCollection

__all__ = [
    "OracleBudgetExceeded",
    "OracleResult",
    "count_solutions",
    "exact_solve",
]

DEFAULT_BUDGET = 5_000_000


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    status: str  # "cycle" | "no-solution" | "budget-exhausted"
    cycle: ColouredWalk | None
    nodes: int

    def __bool__(self) -> bool:
        return self.status == "cycle"


def _anchored_tracings(collection: GraphCollection, chi, budget_cell):
    """Yield every tracing T with T[0] = 0 valid for ``chi``, depth-first.

    budget_cell is a single-element list of remaining node placements,
    decremented in place and shared across sweeps; exhaustion raises
    OracleBudgetExceeded mid-search.
    """
    n = collection.n
    graph_at = [collection[c] for c in chi]
    path = [0]
    visited = 1
    masks = [graph_at[0].row(0) & ~visited]
    while masks:
        m = masks[-1]
        if m == 0:
            masks.pop()
            if len(path) > len(masks):
                visited ^= 1 << path.pop()
            continue
        w = m & -m
        masks[-1] = m ^ w
        wv = w.bit_length() - 1
        budget_cell[0] -= 1
        if budget_cell[0] < 0:
            raise OracleBudgetExceeded
        d = len(path)  # w sits at position d
        if d == n - 1:
            if graph_at[n - 1].has_edge(wv, 0):
                yield path + [wv]
            continue
        after = visited | w
        nxt = graph_at[d].row(wv) & ~after
        if d + 1 == n - 1:
            nxt &= graph_at[n - 1].row(0)  # the last vertex must close the cycle
        if nxt == 0:
            continue
        path.append(wv)
        visited = after
        masks.append(nxt)


def _swept_tracings(collection, pattern, budget_cell, any_rotation):
    n = collection.n
    rotations = range(n) if any_rotation else (0,)
    for r in rotations:
        chi_r = pattern.rotate(r)
        for t in _anchored_tracings(collection, chi_r, budget_cell):
            # t is valid for chi rotated by r; shifting positions back by r
            # gives a tracing of the original pattern with vertex 0 at
            # position r
            yield [t[(i - r) % n] for i in range(n)]


def exact_solve(
    collection: GraphCollection,
    pattern: ColourPattern,
    budget: int = DEFAULT_BUDGET,
    any_rotation: bool = False,
) -> OracleResult:
    """Search for a pattern Hamilton cycle by exhaustive backtracking.

    Anchored mode (the default) fixes vertex 0 at pattern position 0, so a
    "no-solution" there only rules out that alignment; any_rotation sweeps
    vertex 0 over every position and is complete.  Node placements beyond
    ``budget`` end the search with status "budget-exhausted".
    """
    pattern.validate_for(collection)
    if collection.n < 3:
        return OracleResult("no-solution", None, 0)
    cell = [budget]
    try:
        for s in _swept_tracings(collection, pattern, cell, any_rotation):
            return OracleResult("cycle", ColouredWalk(s, list(pattern), closed=True), budget - cell[0])
    except OracleBudgetExceeded:
        return OracleResult("budget-exhausted", None, budget)
    return OracleResult("no-solution", None, budget - cell[0])


def _symmetry_order(pattern: ColourPattern) -> int:
    """Size of the pattern's symmetry group inside the dihedral group:
    rotations r with chi[(j+r) mod n] = chi[j] and reflections k with
    chi[j] = chi[(k-1-j) mod n], for all j."""
    n = len(pattern)
    chi = tuple(pattern)
    rot = sum(
        1 for r in range(n) if all(chi[(j + r) % n] == chi[j] for j in range(n))
    )
    refl = sum(
        1 for k in range(n) if all(chi[j] == chi[(k - 1 - j) % n] for j in range(n))
    )
    return rot + refl


def count_solutions(
    collection: GraphCollection,
    pattern: ColourPattern,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Number of pattern Hamilton cycles, counting vertex sets of cycles
    rather than tracings: tracings related by a symmetry of the pattern
    describe the same coloured cycle and are merged.

    The symmetry group acts freely on tracings (they are injective), so the
    tracing total divides evenly by the group order.  Raises
    OracleBudgetExceeded rather than returning a partial count.
    """
    pattern.validate_for(collection)
    if collection.n < 3:
        return 0
    cell = [budget]
    total = sum(1 for _ in _swept_tracings(collection, pattern, cell, True))
    order = _symmetry_order(pattern)
    if total % order:
        raise AssertionError(
            f"tracing count {total} not divisible by symmetry order {order}"
        )
    return total // order
