"""Bipartite maximum matching with a Hall-violation certificate on failure.

The default engine is a Hopcroft-Karp implementation that scans vertices and
neighbours in increasing id, so a matching is a pure function of the input
adjacency; the randomized callers rely on that to stay reproducible from one
seed.  engine="scipy" delegates to scipy.sparse.csgraph for large instances
(engine="auto" switches over by size); the witness is always computed here.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

__all__ = ["PerfectMatching", "maximum_bipartite_matching", "perfect_matching"]

_AUTO_THRESHOLD = 400


def _normalize(n_left: int, n_right: int, adj) -> list[tuple[int, ...]]:
    if n_left < 0 or n_right < 0:
        raise ValueError("side sizes must be non-negative")
    if len(adj) != n_left:
        raise ValueError(f"adjacency has {len(adj)} rows, expected {n_left}")
    rows = []
    for l, nbrs in enumerate(adj):
        row = tuple(sorted(set(nbrs)))
        if row and not (0 <= row[0] and row[-1] < n_right):
            raise ValueError(f"adjacency row {l} has a neighbour out of range")
        rows.append(row)
    return rows


def _hopcroft_karp(n_left: int, n_right: int, adj: list[tuple[int, ...]]):
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    for l in range(n_left):
        for r in adj[l]:
            if match_r[r] == -1:
                match_l[l] = r
                match_r[r] = l
                break
    dist = [0] * n_left
    while True:
        queue = deque()
        for l in range(n_left):
            if match_l[l] == -1:
                dist[l] = 0
                queue.append(l)
            else:
                dist[l] = -1
        reachable_free = False
        while queue:
            l = queue.popleft()
            for r in adj[l]:
                l2 = match_r[r]
                if l2 == -1:
                    reachable_free = True
                elif dist[l2] == -1:
                    dist[l2] = dist[l] + 1
                    queue.append(l2)
        if not reachable_free:
            return match_l, match_r
        for l in range(n_left):
            if match_l[l] == -1:
                _try_augment(l, adj, match_l, match_r, dist)


def _try_augment(root, adj, match_l, match_r, dist) -> bool:
    # Iterative DFS along BFS layers; vias[k] is the right vertex used to step
    # from stack[k] to stack[k+1], flipped on success.
    stack = [(root, iter(adj[root]))]
    vias: list[int] = []
    while stack:
        l, it = stack[-1]
        descended = False
        for r in it:
            l2 = match_r[r]
            if l2 == -1:
                match_l[l] = r
                match_r[r] = l
                for k in range(len(stack) - 2, -1, -1):
                    pl = stack[k][0]
                    pr = vias[k]
                    match_l[pl] = pr
                    match_r[pr] = pl
                return True
            if dist[l2] == dist[l] + 1:
                vias.append(r)
                stack.append((l2, iter(adj[l2])))
                descended = True
                break
        if not descended:
            dist[l] = -1
            stack.pop()
            if vias:
                vias.pop()
    return False


def _scipy_matching(n_left: int, n_right: int, adj: list[tuple[int, ...]]):
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    indptr = [0]
    indices: list[int] = []
    for row in adj:
        indices.extend(row)
        indptr.append(len(indices))
    mat = csr_matrix(
        ([1] * len(indices), indices, indptr), shape=(n_left, n_right), dtype="int8"
    )
    col_of_row = maximum_bipartite_matching(mat, perm_type="column")
    match_l = [int(c) for c in col_of_row]
    match_r = [-1] * n_right
    for l, r in enumerate(match_l):
        if r != -1:
            match_r[r] = l
    return match_l, match_r


def _run(n_left, n_right, adj, engine):
    if engine == "auto":
        engine = "scipy" if max(n_left, n_right) > _AUTO_THRESHOLD else "python"
    if engine == "python":
        return _hopcroft_karp(n_left, n_right, adj)
    if engine == "scipy":
        return _scipy_matching(n_left, n_right, adj)
    raise ValueError(f"unknown engine {engine!r}")


def maximum_bipartite_matching(
    n_left: int,
    n_right: int,
    adj: Sequence[Iterable[int]],
    engine: str = "python",
) -> list[tuple[int, int]]:
    """Maximum matching as (left, right) pairs, sorted by left id.

    adj[l] lists the right-side neighbours of left vertex l.
    """
    rows = _normalize(n_left, n_right, adj)
    match_l, _ = _run(n_left, n_right, rows, engine)
    return [(l, r) for l, r in enumerate(match_l) if r != -1]


@dataclass(frozen=True)
class PerfectMatching:
    """Either a perfect matching or a Hall-violating left set."""

    matching: tuple[tuple[int, int], ...] | None
    witness: tuple[int, ...] | None

    def __bool__(self) -> bool:
        return self.matching is not None


def perfect_matching(
    n_left: int,
    n_right: int,
    adj: Sequence[Iterable[int]],
    engine: str = "python",
) -> PerfectMatching:
    """Perfect matching on balanced sides, or a witness set S with |N(S)| < |S|.

    The witness is the set of left vertices alternating-reachable from the
    unmatched ones; its neighbourhood consists of matched right vertices
    whose partners are back in the set, so it genuinely violates Hall.
    """
    if n_left != n_right:
        raise ValueError(f"perfect matching needs balanced sides, got {n_left} vs {n_right}")
    rows = _normalize(n_left, n_right, adj)
    match_l, match_r = _run(n_left, n_right, rows, engine)
    free = [l for l in range(n_left) if match_l[l] == -1]
    if not free:
        return PerfectMatching(tuple((l, match_l[l]) for l in range(n_left)), None)
    seen_l = set(free)
    seen_r: set[int] = set()
    queue = deque(free)
    while queue:
        l = queue.popleft()
        for r in rows[l]:
            if r in seen_r:
                continue
            seen_r.add(r)
            l2 = match_r[r]
            if l2 != -1 and l2 not in seen_l:
                seen_l.add(l2)
                queue.append(l2)
    return PerfectMatching(None, tuple(sorted(seen_l)))
