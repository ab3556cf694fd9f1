"""Sequential construction of vertex-disjoint transversal paths.

Given a balanced partition V_1..V_K, each step matches consecutive parts
perfectly in that step's colours, which forces the union of the K-1
matchings into exactly n_i disjoint paths, one vertex per part, oriented
from V_1 to V_K.  One path is then drawn uniformly, removed, and kept; the
parts shrink by one vertex each and the next step uses fresh colours.
"""

from __future__ import annotations

import math
import random
from collections.abc import Sequence
from dataclasses import dataclass, field

from .core import ColouredWalk, GraphCollection
from .matching import perfect_matching

__all__ = [
    "PathBuilderState",
    "PathCoverAbort",
    "PathCoverResult",
    "path_builder",
]


class PathCoverAbort(RuntimeError):
    """A step's interface had no perfect matching.

    Carries where it happened (step, interface between parts interface and
    interface+1, both 0-based), the Hall witness from the matching engine
    (left-side vertices whose joint neighbourhood is too small), and the
    min-degree trajectory up to the failure.
    """

    def __init__(self, step, interface, witness, trajectory):
        self.step = step
        self.interface = interface
        self.witness = tuple(witness)
        self.trajectory = tuple(trajectory)
        super().__init__(
            f"no perfect matching at step {step}, interface {interface}"
            f"-{interface + 1}, witness size {len(self.witness)}"
        )


@dataclass
class PathBuilderState:
    """Mutable working state: remaining part contents, kept paths, and the
    per-step worst ratio of interface min-degree to part size."""

    parts: list
    step: int = 0
    paths: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)

    @property
    def part_size(self) -> int:
        return len(self.parts[0])


@dataclass(frozen=True)
class PathCoverResult:
    paths: tuple          # ColouredWalk per step, oriented part 1 to part K
    trajectory: tuple     # worst interface min-degree ratio per step
    parts_remaining: tuple
    steps: int


def _interface_min_ratio(collection, left, right, colour):
    g = collection[colour]
    right_mask = 0
    for w in right:
        right_mask |= 1 << w
    left_mask = 0
    for u in left:
        left_mask |= 1 << u
    worst = math.inf
    for u in left:
        worst = min(worst, g.degree_into(u, right_mask))
    for w in right:
        worst = min(worst, g.degree_into(w, left_mask))
    return worst / len(left)


def path_builder(
    collection: GraphCollection,
    parts: Sequence[Sequence[int]],
    steps: int,
    first_colour: int,
    stride: int,
    seed: int = 0,
) -> PathCoverResult:
    """Build ``steps`` disjoint transversal paths; step i's edge between
    parts j and j+1 (0-based) uses colour first_colour + i*stride + j.

    Parts must be equal-sized and disjoint.  Raises PathCoverAbort when some
    interface loses its perfect matching; the exception carries the Hall
    witness and the degree trajectory for post-mortems.
    """
    k = len(parts)
    if k < 2:
        raise ValueError("need at least two parts")
    p = len(parts[0])
    if any(len(part) != p for part in parts):
        raise ValueError("parts must be balanced")
    pool = [v for part in parts for v in part]
    if len(set(pool)) != len(pool):
        raise ValueError("parts must be disjoint")
    if not 0 < steps <= p:
        raise ValueError(f"steps must lie in 1..{p}")
    last_colour = first_colour + (steps - 1) * stride + (k - 2)
    if first_colour < 0 or last_colour >= collection.m:
        raise ValueError(
            f"colour schedule reaches {last_colour}, collection has {collection.m}"
        )
    if stride < k - 1:
        raise ValueError("stride below k-1 would reuse colours within a step")

    state = PathBuilderState([sorted(part) for part in parts])
    rng = random.Random(seed)
    for i in range(steps):
        n_i = p - i
        worst = min(
            _interface_min_ratio(
                collection,
                state.parts[j],
                state.parts[j + 1],
                first_colour + i * stride + j,
            )
            for j in range(k - 1)
        )
        state.trajectory.append(worst)

        nxt = {}  # successor within this step's path system
        for j in range(k - 1):
            left = state.parts[j]
            right = state.parts[j + 1]
            colour = first_colour + i * stride + j
            g = collection[colour]
            adj = [
                [wi for wi, w in enumerate(right) if g.has_edge(u, w)]
                for u in left
            ]
            result = perfect_matching(n_i, n_i, adj)
            if not result:
                raise PathCoverAbort(
                    i, j, [left[l] for l in result.witness], state.trajectory
                )
            for l, r in result.matching:
                nxt[left[l]] = (right[r], colour)

        chains = []
        for start in state.parts[0]:
            verts = [start]
            colours = []
            for _ in range(k - 1):
                w, colour = nxt[verts[-1]]
                verts.append(w)
                colours.append(colour)
            chains.append(ColouredWalk(verts, colours))
        if len(chains) != n_i:
            raise AssertionError("matching union did not give one path per vertex")

        chosen = chains[rng.randrange(n_i)]
        state.paths.append(chosen)
        for j, v in enumerate(chosen.vertices):
            state.parts[j].remove(v)
        state.step += 1

    return PathCoverResult(
        tuple(state.paths),
        tuple(state.trajectory),
        tuple(tuple(part) for part in state.parts),
        state.step,
    )
