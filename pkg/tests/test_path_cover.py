"""Disjoint transversal paths drawn from a balanced partition."""

import pytest

from hampattern.core import Graph, GraphCollection
from hampattern.embed import random_balanced_partition
from hampattern.instances import gen_random_dirac
from hampattern.path_cover import PathCoverAbort, path_builder


def _partitioned(n, m, k, alpha=0.25, seed=0):
    col = gen_random_dirac(n, m, alpha, seed=seed)
    part = random_balanced_partition(range(n), k, col, margin=alpha / 4, seed=seed)
    return col, part.parts


def test_paths_are_disjoint_transversals():
    col, parts = _partitioned(120, 40, 3)
    res = path_builder(col, parts, steps=10, first_colour=0, stride=4, seed=7)
    assert res.steps == 10
    used = set()
    for i, path in enumerate(res.paths):
        assert len(path.vertices) == 3
        # oriented first part to last, one vertex per part
        for j, v in enumerate(path.vertices):
            assert v in parts[j]
        assert list(path.colours) == [i * 4, i * 4 + 1]
        assert not used & set(path.vertices)
        used.update(path.vertices)
    for j, rem in enumerate(res.parts_remaining):
        assert len(rem) == 30
        assert set(rem) == set(parts[j]) - used


def test_edges_exist_in_scheduled_colours():
    col, parts = _partitioned(90, 30, 3, seed=2)
    res = path_builder(col, parts, steps=8, first_colour=3, stride=3, seed=1)
    for i, path in enumerate(res.paths):
        for j, (u, w, c) in enumerate(path.edges()):
            assert c == 3 + i * 3 + j
            assert col[c].has_edge(u, w)


def test_trajectory_tracks_every_step():
    col, parts = _partitioned(120, 50, 4, seed=5)
    res = path_builder(col, parts, steps=12, first_colour=0, stride=4, seed=0)
    assert len(res.trajectory) == 12
    assert all(0 < r <= 1 for r in res.trajectory)


def test_determinism_by_seed():
    col, parts = _partitioned(90, 30, 3, seed=1)
    a = path_builder(col, parts, steps=6, first_colour=0, stride=2, seed=9)
    b = path_builder(col, parts, steps=6, first_colour=0, stride=2, seed=9)
    assert [p.vertices for p in a.paths] == [p.vertices for p in b.paths]
    c = path_builder(col, parts, steps=6, first_colour=0, stride=2, seed=10)
    assert [p.vertices for p in a.paths] != [p.vertices for p in c.paths]


def test_abort_carries_hall_witness():
    # interface 0-1 in colour 0: vertices 0 and 1 both see only vertex 4
    g0 = Graph.from_edges(9, [(0, 4), (1, 4), (2, 5)])
    g1 = Graph.complete(9)
    col = GraphCollection([g0, g1])
    parts = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    with pytest.raises(PathCoverAbort) as exc:
        path_builder(col, parts, steps=1, first_colour=0, stride=2)
    err = exc.value
    assert err.step == 0 and err.interface == 0
    assert set(err.witness) <= {0, 1, 2}
    joint = set()
    for u in err.witness:
        joint |= {w for w in (3, 4, 5) if g0.has_edge(u, w)}
    assert len(joint) < len(err.witness)
    assert len(err.trajectory) == 1


def test_validation():
    col = GraphCollection([Graph.complete(9)] * 4)
    parts = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    with pytest.raises(ValueError):
        path_builder(col, parts[:1], steps=1, first_colour=0, stride=2)
    with pytest.raises(ValueError):
        path_builder(col, [[0, 1], [2, 3, 4]], steps=1, first_colour=0, stride=2)
    with pytest.raises(ValueError):
        path_builder(col, [[0, 1], [1, 2]], steps=1, first_colour=0, stride=2)
    with pytest.raises(ValueError):
        path_builder(col, parts, steps=4, first_colour=0, stride=2)
    with pytest.raises(ValueError):
        path_builder(col, parts, steps=2, first_colour=0, stride=1)
    with pytest.raises(ValueError):
        path_builder(col, parts, steps=2, first_colour=2, stride=2)
