"""Domain type behaviour: graphs, collections, patterns, walks, verification."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hampattern.core import (
    ColourPattern,
    ColouredWalk,
    Graph,
    GraphCollection,
    SolverParams,
    canonical_cycle,
    min_collection_degree,
    reduce_pattern_to_identity,
    verify_coloured_walk,
    verify_pattern_cycle,
)


def test_graph_from_edges_roundtrip():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4), (0, 4)])
    assert sorted(g.edges()) == [(0, 1), (0, 4), (1, 2), (3, 4)]
    assert g.num_edges() == 4
    assert g.has_edge(1, 0) and not g.has_edge(0, 2)
    assert g.degree(0) == 2 and g.degree(2) == 1
    assert list(g.neighbours(4)) == [0, 3]


def test_graph_complete():
    k5 = Graph.complete(5)
    assert k5.num_edges() == 10
    assert k5.min_degree() == 4
    assert all(k5.has_edge(u, v) for u in range(5) for v in range(5) if u != v)


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])


def test_degree_into_mask():
    g = Graph.from_edges(6, [(0, 1), (0, 2), (0, 3), (0, 5)])
    mask = (1 << 1) | (1 << 2) | (1 << 4)
    assert g.degree_into(0, mask) == 2


@settings(max_examples=120, deadline=None)
@given(st.integers(3, 12), st.data())
def test_graph_edges_roundtrip_random(n, data):
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(all_pairs), unique=True, max_size=len(all_pairs)))
    g = Graph.from_edges(n, edges)
    assert sorted(g.edges()) == sorted(edges)
    assert g.num_edges() == len(edges)
    assert sum(g.degree(v) for v in range(n)) == 2 * len(edges)


def test_collection_requires_common_vertex_set():
    with pytest.raises(ValueError):
        GraphCollection([Graph.complete(4), Graph.complete(5)])
    with pytest.raises(ValueError):
        GraphCollection([])


def test_collection_distinct_by_object():
    g = Graph.complete(4)
    h = Graph.complete(4)
    col = GraphCollection([g, g, h, g])
    assert col.m == 4
    assert col.distinct() == [g, h]


def test_min_collection_degree():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    col = GraphCollection([Graph.complete(4), g])
    assert min_collection_degree(col) == 2


def test_pattern_constructors_and_validation():
    assert list(ColourPattern.identity(4)) == [0, 1, 2, 3]
    assert list(ColourPattern.constant(3, 7)) == [7, 7, 7]
    col = GraphCollection([Graph.complete(3)] * 2)
    ColourPattern([0, 1, 0]).validate_for(col)
    with pytest.raises(ValueError):
        ColourPattern([0, 1]).validate_for(col)  # wrong length
    with pytest.raises(ValueError):
        ColourPattern([0, 2, 0]).validate_for(col)  # colour out of range


def test_pattern_rotate():
    chi = ColourPattern([3, 1, 4, 1, 5])
    assert list(chi.rotate(2)) == [4, 1, 5, 3, 1]
    assert list(chi.rotate(0)) == list(chi)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=3, max_size=9), st.integers(0, 20), st.integers(0, 20))
def test_pattern_rotate_composes(chis, a, b):
    chi = ColourPattern(chis)
    assert list(chi.rotate(a).rotate(b)) == list(chi.rotate(a + b))


def test_walk_invariants():
    w = ColouredWalk([0, 1, 2], [5, 6])
    assert w.start == 0 and w.end == 2 and w.num_edges == 2
    assert list(w.edges()) == [(0, 1, 5), (1, 2, 6)]
    with pytest.raises(ValueError):
        ColouredWalk([0, 1, 0], [5, 6])  # repeat vertex
    with pytest.raises(ValueError):
        ColouredWalk([0, 1, 2], [5])  # colour count off
    with pytest.raises(ValueError):
        ColouredWalk([0, 1], [5, 6], closed=True)  # closed needs 3 vertices


def test_closed_walk_wraps():
    w = ColouredWalk([0, 1, 2, 3], [9, 8, 7, 6], closed=True)
    assert list(w.edges())[-1] == (3, 0, 6)
    assert w.num_edges == 4


def test_walk_join_and_reverse():
    a = ColouredWalk([0, 1, 2], [4, 5])
    b = ColouredWalk([2, 3, 7], [6, 1])
    joined = ColouredWalk.join([a, b])
    assert list(joined.vertices) == [0, 1, 2, 3, 7]
    assert list(joined.colours) == [4, 5, 6, 1]
    r = a.reversed_()
    assert list(r.vertices) == [2, 1, 0] and list(r.colours) == [5, 4]


def _square_instance():
    # C4 in colour 0, its two diagonals in colour 1
    side = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    diag = Graph.from_edges(4, [(0, 2), (1, 3)])
    return GraphCollection([side, diag])


def test_verify_pattern_cycle_accepts():
    col = _square_instance()
    chi = ColourPattern([0, 0, 0, 0])
    assert verify_pattern_cycle(col, chi, [0, 1, 2, 3]).ok
    walk = ColouredWalk([0, 1, 2, 3], [0, 0, 0, 0], closed=True)
    assert verify_pattern_cycle(col, chi, walk).ok


def test_verify_pattern_cycle_reasons():
    col = _square_instance()
    chi = ColourPattern([0, 0, 0, 0])
    r = verify_pattern_cycle(col, chi, [0, 1, 2])
    assert not r.ok and r.reason == "not-spanning"
    r = verify_pattern_cycle(col, chi, [0, 1, 2, 2])
    assert not r.ok and r.reason == "repeat-vertex"
    r = verify_pattern_cycle(col, chi, [0, 1, 3, 2])
    assert not r.ok and r.reason == "missing-edge" and r.position is not None
    # mismatching stored colours on a walk
    walk = ColouredWalk([0, 1, 2, 3], [0, 0, 1, 0], closed=True)
    r = verify_pattern_cycle(col, chi, walk)
    assert not r.ok and r.reason == "colour-mismatch" and r.position == 2
    walk = ColouredWalk([0, 1, 2], [0, 0], closed=False)
    r = verify_pattern_cycle(col, chi, walk)
    assert not r.ok and r.reason == "not-closed"


def test_verify_rejects_out_of_range_vertices():
    col = _square_instance()
    chi = ColourPattern([0, 0, 0, 0])
    r = verify_pattern_cycle(col, chi, [0, 1, 2, 9])
    assert not r.ok and r.reason == "not-spanning"


def test_reduce_shares_graph_objects():
    col = _square_instance()
    chi = ColourPattern([0, 1, 0, 1])
    h = reduce_pattern_to_identity(col, chi)
    assert h.m == 4
    assert h[0] is col[0] and h[1] is col[1] and h[2] is col[0]
    assert verify_pattern_cycle(h, ColourPattern.identity(4), [0, 1, 3, 2]).ok


def test_canonical_cycle():
    assert canonical_cycle([2, 3, 0, 1]) == (0, 1, 2, 3)
    assert canonical_cycle([2, 1, 0, 3]) == (0, 1, 2, 3)
    assert canonical_cycle([0, 3, 1, 2]) == canonical_cycle([1, 3, 0, 2])


def test_solver_params_validation():
    SolverParams(alpha=0.2)
    with pytest.raises(ValueError):
        SolverParams(alpha=0.9)
    with pytest.raises(ValueError):
        SolverParams(max_retries=0)
    with pytest.raises(ValueError):
        SolverParams(epsilon=1.5)
