"""Gadget templates, robust bipartite templates, and the absorbing structure."""

import itertools

import pytest

from hampattern.absorber import (
    AbsorberError,
    RmbgError,
    RmbgTemplate,
    absorb,
    build_absorbing_structure,
    build_gadget_template,
    build_rmbg,
    embed_gadget,
    gadget_absorb_route,
    gadget_degeneracy_order,
    verify_rmbg,
    _rmbg_memo,
)
from hampattern.core import Graph, GraphCollection, verify_coloured_walk
from hampattern.instances import gen_random_dirac


def test_gadget_counts():
    for ell in range(1, 9):
        tpl = build_gadget_template(ell)
        assert tpl.num_vertices == 5 * ell + 3
        assert len(tpl.edges) == 8 * ell + 2
        assert {c for _, _, c in tpl.edges} == set(range(1, 4 * ell + 3))
        # simple graph on declared vertex ids
        seen = set()
        for u, v, _ in tpl.edges:
            assert 0 <= u < tpl.num_vertices and 0 <= v < tpl.num_vertices
            assert u != v
            key = frozenset((u, v))
            assert key not in seen
            seen.add(key)


def test_gadget_roles_partition_vertices():
    tpl = build_gadget_template(4)
    roles = tpl.role_a + tpl.role_b + tpl.role_c
    assert sorted(roles) == list(range(tpl.num_vertices))
    assert len(tpl.role_a) == 5
    assert len(tpl.role_b) == 14
    assert len(tpl.role_c) == 4


def check_route(tpl, i):
    walk = gadget_absorb_route(tpl, i)
    ell = tpl.ell
    assert list(walk.colours) == list(range(1, 4 * ell + 3))
    assert walk.vertices[0] == tpl.b(0)
    assert walk.vertices[-1] == tpl.b(3 * ell + 1)
    interior = set(walk.vertices[1:-1])
    expected = set(tpl.role_b[1:-1]) | set(tpl.role_c) | {tpl.a(i)}
    assert interior == expected
    return walk


def test_routes_every_size():
    for ell in range(1, 9):
        tpl = build_gadget_template(ell)
        for i in range(1, ell + 2):
            check_route(tpl, i)
        with pytest.raises(ValueError):
            gadget_absorb_route(tpl, 0)
        with pytest.raises(ValueError):
            gadget_absorb_route(tpl, ell + 2)


def test_routes_differ_only_in_absorbed_vertex():
    tpl = build_gadget_template(5)
    walks = [gadget_absorb_route(tpl, i) for i in range(1, 7)]
    base = set(walks[0].vertices) - {tpl.a(1)}
    for i, w in enumerate(walks, start=1):
        assert set(w.vertices) - {tpl.a(i)} == base


def test_degeneracy_order():
    for ell in range(1, 9):
        tpl = build_gadget_template(ell)
        order = gadget_degeneracy_order(tpl)
        assert sorted(order) == list(range(tpl.num_vertices))
        assert order[: ell + 1] == tpl.role_a
        pos = {v: k for k, v in enumerate(order)}
        nbrs = {v: set() for v in range(tpl.num_vertices)}
        for u, v, _ in tpl.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        for v in order[ell + 1 :]:
            earlier = [u for u in nbrs[v] if pos[u] < pos[v]]
            assert len(earlier) <= 2, f"ell={ell}, vertex {tpl.label(v)}"


def test_rmbg_shapes_and_determinism():
    tpl = build_rmbg(4, 0.25, seed=3)
    assert tpl.nx == 12 and tpl.ny == 8
    assert tpl.deleted == 1 and tpl.nz == 5
    lo, hi = tpl.degree_bounds()
    assert lo >= 2
    for row in tpl.adj:
        assert len(row) >= 3
        assert any(r < tpl.ny for r in row)  # at least one Y neighbour
    assert tpl.stats["mode"] == "exhaustive"
    assert build_rmbg(4, 0.25, seed=3) is tpl  # memoized
    _rmbg_memo.pop((4, 0.25, 3))
    again = build_rmbg(4, 0.25, seed=3)
    assert again.adj == tpl.adj


def test_rmbg_validation():
    with pytest.raises(ValueError):
        build_rmbg(1, 0.5)
    with pytest.raises(ValueError):
        build_rmbg(4, 0.0)
    with pytest.raises(ValueError):
        build_rmbg(4, 1.0)


def test_verify_rejects_fragile_template():
    # every X vertex leans on Z vertex 6; deleting it starves them
    rows = tuple((0, 1, 6) for _ in range(6))
    bad = RmbgTemplate(2, 0.5, 0, rows)
    with pytest.raises(RmbgError):
        verify_rmbg(bad)


def test_rmbg_cache_roundtrip(tmp_path):
    key = (5, round(0.4, 9), 11)
    _rmbg_memo.pop(key, None)
    tpl = build_rmbg(5, 0.4, seed=11, cache_dir=str(tmp_path))
    files = list(tmp_path.glob("rmbg_*.json"))
    assert len(files) == 1
    _rmbg_memo.pop(key)
    loaded = build_rmbg(5, 0.4, seed=11, cache_dir=str(tmp_path))
    assert loaded.adj == tpl.adj
    assert "loaded_from" in loaded.stats
    # corrupt entries are ignored, not fatal
    files[0].write_text("{not json")
    _rmbg_memo.pop(key)
    rebuilt = build_rmbg(5, 0.4, seed=11, cache_dir=str(tmp_path))
    assert rebuilt.adj == tpl.adj


def test_embed_gadget_lands_edges():
    tpl = build_gadget_template(2)
    t = tpl.num_colours  # 10
    col = GraphCollection([Graph.complete(30)] * t)
    anchors = [20, 21, 22]
    gad = embed_gadget(col, (0, t - 1), anchors, forbidden={5, 6})
    assert gad.a_hosts == (20, 21, 22)
    assert len(set(gad.mapping.values())) == tpl.num_vertices
    assert not {5, 6} & set(gad.internal_hosts)
    for u, v, c in tpl.edges:
        assert col[c - 1].has_edge(gad.mapping[u], gad.mapping[v])


def _small_structure(seed=0):
    flex, slack = 4, 2
    template = build_rmbg(flex, slack / flex, seed=0)
    t = 4 * template.num_edges() + 2
    col = gen_random_dirac(300, t, 0.3, seed=seed)
    z = list(range(flex + slack + 2))
    structure = build_absorbing_structure(
        col, z, z1=0, z2=1, flex_size=flex, seed=seed, template=template
    )
    return col, structure


def test_structure_ledger():
    col, s = _small_structure()
    e = s.template.num_edges()
    assert s.t == 4 * e + 2
    assert len(s.absorb_set) == 4 * e - s.flex + 1
    assert len(s.gadgets) == s.template.nx
    assert len(s.cherries) == len(s.gadgets) + 1
    # windows tile colours 2..t-3 with 2-colour cherry gaps between
    assert s.cherries[0][3] == 0
    assert s.cherries[-1][3] == s.t - 2
    prev = 1
    for gad, cherry in zip(s.gadgets, s.cherries):
        mu, nu = gad.window
        assert cherry[3] == mu - 2
        assert mu == prev + 1
        prev = nu + 2
    # interiors, reservoir, and cherry middles never collide
    groups = [set(g.internal_hosts) for g in s.gadgets]
    groups.append(set(s.y_hosts))
    groups.append(set(s.z_rest) | {s.z1, s.z2})
    groups.append({mid for _, mid, _, _ in s.cherries})
    for a, b in itertools.combinations(groups, 2):
        assert not a & b


def test_absorb_every_flex_subset():
    col, s = _small_structure(seed=1)
    base = set(s.absorb_set)
    seen = set()
    for zp in itertools.combinations(s.z_rest, s.flex):
        walk = absorb(s, zp)
        assert walk.vertices[0] == s.z1 and walk.vertices[-1] == s.z2
        assert list(walk.colours) == list(range(s.t))
        assert set(walk.vertices[1:-1]) == base | set(zp)
        assert verify_coloured_walk(col, walk).ok
        seen.add(tuple(walk.vertices))
    assert len(seen) == 15  # C(6, 4) distinct walks


def test_absorb_rejects_bad_subset():
    col, s = _small_structure()
    with pytest.raises(ValueError):
        absorb(s, s.z_rest[: s.flex - 1])
    with pytest.raises(ValueError):
        absorb(s, (s.z1,) + s.z_rest[: s.flex - 1])


def test_structure_validation():
    template = build_rmbg(4, 0.5, seed=0)
    t = 4 * template.num_edges() + 2
    col = gen_random_dirac(300, t, 0.3, seed=0)
    with pytest.raises(ValueError):
        build_absorbing_structure(col, range(8), 0, 0, 4, template=template)
    with pytest.raises(ValueError):
        # slack would be 0
        build_absorbing_structure(col, range(6), 0, 1, 4)
    short = GraphCollection([Graph.complete(300)] * 10)
    with pytest.raises(ValueError):
        build_absorbing_structure(short, range(8), 0, 1, 4, template=template)
