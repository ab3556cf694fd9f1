"""Absorption machinery: coloured gadgets, the robustly matchable bipartite
template, and the absorbing structure that turns any admissible leftover set
into one fixed-colour path segment.

Colour conventions: a GadgetTemplate is self-contained with colours 1..4l+2
(its routes use colour j on edge j).  Everything embedded into a collection
speaks 0-based global colours; a gadget placed at window (mu, nu) realizes
template colour j in graph mu + j - 1.  An assembled structure occupies
global colours 0..t-1.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .core import ColouredWalk, GraphCollection
from .embed import EmbeddingRequest, EmbedStuck, cherry_connect, greedy_pattern_embed
from .matching import perfect_matching

__all__ = [
    "AbsorberError",
    "AbsorberStructure",
    "GadgetEmbedding",
    "GadgetTemplate",
    "RmbgError",
    "RmbgTemplate",
    "absorb",
    "build_absorbing_structure",
    "build_gadget_template",
    "build_rmbg",
    "embed_gadget",
    "gadget_absorb_route",
    "gadget_degeneracy_order",
    "verify_rmbg",
]


class RmbgError(RuntimeError):
    pass


class AbsorberError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# the gadget


@dataclass(frozen=True)
class GadgetTemplate:
    """Coloured gadget on roles A (l+1 vertices), B (3l+2), C (l).

    Vertex ids: a_1..a_{l+1} are 0..l, b_0..b_{3l+1} follow, then c_1..c_l.
    Edges carry colours 1..4l+2; the template is not properly coloured on
    purpose: colour multiplicity is what lets one fixed colour sequence pass
    through any single chosen A vertex.
    """

    ell: int
    edges: tuple  # (u, v, colour), colours 1-based

    @property
    def num_vertices(self) -> int:
        return 5 * self.ell + 3

    @property
    def num_colours(self) -> int:
        return 4 * self.ell + 2

    def a(self, i: int) -> int:
        """Vertex id of a_i, i in 1..l+1."""
        return i - 1

    def b(self, i: int) -> int:
        """Vertex id of b_i, i in 0..3l+1."""
        return self.ell + 1 + i

    def c(self, i: int) -> int:
        """Vertex id of c_i, i in 1..l."""
        return 4 * self.ell + 3 + (i - 1)

    @property
    def role_a(self) -> tuple:
        return tuple(range(self.ell + 1))

    @property
    def role_b(self) -> tuple:
        return tuple(self.b(i) for i in range(3 * self.ell + 2))

    @property
    def role_c(self) -> tuple:
        return tuple(self.c(i) for i in range(1, self.ell + 1))

    def label(self, v: int) -> str:
        if v <= self.ell:
            return f"a{v + 1}"
        if v <= 4 * self.ell + 2:
            return f"b{v - self.ell - 1}"
        return f"c{v - 4 * self.ell - 2}"


_gadget_cache: dict[int, GadgetTemplate] = {}


def build_gadget_template(ell: int) -> GadgetTemplate:
    """The coloured gadget for a given l >= 1.

    Edge families: the two boundary stars at b_0/b_1 and b_{3l}/b_{3l+1}
    carry the extreme colour pairs; each interior pair b_{3i}, b_{3i+1}
    serves a_{i+1} and both adjacent c's in colours 4i+1, 4i+2; the short
    b_{3i+1} b_{3i+2} b_{3i+3} links carry the remaining colours.
    """
    if ell < 1:
        raise ValueError("need ell >= 1")
    if ell in _gadget_cache:
        return _gadget_cache[ell]
    tpl = GadgetTemplate(ell, ())
    edges = []

    def add(u, v, colour):
        edges.append((u, v, colour))

    add(tpl.a(1), tpl.b(0), 1)
    add(tpl.b(0), tpl.c(1), 1)
    add(tpl.a(1), tpl.b(1), 2)
    add(tpl.b(1), tpl.c(1), 2)
    add(tpl.a(ell + 1), tpl.b(3 * ell), 4 * ell + 1)
    add(tpl.b(3 * ell), tpl.c(ell), 4 * ell + 1)
    add(tpl.a(ell + 1), tpl.b(3 * ell + 1), 4 * ell + 2)
    add(tpl.b(3 * ell + 1), tpl.c(ell), 4 * ell + 2)
    for i in range(1, ell):
        add(tpl.a(i + 1), tpl.b(3 * i), 4 * i + 1)
        add(tpl.b(3 * i), tpl.c(i), 4 * i + 1)
        add(tpl.b(3 * i), tpl.c(i + 1), 4 * i + 1)
        add(tpl.a(i + 1), tpl.b(3 * i + 1), 4 * i + 2)
        add(tpl.b(3 * i + 1), tpl.c(i), 4 * i + 2)
        add(tpl.b(3 * i + 1), tpl.c(i + 1), 4 * i + 2)
    for i in range(ell):
        for j in (1, 2):
            add(tpl.b(3 * i + j), tpl.b(3 * i + j + 1), 4 * i + j + 2)

    pairs = {frozenset((u, v)) for u, v, _ in edges}
    if len(pairs) != len(edges) or len(edges) != 8 * ell + 2:
        raise AssertionError("gadget edge family miscounted")
    tpl = GadgetTemplate(ell, tuple(edges))
    _gadget_cache[ell] = tpl
    return tpl


def gadget_absorb_route(tpl: GadgetTemplate, i: int) -> ColouredWalk:
    """The b_0, b_{3l+1}-path through a_i (i in 1..l+1), colour j on edge j.

    Each block j walks b_{3j-3} x b_{3j-2} b_{3j-1} b_{3j} where x is c_j
    before the absorbed position, a_i at it, and c_{j-1} after; the closing
    hop goes through c_l, or through a_{l+1} itself when i = l+1.
    """
    ell = tpl.ell
    if not 1 <= i <= ell + 1:
        raise ValueError(f"route index {i} out of range 1..{ell + 1}")
    verts = [tpl.b(0)]
    for j in range(1, ell + 1):
        if j < i:
            x = tpl.c(j)
        elif j == i:
            x = tpl.a(i)
        else:
            x = tpl.c(j - 1)
        verts += [x, tpl.b(3 * j - 2), tpl.b(3 * j - 1), tpl.b(3 * j)]
    verts += [tpl.a(ell + 1) if i == ell + 1 else tpl.c(ell), tpl.b(3 * ell + 1)]

    colour_of = {frozenset((u, v)): c for u, v, c in tpl.edges}
    colours = []
    for u, v in zip(verts, verts[1:]):
        c = colour_of.get(frozenset((u, v)))
        if c is None:
            raise AssertionError(f"route used a non-edge {tpl.label(u)}-{tpl.label(v)}")
        colours.append(c)
    return ColouredWalk(verts, colours)


def gadget_degeneracy_order(tpl: GadgetTemplate) -> tuple:
    """Ordering with the A vertices first and at most 2 earlier neighbours each:
    all a's, b_0, b_1, the triples (c_i, b_{3i}, b_{3i+1}), then b_2, b_5, ..."""
    ell = tpl.ell
    order = list(tpl.role_a) + [tpl.b(0), tpl.b(1)]
    for i in range(1, ell + 1):
        order += [tpl.c(i), tpl.b(3 * i), tpl.b(3 * i + 1)]
    order += [tpl.b(3 * i + 2) for i in range(ell)]
    return tuple(order)


# ---------------------------------------------------------------------------
# robustly matchable bipartite template


@dataclass(frozen=True)
class RmbgTemplate:
    """Bounded-degree bipartite template on X (3m) vs Y (2m) + Z (m + deleted).

    Right vertices are indexed 0..5m+deleted-1 with Y first.  The defining
    property, verified rather than assumed: deleting any ``deleted``-subset of
    the Z side leaves a graph with a perfect matching covering X.
    """

    m: int
    beta: float
    seed: int
    adj: tuple  # adj[x] = sorted right ids
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def nx(self) -> int:
        return 3 * self.m

    @property
    def ny(self) -> int:
        return 2 * self.m

    @property
    def deleted(self) -> int:
        return _deleted_size(self.m, self.beta)

    @property
    def nz(self) -> int:
        return self.m + self.deleted

    def right_degrees(self) -> list[int]:
        deg = [0] * (self.ny + self.nz)
        for row in self.adj:
            for r in row:
                deg[r] += 1
        return deg

    def degree_bounds(self) -> tuple[int, int]:
        degs = [len(row) for row in self.adj] + self.right_degrees()
        return min(degs), max(degs)

    def num_edges(self) -> int:
        return sum(len(row) for row in self.adj)


def _deleted_size(m: int, beta: float) -> int:
    return math.ceil(beta * m - 1e-9)


def _matching_for_deletion(tpl: RmbgTemplate, removed: frozenset):
    keep = [r for r in range(tpl.ny + tpl.nz) if r not in removed]
    index = {r: k for k, r in enumerate(keep)}
    adj = [[index[r] for r in row if r not in removed] for row in tpl.adj]
    return perfect_matching(tpl.nx, len(keep), adj)


def verify_rmbg(
    tpl: RmbgTemplate,
    exhaustive_budget: int = 20000,
    sample_count: int = 10000,
    seed: int = 0,
) -> dict:
    """Check the deletion-robust matching property; returns the audit stats.

    Exhausts all deletions when the subset count fits the budget; otherwise
    samples uniformly and additionally probes deletions packed onto the
    lowest-degree Z vertices, where Hall violations would show up first.
    Raises RmbgError on the first failing deletion.
    """
    d = tpl.deleted
    z_ids = list(range(tpl.ny, tpl.ny + tpl.nz))
    total = math.comb(tpl.nz, d)

    def run(subsets, mode, checked_cap=None):
        checked = 0
        for sub in subsets:
            removed = frozenset(sub)
            if not _matching_for_deletion(tpl, removed):
                raise RmbgError(
                    f"deletion {sorted(removed)} leaves no perfect matching ({mode})"
                )
            checked += 1
            if checked_cap and checked >= checked_cap:
                break
        return checked

    if total <= exhaustive_budget:
        checked = run(itertools.combinations(z_ids, d), "exhaustive")
        return {"mode": "exhaustive", "checked": checked, "total": total}

    rng = random.Random(seed)
    checked = run(
        (rng.sample(z_ids, d) for _ in range(sample_count)), "sampled"
    )
    deg = tpl.right_degrees()
    pool = sorted(z_ids, key=lambda r: (deg[r], r))[: d + 6]
    extremal = run(itertools.combinations(pool, d), "extremal")
    return {
        "mode": "sampled",
        "checked": checked,
        "extremal": extremal,
        "total": total,
    }


def _generate_rmbg_candidate(m: int, beta: float, rng: random.Random) -> RmbgTemplate:
    ny = 2 * m
    nz = m + _deleted_size(m, beta)
    nright = ny + nz
    rows = []
    for _ in range(3 * m):
        nbrs = {rng.randrange(ny)}  # a Y neighbour is necessary for robustness
        while len(nbrs) < 3:
            nbrs.add(rng.randrange(nright))
        rows.append(sorted(nbrs))
    # degree repair: rights below degree 2 each get a fresh X partner per
    # round, partners forming a matching (distinct, lowest degree first)
    for _ in range(3):
        deg = [0] * nright
        for row in rows:
            for r in row:
                deg[r] += 1
        deficient = [r for r in range(nright) if deg[r] < 2]
        if not deficient:
            break
        order = sorted(range(3 * m), key=lambda x: (len(rows[x]), x))
        taken = iter(order)
        for r in deficient:
            for x in taken:
                if r not in rows[x]:
                    rows[x] = sorted(rows[x] + [r])
                    break
    return RmbgTemplate(m, beta, 0, tuple(tuple(r) for r in rows))


_rmbg_memo: dict = {}


def _cache_path(cache_dir, m, beta, seed):
    return os.path.join(cache_dir, f"rmbg_m{m}_beta{beta:g}_seed{seed}.json")


def build_rmbg(
    m: int,
    beta: float,
    seed: int = 0,
    max_retries: int = 20,
    exhaustive_budget: int = 20000,
    sample_count: int = 10000,
    cache_dir: str | None = None,
) -> RmbgTemplate:
    """Generate-and-verify a robust template; deterministic in (m, beta, seed).

    Each X vertex draws one Y neighbour plus two more across Y and Z, then
    degree-deficient right vertices are repaired by adjoining matchings.
    Candidates failing verify_rmbg are regenerated.  With cache_dir set,
    accepted templates are stored as JSON and re-verified when loaded.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    if not 0 < beta < 1:
        raise ValueError("need beta in (0, 1)")
    if _deleted_size(m, beta) < 1:
        raise ValueError("beta*m must round up to at least one deletable vertex")
    key = (m, round(beta, 9), seed)
    if key in _rmbg_memo:
        tpl = _rmbg_memo[key]
        if cache_dir is not None and not os.path.exists(_cache_path(cache_dir, m, beta, seed)):
            _save_rmbg_cache(tpl, cache_dir)
        return tpl

    if cache_dir is not None:
        tpl = _load_rmbg_cache(m, beta, seed, cache_dir, exhaustive_budget, sample_count)
        if tpl is not None:
            _rmbg_memo[key] = tpl
            return tpl

    rng = random.Random(seed)
    last_error = None
    for attempt in range(1, max_retries + 1):
        cand = _generate_rmbg_candidate(m, beta, rng)
        lo, hi = cand.degree_bounds()
        if lo < 2 or hi > 40:
            last_error = RmbgError(f"degree bounds violated: {lo}..{hi}")
            continue
        try:
            stats = verify_rmbg(cand, exhaustive_budget, sample_count, seed)
        except RmbgError as e:
            last_error = e
            continue
        stats["retries"] = attempt - 1
        tpl = RmbgTemplate(m, beta, seed, cand.adj, stats)
        _rmbg_memo[key] = tpl
        if cache_dir is not None:
            _save_rmbg_cache(tpl, cache_dir)
        return tpl
    raise RmbgError(
        f"no robust template at m={m}, beta={beta} in {max_retries} tries: {last_error}"
    )


def _save_rmbg_cache(tpl: RmbgTemplate, cache_dir: str) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    obj = {
        "m": tpl.m,
        "beta": tpl.beta,
        "seed": tpl.seed,
        "edges": [[x, r] for x, row in enumerate(tpl.adj) for r in row],
    }
    with open(_cache_path(cache_dir, tpl.m, tpl.beta, tpl.seed), "w", encoding="utf-8") as fh:
        json.dump(obj, fh)


def _load_rmbg_cache(m, beta, seed, cache_dir, exhaustive_budget, sample_count):
    path = _cache_path(cache_dir, m, beta, seed)
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        rows: list[list[int]] = [[] for _ in range(3 * obj["m"])]
        for x, r in obj["edges"]:
            rows[x].append(r)
        tpl = RmbgTemplate(
            obj["m"], obj["beta"], obj["seed"], tuple(tuple(sorted(r)) for r in rows)
        )
        lo, hi = tpl.degree_bounds()
        if not (obj["m"], obj["beta"], obj["seed"]) == (m, beta, seed) or lo < 2 or hi > 40:
            return None
        stats = verify_rmbg(tpl, exhaustive_budget, sample_count, seed)
        stats["loaded_from"] = path
        return RmbgTemplate(m, beta, seed, tpl.adj, stats)
    except (OSError, ValueError, KeyError, IndexError, RmbgError):
        return None  # stale or corrupt cache entries are simply regenerated


# ---------------------------------------------------------------------------
# gadget embedding


@dataclass(frozen=True)
class GadgetEmbedding:
    """One gadget placed in the host collection at a global colour window."""

    template: GadgetTemplate
    window: tuple  # (mu, nu), 0-based global colours, inclusive
    mapping: dict  # template vertex id -> host vertex

    @property
    def a_hosts(self) -> tuple:
        return tuple(self.mapping[v] for v in self.template.role_a)

    @property
    def b0_host(self) -> int:
        return self.mapping[self.template.b(0)]

    @property
    def blast_host(self) -> int:
        return self.mapping[self.template.b(3 * self.template.ell + 1)]

    @property
    def internal_hosts(self) -> tuple:
        """Images of the B and C roles: the vertices this gadget consumes."""
        t = self.template
        return tuple(self.mapping[v] for v in t.role_b + t.role_c)


def embed_gadget(
    collection: GraphCollection,
    window: tuple,
    anchors: Sequence[int],
    forbidden: Iterable[int] = (),
) -> GadgetEmbedding:
    """Embed the gadget with role A pinned to ``anchors`` (a_1 maps to
    anchors[0] and so on), every other role landing outside ``forbidden``.

    The window (mu, nu) must span exactly 4l+2 global colours for
    l = len(anchors) - 1; template colour j is realized in graph mu + j - 1.
    """
    ell = len(anchors) - 1
    if ell < 1:
        raise ValueError("need at least two anchor vertices")
    mu, nu = window
    if nu - mu + 1 != 4 * ell + 2:
        raise ValueError(
            f"window {window} spans {nu - mu + 1} colours, gadget needs {4 * ell + 2}"
        )
    if mu < 0 or nu >= collection.m:
        raise ValueError(f"window {window} out of colour range 0..{collection.m - 1}")
    tpl = build_gadget_template(ell)
    req = EmbeddingRequest(
        edges=[(u, v, mu + c - 1) for u, v, c in tpl.edges],
        independent=tpl.role_a,
        anchors={tpl.a(i + 1): anchors[i] for i in range(ell + 1)},
        target=range(collection.n),
        forbidden=forbidden,
        order=gadget_degeneracy_order(tpl),
        k=2,
    )
    mapping = greedy_pattern_embed(collection, req)
    return GadgetEmbedding(tpl, (mu, nu), mapping)


# ---------------------------------------------------------------------------
# the absorbing structure


@dataclass(frozen=True)
class AbsorberStructure:
    """Gadgets, template, and cherries wired to absorb any flex-sized subset.

    The absorbing path occupies global colours 0..t-1 and runs z1 to z2; its
    internal vertices are always absorb_set plus the chosen flex subset of
    z_rest.  windows[i] covers gadget i; cherries[k] = (left, middle, right,
    first colour) fills the 2-colour gaps between consecutive gadgets.
    """

    collection: GraphCollection
    template: RmbgTemplate
    z1: int
    z2: int
    z_rest: tuple       # hosts of the template Z side, sorted
    y_hosts: tuple      # hosts of the template Y side, in template order
    gadgets: tuple      # GadgetEmbedding per template X vertex
    cherries: tuple     # (left_host, middle, right_host, colour) per junction
    t: int
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def flex(self) -> int:
        return self.template.m

    @property
    def absorb_set(self) -> tuple:
        inner = set(self.y_hosts)
        for gad in self.gadgets:
            inner.update(gad.internal_hosts)
        inner.update(mid for _, mid, _, _ in self.cherries)
        return tuple(sorted(inner))

    def host_of_right(self, r: int) -> int:
        if r < self.template.ny:
            return self.y_hosts[r]
        return self.z_rest[r - self.template.ny]


def build_absorbing_structure(
    collection: GraphCollection,
    zset: Iterable[int],
    z1: int,
    z2: int,
    flex_size: int,
    seed: int = 0,
    max_retries: int = 20,
    template: RmbgTemplate | None = None,
    cache_dir: str | None = None,
) -> AbsorberStructure:
    """Assemble the absorbing structure over colours 0..t-1.

    One gadget per template X vertex is embedded in its colour window with
    role A anchored on the hosts of that vertex's template neighbourhood; the
    forbidden set threads through so gadget interiors stay disjoint from each
    other and from the hosted Y and Z sides.  Cherry middles come last, from
    the untouched remainder of the vertex set.  The reservoir splits as
    |Z| = flex_size + slack + 2 with slack = the template's deletable count.
    """
    z_all = sorted(set(zset))
    if z1 == z2 or z1 not in z_all or z2 not in z_all:
        raise ValueError("z1, z2 must be two distinct reservoir vertices")
    z_rest = tuple(v for v in z_all if v not in (z1, z2))
    slack = len(z_rest) - flex_size
    if flex_size < 2 or slack < 1:
        raise ValueError(
            f"reservoir of {len(z_all)} cannot host flex {flex_size} plus slack"
        )
    if template is None:
        template = build_rmbg(flex_size, slack / flex_size, seed, cache_dir=cache_dir)
    if template.m != flex_size or template.nz != len(z_rest):
        raise ValueError("template does not fit the reservoir split")

    n = collection.n
    degs = [len(row) for row in template.adj]
    t = 4 * template.num_edges() + 2
    if collection.m < t:
        raise ValueError(f"structure needs {t} colours, collection has {collection.m}")

    outside = sorted(set(range(n)) - set(z_all))
    if len(outside) < template.ny:
        raise ValueError("not enough vertices outside the reservoir")
    rng = random.Random(seed)
    last = None
    for _ in range(max_retries):
        y_hosts = tuple(sorted(rng.sample(outside, template.ny)))
        try:
            return _assemble(
                collection, template, z1, z2, z_rest, y_hosts, degs, t
            )
        except EmbedStuck as e:
            last = e
    raise AbsorberError(f"structure assembly failed after {max_retries} tries: {last}")


def _assemble(collection, template, z1, z2, z_rest, y_hosts, degs, t):
    def host(r):
        return y_hosts[r] if r < template.ny else z_rest[r - template.ny]

    used = set(y_hosts) | set(z_rest) | {z1, z2}
    gadgets = []
    nu = 0  # running 1-based colour total
    for x in range(template.nx):
        mu1 = nu + 3
        nu = nu + 4 * degs[x]
        anchors = [host(r) for r in template.adj[x]]
        gad = embed_gadget(collection, (mu1 - 1, nu - 1), anchors, forbidden=used)
        used.update(gad.internal_hosts)
        gadgets.append(gad)
    if nu + 2 != t:
        raise AssertionError("colour windows do not tile 1..t")

    cherries = []
    hops = (
        [(z1, gadgets[0].b0_host, 0)]
        + [
            (gadgets[i].blast_host, gadgets[i + 1].b0_host, gadgets[i].window[1] + 1)
            for i in range(len(gadgets) - 1)
        ]
        + [(gadgets[-1].blast_host, z2, t - 2)]
    )
    for left, right, colour in hops:
        mid = cherry_connect(
            collection, colour, colour + 1, left, right, range(collection.n), used
        )
        used.add(mid)
        cherries.append((left, mid, right, colour))

    structure = AbsorberStructure(
        collection,
        template,
        z1,
        z2,
        z_rest,
        y_hosts,
        tuple(gadgets),
        tuple(cherries),
        t,
        stats={"e_template": template.num_edges()},
    )
    a_size = len(structure.absorb_set)
    if a_size != 4 * template.num_edges() - template.m + 1:
        raise AssertionError(f"absorbing set size {a_size} off the t = a + flex + 1 ledger")
    return structure


def absorb(structure: AbsorberStructure, zprime: Iterable[int]) -> ColouredWalk:
    """The z1, z2-path with colour i on edge i whose interior is exactly
    absorb_set plus zprime.

    zprime must be a flex-sized subset of z_rest.  The template matching on
    X versus Y plus the kept Z vertices decides, per gadget, which anchored
    vertex the fixed colour sequence threads through; everything else about
    the output (endpoints, colour order, the other vertices) never varies
    with zprime, which is what makes late splicing safe.
    """
    tpl = structure.template
    zp = sorted(set(zprime))
    zr = set(structure.z_rest)
    if len(zp) != tpl.m or not set(zp) <= zr:
        raise ValueError(f"zprime must be {tpl.m} vertices from z_rest")
    kept_hosts = set(zp)
    removed = {
        tpl.ny + i for i, v in enumerate(structure.z_rest) if v not in kept_hosts
    }
    keep = [r for r in range(tpl.ny + tpl.nz) if r not in removed]
    index = {r: k for k, r in enumerate(keep)}
    adj = [[index[r] for r in row if r not in removed] for row in tpl.adj]
    result = perfect_matching(tpl.nx, len(keep), adj)
    if not result:
        raise AbsorberError(
            "no template matching for this zprime; the structure's robustness "
            "verification did not cover it"
        )
    partner = {x: keep[r] for x, r in result.matching}

    verts = [structure.z1]
    colours = []
    for i, gad in enumerate(structure.gadgets):
        left, mid, right, colour = structure.cherries[i]
        verts.append(mid)
        colours += [colour, colour + 1]
        x_adj = tpl.adj[i]
        pos = x_adj.index(partner[i]) + 1
        route = gadget_absorb_route(gad.template, pos)
        mu = gad.window[0]
        verts += [gad.mapping[v] for v in route.vertices]
        colours += [mu + c - 1 for c in route.colours]
    left, mid, right, colour = structure.cherries[-1]
    verts += [mid, structure.z2]
    colours += [colour, colour + 1]

    walk = ColouredWalk(verts, colours)
    interior = set(walk.vertices[1:-1])
    expected = set(structure.absorb_set) | set(zp)
    if colours != list(range(structure.t)) or interior != expected:
        raise AbsorberError("absorb output failed its own coverage ledger")
    return walk
