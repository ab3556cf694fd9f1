"""End-to-end solver: reservoir, absorbing structure, path cover, connection.

The pipeline works internally with the reduced collection (graph j = the
graph of the j-th pattern colour) so that position and colour coincide;
the final cycle is reported in the caller's colours.  Global colour ledger,
0-based, with t the absorbing structure's colour count, K parts, s kept
paths: colours 0..t-1 absorb, then per path i a two-colour junction cherry
at t+i(K+1) followed by K-1 path colours, then a greedy tail on the last
n - t - s(K+1) colours that ends in the reservoir vertex z1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .absorber import (
    AbsorberError,
    RmbgError,
    absorb,
    build_absorbing_structure,
    build_rmbg,
)
from .core import (
    ColourPattern,
    ColouredWalk,
    GraphCollection,
    SolverParams,
    min_collection_degree,
    reduce_pattern_to_identity,
    verify_pattern_cycle,
)
from .embed import (
    EmbedStuck,
    PartitionError,
    ReservoirError,
    cherry_connect,
    random_balanced_partition,
    sample_reservoir,
)
from .oracle import exact_solve
from .path_cover import PathCoverAbort, path_builder

__all__ = ["ConnectStall", "SolveResult", "audit_run", "solve"]

STAGE_ORDER = (
    "precondition",
    "reservoir",
    "absorber",
    "partition",
    "path_cover",
    "connect",
    "verify",
)


class ConnectStall(RuntimeError):
    """The greedy connection walk ran out of usable neighbours."""


@dataclass(frozen=True)
class SolveResult:
    status: str  # "cycle" | "refused" | "no-solution" | "budget-exhausted" | "failed"
    cycle: ColouredWalk | None
    reason: str | None
    trace: dict

    def __bool__(self) -> bool:
        return self.status == "cycle"


class _StageLog:
    def __init__(self):
        self.data = {}

    def record(self, name, ok, stats):
        entry = self.data.setdefault(name, {"name": name, "attempts": 0, "ok": False, "stats": {}})
        entry["attempts"] += 1
        entry["ok"] = bool(ok)
        entry["stats"] = stats

    def stages(self):
        return [self.data[name] for name in STAGE_ORDER if name in self.data]


def _sub_seed(seed: int, attempt: int, stream: int) -> int:
    return (seed * 1_000_003 + attempt) * 1_000_003 + stream


def _derive_plan(n: int, alpha: float, params: SolverParams, seed: int) -> dict:
    """Fix the integer shape of the construction before touching the graphs.

    Flex and slack sizes shrink with n so the absorbing structure's colour
    demand t stays well under n; the template is built here because t is
    4 e(template) + 2 and the part arithmetic needs it.  Returns a refusal
    reason under "refuse" when no viable shape exists.
    """
    if params.flex_size is not None:
        flex = params.flex_size
    elif n >= 800:
        flex = 8
    elif n >= 600:
        flex = 6
    else:
        flex = 5
    if params.reservoir_slack is not None:
        slack = params.reservoir_slack
    else:
        slack = 5 if n >= 800 else 4
    slack = min(slack, flex + 1)  # keeps the walk's reservoir usage a minority
    template = build_rmbg(flex, slack / flex, seed)  # memoized; reused by the build
    t = 4 * template.num_edges() + 2
    n_prime = n - t - slack - 1
    plan = {
        "flex": flex,
        "slack": slack,
        "reservoir_size": flex + slack + 2,
        "t": t,
        "n_prime": n_prime,
    }
    if n_prime < 8:
        plan["refuse"] = f"absorbing structure needs {t} colours, leaving {n_prime}"
        return plan
    if params.k_part is not None:
        k = params.k_part
    else:
        k = next((c for c in range(8, 1, -1) if n_prime // c >= 80), 3)
    p = n_prime // k
    epsilon = params.epsilon if params.epsilon is not None else max(0.25, 1 / (k + 1) + 0.05)
    s = math.floor((1 - epsilon) * p)
    c = n_prime - s * k
    tail = c - s + slack + 1
    plan.update({"k": k, "p": p, "epsilon": epsilon, "steps": s, "tail_colours": tail})
    if p < k + 1 or s < 1:
        plan["refuse"] = f"parts of {p} over {k} colours leave no room for paths"
    elif tail < 1:
        plan["refuse"] = "colour ledger leaves no tail to reach the reservoir"
    return plan


def _margin_ladder(alpha: float) -> list:
    rungs = [alpha / 4, alpha / 8, 0.02, 0.0]
    out = []
    for r in rungs:
        r = max(0.0, r)
        if not out or r < out[-1] - 1e-12:
            out.append(r)
    return out


def _pick_reservoir(H, plan, params, seed, alpha):
    """Walk the margin ladder; below the last rung, fall back to the best
    failing sample unverified rather than refusing outright."""
    size = plan["reservoir_size"]
    attempts = 0
    best = None
    for margin in _margin_ladder(alpha):
        try:
            z = sample_reservoir(H, margin=margin, seed=seed, size=size, max_retries=params.max_retries)
            return z, {"size": size, "margin": margin, "verified": True, "attempts": attempts + 1}
        except ReservoirError as e:
            attempts += e.attempts
            if best is None or e.worst.worst_ratio > best[1]:
                best = (e.sample, e.worst.worst_ratio)
    return sorted(best[0]), {
        "size": size,
        "margin": None,
        "verified": False,
        "attempts": attempts,
        "best_ratio": best[1],
    }


def _expected_path_colours(t, k, i):
    base = t + i * (k + 1)
    return list(range(base + 2, base + k + 1))


def _connect(H, structure, paths, part_rest, leftovers, plan):
    """Greedy z2-to-z1 walk covering everything outside the absorbing path.

    Junction middles are drawn leftover-first (partition remainder, then
    shrunken parts, then reservoir surplus under the slack budget); the tail
    covers the rest one new vertex per edge with one-step lookahead, so a
    pick never strands the next colour.  Returns the walk and the flex
    subset the walk left uncovered.
    """
    n = H.n
    t = structure.t
    k = plan["k"]
    slack = plan["slack"]
    rest_mask = 0
    for v in leftovers:
        rest_mask |= 1 << v
    parts_mask = 0
    for v in part_rest:
        parts_mask |= 1 << v
    z_mask = 0
    for v in structure.z_rest:
        z_mask |= 1 << v
    covered_z = 0

    verts = [structure.z2]
    colours = []
    for i, path in enumerate(paths):
        c1 = t + i * (k + 1)
        if list(path.colours) != _expected_path_colours(t, k, i):
            raise AssertionError("path colours drifted from the junction schedule")
        target = path.vertices[0]
        mid = None
        pools = [rest_mask, parts_mask]
        if covered_z < slack:
            pools.append(z_mask)
        for pool in pools:
            if pool == 0:
                continue
            try:
                mid = cherry_connect(H, c1, c1 + 1, verts[-1], target, _bits_list(pool), ())
                break
            except EmbedStuck:
                continue
        if mid is None:
            raise ConnectStall(f"no junction middle before path {i}")
        bit = 1 << mid
        if rest_mask & bit:
            rest_mask ^= bit
        elif parts_mask & bit:
            parts_mask ^= bit
        else:
            z_mask ^= bit
            covered_z += 1
        verts.append(mid)
        colours += [c1, c1 + 1]
        verts.extend(path.vertices)
        colours.extend(path.colours)

    colour = t + len(paths) * (k + 1)
    need = (rest_mask | parts_mask).bit_count() + (slack - covered_z)
    if n - colour != need + 1:
        raise AssertionError("tail colour count off the coverage ledger")
    while colour < n - 1:
        u = verts[-1]
        row = H[colour].row(u)
        cands = row & (rest_mask | parts_mask)
        if covered_z < slack:
            cands |= row & z_mask
        w = _tail_pick(H, cands, colour, rest_mask, parts_mask, z_mask, covered_z, slack, structure.z1)
        if w is None:
            raise ConnectStall(f"tail stalled at colour {colour} from vertex {u}")
        bit = 1 << w
        if rest_mask & bit:
            rest_mask ^= bit
        elif parts_mask & bit:
            parts_mask ^= bit
        else:
            z_mask ^= bit
            covered_z += 1
        verts.append(w)
        colours.append(colour)
        colour += 1
    if not H[n - 1].has_edge(verts[-1], structure.z1):
        raise ConnectStall("closing edge into the reservoir is missing")
    verts.append(structure.z1)
    colours.append(n - 1)

    zprime = sorted(_bits_list(z_mask))
    stats = {
        "covered_z": covered_z,
        "tail_colours": plan["tail_colours"],
        "zprime_size": len(zprime),
    }
    return verts, colours, zprime, stats


def _bits_list(mask):
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length() - 1)
        mask ^= b
    return out


def _tail_pick(H, cands, colour, rest_mask, parts_mask, z_mask, covered_z, slack, z1):
    """Smallest feasible candidate under one-step lookahead: after taking w,
    either something coverable remains adjacent in the next colour, or
    nothing remains and w reaches z1 in the final colour."""
    r_pool = cands & (rest_mask | parts_mask)
    z_pool = cands & z_mask
    for pool in (r_pool, z_pool):
        m = pool
        while m:
            b = m & -m
            m ^= b
            w = b.bit_length() - 1
            in_z = bool(z_mask & b)
            cz = covered_z + (1 if in_z else 0)
            future = (rest_mask | parts_mask) & ~b
            if cz < slack:
                future |= z_mask & ~b
            if future == 0:
                if H[colour + 1].has_edge(w, z1):
                    return w
            elif H[colour + 1].row(w) & future:
                return w
    return None


def _run_construction(collection, pattern, H, params, plan, alpha, attempt, log):
    seed = params.seed
    z_all, res_stats = _pick_reservoir(H, plan, params, _sub_seed(seed, attempt, 1), alpha)
    log.record("reservoir", True, res_stats)

    z1, z2 = z_all[0], z_all[1]
    structure = build_absorbing_structure(
        H,
        z_all,
        z1,
        z2,
        plan["flex"],
        seed=_sub_seed(seed, attempt, 2),
        max_retries=params.max_retries,
        template=build_rmbg(plan["flex"], plan["slack"] / plan["flex"], params.seed),
    )
    if structure.t != plan["t"]:
        raise AssertionError("structure colour count drifted from the plan")
    log.record(
        "absorber",
        True,
        {
            "flex": plan["flex"],
            "slack": plan["slack"],
            "t": structure.t,
            "template_edges": structure.template.num_edges(),
            "absorb_set": len(structure.absorb_set),
        },
    )

    used = set(structure.absorb_set) | set(z_all)
    free = sorted(set(range(H.n)) - used)
    partition = random_balanced_partition(
        free,
        plan["k"],
        H,
        margin=alpha / 4,
        seed=_sub_seed(seed, attempt, 3),
        max_retries=params.max_retries,
    )
    log.record(
        "partition",
        True,
        {"k": plan["k"], "p": plan["p"], "rest": len(partition.rest), "margin": alpha / 4},
    )

    cover = path_builder(
        H,
        partition.parts,
        plan["steps"],
        structure.t + 2,
        plan["k"] + 1,
        seed=_sub_seed(seed, attempt, 4),
    )
    log.record(
        "path_cover",
        True,
        {
            "steps": cover.steps,
            "worst_ratio": min(cover.trajectory),
            "final_ratio": cover.trajectory[-1],
            "trajectory": list(cover.trajectory),
        },
    )

    part_rest = [v for part in cover.parts_remaining for v in part]
    verts, colours, zprime, conn_stats = _connect(
        H, structure, cover.paths, part_rest, partition.rest, plan
    )
    log.record("connect", True, conn_stats)

    head = absorb(structure, zprime)
    cycle_vertices = list(head.vertices) + verts[1:-1]
    cycle_colours = list(head.colours) + colours
    if cycle_colours != list(range(H.n)):
        raise AssertionError("assembled cycle does not use each position once")
    return ColouredWalk(cycle_vertices, [pattern[j] for j in range(H.n)], closed=True)


def solve(
    collection: GraphCollection,
    pattern: ColourPattern | None = None,
    params: SolverParams | None = None,
) -> SolveResult:
    """Find a Hamilton cycle whose j-th edge lies in the graph of the
    pattern's j-th colour.

    Requires a margin above one half in every used graph's minimum degree
    (taken from params.alpha, or inferred); instances below alpha_floor or
    too small for the construction are refused, except that very small
    instances go to the exact oracle.  The result's trace records each
    stage's attempts and statistics; the returned cycle, if any, has been
    re-verified edge by edge against the inputs.
    """
    params = params or SolverParams()
    n = collection.n
    if pattern is None:
        if collection.m < n:
            raise ValueError("default identity pattern needs at least n graphs")
        pattern = ColourPattern.identity(n)
    pattern.validate_for(collection)

    log = _StageLog()
    H = reduce_pattern_to_identity(collection, pattern)
    delta = min_collection_degree(H)
    inferred = params.alpha is None
    alpha = (delta / n - 0.5) if inferred else params.alpha
    pre = {
        "n": n,
        "m": collection.m,
        "min_degree": delta,
        "alpha": alpha,
        "alpha_inferred": inferred,
    }

    if alpha < params.alpha_floor:
        pre["refuse"] = (
            f"degree margin {alpha:.4f} below floor {params.alpha_floor}"
        )
        log.record("precondition", False, pre)
        return SolveResult("refused", None, pre["refuse"], _trace(log, None))

    if n <= params.small_threshold:
        pre["delegated"] = True
        log.record("precondition", True, pre)
        res = exact_solve(collection, pattern, params.oracle_budget, any_rotation=True)
        if res.status != "cycle":
            return SolveResult(res.status, None, "exact search: " + res.status, _trace(log, None))
        check = verify_pattern_cycle(collection, pattern, res.cycle)
        log.record("verify", check.ok, {"ok": check.ok})
        if not check.ok:
            return SolveResult("failed", None, f"oracle cycle failed verify: {check.reason}", _trace(log, None))
        return SolveResult("cycle", res.cycle, None, _trace(log, res.cycle, plan=None))

    try:
        plan = _derive_plan(n, alpha, params, params.seed)
    except RmbgError as e:
        pre["refuse"] = f"no robust template: {e}"
        log.record("precondition", False, pre)
        return SolveResult("failed", None, pre["refuse"], _trace(log, None))
    pre["plan"] = plan
    if "refuse" in plan:
        log.record("precondition", False, pre)
        return SolveResult("refused", None, plan["refuse"], _trace(log, None, plan))
    log.record("precondition", True, pre)

    last_error = None
    for attempt in range(params.max_retries):
        try:
            cycle = _run_construction(collection, pattern, H, params, plan, alpha, attempt, log)
        except (
            AbsorberError,
            RmbgError,
            PartitionError,
            PathCoverAbort,
            ConnectStall,
            EmbedStuck,
        ) as e:
            last_error = e
            stage = _stage_of(e)
            entry = log.data.setdefault(
                stage, {"name": stage, "attempts": 0, "ok": False, "stats": {}}
            )
            entry["attempts"] += 1
            entry["ok"] = False
            entry["stats"] = {"error": str(e)}
            continue
        check = verify_pattern_cycle(collection, pattern, cycle)
        log.record("verify", check.ok, {"ok": check.ok, "reason": check.reason})
        if not check.ok:
            return SolveResult(
                "failed", None, f"constructed cycle failed verify: {check.reason}", _trace(log, None, plan)
            )
        return SolveResult("cycle", cycle, None, _trace(log, cycle, plan))
    return SolveResult(
        "failed",
        None,
        f"all {params.max_retries} attempts failed; last: {last_error}",
        _trace(log, None, plan),
    )


def _stage_of(error) -> str:
    if isinstance(error, (AbsorberError, RmbgError)):
        return "absorber"
    if isinstance(error, PartitionError):
        return "partition"
    if isinstance(error, PathCoverAbort):
        return "path_cover"
    if isinstance(error, (ConnectStall,)):
        return "connect"
    return "absorber"  # EmbedStuck escapes only from structure assembly


def _trace(log: _StageLog, cycle, plan=None) -> dict:
    trace = {"stages": log.stages(), "colours_used": None, "plan": plan}
    if cycle is not None:
        trace["colours_used"] = cycle.num_edges
        trace["cycle"] = list(cycle.vertices)
    return trace


def audit_run(trace: dict) -> dict:
    """Cross-check a solve trace's recorded arithmetic: the colour ledger
    must tile 0..n-1 and the walk may claim only a minority of the
    reservoir.  Audits the numbers as recorded, not the graphs."""
    checks = {}
    stages = {s["name"]: s for s in trace.get("stages", [])}
    plan = trace.get("plan") or {}
    ok_stage_order = [s["name"] for s in trace.get("stages", [])] == [
        name for name in STAGE_ORDER if name in stages
    ]
    checks["stage_order"] = ok_stage_order
    if plan and "refuse" not in plan and "k" in plan:
        n = stages["precondition"]["stats"]["n"] if "precondition" in stages else None
        t, s, k = plan["t"], plan["steps"], plan["k"]
        checks["colour_tiling"] = (
            n is not None and t + s * (k + 1) + plan["tail_colours"] == n
        )
        checks["reservoir_minority"] = plan["slack"] <= plan["flex"] + 1
        if "connect" in stages and stages["connect"]["ok"]:
            cs = stages["connect"]["stats"]
            checks["reservoir_cover"] = (
                cs["covered_z"] == plan["slack"] and cs["zprime_size"] == plan["flex"]
            )
        if "absorber" in stages and stages["absorber"]["ok"]:
            ab = stages["absorber"]["stats"]
            checks["absorber_ledger"] = (
                ab["t"] == 4 * ab["template_edges"] + 2
                and ab["absorb_set"] == 4 * ab["template_edges"] - ab["flex"] + 1
            )
    if "verify" in stages:
        checks["verified"] = bool(stages["verify"]["ok"])
    checks["ok"] = all(checks.values())
    return checks
