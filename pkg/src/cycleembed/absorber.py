import math
from itertools import chain

from loguru import logger
from pydantic.dataclasses import dataclass

from .constant import ABSORBERS_PER_VERTEX
from .connector import connect_pairs, connect_single_pair
from .exceptions import (
    AbsorberError,
    BridgeError,
    CapacityError,
    ConnectionFailure,
    ConnectorError,
    FrontierStarvationError,
    HallViolationError,
    RobustSetError,
    SearchBudgetError,
    TemplateError,
)
from .expansion import generalized_matching, split_expanding, star_matching
from .graph import HostDigraph, HostGraph
from .template import build_flexible_template, template_graph
from .types import (
    Absorber,
    ConnectionRequest,
    ConstantsProfile,
    FlexibleBipartiteTemplate,
    PathBundle,
    RandomSeed,
    RobustSet,
)


def gadget_size(k: int) -> int:
    return 18 * k * k + 2


def traversal_schedule(k: int, absorb: bool) -> list[tuple[int, bool]]:
    """
    Order in which the connecting paths P₁..P₃ₖ of a gadget are walked.

    Each entry is (i, forward) where `forward` means Pᵢ is walked from xᵢ to yᵢ. Without the
    absorbed vertex the walk starts x₀x₁ and runs odd paths forward; with it the walk starts
    x₀vy₁ and runs odd paths backward. Consecutive paths meet along an edge xᵢxᵢ₊₁ or yᵢyᵢ₊₁ of Q,
    and P₃ₖ is left at the end adjacent to y₀ for either parity of k.
    """
    return [(i, (i % 2 == 1) != absorb) for i in range(1, 3 * k + 1)]


def assemble_absorber(v: int, q_path: list[int], p_paths: list[list[int]]) -> Absorber:
    """
    Assemble both traversals of a gadget from its routed paths.

    Parameters
    ----------
    v: `int`
        Vertex to absorb, adjacent to x₀ and y₁
    q_path: `list[int]`
        The path x₀x₁…x₃ₖy₀y₃ₖ…y₁ of length 6k+1
    p_paths: `list[list[int]]`
        Paths P₁..P₃ₖ, Pᵢ running from xᵢ to yᵢ

    Returns
    -------
    `cycleembed.Absorber`
        Gadget on 18k²+2 vertices with ends (x₀, y₀)
    """
    k = len(p_paths) // 3
    if k < 1 or len(p_paths) != 3 * k or len(q_path) != 6 * k + 2:
        raise ValueError(
            f"Expected 3k connecting paths and a Q path on 6k+2 vertices. "
            f"Got {len(p_paths)} and {len(q_path)}."
        )
    x = q_path[: 3 * k + 1]
    y0 = q_path[3 * k + 1]
    tail = q_path[3 * k + 2 :]
    y = [y0] + [tail[3 * k - i] for i in range(1, 3 * k + 1)]
    for i, path in enumerate(p_paths, start=1):
        if (path[0], path[-1]) != (x[i], y[i]):
            raise ValueError(f"P{i} runs {path[0]}..{path[-1]}, expected {x[i]}..{y[i]}.")

    walks = {}
    for absorb in (False, True):
        walk = [x[0], v] if absorb else [x[0]]
        for i, forward in traversal_schedule(k, absorb):
            path = p_paths[i - 1]
            walk += path if forward else path[::-1]
        walk.append(y0)
        walks[absorb] = walk

    vertices = sorted(set(q_path).union(*p_paths))
    return Absorber(
        vertices=vertices,
        ends=(x[0], y0),
        absorbed=v,
        path_without=walks[False],
        path_with=walks[True],
    )


def _route(
    host: HostGraph | HostDigraph,
    request: ConnectionRequest,
    profile: ConstantsProfile,
    seed: RandomSeed,
    stage: str,
) -> PathBundle:
    try:
        return connect_pairs(host, request, profile, seed)
    except ConnectorError as error:
        raise AbsorberError(f"Routing the {stage} failed: {error}") from error


def absorber_pools(count: int, k: int) -> list[int]:
    """
    Workspace the anchors, Q paths and connecting paths of `count` absorbers need, each with the
    connector's 10/7 headroom.
    """
    per_absorber = (2, 6 * k + 1, 3 * k * (6 * k - 1))
    return [math.ceil(10 * count * need / 7) for need in per_absorber]


def _pool_sizes(needs: list[int], total: int) -> list[int]:
    # proportional to the needs, so each pool meets its need once total covers their sum
    sizes = [need * total // sum(needs) for need in needs[:-1]]
    return sizes + [total - sum(sizes)]


def build_absorbers(
    host: HostGraph,
    A: list[int],
    W: list[int],
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
    count: int | dict[int, int] = ABSORBERS_PER_VERTEX,
) -> dict[int, list[Absorber]]:
    """
    Build edge-disjoint absorbers for every vertex of A inside W.

    W is split in proportion to what each stage needs. A star matching from A into the first
    pool gives every absorber its anchors (x₀, y₁), the Q paths are routed through the second
    pool and the 3k connecting paths of every gadget through the last one.

    Parameters
    ----------
    host: `cycleembed.HostGraph`
        Host graph
    A: `list[int]`
        Vertices to build absorbers for, outside W
    W: `list[int]`
        Workspace
    profile: `cycleembed.ConstantsProfile`, optional
        Supplies the gadget parameter k and the connector knobs
    seed: `cycleembed.RandomSeed`, optional
        Stream of the workspace split and the connector
    count: `int | dict[int, int]`, optional
        Absorbers per vertex, or a per-vertex count

    Returns
    -------
    `dict[int, list[cycleembed.Absorber]]`
        The absorbers of every vertex, in the order of their anchors

    Raises
    ------
    `cycleembed.exceptions.AbsorberError`
        Naming the stage (anchors, Q paths, connecting paths) that failed
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="absorbers")
    k = profile.absorber_k
    demands = dict(count) if isinstance(count, dict) else dict.fromkeys(A, count)
    absorbers: dict[int, list[Absorber]] = {v: [] for v in chain(A, demands)}
    demands = {v: c for v, c in demands.items() if c > 0}
    if not demands:
        return absorbers

    workspace = sorted(set(W))
    if 3500 * k * k * len(demands) > len(workspace):
        logger.debug(f"{len(demands)} vertices exceed |W|/3500k² for |W| = {len(workspace)}.")
    needs = absorber_pools(sum(demands.values()), k)
    if sum(needs) > len(workspace):
        logger.debug(f"Absorbers need {sum(needs)} workspace vertices, |W| = {len(workspace)}.")
    anchor_pool, q_pool, p_pool = split_expanding(
        host,
        workspace,
        _pool_sizes(needs, len(workspace)),
        profile.expansion_degree(host.n),
        seed.child("pools"),
        retries=profile.split_retries,
        trials=profile.sampled_trials,
        strict=False,
    )

    try:
        anchors = generalized_matching(host, {v: 2 * c for v, c in demands.items()}, anchor_pool)
    except HallViolationError as error:
        raise AbsorberError(
            f"No anchors for vertices {sorted(error.deficient)} in a pool of {len(anchor_pool)}."
        ) from error

    owners = []
    for v in sorted(demands):
        leaves = anchors.stars[v]
        owners += [(v, leaves[2 * j], leaves[2 * j + 1]) for j in range(demands[v])]

    q_paths = _route(
        host,
        ConnectionRequest(
            pairs=[(x0, y1) for _, x0, y1 in owners],
            lengths=[6 * k + 1] * len(owners),
            workspace=q_pool,
        ),
        profile,
        seed.child("Q"),
        "Q paths",
    )

    p_pairs = []
    for q in q_paths.paths:
        tail = q[3 * k + 2 :]
        p_pairs += [(q[i], tail[3 * k - i]) for i in range(1, 3 * k + 1)]
    p_paths = _route(
        host,
        ConnectionRequest(pairs=p_pairs, lengths=[6 * k - 1] * len(p_pairs), workspace=p_pool),
        profile,
        seed.child("P"),
        "connecting paths",
    )

    size = 3 * k
    for index, (v, _, _) in enumerate(owners):
        absorbers[v].append(
            assemble_absorber(
                v, q_paths.paths[index], p_paths.paths[size * index : size * (index + 1)]
            )
        )
    logger.debug(f"Built {len(owners)} absorbers of size {gadget_size(k)} for {len(demands)} vertices.")
    return absorbers


def _link_lengths(l: int, degree: int, profile: ConstantsProfile) -> list[int]:
    base = 5 * profile.absorber_k
    total = l - 2 - degree * (gadget_size(profile.absorber_k) - 1)
    if total < (degree + 1) * base:
        raise RobustSetError(
            f"Length {l} leaves {total} edges for {degree + 1} links of at least {base}."
        )
    lengths = [base] * (degree + 1)
    lengths[0] += total - (degree + 1) * base
    return lengths


def _template_for(r: int, profile: ConstantsProfile, seed: RandomSeed) -> FlexibleBipartiteTemplate:
    return build_flexible_template(3 * r, seed, profile.sampled_trials, profile.template_degree)


def robust_set_demand(
    template: FlexibleBipartiteTemplate, l: int, profile: ConstantsProfile
) -> tuple[int, int, int]:
    """
    Workspace a robust set on this template needs, as (|W₁|, |W₂|, |W₃|).

    W₁ holds the fixed set B, W₂ the absorbers of every template edge and W₃ the links.

    Raises
    ------
    `cycleembed.exceptions.RobustSetError`
        If `l` is too short to fit the absorbers of some index with links of length at least 5k
    """
    gadgets = sum(absorber_pools(len(template.edges()), profile.absorber_k))
    links = sum(sum(_link_lengths(l, len(row), profile)) for row in template.adjacency)
    return 2 * template.n0 // 3, gadgets, math.ceil(10 * links / 7)


def build_robust_set(
    host: HostGraph,
    A: list[int],
    X: list[int],
    Y: list[int],
    W: list[int],
    l: int,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> RobustSet:
    """
    Build a robust set: 3r xⱼ,yⱼ-paths of length l-1 that can cover W′ plus any r vertices of A.

    A flexible template on n₀ = 3r guides the construction. Its X side is the index set, Y stands
    for a fixed set B ⊆ W of 2r vertices and Z for A. Every vertex of A ∪ B gets one absorber per
    template edge, and index j strings the absorbers of its template neighbours together with
    link paths of length at least 5k.

    Parameters
    ----------
    host: `cycleembed.HostGraph`
        Host graph
    A: `list[int]`
        Flexible pool of 2r vertices, outside W
    X: `list[int]`
        Start vertices xⱼ, 3r of them
    Y: `list[int]`
        End vertices yⱼ, 3r of them
    W: `list[int]`
        Workspace
    l: `int`
        Query paths have l-1 edges
    profile: `cycleembed.ConstantsProfile`, optional
        Gadget parameter, template degree and connector knobs
    seed: `cycleembed.RandomSeed`, optional
        Stream of the template, the workspace split and every routing

    Returns
    -------
    `cycleembed.RobustSet`
        The linked absorbers, with unused workspace reported as `free`

    Raises
    ------
    `cycleembed.exceptions.RobustSetError`
        If l is too short or W too small for the demand, or a link cannot be routed
    `cycleembed.exceptions.AbsorberError`
        If building an absorber fails
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="robust")
    flexible = sorted(A)
    r = len(flexible) // 2
    if not flexible or len(flexible) != 2 * r:
        raise ValueError(f"The flexible pool needs an even, positive size. Got {len(flexible)}.")
    if len(X) != 3 * r or len(Y) != 3 * r:
        raise ValueError(f"Expected {3 * r} endpoint pairs, got {len(X)} starts and {len(Y)} ends.")

    template = _template_for(r, profile, seed.child("template"))
    sizes = robust_set_demand(template, l, profile)
    workspace = sorted(set(W))
    if 90 * l * r > 7 * len(workspace):
        logger.warning(f"r = {r} exceeds 7|W|/90l for |W| = {len(workspace)} and l = {l}.")
    demand = sum(sizes)
    if demand > len(workspace):
        raise RobustSetError(f"A robust set with r = {r} needs {demand} vertices, |W| = {len(workspace)}.")

    fixed, absorber_pool, link_pool, spare = split_expanding(
        host,
        workspace,
        [*sizes, len(workspace) - demand],
        profile.expansion_degree(host.n),
        seed.child("split"),
        retries=profile.split_retries,
        trials=profile.sampled_trials,
        strict=False,
    )

    def vertex_of(w: int) -> int:
        if w in template.Y:
            return fixed[w - template.n0]
        return flexible[w - template.Z.start]

    counts = {vertex_of(w): len(template.neighbors(w)) for w in chain(template.Y, template.Z)}
    absorbers = build_absorbers(host, list(counts), absorber_pool, profile, seed.child("absorbers"), counts)

    pairs, lengths, owners = [], [], []
    for j, row in enumerate(template.adjacency):
        stops = [X[j]]
        for w in row:
            gadget = absorbers[vertex_of(w)][template.neighbors(w).index(j)]
            stops += gadget.ends
        stops.append(Y[j])
        pairs += [(stops[2 * i], stops[2 * i + 1]) for i in range(len(row) + 1)]
        lengths += _link_lengths(l, len(row), profile)
        owners += [j] * (len(row) + 1)

    try:
        bundle = connect_pairs(
            host,
            ConnectionRequest(pairs=pairs, lengths=lengths, workspace=link_pool),
            profile,
            seed.child("links"),
        )
    except ConnectorError as error:
        raise RobustSetError(f"Linking the absorbers failed: {error}") from error

    links: list[list[list[int]]] = [[] for _ in range(3 * r)]
    for owner, path in zip(owners, bundle.paths):
        links[owner].append(path)

    gadget_vertices = {v for group in absorbers.values() for gadget in group for v in gadget.vertices}
    link_vertices = set(bundle.interior())
    covered = sorted(set(fixed) | gadget_vertices | link_vertices)
    free = sorted(
        set(spare) | (set(absorber_pool) - gadget_vertices) | (set(link_pool) - link_vertices)
    )
    robust = RobustSet(
        pairs=list(zip(X, Y)),
        flexible=flexible,
        fixed=fixed,
        covered=covered,
        length=l,
        template=template,
        absorbers=absorbers,
        links=links,
        free=free,
    )
    logger.info(f"Built {robust} with {len(free)} free workspace vertices.")
    return robust


def query_robust_set(rs: RobustSet, chosen: list[int]) -> PathBundle:
    """
    Cover W′ together with a chosen half of the flexible pool.

    Raises
    ------
    `ValueError`
        If `chosen` is not an r-subset of the flexible pool
    `cycleembed.exceptions.RobustSetError`
        If the template has no perfect matching onto Y ∪ Z′
    """
    chosen = sorted(set(chosen))
    if len(chosen) != rs.r or not set(chosen) <= set(rs.flexible):
        raise ValueError(f"Expected {rs.r} vertices of the flexible pool, got {chosen}.")
    template = rs.template
    zone = list(template.Y) + [template.Z.start + rs.flexible.index(a) for a in chosen]
    try:
        matching = star_matching(template_graph(template), template.X, zone, 1)
    except HallViolationError as error:
        raise RobustSetError(
            f"Template has no matching onto the query; indices {sorted(error.deficient)} are deficient."
        ) from error

    paths = []
    for j, row in enumerate(template.adjacency):
        (matched,) = matching.stars[j]
        links = rs.links[j]
        path = list(links[0])
        for w, link in zip(row, links[1:]):
            gadget = rs.absorbers[rs.vertex_of(w)][template.neighbors(w).index(j)]
            path += gadget.path(w == matched)[1:] + link[1:]
        paths.append(path)
    return PathBundle(paths=paths)


@dataclass(frozen=True, kw_only=True, slots=True)
class SpanningPlan:
    """
    Shape of an absorption-based spanning routing.

    The first 3r pairs go through a robust set. Every other pair is a prefix of length `prefix`
    followed by `segments` segments of length σ, consecutive pieces joined by bridge edges.
    """

    sigma: int
    leftover: int
    r: int
    prefix: int
    segments: int
    link_pool: int
    demand: int
    template: FlexibleBipartiteTemplate


def plan_spanning(
    host: HostGraph | HostDigraph,
    t: int,
    l: int,
    size: int,
    profile: ConstantsProfile,
    seed: RandomSeed,
) -> SpanningPlan | None:
    """
    The absorption plan for t pairs of length l in a workspace of `size` vertices, or `None` when
    the instance is below the scale the robust set needs or no template certifies.
    """
    if host.directed:
        return None
    sigma, s = profile.spanning_segment, profile.spanning_leftover
    r = s * (sigma - 2)
    rest = t - 3 * r
    segments = max(0, (l + 1) // (sigma + 1) - 1)
    prefix = l - segments * (sigma + 1)
    link_pool = math.ceil(10 * s * (sigma - 4) / 7)
    if rest < 1 or rest * segments < s or 2 * r - link_pool < 4 * s:
        return None
    if not (profile.in_band(prefix) and profile.in_band(sigma)):
        return None
    if 2 * r + rest * 2 * segments > size:
        return None

    try:
        template = _template_for(r, profile, seed.child("template"))
        demand = sum(robust_set_demand(template, l + 1, profile))
    except (TemplateError, RobustSetError) as error:
        logger.debug(f"No robust set for r = {r} and l = {l}: {error}")
        return None
    if 2 * r + demand + rest * 2 * segments > size:
        return None
    return SpanningPlan(
        sigma=sigma,
        leftover=s,
        r=r,
        prefix=prefix,
        segments=segments,
        link_pool=link_pool,
        demand=demand,
        template=template,
    )


def _bridges(host: HostGraph, pool: set[int], count: int) -> list[tuple[int, int]]:
    chosen, open_vertices = [], set(pool)
    for a in sorted(pool):
        if len(chosen) == count:
            break
        if a not in open_vertices:
            continue
        partner = min(host.neighbors(a) & open_vertices - {a}, default=None)
        if partner is None:
            continue
        open_vertices -= {a, partner}
        chosen.append((a, partner))
    if len(chosen) < count:
        raise ConnectionFailure(f"Only {len(chosen)} of {count} bridge edges found.", 0, [])
    return chosen


def _route_by_absorption(
    host: HostGraph,
    pairs: list[tuple[int, int]],
    l: int,
    workspace: list[int],
    plan: SpanningPlan,
    profile: ConstantsProfile,
    seed: RandomSeed,
) -> PathBundle:
    r, s, sigma = plan.r, plan.leftover, plan.sigma
    flexible, region, main = split_expanding(
        host,
        workspace,
        [2 * r, plan.demand, len(workspace) - 2 * r - plan.demand],
        profile.expansion_degree(host.n),
        seed.child("regions"),
        retries=profile.split_retries,
        trials=profile.sampled_trials,
        strict=False,
    )
    matching_pool, link_pool = flexible[: 2 * r - plan.link_pool], flexible[2 * r - plan.link_pool :]

    absorbed = pairs[: 3 * r]
    robust = build_robust_set(
        host,
        flexible,
        [x for x, _ in absorbed],
        [y for _, y in absorbed],
        region,
        l + 1,
        profile,
        seed.child("robust"),
    )
    free = set(main) | set(robust.free)

    rest = list(enumerate(pairs))[3 * r :]
    bridges = _bridges(host, free, len(rest) * plan.segments)
    free -= {v for edge in bridges for v in edge}

    prefixes, standard = [], []
    for number, (i, (x, y)) in enumerate(rest):
        own = bridges[number * plan.segments : (number + 1) * plan.segments]
        prefixes.append(((i, 0), x, own[0][0], plan.prefix))
        ends = [b for _, b in own]
        starts = [a for a, _ in own[1:]] + [y]
        standard += [((i, j), b, a, sigma) for j, (b, a) in enumerate(zip(ends, starts), start=1)]

    routes: dict[tuple[int, int], list[int]] = {}
    frontier, ratio = profile.frontier(host.n), profile.ratio(host.n)

    def saturate(candidates: list, keep: int) -> list:
        while len(candidates) > keep:
            try:
                chosen, path = connect_single_pair(
                    host,
                    [c[1] for c in candidates],
                    [c[2] for c in candidates],
                    [c[3] for c in candidates],
                    free,
                    frontier,
                    ratio,
                )
            except (FrontierStarvationError, BridgeError) as error:
                raise ConnectionFailure(
                    f"Saturation stuck with {len(candidates)} segments and {len(free)} free vertices.",
                    0,
                    [(c[1], c[2]) for c in candidates],
                ) from error
            key = candidates.pop(chosen)[0]
            routes[key] = path
            free.difference_update(path[1:-1])
        return candidates

    saturate(prefixes, 0)
    leftover = saturate(standard, s)
    residue = sorted(free)
    if len(residue) != s:
        raise AbsorberError(f"Saturation left {len(residue)} vertices, expected {s}.")

    first = (sigma - 4) // 2
    demands = {}
    for (_, c, d, _), e in zip(leftover, residue):
        demands |= {c: 1, d: 1, e: 2}
    try:
        stars = generalized_matching(host, demands, matching_pool)
    except HallViolationError as error:
        raise ConnectionFailure(
            f"Leftover segments cannot be anchored; {sorted(error.deficient)} are deficient.",
            0,
            [(c[1], c[2]) for c in leftover],
        ) from error

    completion = []
    for (_, c, d, _), e in zip(leftover, residue):
        (c_leaf,), (d_leaf,), (e_in, e_out) = stars.stars[c], stars.stars[d], stars.stars[e]
        completion += [(c_leaf, e_in), (e_out, d_leaf)]
    lengths = [first, sigma - 4 - first] * len(leftover)
    bundle = connect_pairs(
        host,
        ConnectionRequest(pairs=completion, lengths=lengths, workspace=link_pool),
        profile,
        seed.child("leftover"),
    )
    for index, ((key, c, d, _), e) in enumerate(zip(leftover, residue)):
        into, out = bundle.paths[2 * index], bundle.paths[2 * index + 1]
        routes[key] = [c] + into + [e] + out + [d]

    remaining = set(flexible) - set(stars.leaves) - set(bundle.interior())
    cover = query_robust_set(robust, sorted(remaining))

    paths = list(cover.paths)
    for i, _ in rest:
        path = routes[(i, 0)]
        for j in range(1, plan.segments + 1):
            path = path + routes[(i, j)]
        paths.append(path)

    interior = PathBundle(paths=paths).interior()
    if sorted(interior) != workspace:
        raise AbsorberError("Spanning paths do not partition the workspace.")
    logger.debug(f"Absorbed {s} leftover segments through a robust set with r = {r}.")
    return PathBundle(paths=paths)


def _route_by_search(
    host: HostGraph | HostDigraph,
    pairs: list[tuple[int, int]],
    l: int,
    workspace: list[int],
    budget: int,
) -> PathBundle:
    """
    Budgeted depth-first search for a spanning path system.

    Candidates are tried fewest free neighbours first. A branch is cut as soon as a free vertex
    next to the moving end can no longer be entered and left through free vertices or pending
    endpoints, and the last interior vertex of a path is drawn from the neighbours of its end.
    """
    directed = host.directed
    step_out, step_in = host.out_neighbors, host.in_neighbors
    free = set(workspace)
    room_out = {u: len(step_out(u) & free) for u in free}
    room_in = {u: len(step_in(u) & free) for u in free} if directed else room_out
    paths: list[list[int]] = []
    nodes = 0

    def take(w: int) -> None:
        free.discard(w)
        for u in step_in(w) & free:
            room_out[u] -= 1
        if directed:
            for u in step_out(w) & free:
                room_in[u] -= 1

    def give(w: int) -> None:
        for u in step_in(w) & free:
            room_out[u] += 1
        if directed:
            for u in step_out(w) & free:
                room_in[u] += 1
        free.add(w)

    def stranded(u: int, anchors: set[int]) -> bool:
        if directed:
            leaves = room_out[u] or step_out(u) & anchors
            enters = room_in[u] or step_in(u) & anchors
            return not (leaves and enters)
        return room_out[u] < 2 and room_out[u] + len(step_out(u) & anchors) < 2

    def extend(index: int) -> bool:
        if index == len(pairs):
            return True
        x, y = pairs[index]
        pending = {v for pair in pairs[index:] for v in pair}
        path = [x]

        def grow() -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise SearchBudgetError(
                    f"Spanning search exceeded {budget} nodes at pair {index}.", "spanning"
                )
            if len(path) == l:
                if not host.has_edge(path[-1], y):
                    return False
                paths.append(path + [y])
                if extend(index + 1):
                    return True
                paths.pop()
                return False

            candidates = step_out(path[-1]) & free
            if len(path) == l - 1:
                candidates &= step_in(y)
            for w in sorted(candidates, key=lambda v: (room_out[v], v)):
                take(w)
                path.append(w)
                anchors = pending | {w}
                nearby = (step_in(w) | step_out(w) | step_out(path[-2])) & free
                if not any(stranded(u, anchors) for u in nearby) and grow():
                    return True
                path.pop()
                give(w)
            return False

        return grow()

    if not extend(0):
        raise ConnectionFailure(
            f"No spanning system of {len(pairs)} paths of length {l} exists.", 0, list(pairs)
        )
    logger.debug(f"Spanning search finished after {nodes} nodes.")
    return PathBundle(paths=paths)


def connect_pairs_spanning(
    host: HostGraph | HostDigraph,
    pairs: list[tuple[int, int]],
    l: int,
    W: list[int],
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> PathBundle:
    """
    Join every pair by a path of length l such that the interiors partition W.

    Large instances are routed by absorption: a robust set takes 3r pairs whole, the remaining
    pairs are cut into a prefix and segments of length σ joined by bridge edges, segments are
    saturated with single-pair searches until s remain, the s leftover vertices are threaded into
    them through the flexible pool, and the robust set absorbs what is left of the pool. Instances
    below that scale are routed by a budgeted exhaustive search.

    Parameters
    ----------
    host: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph
    pairs: `list[tuple[int, int]]`
        Endpoint pairs; x = y asks for a closed path
    l: `int`
        Length of every path
    W: `list[int]`
        Workspace with t(l-1) vertices
    profile: `cycleembed.ConstantsProfile`, optional
        Length band, segment length σ, leftover count s, search budget and connector knobs
    seed: `cycleembed.RandomSeed`, optional
        Stream of every random choice

    Returns
    -------
    `cycleembed.PathBundle`
        One path per pair, in order

    Raises
    ------
    `cycleembed.exceptions.CapacityError`
        If t(l-1) ≠ |W| or l is outside the band
    `cycleembed.exceptions.SearchBudgetError`
        If the exhaustive search runs out of nodes
    `cycleembed.exceptions.ConnectionFailure`
        If a routing stage fails, or the search proves no spanning system exists
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="spanning")
    workspace = sorted(set(W))
    t = len(pairs)
    if t * (l - 1) != len(workspace):
        raise CapacityError(f"{t} paths of length {l} need {t * (l - 1)} vertices, |W| = {len(workspace)}.")
    if not t:
        return PathBundle()
    if not profile.in_band(l):
        raise CapacityError(
            f"Length {l} lies outside the band [{profile.min_path_length}, {profile.max_path_length}]."
        )

    plan = plan_spanning(host, t, l, len(workspace), profile, seed)
    if plan is None:
        logger.debug(f"{t} pairs of length {l} are below absorber scale, routing by search.")
        return _route_by_search(host, list(pairs), l, workspace, profile.search_budget)
    return _route_by_absorption(host, list(pairs), l, workspace, plan, profile, seed)
