import math
from collections import defaultdict
from typing import Callable, Generator, Iterable

from loguru import logger

from .constant import Direction
from .exceptions import (
    BridgeError,
    CapacityError,
    ConnectionFailure,
    FrontierStarvationError,
    HallViolationError,
)
from .expansion import split_expanding, star_matching
from .graph import HostDigraph, HostGraph
from .types import ConnectionRequest, ConstantsProfile, LayeredReachability, PathBundle, RandomSeed
from .utils import check_path


def divide(
    X: Iterable[int], Y: Iterable[int], reach: Callable[[int, int], bool], k: int
) -> tuple[list[int], set[int]]:
    """
    Shrink a source set by a factor k while keeping a 1/k share of what it reaches.

    X is cut, in sorted order, into parts of size ⌈|X|/k⌉ and the part reaching the most of Y wins
    (the first such part on ties).

    Parameters
    ----------
    X: `Iterable[int]`
        Sources
    Y: `Iterable[int]`
        Targets, each reachable from some source
    reach: `Callable[[int, int], bool]`
        Whether a source reaches a target
    k: `int`
        Shrink factor

    Returns
    -------
    `tuple[list[int], set[int]]`
        X′ with |X′| ≤ ⌈|X|/k⌉ and the targets Y′ it reaches, |Y′| ≥ ⌊|Y|/k⌋
    """
    sources, targets = sorted(X), set(Y)
    if k <= 1 or len(sources) <= 1:
        return sources, targets
    size = math.ceil(len(sources) / k)
    best_part, best_reach = None, None
    for start in range(0, len(sources), size):
        part = sources[start : start + size]
        reached = {y for y in targets if any(reach(x, y) for x in part)}
        if best_reach is None or len(reached) > len(best_reach):
            best_part, best_reach = part, reached
    return best_part, best_reach


def _layered_search(
    host: HostGraph | HostDigraph,
    sources: dict[int, int],
    depth: int,
    pool: list[int],
    frontier: int,
    ratio: int,
    direction: Direction,
) -> Generator[tuple[int, LayeredReachability], None, None]:
    """
    Lazily yield request indices whose source reaches `depth` levels into `pool`.

    Every run rebuilds the levels from the indices still alive, shrinks the surviving sources with
    `divide` at each level, and yields the single index left at the end together with its trace.
    """
    step = host.in_neighbors if direction is Direction.IN else host.out_neighbors
    alive = dict(sources)

    while alive:
        parents = [{vertex: vertex for vertex in alive.values()}]
        origins = [{vertex: index for index, vertex in alive.items()}]
        survivors = [sorted(alive)]
        used = set(alive.values())
        remaining = [v for v in pool if v not in used]

        for level in range(1, depth + 1):
            open_pool = set(remaining)
            candidates: dict[int, int] = {}
            for v in sorted(parents[-1]):
                for w in step(v) & open_pool:
                    candidates.setdefault(w, v)

            label = {w: origins[-1][v] for w, v in candidates.items()}
            kept, _ = divide(
                set(label.values()), candidates, lambda i, w: label[w] == i, ratio
            )
            kept = set(kept)
            cap = min(frontier, len(remaining) - (depth - level))
            chosen = sorted(w for w in candidates if label[w] in kept)[: max(cap, 0)]
            if not chosen:
                raise FrontierStarvationError(
                    f"Level {level} of {depth} is empty.",
                    level,
                    [len(layer) for layer in parents],
                )
            parents.append({w: candidates[w] for w in chosen})
            origins.append({w: label[w] for w in chosen})
            survivors.append(sorted({label[w] for w in chosen}))
            used |= set(chosen)
            remaining = [v for v in remaining if v not in used]

        last = origins[-1]
        indices = set(last.values())
        while len(indices) > 1:
            indices, _ = divide(indices, last, lambda i, w: last[w] == i, max(ratio, 2))
            indices = set(indices)
        (index,) = indices
        survivors[-1] = [index]
        trace = LayeredReachability(parents=parents, origins=origins, survivors=survivors)
        yield index, trace
        del alive[index]


def _bridge(
    host: HostGraph | HostDigraph,
    forward: LayeredReachability,
    backward: LayeredReachability,
    index: int,
) -> list[int] | None:
    heads, tails = forward.terminal(index), backward.terminal(index)
    for a in heads:
        for b in tails:
            if host.has_edge(a, b):
                return forward.trace(a)[::-1] + backward.trace(b)
    return None


def connect_single_pair(
    host: HostGraph | HostDigraph,
    X: list[int],
    Y: list[int],
    lengths: list[int],
    W: Iterable[int],
    frontier: int = 8,
    ratio: int = 2,
) -> tuple[int, list[int]]:
    """
    Join one of the pairs (xᵢ, yᵢ) by a path of length kᵢ through W.

    Pairs are grouped by their split (⌈kᵢ/2⌉-1 forward levels, one bridge edge, ⌊kᵢ/2⌋ backward
    levels). Per group a forward search from the xᵢ inside the lower half of W and a backward search
    from the yᵢ inside the upper half each yield one index at a time; as soon as an index has come out
    of both, the two terminal frontiers of that index are scanned for a bridging edge.

    Parameters
    ----------
    host: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph. Arcs are followed forward for digraphs
    X: `list[int]`
        Start vertices
    Y: `list[int]`
        End vertices; yᵢ = xᵢ asks for a closed path
    lengths: `list[int]`
        Required lengths kᵢ
    W: `Iterable[int]`
        Workspace, disjoint from every endpoint
    frontier: `int`, optional
        Largest frontier kept per level
    ratio: `int`, optional
        Source shrink factor per level

    Returns
    -------
    `tuple[int, list[int]]`
        The connected index i and a path xᵢ → yᵢ with kᵢ edges and interior in W

    Raises
    ------
    `cycleembed.exceptions.FrontierStarvationError`
        If every search of every group died at some level
    `cycleembed.exceptions.BridgeError`
        If searches completed but no common index was joined by an edge
    """
    workspace = sorted(set(W))
    half = len(workspace) // 2
    forward_pool, backward_pool = workspace[:half], workspace[half:]

    groups = defaultdict(list)
    for index, length in enumerate(lengths):
        groups[(math.ceil(length / 2) - 1, length // 2)].append(index)

    starvation, last_bridge = None, (set(), set())
    for (ahead, behind), members in sorted(groups.items()):
        searches = {
            Direction.OUT: _layered_search(
                host, {i: X[i] for i in members}, ahead, forward_pool, frontier, ratio, Direction.OUT
            ),
            Direction.IN: _layered_search(
                host, {i: Y[i] for i in members}, behind, backward_pool, frontier, ratio, Direction.IN
            ),
        }
        found = {Direction.OUT: {}, Direction.IN: {}}
        while searches:
            for side in list(searches):
                try:
                    index, trace = next(searches[side])
                except StopIteration:
                    del searches[side]
                    continue
                except FrontierStarvationError as error:
                    starvation = error
                    del searches[side]
                    continue
                found[side][index] = trace
                other = Direction.IN if side is Direction.OUT else Direction.OUT
                if index not in found[other]:
                    continue
                path = _bridge(host, found[Direction.OUT][index], found[Direction.IN][index], index)
                if path is not None:
                    return index, path
                last_bridge = (
                    set(found[Direction.OUT][index].terminal(index)),
                    set(found[Direction.IN][index].terminal(index)),
                )

    if starvation is not None and not any(last_bridge):
        raise starvation
    raise BridgeError("No bridging edge between any pair of terminal frontiers.", *last_bridge)


def _require(request: ConnectionRequest, profile: ConstantsProfile) -> None:
    for length in request.lengths:
        if not profile.in_band(length):
            raise CapacityError(
                f"Length {length} lies outside the band "
                f"[{profile.min_path_length}, {profile.max_path_length}]."
            )
    if 10 * request.total_length > 7 * len(request.workspace):
        raise CapacityError(
            f"Total length {request.total_length} exceeds 7/10 of the {len(request.workspace)}-vertex workspace."
        )


def connect_pairs(
    host: HostGraph | HostDigraph,
    request: ConnectionRequest,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> PathBundle:
    """
    Join every pair of a request by internally vertex-disjoint paths of the exact requested lengths.

    The workspace is split into reserve pools W₁..W_r, Z₁..Z_r of |W|/20r vertices each and a main
    pool U. Single pairs are connected through U until the search gets stuck; then every pending
    pair is re-anchored by star matchings, its start into Wⱼ and its end into Zⱼ, and the leaves
    are connected with length kᵢ - 2, one reserve round at a time.

    Parameters
    ----------
    host: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph
    request: `cycleembed.ConnectionRequest`
        Pairs, lengths and workspace
    profile: `cycleembed.ConstantsProfile`, optional
        Length band, frontier size, shrink ratio, star size and number of reserve rounds
    seed: `cycleembed.RandomSeed`, optional
        Stream of the workspace partition

    Returns
    -------
    `cycleembed.PathBundle`
        One path per pair, in request order

    Raises
    ------
    `cycleembed.exceptions.CapacityError`
        If a length is outside the band or Σkᵢ > 7|W|/10
    `cycleembed.exceptions.ConnectionFailure`
        If pairs remain after the last reserve round
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="connector")
    if not request.pairs:
        return PathBundle()
    _require(request, profile)

    n = host.n
    rounds = profile.reserve_rounds
    reserve = len(request.workspace) // (20 * rounds)
    if reserve:
        sizes = [reserve] * (2 * rounds) + [len(request.workspace) - 2 * rounds * reserve]
        parts = split_expanding(
            host,
            request.workspace,
            sizes,
            profile.expansion_degree(n),
            seed.child("reserve"),
            retries=profile.split_retries,
            trials=profile.sampled_trials,
            strict=False,
        )
        starts, ends, main = parts[:rounds], parts[rounds : 2 * rounds], parts[-1]
    else:
        starts, ends, main = [], [], list(request.workspace)

    free = set(main)
    paths: list[list[int] | None] = [None] * len(request.pairs)
    frontier, ratio = profile.frontier(n), profile.ratio(n)

    def saturate(candidates: list[tuple[int, int, int, int, list[int], list[int]]]) -> None:
        while candidates:
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
                logger.debug(f"Single-pair search stuck with {len(candidates)} candidates: {error}")
                return
            owner, _, _, _, head, tail = candidates[chosen]
            paths[owner] = head + path + tail
            free.difference_update(path[1:-1])
            candidates[:] = [c for c in candidates if c[0] != owner]

    saturate(
        [(i, x, y, k, [], []) for i, ((x, y), k) in enumerate(zip(request.pairs, request.lengths))]
    )

    for number, (pool_x, pool_y) in enumerate(zip(starts, ends), start=1):
        pending = [i for i, path in enumerate(paths) if path is None and request.lengths[i] >= 3]
        if not pending:
            break
        logger.debug(f"Reserve round {number}: re-anchoring {len(pending)} pairs.")
        c = min(profile.stars(n), len(pool_x) // len(pending), len(pool_y) // len(pending))
        stars = None
        while c >= 1 and stars is None:
            try:
                stars = (
                    star_matching(host, [request.pairs[i][0] for i in pending], pool_x, c, Direction.OUT),
                    star_matching(host, [request.pairs[i][1] for i in pending], pool_y, c, Direction.IN),
                )
            except HallViolationError:
                c -= 1
        if stars is None:
            logger.debug(f"Reserve round {number} found no star matching.")
            continue
        candidates = []
        for i in pending:
            x, y = request.pairs[i]
            for leaf_x, leaf_y in zip(stars[0].stars[x], stars[1].stars[y]):
                candidates.append((i, leaf_x, leaf_y, request.lengths[i] - 2, [x], [y]))
        saturate(candidates)

    residual = [request.pairs[i] for i, path in enumerate(paths) if path is None]
    if residual:
        raise ConnectionFailure(
            f"{len(residual)} of {len(request.pairs)} pairs remain after {len(starts)} reserve rounds.",
            len(starts),
            residual,
        )
    return PathBundle(paths=paths)


def verify_bundle(
    host: HostGraph | HostDigraph, request: ConnectionRequest, bundle: PathBundle
) -> str | None:
    """
    Check a bundle against its request.

    Returns
    -------
    `str | None`
        The first violation found, or `None` if every path has the right ends, the exact length,
        an interior inside the workspace, and no interior vertex is shared or is an endpoint
    """
    if len(bundle.paths) != len(request.pairs):
        return f"bundle has {len(bundle.paths)} paths for {len(request.pairs)} pairs"
    seen = set(request.endpoints)
    for index, (path, (x, y), length) in enumerate(
        zip(bundle.paths, request.pairs, request.lengths)
    ):
        problem = check_path(host, path, length, request.workspace)
        if problem:
            return f"path {index}: {problem}"
        if (path[0], path[-1]) != (x, y):
            return f"path {index} runs {path[0]}..{path[-1]}, expected {x}..{y}"
        for v in path[1:-1]:
            if v in seen:
                return f"path {index} reuses vertex {v}"
            seen.add(v)
    return None
