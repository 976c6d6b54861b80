import math
from itertools import combinations
from typing import Iterable

import networkx as nx
from loguru import logger

from .constant import Direction, VerificationMode
from .exceptions import BudgetExceededError, HallViolationError, PartitionError
from .graph import HostDigraph, HostGraph, neighbors_into
from .types import ExpansionVerdict, RandomSeed, StarMatching


def threshold_size(workspace: int, d: float) -> int:
    """
    The set size ⌈|W|/2d⌉ that separates the two expansion conditions.
    """
    return max(1, math.ceil(workspace / (2 * d)))


def exact_budget(n: int, workspace: int, d: float) -> int:
    s = threshold_size(workspace, d)
    budget = sum(math.comb(n, j) for j in range(1, s))
    if 2 * s <= workspace:
        budget += math.comb(workspace, s)
    return budget


def expands_into(
    g: HostGraph | HostDigraph,
    W: Iterable[int],
    d: float,
    mode: VerificationMode = VerificationMode.EXACT,
    trials: int = 1000,
    seed: RandomSeed | None = None,
    cap: int = 2**20,
    direction: Direction = Direction.OUT,
) -> ExpansionVerdict:
    """
    Check whether g d-expands into W.

    With s = ⌈|W|/2d⌉ the two conditions are
    (P1) every X ⊆ V(g) with |X| < s has at least d|X| neighbours in W∖X, and
    (P2) every two disjoint s-subsets of W span an edge.

    Parameters
    ----------
    g: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph
    W: `Iterable[int]`
        Workspace
    d: `float`
        Expansion factor, positive
    mode: `cycleembed.VerificationMode`, optional
        `EXACT` enumerates every relevant subset, `SAMPLED` tests random ones
    trials: `int`, optional
        Random subsets per condition in sampled mode
    seed: `cycleembed.RandomSeed`, optional
        Stream of the random subsets
    cap: `int`, optional
        Largest number of subsets exact mode may enumerate
    direction: `cycleembed.Direction`, optional
        Neighbourhood direction for digraphs. For P2, arcs are taken from the first set to the second

    Returns
    -------
    `cycleembed.ExpansionVerdict`
        The verdict, with a violating set or pair when the check fails

    Raises
    ------
    `cycleembed.exceptions.BudgetExceededError`
        If exact mode would enumerate more than `cap` subsets
    """
    if d <= 0:
        raise ValueError(f"Expansion factor must be positive. Got {d}.")
    workspace = sorted(set(W))
    s = threshold_size(len(workspace), d)

    if mode is VerificationMode.EXACT:
        budget = exact_budget(g.n, len(workspace), d)
        if budget > cap:
            raise BudgetExceededError(
                f"Exact check needs {budget} subsets, above the cap of {cap}. Use sampled mode.",
                budget,
                cap,
            )
        small_sets = (X for size in range(1, s) for X in combinations(range(g.n), size))
        first_sets = combinations(workspace, s) if 2 * s <= len(workspace) else ()
    else:
        rng = (seed or RandomSeed(seed=0, label="expansion")).rng()
        sizes = sampled_sizes(min(s, g.n + 1))
        per_size = max(1, trials // len(sizes)) if sizes else 0
        small_sets = (
            tuple(rng.choice(g.n, size=size, replace=False).tolist())
            for size in sizes
            for _ in range(per_size)
        )
        first_sets = (
            tuple(rng.choice(workspace, size=2 * s, replace=False).tolist())
            for _ in range(trials if 2 * s <= len(workspace) else 0)
        )

    verdict = dict(mode=mode, trials=trials if mode is VerificationMode.SAMPLED else None)
    workspace_set = set(workspace)

    for X in small_sets:
        if not _reaches(g, X, workspace_set, d * len(X), direction):
            return ExpansionVerdict(holds=False, witness=sorted(X), **verdict)

    for chosen in first_sets:
        if mode is VerificationMode.EXACT:
            X = chosen
            outside = workspace_set - set(X) - neighbors_into(g, X, workspace, direction)
            if len(outside) >= s:
                Y = sorted(outside)[:s]
                return ExpansionVerdict(holds=False, witness_pair=(sorted(X), Y), **verdict)
        else:
            X, Y = chosen[:s], chosen[s:]
            if not _spans_edge(g, X, Y, direction):
                return ExpansionVerdict(holds=False, witness_pair=(sorted(X), sorted(Y)), **verdict)

    return ExpansionVerdict(holds=True, **verdict)


def sampled_sizes(s: int) -> list[int]:
    """
    Set sizes tested by sampled P1 below s: powers of two and s − 1.
    """
    sizes, size = set(), 1
    while size < s:
        sizes.add(size)
        size *= 2
    if s > 1:
        sizes.add(s - 1)
    return sorted(sizes)


def _reaches(g, X, targets: set[int], need: float, direction: Direction) -> bool:
    # stops as soon as `need` neighbours outside X are found
    sources = set(X)
    targets = targets - sources
    step = g.in_neighbors if direction is Direction.IN else g.out_neighbors
    found = set()
    for x in sources:
        found |= step(x) & targets
        if len(found) >= need:
            return True
    return False


def _spans_edge(g, X, Y, direction: Direction) -> bool:
    if direction is Direction.IN:
        X, Y = Y, X
    targets = set(Y)
    return any(g.out_neighbors(x) & targets for x in X)


def is_expander(
    g: HostGraph | HostDigraph,
    d: float,
    mode: VerificationMode = VerificationMode.EXACT,
    trials: int = 1000,
    seed: RandomSeed | None = None,
    cap: int = 2**20,
) -> ExpansionVerdict:
    """
    Check whether g is an (n, d)-expander: expansion into its own vertex set, in both directions
    for digraphs.
    """
    directions = [Direction.OUT, Direction.IN] if g.directed else [Direction.OUT]
    verdict = None
    for direction in directions:
        verdict = expands_into(g, range(g.n), d, mode, trials, seed, cap, direction)
        if not verdict.holds:
            break
    return verdict


def split_expanding(
    g: HostGraph | HostDigraph,
    W: Iterable[int],
    sizes: list[int],
    d: float,
    seed: RandomSeed,
    retries: int = 16,
    trials: int = 1000,
    strict: bool = True,
    direction: Direction = Direction.OUT,
) -> list[list[int]]:
    """
    Randomly partition W into parts of the given sizes such that g still expands into each part.

    Part i is checked (sampled) with factor dᵢ = mᵢ·d / 5m, where m = |W|, floored at 1.
    Parts of size zero are returned empty and never checked.

    Parameters
    ----------
    g: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph
    W: `Iterable[int]`
        Workspace to partition
    sizes: `list[int]`
        Part sizes, summing to |W|
    d: `float`
        Expansion factor of g into W
    seed: `cycleembed.RandomSeed`
        Stream of the partitions and sampled checks
    retries: `int`, optional
        Partitions tried before giving up
    trials: `int`, optional
        Sampled subsets per part and condition
    strict: `bool`, optional
        If `False`, return the last partition with a warning instead of raising
    direction: `cycleembed.Direction`, optional
        Neighbourhood direction for digraphs

    Returns
    -------
    `list[list[int]]`
        Sorted parts in the order of `sizes`

    Raises
    ------
    `cycleembed.exceptions.PartitionError`
        If no partition passed within the retry budget and `strict` is set
    """
    workspace = sorted(set(W))
    if sum(sizes) != len(workspace) or any(size < 0 for size in sizes):
        raise ValueError(f"Sizes {sizes} do not partition a workspace of {len(workspace)} vertices.")
    if len(sizes) > max(1, math.log(max(g.n, 2))):
        logger.debug(f"Splitting into {len(sizes)} parts exceeds log n for n = {g.n}.")

    rng = seed.rng()
    m = len(workspace)
    parts, diagnostics = [], []
    for attempt in range(retries):
        order = rng.permutation(workspace).tolist()
        parts, start = [], 0
        for size in sizes:
            parts.append(sorted(order[start : start + size]))
            start += size

        diagnostics = []
        for index, (part, size) in enumerate(zip(parts, sizes)):
            if not size:
                continue
            target = max(1.0, size * d / (5 * m))
            verdict = expands_into(
                g,
                part,
                target,
                VerificationMode.SAMPLED,
                trials,
                seed.child(f"split{attempt}/{index}"),
                direction=direction,
            )
            if not verdict.holds:
                diagnostics.append(
                    {"part": index, "size": size, "d": target, "witness": verdict.witness}
                )
        if not diagnostics:
            logger.debug(f"Partition {sizes} passed on attempt {attempt + 1}.")
            return parts

    if strict:
        raise PartitionError(
            f"Partition into {sizes} not certified after {retries} retries.", diagnostics
        )
    logger.warning(
        f"Partition into {sizes} not certified after {retries} retries, continuing with the last one."
    )
    return parts


def generalized_matching(
    g: HostGraph | HostDigraph,
    demands: dict[int, int],
    X: Iterable[int],
    direction: Direction = Direction.OUT,
) -> StarMatching:
    """
    Disjoint stars with a prescribed number of leaves per centre, leaves drawn from X.

    Solved as a maximum flow: source → centre with capacity equal to the demand, centre → leaf
    uncapacitated along host edges, leaf → sink with capacity 1.

    Parameters
    ----------
    g: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph
    demands: `dict[int, int]`
        Number of leaves every centre needs
    X: `Iterable[int]`
        Leaf pool, disjoint from the centres
    direction: `cycleembed.Direction`, optional
        `OUT` needs arcs centre → leaf, `IN` arcs leaf → centre

    Returns
    -------
    `cycleembed.StarMatching`
        Stars with exactly the demanded sizes

    Raises
    ------
    `cycleembed.exceptions.HallViolationError`
        If some set B of centres has fewer than Σ_{a∈B} demand(a) neighbours in X. The error
        carries such a B, read off a minimum cut
    """
    pool = set(X)
    if pool & set(demands):
        raise ValueError(f"Centres {sorted(pool & set(demands))} also appear in the leaf pool.")
    step = g.in_neighbors if direction is Direction.IN else g.out_neighbors

    network = nx.DiGraph()
    network.add_node("source")
    network.add_node("sink")
    for centre, demand in demands.items():
        network.add_edge("source", ("centre", centre), capacity=demand)
        for leaf in step(centre) & pool:
            network.add_edge(("centre", centre), ("leaf", leaf))
    for leaf in pool:
        network.add_edge(("leaf", leaf), "sink", capacity=1)

    total = sum(demands.values())
    value, flow = nx.maximum_flow(network, "source", "sink")
    if value < total:
        _, (reachable, _) = nx.minimum_cut(network, "source", "sink")
        deficient = {node[1] for node in reachable if isinstance(node, tuple) and node[0] == "centre"}
        raise HallViolationError(
            f"Only {value} of {total} leaves can be matched; centres {sorted(deficient)} are deficient.",
            deficient,
        )

    stars = {
        centre: sorted(
            node[1] for node, amount in flow[("centre", centre)].items() if amount > 0
        )
        for centre in demands
    }
    sizes = set(demands.values())
    return StarMatching(stars=stars, c=sizes.pop() if len(sizes) == 1 else None)


def star_matching(
    g: HostGraph | HostDigraph,
    A: Iterable[int],
    X: Iterable[int],
    c: int,
    direction: Direction = Direction.OUT,
) -> StarMatching:
    """
    A c-matching from A into X: |A| disjoint stars K_{1,c} centred at A with leaves in X.

    `c = 1` is an ordinary bipartite matching saturating A.
    """
    return generalized_matching(g, {a: c for a in A}, X, direction)
