from collections import defaultdict

from loguru import logger

from .constant import ORACLE_CAP, Phase
from .cycles import enumerate_bounded_family
from .exceptions import OracleCapError
from .graph import HostGraph
from .types import CycleSpec, Embedding, OracleResult, UniversalityVerdict


def brute_force_embed(host: HostGraph, spec: CycleSpec, cap: int = ORACLE_CAP) -> OracleResult:
    """
    Decide by exhaustive backtracking whether a spec embeds into a host.

    Components are placed longest first. Every cycle starts at its smallest image vertex, a cycle
    of length at least 3 is read in the direction whose second vertex is smaller than its last,
    and cycles of equal length are placed in increasing order of their start. Isolated vertices
    take any leftover vertices at the end. The quotient keeps the search complete.

    Parameters
    ----------
    host: `cycleembed.HostGraph`
        Host graph
    spec: `cycleembed.CycleSpec`
        Target
    cap: `int`, optional
        Largest vertex count the search accepts

    Returns
    -------
    `cycleembed.OracleResult`
        The verdict, a witness when embeddable, and the number of search nodes

    Raises
    ------
    `cycleembed.exceptions.OracleCapError`
        If the host or the spec has more than `cap` vertices
    """
    if max(host.n, spec.n) > cap:
        raise OracleCapError(f"Brute force is capped at {cap} vertices, got n = {max(host.n, spec.n)}.")
    if spec.n > host.n:
        return OracleResult(embeddable=False)

    cycles = sorted((length for length in spec.cycles if length > 1), reverse=True)
    isolated = spec.count(1)
    free = set(range(host.n))
    placed: list[list[int]] = []
    nodes = 0

    def trace(path: list[int], length: int, start: int):
        nonlocal nodes
        nodes += 1
        if len(path) == length:
            if length == 2 or (host.has_edge(path[-1], start) and path[1] < path[-1]):
                yield list(path)
            return
        for w in sorted(host.neighbors(path[-1]) & free):
            if w > start and w not in path:
                path.append(w)
                yield from trace(path, length, start)
                path.pop()

    def place(index: int, floor: int) -> bool:
        if index == len(cycles):
            return len(free) >= isolated
        length = cycles[index]
        lower = floor if index and cycles[index - 1] == length else -1
        for start in sorted(v for v in free if v > lower):
            for cycle in trace([start], length, start):
                free.difference_update(cycle)
                placed.append(cycle)
                if place(index + 1, start):
                    return True
                placed.pop()
                free.update(cycle)
        return False

    if not place(0, -1):
        logger.debug(f"{spec.spec_id} does not embed; {nodes} nodes explored.")
        return OracleResult(embeddable=False, nodes_explored=nodes)

    pieces: dict[int, list[list[int]]] = defaultdict(list)
    for cycle in placed:
        pieces[len(cycle)].append(cycle)
    pieces[1] = [[v] for v in sorted(free)[:isolated]]
    assignment = [v for length in spec.cycles for v in pieces[length].pop(0)]
    witness = Embedding(spec=spec, assignment=assignment, phase=Phase.ORACLE)
    return OracleResult(embeddable=True, witness=witness, nodes_explored=nodes)


def exhaustive_universality(
    n: int, ell: int, host: HostGraph, cap: int = ORACLE_CAP
) -> UniversalityVerdict:
    """
    Check a host against every spec on n vertices with cycle lengths in {1, 2} ∪ [ℓ, n].

    Stops at the first spec that does not embed.
    """
    if n > cap:
        raise OracleCapError(f"Brute force is capped at {cap} vertices, got n = {n}.")
    checked = nodes = 0
    for spec in enumerate_bounded_family(n, ell, n):
        result = brute_force_embed(host, spec, cap)
        checked += 1
        nodes += result.nodes_explored
        if not result.embeddable:
            return UniversalityVerdict(universal=False, failing=spec, checked=checked, nodes_explored=nodes)
    return UniversalityVerdict(universal=True, checked=checked, nodes_explored=nodes)
