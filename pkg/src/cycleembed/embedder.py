from collections import Counter, defaultdict

import networkx as nx
import numpy as np
from loguru import logger
from pydantic import ConfigDict, Field
from pydantic.dataclasses import dataclass

from .absorber import connect_pairs_spanning
from .connector import connect_pairs
from .constant import Family, Layer, Phase
from .cycles import (
    classify,
    reduce_long_cycles,
    segment_representation,
    split_small_components,
    validate_spec,
)
from .exceptions import (
    AbsorberError,
    AuxiliaryError,
    ConnectorError,
    EmbeddingError,
    ExpansionError,
    FactorError,
    RepresentationError,
    SearchBudgetError,
    SegmentationError,
    SpecError,
)
from .expansion import split_expanding
from .graph import HostDigraph, HostGraph, _uniforms
from .types import (
    ConnectionRequest,
    ConstantsProfile,
    CycleSpec,
    Embedding,
    EmbeddingVerdict,
    LongCycleReduction,
    RandomSeed,
)


LAYER_ORDER = (Layer.G1, Layer.G2, Layer.G4, Layer.G5)


def _patterns(q: float) -> np.ndarray:
    """
    Probabilities of the 15 non-empty layer memberships of one pair, bit i standing for layer i.
    """
    bits = np.array([bin(mask).count("1") for mask in range(1, 16)])
    return q**bits * (1 - q) ** (4 - bits)


@dataclass(config=ConfigDict(arbitrary_types_allowed=True), kw_only=True)
class ExposureLayers:
    """
    Four independent G(n, q) layers whose union is one G(n, p) sample, with (1-q)⁴ = 1-p.

    Parameters
    ----------
    g1: `cycleembed.HostGraph`
        Layer embedding the small components
    g2: `cycleembed.HostGraph`
        Layer routing first-family segments, and completing bounded specs
    g4: `cycleembed.HostGraph`
        First half of the auxiliary digraph layer
    g5: `cycleembed.HostGraph`
        Second half of the auxiliary digraph layer
    p: `float`
        Edge probability of the union
    q: `float`
        Edge probability of every layer
    """

    g1: HostGraph
    g2: HostGraph
    g4: HostGraph
    g5: HostGraph
    p: float = Field(ge=0, le=1)
    q: float = Field(ge=0, le=1)
    copies: dict = Field(default_factory=dict)

    def __str__(self):
        return f"ExposureLayers(n={self.g1.n}, p={self.p}, q={self.q:.4f})"

    __repr__ = __str__

    @property
    def n(self) -> int:
        return self.g1.n

    @property
    def g3(self) -> HostGraph:
        return self.g4.union(self.g5)

    def union(self) -> HostGraph:
        return self.g1.union(self.g2, self.g4, self.g5)

    def layer(self, name: Layer) -> HostGraph:
        match name:
            case Layer.G1:
                return self.g1
            case Layer.G2:
                return self.g2
            case Layer.G4:
                return self.g4
            case Layer.G5:
                return self.g5

    @classmethod
    def from_masks(cls, n: int, pairs, masks, p: float, q: float) -> "ExposureLayers":
        edges = [[], [], [], []]
        for pair, mask in zip(pairs, masks):
            for bit in range(4):
                if mask >> bit & 1:
                    edges[bit].append(pair)
        g1, g2, g4, g5 = (HostGraph(n, layer) for layer in edges)
        return cls(g1=g1, g2=g2, g4=g4, g5=g5, p=p, q=q)

    @classmethod
    def from_host(cls, host: HostGraph, seed: RandomSeed) -> "ExposureLayers":
        """
        Split the edges of a fixed host into four layers as if it were a G(n, p) sample with p its
        edge density.
        """
        pairs = list(host.edges())
        total = host.n * (host.n - 1) // 2
        p = len(pairs) / total if total else 0.0
        q = layer_probability(p)
        if not pairs:
            return cls.from_masks(host.n, [], [], p, q)
        weights = _patterns(q)
        picks = seed.rng().choice(15, size=len(pairs), p=weights / weights.sum())
        return cls.from_masks(host.n, pairs, (picks + 1).tolist(), p, q)


def layer_probability(p: float) -> float:
    if p >= 1:
        return 1.0
    return 1 - (1 - p) ** 0.25


def make_layers(n: int, p: float, seed: RandomSeed) -> ExposureLayers:
    """
    Sample the four exposure layers of one host.

    Every pair receives one uniform draw from the same stream `gen_random_graph` uses. A draw
    below p selects a non-empty membership pattern with probability q^|b|(1-q)^(4-|b|), so the
    layers are independent G(n, q) graphs and their union is exactly `gen_random_graph(n, p, seed)`.

    Parameters
    ----------
    n: `int`
        Number of vertices
    p: `float`
        Edge probability of the union, in [0, 1]
    seed: `cycleembed.RandomSeed`
        Stream of the per-pair draws

    Returns
    -------
    `cycleembed.ExposureLayers`
        The layers with q = 1 - (1-p)^(1/4)
    """
    if not 0 <= p <= 1:
        raise ValueError(f"Edge probability must lie in [0, 1]. Got {p}.")
    q = layer_probability(p)
    draws = _uniforms(n, seed)
    rows, cols = np.triu_indices(n, k=1)
    values = draws[rows, cols]
    keep = values < p
    bounds = np.cumsum(_patterns(q))
    masks = np.minimum(np.searchsorted(bounds, values[keep], side="right"), 14) + 1
    pairs = list(zip(rows[keep].tolist(), cols[keep].tolist()))
    layers = ExposureLayers.from_masks(n, pairs, masks.tolist(), p, q)
    logger.debug(f"Exposed {layers} with {len(pairs)} union edges.")
    return layers


class _Budget:
    __slots__ = ["left", "phase"]

    def __init__(self, nodes: int, phase: str):
        self.left = nodes
        self.phase = phase

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise SearchBudgetError("Cycle search ran out of nodes.", self.phase)


def _cycles_through(host, v, length, allowed, rank, budget):
    """
    Cycles of the given length through v whose other vertices lie in `allowed`, each reported once.
    """
    if length == 1:
        yield [v]
        return
    key = rank.__getitem__
    if length == 2:
        for w in sorted(host.neighbors(v) & allowed, key=key):
            budget.spend()
            yield [v, w]
        return

    path, on_path = [v], {v}

    def grow():
        budget.spend()
        if len(path) == length:
            if host.has_edge(path[-1], v) and rank[path[1]] < rank[path[-1]]:
                yield list(path)
            return
        for w in sorted(host.neighbors(path[-1]) & allowed - on_path, key=key):
            path.append(w)
            on_path.add(w)
            yield from grow()
            path.pop()
            on_path.discard(w)

    yield from grow()


def _find_cycle(host, length, free, rank, budget) -> list[int] | None:
    for v in sorted(free, key=rank.__getitem__):
        allowed = {w for w in free if rank[w] > rank[v]}
        for cycle in _cycles_through(host, v, length, allowed, rank, budget):
            return cycle
    return None


def _pack_cycles(host, pool, s, count, rank, budget) -> list[list[int]] | None:
    """
    Complete backtracking for `count` disjoint s-cycles inside `pool`; `None` if none exist.
    """
    free = set(pool)
    if s * count > len(free):
        return None
    cycles: list[list[int]] = []

    def place(skips: int) -> bool:
        if len(cycles) == count:
            return True
        budget.spend()
        pivot = min(free, key=rank.__getitem__)
        for cycle in _cycles_through(host, pivot, s, free - {pivot}, rank, budget):
            free.difference_update(cycle)
            cycles.append(cycle)
            if place(skips):
                return True
            cycles.pop()
            free.update(cycle)
        if skips:
            free.discard(pivot)
            if place(skips - 1):
                return True
            free.add(pivot)
        return False

    return cycles if place(len(free) - s * count) else None


def _pack(
    host: HostGraph,
    pool,
    s: int,
    count: int,
    profile: ConstantsProfile,
    seed: RandomSeed,
    phase: str,
) -> list[list[int]]:
    vertices = sorted(pool)
    if not count:
        return []
    if s * count > len(vertices):
        raise FactorError(f"{count} cycles of length {s} do not fit into {len(vertices)} vertices.", phase)
    if s == 1:
        return [[v] for v in vertices[:count]]
    if s == 2:
        matching = nx.max_weight_matching(host.to_networkx(vertices), maxcardinality=True)
        edges = sorted(tuple(sorted(edge)) for edge in matching)
        if len(edges) < count:
            raise FactorError(f"Matching of size {len(edges)} found, {count} needed.", phase)
        return [list(edge) for edge in edges[:count]]

    rng = seed.rng()
    for restart in range(profile.factor_restarts):
        order = vertices if not restart else rng.permutation(vertices).tolist()
        rank = {v: i for i, v in enumerate(order)}
        try:
            cycles = _pack_cycles(host, vertices, s, count, rank, _Budget(profile.search_budget, phase))
        except SearchBudgetError:
            logger.debug(f"Packing {count}×C{s} hit the node budget on restart {restart}.")
            continue
        if cycles is None:
            raise FactorError(f"No {count} disjoint {s}-cycles exist on {len(vertices)} vertices.", phase)
        return cycles
    raise FactorError(
        f"No {count} disjoint {s}-cycles found within {profile.factor_restarts} restarts.", phase
    )


def find_cycle_factor(
    host: HostGraph,
    S,
    s: int,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> list[list[int]]:
    """
    Partition S into cycles of length s of the host.

    s = 1 is trivial, s = 2 is a perfect matching (blossom algorithm), s ≥ 3 is a backtracking
    packing with randomized restarts under the profile's node budget.

    Parameters
    ----------
    host: `cycleembed.HostGraph`
        Host graph
    S: `Iterable[int]`
        Vertices to cover
    s: `int`
        Cycle length, dividing |S|
    profile: `cycleembed.ConstantsProfile`, optional
        Supplies the node budget and the number of restarts
    seed: `cycleembed.RandomSeed`, optional
        Stream of the restart orders

    Returns
    -------
    `list[list[int]]`
        The cycles, each a vertex sequence closed by an edge back to its first vertex

    Raises
    ------
    `ValueError`
        If s does not divide |S|
    `cycleembed.exceptions.FactorError`
        If no factor exists or none was found within the budget
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="factor")
    vertices = sorted(set(S))
    if s < 1 or len(vertices) % s:
        raise ValueError(f"Cycle length {s} does not divide |S| = {len(vertices)}.")
    return _pack(host, vertices, s, len(vertices) // s, profile, seed, "factor")


def _assemble(spec: CycleSpec, pieces: dict[int, list[list[int]]]) -> list[int]:
    assignment = []
    for length in spec.cycles:
        assignment += pieces[length].pop(0)
    return assignment


def embed_bounded(
    host: HostGraph,
    spec: CycleSpec,
    ell: int = 3,
    K: int | None = None,
    completion: HostGraph | None = None,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> Embedding:
    """
    Embed a spec whose components all have at most K vertices.

    The size s maximising s·X_s is set aside. Every other cycle is embedded greedily, longest
    first, by a cycle search in what is left of the host; then X_s disjoint s-cycles are packed
    into the remaining vertices of `completion`, and the isolated vertices take whatever is left.

    Parameters
    ----------
    host: `cycleembed.HostGraph`
        Layer for the greedy stage
    spec: `cycleembed.CycleSpec`
        Target with spec.n ≤ host.n
    ell: `int`, optional
        Girth parameter
    K: `int`, optional
        Component bound. Defaults to the profile's K
    completion: `cycleembed.HostGraph`, optional
        Layer for the packing stage. Defaults to `host`
    profile: `cycleembed.ConstantsProfile`, optional
        Node budget and restarts of the searches
    seed: `cycleembed.RandomSeed`, optional
        Stream of the packing restarts

    Returns
    -------
    `cycleembed.Embedding`
        Embedding into host ∪ completion

    Raises
    ------
    `cycleembed.exceptions.SpecError`
        If the spec is invalid or has a component above K
    `cycleembed.exceptions.EmbeddingError`
        If the greedy stage misses a cycle, or the packing fails (`FactorError`)
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="bounded")
    K = K or profile.K
    validate_spec(spec, ell)
    if any(length > K for length in spec.cycles):
        raise SpecError(f"Component of size {max(spec.cycles)} exceeds K = {K}.", max(spec.cycles))
    if spec.n > host.n:
        raise EmbeddingError(f"Spec on {spec.n} vertices does not fit a host on {host.n}.", "bounded")
    completion = completion or host

    counts = spec.counts
    pieces: dict[int, list[list[int]]] = defaultdict(list)
    if set(counts) <= {1}:
        pieces[1] = [[v] for v in range(spec.n)]
        return Embedding(spec=spec, assignment=_assemble(spec, pieces), phase=Phase.BOUNDED)

    s = max(counts, key=lambda size: (size * counts[size], -size))
    free = set(range(host.n))
    rank = {v: v for v in free}
    budget = _Budget(profile.search_budget, "bounded")
    others = sorted((length for length in spec.cycles if length not in (1, s)), reverse=True)
    try:
        for length in others:
            cycle = _find_cycle(host, length, free, rank, budget)
            if cycle is None:
                raise EmbeddingError(
                    f"No {length}-cycle left in a residual of {len(free)} vertices.", "bounded"
                )
            pieces[length].append(cycle)
            free.difference_update(cycle)
    except SearchBudgetError as error:
        raise EmbeddingError(f"Greedy cycle search exhausted its budget: {error}", "bounded") from error

    if s != 1:
        pieces[s] = _pack(completion, free, s, counts[s], profile, seed, "bounded")
        free.difference_update(v for cycle in pieces[s] for v in cycle)
    pieces[1] = [[v] for v in sorted(free)[: counts[1]]]
    logger.debug(f"Bounded embedding of {spec.spec_id} completed with {counts[s]}×C{s}.")
    return Embedding(spec=spec, assignment=_assemble(spec, pieces), phase=Phase.BOUNDED)


def _phase_one(
    layers: ExposureLayers, spec: CycleSpec, profile: ConstantsProfile, seed: RandomSeed
) -> Embedding:
    """
    The fixed copy of the small part of a spec in G₁, shared by every spec with the same small part.
    """
    if spec.spec_id not in layers.copies:
        layers.copies[spec.spec_id] = embed_bounded(
            layers.g1, spec, profile.ell, profile.K, layers.g1, profile, seed.child("phase1")
        )
    return layers.copies[spec.spec_id]


def embed_h1(
    layers: ExposureLayers,
    spec: CycleSpec,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> Embedding:
    """
    Embed a first-family spec.

    The components of size at most K^(1/3) are embedded into G₁. Every longer cycle is cut into
    segments of lengths L and L+1, the t smallest free vertices become anchors with segment j of
    cycle i running from aᵢⱼ to aᵢ₍ⱼ₊₁₎, and the two length classes are routed through a split
    of the remaining vertices with spanning path systems in G₂.

    Raises
    ------
    `cycleembed.exceptions.SegmentationError`
        If a cycle cannot be cut into segments, or a class falls below n/4K vertices
    `cycleembed.exceptions.EmbeddingError`
        Wrapping routing failures, with the phase set to `h1`
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="h1")
    n = layers.n
    if spec.n != n:
        raise EmbeddingError(f"Spec on {spec.n} vertices for a host on {n}.", "h1")
    _, small = split_small_components(spec, profile)
    long_cycles = [length for length in spec.cycles if length > profile.short_cutoff]

    phase_one = _phase_one(layers, small, profile, seed)
    if not long_cycles:
        return Embedding(spec=spec, assignment=list(phase_one.assignment), phase=Phase.H1)

    L = profile.segment_length
    segments = []
    for index, length in enumerate(long_cycles):
        try:
            segments.append(segment_representation(length, L))
        except RepresentationError as error:
            raise SegmentationError(f"Cycle {index} of length {length}: {error}", "h1") from error

    occupied = set(phase_one.assignment)
    t = sum(len(parts) for parts in segments)
    candidates = [v for v in range(n) if v not in occupied]
    if candidates[:t] != list(range(t)):
        logger.debug("Anchor selection skips vertices used by the small components.")
    anchors = candidates[:t]

    classes: dict[int, list[tuple[int, int, int]]] = {L: [], L + 1: []}
    position = 0
    for index, parts in enumerate(segments):
        own = anchors[position : position + len(parts)]
        position += len(parts)
        for j, length in enumerate(parts):
            classes[length].append((index, j, (own[j], own[(j + 1) % len(own)])))

    s1, s2 = len(classes[L]) * (L - 1), len(classes[L + 1]) * L
    for size in (s1, s2):
        if size and 4 * profile.K * size < n:
            raise SegmentationError(f"A segment class covers {size} < n/4K vertices.", "h1")

    workspace = candidates[t:]
    first, second = split_expanding(
        layers.g2,
        workspace,
        [s1, s2],
        profile.expansion_degree(n),
        seed.child("classes"),
        retries=profile.split_retries,
        trials=profile.sampled_trials,
        strict=False,
    )

    routed: dict[tuple[int, int], list[int]] = {}
    for length, part in ((L, first), (L + 1, second)):
        members = classes[length]
        if not members:
            continue
        try:
            bundle = connect_pairs_spanning(
                layers.g2,
                [pair for _, _, pair in members],
                length,
                part,
                profile,
                seed.child(f"class{length}"),
            )
        except (ConnectorError, AbsorberError, ExpansionError, SearchBudgetError) as error:
            cycles = sorted({index for index, _, _ in members})
            raise EmbeddingError(f"Routing segments of cycles {cycles} failed: {error}", "h1") from error
        for (index, j, _), path in zip(members, bundle.paths):
            routed[(index, j)] = path

    pieces: dict[int, list[list[int]]] = defaultdict(list)
    for component in phase_one.images():
        pieces[len(component)].append(component)
    for index, (length, parts) in enumerate(zip(long_cycles, segments)):
        cycle = []
        for j in range(len(parts)):
            cycle += routed[(index, j)][:-1]
        if len(cycle) != length:
            raise EmbeddingError(f"Cycle {index} closed with {len(cycle)} vertices, expected {length}.", "h1")
        pieces[length].append(cycle)
    return Embedding(spec=spec, assignment=_assemble(spec, pieces), phase=Phase.H1)


@dataclass(config=ConfigDict(arbitrary_types_allowed=True), kw_only=True)
class AuxiliaryDigraph:
    """
    Digraph on the u-cycles Z and the designated isolated vertices A of a phase-one copy.

    Vertices 0..|Z|-1 are the u-cycles ordered by their first vertex sᵢ, the rest are A in host
    order. A digraph vertex expands into `back_map[v]`: the u-cycle walked from sᵢ to tᵢ, or the
    single vertex of A.
    """

    digraph: HostDigraph
    back_map: list[list[int]]
    cycles: int
    u: int

    def __str__(self):
        return f"AuxiliaryDigraph(|Z|={self.cycles}, |A|={self.digraph.n - self.cycles}, u={self.u})"

    __repr__ = __str__

    @property
    def Z(self) -> range:
        return range(self.cycles)

    @property
    def A(self) -> range:
        return range(self.cycles, self.digraph.n)

    def expand(self, walk: list[int]) -> list[int]:
        return [v for vertex in walk for v in self.back_map[vertex]]


def build_auxiliary_digraph(
    layers: ExposureLayers, phase_one: Embedding, reduction: LongCycleReduction
) -> AuxiliaryDigraph:
    """
    Build the digraph the long cycles are routed in.

    Every u-cycle of the copy contributes a vertex z = st, where ts is the edge of the cycle that
    routing deletes, and the Σβᵢ smallest isolated images form A. Arcs follow three rules:
    z→z′ iff ts′ ∈ G₄; z→a iff ta ∈ G₄ and a→z iff as ∈ G₄; for a < a′, a→a′ iff aa′ ∈ G₄ and
    a′→a iff aa′ ∈ G₅. When u = 1 the cycles are single vertices and follow the last rule.

    Raises
    ------
    `cycleembed.exceptions.AuxiliaryError`
        If the copy lacks the u-cycles or isolated vertices the reduction needs
    """
    u = reduction.u
    components = phase_one.images()
    z_cycles = sorted((c for c in components if len(c) == u), key=lambda c: c[0])
    needed = phase_one.spec.count(u)
    if len(z_cycles) != needed or needed < sum(reduction.gammas):
        raise AuxiliaryError(f"Copy holds {len(z_cycles)} cycles of length {u}, needs {needed}.", "h2")
    isolated = sorted(c[0] for c in components if len(c) == 1) if u != 1 else []
    beta = sum(reduction.betas)
    if len(isolated) < beta:
        raise AuxiliaryError(f"Copy holds {len(isolated)} isolated vertices, needs {beta}.", "h2")
    A = isolated[:beta]

    back_map = [list(c) for c in z_cycles] + [[a] for a in A]
    heads = [c[0] for c in z_cycles]
    tails = [c[-1] for c in z_cycles]
    g4, g5 = layers.g4, layers.g5
    arcs = []
    size = len(z_cycles)

    if u == 1:
        points = heads + A
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                low, high = (i, j) if points[i] < points[j] else (j, i)
                if g4.has_edge(points[i], points[j]):
                    arcs.append((low, high))
                if g5.has_edge(points[i], points[j]):
                    arcs.append((high, low))
    else:
        for i in range(size):
            for j in range(size):
                if i != j and g4.has_edge(tails[i], heads[j]):
                    arcs.append((i, j))
            for offset, a in enumerate(A):
                if g4.has_edge(tails[i], a):
                    arcs.append((i, size + offset))
                if g4.has_edge(a, heads[i]):
                    arcs.append((size + offset, i))
        for i, a in enumerate(A):
            for j in range(i + 1, len(A)):
                if g4.has_edge(a, A[j]):
                    arcs.append((size + i, size + j))
                if g5.has_edge(a, A[j]):
                    arcs.append((size + j, size + i))

    digraph = HostDigraph(len(back_map), arcs)
    logger.debug(f"Auxiliary digraph with {digraph.num_edges} arcs on {digraph.n} vertices.")
    return AuxiliaryDigraph(digraph=digraph, back_map=back_map, cycles=size, u=u)


def phase3_cycle_length(segment_total: int, beta: int, u: int, closing_halves: bool = False) -> int:
    """
    Length of the host cycle a closed digraph walk expands into.

    `segment_total` is Σⱼλⱼ, the number of arcs of the walk, and `beta` the number of A-vertices
    on it. With `closing_halves` the total is given as Σⱼ(αⱼ+1), which counts the two closing
    z-halves as well.
    """
    if closing_halves:
        segment_total -= 2
    return (segment_total - beta) * u + beta


def embed_h2(
    layers: ExposureLayers,
    spec: CycleSpec,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> Embedding:
    """
    Embed a second-family spec.

    Every long cycle Cᵢ is replaced by γᵢ cycles of length u plus βᵢ isolated vertices and the
    reduced spec is embedded into G₁. In the auxiliary digraph, cycle i gets βᵢ anchors from A and
    tᵢ-βᵢ from the smallest u-cycles Z′, and closed walks with segment lengths in {h-1, h}
    summing to γᵢ+βᵢ are routed through Z∖Z′. Expanding every z back into its u-cycle yields a
    host cycle of length exactly |Cᵢ|; the u-cycles no walk used become the spec's own.

    Raises
    ------
    `cycleembed.exceptions.SegmentationError`
        If a segment total cannot be represented or has fewer parts than βᵢ
    `cycleembed.exceptions.AuxiliaryError`
        If the copy does not match the reduction, or a reconstructed cycle has the wrong length
    `cycleembed.exceptions.EmbeddingError`
        Wrapping routing failures, with the phase set to `h2`
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="h2")
    if spec.n != layers.n:
        raise EmbeddingError(f"Spec on {spec.n} vertices for a host on {layers.n}.", "h2")
    reduction = reduce_long_cycles(spec, profile)
    phase_one = _phase_one(layers, reduction.reduced, profile, seed)

    pieces: dict[int, list[list[int]]] = defaultdict(list)
    for component in phase_one.images():
        pieces[len(component)].append(component)
    if not reduction.long_cycles:
        return Embedding(spec=spec, assignment=_assemble(spec, pieces), phase=Phase.H2)

    u = reduction.u
    auxiliary = build_auxiliary_digraph(layers, phase_one, reduction)
    h = profile.h2_segment
    plans = []
    for index, (gamma, beta) in enumerate(zip(reduction.gammas, reduction.betas)):
        try:
            parts = segment_representation(gamma + beta, h - 1)
        except RepresentationError as error:
            raise SegmentationError(f"Cycle {index}: {error}", "h2") from error
        if len(parts) < beta:
            raise SegmentationError(f"Cycle {index} has {len(parts)} segments for β = {beta}.", "h2")
        plans.append(parts)

    A = list(auxiliary.A)
    fixed = list(auxiliary.Z)[: sum(len(parts) - beta for parts, beta in zip(plans, reduction.betas))]
    workspace = list(auxiliary.Z)[len(fixed) :]
    pairs, lengths, owners = [], [], []
    used_a = used_z = 0
    for index, (parts, beta) in enumerate(zip(plans, reduction.betas)):
        anchors = A[used_a : used_a + beta] + fixed[used_z : used_z + len(parts) - beta]
        used_a += beta
        used_z += len(parts) - beta
        for j, length in enumerate(parts):
            pairs.append((anchors[j], anchors[(j + 1) % len(anchors)]))
            lengths.append(length)
            owners.append(index)

    try:
        bundle = connect_pairs(
            auxiliary.digraph,
            ConnectionRequest(pairs=pairs, lengths=lengths, workspace=workspace),
            profile,
            seed.child("digraph"),
        )
    except (ConnectorError, ExpansionError) as error:
        raise EmbeddingError(f"Routing in the auxiliary digraph failed: {error}", "h2") from error

    walks: dict[int, list[int]] = defaultdict(list)
    for owner, path in zip(owners, bundle.paths):
        walks[owner] += path[:-1]

    consumed = set()
    pieces[1] = [c for c in pieces[1] if u == 1 or c[0] not in {auxiliary.back_map[a][0] for a in A}]
    for index, length in enumerate(reduction.long_cycles):
        walk = walks[index]
        consumed.update(v for v in walk if v in auxiliary.Z)
        cycle = auxiliary.expand(walk)
        expected = phase3_cycle_length(sum(plans[index]), reduction.betas[index], u)
        if expected != length or len(cycle) != length:
            raise AuxiliaryError(
                f"Cycle {index} expanded to {len(cycle)} vertices, bookkeeping gives {expected}, "
                f"expected {length}.",
                "h2",
            )
        pieces[length].append(cycle)

    leftover = [auxiliary.back_map[z] for z in auxiliary.Z if z not in consumed]
    if len(leftover) != spec.count(u):
        raise AuxiliaryError(f"{len(leftover)} cycles of length {u} remain, spec has {spec.count(u)}.", "h2")
    pieces[u] = leftover
    if u == 1:
        pieces[1] = leftover
    return Embedding(spec=spec, assignment=_assemble(spec, pieces), phase=Phase.H2)


def _provenance(layers: ExposureLayers, embedding: Embedding) -> list[Layer]:
    tags = []
    for u, v in embedding.host_edges():
        layer = next((name for name in LAYER_ORDER if layers.layer(name).has_edge(u, v)), None)
        if layer is None:
            raise EmbeddingError(f"Edge {u}-{v} lies in no layer.", embedding.phase.value)
        tags.append(layer)
    return tags


def audit_provenance(layers: ExposureLayers, embedding: Embedding) -> str | None:
    """
    Check that every used edge lies in the layer its tag names.

    Returns
    -------
    `str | None`
        The first mismatch, or `None`
    """
    edges = embedding.host_edges()
    if len(edges) != len(embedding.edge_provenance):
        return f"{len(edges)} edges but {len(embedding.edge_provenance)} provenance tags"
    for (u, v), tag in zip(edges, embedding.edge_provenance):
        if not layers.layer(tag).has_edge(u, v):
            return f"edge {u}-{v} is not in {tag.value}"
    return None


def verify_embedding(host: HostGraph, spec: CycleSpec, embedding: Embedding) -> EmbeddingVerdict:
    """
    Replay an embedding against a host.

    Checks the spec, injectivity and range of the assignment, and that every target edge maps to a
    host edge, including the closing edge of every cycle.
    """
    if Counter(embedding.spec.cycles) != Counter(spec.cycles) or embedding.spec.n != spec.n:
        return EmbeddingVerdict(valid=False, violation=f"embedding realizes {embedding.spec.spec_id}, not {spec.spec_id}")
    assignment = embedding.assignment
    if len(assignment) != spec.n:
        return EmbeddingVerdict(valid=False, violation=f"assignment has {len(assignment)} images for n = {spec.n}")
    if len(set(assignment)) != len(assignment):
        return EmbeddingVerdict(valid=False, violation="assignment is not injective")
    stray = [v for v in assignment if not 0 <= v < host.n]
    if stray:
        return EmbeddingVerdict(valid=False, violation=f"images {stray} are not host vertices")
    for a, b in spec.target_edges():
        if not host.has_edge(assignment[a], assignment[b]):
            return EmbeddingVerdict(
                valid=False, violation=f"missing edge {assignment[a]}-{assignment[b]}"
            )
    return EmbeddingVerdict(valid=True)


def _dispatch(
    layers: ExposureLayers, spec: CycleSpec, profile: ConstantsProfile, seed: RandomSeed
) -> Embedding:
    if all(length <= profile.K for length in spec.cycles):
        return embed_bounded(
            layers.g1, spec, profile.ell, profile.K, layers.g2, profile, seed.child("bounded")
        )
    match classify(spec, profile):
        case Family.H1:
            return embed_h1(layers, spec, profile, seed.child("h1"))
        case Family.H2:
            return embed_h2(layers, spec, profile, seed.child("h2"))


def expected_phase(spec: CycleSpec, profile: ConstantsProfile) -> Phase:
    if all(length <= profile.K for length in spec.cycles):
        return Phase.BOUNDED
    return Phase.H1 if classify(spec, profile) is Family.H1 else Phase.H2


def embed(
    layers: ExposureLayers,
    spec: CycleSpec,
    profile: ConstantsProfile | None = None,
    seed: RandomSeed | None = None,
) -> Embedding:
    """
    Embed any spec of the family into the union of the exposure layers.

    Specs with every component at most K go to the bounded routine; otherwise the spec is
    classified and handed to the first- or second-family routine. A failing attempt is retried up
    to `profile.retries` times with fresh algorithm seeds on the same layers.

    Parameters
    ----------
    layers: `cycleembed.ExposureLayers`
        Host, already split into layers
    spec: `cycleembed.CycleSpec`
        Target
    profile: `cycleembed.ConstantsProfile`, optional
        Constants of the pipeline
    seed: `cycleembed.RandomSeed`, optional
        Algorithm stream

    Returns
    -------
    `cycleembed.Embedding`
        A verified embedding with edge provenance, its phase and the retries it took

    Raises
    ------
    `cycleembed.exceptions.SpecError`
        If the spec does not belong to the family
    `cycleembed.exceptions.EmbeddingError`
        If every attempt failed; `phase` names the failing stage
    """
    profile = profile or ConstantsProfile.practical()
    seed = seed or RandomSeed(seed=0, label="embed")
    validate_spec(spec, profile.ell)
    if spec.n != layers.n:
        raise EmbeddingError(f"Spec on {spec.n} vertices for a host on {layers.n}.", Phase.VALIDATE.value)
    phase = expected_phase(spec, profile)

    failure = None
    for attempt in range(profile.retries + 1):
        attempt_seed = seed if not attempt else seed.child(f"retry{attempt}")
        try:
            embedding = _dispatch(layers, spec, profile, attempt_seed)
        except EmbeddingError as error:
            failure = error
        except (ConnectorError, AbsorberError, ExpansionError) as error:
            failure = EmbeddingError(str(error), phase.value)
        else:
            embedding.phase = phase
            embedding.retries = attempt
            embedding.edge_provenance = _provenance(layers, embedding)
            verdict = verify_embedding(layers.union(), spec, embedding)
            if not verdict:
                raise EmbeddingError(f"Pipeline produced an invalid embedding: {verdict.violation}", phase.value)
            logger.success(f"Embedded {spec.spec_id} via {phase.value} after {attempt} retries.")
            return embedding
        logger.warning(f"Attempt {attempt + 1} for {spec.spec_id} failed in {failure.phase}: {failure}")
    raise failure
