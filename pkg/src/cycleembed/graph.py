from pathlib import Path
from typing import Annotated, Iterable, Iterator

import networkx as nx
import numpy as np
from loguru import logger
from pydantic import Field, validate_call

from .constant import Direction
from .exceptions import GraphFormatError
from .types import RandomSeed
from .utils import EdgeListParser


Probability = Annotated[float, Field(ge=0, le=1)]


class HostGraph:
    """
    Immutable undirected host graph on the vertices 0..n-1.

    Parameters
    ----------
    n: `int`
        Number of vertices
    edges: `Iterable[tuple[int, int]]`, optional
        Edges as vertex pairs. Loops and out-of-range vertices are rejected, repeated pairs are merged
    """

    __slots__ = ["n", "_adj"]

    directed = False

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError(f"Vertex count must be non-negative. Got {n}.")
        adjacency = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"Loop at vertex {u} is not allowed.")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"Edge ({u}, {v}) leaves the vertex range [0, {n}).")
            adjacency[u].add(v)
            adjacency[v].add(u)
        self.n = n
        self._adj = tuple(frozenset(neighbors) for neighbors in adjacency)

    def __str__(self):
        return f"HostGraph(n={self.n}, m={self.num_edges})"

    __repr__ = __str__

    def __eq__(self, other):
        return (
            isinstance(other, HostGraph)
            and self.n == other.n
            and self._adj == other._adj
        )

    def __hash__(self):
        return hash((self.n, self._adj))

    @classmethod
    def complete(cls, n: int) -> "HostGraph":
        return cls(n, ((u, v) for u in range(n) for v in range(u + 1, n)))

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    out_neighbors = neighbors
    in_neighbors = neighbors

    def sorted_neighbors(self, v: int) -> list[int]:
        return sorted(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self._adj[u]

    def edges(self) -> Iterator[tuple[int, int]]:
        """
        Edges in lexicographic order, smaller endpoint first.
        """
        for u in range(self.n):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v

    @property
    def num_edges(self) -> int:
        return sum(len(neighbors) for neighbors in self._adj) // 2

    def union(self, *others: "HostGraph") -> "HostGraph":
        edges = list(self.edges())
        for other in others:
            if other.n != self.n:
                raise ValueError(f"Cannot unite graphs on {self.n} and {other.n} vertices.")
            edges.extend(other.edges())
        return HostGraph(self.n, edges)

    def is_subgraph_of(self, other: "HostGraph") -> bool:
        return self.n == other.n and all(
            mine <= theirs for mine, theirs in zip(self._adj, other._adj)
        )

    def symmetric_closure(self) -> "HostDigraph":
        """
        The digraph with both orientations of every edge.
        """
        arcs = [(u, v) for u, v in self.edges()]
        arcs += [(v, u) for u, v in arcs]
        return HostDigraph(self.n, arcs)

    def to_networkx(self, vertices: Iterable[int] | None = None) -> nx.Graph:
        graph = nx.Graph()
        keep = set(range(self.n)) if vertices is None else set(vertices)
        graph.add_nodes_from(sorted(keep))
        graph.add_edges_from((u, v) for u, v in self.edges() if u in keep and v in keep)
        return graph


class HostDigraph:
    """
    Immutable directed host graph on the vertices 0..n-1 with consistent in/out adjacency.

    Parameters
    ----------
    n: `int`
        Number of vertices
    arcs: `Iterable[tuple[int, int]]`, optional
        Arcs as ordered pairs (tail, head)
    """

    __slots__ = ["n", "_out", "_in"]

    directed = True

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError(f"Vertex count must be non-negative. Got {n}.")
        outgoing = [set() for _ in range(n)]
        incoming = [set() for _ in range(n)]
        for u, v in arcs:
            if u == v:
                raise ValueError(f"Loop at vertex {u} is not allowed.")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"Arc ({u}, {v}) leaves the vertex range [0, {n}).")
            outgoing[u].add(v)
            incoming[v].add(u)
        self.n = n
        self._out = tuple(frozenset(heads) for heads in outgoing)
        self._in = tuple(frozenset(tails) for tails in incoming)

    def __str__(self):
        return f"HostDigraph(n={self.n}, m={self.num_edges})"

    __repr__ = __str__

    @classmethod
    def complete(cls, n: int) -> "HostDigraph":
        return cls(n, ((u, v) for u in range(n) for v in range(n) if u != v))

    def out_neighbors(self, v: int) -> frozenset[int]:
        return self._out[v]

    def in_neighbors(self, v: int) -> frozenset[int]:
        return self._in[v]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self._out[u]

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in sorted(self._out[u]):
                yield u, v

    @property
    def num_edges(self) -> int:
        return sum(len(heads) for heads in self._out)


def _uniforms(n: int, seed: RandomSeed) -> np.ndarray:
    """
    One uniform draw in [0, 1) per ordered pair. A pair is kept when its draw is below p, so
    graphs generated from one stream at p₁ < p₂ are nested.
    """
    return seed.rng().random((n, n))


@validate_call
def gen_random_graph(n: Annotated[int, Field(ge=0)], p: Probability, seed: RandomSeed) -> HostGraph:
    """
    Sample G(n, p) from a seeded stream.

    Parameters
    ----------
    n: `int`
        Number of vertices
    p: `float`
        Edge probability in [0, 1]
    seed: `cycleembed.RandomSeed`
        Stream to draw the per-pair uniforms from

    Returns
    -------
    `cycleembed.HostGraph`
        Every unordered pair is an edge independently with probability p
    """
    draws = _uniforms(n, seed)
    rows, cols = np.triu_indices(n, k=1)
    keep = draws[rows, cols] < p
    graph = HostGraph(n, zip(rows[keep].tolist(), cols[keep].tolist()))
    logger.debug(f"Sampled G({n}, {p}) with {graph.num_edges} edges from stream {seed.label}.")
    return graph


@validate_call
def gen_random_digraph(
    n: Annotated[int, Field(ge=0)], p: Probability, seed: RandomSeed
) -> HostDigraph:
    """
    Sample D(n, p): every ordered pair of distinct vertices is an arc independently with probability p.
    """
    draws = _uniforms(n, seed)
    np.fill_diagonal(draws, 1.0)
    tails, heads = np.nonzero(draws < p)
    return HostDigraph(n, zip(tails.tolist(), heads.tolist()))


def neighbors_into(
    graph: HostGraph | HostDigraph,
    X: Iterable[int],
    Y: Iterable[int],
    direction: Direction = Direction.OUT,
) -> set[int]:
    """
    Vertices of Y outside X adjacent to some vertex of X.

    Parameters
    ----------
    graph: `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host graph
    X: `Iterable[int]`
        Source set
    Y: `Iterable[int]`
        Target set
    direction: `cycleembed.Direction`, optional
        `OUT` follows arcs leaving X, `IN` arcs entering X. Ignored for undirected hosts

    Returns
    -------
    `set[int]`
        N(X) ∩ Y with X removed
    """
    sources = set(X)
    targets = set(Y) - sources
    step = graph.in_neighbors if direction is Direction.IN else graph.out_neighbors
    found = set()
    for x in sources:
        found |= step(x) & targets
        if len(found) == len(targets):
            break
    return found


def edges_between(graph: HostGraph | HostDigraph, X: Iterable[int], Y: Iterable[int]) -> int:
    """
    Number of edges with one end in X and the other in Y.

    Arcs are counted as ordered pairs (tail in X, head in Y); undirected edges are counted once
    even when X and Y overlap.
    """
    sources, targets = set(X), set(Y)
    if graph.directed:
        return sum(len(graph.out_neighbors(x) & targets) for x in sources)
    found = set()
    for x in sources:
        for y in graph.neighbors(x) & targets:
            found.add((min(x, y), max(x, y)))
    return len(found)


def read_edge_list(path: str | Path) -> HostGraph:
    """
    Load a host graph from an edge-list file.

    Raises
    ------
    `cycleembed.exceptions.GraphFormatError`
        If the file is malformed; the error carries the offending line number
    """
    n, edges = EdgeListParser(Path(path).read_text()).parse()
    return HostGraph(n, edges)


def write_edge_list(graph: HostGraph, path: str | Path) -> None:
    """
    Write a host graph as `n m` followed by its edges in lexicographic order.
    """
    if graph.directed:
        raise GraphFormatError("The edge-list format stores undirected graphs only.", line=0)
    lines = [f"{graph.n} {graph.num_edges}"]
    lines += [f"{u} {v}" for u, v in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n")
