from typing import Generator, Iterable

from .exceptions import GraphFormatError


class EdgeListParser:
    """
    A helper class to parse the edge-list text format.

    The first non-empty line is the header `n m`, followed by exactly m lines `u v`.

    Parameters
    ----------
    text : `str`
        Full content of the edge-list file
    """

    def __init__(self, text: str):
        self.text = text

    def parse(self) -> tuple[int, list[tuple[int, int]]]:
        """
        Parse the header and edges.

        Returns
        -------
        `tuple[int, list[tuple[int, int]]]`
            Vertex count and the edges in file order, each with the smaller endpoint first

        Raises
        ------
        `cycleembed.exceptions.GraphFormatError`
            If a line is malformed, a vertex is out of range, or an edge is a loop or a duplicate
        """
        lines = self.iter_lines()
        try:
            number, header = next(lines)
        except StopIteration:
            raise GraphFormatError("Missing header line 'n m'.", line=1)

        n, m = self.handle_pair(header, number)
        if n < 0 or m < 0:
            raise GraphFormatError(f"Header values must be non-negative. Got '{header}'.", number)

        edges, seen = [], set()
        for number, line in lines:
            u, v = self.handle_pair(line, number)
            match (u, v):
                case (u, v) if u == v:
                    raise GraphFormatError(f"Loop at vertex {u} is not allowed.", number)
                case (u, v) if not (0 <= u < n and 0 <= v < n):
                    raise GraphFormatError(
                        f"Vertex out of range in '{line}'. Vertices must lie in [0, {n}).",
                        number,
                    )
                case _:
                    edge = (min(u, v), max(u, v))
                    if edge in seen:
                        raise GraphFormatError(f"Duplicate edge {edge}.", number)
                    seen.add(edge)
                    edges.append(edge)

        if len(edges) != m:
            raise GraphFormatError(
                f"Header announces {m} edges but the file lists {len(edges)}.", number + 1
            )
        return n, edges

    def iter_lines(self) -> Generator[tuple[int, str], None, None]:
        for number, line in enumerate(self.text.splitlines(), start=1):
            if line.strip():
                yield number, line.strip()

    @staticmethod
    def handle_pair(line: str, number: int) -> tuple[int, int]:
        tokens = line.split()
        match tokens:
            case [first, second] if first.isdigit() and second.isdigit():
                return int(first), int(second)
            case [_, _]:
                raise GraphFormatError(f"Expected two decimal integers. Got '{line}'.", number)
            case _:
                raise GraphFormatError(
                    f"Expected exactly two fields, got {len(tokens)} in '{line}'.", number
                )


def check_path(
    graph,
    path: list[int],
    length: int | None = None,
    interior: Iterable[int] | None = None,
) -> str | None:
    """
    Check that a vertex sequence is a path of the host graph.

    A sequence whose first and last vertices coincide is accepted as a closed path (a cycle
    through its first vertex); every other repetition is a violation.

    Parameters
    ----------
    graph : `cycleembed.HostGraph | cycleembed.HostDigraph`
        Host to replay the sequence in (arcs are followed forward for digraphs)
    path : `list[int]`
        Vertex sequence
    length : `int`, optional
        Required number of edges
    interior : `Iterable[int]`, optional
        Pool every interior vertex must belong to

    Returns
    -------
    `str | None`
        Description of the first violation, or `None` if the sequence is valid
    """
    if not path:
        return "empty path"
    if length is not None and len(path) - 1 != length:
        return f"path has length {len(path) - 1}, expected {length}"

    body = path[:-1] if len(path) > 2 and path[0] == path[-1] else path
    if len(set(body)) != len(body):
        return f"repeated vertex in {path}"

    for u, v in zip(path, path[1:]):
        if not graph.has_edge(u, v):
            return f"missing edge {u}->{v}"

    if interior is not None:
        pool = set(interior)
        stray = [v for v in path[1:-1] if v not in pool]
        if stray:
            return f"interior vertices {stray} outside the workspace"
    return None


def interior_vertices(paths: Iterable[list[int]]) -> list[int]:
    return [v for path in paths for v in path[1:-1]]
