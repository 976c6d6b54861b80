from pydantic import BaseModel, Field, model_validator

from ..constant import VerificationMode


class Absorber(BaseModel):
    """
    A path gadget that can swallow one designated vertex.

    Both paths run between the same ends; `path_without` spans exactly `vertices`,
    `path_with` spans `vertices` plus `absorbed`.

    Parameters
    ----------
    vertices: `list[int]`
        Gadget vertex set R, sorted
    ends: `tuple[int, int]`
        Ends (r, s) shared by both paths
    absorbed: `int`
        The vertex v the gadget can swallow
    path_without: `list[int]`
        r,s-path with vertex set R
    path_with: `list[int]`
        r,s-path with vertex set R ∪ {v}
    """

    vertices: list[int]
    ends: tuple[int, int]
    absorbed: int
    path_without: list[int]
    path_with: list[int]

    @model_validator(mode="after")
    def spans(self) -> "Absorber":
        """
        Validate the following:

        - The absorbed vertex lies outside R.
        - Each path has the stated ends and spans its vertex set without repetition.
        """
        R = set(self.vertices)
        if self.absorbed in R:
            raise ValueError(f"Absorbed vertex {self.absorbed} lies inside the gadget.")
        for path, expected in ((self.path_without, R), (self.path_with, R | {self.absorbed})):
            if (path[0], path[-1]) != tuple(self.ends):
                raise ValueError(f"Path runs {path[0]}..{path[-1]}, expected ends {self.ends}.")
            if len(path) != len(expected) or set(path) != expected:
                raise ValueError("Path does not span the gadget vertex set exactly.")
        return self

    def __str__(self):
        return f"Absorber(v={self.absorbed}, ends={self.ends}, size={self.size})"

    __repr__ = __str__

    @property
    def size(self) -> int:
        return len(self.vertices)

    def path(self, absorb: bool) -> list[int]:
        return self.path_with if absorb else self.path_without


class FlexibleBipartiteTemplate(BaseModel):
    """
    Bounded-degree bipartite graph between X and Y ∪ Z such that X has a perfect matching into
    Y ∪ Z′ for every Z′ ⊆ Z of size n₀/3.

    Vertices are numbered X = 0..n₀-1, then Y, then Z, each of Y and Z of size 2n₀/3.

    Parameters
    ----------
    n0: `int`
        Size of X, a positive multiple of 3
    adjacency: `list[list[int]]`
        Sorted neighbours in Y ∪ Z of every vertex of X
    seed: `int`
        Seed the template was sampled from
    mode: `cycleembed.VerificationMode`
        Whether every Z′ was checked or only sampled ones
    """

    n0: int = Field(ge=3)
    adjacency: list[list[int]]
    seed: int = 0
    mode: VerificationMode = VerificationMode.EXACT

    @model_validator(mode="after")
    def bipartite_shape(self) -> "FlexibleBipartiteTemplate":
        if self.n0 % 3:
            raise ValueError(f"n0 must be a multiple of 3. Got {self.n0}.")
        if len(self.adjacency) != self.n0:
            raise ValueError(f"Expected {self.n0} adjacency rows, got {len(self.adjacency)}.")
        low, high = self.n0, self.n0 + 4 * self.n0 // 3
        for x, row in enumerate(self.adjacency):
            if any(not (low <= w < high) for w in row):
                raise ValueError(f"Row {x} leaves the range of Y ∪ Z.")
        return self

    def __str__(self):
        return f"FlexibleBipartiteTemplate(n0={self.n0}, max_degree={self.max_degree})"

    __repr__ = __str__

    @property
    def X(self) -> range:
        return range(self.n0)

    @property
    def Y(self) -> range:
        return range(self.n0, self.n0 + 2 * self.n0 // 3)

    @property
    def Z(self) -> range:
        return range(self.n0 + 2 * self.n0 // 3, self.n0 + 4 * self.n0 // 3)

    @property
    def order(self) -> int:
        return self.n0 + 4 * self.n0 // 3

    def edges(self) -> list[tuple[int, int]]:
        return [(x, w) for x, row in enumerate(self.adjacency) for w in row]

    def degrees(self) -> list[int]:
        degree = [0] * self.order
        for x, w in self.edges():
            degree[x] += 1
            degree[w] += 1
        return degree

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def neighbors(self, w: int) -> list[int]:
        """
        Sorted neighbours of any template vertex.
        """
        if w in self.X:
            return list(self.adjacency[w])
        return sorted(x for x, row in enumerate(self.adjacency) if w in row)


class RobustSet(BaseModel):
    """
    Linked absorbers that cover a fixed set W′ plus any half of a flexible pool A.

    Every index j owns an x_j,y_j-path assembled from link paths and the absorbers of its template
    neighbours. The absorber of v serving index j sits in `absorbers[v]` at the position of j among
    the sorted template neighbours of v.

    Parameters
    ----------
    pairs: `list[tuple[int, int]]`
        Endpoint pairs (x_j, y_j), 3r of them
    flexible: `list[int]`
        The pool A, 2r vertices
    fixed: `list[int]`
        The set B of always-absorbed vertices, 2r of them
    covered: `list[int]`
        W′, every vertex covered by the query output regardless of A′
    length: `int`
        Paths have `length - 1` edges
    template: `cycleembed.FlexibleBipartiteTemplate`
        Guiding template, X ↔ indices, Y ↔ `fixed`, Z ↔ `flexible`
    absorbers: `dict[int, list[cycleembed.Absorber]]`
        Absorbers of every vertex of A ∪ B, one per template edge
    links: `list[list[list[int]]]`
        Per index, the link paths in traversal order
    free: `list[int]`
        Workspace vertices the construction left unused
    """

    pairs: list[tuple[int, int]]
    flexible: list[int]
    fixed: list[int]
    covered: list[int]
    length: int = Field(ge=3)
    template: FlexibleBipartiteTemplate
    absorbers: dict[int, list[Absorber]]
    links: list[list[list[int]]]
    free: list[int] = []

    @model_validator(mode="after")
    def sizes(self) -> "RobustSet":
        r = len(self.flexible) // 2
        if len(self.flexible) != 2 * r or len(self.pairs) != 3 * r or len(self.fixed) != 2 * r:
            raise ValueError("A robust set needs |A| = |B| = 2r and 3r endpoint pairs.")
        if len(self.covered) != 3 * r * (self.length - 2) - r:
            raise ValueError(
                f"Covered set has {len(self.covered)} vertices, "
                f"expected 3r(l-2)-r = {3 * r * (self.length - 2) - r}."
            )
        return self

    def __str__(self):
        return f"RobustSet(r={self.r}, l={self.length}, |W′|={len(self.covered)})"

    __repr__ = __str__

    @property
    def r(self) -> int:
        return len(self.flexible) // 2

    def vertex_of(self, w: int) -> int:
        """
        Host vertex represented by a template vertex of Y ∪ Z.
        """
        if w in self.template.Y:
            return self.fixed[w - self.template.n0]
        return self.flexible[w - self.template.Z.start]
