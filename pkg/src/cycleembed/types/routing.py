from pydantic import BaseModel, Field, field_validator, model_validator


class ConnectionRequest(BaseModel):
    """
    Endpoint pairs to be joined by internally vertex-disjoint paths of exact lengths inside a workspace.

    Pairs may share endpoints across indices (a yᵢ may equal an xⱼ), and xᵢ = yᵢ asks for a closed
    path through xᵢ, which is how cycles are routed in one piece.

    Parameters
    ----------
    pairs: `list[tuple[int, int]]`
        Endpoint pairs (xᵢ, yᵢ)
    lengths: `list[int]`
        Required number of edges of every path
    workspace: `list[int]`
        Vertices the path interiors must be drawn from
    """

    pairs: list[tuple[int, int]] = []
    lengths: list[int] = []
    workspace: list[int] = []

    @field_validator("workspace")
    @classmethod
    def sorted_workspace(cls, value: list[int]) -> list[int]:
        if len(set(value)) != len(value):
            raise ValueError("Workspace vertices must be distinct.")
        return sorted(value)

    @model_validator(mode="after")
    def endpoint_discipline(self) -> "ConnectionRequest":
        """
        Validate the following:

        - One length per pair, each at least 1.
        - The xᵢ are distinct and the yᵢ are distinct.
        - The workspace avoids every endpoint.
        """
        if len(self.pairs) != len(self.lengths):
            raise ValueError(f"Got {len(self.pairs)} pairs but {len(self.lengths)} lengths.")
        if any(length < 1 for length in self.lengths):
            raise ValueError(f"Path lengths must be positive. Got {self.lengths}.")
        starts = [x for x, _ in self.pairs]
        ends = [y for _, y in self.pairs]
        if len(set(starts)) != len(starts) or len(set(ends)) != len(ends):
            raise ValueError("Start vertices and end vertices must each be distinct.")
        clash = set(self.workspace) & (set(starts) | set(ends))
        if clash:
            raise ValueError(f"Workspace contains endpoints {sorted(clash)}.")
        for (x, y), length in zip(self.pairs, self.lengths):
            if x == y and length < 3:
                raise ValueError(f"A closed path through {x} needs length at least 3.")
        return self

    def __len__(self):
        return len(self.pairs)

    def __str__(self):
        return f"ConnectionRequest(t={len(self.pairs)}, total={self.total_length}, |W|={len(self.workspace)})"

    __repr__ = __str__

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    @property
    def endpoints(self) -> set[int]:
        return {v for pair in self.pairs for v in pair}


class PathBundle(BaseModel):
    """
    One vertex sequence per request index, from xᵢ to yᵢ.
    """

    paths: list[list[int]] = []

    def __len__(self):
        return len(self.paths)

    def __str__(self):
        return f"PathBundle(paths={len(self.paths)}, interior={len(self.interior())})"

    __repr__ = __str__

    def interior(self) -> list[int]:
        return [v for path in self.paths for v in path[1:-1]]


class LayeredReachability(BaseModel):
    """
    Trace of one layered search.

    Level 0 holds the sources. Every vertex of level i > 0 records one parent in level i-1 and the
    request index of the source its parent chain ends at.

    Parameters
    ----------
    parents: `list[dict[int, int]]`
        Per level, frontier vertex to parent (sources map to themselves)
    origins: `list[dict[int, int]]`
        Per level, frontier vertex to request index
    survivors: `list[list[int]]`
        Per level, the request indices still alive after shrinking
    """

    parents: list[dict[int, int]] = []
    origins: list[dict[int, int]] = []
    survivors: list[list[int]] = []

    @model_validator(mode="after")
    def aligned_levels(self) -> "LayeredReachability":
        if not len(self.parents) == len(self.origins) == len(self.survivors):
            raise ValueError("Parents, origins and survivors must have one entry per level.")
        return self

    @property
    def depth(self) -> int:
        return len(self.parents) - 1

    def terminal(self, index: int) -> list[int]:
        """
        Deepest-level vertices whose chain ends at the source of `index`.
        """
        return sorted(v for v, origin in self.origins[-1].items() if origin == index)

    def trace(self, vertex: int) -> list[int]:
        """
        Walk parents from a deepest-level vertex down to its source.

        Returns
        -------
        `list[int]`
            Vertices from `vertex` to the source, one per level
        """
        chain = [vertex]
        for level in range(self.depth, 0, -1):
            chain.append(self.parents[level][chain[-1]])
        return chain
