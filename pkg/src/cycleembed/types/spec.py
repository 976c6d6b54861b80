from collections import Counter

from pydantic import BaseModel, Field, field_validator


class CycleSpec(BaseModel):
    """
    A target graph of maximum degree two, stored as the multiset of its component sizes.

    Length 1 is an isolated vertex, length 2 an isolated edge, anything longer a cycle.
    The multiset is kept in ascending order; target vertices are numbered consecutively
    along each component in that order.

    Parameters
    ----------
    n: `int`
        Total number of vertices
    cycles: `list[int]`
        Component sizes
    """

    n: int = Field(ge=0)
    cycles: list[int] = []

    @field_validator("cycles")
    @classmethod
    def canonical_order(cls, value: list[int]) -> list[int]:
        if any(length < 1 for length in value):
            raise ValueError(f"Component sizes must be positive. Got {value}.")
        return sorted(value)

    def __str__(self):
        return f"CycleSpec(n={self.n}, id={self.spec_id})"

    __repr__ = __str__

    def __hash__(self):
        return hash((self.n, tuple(self.cycles)))

    @property
    def spec_id(self) -> str:
        """
        Compact identifier such as `1x2+3x4` (two isolated vertices and four triangles).
        """
        if not self.cycles:
            return "empty"
        return "+".join(f"{size}x{count}" for size, count in sorted(self.counts.items()))

    @property
    def counts(self) -> Counter:
        return Counter(self.cycles)

    def count(self, size: int) -> int:
        return self.cycles.count(size)

    def offsets(self) -> list[int]:
        """
        First target vertex of every component in canonical order.
        """
        offsets, position = [], 0
        for length in self.cycles:
            offsets.append(position)
            position += length
        return offsets

    def target_edges(self) -> list[tuple[int, int]]:
        """
        Edges of the target graph under the canonical vertex numbering.
        """
        edges = []
        for offset, length in zip(self.offsets(), self.cycles):
            if length == 1:
                continue
            if length == 2:
                edges.append((offset, offset + 1))
                continue
            for i in range(length):
                edges.append((offset + i, offset + (i + 1) % length))
        return edges

    @classmethod
    def from_lengths(cls, lengths: list[int]) -> "CycleSpec":
        return cls(n=sum(lengths), cycles=list(lengths))
