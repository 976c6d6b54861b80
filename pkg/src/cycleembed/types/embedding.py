from pydantic import BaseModel, Field, model_validator

from ..constant import Layer, Phase
from .spec import CycleSpec


class Embedding(BaseModel):
    """
    Injective map from the canonically numbered target vertices into a host.

    Parameters
    ----------
    spec: `cycleembed.CycleSpec`
        Target graph
    assignment: `list[int]`
        Host vertex of every target vertex
    edge_provenance: `list[cycleembed.Layer]`
        Layer of every target edge, in `spec.target_edges()` order
    phase: `cycleembed.Phase`
        Pipeline branch that produced the embedding (not serialized)
    retries: `int`
        Failed attempts before this one (not serialized)
    """

    spec: CycleSpec
    assignment: list[int]
    edge_provenance: list[Layer] = []
    phase: Phase = Field(default=Phase.BOUNDED, exclude=True)
    retries: int = Field(default=0, ge=0, exclude=True)

    @model_validator(mode="after")
    def injective(self) -> "Embedding":
        if len(self.assignment) != self.spec.n:
            raise ValueError(
                f"Assignment covers {len(self.assignment)} vertices, spec has {self.spec.n}."
            )
        if len(set(self.assignment)) != len(self.assignment):
            raise ValueError("Assignment is not injective.")
        return self

    def __str__(self):
        return f"Embedding(spec={self.spec.spec_id}, phase={self.phase.value})"

    __repr__ = __str__

    def images(self) -> list[list[int]]:
        """
        Host vertex sequence of every component in canonical order.
        """
        return [
            self.assignment[offset : offset + length]
            for offset, length in zip(self.spec.offsets(), self.spec.cycles)
        ]

    def host_edges(self) -> list[tuple[int, int]]:
        return [(self.assignment[a], self.assignment[b]) for a, b in self.spec.target_edges()]


class EmbeddingVerdict(BaseModel):
    valid: bool
    violation: str | None = None

    def __bool__(self):
        return self.valid


class LongCycleReduction(BaseModel):
    """
    Replacement of every long cycle Cᵢ by γᵢ cycles of length u and βᵢ isolated vertices.

    Parameters
    ----------
    u: `int`
        Replacement cycle length
    long_cycles: `list[int]`
        Lengths |Cᵢ| of the replaced cycles, ascending
    gammas: `list[int]`
        Quotients γᵢ = |Cᵢ| // u
    betas: `list[int]`
        Remainders βᵢ = |Cᵢ| mod u
    reduced: `cycleembed.CycleSpec`
        The reduced spec H′
    """

    u: int = Field(ge=1)
    long_cycles: list[int]
    gammas: list[int]
    betas: list[int]
    reduced: CycleSpec

    @model_validator(mode="after")
    def division_identity(self) -> "LongCycleReduction":
        for length, gamma, beta in zip(self.long_cycles, self.gammas, self.betas, strict=True):
            if length != gamma * self.u + beta or not 0 <= beta < self.u:
                raise ValueError(f"Length {length} is not {gamma}·{self.u} + {beta}.")
        return self

    def __str__(self):
        return f"LongCycleReduction(u={self.u}, long={len(self.long_cycles)})"

    __repr__ = __str__
