from pydantic import BaseModel, Field, model_validator

from ..constant import VerificationMode


class ExpansionVerdict(BaseModel):
    """
    Outcome of an expansion check.

    Parameters
    ----------
    holds: `bool`
        Whether no violation was found
    mode: `cycleembed.VerificationMode`
        `EXACT` decides the property, `SAMPLED` only tests random subsets
    trials: `int`, optional
        Number of random subsets tried by a sampled check
    witness: `list[int]`, optional
        A set X whose neighbourhood is too small
    witness_pair: `tuple[list[int], list[int]]`, optional
        Two disjoint sets without an edge between them
    """

    holds: bool
    mode: VerificationMode
    trials: int | None = Field(default=None, ge=1)
    witness: list[int] | None = None
    witness_pair: tuple[list[int], list[int]] | None = None

    @model_validator(mode="after")
    def witness_present(self) -> "ExpansionVerdict":
        if not self.holds and self.witness is None and self.witness_pair is None:
            raise ValueError("A failing verdict must carry a witness.")
        if self.holds and (self.witness is not None or self.witness_pair is not None):
            raise ValueError("A passing verdict cannot carry a witness.")
        return self

    def __bool__(self):
        return self.holds

    def __str__(self):
        state = "holds" if self.holds else "fails"
        return f"ExpansionVerdict({state}, mode={self.mode.value}, certified={self.certified})"

    __repr__ = __str__

    @property
    def certified(self) -> bool:
        """
        Sampled passes are never certificates; failures always are, since they carry a witness.
        """
        return self.mode is VerificationMode.EXACT or not self.holds


class StarMatching(BaseModel):
    """
    Vertex-disjoint stars: every centre is joined to its own set of leaves.

    Parameters
    ----------
    stars: `dict[int, list[int]]`
        Leaves of every centre, sorted
    c: `int`, optional
        Common star size. `None` for matchings with per-centre demands
    """

    stars: dict[int, list[int]]
    c: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def disjoint_leaves(self) -> "StarMatching":
        seen = set()
        for centre, leaves in self.stars.items():
            if self.c is not None and len(leaves) != self.c:
                raise ValueError(f"Centre {centre} has {len(leaves)} leaves, expected {self.c}.")
            if seen & set(leaves):
                raise ValueError(f"Leaves of centre {centre} are shared with another star.")
            seen |= set(leaves)
        return self

    def __str__(self):
        return f"StarMatching(centres={len(self.stars)}, leaves={len(self.leaves)})"

    __repr__ = __str__

    @property
    def leaves(self) -> list[int]:
        return sorted(leaf for leaves in self.stars.values() for leaf in leaves)

    def owner(self) -> dict[int, int]:
        """
        Centre of every leaf.
        """
        return {leaf: centre for centre, leaves in self.stars.items() for leaf in leaves}
