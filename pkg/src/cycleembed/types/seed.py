import numpy as np
from pydantic import Field
from pydantic.dataclasses import dataclass


@dataclass(frozen=True, kw_only=True, slots=True)
class RandomSeed:
    """
    Master seed plus a stream label. Identical pairs reproduce identical random streams.
    """

    seed: int = Field(ge=0, lt=2**64)
    label: str = "host"

    def rng(self) -> np.random.Generator:
        """
        Build the numpy generator of this stream.

        The label is folded into the seed sequence's spawn key, so streams with distinct
        labels are independent while sharing one master seed.
        """
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=tuple(self.label.encode()))
        )

    def child(self, label: str) -> "RandomSeed":
        return RandomSeed(seed=self.seed, label=f"{self.label}/{label}")
