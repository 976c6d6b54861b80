import math
try:
    from typing import override
except ImportError:  # Python < 3.12
    from typing_extensions import override

from pydantic import BaseModel, Field, model_validator

from ..constant import (
    EXACT_CAP,
    ORACLE_CAP,
    SAMPLED_TRIALS,
    SPLIT_RETRIES,
    TEMPLATE_MAX_DEGREE,
    ProfileName,
)


def integer_root(value: int, degree: int) -> int:
    """
    Largest integer r with r ** degree <= value. Exact for arbitrarily large integers.
    """
    if value < 0:
        raise ValueError(f"Root of a negative number is undefined. Got {value}.")
    if value < 2:
        return value
    guess = 1 << -(-value.bit_length() // degree)
    while True:
        better = ((degree - 1) * guess + value // guess ** (degree - 1)) // degree
        if better >= guess:
            break
        guess = better
    while guess**degree > value:
        guess -= 1
    while (guess + 1) ** degree <= value:
        guess += 1
    return guess


class ConstantsProfile(BaseModel):
    """
    Every constant the algorithms depend on, with the identities of the source construction.

    The theoretical profile carries the literal constants (ε = 1/3ℓ, k = 12/ε, K = 2^(2^(1/ε)));
    at those values every desk-scale spec is bounded by K. The practical profile keeps the same
    derived identities at tunable, small values.

    Parameters
    ----------
    name: `cycleembed.ProfileName`
        Which family of defaults the profile was built from
    ell: `int`
        Girth parameter of the cycle family, at least 3
    k: `int`
        Expansion fan-out divisor, at least 3
    K: `int`
        Long-cycle cutoff, at least k²
    short_cutoff: `int`, optional
        Length up to which a cycle is short in the first-family phase. Defaults to ⌊K^(1/3)⌋
    segment_length: `int`
        Base segment length for first-family long cycles (parts in {L, L+1})
    h2_segment: `int`
        Upper end of the second-family segment band (parts in {h-1, h})
    min_path_length: `int`
        Shortest admissible connector request
    max_path_length: `int`, optional
        Longest admissible connector request. Defaults to 2K
    spanning_segment: `int`
        Segment length σ used by the saturation stage of spanning routing
    spanning_leftover: `int`
        Number of pairs the saturation stage leaves for the absorbers
    absorber_k: `int`
        Gadget parameter of absorbers (18k²+2 vertices each)
    template_degree: `int`, optional
        Degree of sampled flexible templates. `None` selects the block template
    frontier_size: `int`, optional
        Frontier size m of layered searches. Defaults to n^(1-ε/3), at least 4
    shrink_ratio: `int`, optional
        Source shrink ratio of layered searches. Defaults to n^(ε/4), at least 2
    star_size: `int`, optional
        Star size of re-anchoring matchings. Defaults to n^(ε/6), at least 1
    reserve_rounds: `int`, optional
        Number of reserve pool pairs of the connector. Defaults to k
    """

    name: ProfileName = ProfileName.PRACTICAL
    ell: int = Field(default=3, ge=3)
    k: int = Field(default=3, ge=3)
    K: int = Field(default=729, ge=9)
    short_cutoff: int | None = Field(default=None, ge=1)
    segment_length: int = Field(default=3, ge=2)
    h2_segment: int = Field(default=3, ge=2)
    min_path_length: int = Field(default=1, ge=1)
    max_path_length: int | None = Field(default=None, ge=1)
    spanning_segment: int = Field(default=6, ge=6)
    spanning_leftover: int = Field(default=1, ge=1)
    absorber_k: int = Field(default=1, ge=1)
    template_degree: int | None = Field(default=None, ge=1, le=TEMPLATE_MAX_DEGREE)
    frontier_size: int | None = Field(default=8, ge=1)
    shrink_ratio: int | None = Field(default=2, ge=2)
    star_size: int | None = Field(default=2, ge=1)
    reserve_rounds: int | None = Field(default=None, ge=1)
    exact_cap: int = Field(default=EXACT_CAP, ge=1)
    sampled_trials: int = Field(default=SAMPLED_TRIALS, ge=1)
    split_retries: int = Field(default=SPLIT_RETRIES, ge=1)
    search_budget: int = Field(default=200_000, ge=1)
    factor_restarts: int = Field(default=8, ge=1)
    oracle_cap: int = Field(default=ORACLE_CAP, ge=1)
    retries: int = Field(default=2, ge=0)

    @model_validator(mode="after")
    def derived_identities(self) -> "ConstantsProfile":
        """
        Validate the following:

        - K is at least k².
        - The connector band is non-empty.
        """
        if self.K < self.k**2:
            raise ValueError(f"K must be at least k² = {self.k ** 2}. Got {self.K}.")
        if self.max_path_length is not None and self.max_path_length < self.min_path_length:
            raise ValueError(
                f"Empty connector band [{self.min_path_length}, {self.max_path_length}]."
            )
        return self

    @override
    def model_post_init(self, *args) -> None:
        """
        Fill size-independent defaults that are derived from other fields.
        """
        if self.short_cutoff is None:
            self.short_cutoff = integer_root(self.K, 3)
        if self.max_path_length is None:
            self.max_path_length = 2 * self.K
        if self.reserve_rounds is None:
            self.reserve_rounds = self.k

    def __str__(self):
        return f"ConstantsProfile(name={self.name.value}, ell={self.ell}, k={self.k})"

    __repr__ = __str__

    @property
    def epsilon(self) -> float:
        return 1 / (3 * self.ell)

    def frontier(self, n: int) -> int:
        if self.frontier_size is not None:
            return self.frontier_size
        return max(4, math.floor(n ** (1 - self.epsilon / 3)))

    def ratio(self, n: int) -> int:
        if self.shrink_ratio is not None:
            return self.shrink_ratio
        return max(2, math.floor(n ** (self.epsilon / 4)))

    def stars(self, n: int) -> int:
        if self.star_size is not None:
            return self.star_size
        return max(1, math.floor(n ** (self.epsilon / 6)))

    def expansion_degree(self, n: int) -> float:
        """
        The n^ε expansion the workspaces of the connecting routines are expected to have.
        """
        return max(1.0, n**self.epsilon)

    def in_band(self, length: int) -> bool:
        return self.min_path_length <= length <= self.max_path_length

    @classmethod
    def theoretical(cls, ell: int = 3) -> "ConstantsProfile":
        """
        The literal constants of the construction for girth parameter `ell`.

        Parameters
        ----------
        ell: `int`, optional
            Girth parameter, at least 3

        Returns
        -------
        `cycleembed.ConstantsProfile`
            Profile with k = 36ℓ, K = 2^(2^(3ℓ)) and the matching segment bands
        """
        k = 36 * ell
        K = 2 ** (2 ** (3 * ell))
        return cls(
            name=ProfileName.THEORETICAL,
            ell=ell,
            k=k,
            K=K,
            segment_length=1000 * k**2,
            h2_segment=100 * k,
            min_path_length=5 * k,
            spanning_segment=10 * k + 2,
            absorber_k=k,
            template_degree=TEMPLATE_MAX_DEGREE // 2,
            frontier_size=None,
            shrink_ratio=None,
            star_size=None,
        )

    @classmethod
    def practical(cls, **overrides) -> "ConstantsProfile":
        """
        Desk-scale defaults. Any field can be overridden by keyword.
        """
        return cls(name=ProfileName.PRACTICAL, **overrides)

    @classmethod
    def from_name(cls, name: str | ProfileName, ell: int = 3) -> "ConstantsProfile":
        match ProfileName(name):
            case ProfileName.THEORETICAL:
                return cls.theoretical(ell)
            case ProfileName.PRACTICAL:
                return cls.practical(ell=ell)
