from pathlib import Path

from pydantic import BaseModel, Field, model_validator

from ..constant import RunMode, SpecPolicy
from .embedding import Embedding
from .profile import ConstantsProfile
from .spec import CycleSpec


class SweepConfig(BaseModel):
    """
    Universality sweep description, usually loaded from JSON with `model_validate_json`.

    Parameters
    ----------
    n: `list[int]`
        Host sizes
    ell: `int`, optional
        Girth parameter of the target family
    p: `list[float]`, optional
        Edge probabilities. May be empty when `bounds` is set
    bounds: `tuple[float, float]`, optional
        Bracket for threshold bisection
    trials: `int`, optional
        Hosts sampled per (n, p)
    policy: `cycleembed.SpecPolicy`, optional
        How target specs are chosen
    spec_count: `int`, optional
        Number of specs drawn per host size under the random policy
    mode: `cycleembed.RunMode`, optional
        Decide embeddability with the pipeline or with the brute-force oracle
    profile: `cycleembed.ConstantsProfile`, optional
        Constants of the pipeline
    seed: `int`, optional
        Master seed. Host seeds derive from it and are shared across p
    out: `str`, optional
        CSV output path; the JSON summary is written next to it
    record_timing: `bool`, optional
        Record wall time in the `ms` column. When disabled the column is 0 and reruns are byte-identical
    resolution: `float`, optional
        Bracket width at which threshold bisection stops
    """

    n: list[int] = Field(min_length=1)
    ell: int = Field(default=3, ge=3)
    p: list[float] = []
    bounds: tuple[float, float] | None = None
    trials: int = Field(default=10, ge=1)
    policy: SpecPolicy = SpecPolicy.RANDOM
    spec_count: int = Field(default=5, ge=1)
    mode: RunMode = RunMode.PIPELINE
    profile: ConstantsProfile = Field(default_factory=ConstantsProfile.practical)
    seed: int = Field(default=0, ge=0, lt=2**64)
    out: str | None = None
    record_timing: bool = True
    resolution: float = Field(default=0.01, gt=0, lt=1)

    @model_validator(mode="after")
    def grids(self) -> "SweepConfig":
        if any(n < 1 for n in self.n):
            raise ValueError(f"Host sizes must be positive. Got {self.n}.")
        if any(not 0 <= p <= 1 for p in self.p):
            raise ValueError(f"Probabilities must lie in [0, 1]. Got {self.p}.")
        if not self.p and self.bounds is None:
            raise ValueError("Either a probability grid or bisection bounds must be given.")
        if self.bounds is not None and not 0 <= self.bounds[0] < self.bounds[1] <= 1:
            raise ValueError(f"Bounds must satisfy 0 <= lo < hi <= 1. Got {self.bounds}.")
        return self

    def summary_path(self) -> Path | None:
        return Path(self.out).with_suffix(".json") if self.out else None


class SweepRecord(BaseModel):
    """
    One attempt: a spec on one host.
    """

    n: int
    p: float
    spec_id: str
    seed: int
    phase: str
    success: bool
    retries: int = 0
    ms: int = 0

    def row(self) -> list[str]:
        return [
            str(self.n),
            repr(self.p),
            self.spec_id,
            str(self.seed),
            self.phase,
            str(int(self.success)),
            str(self.retries),
            str(self.ms),
        ]


class SweepSummary(BaseModel):
    """
    Aggregate of the records of one (n, p, mode) point.

    Parameters
    ----------
    attempts: `int`
        Records at this point
    successes: `int`
        Successful records
    hosts: `int`
        Distinct host seeds
    universal_hosts: `int`
        Hosts on which every attempted spec succeeded
    """

    n: int
    p: float
    mode: RunMode
    attempts: int = 0
    successes: int = 0
    hosts: int = 0
    universal_hosts: int = 0

    @property
    def rate(self) -> float:
        return self.successes / self.attempts if self.attempts else 0.0

    @property
    def universal_rate(self) -> float:
        return self.universal_hosts / self.hosts if self.hosts else 0.0


class ThresholdEstimate(BaseModel):
    """
    Bisection result for the edge probability at which the universal-host rate crosses a target.

    `ci` is the Clopper-Pearson interval of the rate measured at the upper end of the final bracket.
    """

    n: int
    ell: int
    target_rate: float
    mode: RunMode
    p_star: float
    lo: float
    hi: float
    rate_lo: float
    rate_hi: float
    ci: tuple[float, float]
    trials: int


class ExponentFit(BaseModel):
    """
    Least-squares fit of log p* against log n.
    """

    slope: float
    intercept: float
    stderr: float
    ci: tuple[float, float]
    theoretical: float
    points: int


class OracleResult(BaseModel):
    """
    Verdict of the brute-force search. A witness is present exactly when the spec embeds.
    """

    embeddable: bool
    witness: Embedding | None = None
    nodes_explored: int = 0

    @model_validator(mode="after")
    def witness_matches(self) -> "OracleResult":
        if self.embeddable != (self.witness is not None):
            raise ValueError("An embeddable verdict needs a witness, a negative one must not carry one.")
        return self


class UniversalityVerdict(BaseModel):
    universal: bool
    failing: CycleSpec | None = None
    checked: int = 0
    nodes_explored: int = 0
