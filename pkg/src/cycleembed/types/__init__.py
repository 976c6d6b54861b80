from .seed import RandomSeed  # noqa: F401
from .spec import CycleSpec  # noqa: F401
from .profile import ConstantsProfile  # noqa: F401
from .expansion import ExpansionVerdict, StarMatching  # noqa: F401
from .routing import ConnectionRequest, PathBundle, LayeredReachability  # noqa: F401
from .absorber import Absorber, FlexibleBipartiteTemplate, RobustSet  # noqa: F401
from .embedding import Embedding, EmbeddingVerdict, LongCycleReduction  # noqa: F401
from .lab import (  # noqa: F401
    SweepConfig,
    SweepRecord,
    SweepSummary,
    ThresholdEstimate,
    ExponentFit,
    OracleResult,
    UniversalityVerdict,
)
