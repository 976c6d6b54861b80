from enum import Enum


EXACT_CAP = 2**20
SAMPLED_TRIALS = 1000
SPLIT_RETRIES = 16
ORACLE_CAP = 14
ABSORBERS_PER_VERTEX = 40
TEMPLATE_MAX_DEGREE = 40
TEMPLATE_RETRIES = 64
EXHAUSTIVE_TEMPLATE_LIMIT = 12
WORKERS_ENV = "CYCLEEMBED_WORKERS"
CSV_COLUMNS = ("n", "p", "spec_id", "seed", "phase", "success", "retries", "ms")


class Direction(Enum):
    OUT = "out"
    IN = "in"
    UNDIRECTED = "undirected"


class VerificationMode(Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


class Family(Enum):
    H1 = "H1"
    H2 = "H2"


class Phase(Enum):
    VALIDATE = "validate"
    BOUNDED = "bounded"
    H1 = "h1"
    H2 = "h2"
    ORACLE = "oracle"


class Layer(Enum):
    G1 = "G1"
    G2 = "G2"
    G4 = "G4"
    G5 = "G5"


class ProfileName(Enum):
    THEORETICAL = "theoretical"
    PRACTICAL = "practical"


class SpecPolicy(Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"
    ADVERSARIAL = "adversarial"


class RunMode(Enum):
    PIPELINE = "pipeline"
    ORACLE = "oracle"
