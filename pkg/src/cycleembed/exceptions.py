class GraphFormatError(Exception):
    """
    Exception for malformed edge-list files. `line` is the 1-based line number at fault.
    """

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SpecError(Exception):
    """
    Exception for cycle specs that do not belong to the requested family.
    """

    def __init__(self, message: str, length: int | None = None):
        super().__init__(message)
        self.length = length


class RepresentationError(SpecError):
    """
    Exception for integers with no admissible representation as a sum of parts k and k+1.
    """

    pass


class ExpansionError(Exception):
    """
    Base exception for expansion checks, partitions and star matchings.
    """

    pass


class BudgetExceededError(ExpansionError):
    """
    Exception for exact expansion checks whose subset enumeration would exceed the configured cap.
    Use sampled mode instead.
    """

    def __init__(self, message: str, budget: int, cap: int):
        super().__init__(message)
        self.budget = budget
        self.cap = cap


class PartitionError(ExpansionError):
    """
    Exception for workspace partitions that could not be certified within the retry budget.
    """

    def __init__(self, message: str, diagnostics: list[dict]):
        super().__init__(message)
        self.diagnostics = diagnostics


class HallViolationError(ExpansionError):
    """
    Exception for star matchings blocked by a set of centres with too few neighbours.
    """

    def __init__(self, message: str, deficient: set[int]):
        super().__init__(message)
        self.deficient = deficient


class ConnectorError(Exception):
    """
    Base exception for vertex-disjoint path routing.
    """

    pass


class CapacityError(ConnectorError):
    """
    Exception for connection requests that violate a counting precondition of the workspace.
    """

    pass


class FrontierStarvationError(ConnectorError):
    """
    Exception for layered searches whose frontier became empty before reaching the required depth.
    """

    def __init__(self, message: str, level: int, sizes: list[int]):
        super().__init__(message)
        self.level = level
        self.sizes = sizes


class BridgeError(ConnectorError):
    """
    Exception for forward and backward searches that met no common index joined by an edge.
    """

    def __init__(self, message: str, forward: set[int], backward: set[int]):
        super().__init__(message)
        self.forward = forward
        self.backward = backward


class ConnectionFailure(ConnectorError):
    """
    Exception for requests that still have unconnected pairs after every reserve round.
    """

    def __init__(self, message: str, round: int, residual: list[tuple[int, int]]):
        super().__init__(message)
        self.round = round
        self.residual = residual


class AbsorberError(Exception):
    """
    Base exception for absorbers, templates and robust sets.
    """

    pass


class TemplateError(AbsorberError):
    """
    Exception for flexible templates that failed certification within the sampling budget.
    """

    def __init__(self, message: str, subset: list[int], witness: set[int]):
        super().__init__(message)
        self.subset = subset
        self.witness = witness


class RobustSetError(AbsorberError):
    """
    Exception for robust-set construction or queries that cannot be completed.
    """

    pass


class EmbeddingError(Exception):
    """
    Base exception for the embedding pipeline. `phase` names the stage that failed.
    """

    def __init__(self, message: str, phase: str = "unknown"):
        super().__init__(message)
        self.phase = phase


class FactorError(EmbeddingError):
    """
    Exception for cycle packings and factors that were not found within the search budget.
    """

    pass


class SegmentationError(EmbeddingError):
    """
    Exception for long cycles that cannot be cut into segments of the configured lengths.
    """

    pass


class AuxiliaryError(EmbeddingError):
    """
    Exception for phase-one copies that lack the cycles or isolated vertices the reduction demands.
    """

    pass


class SearchBudgetError(EmbeddingError):
    """
    Exception for exhaustive routing searches that ran out of nodes.
    """

    pass


class OracleCapError(Exception):
    """
    Exception for brute-force requests above the configured vertex cap.
    """

    pass


class ThresholdError(Exception):
    """
    Exception for threshold searches whose bounds do not bracket the target rate.
    """

    pass
