from itertools import combinations
from pathlib import Path

from loguru import logger

from .constant import (
    EXHAUSTIVE_TEMPLATE_LIMIT,
    TEMPLATE_MAX_DEGREE,
    TEMPLATE_RETRIES,
    VerificationMode,
)
from .exceptions import HallViolationError, TemplateError
from .expansion import star_matching
from .graph import HostGraph
from .types import FlexibleBipartiteTemplate, RandomSeed


_cache: dict[tuple[int, int, int | None], FlexibleBipartiteTemplate] = {}


def clear_template_cache() -> None:
    _cache.clear()


def template_graph(template: FlexibleBipartiteTemplate) -> HostGraph:
    return HostGraph(template.order, template.edges())


def block_template(n0: int) -> FlexibleBipartiteTemplate:
    """
    Deterministic template built from n₀/3 blocks of three X vertices.

    Block g owns y₂g and y₂g₊₁ (one edge each to its first two rows, both to the third) and the
    window z_g..z_{g+n₀/3} of Z, split between its rows. Every proper part of a block sees enough
    of Y, and b whole blocks see n₀/3 + b vertices of Z, so Hall's condition holds for every Z′.
    Rows have degree about n₀/9 + 2; a vertex of Z lies in at most n₀/3 windows.
    """
    q = n0 // 3
    base, extra = divmod(q + 1, 3)
    chunks = [base + (row < extra) for row in range(3)]
    adjacency = []
    for g in range(q):
        ya, yb = n0 + 2 * g, n0 + 2 * g + 1
        window = n0 + 2 * q + g
        rows = [[ya], [yb], [ya, yb]]
        for row, size in zip(rows, chunks):
            row.extend(range(window, window + size))
            window += size
        adjacency.extend(rows)
    return FlexibleBipartiteTemplate(n0=n0, adjacency=adjacency)


def _sample(n0: int, degree: int, rng) -> FlexibleBipartiteTemplate:
    low, high = n0, n0 + 4 * n0 // 3
    load = dict.fromkeys(range(low, high), 0)
    adjacency = []
    for _ in range(n0):
        open_vertices = [w for w, used in load.items() if used < TEMPLATE_MAX_DEGREE]
        picks = rng.choice(open_vertices, size=min(degree, len(open_vertices)), replace=False)
        row = sorted(int(w) for w in picks)
        for w in row:
            load[w] += 1
        adjacency.append(row)
    return FlexibleBipartiteTemplate(n0=n0, adjacency=adjacency)


def verify_template(
    template: FlexibleBipartiteTemplate, trials: int = 100, seed: RandomSeed | None = None
) -> VerificationMode:
    """
    Check the robust matching property of a template.

    Every Z′ ⊆ Z of size n₀/3 is tried when n₀ ≤ 12, otherwise `trials` random ones. For each,
    X must have a perfect matching into Y ∪ Z′.

    Returns
    -------
    `cycleembed.VerificationMode`
        `EXACT` when every Z′ was checked, `SAMPLED` otherwise

    Raises
    ------
    `cycleembed.exceptions.TemplateError`
        With the failing Z′ and the set of X vertices violating Hall's condition
    """
    graph = template_graph(template)
    size = template.n0 // 3
    if template.n0 <= EXHAUSTIVE_TEMPLATE_LIMIT:
        subsets = combinations(template.Z, size)
        mode = VerificationMode.EXACT
    else:
        rng = (seed or RandomSeed(seed=template.seed, label="template")).rng()
        subsets = (
            tuple(int(z) for z in rng.choice(list(template.Z), size=size, replace=False))
            for _ in range(trials)
        )
        mode = VerificationMode.SAMPLED

    for subset in subsets:
        try:
            star_matching(graph, template.X, list(template.Y) + list(subset), 1)
        except HallViolationError as error:
            raise TemplateError(
                f"No perfect matching from X into Y ∪ {sorted(subset)}.",
                sorted(subset),
                error.deficient,
            )
    return mode


def build_flexible_template(
    n0: int,
    seed: RandomSeed | int = 0,
    verification_trials: int = 100,
    degree: int | None = None,
    retries: int = TEMPLATE_RETRIES,
) -> FlexibleBipartiteTemplate:
    """
    Build a certified flexible bipartite template on X (n₀ vertices) and Y ∪ Z (2n₀/3 each).

    Parameters
    ----------
    n0: `int`
        Size of X, a positive multiple of 3
    seed: `cycleembed.RandomSeed | int`, optional
        Sampling stream; templates are cached by (n₀, seed, degree)
    verification_trials: `int`, optional
        Sampled Z′ per candidate when n₀ > 12
    degree: `int`, optional
        Neighbours drawn per vertex of X. `None` selects the block template, or sampling with
        degree 20 once the block would exceed degree 40 (n₀ > 120)
    retries: `int`, optional
        Candidates sampled before giving up

    Returns
    -------
    `cycleembed.FlexibleBipartiteTemplate`
        A template with maximum degree at most 40 that passed verification

    Raises
    ------
    `cycleembed.exceptions.TemplateError`
        If no sampled candidate passed within `retries`
    """
    if n0 < 3 or n0 % 3:
        raise ValueError(f"n0 must be a positive multiple of 3. Got {n0}.")
    seed = seed if isinstance(seed, RandomSeed) else RandomSeed(seed=seed, label="template")
    key = (n0, seed.seed, degree)
    if key in _cache:
        return _cache[key]

    template = None
    if degree is None:
        block = block_template(n0)
        if block.max_degree <= TEMPLATE_MAX_DEGREE:
            template = block
            template.mode = verify_template(template, verification_trials)
        else:
            logger.debug(f"Block template on n0 = {n0} exceeds degree {TEMPLATE_MAX_DEGREE}, sampling.")
            degree = TEMPLATE_MAX_DEGREE // 2
    if template is None:
        rng = seed.rng()
        failure = None
        for attempt in range(retries):
            candidate = _sample(n0, degree, rng)
            candidate.seed = seed.seed
            try:
                candidate.mode = verify_template(candidate, verification_trials, seed.child(str(attempt)))
            except TemplateError as error:
                failure = error
                continue
            template = candidate
            logger.debug(f"Template on n0 = {n0} certified after {attempt + 1} samples.")
            break
        else:
            raise TemplateError(
                f"No template on n0 = {n0} with degree {degree} certified after {retries} samples.",
                failure.subset,
                failure.witness,
            )

    _cache[key] = template
    return template


def save_template(template: FlexibleBipartiteTemplate, path: str | Path) -> None:
    Path(path).write_text(template.model_dump_json())


def load_template(path: str | Path) -> FlexibleBipartiteTemplate:
    return FlexibleBipartiteTemplate.model_validate_json(Path(path).read_text())
