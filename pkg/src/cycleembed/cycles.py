from collections import Counter
from typing import Generator

from loguru import logger

from .constant import Family
from .exceptions import RepresentationError, SpecError
from .types import ConstantsProfile, CycleSpec, LongCycleReduction


def validate_spec(spec: CycleSpec, ell: int) -> CycleSpec:
    """
    Check that a spec belongs to the family of graphs on n vertices with maximum degree two whose
    cycles have length at most 2 or at least `ell`.

    Parameters
    ----------
    spec: `cycleembed.CycleSpec`
        Spec to check
    ell: `int`
        Girth parameter

    Returns
    -------
    `cycleembed.CycleSpec`
        The same spec, for chaining

    Raises
    ------
    `cycleembed.exceptions.SpecError`
        If the lengths do not sum to n or a length falls strictly between 2 and `ell`
    """
    total = sum(spec.cycles)
    if total != spec.n:
        raise SpecError(f"Component sizes sum to {total}, expected n = {spec.n}.")
    for length in spec.cycles:
        if 2 < length < ell:
            raise SpecError(f"Cycle length {length} lies strictly between 2 and {ell}.", length)
    return spec


def admissible_lengths(n: int, ell: int, K: int) -> list[int]:
    return sorted({1, 2} | set(range(ell, K + 1))) if n else []


def enumerate_bounded_family(n: int, ell: int, K: int) -> Generator[CycleSpec, None, None]:
    """
    Yield every spec on n vertices whose component sizes lie in {1, 2} ∪ [ell, K].

    Specs come out once each, in lexicographic order of their ascending length lists, so the
    all-isolated spec is first and the next one holds a single edge.
    """
    if ell < 3:
        raise ValueError(f"Girth parameter must be at least 3. Got {ell}.")
    parts = [part for part in admissible_lengths(n, ell, K) if part <= n]

    def extend(remaining: int, smallest: int) -> Generator[list[int], None, None]:
        if remaining == 0:
            yield []
            return
        for part in parts:
            if part < smallest:
                continue
            if part > remaining:
                break
            for rest in extend(remaining - part, part):
                yield [part] + rest

    for lengths in extend(n, 1):
        yield CycleSpec(n=n, cycles=lengths)


def short_mass(spec: CycleSpec, profile: ConstantsProfile) -> int:
    return sum(length for length in spec.cycles if length <= profile.short_cutoff)


def classify(spec: CycleSpec, profile: ConstantsProfile) -> Family:
    """
    H1 when the components of size at most K^(1/3) hold at most a (1 - 1/K) share of the vertices.

    The comparison is done in integers, so the boundary case counts as H1.
    """
    mass = short_mass(spec, profile)
    if profile.K * mass <= (profile.K - 1) * spec.n:
        return Family.H1
    return Family.H2


def sum_representation(z: int, k: int) -> list[int]:
    """
    Write z as ⌊z/k⌋ parts from {k, k+1}.

    With z = mk + r the result is r parts of k+1 followed by m-r parts of k.

    Raises
    ------
    `cycleembed.exceptions.RepresentationError`
        If z < k²
    """
    if z < k * k:
        raise RepresentationError(f"{z} is below k² = {k * k}.", z)
    m, r = divmod(z, k)
    return [k + 1] * r + [k] * (m - r)


def balanced_sum_representation(z: int, k: int) -> list[int]:
    """
    Write z as parts from {k, k+1} with each value used by at least a third of the parts.

    Every split (a parts of k, b parts of k+1) is tried in order of increasing b; the first
    balanced one is returned in ascending order.

    Raises
    ------
    `cycleembed.exceptions.RepresentationError`
        If z < 3k²/2 or no split is balanced
    """
    if 2 * z < 3 * k * k:
        raise RepresentationError(f"{z} is below 3k²/2 for k = {k}.", z)
    for b in range(z // (k + 1) + 1):
        a, rest = divmod(z - b * (k + 1), k)
        if rest:
            continue
        third = -(-(a + b) // 3)
        if a >= third and b >= third:
            return [k] * a + [k + 1] * b
    raise RepresentationError(f"No balanced representation of {z} by {k} and {k + 1}.", z)


def segment_representation(z: int, k: int) -> list[int]:
    """
    Best available split of a cycle length into segment lengths from {k, k+1}.

    Tries the balanced split, then the plain one, then any split at all.
    """
    for method in (balanced_sum_representation, sum_representation):
        try:
            return method(z, k)
        except RepresentationError:
            pass
    for b in range(z // (k + 1) + 1):
        a, rest = divmod(z - b * (k + 1), k)
        if not rest:
            logger.debug(f"Length {z} split into {a}×{k} + {b}×{k + 1} outside the proven range.")
            return [k] * a + [k + 1] * b
    raise RepresentationError(f"{z} is not a sum of parts {k} and {k + 1}.", z)


def reduce_long_cycles(spec: CycleSpec, profile: ConstantsProfile) -> LongCycleReduction:
    """
    Replace every cycle longer than K by cycles of one short length u plus isolated vertices.

    u is the smallest size s ≤ K^(1/3) with s·X_s ≥ n / 2K^(1/3).

    Parameters
    ----------
    spec: `cycleembed.CycleSpec`
        Spec of the second family
    profile: `cycleembed.ConstantsProfile`
        Supplies K and the short cutoff

    Returns
    -------
    `cycleembed.LongCycleReduction`
        u, the per-cycle quotients and remainders, and the reduced spec

    Raises
    ------
    `cycleembed.exceptions.SpecError`
        If no short size carries enough mass, which cannot happen for second-family specs
    """
    counts = Counter(spec.cycles)
    cutoff = profile.short_cutoff
    u = next(
        (s for s in range(1, cutoff + 1) if 2 * cutoff * s * counts[s] >= spec.n),
        None,
    )
    if u is None:
        raise SpecError(f"No component size up to {cutoff} carries n/2K^(1/3) vertices.")

    long_cycles = [length for length in spec.cycles if length > profile.K]
    gammas = [length // u for length in long_cycles]
    betas = [length % u for length in long_cycles]
    kept = [length for length in spec.cycles if length <= profile.K]
    reduced = kept + [u] * sum(gammas) + [1] * sum(betas)
    return LongCycleReduction(
        u=u,
        long_cycles=long_cycles,
        gammas=gammas,
        betas=betas,
        reduced=CycleSpec(n=spec.n, cycles=reduced),
    )


def split_small_components(spec: CycleSpec, profile: ConstantsProfile) -> tuple[CycleSpec, CycleSpec]:
    """
    Components of size at most K, and those of size at most K^(1/3).
    """
    bounded = [length for length in spec.cycles if length <= profile.K]
    small = [length for length in bounded if length <= profile.short_cutoff]
    return CycleSpec.from_lengths(bounded), CycleSpec.from_lengths(small)
