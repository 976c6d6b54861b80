import asyncio
import csv
import math
from collections import defaultdict
from pathlib import Path
from time import perf_counter

import numpy as np
from loguru import logger
from pydantic import TypeAdapter
from scipy import stats

from .constant import CSV_COLUMNS, Phase, RunMode, SpecPolicy
from .cycles import admissible_lengths, enumerate_bounded_family
from .embedder import embed, make_layers
from .exceptions import EmbeddingError, OracleCapError, SpecError, ThresholdError
from .oracle import brute_force_embed
from .types import (
    ConstantsProfile,
    CycleSpec,
    ExponentFit,
    RandomSeed,
    SweepConfig,
    SweepRecord,
    SweepSummary,
    ThresholdEstimate,
)


def _unique(specs: list[CycleSpec]) -> list[CycleSpec]:
    seen, out = set(), []
    for spec in specs:
        if spec not in seen:
            seen.add(spec)
            out.append(spec)
    return out


def _random_spec(n: int, ell: int, rng: np.random.Generator) -> CycleSpec:
    parts = admissible_lengths(n, ell, n)
    lengths, remaining = [], n
    while remaining:
        choices = [part for part in parts if part <= remaining]
        part = int(choices[rng.integers(len(choices))])
        lengths.append(part)
        remaining -= part
    return CycleSpec.from_lengths(lengths)


def adversarial_specs(n: int, ell: int) -> list[CycleSpec]:
    """
    The hand-picked hard cases: all ℓ-cycles, a Hamilton cycle, a perfect matching, ℓ-cycles
    plus one long cycle, and the all-isolated spec. Cases that do not fit in n are skipped.
    """
    specs = []
    if n >= ell:
        specs.append(CycleSpec.from_lengths([ell] * (n // ell) + [1] * (n % ell)))
        specs.append(CycleSpec.from_lengths([n]))
    specs.append(CycleSpec.from_lengths([2] * (n // 2) + [1] * (n % 2)))
    short = (n // 2) // ell
    if short and n - short * ell >= ell:
        specs.append(CycleSpec.from_lengths([ell] * short + [n - short * ell]))
    specs.append(CycleSpec.from_lengths([1] * n))
    return _unique(specs)


def generate_specs(
    n: int, ell: int, policy: SpecPolicy, count: int, seed: RandomSeed, cap: int | None = None
) -> list[CycleSpec]:
    """
    Choose the target specs of one host size.

    Parameters
    ----------
    n: `int`
        Host size
    ell: `int`
        Girth parameter
    policy: `cycleembed.SpecPolicy`
        Exhaustive family, uniform random draws or the adversarial corpus
    count: `int`
        Number of random draws. Duplicates are dropped, so fewer specs may come back
    seed: `cycleembed.RandomSeed`
        Stream of the random draws
    cap: `int`, optional
        Largest n the exhaustive policy accepts

    Returns
    -------
    `list[cycleembed.CycleSpec]`
        Distinct specs in a deterministic order

    Raises
    ------
    `cycleembed.exceptions.OracleCapError`
        If the exhaustive policy is asked for n above `cap`
    """
    match policy:
        case SpecPolicy.EXHAUSTIVE:
            if cap is not None and n > cap:
                raise OracleCapError(f"The exhaustive policy is capped at n = {cap}, got {n}.")
            return list(enumerate_bounded_family(n, ell, n))
        case SpecPolicy.RANDOM:
            rng = seed.rng()
            return _unique([_random_spec(n, ell, rng) for _ in range(count)])
        case SpecPolicy.ADVERSARIAL:
            return adversarial_specs(n, ell)


def host_seed(master: int, n: int, trial: int) -> int:
    """
    Seed of the trial-th host of size n. Independent of p, so hosts at different p are coupled.
    """
    state = np.random.SeedSequence([master, n, trial]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _profile(config: SweepConfig) -> ConstantsProfile:
    return config.profile.model_copy(update={"ell": config.ell})


def _attempt(layers, spec: CycleSpec, seed: int, mode: RunMode, profile: ConstantsProfile):
    match mode:
        case RunMode.ORACLE:
            result = brute_force_embed(layers.union(), spec, profile.oracle_cap)
            return Phase.ORACLE.value, result.embeddable, 0
        case RunMode.PIPELINE:
            try:
                embedding = embed(layers, spec, profile, RandomSeed(seed=seed, label=f"embed/{spec.spec_id}"))
            except SpecError:
                return Phase.VALIDATE.value, False, 0
            except EmbeddingError as error:
                return error.phase, False, profile.retries
            return embedding.phase.value, True, embedding.retries


def run_host(
    n: int, p: float, trial: int, specs: list[CycleSpec], config: SweepConfig, mode: RunMode
) -> list[SweepRecord]:
    """
    Sample one host and attempt every spec on it. Failures become records, never exceptions.
    """
    seed = host_seed(config.seed, n, trial)
    layers = make_layers(n, p, RandomSeed(seed=seed))
    profile = _profile(config)
    records = []
    for spec in specs:
        start = perf_counter()
        phase, success, retries = _attempt(layers, spec, seed, mode, profile)
        ms = round((perf_counter() - start) * 1000) if config.record_timing else 0
        records.append(
            SweepRecord(
                n=n, p=p, spec_id=spec.spec_id, seed=seed, phase=phase, success=success, retries=retries, ms=ms
            )
        )
    return records


async def _run_point(
    n: int,
    p: float,
    specs: list[CycleSpec],
    config: SweepConfig,
    mode: RunMode,
    semaphore: asyncio.Semaphore,
) -> list[SweepRecord]:
    async def one(trial: int) -> list[SweepRecord]:
        async with semaphore:
            return await asyncio.to_thread(run_host, n, p, trial, specs, config, mode)

    batches = await asyncio.gather(*(one(trial) for trial in range(config.trials)))
    return [record for batch in batches for record in batch]


def _specs_for(n: int, config: SweepConfig) -> list[CycleSpec]:
    return generate_specs(
        n,
        config.ell,
        config.policy,
        config.spec_count,
        RandomSeed(seed=config.seed, label=f"specs/{n}"),
        config.profile.oracle_cap,
    )


def summarize(records: list[SweepRecord], mode: RunMode) -> list[SweepSummary]:
    """
    Aggregate records per (n, p). A host is universal when every spec attempted on it succeeded.
    """
    groups: dict[tuple[int, float], list[SweepRecord]] = defaultdict(list)
    for record in records:
        groups[(record.n, record.p)].append(record)
    summaries = []
    for (n, p), group in sorted(groups.items()):
        outcomes: dict[int, bool] = {}
        for record in group:
            outcomes[record.seed] = outcomes.get(record.seed, True) and record.success
        summaries.append(
            SweepSummary(
                n=n,
                p=p,
                mode=mode,
                attempts=len(group),
                successes=sum(record.success for record in group),
                hosts=len(outcomes),
                universal_hosts=sum(outcomes.values()),
            )
        )
    return summaries


def write_records(records: list[SweepRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record.row())


def read_records(path: str | Path) -> list[SweepRecord]:
    with open(path, newline="") as f:
        return [
            SweepRecord(
                n=row["n"],
                p=row["p"],
                spec_id=row["spec_id"],
                seed=row["seed"],
                phase=row["phase"],
                success=row["success"] == "1",
                retries=row["retries"],
                ms=row["ms"],
            )
            for row in csv.DictReader(f)
        ]


async def run_sweep(config: SweepConfig, workers: int = 1) -> list[SweepSummary]:
    """
    Run every (n, p, host, spec) attempt of a sweep.

    Hosts run as tasks bounded by `workers`; records are collected in (n, p, trial, spec) order,
    so a fixed config with timing disabled writes a byte-identical CSV on every run.

    Parameters
    ----------
    config: `cycleembed.SweepConfig`
        Sweep description. Must carry a probability grid
    workers: `int`, optional
        Number of hosts processed concurrently

    Returns
    -------
    `list[cycleembed.SweepSummary]`
        One summary per (n, p), in the mode of the config

    Raises
    ------
    `ValueError`
        If the config has no probability grid or `workers` is below 1
    """
    if not config.p:
        raise ValueError("A sweep needs a probability grid; use estimate_threshold for bisection bounds.")
    if workers < 1:
        raise ValueError(f"Worker count must be positive. Got {workers}.")

    semaphore = asyncio.Semaphore(workers)
    records: list[SweepRecord] = []
    for n in config.n:
        specs = _specs_for(n, config)
        logger.info(f"Sweeping n = {n} over {len(config.p)} probabilities with {len(specs)} specs.")
        for p in config.p:
            records.extend(await _run_point(n, p, specs, config, config.mode, semaphore))

    summaries = summarize(records, config.mode)
    if config.out:
        write_records(records, config.out)
        config.summary_path().write_text(
            TypeAdapter(list[SweepSummary]).dump_json(summaries, indent=2).decode()
        )
        logger.info(f"Wrote {len(records)} records to {config.out}.")
    logger.success(f"Sweep finished: {len(records)} attempts over {len(summaries)} points.")
    return summaries


def _threshold_mode(n: int, config: SweepConfig) -> RunMode:
    if config.mode is RunMode.ORACLE and n > config.profile.oracle_cap:
        logger.warning(f"n = {n} exceeds the oracle cap; estimating with the pipeline instead.")
        return RunMode.PIPELINE
    return config.mode


async def estimate_threshold(
    n: int, ell: int, target_rate: float, config: SweepConfig, workers: int = 1
) -> ThresholdEstimate:
    """
    Bisect for the edge probability at which the universal-host rate reaches `target_rate`.

    The bracket comes from `config.bounds`, else from the ends of the probability grid. Hosts are
    coupled across p, and the specs are fixed per n, so reruns reproduce the same bracket.

    Parameters
    ----------
    n: `int`
        Host size
    ell: `int`
        Girth parameter
    target_rate: `float`
        Rate to locate, strictly between 0 and 1
    config: `cycleembed.SweepConfig`
        Trials, spec policy, mode, profile, seed and resolution
    workers: `int`, optional
        Number of hosts processed concurrently

    Returns
    -------
    `cycleembed.ThresholdEstimate`
        Midpoint of the final bracket with the Clopper-Pearson interval at its upper end

    Raises
    ------
    `ValueError`
        If `target_rate` is outside (0, 1)
    `cycleembed.exceptions.ThresholdError`
        If the rate at the lower bound already reaches the target or the rate at the upper bound
        does not
    """
    if not 0 < target_rate < 1:
        raise ValueError(f"Target rate must lie in (0, 1). Got {target_rate}.")
    config = config.model_copy(update={"ell": ell})
    lo, hi = config.bounds or (min(config.p), max(config.p))
    mode = _threshold_mode(n, config)
    specs = _specs_for(n, config)
    semaphore = asyncio.Semaphore(workers)

    async def universal(p: float) -> int:
        records = await _run_point(n, p, specs, config, mode, semaphore)
        (summary,) = summarize(records, mode)
        logger.debug(f"n = {n}, p = {p:.4f}: {summary.universal_hosts}/{summary.hosts} universal hosts.")
        return summary.universal_hosts

    trials = config.trials
    hits_lo, hits_hi = await universal(lo), await universal(hi)
    if hits_lo / trials >= target_rate or hits_hi / trials < target_rate:
        raise ThresholdError(
            f"Bounds [{lo}, {hi}] do not bracket rate {target_rate}: "
            f"measured {hits_lo / trials:.3f} and {hits_hi / trials:.3f}."
        )
    while hi - lo > config.resolution:
        mid = (lo + hi) / 2
        hits = await universal(mid)
        if hits / trials >= target_rate:
            hi, hits_hi = mid, hits
        else:
            lo, hits_lo = mid, hits

    interval = stats.binomtest(hits_hi, trials).proportion_ci(confidence_level=0.95, method="exact")
    estimate = ThresholdEstimate(
        n=n,
        ell=ell,
        target_rate=target_rate,
        mode=mode,
        p_star=(lo + hi) / 2,
        lo=lo,
        hi=hi,
        rate_lo=hits_lo / trials,
        rate_hi=hits_hi / trials,
        ci=(interval.low, interval.high),
        trials=trials,
    )
    logger.success(f"p*({n}) ≈ {estimate.p_star:.4f} in [{lo:.4f}, {hi:.4f}] ({mode.value}).")
    return estimate


def regress_exponent(estimates: list[ThresholdEstimate], confidence: float = 0.95) -> ExponentFit:
    """
    Fit log p* = slope · log n + intercept and compare the slope against -(ℓ-1)/ℓ.

    Raises
    ------
    `ValueError`
        With fewer than three distinct host sizes, or a non-positive p*
    """
    if len({estimate.n for estimate in estimates}) < 3:
        raise ValueError("The exponent fit needs at least three distinct host sizes.")
    if any(estimate.p_star <= 0 for estimate in estimates):
        raise ValueError("Every threshold estimate must be positive to take logarithms.")
    x = [math.log(estimate.n) for estimate in estimates]
    y = [math.log(estimate.p_star) for estimate in estimates]
    fit = stats.linregress(x, y)
    spread = stats.t.ppf((1 + confidence) / 2, len(x) - 2) * fit.stderr
    ell = estimates[0].ell
    theoretical = -(ell - 1) / ell
    result = ExponentFit(
        slope=fit.slope,
        intercept=fit.intercept,
        stderr=fit.stderr,
        ci=(fit.slope - spread, fit.slope + spread),
        theoretical=theoretical,
        points=len(x),
    )
    inside = result.ci[0] <= theoretical <= result.ci[1]
    logger.info(
        f"Slope {result.slope:.3f} ± {spread:.3f} against {theoretical:.3f}"
        f" ({'inside' if inside else 'outside'} the interval)."
    )
    return result


def plot_script(csv_path: str | Path) -> str:
    """
    Gnuplot text drawing the success rate against p, one curve per host size.
    """
    sizes = sorted({record.n for record in read_records(csv_path)})
    curves = ", \\\n     ".join(
        f"'{csv_path}' using ($1 == {n} ? $2 : 1/0):6 smooth unique with linespoints title 'n = {n}'"
        for n in sizes
    )
    lines = [
        'set datafile separator ","',
        'set xlabel "p"',
        'set ylabel "success rate"',
        "set yrange [0:1]",
        "set key bottom right",
        f"plot {curves}" if curves else "# no records",
    ]
    return "\n".join(lines) + "\n"
