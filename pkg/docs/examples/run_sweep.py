import os
import asyncio

from loguru import logger

from cycleembed import (
    RunMode,
    SpecPolicy,
    SweepConfig,
    estimate_threshold,
    regress_exponent,
    run_sweep,
)


workers = int(os.getenv("CYCLEEMBED_WORKERS", "4"))


@logger.catch
async def sweep():
    config = SweepConfig(
        n=[8, 10, 12],
        ell=3,
        p=[0.3, 0.5, 0.7, 0.9],
        trials=10,
        policy=SpecPolicy.ADVERSARIAL,
        mode=RunMode.ORACLE,
        out="sweep.csv",
    )

    summaries = await run_sweep(config, workers)

    for summary in summaries:
        logger.info(f"n = {summary.n}, p = {summary.p}: {summary.universal_rate:.2f} universal")


@logger.catch
async def threshold():
    config = SweepConfig(
        n=[8, 10, 12],
        bounds=(0.05, 1.0),
        trials=20,
        policy=SpecPolicy.EXHAUSTIVE,
        mode=RunMode.ORACLE,
        resolution=0.02,
    )

    estimates = [await estimate_threshold(n, 3, 0.5, config, workers) for n in config.n]
    fit = regress_exponent(estimates)

    logger.success(f"Fitted exponent {fit.slope:.3f}, theory predicts {fit.theoretical:.3f}")


@logger.catch
async def main():
    await sweep()
    await threshold()


if __name__ == "__main__":
    asyncio.run(main())
