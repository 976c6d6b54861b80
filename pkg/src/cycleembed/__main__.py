import asyncio
import json
import os
from argparse import ArgumentParser
from pathlib import Path

from loguru import logger

from .constant import ORACLE_CAP, WORKERS_ENV, ProfileName, RunMode
from .embedder import ExposureLayers, embed
from .graph import read_edge_list
from .lab import estimate_threshold, plot_script, regress_exponent, run_sweep
from .oracle import exhaustive_universality
from .types import ConstantsProfile, CycleSpec, RandomSeed, SweepConfig


def load_spec(value: str) -> CycleSpec:
    """
    Accept either a JSON file path or inline JSON: an object with `n` and `cycles`, or a bare
    list of component sizes.
    """
    path = Path(value)
    text = path.read_text() if path.is_file() else value
    data = json.loads(text)
    if isinstance(data, list):
        return CycleSpec.from_lengths(data)
    return CycleSpec.model_validate(data)


def worker_count(flag: int | None) -> int:
    if flag is not None:
        return flag
    return int(os.getenv(WORKERS_ENV, "1"))


async def main():
    parser = ArgumentParser(prog="cycleembed")
    parser.add_argument("--workers", type=int, default=None, help=f"Concurrent hosts (default: ${WORKERS_ENV} or 1)")
    subparsers = parser.add_subparsers(dest="command")

    # Embed command
    embed_parser = subparsers.add_parser("embed", help="Embed one spec into a host edge list")
    embed_parser.add_argument("--host", required=True, help="Edge-list file")
    embed_parser.add_argument("--spec", required=True, help="Spec as JSON text or a JSON file")
    embed_parser.add_argument("--profile", default=ProfileName.PRACTICAL.value, choices=[p.value for p in ProfileName])
    embed_parser.add_argument("--ell", type=int, default=3, help="Girth parameter")
    embed_parser.add_argument("--seed", type=int, default=0, help="Algorithm seed")

    # Sweep command
    sweep_parser = subparsers.add_parser("sweep", help="Run a universality sweep")
    sweep_parser.add_argument("--config", required=True, help="SweepConfig JSON file")
    sweep_parser.add_argument("--out", default=None, help="CSV output path, overrides the config")

    # Threshold command
    threshold_parser = subparsers.add_parser("threshold", help="Estimate p* by bisection")
    threshold_parser.add_argument("--n", type=int, nargs="+", required=True, help="Host sizes")
    threshold_parser.add_argument("--ell", type=int, default=3, help="Girth parameter")
    threshold_parser.add_argument("--rate", type=float, default=0.5, help="Target universal-host rate")
    threshold_parser.add_argument("--config", default=None, help="SweepConfig JSON file for trials, policy and seed")
    threshold_parser.add_argument("--out", required=True, help="JSON output path")

    # Oracle command
    oracle_parser = subparsers.add_parser("oracle", help="Check a small host against the whole bounded family")
    oracle_parser.add_argument("--n", type=int, required=True)
    oracle_parser.add_argument("--ell", type=int, default=3)
    oracle_parser.add_argument("--host", required=True, help="Edge-list file")

    # Plot command
    plot_parser = subparsers.add_parser("plot", help="Print a gnuplot script for a sweep CSV")
    plot_parser.add_argument("csv", help="Sweep CSV")

    args = parser.parse_args()
    workers = worker_count(args.workers)

    match args.command:
        case "embed":
            host = read_edge_list(args.host)
            spec = load_spec(args.spec)
            profile = ConstantsProfile.from_name(args.profile, args.ell)
            layers = ExposureLayers.from_host(host, RandomSeed(seed=args.seed, label="layers"))
            embedding = embed(layers, spec, profile, RandomSeed(seed=args.seed, label="embed"))
            print(embedding.model_dump_json(indent=2))
        case "sweep":
            config = SweepConfig.model_validate_json(Path(args.config).read_text())
            if args.out:
                config = config.model_copy(update={"out": args.out})
            summaries = await run_sweep(config, workers)
            for summary in summaries:
                logger.info(
                    f"n = {summary.n}, p = {summary.p}: rate {summary.rate:.3f}, "
                    f"universal {summary.universal_rate:.3f}"
                )
        case "threshold":
            if args.config:
                config = SweepConfig.model_validate_json(Path(args.config).read_text())
            else:
                mode = RunMode.ORACLE if max(args.n) <= ORACLE_CAP else RunMode.PIPELINE
                config = SweepConfig(n=args.n, ell=args.ell, bounds=(0.0, 1.0), mode=mode)
            estimates = [await estimate_threshold(n, args.ell, args.rate, config, workers) for n in args.n]
            fit = regress_exponent(estimates) if len(set(args.n)) >= 3 else None
            report = {
                "estimates": [estimate.model_dump(mode="json") for estimate in estimates],
                "fit": fit.model_dump(mode="json") if fit else None,
            }
            Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
            logger.success(f"Wrote {len(estimates)} estimates to {args.out}.")
        case "oracle":
            host = read_edge_list(args.host)
            if host.n != args.n:
                parser.error(f"Host has {host.n} vertices, expected {args.n}.")
            verdict = exhaustive_universality(args.n, args.ell, host)
            print(verdict.model_dump_json(indent=2))
        case "plot":
            print(plot_script(args.csv), end="")
        case _:
            parser.print_help()


@logger.catch
def run():
    asyncio.run(main())


if __name__ == "__main__":
    run()
