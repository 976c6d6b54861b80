import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from unittest.mock import patch

from pydantic import TypeAdapter

from cycleembed import (
    HostGraph,
    RandomSeed,
    RunMode,
    SpecPolicy,
    SweepConfig,
    SweepRecord,
    SweepSummary,
    ThresholdEstimate,
    estimate_threshold,
    generate_specs,
    plot_script,
    regress_exponent,
    run_sweep,
    validate_spec,
    write_edge_list,
)
from cycleembed.__main__ import load_spec, main, worker_count
from cycleembed.constant import WORKERS_ENV
from cycleembed.exceptions import OracleCapError, ThresholdError
from cycleembed.lab import _threshold_mode, host_seed, read_records, summarize, write_records


def record(n, p, seed, success, spec_id="1x4"):
    return SweepRecord(n=n, p=p, spec_id=spec_id, seed=seed, phase="bounded", success=success)


class TestGenerateSpecs(unittest.TestCase):
    def test_exhaustive(self):
        specs = generate_specs(6, 3, SpecPolicy.EXHAUSTIVE, 1, RandomSeed(seed=0))
        self.assertEqual(len(specs), 11)
        with self.assertRaises(OracleCapError):
            generate_specs(15, 3, SpecPolicy.EXHAUSTIVE, 1, RandomSeed(seed=0), cap=14)

    def test_random(self):
        specs = generate_specs(12, 4, SpecPolicy.RANDOM, 30, RandomSeed(seed=2))
        self.assertLessEqual(len(specs), 30)
        self.assertEqual(len(specs), len(set(specs)))
        for spec in specs:
            self.assertEqual(spec.n, 12)
            validate_spec(spec, 4)
        self.assertEqual(generate_specs(12, 4, SpecPolicy.RANDOM, 30, RandomSeed(seed=2)), specs)

    def test_adversarial(self):
        specs = generate_specs(8, 3, SpecPolicy.ADVERSARIAL, 1, RandomSeed(seed=0))
        self.assertEqual(
            [spec.cycles for spec in specs],
            [[1, 1, 3, 3], [8], [2, 2, 2, 2], [3, 5], [1] * 8],
        )
        self.assertEqual(
            [spec.cycles for spec in generate_specs(2, 3, SpecPolicy.ADVERSARIAL, 1, RandomSeed(seed=0))],
            [[2], [1, 1]],
        )

    def test_host_seed(self):
        self.assertEqual(host_seed(0, 10, 3), host_seed(0, 10, 3))
        self.assertEqual(len({host_seed(0, 10, trial) for trial in range(20)}), 20)
        self.assertNotEqual(host_seed(0, 10, 0), host_seed(1, 10, 0))


class TestRecords(unittest.TestCase):
    def test_summarize(self):
        records = [record(6, 1.0, 9, True), record(6, 0.5, 1, True), record(6, 0.5, 1, True), record(6, 0.5, 2, False)]
        low, high = summarize(records, RunMode.PIPELINE)
        self.assertEqual((low.p, low.attempts, low.successes, low.hosts, low.universal_hosts), (0.5, 3, 2, 2, 1))
        self.assertAlmostEqual(low.rate, 2 / 3)
        self.assertEqual(low.universal_rate, 0.5)
        self.assertEqual((high.p, high.universal_rate), (1.0, 1.0))

    def test_csv_round_trip(self):
        records = [record(6, 0.1, 2**63 + 5, True), record(8, 0.35, 7, False, "2x4")]
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "records.csv"
            write_records(records, path)
            self.assertEqual(path.read_text().splitlines()[0], "n,p,spec_id,seed,phase,success,retries,ms")
            self.assertEqual(read_records(path), records)

    def test_plot_script(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "records.csv"
            write_records([record(6, 0.5, 1, True), record(8, 0.5, 1, False)], path)
            script = plot_script(path)
            self.assertTrue(script.startswith('set datafile separator ","'))
            self.assertIn("($1 == 6 ? $2 : 1/0):6", script)
            self.assertIn("title 'n = 8'", script)
            write_records([], path)
            self.assertIn("# no records", plot_script(path))


class TestRunSweep(unittest.IsolatedAsyncioTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def config(self, name, **fields):
        return SweepConfig(record_timing=False, out=str(self.root / name), **fields)

    async def test_oracle_sweep(self):
        config = self.config(
            "oracle.csv", n=[6], p=[0.0, 1.0], trials=3, policy=SpecPolicy.EXHAUSTIVE, mode=RunMode.ORACLE
        )
        empty, full = await run_sweep(config)
        self.assertEqual((empty.attempts, empty.successes, empty.hosts, empty.universal_hosts), (33, 3, 3, 0))
        self.assertEqual((full.attempts, full.successes, full.universal_hosts), (33, 33, 3))

        # Files
        records = read_records(config.out)
        self.assertEqual(len(records), 66)
        self.assertEqual([r.p for r in records[:33]], [0.0] * 33)
        self.assertTrue(all(r.phase == "oracle" and r.ms == 0 for r in records))
        summaries = TypeAdapter(list[SweepSummary]).validate_json(config.summary_path().read_text())
        self.assertEqual(summaries, summarize(records, RunMode.ORACLE))

    async def test_reruns_are_byte_identical(self):
        fields = dict(n=[5, 6], p=[0.3, 0.7], trials=4, policy=SpecPolicy.RANDOM, spec_count=4, mode=RunMode.ORACLE)
        first, second = self.config("first.csv", **fields), self.config("second.csv", **fields)
        await run_sweep(first, workers=1)
        await run_sweep(second, workers=3)
        self.assertEqual(Path(first.out).read_bytes(), Path(second.out).read_bytes())

    async def test_pipeline_sweep(self):
        config = self.config("pipeline.csv", n=[8], p=[1.0], trials=2, policy=SpecPolicy.ADVERSARIAL)
        (summary,) = await run_sweep(config, workers=2)
        self.assertEqual((summary.attempts, summary.successes, summary.universal_hosts), (10, 10, 2))
        self.assertTrue(all(r.phase == "bounded" for r in read_records(config.out)))

    async def test_pipeline_failures_become_records(self):
        config = self.config("empty.csv", n=[6], p=[0.0], trials=1, policy=SpecPolicy.ADVERSARIAL)
        (summary,) = await run_sweep(config)
        records = read_records(config.out)
        self.assertEqual(summary.successes, 1)
        failed = [r for r in records if not r.success]
        self.assertEqual(len(failed), 3)
        self.assertTrue(all(r.phase == "bounded" and r.retries == config.profile.retries for r in failed))

    async def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            await run_sweep(SweepConfig(n=[5], bounds=(0.0, 1.0)))
        with self.assertRaises(ValueError):
            await run_sweep(SweepConfig(n=[5], p=[0.5]), workers=0)


class TestThreshold(unittest.IsolatedAsyncioTestCase):
    async def test_bisection(self):
        config = SweepConfig(
            n=[5],
            bounds=(0.0, 1.0),
            trials=4,
            policy=SpecPolicy.EXHAUSTIVE,
            mode=RunMode.ORACLE,
            resolution=0.25,
        )
        estimate = await estimate_threshold(5, 3, 0.5, config, workers=2)
        self.assertEqual(estimate.hi - estimate.lo, 0.25)
        self.assertTrue(estimate.lo < estimate.p_star < estimate.hi)
        self.assertGreaterEqual(estimate.rate_hi, 0.5)
        self.assertLess(estimate.rate_lo, 0.5)
        self.assertLessEqual(estimate.ci[0], estimate.rate_hi)
        self.assertLessEqual(estimate.rate_hi, estimate.ci[1])
        self.assertIs(estimate.mode, RunMode.ORACLE)

    async def test_unbracketed(self):
        config = SweepConfig(n=[4], p=[0.0], trials=2, policy=SpecPolicy.EXHAUSTIVE, mode=RunMode.ORACLE)
        with self.assertRaises(ThresholdError):
            await estimate_threshold(4, 3, 0.5, config)
        with self.assertRaises(ValueError):
            await estimate_threshold(4, 3, 1.0, config)

    def test_oracle_falls_back_above_cap(self):
        config = SweepConfig(n=[20], bounds=(0.0, 1.0), mode=RunMode.ORACLE)
        self.assertIs(_threshold_mode(20, config), RunMode.PIPELINE)
        self.assertIs(_threshold_mode(10, config), RunMode.ORACLE)


class TestRegressExponent(unittest.TestCase):
    def estimates(self, sizes, exponent):
        return [
            ThresholdEstimate(
                n=n,
                ell=3,
                target_rate=0.5,
                mode=RunMode.PIPELINE,
                p_star=2 * n**exponent,
                lo=0.0,
                hi=1.0,
                rate_lo=0.0,
                rate_hi=1.0,
                ci=(0.0, 1.0),
                trials=10,
            )
            for n in sizes
        ]

    def test_power_law(self):
        fit = regress_exponent(self.estimates([10, 20, 40, 80], -2 / 3))
        self.assertAlmostEqual(fit.slope, -2 / 3, places=6)
        self.assertAlmostEqual(fit.theoretical, -2 / 3)
        self.assertEqual(fit.points, 4)
        self.assertLessEqual(fit.ci[0], fit.slope)
        self.assertLessEqual(fit.slope, fit.ci[1])

    def test_rejects_degenerate_input(self):
        with self.assertRaises(ValueError):
            regress_exponent(self.estimates([10, 20], -0.5))
        bad = self.estimates([10, 20, 40], -0.5)
        bad[1].p_star = 0.0
        with self.assertRaises(ValueError):
            regress_exponent(bad)


class TestCommandLine(unittest.IsolatedAsyncioTestCase):
    def test_load_spec(self):
        self.assertEqual(load_spec("[3, 2, 1]").cycles, [1, 2, 3])
        self.assertEqual(load_spec('{"n": 4, "cycles": [4]}').n, 4)
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "spec.json"
            path.write_text("[5, 5]")
            self.assertEqual(load_spec(str(path)).n, 10)

    def test_worker_count(self):
        self.assertEqual(worker_count(3), 3)
        with patch.dict(os.environ, {WORKERS_ENV: "5"}):
            self.assertEqual(worker_count(None), 5)
        with patch.dict(os.environ):
            os.environ.pop(WORKERS_ENV, None)
            self.assertEqual(worker_count(None), 1)

    async def test_oracle_command(self):
        with tempfile.TemporaryDirectory() as directory:
            host = Path(directory) / "k4.txt"
            write_edge_list(HostGraph.complete(4), host)
            output = io.StringIO()
            with patch("sys.argv", ["cycleembed", "oracle", "--n", "4", "--host", str(host)]):
                with redirect_stdout(output):
                    await main()
        verdict = json.loads(output.getvalue())
        self.assertTrue(verdict["universal"])
        self.assertEqual(verdict["checked"], 5)

    async def test_no_command_prints_help(self):
        output = io.StringIO()
        with patch("sys.argv", ["cycleembed"]):
            with redirect_stdout(output):
                await main()
        self.assertIn("usage: cycleembed", output.getvalue())


if __name__ == "__main__":
    unittest.main()
