import unittest

from hypothesis import given, settings, strategies as st

from cycleembed import (
    HostDigraph,
    HostGraph,
    RandomSeed,
    VerificationMode,
    expands_into,
    gen_random_graph,
    generalized_matching,
    is_expander,
    split_expanding,
    star_matching,
)
from cycleembed.exceptions import BudgetExceededError, HallViolationError, PartitionError
from cycleembed.expansion import exact_budget, sampled_sizes, threshold_size


class CountingGraph(HostGraph):
    def neighbors(self, v):
        self.lookups += 1
        return super().neighbors(v)

    out_neighbors = neighbors
    in_neighbors = neighbors


class TestExpandsInto(unittest.TestCase):
    def test_threshold_size(self):
        self.assertEqual(threshold_size(10, 1), 5)
        self.assertEqual(threshold_size(10, 3), 2)
        self.assertEqual(threshold_size(1, 100), 1)

    def test_complete_graph_expands(self):
        verdict = expands_into(HostGraph.complete(8), range(8), 1)
        self.assertTrue(verdict.holds)
        self.assertTrue(verdict.certified)
        self.assertEqual(exact_budget(8, 8, 1), 8 + 28 + 56 + 70)

    def test_empty_graph_fails_small_sets(self):
        verdict = expands_into(HostGraph(8), range(8), 1)
        self.assertFalse(verdict)
        self.assertEqual(verdict.witness, [0])

    def test_non_adjacent_pair_fails_pair_condition(self):
        path = HostGraph(3, [(0, 1), (1, 2)])
        verdict = expands_into(path, range(3), 1.5)
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.witness_pair, ([0], [2]))

    def test_budget_guard(self):
        with self.assertRaises(BudgetExceededError) as context:
            expands_into(HostGraph.complete(40), range(40), 1, cap=1000)
        self.assertEqual(context.exception.cap, 1000)

    def test_sampled_mode(self):
        verdict = expands_into(
            HostGraph.complete(30), range(30), 2, VerificationMode.SAMPLED, trials=200, seed=RandomSeed(seed=1)
        )
        self.assertTrue(verdict.holds)
        self.assertIs(verdict.mode, VerificationMode.SAMPLED)
        self.assertFalse(verdict.certified)

    def test_sampled_sizes(self):
        self.assertEqual(sampled_sizes(10), [1, 2, 4, 8, 9])
        self.assertEqual(sampled_sizes(8), [1, 2, 4, 7])
        self.assertEqual(sampled_sizes(2), [1])
        self.assertEqual(sampled_sizes(1), [])

    def test_sampled_mode_stops_early(self):
        graph = CountingGraph.complete(600)
        graph.lookups = 0
        verdict = expands_into(graph, range(600), 1, VerificationMode.SAMPLED, trials=100, seed=RandomSeed(seed=2))
        self.assertTrue(verdict.holds)
        # one adjacency lookup settles each sampled set on a complete host
        self.assertLessEqual(graph.lookups, 300)

    def test_sampled_mode_on_large_workspace(self):
        graph = gen_random_graph(1500, 0.5, RandomSeed(seed=5))
        verdict = expands_into(
            graph, range(500, 1500), 20, VerificationMode.SAMPLED, trials=200, seed=RandomSeed(seed=6)
        )
        self.assertTrue(verdict.holds)

    def test_rejects_non_positive_factor(self):
        with self.assertRaises(ValueError):
            expands_into(HostGraph.complete(3), range(3), 0)

    def test_is_expander_directed(self):
        self.assertTrue(is_expander(HostDigraph.complete(7), 1).holds)
        one_way = HostDigraph(4, [(0, 1), (0, 2), (0, 3)])
        self.assertFalse(is_expander(one_way, 1).holds)


class TestSplitExpanding(unittest.TestCase):
    def test_parts_partition_the_workspace(self):
        parts = split_expanding(HostGraph.complete(30), range(30), [10, 12, 8, 0], 10, RandomSeed(seed=4), trials=50)
        self.assertEqual([len(part) for part in parts], [10, 12, 8, 0])
        self.assertEqual(sorted(v for part in parts for v in part), list(range(30)))

    def test_size_mismatch(self):
        with self.assertRaises(ValueError):
            split_expanding(HostGraph.complete(6), range(6), [3, 2], 1, RandomSeed(seed=0))

    def test_uncertified_partition(self):
        with self.subTest("strict"):
            with self.assertRaises(PartitionError) as context:
                split_expanding(HostGraph(10), range(10), [5, 5], 5, RandomSeed(seed=0), retries=3, trials=10)
            self.assertTrue(context.exception.diagnostics)
        with self.subTest("lenient"):
            parts = split_expanding(
                HostGraph(10), range(10), [5, 5], 5, RandomSeed(seed=0), retries=3, trials=10, strict=False
            )
            self.assertEqual(sorted(parts[0] + parts[1]), list(range(10)))


class TestMatchings(unittest.TestCase):
    def setUp(self):
        self.graph = HostGraph(6, [(0, 2), (0, 3), (1, 4), (1, 5)])

    def test_generalized_matching(self):
        matching = generalized_matching(self.graph, {0: 2, 1: 2}, [2, 3, 4, 5])
        self.assertEqual(matching.stars, {0: [2, 3], 1: [4, 5]})
        self.assertEqual(matching.c, 2)
        self.assertEqual(matching.owner()[4], 1)

    def test_mixed_demands(self):
        matching = generalized_matching(self.graph, {0: 1, 1: 2}, [2, 3, 4, 5])
        self.assertEqual(len(matching.stars[0]), 1)
        self.assertIsNone(matching.c)

    def test_hall_violation(self):
        with self.assertRaises(HallViolationError) as context:
            generalized_matching(self.graph, {0: 3, 1: 1}, [2, 3, 4, 5])
        self.assertEqual(context.exception.deficient, {0})

    def test_centres_outside_pool(self):
        with self.assertRaises(ValueError):
            star_matching(self.graph, [0], [0, 2], 1)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=3))
    def test_star_matching_on_random_hosts(self, seed, c):
        graph = gen_random_graph(24, 0.3, RandomSeed(seed=seed))
        A, X = range(4), range(4, 24)
        try:
            matching = star_matching(graph, A, X, c)
        except HallViolationError as error:
            self.assertTrue(error.deficient <= set(A))
            return
        leaves = matching.leaves
        self.assertEqual(len(leaves), len(set(leaves)))
        for centre, star in matching.stars.items():
            self.assertEqual(len(star), c)
            self.assertTrue(all(graph.has_edge(centre, leaf) for leaf in star))


if __name__ == "__main__":
    unittest.main()
