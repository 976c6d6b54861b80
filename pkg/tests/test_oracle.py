import unittest

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from cycleembed import (
    CycleSpec,
    HostGraph,
    Phase,
    RandomSeed,
    brute_force_embed,
    enumerate_bounded_family,
    exhaustive_universality,
    gen_random_graph,
    verify_embedding,
)
from cycleembed.exceptions import OracleCapError


def target_graph(spec: CycleSpec) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(spec.n))
    graph.add_edges_from(spec.target_edges())
    return graph


class TestBruteForceEmbed(unittest.TestCase):
    def test_triangle(self):
        triangle = HostGraph(3, [(0, 1), (1, 2), (0, 2)])
        result = brute_force_embed(triangle, CycleSpec.from_lengths([3]))
        self.assertTrue(result.embeddable)
        self.assertEqual(result.witness.assignment, [0, 1, 2])
        self.assertIs(result.witness.phase, Phase.ORACLE)

    def test_square_has_no_triangle(self):
        square = HostGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        result = brute_force_embed(square, CycleSpec.from_lengths([3, 1]))
        self.assertFalse(result.embeddable)
        self.assertIsNone(result.witness)
        self.assertGreater(result.nodes_explored, 0)

    def test_matching_in_a_path(self):
        path = HostGraph(4, [(0, 1), (1, 2), (2, 3)])
        result = brute_force_embed(path, CycleSpec.from_lengths([2, 2]))
        self.assertEqual(result.witness.assignment, [0, 1, 2, 3])

    def test_spec_larger_than_host(self):
        self.assertFalse(brute_force_embed(HostGraph.complete(3), CycleSpec.from_lengths([4])).embeddable)

    def test_cap(self):
        with self.assertRaises(OracleCapError):
            brute_force_embed(HostGraph(6), CycleSpec.from_lengths([1] * 6), cap=5)
        with self.assertRaises(OracleCapError):
            exhaustive_universality(6, 3, HostGraph(6), cap=5)

    def test_agrees_with_monomorphism(self):
        for seed in range(4):
            host = gen_random_graph(7, 0.5, RandomSeed(seed=seed))
            host_nx = host.to_networkx()
            for spec in enumerate_bounded_family(7, 3, 7):
                with self.subTest(seed=seed, spec=spec.spec_id):
                    result = brute_force_embed(host, spec)
                    expected = GraphMatcher(host_nx, target_graph(spec)).subgraph_is_monomorphic()
                    self.assertEqual(result.embeddable, expected)
                    if result.embeddable:
                        self.assertTrue(verify_embedding(host, spec, result.witness))


class TestExhaustiveUniversality(unittest.TestCase):
    def test_complete_host_is_universal(self):
        verdict = exhaustive_universality(6, 3, HostGraph.complete(6))
        self.assertTrue(verdict.universal)
        self.assertIsNone(verdict.failing)
        self.assertEqual(verdict.checked, 11)

    def test_empty_host_fails_at_a_single_edge(self):
        verdict = exhaustive_universality(6, 3, HostGraph(6))
        self.assertFalse(verdict.universal)
        self.assertEqual(verdict.failing, CycleSpec(n=6, cycles=[1, 1, 1, 1, 2]))
        self.assertEqual(verdict.checked, 2)

    def test_girth_restricts_the_family(self):
        # C5 holds no triangle or square, and ℓ = 5 never asks for one
        pentagon = HostGraph(5, [(i, (i + 1) % 5) for i in range(5)])
        self.assertFalse(exhaustive_universality(5, 3, pentagon).universal)
        verdict = exhaustive_universality(5, 5, pentagon)
        self.assertTrue(verdict.universal)
        self.assertEqual(verdict.checked, 4)


if __name__ == "__main__":
    unittest.main()
