import tempfile
import unittest
from pathlib import Path

from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from cycleembed import (
    Direction,
    HostDigraph,
    HostGraph,
    RandomSeed,
    edges_between,
    gen_random_digraph,
    gen_random_graph,
    neighbors_into,
    read_edge_list,
    write_edge_list,
)
from cycleembed.exceptions import GraphFormatError
from cycleembed.utils import EdgeListParser, check_path


class TestHostGraph(unittest.TestCase):
    def test_complete(self):
        graph = HostGraph.complete(5)
        self.assertEqual(graph.num_edges, 10)
        self.assertEqual(graph.neighbors(0), frozenset({1, 2, 3, 4}))
        self.assertTrue(graph.has_edge(4, 2))
        self.assertFalse(graph.has_edge(7, 2))

    def test_rejects_loops_and_range(self):
        with self.subTest("loop"):
            with self.assertRaises(ValueError):
                HostGraph(3, [(1, 1)])
        with self.subTest("range"):
            with self.assertRaises(ValueError):
                HostGraph(3, [(0, 3)])

    def test_union_and_subgraph(self):
        a = HostGraph(4, [(0, 1)])
        b = HostGraph(4, [(2, 3), (1, 0)])
        union = a.union(b)
        self.assertEqual(list(union.edges()), [(0, 1), (2, 3)])
        self.assertTrue(a.is_subgraph_of(union))
        self.assertFalse(union.is_subgraph_of(a))
        with self.assertRaises(ValueError):
            a.union(HostGraph(5))

    def test_symmetric_closure(self):
        closure = HostGraph(3, [(0, 1), (1, 2)]).symmetric_closure()
        self.assertEqual(closure.num_edges, 4)
        self.assertEqual(closure.in_neighbors(1), closure.out_neighbors(1))

    def test_to_networkx(self):
        graph = HostGraph(4, [(0, 1), (1, 2), (2, 3)]).to_networkx([0, 1, 2])
        self.assertEqual(sorted(graph.nodes), [0, 1, 2])
        self.assertEqual(graph.number_of_edges(), 2)


class TestGenerators(unittest.TestCase):
    def test_extreme_probabilities(self):
        seed = RandomSeed(seed=3)
        self.assertEqual(gen_random_graph(12, 0.0, seed).num_edges, 0)
        self.assertEqual(gen_random_graph(12, 1.0, seed), HostGraph.complete(12))
        self.assertEqual(gen_random_digraph(6, 1.0, seed).num_edges, 30)
        self.assertEqual(gen_random_graph(0, 0.5, seed).n, 0)

    def test_reproducible(self):
        first = gen_random_graph(30, 0.3, RandomSeed(seed=11))
        second = gen_random_graph(30, 0.3, RandomSeed(seed=11))
        other = gen_random_graph(30, 0.3, RandomSeed(seed=11, label="other"))
        self.assertEqual(first, second)
        self.assertNotEqual(first, other)

    def test_invalid_probability(self):
        for p in (-0.1, 1.5):
            with self.subTest(p=p):
                with self.assertRaises(ValidationError):
                    gen_random_graph(5, p, RandomSeed(seed=0))

    def test_digraph_adjacency_consistent(self):
        digraph = gen_random_digraph(20, 0.3, RandomSeed(seed=5))
        for u, v in digraph.edges():
            self.assertIn(u, digraph.in_neighbors(v))
            self.assertNotEqual(u, v)

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(min_value=0, max_value=2**32),
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
    )
    def test_coupled_samples_are_nested(self, seed, p1, p2):
        low, high = sorted((p1, p2))
        stream = RandomSeed(seed=seed)
        self.assertTrue(gen_random_graph(15, low, stream).is_subgraph_of(gen_random_graph(15, high, stream)))


class TestNeighborhoods(unittest.TestCase):
    def test_neighbors_into(self):
        path = HostGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        self.assertEqual(neighbors_into(path, [1, 2], range(5)), {0, 3})
        self.assertEqual(neighbors_into(path, [1, 2], [3, 4]), {3})
        self.assertEqual(neighbors_into(path, [], range(5)), set())

    def test_directed_neighbors(self):
        digraph = HostDigraph(3, [(0, 1), (2, 0)])
        self.assertEqual(neighbors_into(digraph, [0], range(3), Direction.OUT), {1})
        self.assertEqual(neighbors_into(digraph, [0], range(3), Direction.IN), {2})

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=1000), st.sets(st.integers(0, 19)), st.sets(st.integers(0, 19)))
    def test_neighbors_stay_in_target(self, seed, X, Y):
        graph = gen_random_graph(20, 0.2, RandomSeed(seed=seed))
        found = neighbors_into(graph, X, Y)
        self.assertTrue(found <= Y - X)

    def test_edges_between(self):
        triangle = HostGraph(3, [(0, 1), (1, 2), (0, 2)])
        self.assertEqual(edges_between(triangle, [0], [1, 2]), 2)
        self.assertEqual(edges_between(triangle, [0, 1], [0, 1, 2]), 3)
        self.assertEqual(edges_between(HostDigraph(2, [(0, 1)]), [1], [0]), 0)


class TestEdgeList(unittest.TestCase):
    def test_parse(self):
        n, edges = EdgeListParser("4 2\n\n2 1\n3 0\n").parse()
        self.assertEqual(n, 4)
        self.assertEqual(edges, [(1, 2), (0, 3)])

    def test_errors_name_the_line(self):
        cases = {
            "": 1,
            "3 1\n0 0\n": 2,
            "3 2\n0 1\n1 0\n": 3,
            "3 1\n0 5\n": 2,
            "3 1\n0 x\n": 2,
            "3 1\n0 1 2\n": 2,
            "3 2\n0 1\n": 3,
        }
        for text, line in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(GraphFormatError) as context:
                    EdgeListParser(text).parse()
                self.assertEqual(context.exception.line, line)

    def test_file_round_trip(self):
        graph = gen_random_graph(10, 0.4, RandomSeed(seed=2))
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "host.txt"
            write_edge_list(graph, path)
            self.assertEqual(read_edge_list(path), graph)

    def test_write_rejects_digraph(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(GraphFormatError):
                write_edge_list(HostDigraph(2, [(0, 1)]), Path(directory) / "d.txt")


class TestCheckPath(unittest.TestCase):
    def test_check_path(self):
        graph = HostGraph.complete(4)
        self.assertIsNone(check_path(graph, [0, 1, 2], length=2))
        self.assertIsNone(check_path(graph, [0, 1, 2, 0]))
        self.assertIn("length", check_path(graph, [0, 1], length=2))
        self.assertIn("repeated", check_path(graph, [0, 1, 0, 2]))
        self.assertIn("missing", check_path(HostGraph(3, [(0, 1)]), [0, 1, 2]))
        self.assertIn("outside", check_path(graph, [0, 1, 2], interior=[3]))


if __name__ == "__main__":
    unittest.main()
