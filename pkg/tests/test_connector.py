import math
import unittest

from hypothesis import given, strategies as st
from pydantic import ValidationError

from cycleembed import (
    ConnectionRequest,
    ConstantsProfile,
    HostDigraph,
    HostGraph,
    PathBundle,
    RandomSeed,
    connect_pairs,
    connect_single_pair,
    divide,
    gen_random_graph,
    verify_bundle,
)
from cycleembed.exceptions import CapacityError, ConnectionFailure, ConnectorError
from cycleembed.utils import check_path


class TestDivide(unittest.TestCase):
    def test_divide(self):
        kept, reached = divide(range(6), range(60), lambda x, y: y // 10 == x, 3)
        self.assertEqual(kept, [0, 1])
        self.assertEqual(reached, set(range(20)))

    def test_no_shrink(self):
        kept, reached = divide([3, 1], [7], lambda x, y: True, 1)
        self.assertEqual(kept, [1, 3])
        self.assertEqual(reached, {7})

    @given(
        st.lists(st.integers(min_value=0, max_value=11), min_size=1, max_size=80),
        st.integers(min_value=2, max_value=6),
    )
    def test_postcondition(self, owners, k):
        sources = 12
        kept, reached = divide(range(sources), range(len(owners)), lambda x, y: owners[y] == x, k)
        self.assertLessEqual(len(kept), math.ceil(sources / k))
        self.assertGreaterEqual(len(reached), len(owners) // k)
        self.assertTrue(all(owners[y] in kept for y in reached))


class TestConnectSinglePair(unittest.TestCase):
    def test_exact_lengths_on_complete_graph(self):
        host = HostGraph.complete(24)
        for length in (1, 2, 3, 5, 8):
            with self.subTest(length=length):
                index, path = connect_single_pair(host, [0], [1], [length], range(2, 24))
                self.assertEqual(index, 0)
                self.assertIsNone(check_path(host, path, length, range(2, 24)))
                self.assertEqual((path[0], path[-1]), (0, 1))

    def test_directed_host(self):
        host = HostDigraph.complete(16)
        _, path = connect_single_pair(host, [0], [1], [4], range(2, 16))
        self.assertIsNone(check_path(host, path, 4))

    def test_picks_a_connectable_pair(self):
        host = HostGraph(12, [(0, v) for v in range(4, 12)] + [(1, v) for v in range(4, 12)] + [(4, 9)])
        index, path = connect_single_pair(host, [2, 0], [3, 1], [3, 3], range(4, 12))
        self.assertEqual(index, 1)
        self.assertIsNone(check_path(host, path, 3))

    def test_empty_host_fails(self):
        with self.assertRaises(ConnectorError):
            connect_single_pair(HostGraph(10), [0], [1], [3], range(2, 10))


class TestConnectPairs(unittest.TestCase):
    def test_complete_host(self):
        host = HostGraph.complete(60)
        request = ConnectionRequest(pairs=[(0, 1), (2, 3), (4, 5)], lengths=[5, 6, 7], workspace=list(range(6, 60)))
        bundle = connect_pairs(host, request)
        self.assertIsNone(verify_bundle(host, request, bundle))

    def test_closed_path(self):
        host = HostGraph.complete(20)
        request = ConnectionRequest(pairs=[(0, 0)], lengths=[4], workspace=list(range(1, 20)))
        bundle = connect_pairs(host, request)
        self.assertIsNone(verify_bundle(host, request, bundle))
        self.assertEqual(bundle.paths[0][0], bundle.paths[0][-1])

    def test_with_reserve_pools(self):
        host = gen_random_graph(140, 0.5, RandomSeed(seed=8))
        request = ConnectionRequest(
            pairs=[(0, 1), (2, 3), (4, 5), (6, 7)], lengths=[4, 5, 6, 7], workspace=list(range(8, 140))
        )
        bundle = connect_pairs(host, request, ConstantsProfile.practical(sampled_trials=50), RandomSeed(seed=1))
        self.assertIsNone(verify_bundle(host, request, bundle))

    def test_empty_request(self):
        self.assertEqual(len(connect_pairs(HostGraph(3), ConnectionRequest())), 0)

    def test_capacity_guards(self):
        host = HostGraph.complete(20)
        with self.subTest("workspace share"):
            request = ConnectionRequest(pairs=[(0, 1)], lengths=[15], workspace=list(range(2, 20)))
            with self.assertRaises(CapacityError):
                connect_pairs(host, request)
        with self.subTest("length band"):
            request = ConnectionRequest(pairs=[(0, 1)], lengths=[5], workspace=list(range(2, 20)))
            with self.assertRaises(CapacityError):
                connect_pairs(host, request, ConstantsProfile.practical(max_path_length=4))

    def test_failure_reports_residual(self):
        request = ConnectionRequest(pairs=[(0, 1)], lengths=[3], workspace=list(range(2, 20)))
        with self.assertRaises(ConnectionFailure) as context:
            connect_pairs(HostGraph(20), request)
        self.assertEqual(context.exception.residual, [(0, 1)])


class TestRequestAndBundle(unittest.TestCase):
    def test_request_validation(self):
        cases = {
            "shared start": dict(pairs=[(0, 1), (0, 2)], lengths=[3, 3], workspace=[5, 6]),
            "endpoint in workspace": dict(pairs=[(0, 1)], lengths=[3], workspace=[1, 5]),
            "short closed path": dict(pairs=[(0, 0)], lengths=[2], workspace=[5]),
            "length count": dict(pairs=[(0, 1)], lengths=[], workspace=[5]),
        }
        for name, fields in cases.items():
            with self.subTest(name):
                with self.assertRaises(ValidationError):
                    ConnectionRequest(**fields)

    def test_chained_endpoints_allowed(self):
        request = ConnectionRequest(pairs=[(0, 1), (1, 2)], lengths=[2, 2], workspace=[3, 4])
        self.assertEqual(request.endpoints, {0, 1, 2})

    def test_verify_bundle_flags_violations(self):
        host = HostGraph.complete(8)
        request = ConnectionRequest(pairs=[(0, 1), (2, 3)], lengths=[2, 2], workspace=list(range(4, 8)))
        cases = {
            "count": PathBundle(paths=[[0, 4, 1]]),
            "length": PathBundle(paths=[[0, 4, 1], [2, 5, 6, 3]]),
            "shared interior": PathBundle(paths=[[0, 4, 1], [2, 4, 3]]),
            "wrong ends": PathBundle(paths=[[0, 4, 1], [3, 5, 2]]),
            "outside workspace": PathBundle(paths=[[0, 2, 1], [2, 5, 3]]),
        }
        for name, bundle in cases.items():
            with self.subTest(name):
                self.assertIsNotNone(verify_bundle(host, request, bundle))
        self.assertIsNone(verify_bundle(host, request, PathBundle(paths=[[0, 4, 1], [2, 5, 3]])))


if __name__ == "__main__":
    unittest.main()
