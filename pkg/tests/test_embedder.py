import unittest

from cycleembed import (
    ConstantsProfile,
    CycleSpec,
    Embedding,
    ExposureLayers,
    HostGraph,
    Layer,
    Phase,
    RandomSeed,
    audit_provenance,
    embed,
    embed_bounded,
    embed_h1,
    embed_h2,
    find_cycle_factor,
    gen_random_graph,
    make_layers,
    verify_embedding,
)
from cycleembed.embedder import expected_phase, layer_probability, phase3_cycle_length
from cycleembed.exceptions import EmbeddingError, FactorError, SpecError
from cycleembed.utils import check_path


class TestExposureLayers(unittest.TestCase):
    def test_union_is_the_host_sample(self):
        for p in (0.0, 0.2, 0.55, 1.0):
            with self.subTest(p=p):
                seed = RandomSeed(seed=11)
                self.assertEqual(make_layers(30, p, seed).union(), gen_random_graph(30, p, seed))

    def test_layer_probability(self):
        self.assertEqual(layer_probability(0), 0)
        self.assertEqual(layer_probability(1), 1)
        for p in (0.1, 0.5, 0.9):
            self.assertAlmostEqual((1 - layer_probability(p)) ** 4, 1 - p)

    def test_full_probability_fills_every_layer(self):
        layers = make_layers(9, 1.0, RandomSeed(seed=0))
        complete = HostGraph.complete(9)
        for name in Layer:
            self.assertEqual(layers.layer(name), complete)
        self.assertEqual(layers.g3, complete)

    def test_coupled_hosts_are_nested(self):
        seed = RandomSeed(seed=3)
        sparse, dense = make_layers(40, 0.2, seed), make_layers(40, 0.6, seed)
        self.assertTrue(sparse.union().is_subgraph_of(dense.union()))

    def test_from_host(self):
        host = gen_random_graph(25, 0.3, RandomSeed(seed=5))
        layers = ExposureLayers.from_host(host, RandomSeed(seed=1, label="layers"))
        self.assertEqual(layers.union(), host)
        self.assertAlmostEqual(layers.p, host.num_edges / 300)
        self.assertEqual(ExposureLayers.from_host(HostGraph(4), RandomSeed(seed=0)).union(), HostGraph(4))

    def test_rejects_bad_probability(self):
        with self.assertRaises(ValueError):
            make_layers(5, 1.5, RandomSeed(seed=0))


class TestFindCycleFactor(unittest.TestCase):
    def test_trivial_and_matching(self):
        self.assertEqual(find_cycle_factor(HostGraph(3), range(3), 1), [[0], [1], [2]])
        path = HostGraph(4, [(0, 1), (1, 2), (2, 3)])
        self.assertEqual(find_cycle_factor(path, range(4), 2), [[0, 1], [2, 3]])

    def test_triangle_factor(self):
        host = HostGraph.complete(9)
        cycles = find_cycle_factor(host, range(9), 3)
        self.assertEqual(sorted(v for cycle in cycles for v in cycle), list(range(9)))
        for cycle in cycles:
            self.assertIsNone(check_path(host, cycle + cycle[:1], 3))

    def test_no_factor(self):
        hexagon = HostGraph(6, [(i, (i + 1) % 6) for i in range(6)])
        with self.assertRaises(FactorError) as context:
            find_cycle_factor(hexagon, range(6), 3)
        self.assertEqual(context.exception.phase, "factor")
        with self.assertRaises(ValueError):
            find_cycle_factor(hexagon, range(6), 4)


class TestEmbedBounded(unittest.TestCase):
    def test_greedy_then_packing(self):
        spec = CycleSpec.from_lengths([3, 4, 1, 3])
        embedding = embed_bounded(HostGraph.complete(11), spec)
        self.assertEqual(embedding.assignment, [10, 4, 5, 6, 7, 8, 9, 0, 1, 2, 3])
        self.assertTrue(verify_embedding(HostGraph.complete(11), spec, embedding))

    def test_isolated_only(self):
        embedding = embed_bounded(HostGraph(5), CycleSpec(n=5, cycles=[1] * 5))
        self.assertEqual(embedding.assignment, [0, 1, 2, 3, 4])
        self.assertIs(embedding.phase, Phase.BOUNDED)

    def test_failures(self):
        with self.subTest("component above K"):
            with self.assertRaises(SpecError):
                embed_bounded(HostGraph.complete(12), CycleSpec.from_lengths([12]), K=9)
        with self.subTest("host too small"):
            with self.assertRaises(EmbeddingError) as context:
                embed_bounded(HostGraph.complete(3), CycleSpec.from_lengths([4]))
            self.assertEqual(context.exception.phase, "bounded")
        with self.subTest("no triangles"):
            with self.assertRaises(FactorError):
                embed_bounded(HostGraph(6), CycleSpec.from_lengths([3, 3]))
        with self.subTest("sparse residual"):
            star = HostGraph(8, [(0, v) for v in range(1, 8)] + [(5, 6), (6, 7), (5, 7)])
            with self.assertRaises(EmbeddingError):
                embed_bounded(star, CycleSpec.from_lengths([4, 3, 1]))


class TestPipeline(unittest.TestCase):
    def setUp(self):
        self.profile = ConstantsProfile.practical(K=9)

    def check(self, layers, spec, embedding):
        self.assertTrue(verify_embedding(layers.union(), spec, embedding))

    def test_first_family(self):
        spec = CycleSpec.from_lengths([12, 2, 2, 2, 2])
        layers = make_layers(20, 1.0, RandomSeed(seed=0))
        embedding = embed_h1(layers, spec, self.profile)
        self.assertIs(embedding.phase, Phase.H1)
        self.check(layers, spec, embedding)

    def test_second_family_with_edges(self):
        spec = CycleSpec.from_lengths([10] + [2] * 45)
        layers = make_layers(100, 1.0, RandomSeed(seed=0))
        embedding = embed_h2(layers, spec, self.profile)
        self.assertIs(embedding.phase, Phase.H2)
        self.check(layers, spec, embedding)

    def test_second_family_with_isolated_vertices(self):
        spec = CycleSpec.from_lengths([10] + [1] * 90)
        layers = make_layers(100, 1.0, RandomSeed(seed=0))
        embedding = embed_h2(layers, spec, self.profile)
        self.check(layers, spec, embedding)

    def test_phase_one_copy_is_shared(self):
        layers = make_layers(100, 1.0, RandomSeed(seed=0))
        embed_h2(layers, CycleSpec.from_lengths([10] + [2] * 45), self.profile)
        self.assertIn("2x50", layers.copies)
        copy = layers.copies["2x50"]
        embed_h2(layers, CycleSpec.from_lengths([12] + [2] * 44), self.profile)
        self.assertIs(layers.copies["2x50"], copy)

    def test_expected_phase(self):
        cases = {
            Phase.BOUNDED: [3, 3, 2],
            Phase.H1: [12, 2, 2, 2, 2],
            Phase.H2: [10] + [2] * 45,
        }
        for phase, lengths in cases.items():
            with self.subTest(phase=phase):
                self.assertIs(expected_phase(CycleSpec.from_lengths(lengths), self.profile), phase)

    def test_embed_dispatches_and_tags(self):
        for lengths, n in (([3, 3, 2], 8), ([12, 2, 2, 2, 2], 20), ([10] + [2] * 45, 100)):
            with self.subTest(lengths=lengths[:2]):
                spec = CycleSpec.from_lengths(lengths)
                layers = make_layers(n, 1.0, RandomSeed(seed=1))
                embedding = embed(layers, spec, self.profile)
                self.assertIs(embedding.phase, expected_phase(spec, self.profile))
                self.assertEqual(embedding.retries, 0)
                self.assertEqual(len(embedding.edge_provenance), len(spec.target_edges()))
                self.assertIsNone(audit_provenance(layers, embedding))

    def test_embed_errors(self):
        layers = make_layers(6, 0.0, RandomSeed(seed=0))
        with self.subTest("outside the family"):
            with self.assertRaises(SpecError):
                embed(layers, CycleSpec.from_lengths([4, 2]), ConstantsProfile.practical(ell=5))
        with self.subTest("size mismatch"):
            with self.assertRaises(EmbeddingError) as context:
                embed(layers, CycleSpec.from_lengths([3]), self.profile)
            self.assertEqual(context.exception.phase, Phase.VALIDATE.value)
        with self.subTest("every attempt fails"):
            with self.assertRaises(EmbeddingError) as context:
                embed(layers, CycleSpec.from_lengths([3, 3]), self.profile)
            self.assertEqual(context.exception.phase, "bounded")


class TestSparseHosts(unittest.TestCase):
    def test_successful_embeddings_verify(self):
        profile = ConstantsProfile.practical(K=9, retries=1, search_budget=20_000)
        cases = [([3, 3, 2], 8), ([12, 2, 2, 2, 2], 20), ([30], 30), ([20, 2, 2, 2, 2, 2], 30)]
        for p in (0.9, 0.7):
            for lengths, n in cases:
                for seed in range(3):
                    with self.subTest(p=p, lengths=lengths, seed=seed):
                        spec = CycleSpec.from_lengths(lengths)
                        layers = make_layers(n, p, RandomSeed(seed=seed))
                        try:
                            embedding = embed(layers, spec, profile, RandomSeed(seed=seed, label="embed"))
                        except EmbeddingError as error:
                            self.assertNotIn("invalid embedding", str(error))
                            continue
                        self.assertTrue(verify_embedding(layers.union(), spec, embedding))
                        self.assertIsNone(audit_provenance(layers, embedding))
                        self.assertEqual(len(embedding.edge_provenance), len(spec.target_edges()))


class TestChecks(unittest.TestCase):
    def test_phase3_cycle_length(self):
        self.assertEqual(phase3_cycle_length(5, 0, 2), 10)
        self.assertEqual(phase3_cycle_length(7, 1, 3), 19)
        self.assertEqual(phase3_cycle_length(9, 1, 3, closing_halves=True), 19)

    def test_verify_embedding(self):
        spec = CycleSpec.from_lengths([2, 2])
        embedding = Embedding(spec=spec, assignment=[0, 1, 2, 3])
        self.assertTrue(verify_embedding(HostGraph.complete(4), spec, embedding))
        cases = {
            "missing edge": (HostGraph(4, [(0, 1)]), spec, embedding),
            "other spec": (HostGraph.complete(4), CycleSpec.from_lengths([4]), embedding),
            "stray image": (HostGraph.complete(3), spec, embedding),
        }
        for name, (host, target, candidate) in cases.items():
            with self.subTest(name):
                verdict = verify_embedding(host, target, candidate)
                self.assertFalse(verdict)
                self.assertIsNotNone(verdict.violation)

    def test_audit_provenance(self):
        layers = ExposureLayers.from_masks(4, [(0, 1), (2, 3)], [1, 2], 0.5, layer_probability(0.5))
        spec = CycleSpec.from_lengths([2, 2])
        good = Embedding(spec=spec, assignment=[0, 1, 2, 3], edge_provenance=[Layer.G1, Layer.G2])
        self.assertIsNone(audit_provenance(layers, good))
        wrong = Embedding(spec=spec, assignment=[0, 1, 2, 3], edge_provenance=[Layer.G2, Layer.G2])
        self.assertEqual(audit_provenance(layers, wrong), "edge 0-1 is not in G2")
        short = Embedding(spec=spec, assignment=[0, 1, 2, 3], edge_provenance=[Layer.G1])
        self.assertIsNotNone(audit_provenance(layers, short))


if __name__ == "__main__":
    unittest.main()
