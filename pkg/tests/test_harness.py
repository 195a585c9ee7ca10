import unittest
from dataclasses import replace

import networkx as nx
from dotenv import load_dotenv

from mcp_hyperplanes.graph_core import GraphError, build_graph, from_networkx
from mcp_hyperplanes.graph_products import GPPresentation
from mcp_hyperplanes.harness import (
    FAIL,
    FAMILY_NAMES,
    PASS,
    SKIPPED,
    CheckResult,
    CorpusSpec,
    check_good_prisms,
    check_prism_absorption,
    domination_witness,
    raag_verdict,
    run_corpus,
    serialize,
    verify_graph,
    verify_presentation,
    verify_with_named_families,
)
from mcp_hyperplanes.qm_engine import (
    PreconditionError,
    hamming,
    load_quasi_median,
    maximal_prisms,
)

load_dotenv()


def cycle(n):
    return from_networkx(nx.cycle_graph(n))


def path(n):
    return from_networkx(nx.path_graph(n))


def with_carrier(X, j, carrier):
    """Replace the cached carrier of hyperplane `j`."""
    X._geometry[j] = replace(X.hyperplane(j), carrier=frozenset(carrier))
    return X


class TestGraphVerification(unittest.TestCase):
    def test_square_passes_with_every_family(self):
        report = verify_with_named_families(hamming([2, 2]), FAMILY_NAMES, "square")
        self.assertTrue(report.passed, report.failures)
        ids = [c.check_id for c in report.checks]
        self.assertEqual(ids[0], "validation")
        self.assertIn("skewering[canonical-star]", ids)
        self.assertIn("axioms.distance", ids)

    def test_path_passes(self):
        report = verify_with_named_families(load_quasi_median(path(5)), ["canonical-star"])
        self.assertTrue(report.passed, report.failures)
        relcont = next(c for c in report.checks if c.check_id == "relcont.model[canonical-star]")
        self.assertEqual(relcont.status, SKIPPED)

    def test_rejected_graph_reports_validation_failure(self):
        """K_{2,3} is not quasi-median; the report carries one failed validation check."""
        X = load_quasi_median(from_networkx(nx.complete_bipartite_graph(2, 3)))
        report = verify_graph(X)
        self.assertFalse(report.passed)
        self.assertEqual([(c.check_id, c.status) for c in report.checks], [("validation", FAIL)])

    def test_check_serialization_hides_timings(self):
        check = CheckResult("axioms.helly", PASS, seconds=1.5)
        self.assertEqual(check.to_dict(), {"check": "axioms.helly", "status": PASS})
        self.assertEqual(check.to_dict(timings=True)["seconds"], 1.5)

    def test_grid_prisms_extend_inside_carriers(self):
        """Edges of the grid lie in carriers they are not crossed by and extend to squares."""
        report = verify_graph(load_quasi_median(from_networkx(nx.grid_2d_graph(3, 3))))
        checks = {c.check_id: c for c in report.checks}
        self.assertEqual(checks["axioms.prism_absorption"].status, PASS)
        self.assertEqual(checks["axioms.good_prism"].status, PASS)
        self.assertNotEqual(checks["axioms.good_prism"].message, "0 extensions found")

    def test_serialize_sorts_sets(self):
        self.assertEqual(serialize({"b", "a"}), ["a", "b"])
        self.assertEqual(serialize({"k": (1, 2)}), {"k": [1, 2]})


class TestPrismChecks(unittest.TestCase):
    def test_absorption_fails_on_a_shrunken_carrier(self):
        X = hamming([2, 2])
        prisms = maximal_prisms(X)
        self.assertEqual(check_prism_absorption(X, prisms).status, PASS)
        j = prisms[0].hyperplanes[0]
        with_carrier(X, j, X.carrier(j) - {X.graph.vertices[0]})
        result = check_prism_absorption(X, prisms)
        self.assertEqual(result.status, FAIL)
        self.assertEqual(result.witness[1], j)

    def test_good_prism_fails_when_a_carrier_swallows_a_parallel_edge(self):
        """On a path, an edge placed inside the carrier of the next edge cannot extend."""
        X = load_quasi_median(path(3))
        prisms = maximal_prisms(X)
        self.assertEqual(check_good_prisms(X, prisms).status, PASS)
        with_carrier(X, X.hyperplane_of(1, 2), X.graph.vertices)
        result = check_good_prisms(X, prisms)
        self.assertEqual(result.status, FAIL)
        self.assertEqual(result.witness[0], [0, 1])


class TestCorpus(unittest.TestCase):
    def test_empty_corpus_passes(self):
        report = run_corpus(CorpusSpec.empty())
        self.assertTrue(report.passed)
        self.assertEqual(report.entries, ())

    def test_corpus_is_deterministic(self):
        spec = CorpusSpec(seed=3, count=2, max_vertices=30, steps=2, named=False)
        first, second = run_corpus(spec), run_corpus(spec)
        self.assertEqual(first.to_dict(), second.to_dict())
        self.assertEqual(len(first.entries), 2)

    def test_generated_corpus_passes(self):
        report = run_corpus(CorpusSpec(seed=5, count=3, max_vertices=40, steps=2, named=False))
        self.assertTrue(report.passed, report.to_dict())
        self.assertEqual(report.failures, 0)
        checked = [e for e in report.entries if e.report is not None]
        self.assertTrue(checked)

    def test_unknown_family_name(self):
        with self.assertRaises(ValueError):
            run_corpus(CorpusSpec(count=0, named=False, families=("stars",)))


class TestRaagComparison(unittest.TestCase):
    def test_square_and_pentagon_are_distinguished(self):
        """The join complex of C4 is a simplex; that of C5 carries a circle."""
        verdict = raag_verdict(cycle(4), cycle(5))
        self.assertTrue(verdict.distinguished)
        self.assertEqual(verdict.verdict, "distinguished: not quasi-isometric")
        self.assertEqual(verdict.differing_degrees, (1,))

    def test_same_graph_is_not_distinguished(self):
        verdict = raag_verdict(cycle(5), cycle(5), "commensurability")
        self.assertFalse(verdict.distinguished)
        self.assertEqual(verdict.verdict, "not distinguished by this invariant")

    def test_flag_invariant_refuses_dominated_pairs(self):
        with self.assertRaises(PreconditionError) as ctx:
            raag_verdict(path(4), cycle(5), "flag")
        self.assertEqual(len(ctx.exception.witness), 2)
        self.assertIsNone(domination_witness(cycle(5)))

    def test_bad_input(self):
        with self.assertRaises(GraphError):
            raag_verdict(build_graph("ab", []), cycle(5))
        with self.assertRaises(ValueError):
            raag_verdict(cycle(5), cycle(5), "growth")


class TestPresentationVerification(unittest.TestCase):
    def test_finite_product(self):
        """Z/2 x Z/3 passes the word checks and the Cayley ball checks."""
        gamma = build_graph("ab", [("a", "b")])
        pres = GPPresentation.from_orders(gamma, {"a": 2, "b": 3})
        report = verify_presentation(pres, radius=3, samples=20, seed=1)
        self.assertTrue(report.passed, report.failures)
        statuses = {c.check_id: c.status for c in report.checks}
        self.assertEqual(statuses["gp.cic_agreement"], SKIPPED)
        self.assertEqual(statuses["gp.ball_cliques"], PASS)

    def test_path_raag(self):
        gamma = build_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
        report = verify_presentation(GPPresentation.raag(gamma), samples=10, seed=2)
        self.assertTrue(report.passed, report.failures)
        statuses = {c.check_id: c.status for c in report.checks}
        self.assertEqual(statuses["gp.group_laws"], PASS)
        self.assertEqual(statuses["gp.ball_labels"], SKIPPED)

    def test_ball_without_cut_vertices_inside_trust_radius(self):
        """Z/2 x (Z/2 * Z/2) on the path a - b - c has a 2-connected Cayley graph."""
        gamma = build_graph("abc", [("a", "b"), ("b", "c")])
        pres = GPPresentation.from_orders(gamma, {"a": 2, "b": 2, "c": 2})
        report = verify_presentation(pres, radius=3, samples=10, seed=3)
        statuses = {c.check_id: c.status for c in report.checks}
        self.assertEqual(statuses["gp.ball_two_connected"], PASS)

    def test_ball_connectivity_skipped_for_free_products(self):
        pres = GPPresentation.from_orders(build_graph("ab", []), {"a": 2, "b": 2})
        report = verify_presentation(pres, radius=3, samples=10, seed=3)
        statuses = {c.check_id: c.status for c in report.checks}
        self.assertEqual(statuses["gp.ball_two_connected"], SKIPPED)


if __name__ == "__main__":
    unittest.main()
