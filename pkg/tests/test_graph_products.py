import unittest

from dotenv import load_dotenv

from mcp_hyperplanes.graph_core import GraphError, GuardExceeded, build_graph
from mcp_hyperplanes.graph_products import (
    GPPresentation,
    PresentationError,
    cic_fragment,
    cic_simplex_test,
    conjugate_parabolic_intersection,
    coset_canonical,
    double_coset_reduce,
    edge_label,
    elements_up_to,
    gp_hyperplane,
    hyperplane_crosses_coset,
    inverse,
    multiply,
    parabolic_is_infinite,
    parse_word,
    qm_ball,
    reduce,
    same_coset,
)

load_dotenv()


def path_raag():
    """Right-angled Artin group on the path a - b - c - d."""
    graph = build_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    return GPPresentation.raag(graph)


def finite(orders: dict, edges):
    return GPPresentation.from_orders(build_graph(orders, edges), orders)


class TestPresentations(unittest.TestCase):
    def test_order_one_is_rejected(self):
        graph = build_graph("ab", [("a", "b")])
        with self.assertRaises(PresentationError):
            GPPresentation(graph, (1, 0))
        with self.assertRaises(PresentationError):
            GPPresentation.from_orders(graph, {"a": 2})

    def test_unknown_vertex(self):
        with self.assertRaises(PresentationError):
            path_raag().order("z")
        with self.assertRaises(PresentationError):
            parse_word(path_raag(), "a.z")


class TestNormalForms(unittest.TestCase):
    def setUp(self):
        self.pres = path_raag()

    def test_commuting_letters_are_sorted(self):
        """Adjacent vertices commute and are written in vertex order."""
        self.assertEqual(reduce(self.pres, [("b", 1), ("a", 1)]).render(), "a.b")
        self.assertEqual(reduce(self.pres, [("c", 1), ("a", 1)]).render(), "c.a")

    def test_cancellation_across_commuting_letters(self):
        self.assertEqual(parse_word(self.pres, "a^2.b.a^-2").render(), "b")
        self.assertTrue(parse_word(self.pres, "a.b.b^-1.a^-1").is_identity())
        self.assertEqual(parse_word(self.pres, "1").render(), "1")

    def test_group_laws_on_examples(self):
        x, y, z = (parse_word(self.pres, w) for w in ("a.c", "c^-1.d", "b^3"))
        self.assertEqual(multiply(self.pres, multiply(self.pres, x, y), z),
                         multiply(self.pres, x, multiply(self.pres, y, z)))
        self.assertTrue(multiply(self.pres, x, inverse(self.pres, x)).is_identity())
        self.assertEqual(multiply(self.pres, x, y).render(), "a.d")

    def test_finite_vertex_group_wraps_exponents(self):
        pres = finite({"a": 3}, [])
        self.assertEqual(parse_word(pres, "a.a.a.a").render(), "a")
        self.assertEqual(inverse(pres, parse_word(pres, "a")).render(), "a^2")


class TestCosets(unittest.TestCase):
    def setUp(self):
        self.pres = path_raag()

    def test_canonical_representative_strips_the_right_end(self):
        coset = coset_canonical(self.pres, parse_word(self.pres, "a.c"), {"c", "d"})
        self.assertEqual(coset.render(), "a<c,d>")

    def test_same_coset(self):
        g = parse_word(self.pres, "a.c")
        self.assertTrue(same_coset(self.pres, g, parse_word(self.pres, "a"), {"c", "d"}))
        self.assertFalse(same_coset(self.pres, g, parse_word(self.pres, "c"), {"c", "d"}))

    def test_double_coset_reduce(self):
        k = parse_word(self.pres, "a.d")
        a, m, b = double_coset_reduce(self.pres, {"a", "b"}, k, {"c", "d"})
        self.assertEqual((a.render(), m.render(), b.render()), ("a", "1", "d"))

    def test_conjugate_parabolic_intersection(self):
        """<a,b,c> meets d<b,c,d>d^-1 in <b,c>."""
        identity = self.pres.identity()
        d = parse_word(self.pres, "d")
        p, core = conjugate_parabolic_intersection(
            self.pres, identity, {"a", "b", "c"}, d, {"b", "c", "d"}
        )
        self.assertTrue(p.is_identity())
        self.assertEqual(core, frozenset("bc"))

    def test_simplex_test(self):
        identity = self.pres.identity()
        first = coset_canonical(self.pres, identity, {"a", "b", "c"})
        second = coset_canonical(self.pres, identity, {"b", "c", "d"})
        third = coset_canonical(self.pres, identity, {"a", "b"})
        fourth = coset_canonical(self.pres, identity, {"c", "d"})
        self.assertTrue(cic_simplex_test(self.pres, [first, second]))
        self.assertFalse(cic_simplex_test(self.pres, [third, fourth]))

    def test_finite_cliques_span_finite_subgroups(self):
        pres = finite({"a": 2, "b": 3}, [("a", "b")])
        self.assertFalse(parabolic_is_infinite(pres, {"a", "b"}))
        self.assertTrue(parabolic_is_infinite(path_raag(), {"a"}))

    def test_hyperplane_crossing(self):
        H = gp_hyperplane(self.pres, self.pres.identity(), "b")
        self.assertEqual(H.carrier.render(), "1<a,b,c>")
        crossing = coset_canonical(self.pres, self.pres.identity(), {"b", "c", "d"})
        missing = coset_canonical(self.pres, self.pres.identity(), {"c", "d"})
        self.assertTrue(hyperplane_crosses_coset(self.pres, H, crossing))
        self.assertFalse(hyperplane_crosses_coset(self.pres, H, missing))


class TestBalls(unittest.TestCase):
    def test_elements_of_a_finite_cyclic_group(self):
        pres = finite({"a": 3}, [])
        self.assertEqual(len(elements_up_to(pres, 1)), 3)
        self.assertEqual(len(elements_up_to(pres, 4)), 3)

    def test_element_guard(self):
        with self.assertRaises(GuardExceeded):
            elements_up_to(path_raag(), 5, guard=10)

    def test_triangle_ball(self):
        ball = qm_ball(finite({"a": 3}, []), 1)
        self.assertEqual(len(ball.graph), 3)
        self.assertEqual(len(ball.graph.edges), 3)

    def test_product_ball_is_prism(self):
        """Z/2 x Z/3 has the prism K2 x K3 as Cayley graph."""
        ball = qm_ball(finite({"a": 2, "b": 3}, [("a", "b")]), 2)
        self.assertEqual(len(ball.graph), 6)
        self.assertEqual(len(ball.graph.edges), 9)
        self.assertEqual(ball.trust_radius, 0)

    def test_free_product_ball_is_a_path(self):
        ball = qm_ball(finite({"a": 2, "b": 2}, []), 3)
        self.assertEqual(len(ball.graph), 7)
        self.assertEqual(len(ball.graph.edges), 6)
        self.assertTrue(ball.graph.is_connected())

    def test_ball_needs_finite_groups(self):
        with self.assertRaises(PresentationError):
            qm_ball(path_raag(), 2)

    def test_edge_label(self):
        pres = path_raag()
        x, y = parse_word(pres, "a"), parse_word(pres, "a.c")
        self.assertEqual(edge_label(pres, x, y), "c")
        with self.assertRaises(PresentationError):
            edge_label(pres, x, parse_word(pres, "c.d"))


class TestFragments(unittest.TestCase):
    def test_maximal_joins_at_radius_zero(self):
        fragment = cic_fragment(path_raag(), "maximal-joins", radius=0)
        self.assertTrue(fragment.is_fragment)
        self.assertEqual([c.render() for c in fragment.vertices], ["1<a,b,c>", "1<b,c,d>"])
        self.assertEqual(fragment.simplices, ((0, 1),))

    def test_maximal_cliques_form_a_path(self):
        fragment = cic_fragment(path_raag(), "maximal-cliques", radius=0)
        self.assertEqual(fragment.simplices, ((0, 1), (1, 2)))
        self.assertEqual(fragment.to_complex().vertices[0], "coset:0000")

    def test_fragment_input_errors(self):
        with self.assertRaises(ValueError):
            cic_fragment(path_raag(), "maximal-stars", radius=0)
        disconnected = GPPresentation.raag(build_graph("ab", []))
        with self.assertRaises(GraphError):
            cic_fragment(disconnected, "maximal-cliques", radius=0)


if __name__ == "__main__":
    unittest.main()
