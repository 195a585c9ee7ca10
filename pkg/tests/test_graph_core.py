import unittest

import networkx as nx
from dotenv import load_dotenv

from mcp_hyperplanes.graph_core import (
    GraphError,
    GuardExceeded,
    blocks,
    build_graph,
    cartesian_product,
    complete_graph,
    are_isomorphic,
    from_networkx,
    join_decomposition,
    maximal_cliques,
    maximal_joins,
    neighborhood,
    verify_isomorphism,
)
from mcp_hyperplanes.mcp_env import reset_config

load_dotenv()


def path(*labels):
    return build_graph(labels, zip(labels, labels[1:]))


def cycle(*labels):
    return build_graph(labels, zip(labels, labels[1:] + labels[:1]))


class TestGraphBasics(unittest.TestCase):
    def test_build_graph_rejects_bad_input(self):
        """Duplicate labels, loops and unknown endpoints are input errors."""
        with self.assertRaises(GraphError):
            build_graph(["a", "a"], [])
        with self.assertRaises(GraphError):
            build_graph(["a", "b"], [("a", "a")])
        with self.assertRaises(GraphError):
            build_graph(["a"], [("a", "z")])

    def test_canonical_order_follows_input(self):
        """Vertex order is the input order and drives the edge list."""
        g = build_graph(["c", "a", "b"], [("b", "a"), ("a", "c")])
        self.assertEqual(g.vertices, ("c", "a", "b"))
        self.assertEqual(g.edge_list, (("c", "a"), ("a", "b")))
        self.assertEqual(g.ordered({"b", "c"}), ("c", "b"))

    def test_neighborhoods(self):
        """Link excludes the vertex, star includes it."""
        g = path("a", "b", "c")
        self.assertEqual(neighborhood(g, "b"), frozenset({"a", "c"}))
        self.assertEqual(neighborhood(g, "a", "star"), frozenset({"a", "b"}))
        with self.assertRaises(ValueError):
            neighborhood(g, "a", "ball")

    def test_induced_subgraph_unknown_vertex(self):
        g = path("a", "b", "c")
        self.assertEqual(len(g.induced({"a", "b"}).edges), 1)
        with self.assertRaises(GraphError):
            g.induced({"a", "q"})


class TestJoins(unittest.TestCase):
    def test_square_is_a_single_join(self):
        """C4 splits as {a,c} * {b,d} and is its own maximal join."""
        c4 = cycle("a", "b", "c", "d")
        decomposition = join_decomposition(c4, c4.vertices)
        self.assertEqual(decomposition.parts, (frozenset("ac"), frozenset("bd")))
        self.assertEqual(maximal_joins(c4), [frozenset("abcd")])

    def test_path_maximal_joins(self):
        """P4 has two maximal joins, the two induced paths of length two."""
        p4 = path("a", "b", "c", "d")
        self.assertIsNone(join_decomposition(p4, p4.vertices))
        self.assertEqual(maximal_joins(p4), [frozenset("abc"), frozenset("bcd")])

    def test_pentagon_maximal_joins(self):
        """Every maximal join of C5 is a vertex with its two neighbours."""
        c5 = cycle("a", "b", "c", "d", "e")
        joins = maximal_joins(c5)
        self.assertEqual(len(joins), 5)
        self.assertIn(frozenset("eab"), joins)

    def test_single_vertex_join_is_trivial(self):
        g = path("a", "b")
        self.assertTrue(join_decomposition(g, {"a"}).trivial)

    def test_disconnected_input(self):
        g = build_graph(["a", "b"], [])
        with self.assertRaises(GraphError):
            maximal_joins(g)


class TestStructure(unittest.TestCase):
    def test_maximal_cliques_of_triangle_with_tail(self):
        g = build_graph("abcd", [("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")])
        self.assertEqual(maximal_cliques(g), [frozenset("abc"), frozenset("cd")])

    def test_blocks_of_path(self):
        """A path of three vertices has two blocks glued at its middle vertex."""
        decomposition = blocks(path("a", "b", "c"))
        self.assertEqual(decomposition.blocks, (frozenset("ab"), frozenset("bc")))
        self.assertEqual(decomposition.cut_vertices, frozenset("b"))

    def test_cartesian_product_of_edges_is_square(self):
        square = cartesian_product([complete_graph(2), complete_graph(2)])
        self.assertEqual(len(square), 4)
        self.assertEqual(len(square.edges), 4)
        self.assertIsNotNone(are_isomorphic(square, from_networkx(nx.cycle_graph(4))))

    def test_verify_isomorphism_checks_edges(self):
        g1 = path("a", "b", "c")
        g2 = path("x", "y", "z")
        self.assertTrue(verify_isomorphism(g1, g2, {"a": "x", "b": "y", "c": "z"}))
        self.assertFalse(verify_isomorphism(g1, g2, {"a": "y", "b": "x", "c": "z"}))

    def test_isomorphism_guard(self):
        """Exact isomorphism search refuses graphs above the configured guard."""
        reset_config()
        big = from_networkx(nx.path_graph(40))
        with self.assertRaises(GuardExceeded):
            are_isomorphic(big, big)


if __name__ == "__main__":
    unittest.main()
