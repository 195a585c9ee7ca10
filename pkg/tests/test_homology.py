import itertools
import math
import random
import unittest

import networkx as nx
from dotenv import load_dotenv
from sympy import Matrix

from mcp_hyperplanes.complexes import SimplicialComplex, combine, join_complex
from mcp_hyperplanes.graph_core import GuardExceeded, from_networkx
from mcp_hyperplanes.homology import (
    HomologyGroup,
    IntegerMatrix,
    SignatureMismatch,
    boundary_matrices,
    compare_wedge_supports,
    dense_smith,
    euler_characteristic,
    homology,
    same_homology,
    simplify,
    smith_normal_form,
    wedge_support,
)
from mcp_hyperplanes.mcp_env import get_config, reset_config

load_dotenv()

# Six-vertex triangulation of the real projective plane
PROJECTIVE_PLANE = [
    (1, 2, 4), (1, 2, 6), (1, 3, 5), (1, 3, 6), (1, 4, 5),
    (2, 3, 4), (2, 3, 5), (2, 5, 6), (3, 4, 6), (4, 5, 6),
]


def complex_of(faces):
    return SimplicialComplex.from_faces([[f"v{i}" for i in face] for face in faces])


def sphere(k):
    """Boundary of the (k+1)-simplex."""
    return complex_of(itertools.combinations(range(k + 2), k + 1))


def oracle_factors(dense):
    """Invariant factors from determinantal divisors: d_k is the gcd of all k x k minors."""
    m = Matrix(dense)
    rows, cols = m.shape
    factors, previous = [], 1
    for k in range(1, min(rows, cols) + 1):
        divisor = 0
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                divisor = math.gcd(divisor, int(m.extract(list(r), list(c)).det()))
        if divisor == 0:
            break
        factors.append(divisor // previous)
        previous = divisor
    return tuple(factors)


class TestSmithNormalForm(unittest.TestCase):
    def test_coprime_diagonal(self):
        """diag(2, 3) has invariant factors 1 and 6."""
        form = smith_normal_form(IntegerMatrix.from_dense([[2, 0], [0, 3]]))
        self.assertEqual(form.invariant_factors, (1, 6))
        self.assertEqual(form.rank, 2)

    def test_textbook_matrix(self):
        dense = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
        form = smith_normal_form(IntegerMatrix.from_dense(dense))
        self.assertEqual(form.invariant_factors, (2, 6, 12))

    def test_agrees_with_determinantal_divisors(self):
        rng = random.Random(5)
        for _ in range(25):
            rows, cols = rng.randint(1, 4), rng.randint(1, 4)
            dense = [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
            form = smith_normal_form(IntegerMatrix.from_dense(dense))
            self.assertEqual(form.invariant_factors, oracle_factors(dense), dense)

    def test_dense_transforms_reproduce_diagonal(self):
        M = IntegerMatrix.from_dense([[4, 6], [6, 9], [2, 3]])
        D, P, Q = dense_smith(M)
        product = IntegerMatrix.from_dense(P) @ M @ IntegerMatrix.from_dense(Q)
        self.assertEqual(product.to_dense(), D)
        self.assertEqual([D[0][0], D[1][1]], [1, 0])

    def test_zero_entries_are_dropped(self):
        M = IntegerMatrix(2, 2, {(0, 0): 0, (1, 1): 5})
        self.assertEqual(M.entries, {(1, 1): 5})
        self.assertEqual(smith_normal_form(IntegerMatrix(0, 3)).rank, 0)


class TestBoundaries(unittest.TestCase):
    def test_boundary_of_triangle(self):
        d = boundary_matrices(complex_of([(0, 1, 2)]))
        self.assertEqual([(m.rows, m.cols) for m in d], [(0, 3), (3, 3), (3, 1)])
        self.assertTrue((d[1] @ d[2]).is_zero())


class TestHomology(unittest.TestCase):
    def test_projective_plane_has_two_torsion(self):
        signature = homology(complex_of(PROJECTIVE_PLANE))
        self.assertEqual(signature.groups[0], HomologyGroup(betti=1))
        self.assertEqual(signature.groups[1], HomologyGroup(betti=0, torsion=(2,)))
        self.assertTrue(signature.groups[2].is_trivial())
        self.assertEqual(signature.render()[1], "H_1 = Z/2")
        self.assertEqual(euler_characteristic(complex_of(PROJECTIVE_PLANE)), 1)

    def test_spheres(self):
        """The boundary of a simplex has reduced homology Z in its top degree only."""
        for k in range(1, 4):
            signature = homology(sphere(k), reduced=True)
            self.assertEqual(signature.betti, (0,) * k + (1,))
            self.assertTrue(all(not g.torsion for g in signature.groups))

    def test_simplex_is_acyclic(self):
        signature = homology(complex_of([(0, 1, 2, 3)]), reduced=True)
        self.assertTrue(signature.is_acyclic())

    def test_unreduced_point(self):
        signature = homology(complex_of([(0,)]))
        self.assertEqual(signature.render(), ["H_0 = Z"])

    def test_nerve_simplification_keeps_homology(self):
        K = complex_of([(0, 1, 2), (2, 3), (3, 4), (4, 0)])
        self.assertEqual(
            homology(K, use_nerve=False).normalized(), homology(simplify(K)).normalized()
        )
        self.assertEqual(homology(K).betti, (1, 1, 0))

    def test_pentagon_join_complex_is_a_circle(self):
        """The maximal joins of C5 glue into a Moebius band."""
        K = join_complex(from_networkx(nx.cycle_graph(5)))
        signature = homology(K, reduced=True)
        self.assertEqual(signature.render()[:2], ["H~_0 = 0", "H~_1 = Z"])

    def test_face_guard(self):
        reset_config()
        get_config().override(face_guard=5)
        try:
            with self.assertRaises(GuardExceeded):
                homology(sphere(3), use_nerve=False)
        finally:
            reset_config()

    def test_reduced_and_unreduced_do_not_compare(self):
        K = complex_of([(0, 1)])
        with self.assertRaises(SignatureMismatch):
            same_homology(homology(K), homology(K, reduced=True))

    def test_empty_complex(self):
        self.assertEqual(homology(SimplicialComplex.from_faces([])).groups, ())


class TestWedgeSupports(unittest.TestCase):
    def test_circle_and_point_are_distinguished_in_degree_one(self):
        circle = wedge_support(homology(sphere(1), reduced=True))
        point = wedge_support(homology(complex_of([(0,)]), reduced=True))
        verdict = compare_wedge_supports(circle, point)
        self.assertTrue(verdict.distinguished)
        self.assertEqual(verdict.differing_degrees, (1,))

    def test_torsion_is_split_into_prime_powers(self):
        support = wedge_support(homology(complex_of(PROJECTIVE_PLANE), reduced=True))
        self.assertEqual(support.degrees[1].elementary_divisors, frozenset({2}))
        self.assertFalse(support.degrees[1].has_free)

    def test_ranks_do_not_matter(self):
        """Free rank is collapsed to presence: one circle and two circles look alike."""
        one = wedge_support(homology(sphere(1), reduced=True))
        figure_eight = complex_of([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
        two = wedge_support(homology(figure_eight, reduced=True))
        self.assertFalse(compare_wedge_supports(one, two).distinguished)

    def test_disjoint_union_adds_homology(self):
        """Components add up in degree 0 and higher groups are direct sums."""
        circle, plane = sphere(1), complex_of(PROJECTIVE_PLANE)
        union = homology(combine("disjoint_union", [circle, plane]))
        self.assertEqual(union.groups[0].betti, 2)
        self.assertEqual(union.groups[1], HomologyGroup(betti=1, torsion=(2,)))
        self.assertEqual(len(union.normalized()), 2)

    def test_union_and_wedge_differ_only_in_degree_zero(self):
        parts = [
            SimplicialComplex.from_faces(K.facets, basepoint="v1")
            for K in (sphere(1), complex_of(PROJECTIVE_PLANE))
        ]
        union = wedge_support(homology(combine("disjoint_union", parts), reduced=True))
        wedge = wedge_support(homology(combine("wedge", parts), reduced=True))
        verdict = compare_wedge_supports(union, wedge)
        self.assertEqual(verdict.differing_degrees, (0,))

    def test_unreduced_signature_rejected(self):
        with self.assertRaises(SignatureMismatch):
            wedge_support(homology(sphere(1)))


if __name__ == "__main__":
    unittest.main()
