"""Hyperplanes of finite quasi-median graphs and the gated-subgraph calculus around them.

A hyperplane is a class of the finest equivalence on edges that identifies the edges of
a triangle and the opposite edges of a 4-cycle. Everything else in this module (carriers,
sectors, fibres, gates, prisms) is derived from that partition and from BFS distances.
"""

import itertools
import logging
import math
import random
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional

import networkx as nx
from networkx.utils import UnionFind

from .graph_core import (
    Graph,
    GraphError,
    GuardExceeded,
    cartesian_product,
    complete_graph,
    maximal_cliques,
    vertex_label,
    verify_isomorphism,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_DISTANCE_LIMIT = 200
SAMPLED_DISTANCE_PAIRS = 20_000


class NotGatedError(ValueError):
    def __init__(self, message: str, witness: tuple):
        super().__init__(message)
        self.witness = witness


class ValidationMissing(RuntimeError):
    """The operation needs a graph that passed validate_quasi_median."""


class PreconditionError(ValueError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class AmalgamError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """A structural fact that holds on every quasi-median graph failed to hold."""

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Hyperplane:
    id: int
    edges: frozenset
    carrier: Optional[frozenset] = None
    sectors: Optional[tuple] = None
    fibres: Optional[tuple] = None

    @property
    def label(self) -> str:
        return f"J{self.id}"


@dataclass(frozen=True)
class PairClass:
    relation: str
    in_contact: bool
    contiguous: bool


@dataclass(frozen=True)
class Prism:
    vertices: frozenset
    factors: tuple
    hyperplanes: tuple

    @property
    def dimension(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple = ()

    def first(self, kind: str) -> Optional[Violation]:
        return next((v for v in self.violations if v.kind == kind), None)


@dataclass(frozen=True)
class GatedVerdict:
    gated: bool
    reason: Optional[str] = None
    witness: tuple = ()


@dataclass(frozen=True)
class CarrierDecomposition:
    origin: object
    hyperplanes: tuple
    fibre: frozenset
    cliques: tuple
    mapping: dict = field(compare=False)


@dataclass(frozen=True)
class QMGraph:
    """A graph together with its hyperplane partition.

    Geometry of individual hyperplanes is computed on first access and published into a
    private cache; recomputation yields the same value, so concurrent first access is safe.
    """

    graph: Graph
    hyperplanes: tuple
    edge_hyperplane: dict = field(compare=False, repr=False)
    transverse: frozenset = field(repr=False)
    validation: Optional[ValidationReport] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_geometry", {})

    def hyperplane_of(self, u, v) -> int:
        return self.edge_hyperplane[self.graph.edge_key(u, v)]

    def hyperplane(self, j) -> Hyperplane:
        return hyperplane_geometry(self, j)

    def carrier(self, j) -> frozenset:
        return self.hyperplane(j).carrier

    @cached_property
    def vertex_hyperplanes(self) -> dict:
        """Hyperplane ids whose carrier contains each vertex."""
        incident = {v: set() for v in self.graph.vertices}
        for (u, v), j in self.edge_hyperplane.items():
            incident[u].add(j)
            incident[v].add(j)
        return {v: frozenset(ids) for v, ids in incident.items()}

    @cached_property
    def contact(self) -> frozenset:
        pairs = set()
        for ids in self.vertex_hyperplanes.values():
            pairs.update(itertools.combinations(sorted(ids), 2))
        return frozenset(pairs)

    @cached_property
    def maximal_cliques(self) -> list:
        return maximal_cliques(self.graph)

    @property
    def validated(self) -> bool:
        return self.validation is not None and self.validation.passed

    def are_transverse(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self.transverse

    def in_contact(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self.contact

    def crossing_set(self, vs: Iterable) -> frozenset:
        """Ids of hyperplanes having an edge inside the induced subgraph on `vs`."""
        vs = frozenset(vs)
        return frozenset(
            self.hyperplane_of(u, v) for u in vs for v in self.graph.neighbors(u) & vs
        )

    def clique_at(self, j: int, x) -> frozenset:
        """The clique of hyperplane `j` containing `x` (just {x} when x is off the carrier)."""
        return frozenset(
            [x] + [y for y in self.graph.neighbors(x) if self.hyperplane_of(x, y) == j]
        )

    def sector_of(self, j: int) -> dict:
        """Vertex -> index of its sector with respect to hyperplane `j`."""
        cache = self._geometry.get(("sector_of", j))
        if cache is None:
            cache = {v: i for i, s in enumerate(self.hyperplane(j).sectors) for v in s}
            self._geometry[("sector_of", j)] = cache
        return cache


def _squares(g: Graph):
    """Yield every 4-cycle v-u-x-w-v (induced or not), each several times."""
    for v in g.vertices:
        around = g.ordered(g.neighbors(v))
        for u, w in itertools.combinations(around, 2):
            for x in (g.neighbors(u) & g.neighbors(w)) - {v}:
                yield v, u, x, w


def compute_hyperplanes(g: Graph) -> QMGraph:
    if not g.is_connected():
        raise GraphError("disconnected input")
    position = {e: i for i, e in enumerate(g.edge_list)}
    classes = UnionFind(g.edge_list)
    for u, v in g.edge_list:
        for w in g.neighbors(u) & g.neighbors(v):
            classes.union((u, v), g.edge_key(u, w), g.edge_key(v, w))
    for v, u, x, w in _squares(g):
        classes.union(g.edge_key(v, u), g.edge_key(x, w))
        classes.union(g.edge_key(v, w), g.edge_key(x, u))

    groups = sorted(
        (frozenset(s) for s in classes.to_sets()), key=lambda s: min(position[e] for e in s)
    )
    hyperplanes = tuple(Hyperplane(id=i, edges=s) for i, s in enumerate(groups))
    edge_hyperplane = {e: h.id for h in hyperplanes for e in h.edges}

    transverse = set()
    for v, u, _, w in _squares(g):
        j = edge_hyperplane[g.edge_key(v, u)]
        k = edge_hyperplane[g.edge_key(v, w)]
        if j != k:
            transverse.add((min(j, k), max(j, k)))

    logger.debug(
        f"{len(hyperplanes)} hyperplanes, {len(transverse)} transverse pairs on "
        f"{len(g)} vertices"
    )
    return QMGraph(
        graph=g,
        hyperplanes=hyperplanes,
        edge_hyperplane=edge_hyperplane,
        transverse=frozenset(transverse),
    )


def _hyperplane_id(X: QMGraph, J) -> int:
    j = J.id if isinstance(J, Hyperplane) else J
    if not isinstance(j, int) or not 0 <= j < len(X.hyperplanes):
        raise GraphError(f"foreign hyperplane id {j!r}")
    if isinstance(J, Hyperplane) and J.edges != X.hyperplanes[j].edges:
        raise GraphError(f"foreign hyperplane {J.label}")
    return j


def hyperplane_geometry(X: QMGraph, J) -> Hyperplane:
    j = _hyperplane_id(X, J)
    cached = X._geometry.get(j)
    if cached is not None:
        return cached
    base = X.hyperplanes[j]
    g = X.graph
    carrier = frozenset(v for e in base.edges for v in e)
    cut = g.nx.copy()
    cut.remove_edges_from(base.edges)
    sectors = sorted((frozenset(c) for c in nx.connected_components(cut)), key=g.set_key)
    fibres = sorted(
        (frozenset(c) for c in nx.connected_components(cut.subgraph(carrier))), key=g.set_key
    )
    filled = replace(base, carrier=carrier, sectors=tuple(sectors), fibres=tuple(fibres))
    X._geometry[j] = filled
    return filled


def classify_pair(X: QMGraph, J, K) -> PairClass:
    j, k = _hyperplane_id(X, J), _hyperplane_id(X, K)
    if j == k:
        raise ValueError("identical hyperplanes")
    transverse = X.are_transverse(j, k)
    in_contact = X.in_contact(j, k)
    contiguous = False
    if in_contact:
        both = X.carrier(j) & X.carrier(k)
        contiguous = any(c <= both for c in X.maximal_cliques)
    if transverse:
        relation = "transverse"
    elif in_contact:
        relation = "tangent"
    else:
        relation = "remote"
    return PairClass(relation=relation, in_contact=in_contact, contiguous=contiguous)


def gate(X: QMGraph, x, Y: Iterable) -> object:
    """The unique vertex of `Y` through which every geodesic from `x` to `Y` factors."""
    Y = frozenset(Y)
    if not Y:
        raise NotGatedError("empty vertex set has no gate", (vertex_label(x),))
    if x in Y:
        return x
    dist = X.graph.distances
    from_x = dist[x]
    nearest = min(from_x[y] for y in Y)
    candidates = X.graph.ordered(y for y in Y if from_x[y] == nearest)
    if len(candidates) > 1:
        raise NotGatedError(
            f"no unique nearest vertex from {vertex_label(x)}",
            (x, candidates[0], candidates[1]),
        )
    g = candidates[0]
    for z in Y:
        if from_x[z] != nearest + dist[g][z]:
            raise NotGatedError(
                f"geodesics from {vertex_label(x)} do not factor through {vertex_label(g)}",
                (x, g, z),
            )
    return g


def gate_image(X: QMGraph, Y: Iterable, Z: Iterable, check: bool = True) -> frozenset:
    Y, Z = frozenset(Y), frozenset(Z)
    image = frozenset(gate(X, y, Z) for y in Y)
    if check:
        expected = X.crossing_set(Y) & X.crossing_set(Z)
        found = X.crossing_set(image)
        if found != expected:
            raise InvariantViolation(
                "hyperplanes crossing a projection differ from those crossing both sets",
                (tuple(sorted(found ^ expected)),),
            )
    return image


def is_gated(X: QMGraph, Y: Iterable, cross_check: bool = False) -> GatedVerdict:
    g = X.graph
    Y = frozenset(Y)
    if not Y:
        return GatedVerdict(False, "empty")
    for v in Y:
        g.index(v)
    parts = g.components(Y)
    if len(parts) > 1:
        reps = tuple(g.ordered(p)[0] for p in parts[:2])
        return GatedVerdict(False, "disconnected", reps)

    verdict = GatedVerdict(True)
    for clique in X.maximal_cliques:
        if len(clique & Y) >= 2 and not clique <= Y:
            verdict = GatedVerdict(False, "clique absorption", g.ordered(clique))
            break
    if verdict.gated:
        verdict = _local_convexity(g, Y)

    if cross_check:
        direct = True
        for v in g.vertices:
            try:
                gate(X, v, Y)
            except NotGatedError:
                direct = False
                break
        if direct != verdict.gated:
            raise InvariantViolation(
                "local gatedness criterion disagrees with the definition", g.ordered(Y)
            )
    return verdict


def _local_convexity(g: Graph, Y: frozenset) -> GatedVerdict:
    for v in g.ordered(Y):
        inside = g.ordered(g.neighbors(v) & Y)
        for u, w in itertools.combinations(inside, 2):
            for x in (g.neighbors(u) & g.neighbors(w)) - {v}:
                if x not in Y:
                    return GatedVerdict(False, "local convexity", (v, u, x, w))
    return GatedVerdict(True)


def _interval(g: Graph, a, b) -> set:
    dist = g.distances
    total = dist[a][b]
    return {w for w in g.vertices if dist[a][w] + dist[w][b] == total}


def gated_hull(X: QMGraph, S: Iterable) -> frozenset:
    """Smallest gated vertex set containing `S`.

    Every step adds vertices that any gated superset must contain: geodesic intervals
    until the set is connected, then clique absorption and square completion until stable.
    """
    g = X.graph
    members = set(S)
    if not members:
        raise GraphError("empty vertex set")
    for v in members:
        g.index(v)

    while True:
        parts = g.components(members)
        if len(parts) > 1:
            a, b = g.ordered(parts[0])[0], g.ordered(parts[1])[0]
            members |= _interval(g, a, b)
            continue
        queue = list(g.ordered(members))
        while queue:
            v = queue.pop()
            grown = []
            for u in g.neighbors(v) & members:
                grown.extend((g.neighbors(v) & g.neighbors(u)) - members)
                members.update(grown)
            inside = g.ordered(g.neighbors(v) & members)
            for u, w in itertools.combinations(inside, 2):
                fresh = (g.neighbors(u) & g.neighbors(w)) - members - {v}
                grown.extend(fresh)
                members.update(fresh)
            for y in grown:
                queue.append(y)
                queue.extend(g.neighbors(y) & members)
        if len(g.components(members)) == 1:
            break

    hull = frozenset(members)
    verdict = is_gated(X, hull)
    if not verdict.gated:
        raise InvariantViolation(f"hull closure is not gated ({verdict.reason})", verdict.witness)
    return hull


def _require_validated(X: QMGraph) -> None:
    if not X.validated:
        raise ValidationMissing("graph has not passed quasi-median validation")


def product_coordinates(X: QMGraph, vertices: Iterable, factors: tuple) -> dict:
    """Map each vertex to the tuple of its gates onto the given gated factors."""
    return {v: tuple(gate(X, v, f) for f in factors) for v in vertices}


def _verify_product(X: QMGraph, vertices: frozenset, factors: tuple, coords: dict) -> bool:
    """Check that `coords` is an isomorphism from the induced subgraph onto the product."""
    g = X.graph
    if len(vertices) != math.prod(len(f) for f in factors):
        return False
    if len(set(coords.values())) != len(vertices):
        return False
    expected_edges = 0
    for i, f in enumerate(factors):
        others = math.prod(len(h) for k, h in enumerate(factors) if k != i)
        expected_edges += len(g.induced(f).edges) * others
    seen = 0
    for u in vertices:
        for v in g.neighbors(u) & vertices:
            diff = [i for i, (a, b) in enumerate(zip(coords[u], coords[v])) if a != b]
            if len(diff) != 1 or not g.has_edge(coords[u][diff[0]], coords[v][diff[0]]):
                return False
            seen += 1
    return seen // 2 == expected_edges


def span_prism(X: QMGraph, o, ids: tuple) -> Prism:
    factors = tuple(X.clique_at(j, o) for j in ids)
    vertices = {o}
    for j in ids:
        vertices = {y for p in vertices for y in X.clique_at(j, p)}
    vertices = frozenset(vertices)
    coords = product_coordinates(X, vertices, factors)
    if not _verify_product(X, vertices, factors, coords):
        raise InvariantViolation(
            "prism is not a product of its factor cliques",
            (vertex_label(o), tuple(ids)),
        )
    return Prism(vertices=vertices, factors=factors, hyperplanes=tuple(ids))


def transversality_graph(X: QMGraph) -> nx.Graph:
    t = nx.Graph()
    t.add_nodes_from(h.id for h in X.hyperplanes)
    t.add_edges_from(X.transverse)
    return t


crossing_graph = transversality_graph


def contact_graph(X: QMGraph) -> nx.Graph:
    c = nx.Graph()
    c.add_nodes_from(h.id for h in X.hyperplanes)
    c.add_edges_from(X.contact)
    return c


def maximal_prisms(X: QMGraph) -> list:
    """One prism per maximal family of pairwise transverse hyperplanes."""
    _require_validated(X)
    cached = X._geometry.get("maximal_prisms")
    if cached is not None:
        return cached
    g = X.graph
    if not X.hyperplanes:
        only = g.vertices[0]
        X._geometry["maximal_prisms"] = [Prism(frozenset([only]), factors=(), hyperplanes=())]
        return X._geometry["maximal_prisms"]
    prisms = []
    for family in nx.find_cliques(transversality_graph(X)):
        ids = tuple(sorted(family))
        common = frozenset.intersection(*(X.carrier(j) for j in ids))
        if not common:
            raise InvariantViolation("pairwise transverse hyperplanes with disjoint carriers", ids)
        prism = span_prism(X, g.ordered(common)[0], ids)
        if prism.vertices != common:
            raise InvariantViolation("carrier intersection is not a single prism", ids)
        prisms.append(prism)
    prisms.sort(key=lambda p: g.set_key(p.vertices))
    X._geometry["maximal_prisms"] = prisms
    return prisms


def prisms_through(X: QMGraph, C: Iterable) -> list:
    """All prisms containing the maximal clique `C`, maximal or not."""
    g = X.graph
    C = frozenset(C)
    if C not in set(X.maximal_cliques) or len(C) < 2:
        raise GraphError("not a maximal clique with an edge")
    o, second = g.ordered(C)[:2]
    j_c = X.hyperplane_of(o, second)
    candidates = [k for k in sorted(X.vertex_hyperplanes[o]) if X.are_transverse(j_c, k)]
    local = transversality_graph(X).subgraph(candidates)
    families = [()] + [tuple(c) for c in nx.enumerate_all_cliques(local)]
    prisms = [span_prism(X, o, tuple(sorted((j_c,) + fam))) for fam in families]
    prisms.sort(key=lambda p: (p.dimension, g.set_key(p.vertices)))
    return prisms


def cubical_dimension(X: QMGraph) -> int:
    return max(p.dimension for p in maximal_prisms(X))


def maximal_hyperplanes(X: QMGraph) -> list:
    """Hyperplanes none of whose fibres lies in the carrier of another hyperplane."""
    chosen = []
    for h in X.hyperplanes:
        fibres = X.hyperplane(h.id).fibres
        nested = False
        for fibre in fibres:
            shared = frozenset.intersection(*(X.vertex_hyperplanes[v] for v in fibre))
            if shared - {h.id}:
                nested = True
                break
        if not nested:
            chosen.append(h.id)
    return chosen


def canonical_star_covering(X: QMGraph) -> list:
    """For each maximal clique, the gated hull of the union of the prisms containing it."""
    _require_validated(X)
    g = X.graph
    prisms = maximal_prisms(X)
    members = set()
    stars = []
    for clique in X.maximal_cliques:
        star = frozenset().union(*(p.vertices for p in prisms if clique <= p.vertices))
        stars.append(star)
        members.add(gated_hull(X, star))
    family = sorted(members, key=g.set_key)
    for star in stars:
        if not any(star <= y for y in family):
            raise InvariantViolation("canonical family misses a prism star", g.ordered(star))
    return family


def carrier_intersection_decomposition(
    X: QMGraph, hyperplanes: Iterable, o
) -> CarrierDecomposition:
    """Explicit isomorphism from the intersection of carriers onto F x prod C_J."""
    g = X.graph
    ids = tuple(sorted({_hyperplane_id(X, j) for j in hyperplanes}))
    if not ids:
        raise PreconditionError("empty hyperplane family")
    for j, k in itertools.combinations(ids, 2):
        if not X.are_transverse(j, k):
            raise PreconditionError("hyperplanes are not transverse", (j, k))
    for j in ids:
        if o not in X.carrier(j):
            raise PreconditionError("vertex outside a carrier", (j, o))

    common = frozenset.intersection(*(X.carrier(j) for j in ids))
    fibre = frozenset.intersection(
        *(next(f for f in X.hyperplane(j).fibres if o in f) for j in ids)
    )
    cliques = tuple(X.clique_at(j, o) for j in ids)
    factors = (fibre,) + cliques
    coords = product_coordinates(X, common, factors)
    if not _verify_product(X, common, factors, coords):
        raise InvariantViolation("carrier intersection is not F x prod C_J", ids)
    return CarrierDecomposition(
        origin=o, hyperplanes=ids, fibre=fibre, cliques=cliques, mapping=coords
    )


def _distance_pairs(g: Graph, rng: random.Random):
    if len(g) <= EXHAUSTIVE_DISTANCE_LIMIT:
        return itertools.combinations(g.vertices, 2)
    return ((rng.choice(g.vertices), rng.choice(g.vertices)) for _ in range(SAMPLED_DISTANCE_PAIRS))


def _local_violations(g: Graph) -> list:
    found = {}
    dist = g.distances
    for u, v in itertools.combinations(g.vertices, 2):
        if g.has_edge(u, v):
            continue
        common = g.ordered(g.neighbors(u) & g.neighbors(v))
        if "induced_k23" not in found:
            for triple in itertools.combinations(common, 3):
                if not any(g.has_edge(a, b) for a, b in itertools.combinations(triple, 2)):
                    found["induced_k23"] = Violation(
                        "induced_k23", "induced K_{2,3}", (u, v) + triple
                    )
                    break
        if "induced_k4_minus_edge" not in found:
            for a, b in itertools.combinations(common, 2):
                if g.has_edge(a, b):
                    found["induced_k4_minus_edge"] = Violation(
                        "induced_k4_minus_edge", "induced K4 minus an edge", (u, v, a, b)
                    )
                    break

    for u in g.vertices:
        du = dist[u]
        if "triangle_condition" not in found:
            for v, w in g.edge_list:
                k = du[v]
                if k == du[w] and k >= 1:
                    if not any(du[x] == k - 1 for x in g.neighbors(v) & g.neighbors(w)):
                        found["triangle_condition"] = Violation(
                            "triangle_condition", "triangle condition fails", (u, v, w)
                        )
                        break
        if "quadrangle_condition" not in found:
            for z in g.vertices:
                k = du[z] - 1
                if k < 1:
                    continue
                below = g.ordered(y for y in g.neighbors(z) if du[y] == k)
                for v, w in itertools.combinations(below, 2):
                    if g.has_edge(v, w):
                        continue
                    if not any(du[x] == k - 1 for x in g.neighbors(v) & g.neighbors(w)):
                        found["quadrangle_condition"] = Violation(
                            "quadrangle_condition", "quadrangle condition fails", (u, v, w, z)
                        )
                        break
                if "quadrangle_condition" in found:
                    break
    return list(found.values())


def _validate(X: QMGraph) -> ValidationReport:
    g = X.graph
    violations = _local_violations(g)
    for h in X.hyperplanes:
        if len(X.hyperplane(h.id).sectors) < 2:
            violations.append(
                Violation("non_separating", f"hyperplane {h.label} does not separate", (h.id,))
            )
            break
    else:
        rng = random.Random(len(g))
        labels = {v: tuple(X.sector_of(h.id)[v] for h in X.hyperplanes) for v in g.vertices}
        for u, v in _distance_pairs(g, rng):
            separating = sum(a != b for a, b in zip(labels[u], labels[v]))
            if separating != g.distance(u, v):
                violations.append(
                    Violation(
                        "distance_mismatch",
                        "distance differs from the number of separating hyperplanes",
                        (u, v, g.distance(u, v), separating),
                    )
                )
                break
    return ValidationReport(passed=not violations, violations=tuple(violations))


def validate_quasi_median(g: Graph) -> ValidationReport:
    if not g.is_connected():
        return ValidationReport(False, (Violation("disconnected", "graph is disconnected", ()),))
    return _validate(compute_hyperplanes(g))


def load_quasi_median(g: Graph) -> QMGraph:
    """Hyperplanes plus the attached validation report."""
    X = compute_hyperplanes(g)
    report = _validate(X)
    if report.passed:
        logger.info(
            f"validated quasi-median graph: {len(g)} vertices, {len(X.hyperplanes)} hyperplanes"
        )
    else:
        logger.info(f"validation failed: {report.violations[0].message}")
    validated = replace(X, validation=report)
    validated._geometry.update(X._geometry)
    return validated


def hamming(sizes: Iterable[int]) -> QMGraph:
    sizes = list(sizes)
    if not sizes or any(n < 1 for n in sizes):
        raise GraphError("clique sizes must be at least 1")
    return load_quasi_median(cartesian_product([complete_graph(n) for n in sizes]))


def amalgam(X1: QMGraph, X2: QMGraph, mapping: dict) -> QMGraph:
    """Glue `X2` onto `X1` along an isomorphism between gated subgraphs.

    Vertices of the result are integers: first those of `X1` in order, then the
    unglued vertices of `X2`.
    """
    Y1, Y2 = frozenset(mapping), frozenset(mapping.values())
    if not Y1:
        raise AmalgamError("empty gluing subgraph")
    for side, X, Y in (("first", X1, Y1), ("second", X2, Y2)):
        verdict = is_gated(X, Y)
        if not verdict.gated:
            raise AmalgamError(f"gluing subgraph not gated in the {side} graph ({verdict.reason})")
    if not verify_isomorphism(X1.graph.induced(Y1), X2.graph.induced(Y2), mapping):
        raise AmalgamError("gluing map is not an isomorphism")

    rename = {("L", v): i for i, v in enumerate(X1.graph.vertices)}
    inverse = {y2: y1 for y1, y2 in mapping.items()}
    for v in X2.graph.vertices:
        if v in inverse:
            rename[("R", v)] = rename[("L", inverse[v])]
        else:
            rename[("R", v)] = len(set(rename.values()))
    vertices = sorted(set(rename.values()))
    edges = [(rename[("L", u)], rename[("L", v)]) for u, v in X1.graph.edge_list]
    edges += [(rename[("R", u)], rename[("R", v)]) for u, v in X2.graph.edge_list]
    glued = Graph(tuple(vertices), frozenset(frozenset(e) for e in edges))
    result = load_quasi_median(glued)
    if not result.validated:
        raise AmalgamError(
            f"validation failure after gluing: {result.validation.violations[0].message}"
        )
    return result


def _glue_step(X: QMGraph, sizes: list, mode: str, rng: random.Random, max_factors: int):
    g = X.graph
    if mode == "prism":
        prism = rng.choice(maximal_prisms(X))
        if prism.dimension + 1 <= max_factors:
            piece = hamming([len(f) for f in prism.factors] + [sizes[0]])
            positions = [g.ordered(f) for f in prism.factors]
            coords = product_coordinates(X, prism.vertices, prism.factors)
            mapping = {
                v: tuple(positions[i].index(c) for i, c in enumerate(coords[v])) + (0,)
                for v in prism.vertices
            }
            return amalgam(X, piece, mapping)
        mode = "clique"
    if mode == "clique":
        clique = g.ordered(rng.choice(X.maximal_cliques))
        piece = hamming([len(clique)] + sizes[1:])
        rest = (0,) * (len(sizes) - 1)
        return amalgam(X, piece, {v: (i,) + rest for i, v in enumerate(clique)})
    piece = hamming(sizes)
    return amalgam(X, piece, {rng.choice(g.vertices): rng.choice(piece.graph.vertices)})


def random_quasi_median(
    seed: int,
    steps: int = 5,
    max_clique: int = 3,
    max_factors: int = 2,
    max_vertices: int = 200,
    attempts: int = 8,
) -> QMGraph:
    """Seeded sequence of gated amalgamations of Hamming pieces."""
    rng = random.Random(seed)

    def piece_sizes() -> list:
        return [rng.randint(2, max_clique) for _ in range(rng.randint(1, max_factors))]

    X = hamming(piece_sizes())
    for step in range(steps):
        for attempt in range(attempts):
            mode = rng.choice(("vertex", "clique", "prism"))
            try:
                candidate = _glue_step(X, piece_sizes(), mode, rng, max_factors)
            except AmalgamError as e:
                logger.warning(f"seed {seed} step {step}: rejected {mode} gluing ({e})")
                continue
            if len(candidate.graph) > max_vertices:
                logger.debug(
                    f"seed {seed} step {step}: {mode} gluing exceeds {max_vertices} vertices"
                )
                continue
            X = candidate
            break
    return X


def simplex_graph(gamma: Graph, max_vertices: int = 200) -> QMGraph:
    """Median graph on the complete subgraphs of `gamma`; its crossing graph is `gamma`."""
    cliques = [()] + [gamma.ordered(c) for c in nx.enumerate_all_cliques(gamma.nx)]
    if len(cliques) > max_vertices:
        raise GuardExceeded("simplex graph", len(cliques), max_vertices)
    cliques.sort(key=lambda c: (len(c), gamma.set_key(c)))
    present = set(cliques)
    edges = set()
    for c in cliques:
        for i in range(len(c)):
            smaller = c[:i] + c[i + 1:]
            if smaller in present:
                edges.add(frozenset((smaller, c)))
    return load_quasi_median(Graph(tuple(cliques), frozenset(edges)))


def generate(kind: str, params: Optional[dict] = None, seed: Optional[int] = None) -> QMGraph:
    params = dict(params or {})
    if kind == "hamming":
        return hamming(params["sizes"])
    if kind == "amalgam":
        return amalgam(params["first"], params["second"], params["mapping"])
    if kind == "random":
        if seed is None:
            raise ValueError("random generation needs a seed")
        return random_quasi_median(seed, **params)
    if kind == "simplex_graph":
        return simplex_graph(params["graph"], params.get("max_vertices", 200))
    raise ValueError(
        f"Invalid generator '{kind}'. Valid options: \"hamming\", \"amalgam\", \"random\", "
        "\"simplex_graph\""
    )
