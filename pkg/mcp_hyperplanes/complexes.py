"""Abstract simplicial complexes and the complexes built from graphs and hyperplanes.

Complexes are stored by their maximal faces over namespaced string labels, so that
hyperplanes, cliques, edges, family members and graph vertices never collide when
complexes are combined.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from .graph_core import (
    Graph,
    GraphError,
    blocks,
    maximal_cliques,
    maximal_joins,
    vertex_label,
)
from .qm_engine import (
    NotGatedError,
    PreconditionError,
    QMGraph,
    InvariantViolation,
    canonical_star_covering,
    is_gated,
    load_quasi_median,
    maximal_hyperplanes,
    maximal_prisms,
    transversality_graph,
    contact_graph,
)

logger = logging.getLogger(__name__)

WEDGE_POINT = "*"


class MissingBasepoint(ValueError):
    pass


def hyperplane_name(j: int) -> str:
    return f"hyp:{j:04d}"


def graph_vertex_name(v) -> str:
    return f"vtx:{vertex_label(v)}"


def edge_name(x, y) -> str:
    return f"edge:{vertex_label(x)}|{vertex_label(y)}"


def clique_name(g: Graph, clique: Iterable) -> str:
    return "clique:" + ",".join(vertex_label(v) for v in g.ordered(clique))


def member_name(i: int) -> str:
    return f"mem:{i:04d}"


def _canonical_facets(faces: Iterable[frozenset]) -> tuple:
    """Drop faces contained in other faces; deterministic order."""
    unique = {frozenset(f) for f in faces if f}
    kept = []
    by_vertex: dict = {}
    for face in sorted(unique, key=lambda f: (-len(f), sorted(f))):
        anchor = min(face)
        if any(face <= other for other in by_vertex.get(anchor, ())):
            continue
        kept.append(face)
        for v in face:
            by_vertex.setdefault(v, []).append(face)
    return tuple(sorted(kept, key=lambda f: (sorted(f), len(f))))


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple
    facets: tuple
    basepoint: Optional[str] = None
    witnesses: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_faces(
        cls,
        faces: Iterable[Iterable[str]],
        vertices: Iterable[str] = (),
        basepoint: Optional[str] = None,
        witnesses: Optional[dict] = None,
    ) -> "SimplicialComplex":
        faces = [frozenset(f) for f in faces]
        labels = set(vertices).union(*faces) if faces else set(vertices)
        covered = set().union(*faces) if faces else set()
        faces.extend(frozenset([v]) for v in labels - covered)
        facets = _canonical_facets(faces)
        if basepoint is not None and basepoint not in labels:
            raise MissingBasepoint(f"basepoint {basepoint!r} is not a vertex")
        kept = {}
        if witnesses:
            kept = {f: witnesses[f] for f in facets if f in witnesses}
        return cls(tuple(sorted(labels)), facets, basepoint, kept)

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def is_empty(self) -> bool:
        return not self.vertices

    def contains(self, simplex: Iterable[str]) -> bool:
        simplex = frozenset(simplex)
        return any(simplex <= f for f in self.facets)

    def one_skeleton(self) -> nx.Graph:
        skeleton = nx.Graph()
        skeleton.add_nodes_from(self.vertices)
        for f in self.facets:
            skeleton.add_edges_from(itertools.combinations(sorted(f), 2))
        return skeleton

    def component_count(self) -> int:
        return nx.number_connected_components(self.one_skeleton()) if self.vertices else 0

    def relabel(self, mapping: dict, basepoint: Optional[str] = None) -> "SimplicialComplex":
        return SimplicialComplex.from_faces(
            (frozenset(mapping[v] for v in f) for f in self.facets),
            (mapping[v] for v in self.vertices),
            basepoint=basepoint,
        )

    def with_least_basepoint(self) -> "SimplicialComplex":
        if not self.vertices:
            return self
        return SimplicialComplex(self.vertices, self.facets, self.vertices[0], self.witnesses)


@dataclass(frozen=True)
class GatedFamily:
    host: QMGraph = field(repr=False)
    members: tuple

    @classmethod
    def certify(cls, X: QMGraph, members: Iterable[Iterable]) -> "GatedFamily":
        g = X.graph
        unique = {frozenset(m) for m in members}
        for member in sorted(unique, key=g.set_key):
            verdict = is_gated(X, member)
            if not verdict.gated:
                raise NotGatedError(
                    f"family member is not gated ({verdict.reason})", verdict.witness
                )
        return cls(host=X, members=tuple(sorted(unique, key=g.set_key)))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class FamilyPredicates:
    prism_covering: bool
    star_covering: bool
    parallelism_free: bool
    witnesses: dict = field(default_factory=dict, compare=False)


def named_family(X: QMGraph, name: str) -> GatedFamily:
    """Families used by the verification harness: whole graph, maximal prisms, canonical stars."""
    if name == "whole":
        return GatedFamily.certify(X, [X.graph.vertices])
    if name == "prisms":
        return GatedFamily.certify(X, [p.vertices for p in maximal_prisms(X)])
    if name == "canonical-star":
        return GatedFamily.certify(X, canonical_star_covering(X))
    raise ValueError(
        f"Invalid family '{name}'. Valid options: \"whole\", \"prisms\", \"canonical-star\""
    )


def flag_completion(gamma: Graph) -> SimplicialComplex:
    return family_complex(gamma, maximal_cliques(gamma))


def join_complex(gamma: Graph) -> SimplicialComplex:
    return family_complex(gamma, maximal_joins(gamma))


def family_complex(gamma: Graph, family: Iterable[Iterable]) -> SimplicialComplex:
    """Maximal faces are the inclusion-maximal members; every vertex of `gamma` is kept."""
    members = [frozenset(m) for m in family]
    if any(not m for m in members):
        raise GraphError("empty member")
    for m in members:
        for v in m:
            gamma.index(v)
    return SimplicialComplex.from_faces(
        ([graph_vertex_name(v) for v in m] for m in members),
        (graph_vertex_name(v) for v in gamma.vertices),
    )


def _flag_faces(relation: nx.Graph) -> list:
    return [[hyperplane_name(j) for j in c] for c in nx.find_cliques(relation)]


def contiguity_witnesses(X: QMGraph) -> dict:
    """One face per maximal clique: the hyperplanes whose carriers contain the clique."""
    faces = {}
    for clique in X.maximal_cliques:
        ids = frozenset.intersection(*(X.vertex_hyperplanes[v] for v in clique))
        face = frozenset(hyperplane_name(j) for j in ids)
        if face:
            faces.setdefault(face, clique)
    return faces


def hyperplane_complex(X: QMGraph, kind: str) -> SimplicialComplex:
    names = [hyperplane_name(h.id) for h in X.hyperplanes]
    if kind == "contact":
        return SimplicialComplex.from_faces(_flag_faces(contact_graph(X)), names)
    if kind == "crossing":
        return SimplicialComplex.from_faces(_flag_faces(transversality_graph(X)), names)
    if kind == "contiguity":
        witnesses = contiguity_witnesses(X)
        return SimplicialComplex.from_faces(witnesses.keys(), names, witnesses=witnesses)
    if kind == "small_crossing":
        keep = maximal_hyperplanes(X)
        relation = transversality_graph(X).subgraph(keep)
        return SimplicialComplex.from_faces(
            _flag_faces(relation), [hyperplane_name(j) for j in keep]
        )
    raise ValueError(
        f"Invalid complex '{kind}'. Valid options: \"contact\", \"crossing\", \"contiguity\", "
        "\"small_crossing\""
    )


def family_predicates(X: QMGraph, family: GatedFamily) -> FamilyPredicates:
    g = X.graph
    witnesses = {}
    prisms = maximal_prisms(X)

    prism_covering = True
    for p in prisms:
        if not any(p.vertices <= y for y in family.members):
            prism_covering = False
            witnesses["prism_covering"] = g.ordered(p.vertices)
            break

    star_covering = True
    for clique in X.maximal_cliques:
        star = frozenset().union(*(p.vertices for p in prisms if clique <= p.vertices))
        if not any(star <= y for y in family.members):
            star_covering = False
            witnesses["star_covering"] = g.ordered(clique)
            break

    parallelism_free = True
    seen = {}
    for i, y in enumerate(family.members):
        crossed = X.crossing_set(y)
        if crossed in seen:
            parallelism_free = False
            witnesses["parallelism_free"] = (seen[crossed], i)
            break
        seen[crossed] = i

    return FamilyPredicates(prism_covering, star_covering, parallelism_free, witnesses)


def relative_contact_complex(X: QMGraph, family: GatedFamily) -> SimplicialComplex:
    predicates = family_predicates(X, family)
    if not predicates.prism_covering:
        logger.warning(
            "relative contact complex of a family that is not prism-covering "
            f"(uncovered prism {predicates.witnesses['prism_covering']})"
        )
    contact = contact_graph(X)
    faces = []
    for y in family.members:
        faces.extend(_flag_faces(contact.subgraph(X.crossing_set(y))))
    return SimplicialComplex.from_faces(faces, [hyperplane_name(h.id) for h in X.hyperplanes])


def skewering_complex(X: QMGraph, family: GatedFamily, double: bool = False) -> SimplicialComplex:
    crossed = [X.crossing_set(y) for y in family.members]
    names = [member_name(i) for i in range(len(family))]
    faces = []
    if double:
        ids = [h.id for h in X.hyperplanes]
        for a, j in enumerate(ids):
            for k in ids[a + 1:]:
                if X.are_transverse(j, k):
                    continue
                faces.append([names[i] for i, c in enumerate(crossed) if j in c and k in c])
    else:
        for h in X.hyperplanes:
            faces.append([names[i] for i, c in enumerate(crossed) if h.id in c])
    return SimplicialComplex.from_faces(faces, names)


def local_complex(
    X: QMGraph, x, kind: str, family: Optional[GatedFamily] = None
) -> SimplicialComplex:
    """Link, simplified link, and their family-relative versions at the vertex `x`."""
    g = X.graph
    g.index(x)
    around = g.ordered(g.neighbors(x))
    cliques = [c for c in X.maximal_cliques if x in c and len(c) > 1]

    if kind in ("link", "slink"):
        containers = [p.vertices for p in maximal_prisms(X) if x in p.vertices]
    elif kind in ("L", "sL"):
        if family is None:
            raise ValueError(f"local complex '{kind}' needs a gated family")
        containers = [y for y in family.members if x in y]
    else:
        raise ValueError(
            f"Invalid local complex '{kind}'. Valid options: \"link\", \"slink\", \"L\", \"sL\""
        )

    if kind in ("link", "L"):
        vertices = [edge_name(x, y) for y in around]
        faces = [[edge_name(x, y) for y in around if y in c] for c in containers]
    else:
        vertices = [clique_name(g, c) for c in cliques]
        faces = [[clique_name(g, c) for c in cliques if c <= y] for y in containers]
    return SimplicialComplex.from_faces(faces, vertices).with_least_basepoint()


def combine(kind: str, parts: list) -> SimplicialComplex:
    if kind == "wedge":
        if not parts:
            return SimplicialComplex.from_faces([], [WEDGE_POINT], basepoint=WEDGE_POINT)
        faces, vertices = [], [WEDGE_POINT]
        for i, part in enumerate(parts):
            if part.basepoint is None:
                raise MissingBasepoint(f"wedge part {i} has no basepoint")
            rename = {v: f"{i:03d}/{v}" for v in part.vertices}
            rename[part.basepoint] = WEDGE_POINT
            faces.extend(frozenset(rename[v] for v in f) for f in part.facets)
            vertices.extend(rename.values())
        return SimplicialComplex.from_faces(faces, vertices, basepoint=WEDGE_POINT)
    if kind == "disjoint_union":
        faces, vertices = [], []
        for i, part in enumerate(parts):
            faces.extend(frozenset(f"{i:03d}/{v}" for v in f) for f in part.facets)
            vertices.extend(f"{i:03d}/{v}" for v in part.vertices)
        return SimplicialComplex.from_faces(faces, vertices)
    raise ValueError(f"Invalid combination '{kind}'. Valid options: \"wedge\", \"disjoint_union\"")


def nerve(sets: list) -> SimplicialComplex:
    """Subfamilies with nonempty intersection; empty members span no simplex."""
    names = [f"set:{i:04d}" for i in range(len(sets))]
    by_element: dict = {}
    for i, s in enumerate(sets):
        for element in s:
            by_element.setdefault(element, set()).add(names[i])
    vertices = [names[i] for i, s in enumerate(sets) if s]
    return SimplicialComplex.from_faces(by_element.values(), vertices)


def model_complex(
    X: QMGraph, theorem: str, family: Optional[GatedFamily] = None
) -> SimplicialComplex:
    """Wedge models predicted for the crossing and relative contact complexes."""
    if theorem == "crossing":
        if not X.hyperplanes:
            return SimplicialComplex.from_faces([])
        wedges = []
        for block in blocks(X.graph).blocks:
            Y = load_quasi_median(X.graph.induced(block))
            if not Y.validated:
                raise InvariantViolation("block of a quasi-median graph failed validation", block)
            slinks = [local_complex(Y, x, "slink") for x in Y.graph.vertices]
            wedges.append(combine("wedge", slinks))
        return combine("disjoint_union", wedges)

    if theorem == "relcont":
        if family is None:
            raise ValueError("relative contact model needs a gated family")
        decomposition = blocks(X.graph)
        if decomposition.cut_vertices or len(X.graph) < 2:
            cut = X.graph.ordered(decomposition.cut_vertices)
            raise PreconditionError("graph is not 2-connected", cut[:1])
        predicates = family_predicates(X, family)
        if not predicates.star_covering:
            raise PreconditionError(
                "family is not star-covering", predicates.witnesses["star_covering"]
            )
        return combine("wedge", [local_complex(X, x, "sL", family) for x in X.graph.vertices])

    raise ValueError(f"Invalid model '{theorem}'. Valid options: \"crossing\", \"relcont\"")
