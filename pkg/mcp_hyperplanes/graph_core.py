"""Finite simple graphs and the combinatorial queries the rest of the package consumes.

Graphs are immutable. Vertex identifiers are opaque hashables; the input order of the
vertices is the canonical total order used for every tie-break, so reports are stable.
Heavy lifting (cliques, blocks, isomorphism, shortest paths) is delegated to networkx.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Optional

import networkx as nx

from .mcp_env import get_config

logger = logging.getLogger(__name__)

Vertex = Hashable
VertexSet = frozenset


class GraphError(ValueError):
    """Malformed graph input or a query outside the graph."""


class GuardExceeded(RuntimeError):
    """A configured size guard was exceeded."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what}: size {size} exceeds guard {limit}")
        self.what = what
        self.size = size
        self.limit = limit


def vertex_label(v: Vertex) -> str:
    """Whitespace-free text label for a vertex identifier."""
    if isinstance(v, tuple):
        return "(" + ",".join(vertex_label(x) for x in v) + ")"
    return str(v)


@dataclass(frozen=True)
class Graph:
    """A finite simple undirected graph.

    `edges` holds two-element frozensets; adjacency is derived once in `__post_init__`.
    """

    vertices: tuple
    edges: frozenset

    def __post_init__(self):
        adjacency = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adjacency[u].add(v)
            adjacency[v].add(u)
        object.__setattr__(self, "_adj", {v: frozenset(n) for v, n in adjacency.items()})
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    def index(self, v: Vertex) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {vertex_label(v)!r}") from None

    def neighbors(self, v: Vertex) -> frozenset:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"unknown vertex {vertex_label(v)!r}") from None

    def degree(self, v: Vertex) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return v in self._adj.get(u, ())

    def ordered(self, vs: Iterable[Vertex]) -> tuple:
        """Vertices of `vs` in the canonical order of this graph."""
        return tuple(sorted(vs, key=self._index.__getitem__))

    def set_key(self, vs: Iterable[Vertex]) -> tuple:
        """Sort key for vertex sets: lexicographic on sorted member positions."""
        return tuple(sorted(self._index[v] for v in vs))

    def edge_key(self, u: Vertex, v: Vertex) -> tuple:
        """The edge `uv` as an ordered pair, smaller vertex first."""
        return (u, v) if self._index[u] < self._index[v] else (v, u)

    @cached_property
    def edge_list(self) -> tuple:
        pairs = [self.edge_key(*tuple(e)) for e in self.edges]
        return tuple(sorted(pairs, key=lambda p: (self._index[p[0]], self._index[p[1]])))

    @cached_property
    def nx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edge_list)
        return g

    @cached_property
    def distances(self) -> dict:
        """All-pairs BFS distances; missing keys mean unreachable."""
        return dict(nx.all_pairs_shortest_path_length(self.nx))

    def distance(self, u: Vertex, v: Vertex) -> int:
        return self.distances[u][v]

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and nx.is_connected(self.nx)

    def induced(self, vs: Iterable[Vertex]) -> "Graph":
        keep = frozenset(vs)
        unknown = keep - self._index.keys()
        if unknown:
            raise GraphError(f"unknown vertex {vertex_label(next(iter(unknown)))!r}")
        return Graph(self.ordered(keep), frozenset(e for e in self.edges if e <= keep))

    def components(self, vs: Optional[Iterable[Vertex]] = None) -> list:
        """Connected components of the induced subgraph on `vs` (whole graph by default)."""
        sub = self.nx if vs is None else self.nx.subgraph(vs)
        comps = [frozenset(c) for c in nx.connected_components(sub)]
        return sorted(comps, key=self.set_key)

    def relabel(self, mapping: dict) -> "Graph":
        return Graph(
            tuple(mapping[v] for v in self.vertices),
            frozenset(frozenset(mapping[v] for v in e) for e in self.edges),
        )


@dataclass(frozen=True)
class JoinDecomposition:
    parts: tuple
    trivial: bool = False


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple
    cut_vertices: frozenset


def build_graph(labels: Iterable[Vertex], edges: Iterable[tuple]) -> Graph:
    labels = tuple(labels)
    seen = set()
    for v in labels:
        if v in seen:
            raise GraphError(f"duplicate label {vertex_label(v)!r}")
        seen.add(v)
    edge_set = set()
    for u, v in edges:
        for w in (u, v):
            if w not in seen:
                raise GraphError(f"unknown endpoint {vertex_label(w)!r}")
        if u == v:
            raise GraphError(f"loop edge at {vertex_label(u)!r}")
        edge_set.add(frozenset((u, v)))
    return Graph(labels, frozenset(edge_set))


def from_networkx(g: nx.Graph) -> Graph:
    """Wrap a networkx graph; node insertion order becomes the canonical order."""
    return build_graph(list(g.nodes), list(g.edges))


def complete_graph(n: int) -> Graph:
    return from_networkx(nx.complete_graph(n))


def neighborhood(g: Graph, v: Vertex, kind: str = "link") -> frozenset:
    link = g.neighbors(v)
    if kind == "link":
        return link
    if kind == "star":
        return link | {v}
    raise ValueError(f"Invalid neighborhood kind '{kind}'. Valid options: \"link\", \"star\"")


def maximal_cliques(g: Graph) -> list:
    cliques = [frozenset(c) for c in nx.find_cliques(g.nx)]
    return sorted(cliques, key=g.set_key)


def join_decomposition(g: Graph, S: Iterable[Vertex]) -> Optional[JoinDecomposition]:
    """Finest join splitting of the induced subgraph on `S`, or None when it is not a join."""
    S = frozenset(S)
    if not S:
        raise GraphError("empty vertex set")
    for v in S:
        g.index(v)
    if len(S) == 1:
        return JoinDecomposition(parts=(S,), trivial=True)
    complement = nx.complement(g.nx.subgraph(S))
    parts = [frozenset(c) for c in nx.connected_components(complement)]
    if len(parts) < 2:
        return None
    return JoinDecomposition(parts=tuple(sorted(parts, key=g.set_key)))


def _common_neighbors(g: Graph, vs: Iterable[Vertex]) -> frozenset:
    common = None
    for v in vs:
        common = g.neighbors(v) if common is None else common & g.neighbors(v)
    return frozenset(g.vertices) if common is None else common


def maximal_joins(g: Graph) -> list:
    """Inclusion-maximal vertex sets inducing a join of at least two parts.

    A maximal join A * B satisfies A = CN(B) and B = CN(A), where CN is the common
    neighbourhood. The admissible sides are the nonempty intersections of vertex links,
    which we close under intersection before pairing each with its common neighbourhood.
    """
    if not g.is_connected():
        raise GraphError("disconnected input")
    sides = {g.neighbors(v) for v in g.vertices if g.neighbors(v)}
    frontier = set(sides)
    while frontier:
        fresh = set()
        for side in frontier:
            for v in g.vertices:
                meet = side & g.neighbors(v)
                if meet and meet not in sides:
                    fresh.add(meet)
        sides |= fresh
        frontier = fresh
    joins = set()
    for side in sides:
        other = _common_neighbors(g, side)
        if other:
            joins.add(side | other)
    maximal = [s for s in joins if not any(s < t for t in joins)]
    return sorted(maximal, key=g.set_key)


def blocks(g: Graph) -> BlockDecomposition:
    if not g.is_connected():
        raise GraphError("disconnected input")
    if len(g) == 1:
        return BlockDecomposition(blocks=(frozenset(g.vertices),), cut_vertices=frozenset())
    found = [frozenset(b) for b in nx.biconnected_components(g.nx)]
    return BlockDecomposition(
        blocks=tuple(sorted(found, key=g.set_key)),
        cut_vertices=frozenset(nx.articulation_points(g.nx)),
    )


def cartesian_product(gs: list) -> Graph:
    """Cartesian product; vertices are tuples in lexicographic order of factor positions."""
    if not gs:
        raise GraphError("empty factor list")
    for factor in gs:
        if not factor.vertices:
            raise GraphError("empty factor")
    vertices = tuple(itertools.product(*(factor.vertices for factor in gs)))
    edges = set()
    for x in vertices:
        for i, factor in enumerate(gs):
            for y_i in factor.neighbors(x[i]):
                y = x[:i] + (y_i,) + x[i + 1:]
                edges.add(frozenset((x, y)))
    return Graph(vertices, frozenset(edges))


def are_isomorphic(g1: Graph, g2: Graph) -> Optional[dict]:
    """A vertex bijection preserving adjacency both ways, or None."""
    limit = get_config().isomorphism_guard
    size = max(len(g1), len(g2))
    if size > limit:
        raise GuardExceeded("isomorphism search", size, limit)
    if len(g1) != len(g2) or len(g1.edges) != len(g2.edges):
        return None
    if sorted(g1.degree(v) for v in g1.vertices) != sorted(g2.degree(v) for v in g2.vertices):
        return None
    return nx.vf2pp_isomorphism(g1.nx, g2.nx)


def verify_isomorphism(g1: Graph, g2: Graph, mapping: dict) -> bool:
    """Check an explicit bijection edge by edge, without any search."""
    if len(mapping) != len(g1) or set(mapping) != set(g1.vertices):
        return False
    if set(mapping.values()) != set(g2.vertices):
        return False
    image = {frozenset(mapping[v] for v in e) for e in g1.edges}
    return image == set(g2.edges)
