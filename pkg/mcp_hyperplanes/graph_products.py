"""Word calculus in graph products of cyclic groups.

Elements are kept in a normal form: a reduced word of syllables ``(vertex, exponent)``
in which no two syllables on the same vertex can be brought together by commutations,
written as the lexicographically least shuffle for the vertex order of the graph.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .complexes import SimplicialComplex
from .graph_core import (
    Graph,
    GraphError,
    GuardExceeded,
    build_graph,
    maximal_cliques,
    maximal_joins,
    neighborhood,
    vertex_label,
)
from .mcp_env import get_config
from .qm_engine import InvariantViolation

logger = logging.getLogger(__name__)

INFINITE = 0


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GPPresentation:
    """A graph with a cyclic group on every vertex; order 0 stands for Z."""

    graph: Graph
    orders: tuple

    def __post_init__(self):
        if len(self.orders) != len(self.graph.vertices):
            raise PresentationError("one order per vertex is required")
        for v, n in zip(self.graph.vertices, self.orders):
            if n == 1 or n < 0:
                raise PresentationError(
                    f"vertex {vertex_label(v)!r} has order {n}; orders are 0 or at least 2"
                )

    @classmethod
    def from_orders(cls, graph: Graph, orders: dict) -> "GPPresentation":
        missing = [v for v in graph.vertices if v not in orders]
        if missing:
            raise PresentationError(f"no order for vertex {vertex_label(missing[0])!r}")
        return cls(graph, tuple(orders[v] for v in graph.vertices))

    @classmethod
    def raag(cls, graph: Graph) -> "GPPresentation":
        return cls(graph, (INFINITE,) * len(graph.vertices))

    def order(self, u) -> int:
        if u not in self.graph:
            raise PresentationError(f"unknown vertex {vertex_label(u)!r}")
        return self.orders[self.graph.index(u)]

    def commute(self, u, v) -> bool:
        return u != v and self.graph.has_edge(u, v)

    def all_finite(self) -> bool:
        return all(n != INFINITE for n in self.orders)

    def normalize_exponent(self, u, e: int) -> int:
        n = self.order(u)
        return e % n if n else e

    def identity(self) -> "NormalForm":
        return NormalForm(self, ())

    def generator(self, u, e: int = 1) -> "NormalForm":
        return reduce(self, [(u, e)])


@dataclass(frozen=True)
class NormalForm:
    presentation: GPPresentation = field(repr=False, compare=False)
    syllables: tuple

    def __len__(self) -> int:
        return len(self.syllables)

    def __str__(self) -> str:
        return self.render()

    @property
    def support(self) -> frozenset:
        return frozenset(u for u, _ in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def render(self) -> str:
        if not self.syllables:
            return "1"
        return ".".join(
            vertex_label(u) if e == 1 else f"{vertex_label(u)}^{e}" for u, e in self.syllables
        )

    def sort_key(self) -> tuple:
        g = self.presentation.graph
        return (len(self.syllables), tuple((g.index(u), e) for u, e in self.syllables))


@dataclass(frozen=True)
class ParabolicCoset:
    support: frozenset
    rep: NormalForm

    def render(self) -> str:
        g = self.rep.presentation.graph
        inside = ",".join(vertex_label(v) for v in g.ordered(self.support))
        return f"{self.rep.render()}<{inside}>"


@dataclass(frozen=True)
class GPHyperplane:
    label: object
    carrier: ParabolicCoset


@dataclass(frozen=True)
class CICFragment:
    """A finite piece of a coset intersection complex; never the whole complex."""

    vertices: tuple
    simplices: tuple
    radius: int
    max_dim: int
    is_fragment: bool = True

    @staticmethod
    def label(i: int) -> str:
        return f"coset:{i:04d}"

    def to_complex(self) -> SimplicialComplex:
        return SimplicialComplex.from_faces(
            ([self.label(i) for i in s] for s in self.simplices),
            (self.label(i) for i in range(len(self.vertices))),
        )


@dataclass(frozen=True)
class QMBall:
    graph: Graph
    trust_radius: int
    elements: dict = field(compare=False, repr=False)


def _check_presentation(pres: GPPresentation, *forms: NormalForm) -> None:
    for x in forms:
        if x.presentation is not pres and x.presentation != pres:
            raise PresentationError("normal form belongs to another presentation")


def _syllables(word) -> list:
    if isinstance(word, NormalForm):
        return list(word.syllables)
    return [(u, e) for u, e in word]


def _shuffle(pres: GPPresentation, word: list) -> tuple:
    """Least linear extension of the commutation order, by vertex position."""
    g = pres.graph
    remaining = list(word)
    ordered = []
    while remaining:
        best = None
        for i, (u, _) in enumerate(remaining):
            if all(pres.commute(u, w) for w, _ in remaining[:i]):
                if best is None or g.index(u) < g.index(remaining[best][0]):
                    best = i
        ordered.append(remaining.pop(best))
    return tuple(ordered)


def reduce(pres: GPPresentation, word) -> NormalForm:
    out: list = []
    for u, e in _syllables(word):
        e = pres.normalize_exponent(u, e)
        if not e:
            continue
        j = len(out) - 1
        while j >= 0:
            w, f = out[j]
            if w == u:
                merged = pres.normalize_exponent(u, f + e)
                if merged:
                    out[j] = (u, merged)
                else:
                    del out[j]
                break
            if not pres.commute(w, u):
                j = -1
                break
            j -= 1
        if j < 0:
            out.append((u, e))
    return NormalForm(pres, _shuffle(pres, out))


def parse_word(pres: GPPresentation, text: str) -> NormalForm:
    """Read words such as ``a^2.b.c^-1`` (``1`` is the identity)."""
    text = text.strip()
    if text in ("", "1"):
        return pres.identity()
    labels = {vertex_label(v): v for v in pres.graph.vertices}
    syllables = []
    for token in text.replace(" ", ".").split("."):
        if not token:
            continue
        name, _, power = token.partition("^")
        if name not in labels:
            raise PresentationError(f"unknown vertex {name!r}")
        try:
            syllables.append((labels[name], int(power) if power else 1))
        except ValueError:
            raise PresentationError(f"bad exponent in {token!r}") from None
    return reduce(pres, syllables)


def group_op(
    pres: GPPresentation, x: NormalForm, y: Optional[NormalForm] = None, op: str = "multiply"
) -> NormalForm:
    if op == "multiply":
        if y is None:
            raise ValueError("multiplication needs two elements")
        _check_presentation(pres, x, y)
        return reduce(pres, x.syllables + y.syllables)
    if op == "invert":
        _check_presentation(pres, x)
        return reduce(pres, [(u, -e) for u, e in reversed(x.syllables)])
    raise ValueError(f"Invalid operation '{op}'. Valid options: \"multiply\", \"invert\"")


def multiply(pres: GPPresentation, *elements: NormalForm) -> NormalForm:
    result = pres.identity()
    for x in elements:
        result = group_op(pres, result, x)
    return result


def inverse(pres: GPPresentation, x: NormalForm) -> NormalForm:
    return group_op(pres, x, op="invert")


def parabolic_membership(pres: GPPresentation, g: NormalForm, support: Iterable) -> bool:
    _check_presentation(pres, g)
    return g.support <= frozenset(support)


def link_of(pres: GPPresentation, vertices: Iterable) -> frozenset:
    """Vertices adjacent to every vertex of the given set."""
    common = frozenset(pres.graph.vertices)
    for v in vertices:
        common &= pres.graph.neighbors(v)
    return common


def _right_extremal(pres: GPPresentation, syllables: tuple, support: frozenset) -> Optional[int]:
    for i in range(len(syllables) - 1, -1, -1):
        u = syllables[i][0]
        if u in support and all(pres.commute(u, w) for w, _ in syllables[i + 1:]):
            return i
    return None


def _left_extremal(pres: GPPresentation, syllables: tuple, support: frozenset) -> Optional[int]:
    for i, (u, _) in enumerate(syllables):
        if u in support and all(pres.commute(u, w) for w, _ in syllables[:i]):
            return i
    return None


def coset_canonical(pres: GPPresentation, g: NormalForm, support: Iterable) -> ParabolicCoset:
    _check_presentation(pres, g)
    support = frozenset(support)
    for v in support:
        pres.order(v)
    syllables = g.syllables
    while True:
        i = _right_extremal(pres, syllables, support)
        if i is None:
            break
        syllables = syllables[:i] + syllables[i + 1:]
    return ParabolicCoset(support=support, rep=reduce(pres, syllables))


def same_coset(pres: GPPresentation, g: NormalForm, h: NormalForm, support: Iterable) -> bool:
    """Decide g<L> == h<L> by canonical forms and by the membership of g^-1 h; both must agree."""
    support = frozenset(support)
    by_forms = coset_canonical(pres, g, support) == coset_canonical(pres, h, support)
    by_membership = parabolic_membership(pres, multiply(pres, inverse(pres, g), h), support)
    if by_forms != by_membership:
        witness = (g.render(), h.render(), tuple(sorted(map(vertex_label, support))))
        raise InvariantViolation("coset equality tests disagree", witness)
    return by_forms


def double_coset_reduce(
    pres: GPPresentation, left: Iterable, k: NormalForm, right: Iterable
) -> tuple:
    """(a, m, b) with k = a.m.b, a in <left>, b in <right>, m stripped on both sides."""
    _check_presentation(pres, k)
    left, right = frozenset(left), frozenset(right)
    a, b = [], []
    syllables = k.syllables
    while True:
        i = _left_extremal(pres, syllables, left)
        if i is not None:
            a.append(syllables[i])
            syllables = syllables[:i] + syllables[i + 1:]
            continue
        i = _right_extremal(pres, syllables, right)
        if i is not None:
            b.insert(0, syllables[i])
            syllables = syllables[:i] + syllables[i + 1:]
            continue
        break
    a, m, b = reduce(pres, a), reduce(pres, syllables), reduce(pres, b)
    if multiply(pres, a, m, b) != k:
        raise InvariantViolation("double coset stripping does not recompose", (k.render(),))
    return a, m, b


def conjugate_parabolic_intersection(
    pres: GPPresentation, g: NormalForm, first: Iterable, h: NormalForm, second: Iterable
) -> tuple:
    """(p, core) with g<first>g^-1 meet h<second>h^-1 equal to p<core>p^-1."""
    first, second = frozenset(first), frozenset(second)
    a, m, _ = double_coset_reduce(pres, first, multiply(pres, inverse(pres, g), h), second)
    core = first & second
    if not m.is_identity():
        core &= link_of(pres, m.support)
    return multiply(pres, g, a), core


def parabolic_is_infinite(pres: GPPresentation, core: Iterable) -> bool:
    core = pres.graph.ordered(core)
    if any(pres.order(v) == INFINITE for v in core):
        return True
    return any(not pres.graph.has_edge(u, v) for u, v in itertools.combinations(core, 2))


def gp_hyperplane(pres: GPPresentation, g: NormalForm, u) -> GPHyperplane:
    """The hyperplane dual to the clique g<u>; its carrier is g<star(u)>."""
    star = neighborhood(pres.graph, u, "star")
    return GPHyperplane(label=u, carrier=coset_canonical(pres, g, star))


def hyperplane_crosses_coset(pres: GPPresentation, H: GPHyperplane, c: ParabolicCoset) -> bool:
    if H.label not in c.support:
        return False
    k = multiply(pres, inverse(pres, H.carrier.rep), c.rep)
    _, m, _ = double_coset_reduce(pres, H.carrier.support, k, c.support)
    return m.is_identity()


def cic_simplex_test(pres: GPPresentation, cosets: list) -> bool:
    if not cosets:
        raise ValueError("empty coset list")
    p, core = cosets[0].rep, cosets[0].support
    for c in cosets[1:]:
        p, core = conjugate_parabolic_intersection(pres, p, core, c.rep, c.support)
        if not core:
            return False
    return parabolic_is_infinite(pres, core)


def _letters(pres: GPPresentation, max_exponent: int) -> list:
    letters = []
    for u, n in zip(pres.graph.vertices, pres.orders):
        if n == INFINITE:
            powers = [e for k in range(1, max_exponent + 1) for e in (k, -k)]
        else:
            powers = list(range(1, n))
        letters.extend((u, e) for e in powers)
    return letters


def elements_up_to(
    pres: GPPresentation, radius: int, max_exponent: int = 1, guard: Optional[int] = None
) -> list:
    """All elements of syllable length at most `radius`; infinite exponents bounded."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    limit = guard if guard is not None else get_config().ball_guard
    letters = _letters(pres, max_exponent)
    seen = {pres.identity()}
    layer = [pres.identity()]
    for length in range(1, radius + 1):
        fresh = []
        for x in layer:
            for u, e in letters:
                if x.syllables and x.syllables[-1][0] == u:
                    continue
                y = reduce(pres, x.syllables + ((u, e),))
                if len(y) == length and y not in seen:
                    seen.add(y)
                    fresh.append(y)
                    if len(seen) > limit:
                        raise GuardExceeded("group element enumeration", len(seen), limit)
        layer = fresh
    return sorted(seen, key=NormalForm.sort_key)


def common_crossing_hyperplane_search(
    pres: GPPresentation, cosets: list, radius: int, max_exponent: int = 1
) -> Optional[GPHyperplane]:
    """First hyperplane g.J_u with |g| <= radius crossing every coset, if any."""
    labels = frozenset.intersection(*(c.support for c in cosets))
    seen = set()
    for g in elements_up_to(pres, radius, max_exponent):
        for u in pres.graph.ordered(labels):
            H = gp_hyperplane(pres, g, u)
            if H in seen:
                continue
            seen.add(H)
            if all(hyperplane_crosses_coset(pres, H, c) for c in cosets):
                return H
    return None


def _family_supports(pres: GPPresentation, family) -> list:
    g = pres.graph
    if family == "maximal-joins":
        return maximal_joins(g)
    if family == "maximal-cliques":
        return maximal_cliques(g)
    if isinstance(family, str):
        raise ValueError(
            f"Invalid family '{family}'. Valid options: \"maximal-joins\", \"maximal-cliques\", "
            "or an explicit list of vertex sets"
        )
    supports = []
    for s in family:
        s = frozenset(s)
        for v in s:
            pres.order(v)
        supports.append(s)
    return supports


def cic_fragment(
    pres: GPPresentation,
    family,
    radius: int,
    max_dim: int = 2,
    max_exponent: int = 1,
) -> CICFragment:
    """Cosets with representatives of length <= radius and their exactly decided simplices."""
    if not pres.graph.is_connected():
        raise GraphError("disconnected input")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    config = get_config()
    supports = _family_supports(pres, family)
    elements = elements_up_to(pres, radius, max_exponent, guard=config.coset_guard)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        candidates = list(
            pool.map(
                lambda pair: coset_canonical(pres, pair[1], pair[0]),
                itertools.product(supports, elements),
            )
        )
        vertices = list(dict.fromkeys(candidates))
        if len(vertices) > config.coset_guard:
            raise GuardExceeded("coset intersection fragment", len(vertices), config.coset_guard)

        simplices = {(i,) for i in range(len(vertices))}
        level = sorted(simplices)
        for _ in range(max_dim):
            proposals = []
            for face in level:
                for j in range(face[-1] + 1, len(vertices)):
                    grown = face + (j,)
                    if all(grown[:i] + grown[i + 1:] in simplices for i in range(len(grown))):
                        proposals.append(grown)
            verdicts = pool.map(
                lambda s: cic_simplex_test(pres, [vertices[i] for i in s]), proposals
            )
            level = [s for s, ok in zip(proposals, verdicts) if ok]
            simplices.update(level)
            if not level:
                break

    maximal = sorted(
        s for s in simplices
        if not any(len(t) > len(s) and set(s) <= set(t) for t in simplices)
    )
    logger.info(
        f"coset fragment: {len(vertices)} cosets, {len(maximal)} maximal simplices, radius {radius}"
    )
    return CICFragment(
        vertices=tuple(vertices), simplices=tuple(maximal), radius=radius, max_dim=max_dim
    )


def qm_ball(pres: GPPresentation, radius: int) -> QMBall:
    """Ball of the quasi-median Cayley graph; facts are trusted up to radius - 2."""
    if not pres.all_finite():
        raise PresentationError("Cayley balls need finite vertex groups")
    if radius < 1:
        raise ValueError("radius must be at least 1")
    elements = elements_up_to(pres, radius, guard=get_config().ball_guard)
    by_label = {x.render(): x for x in elements}
    present = set(elements)
    letters = _letters(pres, 1)
    edges = set()
    for x in elements:
        for u, e in letters:
            y = reduce(pres, x.syllables + ((u, e),))
            if y in present:
                edges.add(frozenset((x.render(), y.render())))
    graph = build_graph(by_label, (tuple(e) for e in edges))
    return QMBall(graph=graph, trust_radius=radius - 2, elements=by_label)


def edge_label(pres: GPPresentation, x: NormalForm, y: NormalForm) -> object:
    """The vertex of the single syllable x^-1 y labelling the Cayley edge from x to y."""
    step = multiply(pres, inverse(pres, x), y)
    if len(step) != 1:
        raise PresentationError(f"{x.render()} and {y.render()} are not adjacent")
    return step.syllables[0][0]
