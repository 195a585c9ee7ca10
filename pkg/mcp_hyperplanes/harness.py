"""Verification runs over quasi-median graphs, corpora and graph-product presentations.

Every check ends as a `CheckResult` with status "pass", "fail" or "skipped". Homotopy
statements are tested through their necessary consequences: equal integer homology in
every degree and equal numbers of components. Reports therefore say
"homology-consistent", never more.
"""

import hashlib
import itertools
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import networkx as nx

from .complexes import (
    GatedFamily,
    SimplicialComplex,
    contiguity_witnesses,
    family_predicates,
    flag_completion,
    hyperplane_complex,
    join_complex,
    local_complex,
    model_complex,
    named_family,
    relative_contact_complex,
    skewering_complex,
)
from .graph_core import (
    Graph,
    GraphError,
    GuardExceeded,
    blocks,
    build_graph,
    from_networkx,
    maximal_cliques,
    neighborhood,
    vertex_label,
)
from .graph_products import (
    INFINITE,
    GPPresentation,
    cic_simplex_test,
    common_crossing_hyperplane_search,
    conjugate_parabolic_intersection,
    coset_canonical,
    edge_label,
    elements_up_to,
    inverse,
    multiply,
    parabolic_membership,
    qm_ball,
    reduce,
    same_coset,
)
from .homology import (
    compare_wedge_supports,
    euler_characteristic,
    homology,
    same_homology,
    wedge_support,
)
from .mcp_env import get_config
from .qm_engine import (
    EXHAUSTIVE_DISTANCE_LIMIT,
    InvariantViolation,
    NotGatedError,
    PreconditionError,
    QMGraph,
    carrier_intersection_decomposition,
    compute_hyperplanes,
    contact_graph,
    gate,
    gate_image,
    hamming,
    is_gated,
    load_quasi_median,
    maximal_prisms,
    prisms_through,
    random_quasi_median,
    simplex_graph,
    span_prism,
    transversality_graph,
)

logger = logging.getLogger(__name__)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
FAMILY_NAMES = ("canonical-star", "prisms", "whole")


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    status: str
    message: str = ""
    witness: object = None
    seconds: float = field(default=0.0, compare=False)

    def to_dict(self, timings: bool = False) -> dict:
        data = {"check": self.check_id, "status": self.status}
        if self.message:
            data["message"] = self.message
        if self.witness is not None:
            data["witness"] = self.witness
        if timings:
            data["seconds"] = round(self.seconds, 4)
        return data


@dataclass(frozen=True)
class TheoremReport:
    subject: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict(timings) for c in self.checks],
        }


@dataclass(frozen=True)
class CorpusSpec:
    """What `run_corpus` generates; the same spec always expands to the same corpus."""

    seed: int = 0
    count: int = 50
    max_vertices: int = 200
    steps: int = 5
    families: tuple = ("canonical-star", "whole")
    named: bool = True

    @classmethod
    def empty(cls) -> "CorpusSpec":
        return cls(count=0, named=False)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    seed: int
    vertices: int = 0
    report: Optional[TheoremReport] = None
    skipped: str = ""

    def to_dict(self, timings: bool = False) -> dict:
        data = {"name": self.name, "seed": self.seed, "vertices": self.vertices}
        if self.report is None:
            data["status"] = SKIPPED
            data["reason"] = self.skipped
        else:
            data["status"] = PASS if self.report.passed else FAIL
            data["checks"] = [c.to_dict(timings) for c in self.report.checks]
        return data


@dataclass(frozen=True)
class CorpusReport:
    spec: CorpusSpec
    entries: tuple

    @property
    def failures(self) -> int:
        return sum(len(e.report.failures) for e in self.entries if e.report is not None)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "seed": self.spec.seed,
            "count": self.spec.count,
            "max_vertices": self.spec.max_vertices,
            "graphs": len(self.entries),
            "skipped": sum(1 for e in self.entries if e.report is None),
            "failures": self.failures,
            "passed": self.passed,
            "entries": [e.to_dict(timings) for e in self.entries],
        }


@dataclass(frozen=True)
class RaagVerdict:
    invariant: str
    verdict: str
    signatures: tuple
    differing_degrees: tuple

    @property
    def distinguished(self) -> bool:
        return self.verdict.startswith("distinguished")


def serialize(obj):
    """Plain JSON-friendly form of a witness: labels for vertices, lists for collections."""
    if isinstance(obj, (frozenset, set)):
        return sorted(serialize(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return [serialize(x) for x in obj]
    if isinstance(obj, dict):
        return {str(serialize(k)): serialize(v) for k, v in obj.items()}
    if isinstance(obj, (bool, int)) or obj is None:
        return obj
    return vertex_label(obj)


def _run(check_id: str, body: Callable[[], tuple]) -> CheckResult:
    """Run one check; `body` returns (status, message, witness)."""
    started = time.perf_counter()
    try:
        status, message, witness = body()
    except GuardExceeded as e:
        status, message, witness = SKIPPED, str(e), None
    except (InvariantViolation, NotGatedError, PreconditionError) as e:
        status, message, witness = FAIL, str(e), serialize(e.witness)
    elapsed = time.perf_counter() - started
    if status == FAIL:
        logger.error(f"check {check_id} failed: {message}")
    return CheckResult(check_id, status, message, serialize(witness), elapsed)


def _homology_consistent(first: SimplicialComplex, second: SimplicialComplex) -> tuple:
    h1, h2 = homology(first), homology(second)
    if first.component_count() != second.component_count():
        return FAIL, "component counts differ", [first.component_count(), second.component_count()]
    if not same_homology(h1, h2):
        return FAIL, "homology differs", [h1.render(), h2.render()]
    return PASS, "homology-consistent", None


def _graph_seed(g: Graph) -> int:
    digest = hashlib.sha256()
    for u, v in g.edge_list:
        digest.update(f"{vertex_label(u)}|{vertex_label(v)};".encode())
    digest.update(f"#{len(g)}".encode())
    return int.from_bytes(digest.digest()[:8], "big")


def _contact_checks(X: QMGraph) -> list:
    def contact_acyclic():
        K = hyperplane_complex(X, "contact")
        if K.component_count() != 1:
            return FAIL, "contact complex is disconnected", K.component_count()
        reduced = homology(K, reduced=True)
        if not reduced.is_acyclic():
            return FAIL, "contact complex has reduced homology", reduced.render()
        chi = euler_characteristic(K)
        if chi != 1:
            return FAIL, "Euler characteristic of an acyclic complex differs from 1", chi
        return PASS, "connected and reduced-acyclic", None

    def crossing_model():
        K = hyperplane_complex(X, "crossing")
        return _homology_consistent(K, model_complex(X, "crossing"))

    def contiguity():
        K = hyperplane_complex(X, "contiguity")
        for face, clique in contiguity_witnesses(X).items():
            ids = [int(name.split(":")[1]) for name in face]
            for j in ids:
                if not clique <= X.carrier(j):
                    return FAIL, "witness clique outside a carrier", [sorted(face), clique]
        if not all(f in K.witnesses for f in K.facets):
            return FAIL, "maximal face without witness clique", None
        return PASS, "", None

    return [
        _run("contact.acyclic", contact_acyclic),
        _run("crossing.model", crossing_model),
        _run("contiguity.witnesses", contiguity),
    ]


def _family_checks(X: QMGraph, name: str, family: GatedFamily) -> list:
    predicates = family_predicates(X, family)
    cut_vertices = blocks(X.graph).cut_vertices
    two_connected = not cut_vertices and len(X.graph) >= 2

    def relcont_model():
        if not two_connected:
            return SKIPPED, "graph has a cut vertex", serialize(X.graph.ordered(cut_vertices)[:1])
        if not predicates.star_covering:
            return SKIPPED, "family is not star-covering", predicates.witnesses["star_covering"]
        relative = relative_contact_complex(X, family)
        return _homology_consistent(relative, model_complex(X, "relcont", family))

    def local_links():
        if not predicates.prism_covering:
            return SKIPPED, "family is not prism-covering", predicates.witnesses["prism_covering"]
        for x in X.graph.vertices:
            L = local_complex(X, x, "L", family)
            status, message, witness = _homology_consistent(L, local_complex(X, x, "sL", family))
            if status == FAIL:
                return FAIL, f"{message} at a vertex", [x, witness]
            if two_connected and L.component_count() != 1:
                return FAIL, "edge link is disconnected", [x, L.component_count()]
        return PASS, "homology-consistent at every vertex", None

    def skewering():
        if not predicates.parallelism_free:
            return SKIPPED, "family has parallel members", predicates.witnesses["parallelism_free"]
        return _homology_consistent(
            skewering_complex(X, family), relative_contact_complex(X, family)
        )

    return [
        _run(f"relcont.model[{name}]", relcont_model),
        _run(f"local.links[{name}]", local_links),
        _run(f"skewering[{name}]", skewering),
    ]


def _axiom_checks(X: QMGraph, rng: random.Random) -> list:
    g = X.graph
    config = get_config()

    def separation():
        for h in X.hyperplanes:
            if len(X.hyperplane(h.id).sectors) < 2:
                return FAIL, "hyperplane does not separate", h.id
        return PASS, "", None

    def distance():
        labels = {v: tuple(X.sector_of(h.id)[v] for h in X.hyperplanes) for v in g.vertices}
        if len(g) <= EXHAUSTIVE_DISTANCE_LIMIT:
            pairs = itertools.combinations(g.vertices, 2)
        else:
            pairs = [
                (rng.choice(g.vertices), rng.choice(g.vertices))
                for _ in range(config.pair_samples)
            ]
        for u, v in pairs:
            separating = sum(a != b for a, b in zip(labels[u], labels[v]))
            if separating != g.distance(u, v):
                return FAIL, "distance differs from separating hyperplanes", [u, v]
        return PASS, "", None

    pieces = []
    for h in X.hyperplanes:
        geometry = X.hyperplane(h.id)
        pieces.append(("carrier", h.id, geometry.carrier))
        pieces.extend(("sector", h.id, s) for s in geometry.sectors)
        pieces.extend(("fibre", h.id, f) for f in geometry.fibres)

    def gatedness():
        for kind, j, piece in pieces:
            verdict = is_gated(X, piece)
            if not verdict.gated:
                message = f"{kind} of hyperplane {j} is not gated ({verdict.reason})"
                return FAIL, message, verdict.witness
        return PASS, "", None

    def helly():
        if len(pieces) < 3:
            return SKIPPED, "fewer than three gated pieces", None
        tested = 0
        for _ in range(config.helly_samples):
            a, b, c = (rng.choice(pieces)[2] for _ in range(3))
            if a & b and b & c and a & c:
                tested += 1
                if not a & b & c:
                    return FAIL, "Helly property fails", [a, b, c]
        return PASS, f"{tested} pairwise intersecting triples", None

    def projections():
        if len(pieces) < 2:
            return SKIPPED, "fewer than two gated pieces", None
        for _ in range(min(config.helly_samples, 50)):
            Y, Z = rng.choice(pieces)[2], rng.choice(pieces)[2]
            gate_image(X, Y, Z)
            x, y = rng.choice(g.vertices), rng.choice(g.vertices)
            if g.distance(gate(X, x, Z), gate(X, y, Z)) > g.distance(x, y):
                return FAIL, "gate projection increases a distance", [x, y]
        return PASS, "", None

    def prism_bijection():
        prisms = maximal_prisms(X)
        families = {p.hyperplanes for p in prisms}
        expected = {tuple(sorted(c)) for c in nx.find_cliques(transversality_graph(X))}
        if X.hyperplanes and families != expected:
            return FAIL, "maximal prisms do not match maximal transverse families", None
        if len(g) > 30:
            return PASS, "matched transverse families", None
        spanned = set()
        for o in g.vertices:
            local = transversality_graph(X).subgraph(X.vertex_hyperplanes[o])
            for ids in itertools.chain([()], nx.enumerate_all_cliques(local)):
                spanned.add(span_prism(X, o, tuple(sorted(ids))).vertices)
        brute = {s for s in spanned if not any(s < t for t in spanned)}
        if brute != {p.vertices for p in prisms}:
            return FAIL, "maximal prisms differ from brute-force enumeration", None
        return PASS, "matched brute-force enumeration", None

    def carrier_decomposition():
        for p in maximal_prisms(X):
            if p.hyperplanes:
                o = g.ordered(p.vertices)[0]
                carrier_intersection_decomposition(X, p.hyperplanes, o)
        return PASS, "", None

    checks = [
        _run("axioms.separation", separation),
        _run("axioms.distance", distance),
        _run("axioms.gated_pieces", gatedness),
        _run("axioms.helly", helly),
        _run("axioms.gate_projection", projections),
        _run("axioms.prism_bijection", prism_bijection),
        _run("axioms.carrier_decomposition", carrier_decomposition),
    ]
    try:
        prisms = _prism_sample(X, rng)
    except InvariantViolation as e:
        failure = CheckResult("axioms.prisms", FAIL, str(e), serialize(e.witness))
        return checks + [failure]
    return checks + [check_prism_absorption(X, prisms), check_good_prisms(X, prisms)]


def _prism_sample(X: QMGraph, rng: random.Random, limit: int = 50) -> list:
    """Maximal prisms plus every prism through a sample of maximal cliques."""
    g = X.graph
    found = {p.vertices: p for p in maximal_prisms(X)}
    cliques = [c for c in X.maximal_cliques if len(c) >= 2]
    if len(cliques) > limit:
        cliques = rng.sample(cliques, limit)
    for clique in cliques:
        for p in prisms_through(X, clique):
            found.setdefault(p.vertices, p)
    return sorted(found.values(), key=lambda p: (p.dimension, g.set_key(p.vertices)))


def check_prism_absorption(X: QMGraph, prisms: list) -> CheckResult:
    """A hyperplane crossing a prism holds the whole prism in its carrier."""

    def body():
        for p in prisms:
            for j in p.hyperplanes:
                if not p.vertices <= X.carrier(j):
                    return FAIL, f"prism leaves the carrier of hyperplane {j}", [p.vertices, j]
        return PASS, f"{len(prisms)} prisms", None

    return _run("axioms.prism_absorption", body)


def check_good_prisms(X: QMGraph, prisms: list) -> CheckResult:
    """A prism inside a carrier extends to a larger prism crossed by that hyperplane."""
    g = X.graph

    def body():
        extended = 0
        for p in prisms:
            o = g.ordered(p.vertices)[0]
            for h in X.hyperplanes:
                if h.id in p.hyperplanes or not p.vertices <= X.carrier(h.id):
                    continue
                if not all(X.are_transverse(h.id, k) for k in p.hyperplanes):
                    message = f"no prism crossed by hyperplane {h.id} extends it"
                    return FAIL, message, [p.vertices, h.id]
                q = span_prism(X, o, tuple(sorted(p.hyperplanes + (h.id,))))
                if not p.vertices < q.vertices:
                    message = f"extension by hyperplane {h.id} is not larger"
                    return FAIL, message, [p.vertices, h.id]
                extended += 1
        return PASS, f"{extended} extensions found", None

    return _run("axioms.good_prism", body)


def _graph_checks(X: QMGraph) -> list:
    def contact_connected():
        if not nx.is_connected(contact_graph(X)):
            return FAIL, "contact graph is disconnected", None
        return PASS, "", None

    def crossing_connected():
        has_cut = bool(blocks(X.graph).cut_vertices)
        connected = nx.is_connected(transversality_graph(X))
        if connected == has_cut:
            message = "crossing graph connectivity does not match 2-connectivity"
            return FAIL, message, [connected, has_cut]
        return PASS, "", None

    return [
        _run("graphs.contact_connected", contact_connected),
        _run("graphs.crossing_connected", crossing_connected),
    ]


def verify_graph(
    X: QMGraph, families: Optional[list] = None, subject: str = "graph"
) -> TheoremReport:
    """Run every structural check on a validated graph; `families` holds (name, family) pairs."""
    if not X.validated:
        failure = X.validation.violations[0] if X.validation and X.validation.violations else None
        message = failure.message if failure else "graph was not validated"
        witness = serialize(failure.witness) if failure else None
        return TheoremReport(subject, (CheckResult("validation", FAIL, message, witness),))
    if not X.hyperplanes:
        return TheoremReport(
            subject, (CheckResult("validation", SKIPPED, "single vertex, no hyperplanes"),)
        )
    checks = [CheckResult("validation", PASS)]
    checks += _contact_checks(X)
    for i, item in enumerate(families or []):
        name, family = item if isinstance(item, tuple) else (f"family-{i}", item)
        checks += _family_checks(X, name, family)
    checks += _axiom_checks(X, random.Random(_graph_seed(X.graph)))
    checks += _graph_checks(X)
    logger.info(f"verified {subject}: {sum(c.status == FAIL for c in checks)} failures")
    return TheoremReport(subject, tuple(checks))


def verify_with_named_families(
    X: QMGraph, names, subject: str = "graph", extra_families: Iterable = ()
) -> TheoremReport:
    """Certify the named families first; a family that fails to be gated is a failed check.

    `extra_families` holds already certified (name, family) pairs run after the named ones.
    """
    families, extra = [], []
    if X.validated:
        for name in names:
            try:
                families.append((name, named_family(X, name)))
            except (NotGatedError, InvariantViolation) as e:
                extra.append(CheckResult(f"family[{name}]", FAIL, str(e), serialize(e.witness)))
        families += list(extra_families)
    report = verify_graph(X, families, subject)
    return TheoremReport(subject, report.checks + tuple(extra))


def _path(n: int) -> Graph:
    return from_networkx(nx.path_graph(n))


def _triangle_chain(k: int) -> Graph:
    edges = []
    for i in range(k):
        a, b, c = 2 * i, 2 * i + 1, 2 * i + 2
        edges += [(a, b), (b, c), (a, c)]
    return build_graph(range(2 * k + 1), edges)


def named_corpus() -> list:
    """Small hand-picked graphs, several with cut vertices."""
    cycle5 = from_networkx(nx.cycle_graph(5))
    return [
        ("path-5", lambda: load_quasi_median(_path(5))),
        ("path-3", lambda: load_quasi_median(_path(3))),
        ("star-3", lambda: load_quasi_median(from_networkx(nx.star_graph(3)))),
        ("triangle-chain-2", lambda: load_quasi_median(_triangle_chain(2))),
        ("triangle-chain-3", lambda: load_quasi_median(_triangle_chain(3))),
        ("hamming-2-2", lambda: hamming([2, 2])),
        ("hamming-2-2-2", lambda: hamming([2, 2, 2])),
        ("hamming-3-2", lambda: hamming([3, 2])),
        ("hamming-3-3", lambda: hamming([3, 3])),
        ("grid-3x3", lambda: load_quasi_median(from_networkx(nx.grid_2d_graph(3, 3)))),
        ("simplex-graph-c5", lambda: simplex_graph(cycle5)),
        ("simplex-graph-p4", lambda: simplex_graph(_path(4))),
    ]


def expand_corpus(spec: CorpusSpec) -> list:
    """(name, seed, factory) triples in report order."""
    entries = []
    if spec.named:
        entries += [(name, -1, factory) for name, factory in named_corpus()]
    rng = random.Random(spec.seed)
    for i in range(spec.count):
        seed = rng.randrange(2**31)
        entries.append(
            (
                f"random-{i:03d}",
                seed,
                lambda seed=seed: random_quasi_median(
                    seed, steps=spec.steps, max_vertices=spec.max_vertices
                ),
            )
        )
    return entries


def _verify_entry(spec: CorpusSpec, name: str, seed: int, factory) -> CorpusEntry:
    try:
        X = factory()
    except (GraphError, GuardExceeded, ValueError) as e:
        logger.warning(f"corpus entry {name} skipped: {e}")
        return CorpusEntry(name, seed, skipped=f"generator failure: {e}")
    except InvariantViolation as e:
        failure = CheckResult("generation", FAIL, str(e), serialize(e.witness))
        return CorpusEntry(name, seed, report=TheoremReport(name, (failure,)))
    if len(X.graph) > spec.max_vertices:
        return CorpusEntry(name, seed, len(X.graph), skipped="exceeds vertex bound")
    report = verify_with_named_families(X, spec.families, name)
    return CorpusEntry(name, seed, len(X.graph), report)


def run_corpus(spec: CorpusSpec) -> CorpusReport:
    for name in spec.families:
        if name not in FAMILY_NAMES:
            raise ValueError(f"Invalid family '{name}'. Valid options: {', '.join(FAMILY_NAMES)}")
    entries = expand_corpus(spec)
    with ThreadPoolExecutor(max_workers=get_config().workers) as pool:
        results = list(pool.map(lambda entry: _verify_entry(spec, *entry), entries))
    results.sort(key=lambda e: (e.seed, e.name))
    report = CorpusReport(spec, tuple(results))
    logger.info(f"corpus seed {spec.seed}: {len(results)} graphs, {report.failures} failures")
    return report


def domination_witness(gamma: Graph) -> Optional[tuple]:
    """Non-adjacent u, v with link(u) contained in star(v), if any."""
    for u, v in itertools.permutations(gamma.vertices, 2):
        if gamma.has_edge(u, v):
            continue
        if gamma.neighbors(u) <= neighborhood(gamma, v, "star"):
            return (u, v)
    return None


def raag_verdict(first: Graph, second: Graph, invariant: str = "join") -> RaagVerdict:
    if invariant not in ("join", "flag", "commensurability"):
        raise ValueError(
            f"Invalid invariant '{invariant}'. "
            "Valid options: \"join\", \"flag\", \"commensurability\""
        )
    for gamma in (first, second):
        if not gamma.is_connected():
            raise GraphError("disconnected input")
    if invariant == "flag":
        for gamma in (first, second):
            pair = domination_witness(gamma)
            if pair is not None:
                raise PreconditionError(
                    "flag comparison needs graphs without a dominated non-adjacent pair",
                    tuple(vertex_label(v) for v in pair),
                )
        complexes = [flag_completion(first), flag_completion(second)]
    else:
        complexes = [join_complex(first), join_complex(second)]

    signatures = tuple(homology(K, reduced=True) for K in complexes)
    comparison = compare_wedge_supports(*(wedge_support(s) for s in signatures))
    if comparison.distinguished:
        if invariant == "commensurability":
            verdict = "distinguished: not commensurable"
        else:
            verdict = "distinguished: not quasi-isometric"
    else:
        verdict = "not distinguished by this invariant"
    return RaagVerdict(invariant, verdict, signatures, comparison.differing_degrees)


def _random_support(vertices: tuple, rng: random.Random) -> frozenset:
    chosen = frozenset(v for v in vertices if rng.random() < 0.5)
    return chosen or frozenset([rng.choice(vertices)])


def _presentation_checks(
    pres: GPPresentation, samples: int, rng: random.Random, pool: list
) -> list:
    vertices = pres.graph.vertices
    identity = pres.identity()

    def group_laws():
        for _ in range(samples):
            x, y, z = (rng.choice(pool) for _ in range(3))
            if multiply(pres, multiply(pres, x, y), z) != multiply(pres, x, multiply(pres, y, z)):
                return FAIL, "associativity", [x.render(), y.render(), z.render()]
            if multiply(pres, identity, x) != x or multiply(pres, x, identity) != x:
                return FAIL, "identity law", x.render()
            if not multiply(pres, x, inverse(pres, x)).is_identity():
                return FAIL, "inverse law", x.render()
            if reduce(pres, x) != x:
                return FAIL, "normal form is not idempotent", x.render()
        return PASS, f"{samples} random triples", None

    def coset_tests():
        for _ in range(samples):
            g, h = rng.choice(pool), rng.choice(pool)
            support = _random_support(vertices, rng)
            same_coset(pres, g, h, support)
            c = coset_canonical(pres, g, support)
            if not same_coset(pres, g, c.rep, support):
                return FAIL, "canonical representative leaves the coset", [g.render(), c.render()]
        return PASS, "", None

    def conjugate_intersection():
        for _ in range(samples):
            g, h = rng.choice(pool), rng.choice(pool)
            first, second = _random_support(vertices, rng), _random_support(vertices, rng)
            p, core = conjugate_parabolic_intersection(pres, g, first, h, second)
            g_inv, h_inv, p_inv = inverse(pres, g), inverse(pres, h), inverse(pres, p)
            for x in pool:
                if parabolic_membership(pres, x, core):
                    y = multiply(pres, p, x, p_inv)
                    inside_first = parabolic_membership(pres, multiply(pres, g_inv, y, g), first)
                    inside_second = parabolic_membership(pres, multiply(pres, h_inv, y, h), second)
                    if not (inside_first and inside_second):
                        witness = [g.render(), h.render(), x.render()]
                        return FAIL, "conjugated core escapes an intersected subgroup", witness
                if parabolic_membership(pres, x, first):
                    y = multiply(pres, g, x, g_inv)
                    if parabolic_membership(pres, multiply(pres, h_inv, y, h), second):
                        if not parabolic_membership(pres, multiply(pres, p_inv, y, p), core):
                            witness = [g.render(), h.render(), x.render()]
                            return FAIL, "common element outside the computed core", witness
        return PASS, f"{samples} random instances", None

    def cic_agreement():
        if any(n != INFINITE for n in pres.orders):
            return SKIPPED, "crossing hyperplanes decide simplices for infinite groups only", None
        supports = [neighborhood(pres.graph, v, "star") for v in vertices]
        short = [x for x in pool if len(x) <= 1]
        tested = 0
        for _ in range(min(samples, 50)):
            cosets = [
                coset_canonical(pres, rng.choice(short), rng.choice(supports)) for _ in range(2)
            ]
            H = common_crossing_hyperplane_search(pres, cosets, radius=1)
            if H is not None:
                tested += 1
                if not cic_simplex_test(pres, cosets):
                    return FAIL, "common crossing hyperplane but finite intersection", [
                        c.render() for c in cosets
                    ]
        return PASS, f"{tested} witnessed simplices", None

    return [
        _run("gp.group_laws", group_laws),
        _run("gp.coset_tests", coset_tests),
        _run("gp.conjugate_intersection", conjugate_intersection),
        _run("gp.cic_agreement", cic_agreement),
    ]


def _ball_checks(pres: GPPresentation, radius: int) -> list:
    if not pres.all_finite():
        reason = "Cayley balls need finite vertex groups"
        return [
            CheckResult(f"gp.ball_{kind}", SKIPPED, reason)
            for kind in ("cliques", "carriers", "labels", "slink", "dimension", "two_connected")
        ]
    gamma = pres.graph
    state: dict = {}

    def load():
        if "X" not in state:
            ball = qm_ball(pres, radius)
            state["ball"] = ball
            state["X"] = compute_hyperplanes(ball.graph)
        return state["ball"], state["X"]

    def generator_label(u) -> str:
        return pres.generator(u).render()

    def cliques():
        ball, X = load()
        found = {c for c in maximal_cliques(ball.graph) if "1" in c}
        expected = {
            frozenset(["1"] + [pres.generator(u, e).render() for e in range(1, pres.order(u))])
            for u in gamma.vertices
        }
        if found != expected:
            witness = sorted(found ^ expected, key=sorted)
            return FAIL, "cliques through the identity are not the vertex groups", witness
        return PASS, "", None

    def carriers():
        ball, X = load()
        if ball.trust_radius < 0:
            return SKIPPED, "trust radius is negative", None
        for u in gamma.vertices:
            j = X.hyperplane_of("1", generator_label(u))
            star = neighborhood(gamma, u, "star")
            found = {x for x in X.carrier(j) if len(ball.elements[x]) <= ball.trust_radius}
            expected = {
                label
                for label, x in ball.elements.items()
                if len(x) <= ball.trust_radius and x.support <= star
            }
            if found != expected:
                return FAIL, "carrier differs from the star coset", [u, sorted(found ^ expected)]
        return PASS, "", None

    def labels():
        ball, X = load()
        label_of = {}
        for (x, y), j in X.edge_hyperplane.items():
            u = edge_label(pres, ball.elements[x], ball.elements[y])
            if label_of.setdefault(j, u) != u:
                return FAIL, "hyperplane with two labels", [x, y]
        for j, k in X.transverse:
            if not gamma.has_edge(label_of[j], label_of[k]):
                witness = [label_of[j], label_of[k]]
                return FAIL, "transverse hyperplanes with non-adjacent labels", witness
        return PASS, "", None

    def slink():
        ball, X = load()
        if radius < 2:
            return SKIPPED, "radius too small for squares at the identity", None
        ids = {u: X.hyperplane_of("1", generator_label(u)) for u in gamma.vertices}
        skeleton = {
            frozenset((u, v))
            for u, v in itertools.combinations(gamma.vertices, 2)
            if X.are_transverse(ids[u], ids[v])
        }
        if skeleton != set(gamma.edges):
            return FAIL, "simplified link at the identity is not the defining graph", sorted(
                skeleton ^ set(gamma.edges), key=sorted
            )
        return PASS, "1-skeleton matches the defining graph", None

    def dimension():
        ball, X = load()
        omega = max(len(c) for c in maximal_cliques(gamma))
        if radius < omega:
            return SKIPPED, "radius below the clique number", None
        found = max((len(c) for c in nx.find_cliques(transversality_graph(X))), default=0)
        if found != omega:
            return FAIL, "cubical dimension differs from the clique number", [found, omega]
        return PASS, "", None

    def two_connected():
        # Boundary vertices of a truncated ball are often cut vertices; only the trusted
        # region is expected to be free of them.
        ball, X = load()
        if len(gamma) < 2 or not gamma.is_connected():
            return SKIPPED, "defining graph is disconnected or a single vertex", None
        trusted = sorted(
            v
            for v in blocks(ball.graph).cut_vertices
            if len(ball.elements[v]) <= ball.trust_radius
        )
        if trusted:
            return FAIL, "cut vertex inside the trust radius", trusted[:1]
        return PASS, f"no cut vertex within radius {ball.trust_radius}", None

    return [
        _run("gp.ball_cliques", cliques),
        _run("gp.ball_carriers", carriers),
        _run("gp.ball_labels", labels),
        _run("gp.ball_slink", slink),
        _run("gp.ball_dimension", dimension),
        _run("gp.ball_two_connected", two_connected),
    ]


def verify_presentation(
    pres: GPPresentation,
    radius: int = 3,
    samples: int = 200,
    seed: int = 0,
    max_exponent: int = 1,
    subject: str = "presentation",
) -> TheoremReport:
    rng = random.Random(seed)
    pool = elements_up_to(pres, 2, max_exponent)
    checks = _presentation_checks(pres, samples, rng, pool) + _ball_checks(pres, radius)
    return TheoremReport(subject, tuple(checks))
