"""Text formats, reports and the command-line dispatcher.

Exit codes: 0 success, 1 checks failed or graph rejected, 2 usage or input error,
3 a size guard was exceeded or an internal invariant failed.
"""

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv

from . import config as corpus_config
from .complexes import (
    GatedFamily,
    SimplicialComplex,
    hyperplane_complex,
    named_family,
    relative_contact_complex,
    skewering_complex,
)
from .graph_core import Graph, GraphError, GuardExceeded, build_graph, vertex_label
from .graph_products import GPPresentation, PresentationError, cic_fragment
from .harness import (
    FAMILY_NAMES,
    FAIL,
    CheckResult,
    raag_verdict,
    expand_corpus,
    run_corpus,
    serialize,
    verify_presentation,
    verify_with_named_families,
)
from .homology import SignatureMismatch, homology
from .mcp_env import get_config
from .qm_engine import (
    InvariantViolation,
    NotGatedError,
    PreconditionError,
    QMGraph,
    classify_pair,
    cubical_dimension,
    load_quasi_median,
    maximal_prisms,
)

logger = logging.getLogger(__name__)

TOOL_NAME = "mcp-hyperplanes"
TOOL_VERSION = "0.2.0"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3

COMPLEX_KINDS = ("contact", "crossing", "contiguity", "small_crossing", "relcont", "skewering")


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_graph_text(text: str) -> Graph:
    """Adjacency lists ``v: n1 n2 ...``; adjacency is closed symmetrically.

    Each edge may be listed once, from either end. A file that lists some edge from both
    ends is read as a full adjacency list, and then every entry has to be mirrored.
    """
    order: list = []
    declared: dict = {}
    mentions: list = []
    for number, line in _content_lines(text):
        head, sep, tail = line.partition(":")
        head = head.strip()
        if not sep or not head or len(head.split()) != 1:
            raise ParseError("expected 'vertex: neighbours'", number)
        if head in declared:
            raise ParseError(f"vertex {head!r} listed twice", number)
        declared[head] = number
        order.append(head)
        for other in tail.split():
            if other == head:
                raise ParseError(f"loop at {head!r}", number)
            mentions.append((number, head, other))
    if not order:
        raise ParseError("no vertices")
    edges = []
    for number, head, other in mentions:
        if other not in declared:
            raise ParseError(f"unknown vertex {other!r}", number)
        edges.append((head, other))
    listed = set(edges)
    if any((v, u) in listed for u, v in listed):
        for number, head, other in mentions:
            if (other, head) not in listed:
                raise ParseError(
                    f"{head!r} lists {other!r} but {other!r} does not list {head!r}", number
                )
    return build_graph(order, edges)


def parse_graph_file(path: Union[str, Path]) -> Graph:
    return parse_graph_text(Path(path).read_text())


def parse_presentation_text(text: str) -> GPPresentation:
    """``vertex name order`` lines, then ``edge a b`` lines; order 0 is infinite cyclic."""
    orders: dict = {}
    edges = []
    for number, line in _content_lines(text):
        fields = line.split()
        if fields[0] == "vertex" and len(fields) == 3:
            name = fields[1]
            if name in orders:
                raise ParseError(f"vertex {name!r} declared twice", number)
            try:
                order = int(fields[2])
            except ValueError:
                raise ParseError(f"order {fields[2]!r} is not an integer", number) from None
            if order == 1 or order < 0:
                raise PresentationError(
                    f"line {number}: vertex {name!r} has order {order}; "
                    "vertex groups are nontrivial cyclic (0 for infinite)"
                )
            orders[name] = order
        elif fields[0] == "edge" and len(fields) == 3:
            for endpoint in fields[1:]:
                if endpoint not in orders:
                    raise ParseError(f"unknown endpoint {endpoint!r}", number)
            if fields[1] == fields[2]:
                raise ParseError(f"loop at {fields[1]!r}", number)
            edges.append((fields[1], fields[2]))
        else:
            raise ParseError("expected 'vertex NAME ORDER' or 'edge A B'", number)
    if not orders:
        raise ParseError("no vertices")
    graph = build_graph(orders, edges)
    return GPPresentation.from_orders(graph, orders)


def parse_presentation_file(path: Union[str, Path]) -> GPPresentation:
    return parse_presentation_text(Path(path).read_text())


def parse_family_text(g: Graph, text: str) -> list:
    """One gated family member per line, as whitespace-separated vertex labels."""
    labels = {vertex_label(v): v for v in g.vertices}
    members = []
    for number, line in _content_lines(text):
        member = []
        for token in line.split():
            if token not in labels:
                raise ParseError(f"unknown vertex {token!r}", number)
            member.append(labels[token])
        members.append(frozenset(member))
    if not members:
        raise ParseError("empty family")
    return members


def parse_complex_text(text: str) -> SimplicialComplex:
    vertices, faces, block = [], [], None
    for number, line in _content_lines(text):
        if line in ("vertices:", "maximal_faces:"):
            block = line
        elif block == "vertices:":
            vertices.append(line)
        elif block == "maximal_faces:":
            faces.append(line.split())
        else:
            raise ParseError("content outside a block", number)
    return SimplicialComplex.from_faces(faces, vertices)


def format_graph(g: Graph) -> str:
    lines = []
    for v in g.vertices:
        around = " ".join(vertex_label(u) for u in g.ordered(g.neighbors(v)))
        lines.append(f"{vertex_label(v)}: {around}".rstrip())
    return "\n".join(lines) + "\n"


def format_presentation(pres: GPPresentation) -> str:
    g = pres.graph
    lines = [f"vertex {vertex_label(v)} {n}" for v, n in zip(g.vertices, pres.orders)]
    lines += [f"edge {vertex_label(u)} {vertex_label(v)}" for u, v in g.edge_list]
    return "\n".join(lines) + "\n"


def format_complex(K: SimplicialComplex) -> str:
    lines = ["vertices:"]
    lines += [f"  {v}" for v in K.vertices]
    lines.append("maximal_faces:")
    lines += ["  " + " ".join(sorted(f)) for f in K.facets]
    return "\n".join(lines) + "\n"


def format_edge_list(obj: Union[Graph, SimplicialComplex]) -> str:
    """1-skeleton as ``u -- v`` lines; isolated vertices on lines of their own."""
    if isinstance(obj, Graph):
        labels = [vertex_label(v) for v in obj.vertices]
        pairs = [(vertex_label(u), vertex_label(v)) for u, v in obj.edge_list]
    else:
        skeleton = obj.one_skeleton()
        labels = list(obj.vertices)
        pairs = sorted(tuple(sorted(e)) for e in skeleton.edges)
    touched = {v for pair in pairs for v in pair}
    lines = [f"{u} -- {v}" for u, v in pairs]
    lines += [v for v in labels if v not in touched]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    sections: list = field(default_factory=list)
    exit_status: int = EXIT_OK
    version: str = TOOL_VERSION

    def add_input(self, path: Union[str, Path]) -> None:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()

    def section(self, title: str, lines) -> None:
        self.sections.append((title, [str(line) for line in lines]))

    def render(self) -> str:
        out = [f"{TOOL_NAME} {self.version}", f"command: {self.command}"]
        out += [f"input {name} sha256:{digest}" for name, digest in self.inputs.items()]
        out.append(f"exit_status: {self.exit_status}")
        for title, lines in self.sections:
            out += ["", f"[{title}]"] + lines
        return "\n".join(out) + "\n"


def emit(obj, format: str = "report-text", path: Optional[Union[str, Path]] = None) -> str:
    if format == "report-text":
        text = obj.render()
    elif format == "complex-text":
        text = format_complex(obj)
    elif format == "edge-list":
        text = format_edge_list(obj)
    elif format == "graph-text":
        text = format_graph(obj)
    else:
        raise ValueError(
            f"Invalid format '{format}'. Valid options: \"report-text\", \"complex-text\", "
            "\"edge-list\", \"graph-text\""
        )
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def check_lines(checks, timings: bool = False) -> list:
    lines = []
    for check in checks:
        data = check.to_dict(timings) if isinstance(check, CheckResult) else check
        line = f"{data['check']}: {data['status']}"
        if data.get("message"):
            line += f" ({data['message']})"
        if "witness" in data:
            line += " witness=" + json.dumps(data["witness"], sort_keys=True)
        if "seconds" in data:
            line += f" [{data['seconds']}s]"
        lines.append(line)
    return lines


def _complex_lines(K: SimplicialComplex) -> list:
    lines = format_complex(K).splitlines()
    lines += homology(K).render()
    return lines


def _cmd_raag_compare(args) -> Report:
    report = Report("raag-compare")
    graphs = []
    for path in (args.first, args.second):
        report.add_input(path)
        graphs.append(parse_graph_file(path))
    verdict = raag_verdict(graphs[0], graphs[1], args.invariant)
    report.section("invariant", [verdict.invariant])
    for name, signature in zip(("first", "second"), verdict.signatures):
        report.section(f"signature {name}", signature.render())
    report.section("verdict", [verdict.verdict])
    if verdict.differing_degrees:
        report.section("differing degrees", [" ".join(map(str, verdict.differing_degrees))])
    return report


def analysis_sections(report: Report, X: QMGraph, kinds: list) -> None:
    g = X.graph
    report.section(
        "hyperplanes",
        [
            f"{h.label}: edges={len(h.edges)} carrier={len(X.carrier(h.id))} "
            f"sectors={len(X.hyperplane(h.id).sectors)} fibres={len(X.hyperplane(h.id).fibres)}"
            for h in X.hyperplanes
        ],
    )
    pairs = []
    for i, h in enumerate(X.hyperplanes):
        for k in X.hyperplanes[i + 1:]:
            pc = classify_pair(X, h.id, k.id)
            flags = (" contact" if pc.in_contact else "") + (" contiguous" if pc.contiguous else "")
            pairs.append(f"{h.label} {k.label}: {pc.relation}{flags}")
    report.section("pairs", pairs)
    report.section(
        "prisms",
        [
            f"P{i}: dimension={p.dimension} vertices={len(p.vertices)} "
            f"hyperplanes={','.join(f'J{j}' for j in p.hyperplanes)} "
            f"base={vertex_label(g.ordered(p.vertices)[0])}"
            for i, p in enumerate(maximal_prisms(X))
        ],
    )
    report.section("cubical dimension", [cubical_dimension(X)])
    for kind in kinds:
        if kind in ("relcont", "skewering"):
            family = named_family(X, "canonical-star")
            if kind == "relcont":
                K = relative_contact_complex(X, family)
            else:
                K = skewering_complex(X, family)
        else:
            K = hyperplane_complex(X, kind)
        report.section(f"complex {kind}", _complex_lines(K))


def _cmd_qm_analyze(args) -> Report:
    report = Report("qm-analyze")
    report.add_input(args.graph)
    X = load_quasi_median(parse_graph_file(args.graph))
    report.section("graph", [f"vertices={len(X.graph)} edges={len(X.graph.edges)}"])
    if not X.validated:
        report.section("validation", violation_lines(X))
        report.exit_status = EXIT_FAILED
        return report
    report.section("validation", ["passed"])
    analysis_sections(report, X, args.complex or [])
    return report


def violation_lines(X: QMGraph) -> list:
    return [
        f"{v.kind}: {v.message} witness={json.dumps(serialize(v.witness))}"
        for v in X.validation.violations
    ]


def _cmd_qm_verify(args) -> Report:
    report = Report("qm-verify")
    report.add_input(args.graph)
    X = load_quasi_median(parse_graph_file(args.graph))
    if not X.validated:
        report.section("validation", violation_lines(X))
        report.exit_status = EXIT_FAILED
        return report

    names, extra, rejected = [], [], []
    for choice in args.family or ["canonical-star"]:
        if choice.startswith("file:"):
            path = Path(choice[len("file:"):])
            report.add_input(path)
            members = parse_family_text(X.graph, path.read_text())
            try:
                extra.append((f"file:{path.name}", GatedFamily.certify(X, members)))
            except NotGatedError as e:
                rejected.append(
                    CheckResult(f"family[file:{path.name}]", FAIL, str(e), serialize(e.witness))
                )
        elif choice in FAMILY_NAMES:
            names.append(choice)
        else:
            raise ParseError(f"unknown family {choice!r}")

    theorem = verify_with_named_families(X, names, Path(args.graph).name, extra)
    checks = theorem.checks + tuple(rejected)
    report.section("checks", check_lines(checks, args.timings))
    failed = rejected or not theorem.passed
    report.exit_status = EXIT_FAILED if failed else EXIT_OK
    return report


def _cmd_gp_cic(args) -> Report:
    report = Report("gp-cic")
    report.add_input(args.presentation)
    pres = parse_presentation_file(args.presentation)
    fragment = cic_fragment(pres, args.family, args.radius, args.max_dim, args.max_exponent)
    report.section(
        "fragment",
        [
            "fragment: not the full complex",
            f"family={args.family} radius={fragment.radius} max_dim={fragment.max_dim}",
        ],
    )
    report.section(
        "cosets", [f"{fragment.label(i)} = {c.render()}" for i, c in enumerate(fragment.vertices)]
    )
    report.section(
        "maximal simplices",
        [" ".join(fragment.label(i) for i in s) for s in fragment.simplices],
    )
    report.section("fragment homology", homology(fragment.to_complex()).render())
    return report


def _cmd_gp_verify(args) -> Report:
    report = Report("gp-verify")
    report.add_input(args.presentation)
    pres = parse_presentation_file(args.presentation)
    theorem = verify_presentation(
        pres, radius=args.radius, samples=args.samples, seed=args.seed,
        subject=Path(args.presentation).name,
    )
    report.section("checks", check_lines(theorem.checks, args.timings))
    report.exit_status = EXIT_OK if theorem.passed else EXIT_FAILED
    return report


def _cmd_gen_corpus(args) -> Report:
    profile_file = Path(args.profile_file) if args.profile_file else None
    spec = corpus_config.load_corpus_profile(args.profile, profile_file)
    overrides = {"seed": args.seed}
    if args.count is not None:
        overrides["count"] = args.count
    if args.max_vertices is not None:
        overrides["max_vertices"] = args.max_vertices
    spec = replace(spec, **overrides)

    result = run_corpus(spec)
    data = result.to_dict(args.timings)
    report = Report("gen-corpus")
    report.section(
        "corpus",
        [
            f"seed={spec.seed} count={spec.count} max_vertices={spec.max_vertices}",
            f"graphs={data['graphs']} skipped={data['skipped']} failures={data['failures']}",
        ],
    )
    for entry in data["entries"]:
        title = f"{entry['name']} seed={entry['seed']} vertices={entry['vertices']}"
        if entry["status"] == "skipped":
            report.section(title, [f"skipped: {entry['reason']}"])
        else:
            report.section(title, check_lines(entry["checks"]))

    if args.out:
        _write_corpus_graphs(spec, Path(args.out))
    report.exit_status = EXIT_OK if result.passed else EXIT_FAILED
    return report


def _write_corpus_graphs(spec, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, _, factory in expand_corpus(spec):
        try:
            X = factory()
        except (GraphError, GuardExceeded, ValueError) as e:
            logger.warning(f"not writing {name}: {e}")
            continue
        (out / f"{name}.g").write_text(format_graph(X.graph))


def _cmd_serve(args) -> int:
    from .mcp_server import run_server

    run_server()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME, description="Hyperplanes, complexes and homology of quasi-median graphs"
    )
    parser.add_argument("--output", help="Write the report to this path instead of stdout")
    parser.add_argument("--face-guard", type=int, help="Override HYPERPLANES_FACE_GUARD")
    parser.add_argument("--timings", action="store_true", help="Include wall times in reports")
    parser.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    raag = commands.add_parser("raag-compare", help="Compare two defining graphs")
    raag.add_argument("first")
    raag.add_argument("second")
    raag.add_argument(
        "--invariant", choices=("join", "flag", "commensurability"), default="join"
    )
    raag.set_defaults(handler=_cmd_raag_compare)

    analyze = commands.add_parser("qm-analyze", help="Hyperplanes, prisms and complexes")
    analyze.add_argument("graph")
    analyze.add_argument("--complex", nargs="*", choices=COMPLEX_KINDS, default=[])
    analyze.set_defaults(handler=_cmd_qm_analyze)

    verify = commands.add_parser("qm-verify", help="Run the structural checks on a graph")
    verify.add_argument("graph")
    verify.add_argument(
        "--family",
        action="append",
        help="canonical-star, prisms, whole or file:PATH (repeatable)",
    )
    verify.set_defaults(handler=_cmd_qm_verify)

    cic = commands.add_parser("gp-cic", help="Coset intersection complex fragment")
    cic.add_argument("presentation")
    cic.add_argument(
        "--family", choices=("maximal-joins", "maximal-cliques"), default="maximal-joins"
    )
    cic.add_argument("--radius", type=int, default=1)
    cic.add_argument("--max-dim", type=int, default=2)
    cic.add_argument("--max-exponent", type=int, default=1)
    cic.set_defaults(handler=_cmd_gp_cic)

    gp_verify = commands.add_parser("gp-verify", help="Check the graph-product calculus")
    gp_verify.add_argument("presentation")
    gp_verify.add_argument("--seed", type=int, required=True)
    gp_verify.add_argument("--radius", type=int, default=3)
    gp_verify.add_argument("--samples", type=int, default=200)
    gp_verify.set_defaults(handler=_cmd_gp_verify)

    corpus = commands.add_parser("gen-corpus", help="Generate and verify a seeded corpus")
    corpus.add_argument("--seed", type=int, required=True)
    corpus.add_argument("--count", type=int)
    corpus.add_argument("--max-vertices", type=int)
    corpus.add_argument("--profile", help="Profile name from config/corpus.json")
    corpus.add_argument("--profile-file", help="Path to a custom profile JSON file")
    corpus.add_argument("--out", help="Directory receiving the generated graph files")
    corpus.set_defaults(handler=_cmd_gen_corpus)

    serve = commands.add_parser("serve", help="Start the MCP server")
    serve.set_defaults(handler=_cmd_serve)
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


def dispatch(argv: list) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    _configure_logging(args.verbose)
    load_dotenv()
    try:
        if args.face_guard is not None:
            get_config().override(face_guard=args.face_guard)
        result = args.handler(args)
        if isinstance(result, int):
            return result
        emit(result, "report-text", args.output)
        return result.exit_status
    except GuardExceeded as e:
        logger.error(f"guard exceeded: {e}")
        return EXIT_GUARD
    except InvariantViolation as e:
        logger.error(f"internal invariant failed: {e} witness={serialize(e.witness)}")
        return EXIT_GUARD
    except PreconditionError as e:
        logger.error(f"refused: {e} witness={serialize(e.witness)}")
        return EXIT_USAGE
    except (ParseError, GraphError, PresentationError, SignatureMismatch, ValueError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"cannot read or write: {e}")
        return EXIT_USAGE
