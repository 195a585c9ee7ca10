import atexit
import concurrent.futures
import logging
from typing import List, Optional

from dotenv import load_dotenv
from fastmcp import FastMCP
from fastmcp.exceptions import ToolError
from fastmcp.prompts import Prompt
from fastmcp.tools import Tool
from starlette.requests import Request
from starlette.responses import PlainTextResponse

from mcp_hyperplanes.cli_io import (
    TOOL_VERSION,
    ParseError,
    Report,
    analysis_sections,
    parse_graph_text,
    parse_presentation_text,
    violation_lines,
)
from mcp_hyperplanes.graph_core import GraphError, GuardExceeded
from mcp_hyperplanes.graph_products import PresentationError, cic_fragment
from mcp_hyperplanes.harness import (
    CorpusSpec,
    raag_verdict,
    run_corpus,
    serialize,
    verify_presentation,
    verify_with_named_families,
)
from mcp_hyperplanes.homology import homology
from mcp_hyperplanes.mcp_env import TransportType, get_config
from mcp_hyperplanes.prompts import HYPERPLANES_PROMPT
from mcp_hyperplanes.qm_engine import PreconditionError, load_quasi_median

MCP_SERVER_NAME = "mcp-hyperplanes"

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(MCP_SERVER_NAME)

VERIFY_EXECUTOR = concurrent.futures.ThreadPoolExecutor(max_workers=get_config().workers)
atexit.register(lambda: VERIFY_EXECUTOR.shutdown(wait=True))

load_dotenv()

mcp = FastMCP(
    name=MCP_SERVER_NAME,
    dependencies=[
        "python-dotenv",
        "networkx",
        "sympy",
    ],
)

INPUT_ERRORS = (ParseError, GraphError, PresentationError, ValueError)


@mcp.custom_route("/health", methods=["GET"])
async def health_check(request: Request) -> PlainTextResponse:
    """Health check endpoint for monitoring server status."""
    try:
        config = get_config()
        return PlainTextResponse(
            f"OK - {MCP_SERVER_NAME} {TOOL_VERSION} "
            f"(face guard {config.face_guard}, {config.workers} workers)"
        )
    except ValueError as e:
        return PlainTextResponse(f"ERROR - Invalid configuration: {e}", status_code=503)


def _run_tool(name: str, fn, *args):
    """Run `fn` on the verification pool with the configured timeout.

    Input problems and exceeded guards come back as structured errors; a timeout is a ToolError.
    """
    timeout = get_config().tool_timeout
    try:
        future = VERIFY_EXECUTOR.submit(fn, *args)
        try:
            return future.result(timeout=timeout)
        except concurrent.futures.TimeoutError:
            logger.warning(f"{name} timed out after {timeout} seconds")
            future.cancel()
            raise ToolError(f"{name} timed out after {timeout} seconds")
    except ToolError:
        raise
    except GuardExceeded as e:
        logger.warning(f"{name}: guard exceeded: {e}")
        return {"status": "error", "message": f"Guard exceeded: {e}"}
    except PreconditionError as e:
        logger.warning(f"{name} refused: {e}")
        return {"status": "error", "message": str(e), "witness": serialize(e.witness)}
    except INPUT_ERRORS as e:
        logger.warning(f"{name} rejected its input: {e}")
        return {"status": "error", "message": f"Invalid input: {e}"}
    except Exception as e:
        logger.error(f"Unexpected error in {name}: {e}")
        raise RuntimeError(f"Unexpected error in {name}: {e}")


def _raag_compare(first: str, second: str, invariant: str) -> dict:
    verdict = raag_verdict(parse_graph_text(first), parse_graph_text(second), invariant)
    return {
        "status": "ok",
        "invariant": verdict.invariant,
        "verdict": verdict.verdict,
        "distinguished": verdict.distinguished,
        "first": verdict.signatures[0].render(),
        "second": verdict.signatures[1].render(),
        "differing_degrees": list(verdict.differing_degrees),
    }


def raag_compare(first: str, second: str, invariant: str = "join"):
    """Compare two defining graphs of right-angled Artin groups.

    Graphs are adjacency-list text. `invariant` is "join", "flag" or "commensurability".
    """
    logger.info(f"TOOL CALLED: raag_compare ({invariant})")
    return _run_tool("raag_compare", _raag_compare, first, second, invariant)


def _analyze(graph: str, complexes: List[str]) -> dict:
    X = load_quasi_median(parse_graph_text(graph))
    report = Report("analyze_quasi_median")
    if not X.validated:
        return {"status": "rejected", "violations": violation_lines(X)}
    analysis_sections(report, X, complexes)
    return {"status": "ok", "sections": {title: lines for title, lines in report.sections}}


def analyze_quasi_median(graph: str, complexes: Optional[List[str]] = None):
    """Hyperplanes, pair relations, maximal prisms and hyperplane complexes of a graph.

    `complexes` picks from "contact", "crossing", "contiguity", "small_crossing", "relcont" and
    "skewering".
    """
    logger.info("TOOL CALLED: analyze_quasi_median")
    return _run_tool("analyze_quasi_median", _analyze, graph, list(complexes or []))


def _verify(graph: str, families: List[str]) -> dict:
    X = load_quasi_median(parse_graph_text(graph))
    report = verify_with_named_families(X, families, "graph")
    return {"status": "ok", **report.to_dict()}


def verify_quasi_median(graph: str, families: Optional[List[str]] = None):
    """Run the structural checks on a quasi-median graph.

    `families` picks gated families from "canonical-star", "prisms" and "whole".
    """
    logger.info("TOOL CALLED: verify_quasi_median")
    return _run_tool("verify_quasi_median", _verify, graph, list(families or ["canonical-star"]))


def _verify_product(presentation: str, seed: int, radius: int, samples: int) -> dict:
    pres = parse_presentation_text(presentation)
    report = verify_presentation(pres, radius=radius, samples=samples, seed=seed)
    return {"status": "ok", **report.to_dict()}


def verify_graph_product(presentation: str, seed: int = 0, radius: int = 3, samples: int = 200):
    """Check the normal forms, coset tests and bounded balls of a graph product."""
    logger.info(f"TOOL CALLED: verify_graph_product (seed {seed})")
    return _run_tool(
        "verify_graph_product", _verify_product, presentation, seed, radius, samples
    )


def _fragment(presentation: str, family: str, radius: int, max_dim: int, max_exponent: int):
    pres = parse_presentation_text(presentation)
    fragment = cic_fragment(pres, family, radius, max_dim, max_exponent)
    return {
        "status": "ok",
        "is_fragment": True,
        "radius": fragment.radius,
        "max_dim": fragment.max_dim,
        "cosets": {fragment.label(i): c.render() for i, c in enumerate(fragment.vertices)},
        "maximal_simplices": [[fragment.label(i) for i in s] for s in fragment.simplices],
        "fragment_homology": homology(fragment.to_complex()).render(),
    }


def coset_intersection_fragment(
    presentation: str,
    family: str = "maximal-joins",
    radius: int = 1,
    max_dim: int = 2,
    max_exponent: int = 1,
):
    """A bounded fragment of the coset intersection complex of a graph product.

    Always partial: the homology returned is that of the fragment only.
    """
    logger.info(f"TOOL CALLED: coset_intersection_fragment ({family}, radius {radius})")
    return _run_tool(
        "coset_intersection_fragment",
        _fragment,
        presentation,
        family,
        radius,
        max_dim,
        max_exponent,
    )


def _corpus(seed: int, count: int, max_vertices: int) -> dict:
    report = run_corpus(CorpusSpec(seed=seed, count=count, max_vertices=max_vertices))
    return {"status": "ok", **report.to_dict()}


def generate_corpus(seed: int, count: int = 5, max_vertices: int = 60):
    """Generate a seeded corpus of quasi-median graphs and verify each one."""
    logger.info(f"TOOL CALLED: generate_corpus (seed {seed}, count {count})")
    return _run_tool("generate_corpus", _corpus, seed, count, max_vertices)


def hyperplanes_initial_prompt() -> str:
    """This prompt explains the hyperplane tools, their input formats and how to read results"""
    return HYPERPLANES_PROMPT


mcp.add_tool(Tool.from_function(raag_compare))
mcp.add_tool(Tool.from_function(analyze_quasi_median))
mcp.add_tool(Tool.from_function(verify_quasi_median))
mcp.add_tool(Tool.from_function(verify_graph_product))
mcp.add_tool(Tool.from_function(coset_intersection_fragment))
mcp.add_tool(Tool.from_function(generate_corpus))

hyperplanes_prompt = Prompt.from_function(
    hyperplanes_initial_prompt,
    name="hyperplanes_initial_prompt",
    description="This prompt explains the hyperplane tools and their input formats",
)
mcp.add_prompt(hyperplanes_prompt)
logger.info("Hyperplane tools and prompts registered")


def run_server() -> None:
    config = get_config()
    transport = config.mcp_server_transport

    # For HTTP and SSE transports, we need to specify host and port
    http_transports = [TransportType.HTTP.value, TransportType.SSE.value]
    if transport in http_transports:
        mcp.run(transport=transport, host=config.mcp_bind_host, port=config.mcp_bind_port)
    else:
        mcp.run(transport=transport)
