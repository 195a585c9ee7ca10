import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from dotenv import load_dotenv

from mcp_hyperplanes.cli_io import (
    EXIT_FAILED,
    EXIT_GUARD,
    EXIT_OK,
    EXIT_USAGE,
    ParseError,
    Report,
    dispatch,
    format_complex,
    format_edge_list,
    format_presentation,
    parse_complex_text,
    parse_family_text,
    parse_graph_text,
    parse_presentation_text,
)
from mcp_hyperplanes.complexes import SimplicialComplex
from mcp_hyperplanes.graph_products import PresentationError
from mcp_hyperplanes.mcp_env import reset_config
from mcp_hyperplanes.qm_engine import InvariantViolation

load_dotenv()

GRID = """\
# 3x3 grid, rows then columns
00: 01 10
01: 00 02 11
02: 01 12
10: 00 11 20
11: 01 10 12 21
12: 02 11 22
20: 10 21
21: 11 20 22
22: 12 21
"""

K23 = """\
a: x y z
b: x y z
x:
y:
z:
"""

C4 = "a: b d\nb: c\nc: d\nd:\n"

C5 = "a: b e\nb: c\nc: d\nd: e\ne:\n"

P4_RAAG = """\
vertex a 0
vertex b 0
vertex c 0
vertex d 0
edge a b
edge b c
edge c d
"""


class TestParsers(unittest.TestCase):
    def test_graph_text_is_closed_symmetrically(self):
        g = parse_graph_text(C4)
        self.assertEqual(g.vertices, ("a", "b", "c", "d"))
        self.assertEqual(len(g.edges), 4)
        self.assertTrue(g.has_edge("d", "a"))

    def test_graph_errors_carry_line_numbers(self):
        with self.assertRaises(ParseError) as ctx:
            parse_graph_text("a: b\nb: q\n")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ParseError):
            parse_graph_text("a: a\n")
        with self.assertRaises(ParseError):
            parse_graph_text("a: b\na: b\nb:\n")
        with self.assertRaises(ParseError):
            parse_graph_text("# nothing here\n")

    def test_one_sided_entry_in_a_full_adjacency_list(self):
        """Once an edge is listed from both ends, every entry needs its mirror."""
        with self.assertRaises(ParseError) as ctx:
            parse_graph_text("a: b c\nb: a\nc:\n")
        self.assertEqual(ctx.exception.line, 1)
        g = parse_graph_text("a: b c\nb: a\nc: a\n")
        self.assertEqual(len(g.edges), 2)

    def test_presentation_text(self):
        pres = parse_presentation_text(P4_RAAG)
        self.assertEqual(pres.orders, (0, 0, 0, 0))
        self.assertTrue(pres.commute("b", "c"))
        self.assertEqual(format_presentation(pres), P4_RAAG)

    def test_presentation_rejects_trivial_vertex_groups(self):
        with self.assertRaises(PresentationError):
            parse_presentation_text("vertex a 1\n")
        with self.assertRaises(ParseError):
            parse_presentation_text("vertex a 2\nedge a b\n")
        with self.assertRaises(ParseError):
            parse_presentation_text("generator a 2\n")

    def test_family_text(self):
        g = parse_graph_text(C4)
        self.assertEqual(parse_family_text(g, "a b\nc d\n"), [frozenset("ab"), frozenset("cd")])
        with self.assertRaises(ParseError):
            parse_family_text(g, "a z\n")

    def test_complex_text(self):
        K = parse_complex_text("vertices:\n  p\nmaximal_faces:\n  a b c\n")
        self.assertEqual(K.vertices, ("a", "b", "c", "p"))
        self.assertIn("  a b c", format_complex(K).splitlines())

    def test_edge_list_lists_isolated_vertices(self):
        K = SimplicialComplex.from_faces([["a", "b"]], ["c"])
        self.assertEqual(format_edge_list(K), "a -- b\nc\n")

    def test_report_header(self):
        report = Report("qm-analyze", exit_status=EXIT_FAILED)
        report.section("validation", ["induced_k23"])
        lines = report.render().splitlines()
        self.assertEqual(lines[0], "mcp-hyperplanes 0.2.0")
        self.assertIn("exit_status: 1", lines)
        self.assertIn("[validation]", lines)

    def test_report_keeps_inputs_with_the_same_name_apart(self):
        with tempfile.TemporaryDirectory() as tmp:
            first, second = Path(tmp, "one", "g.txt"), Path(tmp, "two", "g.txt")
            for path, text in ((first, "a:\n"), (second, "b:\n")):
                path.parent.mkdir()
                path.write_text(text)
            report = Report("qm-verify")
            report.add_input(first)
            report.add_input(second)
        self.assertEqual(len(report.inputs), 2)
        self.assertEqual(len(set(report.inputs.values())), 2)


class TestDispatch(unittest.TestCase):
    def setUp(self):
        reset_config()
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        reset_config()
        self.tmp.cleanup()

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text)
        return str(path)

    def run_cli(self, *argv):
        out = self.dir / "report.txt"
        status = dispatch(["--output", str(out), *argv])
        return status, out.read_text() if out.exists() else ""

    def test_analyze_grid_contiguity(self):
        status, text = self.run_cli(
            "qm-analyze", self.write("grid.g", GRID), "--complex", "contiguity"
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn("[complex contiguity]", text)
        self.assertIn("H_2 = Z", text)
        self.assertIn(f"input {self.dir / 'grid.g'} sha256:", text)

    def test_analyze_rejected_graph(self):
        status, text = self.run_cli("qm-analyze", self.write("k23.g", K23))
        self.assertEqual(status, EXIT_FAILED)
        self.assertIn("induced_k23", text)

    def test_verify(self):
        self.assertEqual(self.run_cli("qm-verify", self.write("k23.g", K23))[0], EXIT_FAILED)
        status, text = self.run_cli("qm-verify", self.write("grid.g", GRID))
        self.assertEqual(status, EXIT_OK)
        self.assertIn("validation: pass", text)

    def test_verify_with_non_gated_family_file(self):
        """A family member that is not gated shows up as a failed family check."""
        graph = self.write("grid.g", GRID)
        family = self.write("bad.fam", "00 11\n")
        status, text = self.run_cli("qm-verify", graph, "--family", f"file:{family}")
        self.assertEqual(status, EXIT_FAILED)
        self.assertIn("family[file:bad.fam]: fail", text)

    def test_raag_compare(self):
        status, text = self.run_cli(
            "raag-compare", self.write("c4.g", C4), self.write("c5.g", C5)
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn("distinguished: not quasi-isometric", text)

    def test_flag_refusal_is_a_usage_error(self):
        path = self.write("c4.g", C4)
        status, _ = self.run_cli("raag-compare", path, path, "--invariant", "flag")
        self.assertEqual(status, EXIT_USAGE)

    def test_coset_fragment(self):
        status, text = self.run_cli(
            "gp-cic", self.write("p4.gp", P4_RAAG), "--radius", "0"
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn("fragment: not the full complex", text)
        self.assertIn("coset:0000 = 1<a,b,c>", text)

    def test_usage_and_input_errors(self):
        self.assertEqual(self.run_cli("qm-analyze", self.write("loop.g", "a: a\n"))[0], EXIT_USAGE)
        self.assertEqual(self.run_cli("qm-analyze", str(self.dir / "missing.g"))[0], EXIT_USAGE)
        self.assertEqual(self.run_cli("qm-draw")[0], EXIT_USAGE)
        self.assertEqual(self.run_cli("gen-corpus", "--count", "1")[0], EXIT_USAGE)

    def test_face_guard(self):
        status, _ = self.run_cli(
            "--face-guard", "1", "qm-analyze", self.write("grid.g", GRID), "--complex", "contiguity"
        )
        self.assertEqual(status, EXIT_GUARD)

    def test_internal_invariant_failure_maps_to_exit_three(self):
        failure = InvariantViolation("carrier intersection is not a single prism", (0, 1))
        with patch("mcp_hyperplanes.cli_io.verify_with_named_families", side_effect=failure):
            status, text = self.run_cli("qm-verify", self.write("grid.g", GRID))
        self.assertEqual(status, EXIT_GUARD)
        self.assertEqual(text, "")

    def test_gen_corpus_writes_graphs(self):
        out = self.dir / "corpus"
        status, text = self.run_cli(
            "gen-corpus", "--seed", "4", "--count", "1", "--max-vertices", "20",
            "--profile", "smoke", "--profile-file", self.write("corpus.json", SMOKE_PROFILE),
            "--out", str(out),
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn("seed=4 count=1 max_vertices=20", text)
        self.assertEqual([p.name for p in out.iterdir()], ["random-000.g"])


SMOKE_PROFILE = """\
{"profiles": {"smoke": {"count": 3, "steps": 2, "families": ["whole"], "named": false}}}
"""


if __name__ == "__main__":
    unittest.main()
