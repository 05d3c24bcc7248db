"""
Unit tests for the critical-difference diagram writer
"""

import shutil
import tempfile
import unittest
from pathlib import Path
import sys

from lxml import etree

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.cd_diagram import SVG_NS, CDDiagramWriter, emit_cd_diagram
from core.exceptions import DiagramWriteError
from core.statistics import friedman_from_mean_ranks

METHODS = ("onln", "iol", "agglo-sm", "agglo-2", "m1", "m2")


class TestCDDiagram(unittest.TestCase):
    """Test cases for CDDiagramWriter."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.result = friedman_from_mean_ranks([2.1818, 2.2727, 3.1818, 4.6364, 4, 4.7273], N=11, methods=METHODS)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_writes_svg_and_text(self):
        svg_path, text_path = emit_cd_diagram(self.result, Path(self.temp_dir) / "ranks")
        self.assertEqual((svg_path.name, text_path.name), ("ranks.svg", "ranks.txt"))
        root = etree.parse(str(svg_path)).getroot()
        self.assertEqual(root.tag, f"{{{SVG_NS}}}svg")
        labels = " ".join(node.text for node in root.iter(f"{{{SVG_NS}}}text"))
        for method in METHODS:
            self.assertIn(method, labels)
        self.assertIn("CD = 2.2733", labels)

    def test_text_lists_methods_by_rank_and_groups(self):
        text = CDDiagramWriter().build_text(self.result)
        lines = text.splitlines()
        self.assertEqual(lines[0], "datasets: 11")
        ranked = [line.split()[1] for line in lines[lines.index("mean ranks:") + 1:lines.index(
            "not significantly different:")]]
        self.assertEqual(ranked, ["onln", "iol", "agglo-sm", "m1", "agglo-2", "m2"])
        self.assertIn("  onln, iol, agglo-sm, m1", lines)
        self.assertIn("  agglo-sm, m1, agglo-2, m2", lines)

    def test_output_is_deterministic(self):
        writer = CDDiagramWriter()
        self.assertEqual(writer.build_svg(self.result), writer.build_svg(self.result))

    def test_suffix_is_replaced(self):
        svg_path, text_path = CDDiagramWriter().write(self.result, Path(self.temp_dir) / "out" / "diagram.svg")
        self.assertTrue(svg_path.exists() and text_path.exists())
        self.assertEqual(text_path.name, "diagram.txt")

    def test_unwritable_destination(self):
        blocker = Path(self.temp_dir) / "file"
        blocker.write_text("x")
        with self.assertRaises(DiagramWriteError):
            emit_cd_diagram(self.result, blocker / "ranks")


if __name__ == '__main__':
    unittest.main()
