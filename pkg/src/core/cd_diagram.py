"""
Critical-difference diagram writer (SVG with a plain-text companion)
"""

from pathlib import Path
from typing import List, Tuple, Union
import logging

from lxml import etree

from core.exceptions import DiagramWriteError
from core.statistics import TestResult, cd_groups

SVG_NS = "http://www.w3.org/2000/svg"


class CDDiagramWriter:
    """Draws mean ranks on an axis with bars joining methods closer than the critical difference."""

    def __init__(self, width: int = 640, margin: int = 160, row_height: int = 18):
        self.width = width
        self.margin = margin
        self.row_height = row_height
        self.logger = logging.getLogger(__name__)

    def _x(self, rank: float, M: int) -> float:
        if M <= 1:
            return self.width / 2.0
        span = self.width - 2 * self.margin
        return round(self.margin + (rank - 1.0) / (M - 1) * span, 3)

    def _line(self, parent, x1, y1, x2, y2, stroke_width=1.0):
        etree.SubElement(parent, f"{{{SVG_NS}}}line", x1=str(x1), y1=str(y1), x2=str(x2), y2=str(y2),
                         stroke="black", **{"stroke-width": str(stroke_width)})

    def _text(self, parent, x, y, content, anchor="middle"):
        node = etree.SubElement(parent, f"{{{SVG_NS}}}text", x=str(x), y=str(y),
                                **{"text-anchor": anchor, "font-family": "sans-serif", "font-size": "12"})
        node.text = content

    def groups(self, result: TestResult) -> List[Tuple[int, ...]]:
        if result.cd is None or result.M < 2:
            return []
        return result.groups or cd_groups(result.mean_ranks, result.cd)

    def build_svg(self, result: TestResult) -> bytes:
        M = result.M
        order = sorted(range(M), key=lambda j: (result.mean_ranks[j], j))
        left = order[:(M + 1) // 2]
        right = order[(M + 1) // 2:]
        axis_y = 60
        groups = self.groups(result)
        height = axis_y + 40 + self.row_height * (max(len(left), len(right)) + len(groups))

        svg = etree.Element(f"{{{SVG_NS}}}svg", nsmap={None: SVG_NS}, width=str(self.width), height=str(height))
        self._line(svg, self._x(1, M), axis_y, self._x(max(M, 1), M), axis_y)
        for tick in range(1, M + 1):
            x = self._x(tick, M)
            self._line(svg, x, axis_y - 5, x, axis_y)
            self._text(svg, x, axis_y - 8, str(tick))

        if result.cd is not None and M > 1:
            start = self._x(1, M)
            end = self._x(1 + result.cd, M)
            self._line(svg, start, 20, end, 20, 2.0)
            self._text(svg, (start + end) / 2.0, 15, f"CD = {result.cd:.4f}")

        groups_y = axis_y + 10
        for row, group in enumerate(groups):
            y = groups_y + row * 6
            ranks = [result.mean_ranks[j] for j in group]
            self._line(svg, self._x(min(ranks), M) - 3, y, self._x(max(ranks), M) + 3, y, 3.0)

        labels_y = groups_y + 6 * len(groups) + 20
        for row, j in enumerate(left):
            x = self._x(result.mean_ranks[j], M)
            y = labels_y + row * self.row_height
            self._line(svg, x, axis_y, x, y)
            self._line(svg, x, y, self.margin - 10, y)
            self._text(svg, self.margin - 14, y + 4, f"{result.methods[j]} ({result.mean_ranks[j]:.4f})", "end")
        for row, j in enumerate(reversed(right)):
            x = self._x(result.mean_ranks[j], M)
            y = labels_y + row * self.row_height
            self._line(svg, x, axis_y, x, y)
            self._line(svg, x, y, self.width - self.margin + 10, y)
            self._text(svg, self.width - self.margin + 14, y + 4,
                       f"({result.mean_ranks[j]:.4f}) {result.methods[j]}", "start")
        return etree.tostring(svg, pretty_print=True, xml_declaration=True, encoding="UTF-8")

    def build_text(self, result: TestResult) -> str:
        lines = [f"datasets: {result.N}", f"methods: {result.M}"]
        if result.cd is not None:
            lines.append(f"critical difference (alpha={result.alpha}): {result.cd:.4f}")
        lines.append("mean ranks:")
        for j in sorted(range(result.M), key=lambda j: (result.mean_ranks[j], j)):
            lines.append(f"  {result.mean_ranks[j]:.4f}  {result.methods[j]}")
        lines.append("not significantly different:")
        for group in self.groups(result):
            lines.append("  " + ", ".join(result.methods[j] for j in group))
        return "\n".join(lines) + "\n"

    def write(self, result: TestResult, path: Union[str, Path]) -> Tuple[Path, Path]:
        base = Path(path)
        if base.suffix.lower() in (".svg", ".txt"):
            base = base.with_suffix("")
        svg_path = base.parent / f"{base.name}.svg"
        text_path = base.parent / f"{base.name}.txt"
        try:
            svg_path.parent.mkdir(parents=True, exist_ok=True)
            svg_path.write_bytes(self.build_svg(result))
            text_path.write_text(self.build_text(result), encoding="utf-8")
        except OSError as e:
            self.logger.error(f"Could not write critical-difference diagram {svg_path}: {e}")
            raise DiagramWriteError(f"cannot write {svg_path}: {e}") from e
        self.logger.info(f"Critical-difference diagram written to {svg_path}")
        return svg_path, text_path


def emit_cd_diagram(result: TestResult, path: Union[str, Path]) -> Tuple[Path, Path]:
    """
    Write ``path``.svg and ``path``.txt for a Friedman/Nemenyi result.

    Raises:
        DiagramWriteError: The files cannot be written
    """
    return CDDiagramWriter().write(result, path)
