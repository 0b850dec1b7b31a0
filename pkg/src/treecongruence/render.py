"""Pac-man piechart matrices as SVG.

An n x n grid: the upper-right cells draw each pairwise score as a disc
with a wedge of 360 * score degrees, starting at 12 o'clock and running
clockwise; the lower-left cells print the same score; the diagonal holds
the tree labels. Output is byte-stable for a given input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .errors import ValueOutOfRange

FILL = "#333333"
STROKE = "#333333"
GRID = "#bbbbbb"


@dataclass(frozen=True)
class PacmanMatrixSpec:
    """Input for :func:`render_pacman`.

    ``values`` lists the upper triangle row by row: (1,2), (1,3), ...,
    (2,3), ... ``None`` marks a missing score.
    """

    labels: Sequence[str]
    values: Sequence[Optional[float]]
    cell_size: int = 60
    decimals: int = 3
    title: Optional[str] = None

    def __post_init__(self):
        n = len(self.labels)
        if len(self.values) != n * (n - 1) // 2:
            raise ValueOutOfRange(
                f"{n} labels need {n * (n - 1) // 2} values, got {len(self.values)}"
            )
        for v in self.values:
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValueOutOfRange(f"score {v!r} outside [0, 1]")

    def value(self, i: int, j: int):
        """Score for the pair of rows i < j."""
        n = len(self.labels)
        return self.values[i * n - i * (i + 1) // 2 + (j - i - 1)]


def _num(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def wedge_path(cx: float, cy: float, r: float, value: float) -> str:
    """SVG path for a wedge of ``360 * value`` degrees (0 < value < 1)."""
    theta = 2 * math.pi * value
    ex = cx + r * math.sin(theta)
    ey = cy - r * math.cos(theta)
    large = 1 if value > 0.5 else 0
    return (
        f"M{_num(cx)},{_num(cy)} L{_num(cx)},{_num(cy - r)} "
        f"A{_num(r)},{_num(r)} 0 {large},1 {_num(ex)},{_num(ey)} Z"
    )


def render_pacman(spec: PacmanMatrixSpec) -> str:
    n = len(spec.labels)
    cell = spec.cell_size
    margin = cell // 4
    top = margin + (cell // 2 if spec.title else 0)
    width = 2 * margin + n * cell
    height = top + margin + n * cell
    r = 0.4 * cell
    font = max(8, cell // 5)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if spec.title:
        out.append(
            f'<text x="{_num(width / 2)}" y="{_num(margin + cell / 4)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="{font + 2}">{escape(spec.title)}</text>'
        )
    for i in range(n):
        for j in range(n):
            x = margin + j * cell
            y = top + i * cell
            cx, cy = x + cell / 2, y + cell / 2
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="none" stroke="{GRID}"/>'
            )
            text = None
            if i == j:
                text = escape(str(spec.labels[i]))
            elif i > j:
                v = spec.value(j, i)
                text = "NA" if v is None else f"{v:.{spec.decimals}f}"
            else:
                v = spec.value(i, j)
                if v is None:
                    continue
                if v >= 1.0:
                    out.append(
                        f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="{FILL}" stroke="{STROKE}"/>'
                    )
                    continue
                if v > 0.0:
                    out.append(f'<path d="{wedge_path(cx, cy, r, v)}" fill="{FILL}"/>')
                out.append(
                    f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="none" stroke="{STROKE}"/>'
                )
            if text is not None:
                out.append(
                    f'<text x="{_num(cx)}" y="{_num(cy + font / 3)}" text-anchor="middle" '
                    f'font-family="sans-serif" font-size="{font}">{text}</text>'
                )
    out.append("</svg>")
    return "\n".join(out) + "\n"
