"""Canonical shape graphs used by tests, scripts and the CLI."""

from __future__ import annotations

from .shape_graph import ShapeGraph, parse_graph

LINE_TEXT = "arc a - - len inf\n"


def line() -> ShapeGraph:
    """The real line as one unbounded arc; sample it with a window."""
    return parse_graph(LINE_TEXT)


def circle_text(k: int) -> str:
    if k < 1:
        raise ValueError("a circle needs at least one node")
    lines = [f"node v{i}" for i in range(1, k + 1)]
    for i in range(1, k + 1):
        lines.append(f"arc c{i} v{i} v{i % k + 1} len 1")
    return "\n".join(lines) + "\n"


def circle(k: int) -> ShapeGraph:
    """Circle through k nodes, arcs c1..ck of unit length."""
    return parse_graph(circle_text(k))


WEDGE_TEXT = """\
# circle through v with a tail leaving v
node v
arc c v v len 1
arc t v - len 1
"""

WEDGE_IN_TEXT = """\
# circle through v with a tail entering v
node v
arc c v v len 1
arc t - v len 1
"""

Y_TEXT = """\
# one arc into v, two arcs out of v
node v
arc r0 - v len 1
arc r1 v - len 1
arc r2 v - len 1
"""

FIGURE_EIGHT_TEXT = """\
# two loops sharing the node v
node v
arc p v v len 1
arc q v v len 1
"""

CIRCLE_TAIL_TEXT = """\
# circle u -> w -> u with a tail leaving w
node u
node w
arc c1 u w len 1
arc c2 w u len 1
arc t w - len 1
"""

HEXAGON_TEXT = """\
# circle of four arcs with tails leaving two of its nodes
node p
node q
node r
node s
arc j2 p q len 1
arc j3 q r len 1
arc j5 r s len 1
arc j4 s p len 1
arc j1 q - len 1
arc j6 s - len 1
"""


def wedge() -> ShapeGraph:
    return parse_graph(WEDGE_TEXT)


def wedge_incoming() -> ShapeGraph:
    return parse_graph(WEDGE_IN_TEXT)


def y_graph() -> ShapeGraph:
    return parse_graph(Y_TEXT)


def figure_eight() -> ShapeGraph:
    return parse_graph(FIGURE_EIGHT_TEXT)


def circle_tail() -> ShapeGraph:
    return parse_graph(CIRCLE_TAIL_TEXT)


def hexagon() -> ShapeGraph:
    return parse_graph(HEXAGON_TEXT)
