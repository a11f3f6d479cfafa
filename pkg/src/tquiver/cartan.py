"""Euler form, Cartan datum and classification predicates for intervals.

Step functions are finitely supported, piecewise constant on half-open pieces
``(a, b]`` of each arc, and carry explicit values at nodes. The Euler form sums
left limit times jump over every discontinuity; at a node the jump is taken
between an incoming arc and the sum over all outgoing arcs.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Union

from .shape_graph import (
    Interval,
    Run,
    ShapeGraph,
    GraphMismatch,
    classify,
    compose,
    disjoint,
    format_rational,
    intervals_from_runs,
    is_subinterval,
    subtract,
)

Number = Union[int, Fraction]

__all__ = [
    "StepFunction",
    "indicator",
    "euler_form",
    "euler_form_runpair",
    "line_pairing",
    "pairing",
    "kappa",
    "xi",
    "relative_position",
    "oriented_position",
    "is_real",
    "is_imaginary",
    "is_degenerate",
    "is_orthogonal",
    "serre_member",
    "graph_cycles",
]


def _norm(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


class StepFunction:
    """Immutable step function on a shape graph.

    ``pieces`` maps an arc id to a tuple of ``(a, b, value)`` with a < b, sorted,
    non-overlapping, with no zero values and adjacent equal values merged.
    ``node_values`` maps nodes to nonzero values.
    """

    __slots__ = ("graph", "pieces", "node_values", "_hash")

    def __init__(
        self,
        graph: ShapeGraph,
        pieces: Mapping[str, Iterable[tuple[Fraction, Fraction, Number]]],
        node_values: Mapping[str, Number],
    ):
        self.graph = graph
        self.pieces = _canonical_pieces(pieces)
        self.node_values = {v: _norm(c) for v, c in sorted(node_values.items()) if c != 0}
        self._hash = hash((tuple(self.pieces.items()), tuple(self.node_values.items())))

    @classmethod
    def zero(cls, graph: ShapeGraph) -> "StepFunction":
        return cls(graph, {}, {})

    def _check(self, other: "StepFunction") -> None:
        if self.graph is not other.graph and self.graph != other.graph:
            raise GraphMismatch("step functions live on different shape graphs")

    def __add__(self, other: "StepFunction") -> "StepFunction":
        self._check(other)
        pieces: dict[str, list] = defaultdict(list)
        for src in (self, other):
            for arc, ps in src.pieces.items():
                pieces[arc].extend(ps)
        nodes: dict[str, Number] = defaultdict(int)
        for src in (self, other):
            for v, c in src.node_values.items():
                nodes[v] += c
        return StepFunction(self.graph, pieces, nodes)

    def scale(self, c: Number) -> "StepFunction":
        if c == 0:
            return StepFunction.zero(self.graph)
        return StepFunction(
            self.graph,
            {arc: [(a, b, c * val) for a, b, val in ps] for arc, ps in self.pieces.items()},
            {v: c * val for v, val in self.node_values.items()},
        )

    def __neg__(self) -> "StepFunction":
        return self.scale(-1)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-other)

    def __rmul__(self, c: Number) -> "StepFunction":
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.pieces and not self.node_values

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.pieces == other.pieces
            and self.node_values == other.node_values
        )

    def __hash__(self) -> int:
        return self._hash

    def left_limit(self, arc: str, x: Fraction) -> Number:
        for a, b, val in self.pieces.get(arc, ()):
            if a < x <= b:
                return val
        return 0

    def right_limit(self, arc: str, x: Fraction) -> Number:
        for a, b, val in self.pieces.get(arc, ()):
            if a <= x < b:
                return val
        return 0

    def breakpoints(self, arc: str) -> set[Fraction]:
        pts: set[Fraction] = set()
        for a, b, _ in self.pieces.get(arc, ()):
            pts.add(a)
            pts.add(b)
        return pts

    def terms(self) -> Iterator[tuple[Number, Run]]:
        """Maximal constant pieces as (value, run) pairs."""
        for arc, ps in self.pieces.items():
            for a, b, val in ps:
                yield val, Run(arc, a, b)

    def __repr__(self) -> str:
        return f"StepFunction({self})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = [
            f"{format_rational(val)}*[{r.arc}:{format_rational(r.a)},{format_rational(r.b)}]"
            for val, r in self.terms()
        ]
        parts += [f"{format_rational(val)}*<{v}>" for v, val in self.node_values.items()]
        return " + ".join(parts)


def _canonical_pieces(pieces) -> dict[str, tuple]:
    out: dict[str, tuple] = {}
    for arc in sorted(pieces):
        raw = [(Fraction(a), Fraction(b), val) for a, b, val in pieces[arc]]
        if not raw:
            continue
        cuts = sorted({p for a, b, _ in raw for p in (a, b)})
        merged: list[list] = []
        for lo, hi in zip(cuts, cuts[1:]):
            val = sum((v for a, b, v in raw if a <= lo and hi <= b), 0)
            if val == 0:
                continue
            val = _norm(val)
            if merged and merged[-1][1] == lo and merged[-1][2] == val:
                merged[-1][1] = hi
            else:
                merged.append([lo, hi, val])
        if merged:
            out[arc] = tuple((a, b, v) for a, b, v in merged)
    return out


@lru_cache(maxsize=None)
def indicator(J: Interval) -> StepFunction:
    """The indicator function of an interval, including its node values."""
    pieces: dict[str, list] = defaultdict(list)
    for r in J.runs:
        pieces[r.arc].append((r.a, r.b, 1))
    return StepFunction(J.graph, pieces, {v: 1 for v in J.closed_nodes})


def euler_form(f: StepFunction, g: StepFunction) -> Number:
    """Left limit of f times the jump of g, summed over arcs and nodes."""
    f._check(g)
    graph = f.graph
    total: Number = 0
    for arc in graph.arcs:
        pts = f.breakpoints(arc.id) | g.breakpoints(arc.id)
        for x in pts:
            if arc.target is not None and x == arc.hi:
                continue  # handled by the node rule
            fl = f.left_limit(arc.id, x)
            if fl:
                total += fl * (g.left_limit(arc.id, x) - g.right_limit(arc.id, x))
    for v in sorted(graph.nodes):
        out_sum = sum(g.right_limit(h, graph.arc(h).lo) for h in graph.outgoing(v))
        for h in graph.incoming(v):
            end = graph.arc(h).hi
            fl = f.left_limit(h, end)
            if fl:
                total += fl * (g.left_limit(h, end) - out_sum)
    return _norm(total)


def line_pairing(a: Fraction, b: Fraction, a2: Fraction, b2: Fraction) -> int:
    """Euler pairing of (a, b] with (a2, b2] on a line, by relative position."""
    if (a, b) == (a2, b2):
        return 1
    if b == a2:
        return -1  # first ends where the second begins
    if b2 == a or b < a2 or b2 < a:
        return 0
    if a == a2:
        return 1 if b2 < b else 0
    if b == b2:
        return 1 if a2 < a else 0
    if a2 < a and b < b2:
        return 0
    if a < a2 and b2 < b:
        return 0
    if a < a2 < b < b2:
        return -1
    return 1  # a2 < a < b2 < b


def euler_form_runpair(J: Interval, K: Interval) -> int:
    """Euler pairing from run pairs.

    Runs on one arc use the line table; every run of J closing at a node where
    a run of K begins contributes -1. The attachment term applies to runs on the
    same loop arc as well, which is what makes a circle pair trivially with itself.
    """
    if J.graph is not K.graph and J.graph != K.graph:
        raise GraphMismatch("intervals live on different shape graphs")
    total = 0
    for r in J.runs:
        for s in K.runs:
            if r.arc == s.arc:
                total += line_pairing(r.a, r.b, s.a, s.b)
    closing = J.closed_nodes
    for s in K.runs:
        v = K.starts_at(s)
        if v is not None and v in closing:
            total -= 1
    return total


@lru_cache(maxsize=None)
def pairing(J: Interval, K: Interval) -> int:
    """Euler form of the two indicators (cached)."""
    return int(euler_form(indicator(J), indicator(K)))


def kappa(J: Interval, K: Interval) -> int:
    return pairing(J, K) + pairing(K, J)


def xi(J: Interval, K: Interval) -> int:
    return (-1 if pairing(J, K) % 2 else 1) * kappa(J, K)


def is_real(J: Interval) -> bool:
    return J.cycle() is None


def is_imaginary(J: Interval) -> bool:
    return not is_real(J)


def is_degenerate(J: Interval) -> bool:
    return classify(J) == "circle"


def is_orthogonal(J: Interval, K: Interval) -> bool:
    return compose(J, K) is None and disjoint(J, K)


_LINE_TAGS = {
    "equal",
    "adjacent",
    "disjoint",
    "closed_sub",
    "open_sub",
    "strict_sub",
    "overlap",
    "other",
}


def oriented_position(J: Interval, K: Interval) -> tuple[str, bool]:
    """Relative position tag plus orientation.

    The flag is True when the relation reads "J tag K" (for example J ends where
    K begins, or J is the smaller interval) and False for the mirrored reading.
    """
    if J == K:
        return "equal", True
    if compose(J, K) is not None:
        forward = any(K.starts_at(s) in J.closed_nodes for s in K.runs)
        if not forward:
            forward = any(
                r.arc == s.arc and r.b == s.a for r in J.runs for s in K.runs
            )
        return "adjacent", forward
    if len(J.runs) == 1 and len(K.runs) == 1 and J.runs[0].arc == K.runs[0].arc:
        (_, a, b), (_, a2, b2) = J.runs[0], K.runs[0]
        if b <= a2 or b2 <= a:
            return "disjoint", True
        if a == a2:
            return "closed_sub", b < b2
        if b == b2:
            return "open_sub", a2 < a
        if a2 < a and b < b2:
            return "strict_sub", True
        if a < a2 and b2 < b:
            return "strict_sub", False
        return "overlap", a < a2
    if disjoint(J, K):
        return "disjoint", True
    return "other", True


def relative_position(J: Interval, K: Interval) -> str:
    return oriented_position(J, K)[0]


@lru_cache(maxsize=None)
def graph_cycles(graph: ShapeGraph) -> tuple[tuple[str, ...], ...]:
    """Directed simple cycles of the shape graph as sorted tuples of arc ids."""
    found: set[tuple[str, ...]] = set()

    def walk(start: str, node: str, used: tuple[str, ...], seen_nodes: frozenset[str]) -> None:
        for h in graph.outgoing(node):
            arc = graph.arc(h)
            if arc.target is None or h in used:
                continue
            if arc.target == start:
                found.add(tuple(sorted(used + (h,))))
            elif arc.target not in seen_nodes:
                walk(start, arc.target, used + (h,), seen_nodes | {arc.target})

    for v in sorted(graph.nodes):
        walk(v, v, (), frozenset((v,)))
    return tuple(sorted(found))


def _covered(arc_id: str, length: Fraction, *intervals: Interval) -> bool:
    spans = sorted((r.a, r.b) for J in intervals for r in J.runs if r.arc == arc_id)
    reach = Fraction(0)
    for a, b in spans:
        if a > reach:
            return False
        reach = max(reach, b)
    return reach >= length


@lru_cache(maxsize=None)
def serre_member(J: Interval, K: Interval) -> bool:
    """Whether (J, K) lies in the Serre set.

    J must be contractible, and no sub-interval I of J may complete to a circle
    with a sub-interval I' of K that is either K itself or pairs nontrivially with
    K. Only circles fully covered by J and K can occur, and on each one it is
    enough to scan sub-intervals whose endpoints are breakpoints of J and K or
    midpoints between consecutive breakpoints.
    """
    if not is_real(J):
        return False
    graph = J.graph
    for cyc in graph_cycles(graph):
        if not all(_covered(h, graph.arc(h).hi, J, K) for h in cyc):
            continue
        circle = Interval(graph, [(h, graph.arc(h).lo, graph.arc(h).hi) for h in cyc])
        candidates: list[Run] = []
        for h in cyc:
            pts = {graph.arc(h).lo, graph.arc(h).hi}
            for X in (J, K):
                for r in X.runs:
                    if r.arc == h:
                        pts.update((r.a, r.b))
            pts_sorted = sorted(pts)
            pts.update((x + y) / 2 for x, y in zip(pts_sorted, pts_sorted[1:]))
            pts_sorted = sorted(pts)
            for r in J.runs:
                if r.arc != h:
                    continue
                inside = [p for p in pts_sorted if r.a <= p <= r.b]
                for i, p in enumerate(inside):
                    for q in inside[i + 1:]:
                        candidates.append(Run(h, p, q))
        for I in intervals_from_runs(graph, candidates):
            rest = subtract(circle, I)
            if rest is None or not is_subinterval(rest, K):
                continue
            if rest == K or kappa(K, rest) != 0:
                return False
    return True
