"""Oriented shape graphs and the partial semigroup of their intervals.

A shape graph is a finite set of nodes joined by oriented arcs. An arc runs
from its source (coordinate 0, or minus infinity when unbounded) to its target
(coordinate ``length``). Either end may be open, meaning it is not glued to a
node. Intervals are finite unions of half-open runs ``(a, b]`` measured in arc
coordinates; a run with ``b`` at the target coordinate contains the target node.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

__all__ = [
    "Arc",
    "ShapeGraph",
    "Run",
    "Interval",
    "InvalidInterval",
    "GraphParseError",
    "GraphMismatch",
    "parse_rational",
    "format_rational",
    "parse_graph",
    "format_graph",
    "parse_interval",
    "format_interval",
    "compose",
    "subtract",
    "is_subinterval",
    "enumerate_intervals",
    "intervals_from_runs",
    "disjoint",
    "classify",
]

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_RAT = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class GraphParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class InvalidInterval(ValueError):
    pass


class GraphMismatch(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    m = _RAT.match(text)
    if not m:
        raise ValueError(f"not a rational number: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Arc:
    id: str
    source: Optional[str]
    target: Optional[str]
    length: Optional[Fraction]  # None means unbounded

    @property
    def lo(self) -> Optional[Fraction]:
        """Smallest coordinate, or None for minus infinity."""
        if self.length is not None or self.source is not None:
            return Fraction(0)
        return None

    @property
    def hi(self) -> Optional[Fraction]:
        """Largest coordinate, or None for plus infinity."""
        if self.length is not None:
            return self.length
        if self.target is not None:
            # unbounded towards the source: the target sits at coordinate 0
            return Fraction(0)
        return None

    def contains_coordinate_range(self, a: Fraction, b: Fraction) -> bool:
        lo, hi = self.lo, self.hi
        return (lo is None or lo <= a) and (hi is None or b <= hi)


class ShapeGraph:
    """Immutable oriented graph of arcs glued at nodes."""

    __slots__ = ("nodes", "arcs", "_by_id", "_incoming", "_outgoing", "_hash")

    def __init__(self, nodes: Iterable[str], arcs: Sequence[Arc]):
        nodes = frozenset(nodes)
        arcs = tuple(arcs)
        by_id: dict[str, Arc] = {}
        incoming: dict[str, list[str]] = defaultdict(list)
        outgoing: dict[str, list[str]] = defaultdict(list)
        for arc in arcs:
            if arc.id in by_id:
                raise ValueError(f"duplicate arc identifier {arc.id!r}")
            by_id[arc.id] = arc
            for end in (arc.source, arc.target):
                if end is not None and end not in nodes:
                    raise ValueError(f"arc {arc.id!r} uses undeclared node {end!r}")
            if arc.length is not None and arc.length <= 0:
                raise ValueError(f"arc {arc.id!r} must have positive length")
            if arc.length is None and arc.source is not None and arc.target is not None:
                raise ValueError(f"arc {arc.id!r}: infinite length needs an open end")
            if arc.target is not None:
                incoming[arc.target].append(arc.id)
            if arc.source is not None:
                outgoing[arc.source].append(arc.id)
        for v in nodes:
            if v not in incoming and v not in outgoing:
                raise ValueError(f"node {v!r} is not the endpoint of any arc")
        self.nodes = nodes
        self.arcs = arcs
        self._by_id = by_id
        self._incoming = {v: tuple(sorted(incoming.get(v, ()))) for v in nodes}
        self._outgoing = {v: tuple(sorted(outgoing.get(v, ()))) for v in nodes}
        self._hash = hash((nodes, arcs))

    def arc(self, arc_id: str) -> Arc:
        try:
            return self._by_id[arc_id]
        except KeyError:
            raise InvalidInterval(f"unknown arc {arc_id!r}") from None

    def incoming(self, node: str) -> tuple[str, ...]:
        return self._incoming[node]

    def outgoing(self, node: str) -> tuple[str, ...]:
        return self._outgoing[node]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, ShapeGraph):
            return NotImplemented
        return self._hash == other._hash and self.nodes == other.nodes and self.arcs == other.arcs

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"ShapeGraph(nodes={sorted(self.nodes)}, arcs={[a.id for a in self.arcs]})"


def parse_graph(text: str) -> ShapeGraph:
    nodes: list[str] = []
    seen_nodes: set[str] = set()
    arcs: list[Arc] = []
    seen_arcs: set[str] = set()
    pending: list[tuple[int, Arc]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "node":
            if len(tok) != 2 or not _IDENT.match(tok[1]):
                raise GraphParseError("expected 'node <id>'", lineno)
            if tok[1] in seen_nodes:
                raise GraphParseError(f"duplicate node identifier {tok[1]!r}", lineno)
            seen_nodes.add(tok[1])
            nodes.append(tok[1])
        elif kind == "arc":
            if len(tok) != 6 or tok[4] != "len":
                raise GraphParseError("expected 'arc <id> <src|-> <tgt|-> len <p/q|inf>'", lineno)
            arc_id, src, tgt, length_text = tok[1], tok[2], tok[3], tok[5]
            if not _IDENT.match(arc_id):
                raise GraphParseError(f"bad arc identifier {arc_id!r}", lineno)
            if arc_id in seen_arcs:
                raise GraphParseError(f"duplicate arc identifier {arc_id!r}", lineno)
            for end in (src, tgt):
                if end != "-" and not _IDENT.match(end):
                    raise GraphParseError(f"bad node reference {end!r}", lineno)
            source = None if src == "-" else src
            target = None if tgt == "-" else tgt
            if length_text == "inf":
                if source is not None and target is not None:
                    raise GraphParseError(
                        f"arc {arc_id!r}: infinite length on a node-bounded side", lineno
                    )
                length = None
            else:
                try:
                    length = parse_rational(length_text)
                except ValueError as exc:
                    raise GraphParseError(str(exc), lineno) from None
                if length <= 0:
                    raise GraphParseError(f"arc {arc_id!r}: length must be positive", lineno)
            seen_arcs.add(arc_id)
            arc = Arc(arc_id, source, target, length)
            arcs.append(arc)
            pending.append((lineno, arc))
        else:
            raise GraphParseError(f"unknown statement {kind!r}", lineno)
    for lineno, arc in pending:
        for end in (arc.source, arc.target):
            if end is not None and end not in seen_nodes:
                raise GraphParseError(f"arc {arc.id!r} uses undeclared node {end!r}", lineno)
    used = {e for a in arcs for e in (a.source, a.target) if e is not None}
    for v in nodes:
        if v not in used:
            raise GraphParseError(f"node {v!r} is not the endpoint of any arc")
    if not arcs:
        raise GraphParseError("graph has no arcs")
    return ShapeGraph(nodes, arcs)


def format_graph(g: ShapeGraph) -> str:
    lines = [f"node {v}" for v in sorted(g.nodes)]
    for a in g.arcs:
        length = "inf" if a.length is None else format_rational(a.length)
        lines.append(f"arc {a.id} {a.source or '-'} {a.target or '-'} len {length}")
    return "\n".join(lines) + "\n"


class Run(NamedTuple):
    arc: str
    a: Fraction
    b: Fraction


def _normalize_runs(runs: Iterable[tuple[str, Fraction, Fraction]]) -> tuple[Run, ...]:
    per_arc: dict[str, list[tuple[Fraction, Fraction]]] = defaultdict(list)
    for arc, a, b in runs:
        per_arc[arc].append((Fraction(a), Fraction(b)))
    out: list[Run] = []
    for arc in sorted(per_arc):
        pieces = sorted(per_arc[arc])
        cur_a, cur_b = pieces[0]
        for a, b in pieces[1:]:
            if a <= cur_b:
                cur_b = max(cur_b, b)
            else:
                out.append(Run(arc, cur_a, cur_b))
                cur_a, cur_b = a, b
        out.append(Run(arc, cur_a, cur_b))
    return tuple(out)


class Interval:
    """A valid interval: canonical run tuple on a fixed shape graph."""

    __slots__ = ("graph", "runs", "_hash", "_closed", "_cycle")

    def __init__(self, graph: ShapeGraph, runs: Iterable[tuple[str, Fraction, Fraction]]):
        runs = _normalize_runs(runs)
        if not runs:
            raise InvalidInterval("empty interval")
        closed = _check_valid(graph, runs)
        self.graph = graph
        self.runs = runs
        self._closed = closed
        self._hash = hash(runs)
        self._cycle: Optional[tuple[Run, ...]] | bool = False

    @classmethod
    def try_make(cls, graph: ShapeGraph, runs) -> Optional["Interval"]:
        try:
            return cls(graph, runs)
        except InvalidInterval:
            return None

    @property
    def closed_nodes(self) -> dict[str, Run]:
        """Nodes contained in the interval, each mapped to the run closing at it."""
        return self._closed

    def contains_node(self, node: str) -> bool:
        return node in self._closed

    def starts_at(self, run: Run) -> Optional[str]:
        arc = self.graph.arc(run.arc)
        if arc.source is not None and run.a == arc.lo:
            return arc.source
        return None

    def cycle(self) -> Optional[tuple[Run, ...]]:
        """Runs forming the unique cycle, or None for contractible intervals."""
        if self._cycle is False:
            self._cycle = _find_cycle(self)
        return self._cycle  # type: ignore[return-value]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Interval):
            return NotImplemented
        return self._hash == other._hash and self.runs == other.runs and self.graph == other.graph

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Interval") -> bool:
        return (len(self.runs), self.runs) < (len(other.runs), other.runs)

    def __repr__(self) -> str:
        return f"Interval({format_interval(self)})"

    def __str__(self) -> str:
        return format_interval(self)


def _closing_node(graph: ShapeGraph, run: Run) -> Optional[str]:
    arc = graph.arc(run.arc)
    if arc.target is not None and run.b == arc.hi:
        return arc.target
    return None


def _check_valid(graph: ShapeGraph, runs: tuple[Run, ...]) -> dict[str, Run]:
    closed: dict[str, Run] = {}
    for r in runs:
        arc = graph.arc(r.arc)
        if not r.a < r.b:
            raise InvalidInterval(f"run {r.arc}:{r.a},{r.b} is empty")
        if not arc.contains_coordinate_range(r.a, r.b):
            raise InvalidInterval(f"run {r.arc}:{r.a},{r.b} leaves the arc")
        v = _closing_node(graph, r)
        if v is not None:
            if v in closed:
                raise InvalidInterval(f"two runs close at node {v!r}")
            closed[v] = r
    if len(runs) > 1:
        parent = {r: r for r in runs}

        def find(x: Run) -> Run:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for r in runs:
            arc = graph.arc(r.arc)
            if arc.source is not None and r.a == arc.lo and arc.source in closed:
                parent[find(r)] = find(closed[arc.source])
        roots = {find(r) for r in runs}
        if len(roots) != 1:
            raise InvalidInterval("runs are not connected")
    return closed


def _find_cycle(J: Interval) -> Optional[tuple[Run, ...]]:
    pred: dict[Run, Optional[Run]] = {}
    for r in J.runs:
        v = J.starts_at(r)
        pred[r] = J.closed_nodes.get(v) if v is not None else None
    for start in J.runs:
        seen: list[Run] = []
        cur: Optional[Run] = start
        while cur is not None and cur not in seen:
            seen.append(cur)
            cur = pred[cur]
        if cur is not None:
            cyc = seen[seen.index(cur):]
            return tuple(sorted(cyc))
    return None


def classify(J: Interval) -> str:
    cyc = J.cycle()
    if cyc is None:
        return "contractible"
    return "circle" if len(cyc) == len(J.runs) else "circle_with_trees"


def _same_graph(J: Interval, K: Interval) -> None:
    if J.graph is not K.graph and J.graph != K.graph:
        raise GraphMismatch("intervals live on different shape graphs")


def _runs_overlap(J: Interval, K: Interval) -> bool:
    by_arc: dict[str, list[Run]] = defaultdict(list)
    for r in J.runs:
        by_arc[r.arc].append(r)
    for s in K.runs:
        for r in by_arc.get(s.arc, ()):
            if max(r.a, s.a) < min(r.b, s.b):
                return True
    return False


def disjoint(J: Interval, K: Interval) -> bool:
    _same_graph(J, K)
    if _runs_overlap(J, K):
        return False
    return not (J.closed_nodes.keys() & K.closed_nodes.keys())


def compose(J: Interval, K: Interval) -> Optional[Interval]:
    """Sum of intervals, or None when the union is not a disjoint interval."""
    if not disjoint(J, K):
        return None
    return Interval.try_make(J.graph, J.runs + K.runs)


def is_subinterval(K: Interval, J: Interval) -> bool:
    """True when the point set of K lies inside that of J."""
    _same_graph(J, K)
    by_arc: dict[str, list[Run]] = defaultdict(list)
    for r in J.runs:
        by_arc[r.arc].append(r)
    for s in K.runs:
        if not any(r.a <= s.a and s.b <= r.b for r in by_arc.get(s.arc, ())):
            return False
    return True


def subtract(J: Interval, K: Interval) -> Optional[Interval]:
    """Difference J minus K, or None unless K sits inside J with an interval left over."""
    if not is_subinterval(K, J):
        return None
    removed: dict[str, list[Run]] = defaultdict(list)
    for s in K.runs:
        removed[s.arc].append(s)
    pieces: list[tuple[str, Fraction, Fraction]] = []
    for r in J.runs:
        cuts = sorted(removed.get(r.arc, ()), key=lambda s: s.a)
        cur = r.a
        for s in cuts:
            if s.a >= r.b or s.b <= r.a:
                continue
            if cur < s.a:
                pieces.append((r.arc, cur, s.a))
            cur = max(cur, s.b)
        if cur < r.b:
            pieces.append((r.arc, cur, r.b))
    if not pieces:
        return None
    return Interval.try_make(J.graph, pieces)


def parse_interval(graph: ShapeGraph, text: str) -> Interval:
    runs = []
    for part in text.split("+"):
        part = part.strip()
        m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*([^,]+),(.+)$", part)
        if not m:
            raise InvalidInterval(f"bad run literal {part!r}")
        try:
            a, b = parse_rational(m.group(2)), parse_rational(m.group(3))
        except ValueError as exc:
            raise InvalidInterval(str(exc)) from None
        graph.arc(m.group(1))
        runs.append((m.group(1), a, b))
    return Interval(graph, runs)


def format_interval(J: Interval) -> str:
    return "+".join(f"{r.arc}:{format_rational(r.a)},{format_rational(r.b)}" for r in J.runs)


def _grid_points(arc: Arc, grid: Fraction, window: Optional[tuple[Fraction, Fraction]]) -> list[Fraction]:
    lo, hi = arc.lo, arc.hi
    if lo is None or hi is None:
        if window is None:
            raise ValueError(f"arc {arc.id!r} is unbounded; a window is required")
        w0, w1 = Fraction(window[0]), Fraction(window[1])
        lo = w0 if lo is None else max(lo, w0)
        hi = w1 if hi is None else min(hi, w1)
    else:
        if (hi - lo) % grid != 0:
            raise ValueError(f"grid {format_rational(grid)} does not divide arc {arc.id!r}")
    k0 = -((-lo) // grid)  # ceil
    k1 = hi // grid
    return [k * grid for k in range(int(k0), int(k1) + 1)]


def enumerate_intervals(
    g: ShapeGraph,
    grid: Fraction | int | str,
    max_runs: Optional[int] = None,
    window: Optional[tuple] = None,
) -> list[Interval]:
    """All valid intervals with endpoints on the grid, in a deterministic order."""
    grid = parse_rational(grid) if isinstance(grid, str) else Fraction(grid)
    if grid <= 0:
        raise ValueError("grid must be positive")
    candidates: list[Run] = []
    for arc in g.arcs:
        pts = _grid_points(arc, grid, window)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                candidates.append(Run(arc.id, pts[i], pts[j]))
    return intervals_from_runs(g, candidates, max_runs)


def intervals_from_runs(
    g: ShapeGraph, candidates: Sequence[Run], max_runs: Optional[int] = None
) -> list[Interval]:
    """Every valid interval whose runs are drawn from ``candidates``.

    Intervals are grown one attached run at a time; a connected run set always
    has a run whose removal keeps it connected, so nothing is missed.
    """
    by_start: dict[str, list[Run]] = defaultdict(list)
    by_close: dict[str, list[Run]] = defaultdict(list)
    for r in candidates:
        arc = g.arc(r.arc)
        if arc.source is not None and r.a == arc.lo:
            by_start[arc.source].append(r)
        if arc.target is not None and r.b == arc.hi:
            by_close[arc.target].append(r)

    def clashes(r: Run, runs: frozenset[Run]) -> bool:
        return any(s.arc == r.arc and s.a <= r.b and r.a <= s.b for s in runs)

    found: dict[frozenset[Run], Interval] = {}
    frontier: list[frozenset[Run]] = []
    for r in candidates:
        key = frozenset((r,))
        found[key] = Interval(g, key)
        frontier.append(key)
    while frontier:
        nxt: list[frozenset[Run]] = []
        for key in frontier:
            if max_runs is not None and len(key) >= max_runs:
                continue
            J = found[key]
            closed = J.closed_nodes
            extensions: list[Run] = []
            for v in closed:
                extensions.extend(by_start.get(v, ()))
            for r in key:
                v = J.starts_at(r)
                if v is not None and v not in closed:
                    extensions.extend(by_close.get(v, ()))
            for r in extensions:
                if r in key or clashes(r, key):
                    continue
                new = key | {r}
                if new in found:
                    continue
                K = Interval.try_make(g, new)
                if K is None or len(K.runs) != len(new):
                    continue
                found[new] = K
                nxt.append(new)
        frontier = nxt
    return sorted(found.values())


def iter_pairs(sample: Sequence[Interval]) -> Iterator[tuple[Interval, Interval]]:
    for x in sample:
        for y in sample:
            yield x, y
