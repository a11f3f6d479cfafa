"""Normal forms and brackets for the Lie algebra of a shape graph.

An element is a Cartan part (a step function, with ``h(J)`` identified with the
indicator of J) plus rational multiples of ``e(J)`` and ``f(J)``. Brackets of
generators follow the defining relations; a same-sign bracket that the
relations do not determine raises ``Unresolvable``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from . import cartan
from .cartan import StepFunction, euler_form, indicator, pairing, serre_member
from .shape_graph import (
    GraphMismatch,
    Interval,
    InvalidInterval,
    ShapeGraph,
    compose,
    format_rational,
    parse_interval,
    parse_rational,
    subtract,
)

__all__ = [
    "LieElement",
    "Unresolvable",
    "ExpressionError",
    "e",
    "f",
    "h",
    "bracket",
    "equal",
    "grade",
    "cartan_part",
    "jacobi_defect",
    "parse_expression",
    "format_element",
    "sl_matrix_image",
    "sl_matrix_model",
    "matrix_bracket",
]

Number = Union[int, Fraction]


class Unresolvable(Exception):
    """A same-sign bracket outside the Serre set, not orthogonal, not equal."""

    def __init__(self, sign: int, left: Interval, right: Interval):
        self.sign = sign
        self.pair = (left, right)
        letter = "e" if sign > 0 else "f"
        super().__init__(f"[{letter}({left}), {letter}({right})]")


class ExpressionError(ValueError):
    pass


def _frac(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class LieElement:
    __slots__ = ("graph", "cartan", "terms")

    def __init__(
        self,
        graph: ShapeGraph,
        cartan_part: Optional[StepFunction] = None,
        terms: Optional[Mapping[tuple[int, Interval], Number]] = None,
    ):
        self.graph = graph
        self.cartan = cartan_part if cartan_part is not None else StepFunction.zero(graph)
        self.terms = {k: _frac(v) for k, v in (terms or {}).items() if v != 0}

    def _check(self, other: "LieElement") -> None:
        if self.graph is not other.graph and self.graph != other.graph:
            raise GraphMismatch("elements live on different shape graphs")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return LieElement(self.graph, self.cartan + other.cartan, terms)

    def scale(self, c: Number) -> "LieElement":
        c = _frac(c)
        return LieElement(self.graph, self.cartan.scale(c), {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c: Number) -> "LieElement":
        return self.scale(c)

    def __neg__(self) -> "LieElement":
        return self.scale(-1)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms and self.cartan.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.cartan == other.cartan and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.cartan, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"LieElement({format_element(self, sep=' + ')})"

    def __str__(self) -> str:
        return format_element(self)


def e(J: Interval) -> LieElement:
    return LieElement(J.graph, None, {(1, J): 1})


def f(J: Interval) -> LieElement:
    return LieElement(J.graph, None, {(-1, J): 1})


def h(J: Interval) -> LieElement:
    return LieElement(J.graph, indicator(J), None)


def _kappa_fn(fn: StepFunction, J: Interval) -> Number:
    ind = indicator(J)
    return euler_form(fn, ind) + euler_form(ind, fn)


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _gen(graph: ShapeGraph, sign: int, J: Optional[Interval], coef: Number = 1) -> LieElement:
    if J is None or coef == 0:
        return LieElement(graph)
    return LieElement(graph, None, {(sign, J): coef})


def _same_sign(sign: int, J: Interval, K: Interval) -> LieElement:
    g = J.graph
    if J == K:
        return LieElement(g)
    if serre_member(J, K):
        exponent = pairing(K, J) if sign > 0 else pairing(J, K)
        return _gen(g, sign, compose(J, K), _sign(exponent))
    if serre_member(K, J):
        exponent = pairing(J, K) if sign > 0 else pairing(K, J)
        return _gen(g, sign, compose(K, J), -_sign(exponent))
    if cartan.is_orthogonal(J, K):
        return LieElement(g)
    raise Unresolvable(sign, J, K)


def _positive_negative(J: Interval, K: Interval) -> LieElement:
    """[e(J), f(K)]."""
    g = J.graph
    out = LieElement(g, indicator(J) if J == K else None)
    x = cartan.xi(J, K)
    if x:
        out = out + _gen(g, 1, subtract(J, K), x) - _gen(g, -1, subtract(K, J), x)
    return out


def _bracket_generators(s1: int, J: Interval, s2: int, K: Interval) -> LieElement:
    if s1 == s2:
        return _same_sign(s1, J, K)
    if s1 > 0:
        return _positive_negative(J, K)
    return -_positive_negative(K, J)


def bracket(x: LieElement, y: LieElement) -> LieElement:
    x._check(y)
    g = x.graph
    out = LieElement(g)
    if not x.cartan.is_zero():
        for (s, K), c in y.terms.items():
            k = _kappa_fn(x.cartan, K)
            if k:
                out = out + _gen(g, s, K, s * c * k)
    if not y.cartan.is_zero():
        for (s, J), c in x.terms.items():
            k = _kappa_fn(y.cartan, J)
            if k:
                out = out - _gen(g, s, J, s * c * k)
    for (s1, J), c1 in sorted(x.terms.items(), key=_term_key):
        for (s2, K), c2 in sorted(y.terms.items(), key=_term_key):
            out = out + _bracket_generators(s1, J, s2, K).scale(c1 * c2)
    return out


def equal(x: LieElement, y: LieElement) -> bool:
    return x == y


def cartan_part(x: LieElement) -> StepFunction:
    return x.cartan


def grade(x: LieElement) -> dict[StepFunction, LieElement]:
    """Split an element by multidegree: +1_J for e(J), -1_J for f(J), 0 for the Cartan part."""
    parts: dict[StepFunction, LieElement] = {}
    if not x.cartan.is_zero():
        parts[StepFunction.zero(x.graph)] = LieElement(x.graph, x.cartan)
    for (s, J), c in x.terms.items():
        deg = indicator(J).scale(s)
        parts[deg] = parts.get(deg, LieElement(x.graph)) + _gen(x.graph, s, J, c)
    return parts


def jacobi_defect(x: LieElement, y: LieElement, z: LieElement) -> LieElement:
    return bracket(bracket(x, y), z) + bracket(bracket(y, z), x) + bracket(bracket(z, x), y)


# ---------------------------------------------------------------- formatting


def _term_key(item):
    (s, J), _ = item
    return (-s, len(J.runs), J.runs)


def format_element(x: LieElement, sep: str = "\n") -> str:
    lines = []
    for (s, J), c in sorted(x.terms.items(), key=_term_key):
        if s > 0:
            lines.append(f"{format_rational(c)} * e({J})")
    for c, run in x.cartan.terms():
        lit = f"{run.arc}:{format_rational(run.a)},{format_rational(run.b)}"
        lines.append(f"{format_rational(c)} * h({lit})")
    for (s, J), c in sorted(x.terms.items(), key=_term_key):
        if s < 0:
            lines.append(f"{format_rational(c)} * f({J})")
    return sep.join(lines) if lines else "0"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<atom>[efh])\s*\((?P<body>[^()]*)\)|(?P<num>\d+(?:/\d+)?)|(?P<sym>[\[\],+\-*()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out: list[tuple[str, str]] = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected input at column {pos + 1}: {text[pos:pos + 10]!r}")
        if m.group("atom"):
            out.append(("atom", m.group("atom") + "|" + m.group("body")))
        elif m.group("num"):
            out.append(("num", m.group("num")))
        else:
            out.append(("sym", m.group("sym")))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, graph: ShapeGraph, tokens: list[tuple[str, str]]):
        self.graph = graph
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Optional[tuple[str, str]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, sym: Optional[str] = None) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        if sym is not None and tok != ("sym", sym):
            raise ExpressionError(f"expected {sym!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> LieElement:
        out = self.term()
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> LieElement:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        kind, val = tok
        if kind == "sym" and val == "-":
            self.take()
            return -self.term()
        if kind == "num":
            self.take()
            self.take("*")
            return self.term().scale(parse_rational(val))
        if kind == "atom":
            self.take()
            letter, body = val.split("|", 1)
            try:
                J = parse_interval(self.graph, body)
            except InvalidInterval as exc:
                raise ExpressionError(f"bad interval {body!r}: {exc}") from None
            return {"e": e, "f": f, "h": h}[letter](J)
        if kind == "sym" and val == "[":
            self.take()
            left = self.expr()
            self.take(",")
            right = self.expr()
            self.take("]")
            return bracket(left, right)
        if kind == "sym" and val == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise ExpressionError(f"unexpected token {val!r}")


def parse_expression(graph: ShapeGraph, text: str) -> LieElement:
    """Evaluate an expression; brackets are computed as they are parsed."""
    p = _Parser(graph, _tokenize(text))
    out = p.expr()
    if p.peek() is not None:
        raise ExpressionError(f"trailing input starting at {p.peek()[1]!r}")
    return out


# ---------------------------------------------------------------- sl(n) model

Matrix = dict  # (row, col) -> Fraction, 1-based indices


def _unit(i: int, j: int) -> Matrix:
    return {(i, j): Fraction(1)}


def _matrix_add(a: Matrix, b: Matrix, c: Number = 1) -> Matrix:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + c * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _matrix_mul(a: Matrix, b: Matrix) -> Matrix:
    rows: dict[int, list[tuple[int, Fraction]]] = {}
    for (i, j), v in b.items():
        rows.setdefault(i, []).append((j, v))
    out: Matrix = {}
    for (i, k), v in a.items():
        for j, w in rows.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + v * w
    return {k: v for k, v in out.items() if v}


def matrix_bracket(a: Matrix, b: Matrix) -> Matrix:
    return _matrix_add(_matrix_mul(a, b), _matrix_mul(b, a), -1)


def _integer_endpoints(J: Interval) -> tuple[int, int]:
    if len(J.runs) != 1:
        raise ValueError("the matrix model covers single-run intervals on a line")
    r = J.runs[0]
    if r.a.denominator != 1 or r.b.denominator != 1:
        raise ValueError("the matrix model needs integer endpoints")
    return int(r.a), int(r.b)


def sl_matrix_image(x: LieElement) -> Matrix:
    """Image under e(a,b] -> E[a+1,b+1], f(a,b] -> E[b+1,a+1], h(a,b] -> E[a+1,a+1] - E[b+1,b+1]."""
    out: Matrix = {}
    for (s, J), c in x.terms.items():
        a, b = _integer_endpoints(J)
        out = _matrix_add(out, _unit(a + 1, b + 1) if s > 0 else _unit(b + 1, a + 1), c)
    for c, run in x.cartan.terms():
        if run.a.denominator != 1 or run.b.denominator != 1:
            raise ValueError("the matrix model needs integer endpoints")
        a, b = int(run.a), int(run.b)
        out = _matrix_add(out, _unit(a + 1, a + 1), c)
        out = _matrix_add(out, _unit(b + 1, b + 1), -c)
    return out


def sl_matrix_model(n: int) -> list[tuple[LieElement, Matrix]]:
    """All e, f, h generators on the integer intervals of [0, n] with their matrices."""
    if not 2 <= n <= 8:
        raise ValueError("n must lie between 2 and 8")
    from .graphs import line

    g = line()
    out = []
    for a in range(n):
        for b in range(a + 1, n + 1):
            J = Interval(g, [("a", a, b)])
            for gen in (e(J), f(J), h(J)):
                out.append((gen, sl_matrix_image(gen)))
    return out
