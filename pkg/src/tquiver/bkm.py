"""Exact graded models of Borcherds-Kac-Moody algebras attached to interval sets.

Two independent multiplicity computations live here:

* ``GradedModel`` builds the positive part as the free Lie algebra on
  ``e_1..e_n`` modulo the ideal generated by the Serre elements, one multidegree
  at a time, inside the tensor algebra.  The full algebra (negative part,
  Cartan part and all brackets) is then realised on top of that basis.
* ``gabber_kac_mult`` works on the free Lie algebra in ``f_1..f_n`` and removes
  the maximal graded ideal meeting the Cartan part trivially, detected as the
  joint kernel of all raising operators.

The bridge to shape graphs is ``PhiMap``, which sends interval generators to
model elements through the join relations, and ``verify_presentation`` which
checks the defining relations of the interval Lie algebra on those images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from . import cartan as cd
from .axioms import AxiomReport
from .linalg import Echelon, add_scaled, scale
from .shape_graph import (
    Interval,
    classify,
    compose,
    disjoint,
    format_interval,
    is_subinterval,
    subtract,
)

__all__ = [
    "CartanMatrix",
    "CartanError",
    "ResourceLimit",
    "HeightExceeded",
    "PhiError",
    "EmbedError",
    "MAX_RANK",
    "MAX_HEIGHT",
    "parse_cartan_matrix",
    "is_irreducible",
    "irreducibility_violation",
    "cartan_matrix",
    "lyndon_words",
    "free_lie_dimension",
    "GradedModel",
    "ModelElement",
    "build_graded",
    "gabber_kac_mult",
    "gabber_kac_table",
    "multidegrees",
    "PhiMap",
    "phi_map",
    "verify_presentation",
    "Embedding",
    "embed",
    "dot_export",
]

MAX_RANK = 6
MAX_HEIGHT = 8

Degree = tuple[int, ...]
Word = tuple[int, ...]
Poly = dict  # Word -> Fraction


class CartanError(ValueError):
    """A matrix that is not a symmetric Borcherds-Cartan matrix."""


class ResourceLimit(RuntimeError):
    """Rank or height beyond the desk-scale guard rails."""


class HeightExceeded(ArithmeticError):
    """A bracket would leave the multidegrees stored in the model."""


class PhiError(ValueError):
    """An interval that cannot be written as an image of the set's generators."""


class EmbedError(ValueError):
    """Two interval sets that are neither a subset pair nor a one-split refinement."""


# ------------------------------------------------------------------ matrices


class CartanMatrix:
    """Symmetric integer matrix with diagonal 2 or non-positive and non-positive off-diagonal.

    ``strict=True`` additionally demands the entry ranges produced by interval
    sets: diagonal in {2, 0} and off-diagonal in {0, -1, -2}.
    """

    def __init__(self, rows: Sequence[Sequence[int]], strict: bool = False):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        size = len(rows)
        if size == 0 or any(len(r) != size for r in rows):
            raise CartanError("matrix must be square and non-empty")
        for i in range(size):
            if rows[i][i] != 2 and rows[i][i] > 0:
                raise CartanError(f"diagonal entry {i + 1} is {rows[i][i]}; expected 2 or <= 0")
            for j in range(size):
                if rows[i][j] != rows[j][i]:
                    raise CartanError(f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")
                if i != j and rows[i][j] > 0:
                    raise CartanError(f"off-diagonal entry ({i + 1},{j + 1}) is positive")
        if strict:
            for i in range(size):
                if rows[i][i] not in (2, 0):
                    raise CartanError(f"diagonal entry {i + 1} is {rows[i][i]}; expected 2 or 0")
                for j in range(size):
                    if i != j and rows[i][j] not in (0, -1, -2):
                        raise CartanError(
                            f"off-diagonal entry ({i + 1},{j + 1}) is {rows[i][j]}; expected 0, -1 or -2"
                        )
        self.rows = rows
        self.n = size

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.rows[ij[0]][ij[1]]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CartanMatrix):
            return self.rows == other.rows
        if isinstance(other, (list, tuple)):
            return self.rows == tuple(tuple(r) for r in other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"CartanMatrix({[list(r) for r in self.rows]})"

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def format(self) -> str:
        width = max(len(str(x)) for r in self.rows for x in r)
        return "\n".join(" ".join(str(x).rjust(width) for x in r) for r in self.rows)

    def weight(self, i: int, degree: Degree) -> int:
        """Eigenvalue of h_i on the positive degree ``degree``."""
        return sum(self.rows[i][k] * d for k, d in enumerate(degree))


def parse_cartan_matrix(text: str) -> CartanMatrix:
    """File format: first line the size n, then n rows of n integers."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise CartanError("empty matrix file")
    try:
        size = int(lines[0])
        rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise CartanError(f"non-integer entry: {exc}") from None
    if len(rows) != size:
        raise CartanError(f"expected {size} rows, found {len(rows)}")
    return CartanMatrix(rows)


# ------------------------------------------------------------- interval sets


def irreducibility_violation(members: Sequence[Interval]) -> Optional[str]:
    """Reason the set is not irreducible, or None."""
    if len(set(members)) != len(members):
        return "repeated interval"
    for J in members:
        kind = classify(J)
        if kind not in ("contractible", "circle"):
            return f"{format_interval(J)} is neither contractible nor a circle"
    for J, K in combinations(members, 2):
        summable = compose(J, K) is not None
        apart = not summable and disjoint(J, K)
        inside = (classify(J) == "circle" and is_subinterval(K, J)) or (
            classify(K) == "circle" and is_subinterval(J, K)
        )
        cases = summable + apart + inside
        if cases != 1:
            what = "no allowed position" if cases == 0 else "ambiguous position"
            return f"{format_interval(J)} and {format_interval(K)}: {what}"
    return None


def is_irreducible(members: Sequence[Interval]) -> tuple[bool, Optional[str]]:
    reason = irreducibility_violation(members)
    return reason is None, reason


def cartan_matrix(members: Sequence[Interval]) -> CartanMatrix:
    """Matrix of kappa values; entries are validated but irreducibility is not enforced."""
    return CartanMatrix([[cd.kappa(J, K) for K in members] for J in members], strict=True)


# ------------------------------------------------------ free Lie algebra words


def _multiset_permutations(counts: list[int], length: int) -> Iterator[Word]:
    word: list[int] = []

    def rec() -> Iterator[Word]:
        if len(word) == length:
            yield tuple(word)
            return
        for letter, c in enumerate(counts):
            if c:
                counts[letter] -= 1
                word.append(letter)
                yield from rec()
                word.pop()
                counts[letter] += 1

    yield from rec()


def _is_lyndon(w: Word) -> bool:
    return all(w < w[i:] for i in range(1, len(w)))


@lru_cache(maxsize=None)
def lyndon_words(degree: Degree) -> tuple[Word, ...]:
    """Lyndon words with letter counts ``degree``, in lexicographic order."""
    length = sum(degree)
    if length == 0:
        return ()
    return tuple(w for w in _multiset_permutations(list(degree), length) if _is_lyndon(w))


def _standard_factor(w: Word) -> tuple[Word, Word]:
    right = min(w[i:] for i in range(1, len(w)))
    return w[: len(w) - len(right)], right


def _mobius(k: int) -> int:
    result, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            result = -result
        p += 1
    return -result if k > 1 else result


def free_lie_dimension(degree: Degree) -> int:
    """Witt's necklace formula for the multigraded free Lie algebra."""
    total = sum(degree)
    if total == 0:
        return 0
    g = 0
    for d in degree:
        g = gcd(g, d)
    acc = 0
    for d in range(1, g + 1):
        if g % d == 0:
            term = factorial(total // d)
            for x in degree:
                term //= factorial(x // d)
            acc += _mobius(d) * term
    return acc // total


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for a, ca in p.items():
        for b, cb in q.items():
            w = a + b
            v = out.get(w, 0) + ca * cb
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


def _commutator(p: Poly, q: Poly) -> Poly:
    out = _poly_mul(p, q)
    add_scaled(out, _poly_mul(q, p), -1)
    return out


@lru_cache(maxsize=None)
def _lyndon_poly(w: Word) -> tuple:
    if len(w) == 1:
        return ((w, Fraction(1)),)
    u, v = _standard_factor(w)
    return tuple(sorted(_commutator(dict(_lyndon_poly(u)), dict(_lyndon_poly(v))).items()))


def lyndon_poly(w: Word) -> Poly:
    """Tensor-algebra image of the standard bracketing of a Lyndon word."""
    return dict(_lyndon_poly(w))


def _degree_of(w: Word, n: int) -> Degree:
    d = [0] * n
    for x in w:
        d[x] += 1
    return tuple(d)


def _height(d: Degree) -> int:
    return sum(d)


def _unit(n: int, i: int) -> Degree:
    return tuple(1 if k == i else 0 for k in range(n))


def _minus(d: Degree, i: int) -> Optional[Degree]:
    if d[i] == 0:
        return None
    return d[:i] + (d[i] - 1,) + d[i + 1 :]


def multidegrees(n: int, max_height: int) -> list[Degree]:
    """Non-zero degrees with height at most ``max_height``, by height then reverse-lex."""
    out: list[Degree] = []

    def rec(prefix: list[int], left: int) -> None:
        if len(prefix) == n:
            if sum(prefix):
                out.append(tuple(prefix))
            return
        for x in range(left, -1, -1):
            rec(prefix + [x], left - x)

    rec([], max_height)
    out.sort(key=lambda d: (sum(d), tuple(-x for x in d)))
    return out


def _guard(A: CartanMatrix, max_height: int) -> None:
    if A.n > MAX_RANK:
        raise ResourceLimit(f"rank {A.n} exceeds the limit {MAX_RANK}")
    if max_height > MAX_HEIGHT:
        raise ResourceLimit(f"height {max_height} exceeds the limit {MAX_HEIGHT}")
    if max_height < 1:
        raise ResourceLimit("height must be at least 1")


# ------------------------------------------------------------- Serre quotient

Key = tuple  # ("0", i) | ("+", degree, index) | ("-", degree, index)


class ModelElement:
    """Sparse vector over the model basis.

    Keys ``("+", d, k)`` are positive basis vectors, ``("0", i)`` is ``h_i`` and
    ``("-", d, k)`` is the Chevalley involution applied to ``("+", d, k)``; with
    that convention ``f_i`` is ``-("-", e_i degree, 0)``.
    """

    __slots__ = ("model", "vec")

    def __init__(self, model: "GradedModel", vec: Optional[Mapping] = None):
        self.model = model
        self.vec = {k: Fraction(v) for k, v in (vec or {}).items() if v}

    def __add__(self, other: "ModelElement") -> "ModelElement":
        out = dict(self.vec)
        add_scaled(out, other.vec, 1)
        return ModelElement(self.model, out)

    def __sub__(self, other: "ModelElement") -> "ModelElement":
        out = dict(self.vec)
        add_scaled(out, other.vec, -1)
        return ModelElement(self.model, out)

    def __neg__(self) -> "ModelElement":
        return self.scale(-1)

    def scale(self, c) -> "ModelElement":
        return ModelElement(self.model, scale(self.vec, Fraction(c)))

    def __rmul__(self, c) -> "ModelElement":
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.vec

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelElement):
            return NotImplemented
        return self.vec == other.vec

    def __hash__(self) -> int:
        return hash(frozenset(self.vec.items()))

    def degree_parts(self) -> dict[Degree, "ModelElement"]:
        """Split by signed multidegree; the Cartan part sits at the zero degree."""
        n = self.model.n
        parts: dict[Degree, dict] = {}
        for k, c in self.vec.items():
            if k[0] == "0":
                d = (0,) * n
            elif k[0] == "+":
                d = k[1]
            else:
                d = tuple(-x for x in k[1])
            parts.setdefault(d, {})[k] = c
        return {d: ModelElement(self.model, v) for d, v in parts.items()}

    def __repr__(self) -> str:
        return f"ModelElement({self})"

    def __str__(self) -> str:
        if not self.vec:
            return "0"
        items = sorted(self.vec.items(), key=lambda kv: _key_order(kv[0]))
        return " + ".join(f"{c}*{_key_label(k)}" for k, c in items)


def _key_order(k: Key):
    sector = {"+": 0, "0": 1, "-": 2}[k[0]]
    if k[0] == "0":
        return (sector, 0, (), k[1])
    return (sector, sum(k[1]), k[1], k[2])


def _key_label(k: Key) -> str:
    if k[0] == "0":
        return f"h{k[1] + 1}"
    base = f"x[{','.join(map(str, k[1]))}]#{k[2]}"
    return base if k[0] == "+" else f"omega({base})"


@dataclass
class _Layer:
    ideal: Optional[Echelon]  # None when the whole free layer is in the ideal
    basis: list  # chosen Lyndon words
    index: dict
    expr: Optional[Echelon]  # ideal rows then basis rows, labelled


class GradedModel:
    """Derived Borcherds-Kac-Moody algebra of ``A`` truncated at ``max_height``.

    Multidegree layers are built lazily, so asking for a single multiplicity
    only touches the degrees below it.
    """

    def __init__(self, A: CartanMatrix, max_height: int):
        _guard(A, max_height)
        self.A = A
        self.n = A.n
        self.max_height = max_height
        self._layers: dict[Degree, _Layer] = {}
        self._serre = self._serre_elements()
        self._memo: dict[tuple[Key, Key], dict] = {}
        self._trees: dict[tuple[Degree, int], tuple[dict, dict]] = {}

    # -- construction

    def _serre_elements(self) -> dict[Degree, list[Poly]]:
        A, n = self.A, self.n
        out: dict[Degree, list[Poly]] = {}
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if A[i, i] == 2:
                    power = 1 - A[i, j]
                    if power + 1 > self.max_height:
                        continue
                    poly: Poly = {(j,): Fraction(1)}
                    for _ in range(power):
                        poly = _commutator({(i,): Fraction(1)}, poly)
                elif A[i, j] == 0:
                    poly = _commutator({(i,): Fraction(1)}, {(j,): Fraction(1)})
                else:
                    continue
                if poly:
                    deg = _degree_of(next(iter(poly)), n)
                    out.setdefault(deg, []).append(poly)
        return out

    def serre_generators(self) -> dict[Degree, list[Poly]]:
        return {d: [dict(p) for p in ps] for d, ps in self._serre.items()}

    def _check_height(self, degree: Degree) -> None:
        if _height(degree) > self.max_height:
            raise HeightExceeded(f"degree {degree} is above height {self.max_height}")

    def layer(self, degree: Degree) -> _Layer:
        got = self._layers.get(degree)
        if got is not None:
            return got
        self._check_height(degree)
        preds = [(i, _minus(degree, i)) for i in range(self.n)]
        preds = [(i, p) for i, p in preds if p is not None and any(p)]
        if preds and all(not self.layer(p).basis for _, p in preds):
            # the free Lie algebra is generated in degree one, so nothing survives
            lay = _Layer(None, [], {}, None)
            self._layers[degree] = lay
            return lay
        ideal = Echelon()
        for poly in self._serre.get(degree, ()):
            ideal.add(poly)
        for i, prev in preds:
            gen = {(i,): Fraction(1)}
            for row in self._ideal_rows(prev):
                ideal.add(_commutator(gen, row))
        expr = Echelon()
        for k, (row, _) in enumerate(list(ideal.rows.values())):
            expr.add(row, ("I", k))
        basis: list[Word] = []
        for w in lyndon_words(degree):
            if expr.add(lyndon_poly(w), ("B", len(basis))):
                basis.append(w)
        lay = _Layer(ideal, basis, {w: k for k, w in enumerate(basis)}, expr)
        self._layers[degree] = lay
        return lay

    def _ideal_rows(self, degree: Degree) -> list[Poly]:
        lay = self.layer(degree)
        if lay.ideal is None:
            return [lyndon_poly(w) for w in lyndon_words(degree)]
        return [row for row, _ in lay.ideal.rows.values()]

    def mult(self, degree: Degree) -> int:
        return len(self.layer(tuple(degree)).basis)

    def ideal_rank(self, degree: Degree) -> int:
        lay = self.layer(tuple(degree))
        return len(lyndon_words(tuple(degree))) if lay.ideal is None else lay.ideal.rank

    def multiplicities(self) -> dict[Degree, int]:
        return {d: self.mult(d) for d in multidegrees(self.n, self.max_height)}

    def express(self, degree: Degree, poly: Poly) -> dict:
        """Coordinates of a free Lie element of ``degree`` in the quotient basis."""
        lay = self.layer(degree)
        if lay.expr is None:
            return {}
        combo = lay.expr.express(poly)
        if combo is None:
            raise ValueError("element is not in the free Lie algebra")
        return {("+", degree, lab[1]): c for lab, c in combo.items() if lab[0] == "B"}

    def representative(self, degree: Degree, index: int) -> Poly:
        return lyndon_poly(self.layer(degree).basis[index])

    # -- elements

    def element(self, vec: Optional[Mapping] = None) -> ModelElement:
        return ModelElement(self, vec)

    def zero(self) -> ModelElement:
        return ModelElement(self)

    def e(self, i: int) -> ModelElement:
        return ModelElement(self, {("+", _unit(self.n, i), 0): 1})

    def f(self, i: int) -> ModelElement:
        return ModelElement(self, {("-", _unit(self.n, i), 0): -1})

    def h(self, i: int) -> ModelElement:
        return ModelElement(self, {("0", i): 1})

    def omega(self, x: ModelElement) -> ModelElement:
        """Chevalley involution."""
        flip = {"+": "-", "-": "+"}
        out = {}
        for k, c in x.vec.items():
            if k[0] == "0":
                out[k] = -c
            else:
                out[(flip[k[0]],) + k[1:]] = c
        return ModelElement(self, out)

    # -- brackets

    def _tree(self, degree: Degree, index: int) -> tuple[dict, dict]:
        got = self._trees.get((degree, index))
        if got is None:
            w = self.layer(degree).basis[index]
            u, v = _standard_factor(w)
            du, dv = _degree_of(u, self.n), _degree_of(v, self.n)
            got = (self.express(du, lyndon_poly(u)), self.express(dv, lyndon_poly(v)))
            self._trees[(degree, index)] = got
        return got

    def _bilinear(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        for k1, c1 in x.items():
            for k2, c2 in y.items():
                add_scaled(out, self._bracket_keys(k1, k2), c1 * c2)
        return out

    def _bracket_keys(self, k1: Key, k2: Key) -> dict:
        memo = self._memo.get((k1, k2))
        if memo is not None:
            return memo
        out = self._compute_keys(k1, k2)
        self._memo[(k1, k2)] = out
        return out

    def _compute_keys(self, k1: Key, k2: Key) -> dict:
        s1, s2 = k1[0], k2[0]
        if s1 == "0" and s2 == "0":
            return {}
        if s1 == "0":
            w = self.A.weight(k1[1], k2[1])
            return {k2: Fraction(w if s2 == "+" else -w)} if w else {}
        if s2 == "0":
            return scale(self._bracket_keys(k2, k1), -1)
        if s1 == "+" and s2 == "+":
            deg = tuple(a + b for a, b in zip(k1[1], k2[1]))
            self._check_height(deg)
            p1 = self.representative(k1[1], k1[2])
            p2 = self.representative(k2[1], k2[2])
            return self.express(deg, _commutator(p1, p2))
        if s1 == "-" and s2 == "-":
            pos = self._bracket_keys(("+",) + k1[1:], ("+",) + k2[1:])
            return {("-",) + k[1:]: c for k, c in pos.items()}
        if s1 == "-":
            return scale(self._bracket_keys(k2, k1), -1)
        return self._mixed(k1, k2)

    def _mixed(self, x: Key, y: Key) -> dict:
        """[x, omega(b)] for positive basis keys x and b = y with sign flipped."""
        ydeg, yidx = y[1], y[2]
        if _height(ydeg) == 1:
            j = ydeg.index(1)
            return self._f_action(j, x)
        u, v = self._tree(ydeg, yidx)
        wu = {("-",) + k[1:]: c for k, c in u.items()}
        wv = {("-",) + k[1:]: c for k, c in v.items()}
        xv = {x: Fraction(1)}
        first = self._bilinear(self._bilinear(xv, wu), wv)
        add_scaled(first, self._bilinear(wu, self._bilinear(xv, wv)), 1)
        return first

    def _f_action(self, j: int, x: Key) -> dict:
        """[f_j, x] for a positive basis key x."""
        deg = x[1]
        if _height(deg) == 1:
            return {("0", j): Fraction(-1)} if deg[j] == 1 else {}
        u, v = self._tree(deg, x[2])
        fj = {("-", _unit(self.n, j), 0): Fraction(-1)}
        out = self._bilinear(self._bilinear(fj, u), v)
        add_scaled(out, self._bilinear(u, self._bilinear(fj, v)), 1)
        return out

    def bracket(self, x: ModelElement, y: ModelElement) -> ModelElement:
        return ModelElement(self, self._bilinear(x.vec, y.vec))

    def ad_power(self, x: ModelElement, y: ModelElement, power: int) -> ModelElement:
        for _ in range(power):
            y = self.bracket(x, y)
            if y.is_zero():
                break
        return y

    def basis_keys(self, max_height: Optional[int] = None) -> list[Key]:
        """Basis of the truncated algebra: negative, Cartan, positive keys."""
        top = self.max_height if max_height is None else max_height
        pos = [("+", d, k) for d in multidegrees(self.n, top) for k in range(self.mult(d))]
        return [("-",) + k[1:] for k in pos] + [("0", i) for i in range(self.n)] + pos

    def jacobi_failures(self, max_height: int = 4, limit: int = 5) -> list[tuple[Key, Key, Key]]:
        """Exhaustive Jacobi check on basis triples whose total positive and negative height fit."""
        keys = self.basis_keys(max_height)

        def height(k: Key) -> int:
            return 0 if k[0] == "0" else _height(k[1])

        bad = []
        for a, b, c in combinations(keys, 3):
            if height(a) + height(b) + height(c) > max_height:
                continue
            x, y, z = ({a: 1}, {b: 1}, {c: 1})
            try:
                total = self._bilinear(self._bilinear(x, y), z)
                add_scaled(total, self._bilinear(self._bilinear(y, z), x), 1)
                add_scaled(total, self._bilinear(self._bilinear(z, x), y), 1)
            except HeightExceeded:
                continue
            if total:
                bad.append((a, b, c))
                if len(bad) >= limit:
                    break
        return bad


def build_graded(A: CartanMatrix, max_height: int) -> GradedModel:
    """Graded model with every layer up to ``max_height`` constructed."""
    model = GradedModel(A, max_height)
    for d in multidegrees(A.n, max_height):
        model.layer(d)
    return model


# ------------------------------------------------------------ Gabber-Kac radical


class _GabberKac:
    """Free Lie algebra on the f's with raising operators from the tilde relations."""

    def __init__(self, A: CartanMatrix):
        self.A = A
        self.n = A.n
        self._raise: dict[tuple[int, Word], tuple[str, object]] = {}
        self._span: dict[Degree, Echelon] = {}
        self._functional: dict[Degree, tuple[dict, int]] = {}

    def _span_of(self, degree: Degree) -> Echelon:
        ech = self._span.get(degree)
        if ech is None:
            ech = Echelon()
            for w in lyndon_words(degree):
                ech.add(lyndon_poly(w), w)
            self._span[degree] = ech
        return ech

    def _apply_h(self, hvec: Mapping[int, Fraction], poly: Poly, degree: Degree) -> Poly:
        """[h, x] for x of negative degree -degree."""
        c = -sum(hvec.get(i, 0) * self.A.weight(i, degree) for i in range(self.n))
        return scale(poly, c)

    def raise_word(self, i: int, w: Word) -> tuple[str, object]:
        """[e_i, L(w)] as ("h", vector) at height one, else ("poly", tensor vector)."""
        key = (i, w)
        got = self._raise.get(key)
        if got is not None:
            return got
        if len(w) == 1:
            got = ("h", {i: Fraction(1)} if w[0] == i else {})
        else:
            u, v = _standard_factor(w)
            pu, pv = lyndon_poly(u), lyndon_poly(v)
            du, dv = _degree_of(u, self.n), _degree_of(v, self.n)
            out: Poly = {}
            kind, val = self.raise_word(i, u)
            if kind == "h":
                add_scaled(out, self._apply_h(val, pv, dv), 1)
            else:
                add_scaled(out, _commutator(val, pv), 1)
            kind, val = self.raise_word(i, v)
            if kind == "h":
                add_scaled(out, self._apply_h(val, pu, du), -1)
            else:
                add_scaled(out, _commutator(pu, val), 1)
            got = ("poly", out)
        self._raise[key] = got
        return got

    def functional(self, degree: Degree) -> tuple[dict, int]:
        """Compressed joint raising map on the Lyndon basis, and its rank."""
        got = self._functional.get(degree)
        if got is not None:
            return got
        words = lyndon_words(degree)
        rows: dict[Word, dict] = {}
        for w in words:
            row: dict = {}
            for i in range(self.n):
                if degree[i] == 0:
                    continue
                kind, val = self.raise_word(i, w)
                if kind == "h":
                    for k, c in val.items():
                        row[(i, "h", k)] = c
                    continue
                lower = _minus(degree, i)
                for col, c in self.evaluate(lower, val).items():
                    row[(i, col)] = c
            rows[w] = row
        # keep a spanning subset of columns; the kernel is unchanged
        columns: dict = {}
        for w, row in rows.items():
            for col, c in row.items():
                columns.setdefault(col, {})[w] = c
        keep = Echelon()
        kept = []
        for col in sorted(columns, key=repr):
            if keep.add(columns[col]):
                kept.append(col)
        index = {col: k for k, col in enumerate(kept)}
        table = {w: {index[c]: v for c, v in row.items() if c in index} for w, row in rows.items()}
        got = (table, len(kept))
        self._functional[degree] = got
        return got

    def evaluate(self, degree: Degree, poly: Poly) -> dict:
        combo = self._span_of(degree).express(poly)
        if combo is None:
            raise ValueError("raising left the free Lie algebra")
        table, _ = self.functional(degree)
        out: dict = {}
        for w, c in combo.items():
            add_scaled(out, table[w], c)
        return out

    def mult(self, degree: Degree) -> int:
        return self.functional(degree)[1]


def gabber_kac_mult(A: CartanMatrix, degree: Sequence[int], max_height: int = MAX_HEIGHT) -> int:
    degree = tuple(degree)
    _guard(A, max(_height(degree), 1))
    if _height(degree) > max_height:
        raise ResourceLimit(f"degree {degree} is above height {max_height}")
    return _GabberKac(A).mult(degree)


def gabber_kac_table(A: CartanMatrix, max_height: int) -> dict[Degree, int]:
    _guard(A, max_height)
    oracle = _GabberKac(A)
    return {d: oracle.mult(d) for d in multidegrees(A.n, max_height)}


# ------------------------------------------------------------------- phi maps


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


class PhiMap:
    """Images of interval generators in the model of an interval set.

    A generator of a member maps to the matching Chevalley generator.  Other
    intervals are reached by joining members one at a time; each join must be a
    Serre-set pair, read in either order.
    """

    def __init__(self, members: Sequence[Interval], model: GradedModel):
        if len(members) != model.n:
            raise PhiError("model rank differs from the size of the set")
        self.members = tuple(members)
        self.model = model
        self.index = {J: k for k, J in enumerate(self.members)}
        self._cache: dict = {}

    def decompose(self, J: Interval) -> Optional[tuple[int, ...]]:
        """Member indices whose disjoint union is J, or None."""
        if J in self.index:
            return (self.index[J],)
        inside = [k for k, M in enumerate(self.members) if is_subinterval(M, J) and M != J]

        def rec(cur: Optional[Interval], used: tuple[int, ...]) -> Optional[tuple[int, ...]]:
            if cur == J:
                return used
            for k in inside:
                if k in used:
                    continue
                M = self.members[k]
                nxt = M if cur is None else compose(cur, M)
                if nxt is None:
                    continue
                found = rec(nxt, used + (k,))
                if found is not None:
                    return found
            return None

        return rec(None, ())

    def join_orders(self, J: Interval) -> list[tuple[int, ...]]:
        """Every member order whose successive joins are Serre-set pairs."""
        parts = self.decompose(J)
        if parts is None:
            return []
        if len(parts) == 1:
            return [parts]
        orders = []

        def rec(cur: Interval, used: tuple[int, ...]) -> None:
            if len(used) == len(parts):
                orders.append(used)
                return
            for k in parts:
                if k in used:
                    continue
                M = self.members[k]
                nxt = compose(cur, M)
                if nxt is None:
                    continue
                if cd.serre_member(cur, M) or cd.serre_member(M, cur):
                    rec(nxt, used + (k,))

        for k in parts:
            rec(self.members[k], (k,))
        return orders

    def _join(self, sign: int, order: Sequence[int]) -> ModelElement:
        m = self.model
        gen = m.e if sign > 0 else m.f
        cur = self.members[order[0]]
        img = gen(order[0])
        for k in order[1:]:
            M = self.members[k]
            if cd.serre_member(cur, M):
                left, right, limg, rimg = cur, M, img, gen(k)
            elif cd.serre_member(M, cur):
                left, right, limg, rimg = M, cur, gen(k), img
            else:
                raise PhiError(f"join of {format_interval(cur)} and {format_interval(M)} is not a Serre-set pair")
            exponent = cd.pairing(right, left) if sign > 0 else cd.pairing(left, right)
            img = m.bracket(limg, rimg).scale(_sign(exponent))
            cur = compose(cur, M)
        return img

    def generator(self, sign: int, J: Interval, order: Optional[Sequence[int]] = None) -> ModelElement:
        """Image of e(J) (sign +1) or f(J) (sign -1)."""
        if order is None:
            key = (sign, J)
            if key in self._cache:
                return self._cache[key]
            orders = self.join_orders(J)
            if not orders:
                if self.decompose(J) is None:
                    raise PhiError(f"{format_interval(J)} is not a union of set members")
                raise PhiError(f"{format_interval(J)} is only reachable as a bracket outside the Serre set")
            img = self._join(sign, orders[0])
            self._cache[key] = img
            return img
        return self._join(sign, order)

    def positive(self, J: Interval, order=None) -> ModelElement:
        return self.generator(1, J, order)

    def negative(self, J: Interval, order=None) -> ModelElement:
        return self.generator(-1, J, order)

    def cartan(self, J: Interval) -> ModelElement:
        parts = self.decompose(J)
        if parts is None:
            raise PhiError(f"{format_interval(J)} is not a union of set members")
        out = self.model.zero()
        for k in parts:
            out = out + self.model.h(k)
        return out

    def image(self, x) -> ModelElement:
        """Image of a lie-engine element; every term must be reachable."""
        out = self.model.zero()
        for run_coef, run in x.cartan.terms():
            J = Interval(x.graph, [run])
            out = out + self.cartan(J).scale(run_coef)
        for (s, J), c in x.terms.items():
            out = out + self.generator(s, J).scale(c)
        return out


def phi_map(members: Sequence[Interval], J: Interval, model: GradedModel, sign: int = 1) -> ModelElement:
    return PhiMap(members, model).generator(sign, J)


# -------------------------------------------------------------- verification


def _reachable_intervals(members: Sequence[Interval], depth: int) -> list[Interval]:
    layer = set(members)
    seen = set(members)
    for _ in range(depth - 1):
        nxt = set()
        for J in layer:
            for M in members:
                K = compose(J, M)
                if K is not None and K not in seen:
                    seen.add(K)
                    nxt.add(K)
        layer = nxt
    return sorted(seen)


def _nilpotency_chain(phi: PhiMap, J: Interval, K: Interval) -> Optional[tuple[int, ...]]:
    """A member chain for K meeting the local nilpotency hypotheses against J, if any.

    J must be real, outside the Serre set with K and not orthogonal to it; the
    chain must build K by Serre-set joins in the stated order, and every link
    must be orthogonal to J or form a Serre-set pair with it.
    """
    if J == K or not cd.is_real(J) or cd.serre_member(J, K) or cd.is_orthogonal(J, K):
        return None
    for order in phi.join_orders(K):
        links = [phi.members[k] for k in order]
        cur, ok = links[0], True
        for M in links[1:]:
            if not cd.serre_member(cur, M):
                ok = False
                break
            cur = compose(cur, M)
        if ok and all(cd.is_orthogonal(J, M) or cd.serre_member(J, M) for M in links):
            return order
    return None


def verify_presentation(members: Sequence[Interval], model: GradedModel, depth: int) -> AxiomReport:
    """Check the defining relations between images of intervals built from at most ``depth`` members."""
    from . import lie

    phi = PhiMap(members, model)
    pool = _reachable_intervals(members, depth)
    images = {}
    unreachable = []
    for J in pool:
        try:
            images[J] = (phi.positive(J), phi.negative(J), phi.cartan(J))
        except PhiError:
            unreachable.append(J)
    names = [
        "presentation-cartan",
        "presentation-weights",
        "presentation-mixed",
        "presentation-join",
        "presentation-engine",
        "presentation-nilpotent",
        "presentation-order",
    ]
    reports = {k: AxiomReport(k, f"{len(members)} members, depth {depth}") for k in names}

    def record(name: str, ok: bool, witness: tuple, detail: str = "") -> None:
        rep = reports[name]
        rep.checked += 1
        if not ok and rep.witness is None:
            rep.witness = tuple(format_interval(J) if isinstance(J, Interval) else str(J) for J in witness)
            rep.detail = detail

    def skip(name: str) -> None:
        reports[name].escaped += 1

    def img(sign: int, J: Optional[Interval]) -> Optional[ModelElement]:
        if J is None:
            return model.zero()
        got = images.get(J)
        if got is None:
            return None
        return got[0] if sign > 0 else got[1]

    for J in images:
        orders = phi.join_orders(J)
        first = images[J]
        for order in orders[1:]:
            record("presentation-order", phi.positive(J, order) == first[0] and phi.negative(J, order) == first[1], (J, order))

    for J, K in ((J, K) for J in images for K in images):
        eJ, fJ, hJ = images[J]
        eK, fK, hK = images[K]
        S = compose(J, K)
        if S is not None and S in images:
            record("presentation-cartan", images[S][2] == hJ + hK, (J, K))
        k = cd.kappa(J, K)
        record("presentation-weights", model.bracket(hJ, eK) == eK.scale(k) and model.bracket(hJ, fK) == fK.scale(-k), (J, K))
        x = cd.xi(J, K)
        want = hJ if J == K else model.zero()
        left, right = img(1, subtract(J, K)), img(-1, subtract(K, J))
        if x and (left is None or right is None):
            skip("presentation-mixed")
        else:
            if x:
                want = want + (left - right).scale(x)
            record("presentation-mixed", model.bracket(eJ, fK) == want, (J, K))
        for sign, a, b in ((1, eJ, eK), (-1, fJ, fK)):
            try:
                got = model.bracket(a, b)
            except HeightExceeded:
                skip("presentation-join")
                continue
            if J == K or cd.is_orthogonal(J, K):
                record("presentation-join", got.is_zero(), (J, K), "expected zero")
            elif cd.serre_member(J, K):
                exponent = cd.pairing(K, J) if sign > 0 else cd.pairing(J, K)
                target = img(sign, S)
                if target is None:
                    skip("presentation-join")
                else:
                    record("presentation-join", got == target.scale(_sign(exponent)), (J, K))
        for a_kind in "efh":
            for b_kind in "ef":
                x_el = getattr(lie, a_kind)(J)
                y_el = getattr(lie, b_kind)(K)
                try:
                    value = lie.bracket(x_el, y_el)
                    mapped = phi.image(value)
                    ref = model.bracket(phi.image(x_el), phi.image(y_el))
                except (lie.Unresolvable, PhiError, HeightExceeded):
                    skip("presentation-engine")
                    continue
                record("presentation-engine", mapped == ref, (f"{a_kind}({format_interval(J)})", f"{b_kind}({format_interval(K)})"))
        chain = _nilpotency_chain(phi, J, K)
        if chain is not None:
            for a, b in ((eJ, eK), (fJ, fK)):
                try:
                    val = model.ad_power(a, b, len(chain) + 1)
                except HeightExceeded:
                    skip("presentation-nilpotent")
                    continue
                record("presentation-nilpotent", val.is_zero(), (J, K), f"ad power {len(chain) + 1} is nonzero")
    top = AxiomReport("presentation", f"{len(members)} members, depth {depth}", parts=[reports[k] for k in names])
    top.detail = f"{len(images)} reachable intervals, {len(unreachable)} unreachable"
    return top


# ------------------------------------------------------------------- embeddings


@dataclass
class Embedding:
    """Homomorphism between the models of two interval sets, given on generators."""

    source: GradedModel
    target: GradedModel
    images: dict  # (kind, index) -> ModelElement, kind in "efh"
    kind: str
    _memo: dict = field(default_factory=dict)

    def _key_image(self, k: Key) -> ModelElement:
        got = self._memo.get(k)
        if got is not None:
            return got
        if k[0] == "0":
            got = self.images[("h", k[1])]
        elif _height(k[1]) == 1:
            i = k[1].index(1)
            got = self.images[("e", i)] if k[0] == "+" else -self.images[("f", i)]
        else:
            u, v = self.source._tree(k[1], k[2])
            if k[0] == "-":
                u = {("-",) + q[1:]: c for q, c in u.items()}
                v = {("-",) + q[1:]: c for q, c in v.items()}
            got = self.target.bracket(self.apply(self.source.element(u)), self.apply(self.source.element(v)))
        self._memo[k] = got
        return got

    def apply(self, x: ModelElement) -> ModelElement:
        out = self.target.zero()
        for k, c in x.vec.items():
            out = out + self._key_image(k).scale(c)
        return out

    def generator_images(self) -> dict:
        return dict(self.images)

    def verify(self) -> list[str]:
        """Failed relations among generator images; empty means a verified homomorphism."""
        src, tgt = self.source, self.target
        A = src.A
        bad = []
        E = lambda i: self.images[("e", i)]
        F = lambda i: self.images[("f", i)]
        H = lambda i: self.images[("h", i)]
        for i in range(A.n):
            for j in range(A.n):
                checks = [
                    (f"[h{i + 1},h{j + 1}]", tgt.bracket(H(i), H(j)), tgt.zero()),
                    (f"[e{i + 1},f{j + 1}]", tgt.bracket(E(i), F(j)), H(i) if i == j else tgt.zero()),
                    (f"[h{i + 1},e{j + 1}]", tgt.bracket(H(i), E(j)), E(j).scale(A[i, j])),
                    (f"[h{i + 1},f{j + 1}]", tgt.bracket(H(i), F(j)), F(j).scale(-A[i, j])),
                ]
                if i != j and (A[i, i] == 2 or A[i, j] == 0):
                    power = 1 - A[i, j] if A[i, i] == 2 else 1
                    try:
                        checks.append((f"serre e{i + 1},e{j + 1}", tgt.ad_power(E(i), E(j), power), tgt.zero()))
                        checks.append((f"serre f{i + 1},f{j + 1}", tgt.ad_power(F(i), F(j), power), tgt.zero()))
                    except HeightExceeded:
                        bad.append(f"serre {i + 1},{j + 1}: target height too small")
                for name, got, want in checks:
                    if got != want:
                        bad.append(name)
        return bad


def embed(
    source_members: Sequence[Interval],
    target_members: Sequence[Interval],
    source_model: GradedModel,
    target_model: GradedModel,
) -> Embedding:
    """Subset inclusion or the refinement splitting one member into two adjacent pieces."""
    tgt_index = {J: k for k, J in enumerate(target_members)}
    T = target_model
    images: dict = {}
    if all(J in tgt_index for J in source_members):
        for i, J in enumerate(source_members):
            k = tgt_index[J]
            images[("e", i)], images[("f", i)], images[("h", i)] = T.e(k), T.f(k), T.h(k)
        return Embedding(source_model, target_model, images, "subset")
    missing = [J for J in source_members if J not in tgt_index]
    extra = [J for J in target_members if J not in set(source_members)]
    if len(missing) != 1 or len(extra) != 2:
        raise EmbedError("target is neither a superset nor a one-member split of the source")
    whole = missing[0]
    first, second = extra
    if compose(first, second) != whole:
        raise EmbedError(f"{format_interval(first)} and {format_interval(second)} do not join to {format_interval(whole)}")
    if not cd.serre_member(first, second):
        first, second = second, first
        if not cd.serre_member(first, second):
            raise EmbedError("the split pieces do not form a Serre-set pair")
    a, b = tgt_index[first], tgt_index[second]
    for i, J in enumerate(source_members):
        if J == whole:
            images[("e", i)] = T.bracket(T.e(a), T.e(b)).scale(_sign(cd.pairing(second, first)))
            images[("f", i)] = T.bracket(T.f(a), T.f(b)).scale(_sign(cd.pairing(first, second)))
            images[("h", i)] = T.h(a) + T.h(b)
        else:
            k = tgt_index[J]
            images[("e", i)], images[("f", i)], images[("h", i)] = T.e(k), T.f(k), T.h(k)
    return Embedding(source_model, target_model, images, "split")


# ------------------------------------------------------------------------- DOT


def dot_export(A: CartanMatrix, labels: Optional[Sequence[str]] = None) -> str:
    """Undirected Graphviz diagram: |a_ij| parallel edges and a loop at each zero diagonal entry."""
    labels = list(labels) if labels is not None else [f"α{i + 1}" for i in range(A.n)]
    if len(labels) != A.n:
        raise ValueError("one label per vertex is required")
    out = ["graph {"]
    for i, lab in enumerate(labels):
        text = lab.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'  a{i + 1} [label="{text}"];')
    for i in range(A.n):
        if A[i, i] == 0:
            out.append(f"  a{i + 1} -- a{i + 1};")
        for j in range(i + 1, A.n):
            for _ in range(abs(A[i, j])):
                out.append(f"  a{i + 1} -- a{j + 1};")
    out.append("}")
    return "\n".join(out) + "\n"
