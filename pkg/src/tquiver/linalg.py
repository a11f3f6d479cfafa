"""Exact sparse linear algebra over the rationals.

Vectors are dicts from sortable column keys to nonzero ``Fraction`` values.
The pivot of a row is its least column key, so echelon forms are unique for a
fixed insertion order.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

Vector = dict

__all__ = ["Echelon", "RationalMatrix", "add_scaled", "scale", "clean"]


def clean(vec: Mapping) -> dict:
    return {k: Fraction(v) for k, v in vec.items() if v != 0}


def add_scaled(target: dict, vec: Mapping, coef) -> None:
    """In place: target += coef * vec, dropping zeros."""
    if coef == 0:
        return
    for k, v in vec.items():
        nv = target.get(k, 0) + coef * v
        if nv == 0:
            target.pop(k, None)
        else:
            target[k] = nv


def scale(vec: Mapping, coef) -> dict:
    if coef == 0:
        return {}
    return {k: coef * v for k, v in vec.items()}


class Echelon:
    """Incremental row echelon basis with provenance labels.

    Each stored row remembers which inserted vectors (by label) it combines, so
    a reduction can report how a vector decomposes over the inserted ones.
    """

    def __init__(self):
        self.rows: dict[Hashable, tuple[dict, dict]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping, track: bool = False) -> tuple[dict, dict]:
        """Remainder of ``vec`` modulo the span, and the label combination removed."""
        vec = {k: v for k, v in vec.items() if v}
        combo: dict = {}
        heap = [k for k in vec if k in self.rows]
        heapq.heapify(heap)
        done = None
        while heap:
            col = heapq.heappop(heap)
            if col == done:
                continue
            done = col
            coef = vec.get(col, 0)
            if not coef:
                continue
            row, labels = self.rows[col]
            for k, v in row.items():
                nv = vec.get(k, 0) - coef * v
                if nv:
                    if k not in vec and k in self.rows:
                        heapq.heappush(heap, k)
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            if track:
                add_scaled(combo, labels, coef)
        return vec, combo

    def add(self, vec: Mapping, label: Optional[Hashable] = None) -> bool:
        """Insert a vector; returns True when it enlarges the span."""
        rem, combo = self.reduce(vec, track=label is not None)
        if not rem:
            return False
        pivot = min(rem)
        inv = 1 / Fraction(rem[pivot])
        row = scale(rem, inv)
        labels: dict = {}
        if label is not None:
            labels = scale(combo, -inv)
            add_scaled(labels, {label: 1}, inv)
        self.rows[pivot] = (row, labels)
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]

    def express(self, vec: Mapping) -> Optional[dict]:
        """Coefficients over inserted labels reproducing ``vec``, or None if outside the span."""
        rem, combo = self.reduce(vec, track=True)
        return None if rem else combo


class RationalMatrix:
    """Dense-indexed matrix stored as sparse rows of exact rationals."""

    def __init__(self, rows: Sequence[Mapping[int, Fraction]] | Sequence[Sequence], ncols: Optional[int] = None):
        parsed: list[dict[int, Fraction]] = []
        width = 0
        for r in rows:
            if isinstance(r, Mapping):
                d = clean(r)
                width = max(width, max(d, default=-1) + 1)
            else:
                d = clean(dict(enumerate(r)))
                width = max(width, len(r))
            parsed.append(d)
        self.rows = parsed
        self.ncols = width if ncols is None else ncols
        if any(k < 0 or k >= self.ncols for r in parsed for k in r):
            raise ValueError("column index out of range")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def to_lists(self) -> list[list[Fraction]]:
        return [[r.get(j, Fraction(0)) for j in range(self.ncols)] for r in self.rows]

    def rref(self) -> tuple["RationalMatrix", list[int]]:
        """Reduced row echelon form and pivot columns.

        Pivot rule: scan columns left to right and take the least remaining row
        with a nonzero entry.
        """
        rows = [dict(r) for r in self.rows]
        pivots: list[int] = []
        top = 0
        for col in range(self.ncols):
            pick = next((i for i in range(top, len(rows)) if rows[i].get(col)), None)
            if pick is None:
                continue
            rows[top], rows[pick] = rows[pick], rows[top]
            pr = scale(rows[top], 1 / rows[top][col])
            rows[top] = pr
            for i in range(len(rows)):
                if i != top and rows[i].get(col):
                    add_scaled(rows[i], pr, -rows[i][col])
            pivots.append(col)
            top += 1
        return RationalMatrix(rows, self.ncols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[dict[int, Fraction]]:
        reduced, pivots = self.rref()
        free = [j for j in range(self.ncols) if j not in set(pivots)]
        basis = []
        for f in free:
            vec = {f: Fraction(1)}
            for i, p in enumerate(pivots):
                v = reduced.rows[i].get(f)
                if v:
                    vec[p] = -v
            basis.append(vec)
        return basis

    def apply(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        out = {}
        for i, r in enumerate(self.rows):
            s = sum((c * vec.get(j, 0) for j, c in r.items()), Fraction(0))
            if s:
                out[i] = s
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows
