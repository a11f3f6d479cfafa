from fractions import Fraction
from itertools import combinations, permutations

from hypothesis import given, settings
from hypothesis import strategies as st

from tquiver.linalg import Echelon, RationalMatrix


def leibniz_det(m):
    n = len(m)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inversions % 2 else 1)
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


def minor_rank(m):
    """Largest k with a nonvanishing k x k minor."""
    rows, cols = len(m), len(m[0]) if m else 0
    for k in range(min(rows, cols), 0, -1):
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                if leibniz_det([[m[r][c] for c in cs] for r in rs]):
                    return k
    return 0


small_entries = st.integers(-2, 2).map(Fraction)
matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(small_entries, min_size=c, max_size=c), min_size=r, max_size=r))
)


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_rank_matches_minor_oracle(m):
    assert RationalMatrix(m).rank() == minor_rank(m)


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_nullspace_is_annihilated_and_complements_rank(m):
    M = RationalMatrix(m)
    null = M.nullspace()
    assert M.rank() + len(null) == M.ncols
    for v in null:
        assert M.apply(v) == {}


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_rref_idempotent_and_deterministic(m):
    reduced, pivots = RationalMatrix(m).rref()
    again, pivots2 = reduced.rref()
    assert again == reduced and pivots2 == pivots
    assert RationalMatrix(m).rref() == (reduced, pivots)


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_echelon_rank_agrees_with_rref(m):
    ech = Echelon()
    for i, row in enumerate(m):
        ech.add(dict(enumerate(row)), label=i)
    assert ech.rank == minor_rank(m)


@settings(max_examples=300, deadline=None)
@given(matrices, st.lists(small_entries, min_size=4, max_size=4))
def test_echelon_express_reconstructs_combinations(m, coefs):
    ech = Echelon()
    for i, row in enumerate(m):
        ech.add(dict(enumerate(row)), label=i)
    target = {}
    for c, row in zip(coefs, m):
        for j, v in enumerate(row):
            target[j] = target.get(j, 0) + c * v
    target = {k: v for k, v in target.items() if v}
    combo = ech.express(target)
    assert combo is not None
    rebuilt = {}
    for label, c in combo.items():
        for j, v in enumerate(m[label]):
            rebuilt[j] = rebuilt.get(j, 0) + c * v
    assert {k: v for k, v in rebuilt.items() if v} == target


def test_echelon_rejects_vector_outside_span():
    ech = Echelon()
    ech.add({0: 1, 1: 1}, label="a")
    assert ech.express({0: 1}) is None
    assert not ech.contains({1: 1})
    assert ech.contains({0: 3, 1: 3})


def test_out_of_range_column_is_rejected():
    try:
        RationalMatrix([{5: 1}], ncols=3)
    except ValueError:
        return
    raise AssertionError("expected ValueError")
