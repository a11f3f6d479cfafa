import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tquiver import axioms, cartan
from tquiver.graphs import circle, circle_tail, line, wedge, y_graph
from tquiver.shape_graph import Interval, Run, enumerate_intervals, parse_interval

FAMILIES = {
    "positive": axioms.check_positive_semigroup,
    "cancellation": axioms.check_cancellation_lemma,
    "good": axioms.check_good_cartan,
}

LINE_SAMPLE = enumerate_intervals(line(), 1, window=(0, 5))
PASSING = {
    "line": LINE_SAMPLE,
    "circle2": enumerate_intervals(circle(2), 1),
    "wedge": enumerate_intervals(wedge(), 1),
    "y": enumerate_intervals(y_graph(), 1),
}


def strs(items):
    return [str(x) for x in items]


@pytest.mark.parametrize("graph", sorted(PASSING))
@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_family_holds_at_grid_one(graph, family):
    report = FAMILIES[family](PASSING[graph], description=graph)
    assert report.ok, report.render()
    assert all(line.startswith(f"AXIOM {family}") and " PASS " in line for line in report.machine_lines())


def test_three_arc_circle_breaks_case_split_identity():
    report = axioms.check_good_cartan(enumerate_intervals(circle(3), 1))
    bad = report.first_failure()
    assert bad.axiom == "good-datum-2"
    assert strs(bad.witness) == ["c1:0,1+c2:0,1", "c1:0,1+c3:0,1"]
    assert "kappa=-1" in bad.detail


@pytest.mark.parametrize(
    "family, clause",
    [("positive", "positive-5"), ("cancellation", "cancellation-I2"), ("good", "good-L2")],
)
def test_four_arc_circle_breaks_middle_differences(family, clause):
    report = FAMILIES[family](enumerate_intervals(circle(4), 1))
    bad = report.first_failure()
    assert bad.axiom == clause
    assert strs(bad.witness) == ["c1:0,1", "c2:0,1+c3:0,1+c4:0,1", "c3:0,1"]


def test_converse_of_strong_associativity_fails_on_line():
    g = line()
    found = axioms.strong_associativity_converse_failures(LINE_SAMPLE)
    witness = tuple(parse_interval(g, t) for t in ("a:0,1", "a:2,3", "a:1,2"))
    assert witness in found


def test_machine_lines_report_first_counterexample():
    report = axioms.check_good_cartan(enumerate_intervals(circle(3), 1))
    fails = [l for l in report.machine_lines() if " FAIL " in l]
    assert fails[0].startswith("AXIOM good-datum-2 FAIL c1:0,1+c2:0,1;c1:0,1+c3:0,1")


# ------------------------------------------------------------- fault injection


def _left_flipped_xi(a, b):
    v = cartan.xi(a, b)
    return -v if a != b and b.runs[0].a == a.runs[0].a else v


class LeftFlippedXi(axioms.IntervalOps):
    """Negates xi whenever the second argument is a left piece of the first."""

    def xi_plus(self, a, b):
        return _left_flipped_xi(a, b)

    def xi_minus(self, a, b):
        return _left_flipped_xi(b, a)


class GlobalFlippedXi(axioms.IntervalOps):
    def xi_plus(self, a, b):
        return -cartan.xi(a, b)

    def xi_minus(self, a, b):
        return -cartan.xi(b, a)


class OneSidedXi(axioms.IntervalOps):
    def xi_plus(self, a, b):
        return -cartan.xi(a, b)


class LopsidedKappa(axioms.IntervalOps):
    def kappa(self, a, b):
        return cartan.kappa(a, b) + (1 if a < b else 0)


class OrderedCompose(axioms.IntervalOps):
    def compose(self, a, b):
        return super().compose(a, b) if (a < b or a == b) else None


class MiddleCutSubtract(axioms.IntervalOps):
    """Removing a piece from the middle keeps the part to its left."""

    def subtract(self, a, b):
        out = super().subtract(a, b)
        if out is None and a.runs[0].a < b.runs[0].a and b.runs[-1].b < a.runs[-1].b:
            return Interval(a.graph, [Run(a.runs[0].arc, a.runs[0].a, b.runs[0].a)])
        return out


@pytest.mark.parametrize(
    "ops, family, clause",
    [
        (LeftFlippedXi, "good", "good-datum-3"),
        (OneSidedXi, "good", "good-xi-symmetry"),
        (LopsidedKappa, "good", "good-kappa-symmetry"),
        (OrderedCompose, "cancellation", "cancellation-I1"),
        (MiddleCutSubtract, "positive", "positive-5"),
        (MiddleCutSubtract, "cancellation", "cancellation-I1"),
    ],
)
def test_injected_fault_is_caught(ops, family, clause):
    report = FAMILIES[family](LINE_SAMPLE, ops=ops())
    assert report.first_failure().axiom == clause


def test_global_sign_flip_of_xi_is_invisible():
    # every clause is homogeneous in xi, so a uniform sign change is a symmetry
    for check in FAMILIES.values():
        assert check(LINE_SAMPLE, ops=GlobalFlippedXi()).ok


def test_replay_reproduces_failure_only_under_faulty_ops():
    report = axioms.check_good_cartan(LINE_SAMPLE, ops=LeftFlippedXi())
    assert axioms.replay(report, LINE_SAMPLE, LeftFlippedXi()) == report.first_failure().detail
    assert axioms.replay(report, LINE_SAMPLE) is None


# ------------------------------------------------------------- Serre conditions


def test_signed_partitions_of_circle_are_the_circle_alone():
    g = circle(1)
    sample = enumerate_intervals(g, "1/4")
    S = parse_interval(g, "c1:0,1")
    full, plus = axioms.partitions(S, sample, sign=1)
    _, minus = axioms.partitions(S, sample, sign=-1)
    assert plus == minus == [S]
    assert set(full) == set(sample)


@pytest.mark.parametrize(
    "graph, grid, alpha, beta",
    [(line(), 1, "a:0,1", "a:1,3"), (line(), 1, "a:0,2", "a:2,3"), (wedge(), "1/2", "t:0,1", "c:0,1")],
)
def test_serre_conditions_hold_for_member_pairs(graph, grid, alpha, beta):
    window = (0, 4) if graph.arcs[0].id == "a" else None
    sample = enumerate_intervals(graph, grid, window=window)
    report = axioms.check_serre_conditions(parse_interval(graph, alpha), parse_interval(graph, beta), sample)
    assert report.ok and report.detail == "pair in Serre set"


@pytest.mark.parametrize(
    "graph, grid", [(line(), 1), (circle(1), "1/4"), (circle(2), 1), (circle(3), "1/2")]
)
def test_serre_readings_agree_without_tails(graph, grid):
    window = (0, 4) if graph.arcs[0].id == "a" else None
    sample = enumerate_intervals(graph, grid, window=window)
    for a in sample:
        if cartan.is_real(a):
            for b in sample:
                assert axioms.serre_set_member(a, b, sample) == cartan.serre_member(a, b)


def test_serre_readings_differ_once_a_tail_hangs_off_the_circle():
    g = wedge()
    sample = enumerate_intervals(g, "1/2")
    differ = {
        (str(a), str(b))
        for a in sample
        for b in sample
        if cartan.is_real(a) and axioms.serre_set_member(a, b, sample) != cartan.serre_member(a, b)
    }
    lefts = ["c:0,1/2", "c:1/2,1", "c:1/2,1+t:0,1/2", "c:1/2,1+t:0,1"]
    rights = ["c:0,1+t:0,1/2", "c:0,1+t:0,1"]
    assert differ == {(x, y) for x in lefts for y in rights}
    for x, y in differ:
        a, b = parse_interval(g, x), parse_interval(g, y)
        assert axioms.serre_set_member(a, b, sample) and not cartan.serre_member(a, b)
    t = enumerate_intervals(circle_tail(), 1)
    assert any(
        axioms.serre_set_member(a, b, t) != cartan.serre_member(a, b) for a in t for b in t if cartan.is_real(a)
    )


# ------------------------------------------------------------------ properties


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(LINE_SAMPLE), min_size=1, max_size=8, unique=True))
def test_subsamples_of_line_pass_every_family(sub):
    for check in FAMILIES.values():
        assert check(sub).ok


@settings(max_examples=40, deadline=None)
@given(st.permutations(PASSING["y"]))
def test_report_independent_of_sample_order(perm):
    a = axioms.check_good_cartan(perm)
    b = axioms.check_good_cartan(PASSING["y"])
    assert a.machine_lines() == b.machine_lines()
