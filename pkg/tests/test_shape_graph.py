from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tquiver.graphs import circle, line, wedge, y_graph
from tquiver.shape_graph import (
    GraphParseError,
    Interval,
    InvalidInterval,
    classify,
    compose,
    enumerate_intervals,
    format_graph,
    format_interval,
    parse_graph,
    parse_interval,
    subtract,
)

LINE = line()
C2 = circle(2)


def iv(graph, text):
    return parse_interval(graph, text)


# ------------------------------------------------------------------- parsing


def test_parse_line_is_one_open_arc():
    g = parse_graph("arc a - - len inf")
    assert [a.id for a in g.arcs] == ["a"] and not g.nodes


def test_parse_loop_is_circle_through_node():
    g = parse_graph("node v\narc c v v len 1\n")
    assert classify(iv(g, "c:0,1")) == "circle"


def test_parse_incoming_tail_wedge():
    g = parse_graph("node v\narc c v v len 1\narc t - v len 1\n")
    assert set(g.incoming("v")) == {"c", "t"} and g.outgoing("v") == ("c",)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("node v\nnode v\narc c v v len 1", "duplicate node"),
        ("node v\narc c v v len 1\narc c v v len 1", "duplicate arc"),
        ("node v\narc c v v len inf", "infinite length"),
        ("arc c v - len 1", "undeclared node"),
        ("node v\nnode w\narc c v v len 1", "not the endpoint"),
        ("edge c v v", "unknown statement"),
        ("node v\narc c v v len -1", "positive"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(GraphParseError) as err:
        parse_graph(text)
    assert fragment in str(err.value)


def test_parse_error_carries_line_number():
    with pytest.raises(GraphParseError) as err:
        parse_graph("node v\n# comment\nbogus\n")
    assert "3" in str(err.value)


def test_format_graph_round_trips():
    g = wedge()
    assert parse_graph(format_graph(g)) == g


# ------------------------------------------------------------------ intervals


def test_interval_rejects_two_runs_closing_at_one_node():
    g = parse_graph("node v\narc x - v len 1\narc y - v len 1\narc z v - len 1")
    with pytest.raises(InvalidInterval):
        Interval(g, [("x", 0, 1), ("y", 0, 1)])


def test_interval_rejects_disconnected_runs():
    with pytest.raises(InvalidInterval):
        iv(LINE, "a:0,1+a:2,3")


def test_adjacent_runs_merge_to_canonical_form():
    assert iv(LINE, "a:0,1+a:1,2") == iv(LINE, "a:0,2")


def test_circle_rotations_normalize_identically():
    assert iv(C2, "c1:0,1+c2:0,1") == iv(C2, "c2:0,1+c1:0,1")


def test_format_interval_round_trips():
    J = iv(wedge(), "c:1/2,1+t:0,1")
    assert iv(wedge(), format_interval(J)) == J


# ---------------------------------------------------------------- compose etc


def test_compose_adjacent_line_intervals():
    assert compose(iv(LINE, "a:0,1"), iv(LINE, "a:1,2")) == iv(LINE, "a:0,2")


def test_compose_disconnected_is_undefined():
    assert compose(iv(LINE, "a:0,1"), iv(LINE, "a:2,3")) is None


def test_compose_two_arcs_close_the_circle():
    S = compose(iv(C2, "c1:0,1"), iv(C2, "c2:0,1"))
    assert S is not None and classify(S) == "circle"


def test_subtract_examples():
    assert subtract(iv(LINE, "a:0,3"), iv(LINE, "a:0,1")) == iv(LINE, "a:1,3")
    assert subtract(iv(LINE, "a:0,3"), iv(LINE, "a:1,2")) is None
    assert subtract(iv(C2, "c1:0,1+c2:0,1"), iv(C2, "c1:0,1")) == iv(C2, "c2:0,1")


def test_classify_examples():
    assert classify(iv(LINE, "a:0,2")) == "contractible"
    assert classify(iv(C2, "c1:0,1+c2:0,1")) == "circle"
    assert classify(iv(wedge(), "c:0,1+t:0,1")) == "circle_with_trees"


# ---------------------------------------------------------------- enumeration


def test_enumerate_line_window():
    got = enumerate_intervals(LINE, 1, window=(0, 3))
    want = {iv(LINE, t) for t in ["a:0,1", "a:1,2", "a:2,3", "a:0,2", "a:1,3", "a:0,3"]}
    assert set(got) == want and len(got) == 6


def test_enumerate_circle2_max_runs_two():
    got = enumerate_intervals(C2, 1, max_runs=2)
    assert set(got) == {iv(C2, "c1:0,1"), iv(C2, "c2:0,1"), iv(C2, "c1:0,1+c2:0,1")}


def test_enumerate_y_contains_branching_interval():
    Y = y_graph()
    assert iv(Y, "r0:0,1+r1:0,1+r2:0,1") in enumerate_intervals(Y, 1)


def test_enumerate_is_deterministic():
    assert enumerate_intervals(circle(3), "1/2") == enumerate_intervals(circle(3), "1/2")


def test_grid_must_divide_lengths():
    with pytest.raises(ValueError):
        enumerate_intervals(circle(2), "2/3")


# -------------------------------------------------------------- properties

SAMPLES = {
    "line": enumerate_intervals(LINE, 1, window=(0, 5)),
    "circle3": enumerate_intervals(circle(3), 1),
    "wedge": enumerate_intervals(wedge(), "1/2"),
    "y": enumerate_intervals(y_graph(), "1/2"),
}
SAMPLES_SET = {s[0].graph: s for s in SAMPLES.values()}


def _pick(name):
    sample = SAMPLES[name]
    return st.tuples(*(st.sampled_from(sample) for _ in range(3)))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(sorted(SAMPLES)).flatmap(_pick))
def test_sum_commutative_and_associative(triple):
    a, b, c = triple
    assert compose(a, b) == compose(b, a)
    ab, bc = compose(a, b), compose(b, c)
    if ab is not None and bc is not None:
        left, right = compose(ab, c), compose(a, bc)
        if left is not None and right is not None:
            assert left == right


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(sorted(SAMPLES)).flatmap(_pick))
def test_maximal_cancellation(triple):
    j, k, _ = triple
    for K in SAMPLES_SET.get(j.graph, ()):
        assert (compose(K, k) == j) == (subtract(j, k) == K)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(sorted(SAMPLES)).flatmap(lambda n: st.sampled_from(SAMPLES[n])))
def test_parse_format_idempotent(J):
    again = parse_interval(J.graph, format_interval(J))
    assert again == J and format_interval(again) == format_interval(J)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=2, max_size=6, unique=True))
def test_equal_point_sets_normalize_identically(cuts):
    cuts = sorted(cuts)
    pieces = [("a", Fraction(x), Fraction(y)) for x, y in zip(cuts, cuts[1:])]
    assert Interval(LINE, pieces) == Interval(LINE, [("a", Fraction(cuts[0]), Fraction(cuts[-1]))])
