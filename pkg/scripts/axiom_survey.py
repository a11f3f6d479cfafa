"""Run every axiom family on a set of graphs and grids and print one line per family."""

import argparse
import time

from tquiver import axioms
from tquiver.graphs import circle, circle_tail, figure_eight, hexagon, line, wedge, wedge_incoming, y_graph
from tquiver.shape_graph import enumerate_intervals

GRAPHS = {
    "line": (line, (0, 5)),
    "circle2": (lambda: circle(2), None),
    "circle3": (lambda: circle(3), None),
    "circle4": (lambda: circle(4), None),
    "wedge": (wedge, None),
    "wedge_in": (wedge_incoming, None),
    "y": (y_graph, None),
    "figure8": (figure_eight, None),
    "circle_tail": (circle_tail, None),
    "hexagon": (hexagon, None),
}
FAMILIES = {
    "positive": axioms.check_positive_semigroup,
    "cancellation": axioms.check_cancellation_lemma,
    "good": axioms.check_good_cartan,
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grids", nargs="+", default=["1", "1/2"])
    p.add_argument("--graphs", nargs="+", default=sorted(GRAPHS))
    p.add_argument("--max-size", type=int, default=60, help="skip samples larger than this")
    args = p.parse_args()
    for name in args.graphs:
        build, window = GRAPHS[name]
        for grid in args.grids:
            sample = enumerate_intervals(build(), grid, window=window)
            if len(sample) > args.max_size:
                print(f"{name:12s} grid {grid:4s} skipped ({len(sample)} intervals)")
                continue
            for fam, check in FAMILIES.items():
                t0 = time.perf_counter()
                report = check(sample, description=name)
                bad = report.first_failure()
                verdict = "PASS" if bad is None else f"FAIL {bad.axiom}: {', '.join(map(str, bad.witness))}"
                print(f"{name:12s} grid {grid:4s} n={len(sample):3d} {fam:12s} {verdict}  ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
