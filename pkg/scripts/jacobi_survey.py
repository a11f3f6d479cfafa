"""Count Jacobi defects of the interval engine on random generator triples."""

import argparse
import random

from tquiver import lie
from tquiver.graphs import circle, circle_tail, figure_eight, hexagon, line, wedge, wedge_incoming, y_graph
from tquiver.shape_graph import enumerate_intervals

GRAPHS = {
    "line": (line, (0, 6)),
    "circle3": (lambda: circle(3), None),
    "wedge": (wedge, None),
    "wedge_in": (wedge_incoming, None),
    "y": (y_graph, None),
    "figure8": (figure_eight, None),
    "circle_tail": (circle_tail, None),
    "hexagon": (hexagon, None),
}


def survey(sample, triples, rng):
    makers = (lie.e, lie.f, lie.h)
    resolved = defects = 0
    first = None
    for _ in range(triples):
        xs = [rng.choice(makers)(rng.choice(sample)) for _ in range(3)]
        try:
            d = lie.jacobi_defect(*xs)
        except lie.Unresolvable:
            continue
        resolved += 1
        if not d.is_zero():
            defects += 1
            first = first or (xs, d)
    return resolved, defects, first


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grids", nargs="+", default=["1", "1/2"])
    p.add_argument("--triples", type=int, default=3000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for name, (build, window) in GRAPHS.items():
        for grid in args.grids:
            sample = enumerate_intervals(build(), grid, window=window)
            resolved, defects, first = survey(sample, args.triples, random.Random(args.seed))
            line_ = f"{name:12s} grid {grid:4s} resolved {resolved:5d} defects {defects:5d}"
            if first:
                xs, d = first
                line_ += f"  e.g. {', '.join(map(repr, xs))} -> {lie.format_element(d, sep=' + ')}"
            print(line_)


if __name__ == "__main__":
    main()
