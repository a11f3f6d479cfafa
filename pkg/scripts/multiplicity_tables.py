"""Print root multiplicities from both oracles for the Cartan matrices of interval sets."""

import argparse

from tquiver import bkm
from tquiver.graphs import circle, circle_tail, hexagon, line, wedge, y_graph
from tquiver.shape_graph import parse_interval

SETS = {
    "path": (line, ["a:0,1", "a:1,2", "a:2,3"]),
    "y": (y_graph, ["r1:0,1", "r0:0,1", "r2:0,1"]),
    "wedge": (wedge, ["t:0,1", "c:0,1"]),
    "semicircles": (lambda: circle(2), ["c1:0,1", "c2:0,1"]),
    "circle3": (lambda: circle(3), ["c1:0,1", "c2:0,1", "c3:0,1"]),
    "circle_tail": (circle_tail, ["t:0,1", "c1:0,1", "c1:0,1+c2:0,1"]),
    "hexagon": (hexagon, [f"j{k}:0,1" for k in range(1, 7)]),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--height", type=int, default=5)
    p.add_argument("--sets", nargs="+", default=list(SETS))
    args = p.parse_args()
    for name in args.sets:
        build, texts = SETS[name]
        g = build()
        A = bkm.cartan_matrix([parse_interval(g, t) for t in texts])
        height = args.height
        serre = bkm.build_graded(A, height).multiplicities()
        gk = bkm.gabber_kac_table(A, height)
        print(f"== {name}: A = {A.to_lists()}, height {height}")
        for d in sorted(serre, key=lambda d: (sum(d), d)):
            if serre[d] or gk[d]:
                mark = "" if serre[d] == gk[d] else "  <-- differ"
                print(f"   {d}  {serre[d]}  {gk[d]}{mark}")
        print("   concordant" if serre == gk else "   DISCORDANT")


if __name__ == "__main__":
    main()
