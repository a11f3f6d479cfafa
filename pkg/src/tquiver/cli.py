"""Command-line entry point: ``tquiver <subcommand> ...``.

Exit status: 0 success, 1 a check failed, 2 usage or parse error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import axioms, bkm, lie
from .shape_graph import (
    GraphParseError,
    InvalidInterval,
    ShapeGraph,
    enumerate_intervals,
    format_interval,
    parse_graph,
    parse_interval,
    parse_rational,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

# interval samples above this size make the cubic axiom scans impractical
MAX_SAMPLE = 400


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_graph(path: str) -> ShapeGraph:
    return parse_graph(_read(path))


def load_interval_set(graph: ShapeGraph, path: str) -> list:
    """One interval literal per line; '#' starts a comment."""
    out = []
    for line in _read(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_interval(graph, line))
    if not out:
        raise UsageError(f"{path} lists no intervals")
    return out


def load_matrix(path: str) -> bkm.CartanMatrix:
    return bkm.parse_cartan_matrix(_read(path))


def _degree_label(d: Sequence[int]) -> str:
    return "(" + ",".join(map(str, d)) + ")"


# ------------------------------------------------------------------ commands


def cmd_check_axioms(args, out: TextIO) -> int:
    graph = load_graph(args.graph)
    window = tuple(parse_rational(x) for x in args.window) if args.window else None
    sample = enumerate_intervals(graph, args.grid, max_runs=args.max_runs, window=window)
    if args.subsample is not None and args.subsample < len(sample):
        sample = sorted(random.Random(args.seed).sample(sample, args.subsample))
    if len(sample) > MAX_SAMPLE:
        raise bkm.ResourceLimit(f"sample of {len(sample)} intervals exceeds {MAX_SAMPLE}; narrow the window or grid")
    name = f"{Path(args.graph).name} grid {args.grid}"
    checks = {
        "positive": axioms.check_positive_semigroup,
        "cancellation": axioms.check_cancellation_lemma,
        "good": axioms.check_good_cartan,
    }
    chosen = list(checks) if args.family == "all" else [args.family]
    out.write(f"SAMPLE {len(sample)} intervals\n")
    ok = True
    for fam in chosen:
        report = checks[fam](sample, description=name)
        out.write(report.render() + "\n")
        for line in report.machine_lines():
            out.write(line + "\n")
        ok = ok and report.ok
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cartan(args, out: TextIO) -> int:
    graph = load_graph(args.graph)
    members = load_interval_set(graph, args.set)
    for k, J in enumerate(members, 1):
        out.write(f"J{k} = {format_interval(J)}\n")
    A = bkm.cartan_matrix(members)
    out.write(A.format() + "\n")
    ok, reason = bkm.is_irreducible(members)
    out.write("IRREDUCIBLE yes\n" if ok else f"IRREDUCIBLE no: {reason}\n")
    if args.dot:
        Path(args.dot).write_text(bkm.dot_export(A), encoding="utf-8")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bracket(args, out: TextIO) -> int:
    graph = load_graph(args.graph)
    try:
        value = lie.parse_expression(graph, args.expr)
    except lie.Unresolvable as exc:
        left, right = exc.pair
        letter = "e" if exc.sign > 0 else "f"
        out.write(f"UNRESOLVABLE {letter}({format_interval(left)}) {letter}({format_interval(right)})\n")
        return EXIT_OK
    out.write(lie.format_element(value) + "\n")
    return EXIT_OK


def cmd_mult(args, out: TextIO) -> int:
    A = load_matrix(args.matrix)
    degrees = bkm.multidegrees(A.n, args.max_height)
    serre = gk = None
    if args.oracle in ("serre", "both"):
        model = bkm.build_graded(A, args.max_height)
        serre = {d: model.mult(d) for d in degrees}
    if args.oracle in ("gabber-kac", "both"):
        gk = bkm.gabber_kac_table(A, args.max_height)
    cols = [c for c, t in (("serre", serre), ("gabber-kac", gk)) if t is not None]
    out.write("degree " + " ".join(cols) + "\n")
    for d in degrees:
        vals = [str(t[d]) for t in (serre, gk) if t is not None]
        if not args.all and all(v == "0" for v in vals):
            continue
        out.write(f"MULT {_degree_label(d)} " + " ".join(vals) + "\n")
    if serre is not None and gk is not None:
        diff = [d for d in degrees if serre[d] != gk[d]]
        if diff:
            out.write("DISCORDANT " + " ".join(_degree_label(d) for d in diff) + "\n")
            return EXIT_FAIL
        out.write("CONCORDANT\n")
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    graph = load_graph(args.graph)
    members = load_interval_set(graph, args.set)
    A = bkm.cartan_matrix(members)
    height = args.height if args.height is not None else min(2 * args.depth, bkm.MAX_HEIGHT)
    model = bkm.GradedModel(A, height)
    report = bkm.verify_presentation(members, model, args.depth)
    out.write(report.render() + "\n")
    out.write(report.detail + "\n")
    for line in report.machine_lines():
        out.write(line + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_embed(args, out: TextIO) -> int:
    graph = load_graph(args.graph)
    source = load_interval_set(graph, args.source)
    target = load_interval_set(graph, args.target)
    height = args.height
    src_model = bkm.GradedModel(bkm.cartan_matrix(source), height)
    tgt_model = bkm.GradedModel(bkm.cartan_matrix(target), height)
    emb = bkm.embed(source, target, src_model, tgt_model)
    out.write(f"KIND {emb.kind}\n")
    for (kind, i), img in sorted(emb.images.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        out.write(f"{kind}{i + 1} [{format_interval(source[i])}] -> {img}\n")
    bad = emb.verify()
    if bad:
        out.write("NOT A HOMOMORPHISM " + ", ".join(bad) + "\n")
        return EXIT_FAIL
    out.write("HOMOMORPHISM\n")
    return EXIT_OK


def cmd_dot(args, out: TextIO) -> int:
    if args.matrix:
        A = load_matrix(args.matrix)
    elif args.graph and args.set:
        graph = load_graph(args.graph)
        A = bkm.cartan_matrix(load_interval_set(graph, args.set))
    else:
        raise UsageError("dot needs --matrix, or --graph with --set")
    text = bkm.dot_export(A)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


# -------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tquiver", description="Interval Lie algebras of shape graphs.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized selections")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-axioms", help="run the axiom checkers on an enumerated sample")
    s.add_argument("--graph", required=True)
    s.add_argument("--grid", default="1")
    s.add_argument("--window", nargs=2, metavar=("A", "B"))
    s.add_argument("--max-runs", type=int, default=None)
    s.add_argument("--family", choices=["positive", "cancellation", "good", "all"], default="all")
    s.add_argument("--subsample", type=int, default=None, help="check a seeded random subset of this size")
    s.set_defaults(func=cmd_check_axioms)

    s = sub.add_parser("cartan", help="Cartan matrix and irreducibility of an interval set")
    s.add_argument("--graph", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--dot")
    s.set_defaults(func=cmd_cartan)

    s = sub.add_parser("bracket", help="normalize a bracket expression")
    s.add_argument("--graph", required=True)
    s.add_argument("--expr", required=True)
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("mult", help="root multiplicities of a Cartan matrix")
    s.add_argument("--matrix", required=True)
    s.add_argument("--max-height", type=int, default=6)
    s.add_argument("--oracle", choices=["serre", "gabber-kac", "both"], default="both")
    s.add_argument("--all", action="store_true", help="also list zero multiplicities")
    s.set_defaults(func=cmd_mult)

    s = sub.add_parser("verify", help="check the defining relations on images in the graded model")
    s.add_argument("--graph", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--height", type=int, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("embed", help="verify the embedding between two interval sets")
    s.add_argument("--graph", required=True)
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("--height", type=int, default=6)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("dot", help="Borcherds-Cartan diagram in Graphviz format")
    s.add_argument("--matrix")
    s.add_argument("--graph")
    s.add_argument("--set")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dot)
    return p


def run(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (GraphParseError, InvalidInterval, lie.ExpressionError, bkm.CartanError, bkm.EmbedError, bkm.PhiError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (bkm.ResourceLimit, bkm.HeightExceeded) as exc:
        err.write(f"resource limit: {exc}\n")
        return EXIT_RESOURCE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
