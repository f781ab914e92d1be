"""Command-line interface: ``python3 -m fibertree <verb> <sub-verb> ...``.

Decision verbs exit 0 (true), 1 (false) or 2 (error); everything else
exits 0 on success and 2 on error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import io
from .confspace import NoPathError, audit_path, chiral_structure, connect, enclosing_arc, is_member
from .fiber import (
    NotRealizableError,
    UnsupportedDomainError,
    barcode_of,
    containment_product,
    count_components,
    enumerate_merge_trees,
    is_generic_barcode,
    realize_function,
    same_component,
    separation_thresholds,
    verify_fiber_membership,
)
from .geometry import Arc, InvalidInputError
from .homology import discrete_conf2_betti1
from .mergetree import (
    AmbiguousElderRuleError,
    compute_merge_tree,
    induced_matrix,
    is_isomorphic,
    matrix_distance,
    matrix_distance_min_over_labelings,
)

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _seed(args) -> int:
    env = os.environ.get("FIBERTREE_SEED")
    return int(env) if env is not None else args.seed


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _decide(flag: bool, detail: str | None = None) -> int:
    print("true" if flag else "false")
    if detail:
        print(detail, file=sys.stderr)
    return EXIT_TRUE if flag else EXIT_FALSE


def _labels(text: str | None):
    if text is None:
        return None
    return [s.strip() for s in text.split(",") if s.strip()]


# -- handlers --------------------------------------------------------------


def mt_compute(args):
    f = io.parse_function(io.load(args.function))
    T, _ = compute_merge_tree(f)
    _emit(args, io.dumps(io.merge_tree_to_data(T)))


def mt_isomorphic(args):
    T1 = io.parse_merge_tree(io.load(args.merge_tree))
    T2 = io.parse_merge_tree(io.load(args.merge_tree2))
    return _decide(is_isomorphic(T1, T2))


def mt_matrix(args):
    T = io.parse_merge_tree(io.load(args.merge_tree))
    M = induced_matrix(T, _labels(args.labels))
    _emit(args, io.dumps(io.matrix_to_data(M, args.decimal)))


def _barcode_input(args):
    if args.function:
        return barcode_of(compute_merge_tree(io.parse_function(io.load(args.function)))[0])
    if args.merge_tree:
        return barcode_of(io.parse_merge_tree(io.load(args.merge_tree)))
    return io.parse_barcode(io.load(args.barcode))


def barcode_of_cmd(args):
    _emit(args, io.dumps(io.barcode_to_data(_barcode_input(args), args.decimal)))


def barcode_generic(args):
    return _decide(is_generic_barcode(_barcode_input(args)))


def barcode_deltas(args):
    dl, dr = separation_thresholds(_barcode_input(args))
    data = {"delta_L": io.fmt(dl, args.decimal), "delta_R": io.fmt(dr, args.decimal), "min": io.fmt(min(dl, dr), args.decimal)}
    _emit(args, io.dumps(data))


def fiber_count(args):
    D = io.parse_barcode(io.load(args.barcode))
    n = containment_product(D) if args.formula == "product" else count_components(D)
    _emit(args, f"{n}\n")


def fiber_enumerate(args):
    D = io.parse_barcode(io.load(args.barcode))
    _emit(args, io.dumps([io.merge_tree_to_data(T) for T in enumerate_merge_trees(D)]))


def fiber_realize(args):
    T = io.parse_merge_tree(io.load(args.merge_tree))
    X = io.parse_tree(io.load(args.tree))
    Z = None
    if args.config:
        Z = io.parse_configuration(io.load(args.config)).points
    elif args.random_config:
        from .randomgen import random_member_configuration

        Z = random_member_configuration(X, T, random.Random(_seed(args)))
    _emit(args, io.dumps(io.function_to_data(realize_function(T, X, Z))))


def fiber_verify(args):
    f = io.parse_function(io.load(args.function))
    T = io.parse_merge_tree(io.load(args.merge_tree))
    check = verify_fiber_membership(f, T)
    return _decide(check.ok, check.diagnostic)


def fiber_same_component(args):
    f = io.parse_function(io.load(args.function))
    g = io.parse_function(io.load(args.function2))
    return _decide(same_component(f, g))


def conf_check(args):
    cfg = io.parse_configuration(io.load(args.config))
    m = is_member(cfg.tree, cfg.merge_tree, cfg.points)
    return _decide(m.ok, None if m.ok else f"witness: {m.witness[0]} {m.witness[1]}")


def _arc(args, X, points):
    if args.arc:
        a, b = args.arc
        return Arc(X, X.at(a), X.at(b))
    return enclosing_arc(X, points)


def conf_chirality(args):
    cfg = io.parse_configuration(io.load(args.config))
    chi = chiral_structure(cfg.tree, cfg.merge_tree, cfg.points, _arc(args, cfg.tree, cfg.points))
    data = {v: {"left": l, "right": r} for v, (l, r) in chi.items()}
    _emit(args, io.dumps(data))


def conf_connect(args):
    src = io.parse_configuration(io.load(args.config))
    dst = io.parse_configuration(io.load(args.target))
    X, T = src.tree, src.merge_tree
    path = connect(X, T, src.points, dst.points)
    if args.audit:
        report = audit_path(X, T, path)
        if not report:
            print(f"audit failed: {report.failure}", file=sys.stderr)
            return EXIT_ERROR
        print(f"audit passed: {report.samples} samples over {len(path)} moves", file=sys.stderr)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(io.path_to_csv(X, path, args.decimal))
    _emit(args, io.dumps(io.path_to_data(path, args.decimal)))


def conf_betti1(args):
    X = io.parse_tree(io.load(args.tree))
    _emit(args, f"{discrete_conf2_betti1(X)}\n")


def dist_matrix(args):
    T1 = io.parse_merge_tree(io.load(args.merge_tree))
    T2 = io.parse_merge_tree(io.load(args.merge_tree2))
    l1, l2 = _labels(args.labels1), _labels(args.labels2)
    if l1 is None and l2 is None:
        d = matrix_distance_min_over_labelings(T1, T2, args.bound)
    else:
        d = matrix_distance(T1, T2, l1 or list(T1.leaves), l2 or list(T2.leaves))
    _emit(args, f"{io.fmt(d, args.decimal)}\n")


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--decimal", type=int, default=None, metavar="K", help="render numbers as decimals with K digits")
    common.add_argument("--seed", type=int, default=0, help="random seed (FIBERTREE_SEED overrides)")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    p = _Parser(prog="fibertree", description="Merge trees, barcodes and their fibers on geometric trees.")
    verbs = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def sub(group, name, handler, help_text):
        q = group.add_parser(name, parents=[common], help=help_text)
        q.set_defaults(handler=handler)
        return q

    mt = verbs.add_parser("mt", help="merge trees").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = sub(mt, "compute", mt_compute, "merge tree of a PL function")
    q.add_argument("--function", required=True)
    q = sub(mt, "isomorphic", mt_isomorphic, "decide isomorphism")
    q.add_argument("--merge-tree", required=True)
    q.add_argument("--merge-tree2", required=True)
    q = sub(mt, "matrix", mt_matrix, "induced matrix")
    q.add_argument("--merge-tree", required=True)
    q.add_argument("--labels", default=None, help="comma-separated leaf labelling, repeats allowed")

    bc = verbs.add_parser("barcode", help="barcodes").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name, handler, text in (
        ("of", barcode_of_cmd, "elder-rule barcode"),
        ("generic", barcode_generic, "decide genericity"),
        ("deltas", barcode_deltas, "separation thresholds"),
    ):
        q = sub(bc, name, handler, text)
        g = q.add_mutually_exclusive_group(required=True)
        g.add_argument("--barcode")
        g.add_argument("--function")
        g.add_argument("--merge-tree")

    fb = verbs.add_parser("fiber", help="barcode fibers").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = sub(fb, "count", fiber_count, "number of path components")
    q.add_argument("--barcode", required=True)
    q.add_argument(
        "--formula",
        choices=("components", "product"),
        default="components",
        help="components: strict-containment count (default); product: non-strict containment product",
    )
    q = sub(fb, "enumerate", fiber_enumerate, "one merge tree per component")
    q.add_argument("--barcode", required=True)
    q = sub(fb, "realize", fiber_realize, "PL function with a given merge tree")
    q.add_argument("--merge-tree", required=True)
    q.add_argument("--tree", required=True)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--config", default=None, help="configuration file with the minima positions")
    g.add_argument("--random-config", action="store_true", help="seeded random admissible configuration")
    q = sub(fb, "verify", fiber_verify, "decide MT(f) = T")
    q.add_argument("--function", required=True)
    q.add_argument("--merge-tree", required=True)
    q = sub(fb, "same-component", fiber_same_component, "decide whether f, g share a component")
    q.add_argument("--function", required=True)
    q.add_argument("--function2", required=True)

    cf = verbs.add_parser("conf", help="configuration spaces").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = sub(cf, "check", conf_check, "decide admissibility")
    q.add_argument("--config", required=True)
    q = sub(cf, "chirality", conf_chirality, "left/right children along an arc")
    q.add_argument("--config", required=True)
    q.add_argument("--arc", nargs=2, metavar=("FROM", "TO"), default=None, help="arc between two vertices")
    q = sub(cf, "connect", conf_connect, "explicit path between configurations")
    q.add_argument("--config", required=True)
    q.add_argument("--target", required=True)
    q.add_argument("--audit", action="store_true", help="run the full waypoint audit")
    q.add_argument("--csv", default=None, help="also write plot data here")
    q = sub(cf, "betti1", conf_betti1, "first Betti number of the two-point configuration space")
    q.add_argument("--tree", required=True)

    ds = verbs.add_parser("dist", help="distances").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = sub(ds, "matrix", dist_matrix, "labelled matrix distance")
    q.add_argument("--merge-tree", required=True)
    q.add_argument("--merge-tree2", required=True)
    q.add_argument("--labels1", default=None)
    q.add_argument("--labels2", default=None)
    q.add_argument("--bound", type=int, default=4, help="labelling length bound when no labels are given")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.handler(args)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (
        InvalidInputError,
        NotRealizableError,
        UnsupportedDomainError,
        AmbiguousElderRuleError,
        NoPathError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_TRUE if code is None else code


def main() -> None:
    sys.exit(run())
