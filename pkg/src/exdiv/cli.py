"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (inequality violated or a
proposition violation found), 2 usage or parse error.  Every subcommand
takes ``--format {text,json}``; json is stable and is what the tests read.

Forest arguments are ``.prox`` paths, or one of the built-in fixture names
(CHAIN1, CHAIN3, SAT3, PAIR4) when no such file exists.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import budget, divisors, dynkin, propcheck
from .lattice import (
    FIXTURES,
    ForestError,
    build_lattice,
    canonical_degree,
    intersect,
    parse_divisor,
    parse_forest,
    serialize_forest,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_forest(arg):
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    elif arg in FIXTURES:
        text = FIXTURES[arg]
    else:
        raise UsageError(f"no such file or fixture: {arg}")
    return parse_forest(text)


def _lattice(args):
    return build_lattice(_read_forest(args.forest))


def _divisor(args, L):
    try:
        D = parse_divisor(args.divisor, L.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return D


def _row(v):
    return "(" + ", ".join(str(int(x)) for x in v) + ")"


def _emit(args, payload, text_lines):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(text_lines))


# ------------------------------------------------------------------ commands


def cmd_validate(args):
    f = _read_forest(args.forest)
    _emit(args, {"valid": True, "s": f.s, "forest": serialize_forest(f)}, [f"valid forest, s = {f.s}"])
    return EXIT_OK


def cmd_lattice(args):
    L = _lattice(args)
    Es = [list(E.coords) for E in L.total_transforms()]
    payload = {
        "s": L.s,
        "gram_e": L.gram_e.tolist(),
        "basis_change": L.basis_change.tolist(),
        "total_transforms": Es,
        "k_degrees": L.k_degrees.tolist(),
        "leading_minors": list(L.minors),
        "negative_definite": True,
    }
    lines = [f"s = {L.s}", "gram_e:"]
    lines += ["  " + _row(r) for r in L.gram_e]
    lines.append("total transforms (e-coordinates):")
    lines += [f"  E{i} = {_row(E)}" for i, E in enumerate(Es, start=1)]
    lines.append("k_degrees: " + _row(L.k_degrees))
    lines.append("negative definite: leading minors " + _row(L.minors))
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_enumerate(args):
    L = _lattice(args)
    try:
        found = divisors.enumerate_contracted(L, args.kdeg, args.selfint)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    items = []
    for D in found:
        t = dynkin.classify_ADE(L, D)
        items.append({"divisor": list(D.coords), "type": None if t is None else str(t)})
    lines = [f"{len(found)} classes with K.D = {args.kdeg}, D^2 = {args.selfint}"]
    lines += [f"  {_row(it['divisor'])}  {it['type'] or '-'}" for it in items]
    _emit(args, {"kdeg": args.kdeg, "selfint": args.selfint, "divisors": items}, lines)
    return EXIT_OK


def cmd_classify(args):
    L = _lattice(args)
    D = _divisor(args, L)
    if not D.is_effective:
        raise UsageError(f"{D} is not effective")
    t = dynkin.classify_ADE(L, D)
    payload = {
        "divisor": list(D.coords),
        "type": None if t is None else str(t),
        "self_intersection": intersect(L, D, D),
        "k_degree": canonical_degree(L, D),
        "arithmetic_genus": divisors.arithmetic_genus(L, D),
        "connectedness_order": divisors.is_m_connected(L, D, 1).connectedness_order,
    }
    _emit(args, payload, [f"{D}: {t if t else 'not an A-D-E configuration'}"])
    return EXIT_OK


def cmd_dot(args):
    L = _lattice(args)
    D = _divisor(args, L)
    try:
        g = dynkin.dual_graph(L, D)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    dot = g.to_dot()
    if args.format == "json":
        print(json.dumps({"dot": dot}, indent=2, sort_keys=True))
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def _cycle_text(t, z):
    z = [int(x) for x in z]
    if t is None or t.family == "A":
        return ",".join(map(str, z))
    return f"{z[0]};" + ",".join(map(str, z[1:]))


def cmd_fundamental_cycle(args):
    target = args.target
    if args.divisor is None:
        try:
            t = dynkin.DynkinType.parse(target)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        gram = dynkin.abstract_lattice(t)
        labels = list(range(1, t.n + 1))
    else:
        L = build_lattice(_read_forest(target))
        D = _divisor(args, L)
        if not D.is_reduced:
            raise UsageError(f"{D} is not reduced")
        labels = sorted(D.support())
        idx = [i - 1 for i in labels]
        gram = L.gram_e[idx][:, idx]
        t = dynkin.classify_ADE(L, D)
    try:
        z = dynkin.fundamental_cycle(gram)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    z2 = int(z @ gram @ z)
    payload = {
        "type": None if t is None else str(t),
        "components": labels,
        "multiplicities": z.tolist(),
        "self_intersection": z2,
        "k_degree": 0,
    }
    _emit(args, payload, [f"type {t}", f"multiplicities {_cycle_text(t, z)}", f"Z^2 = {z2}"])
    return EXIT_OK


def cmd_theta(args):
    L = _lattice(args)
    D = _divisor(args, L)
    try:
        th = dynkin.theta(L, D)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    except dynkin.InvariantViolation as exc:
        _emit(args, {"error": str(exc)}, [f"invariant violated: {exc}"])
        return EXIT_NEGATIVE
    _emit(args, {"j": th.j, "theta": th.theta}, [f"E{th.j} meets {D} once, at e{th.theta}"])
    return EXIT_OK


def cmd_budget_families(args):
    L = _lattice(args)
    fams = dynkin.disjoint_A_budget(L, check=False)
    bad = [b for _, b in fams if b > L.s]
    items = [{"family": [list(D.coords) for D in fam], "budget": b} for fam, b in fams]
    lines = [f"s = {L.s}"] + [
        f"  {' + '.join(str(D) for D in fam)}: {b}{' (= s)' if b == L.s else ''}" for fam, b in fams
    ]
    _emit(args, {"s": L.s, "families": items, "holds": not bad}, lines)
    return EXIT_NEGATIVE if bad else EXIT_OK


def _report(args, report):
    if args.format == "json":
        print(report.to_json())
    else:
        print("\n".join(report.summary_lines()))
        print(f"violations: {report.violation_count}")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _max_box(args):
    return None if args.max_box <= 0 else args.max_box


def cmd_check_props(args):
    f = _read_forest(args.forest)
    return _report(args, propcheck.run_suite(f, args.cap, _max_box(args)))


def cmd_exhaust(args):
    if not 1 <= args.points <= propcheck.MAX_POINTS:
        raise UsageError(f"--points must lie in 1..{propcheck.MAX_POINTS}")
    return _report(args, propcheck.exhaust(args.points, args.cap, _max_box(args), args.jobs))


def cmd_fuzz(args):
    if args.max_points < 1 or args.count < 0:
        raise UsageError("--max-points must be positive and --count non-negative")
    report = propcheck.fuzz(args.max_points, args.count, args.seed, args.cap, _max_box(args),
                            args.jobs, args.min_points)
    return _report(args, report)


def cmd_miyaoka(args):
    if args.blowups < 0:
        raise UsageError("--blowups must be non-negative")
    try:
        sings = tuple(dynkin.DynkinType.parse(x) for x in args.sing)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    v = budget.check_budget(budget.SingularityBudget(args.chi, args.k2, args.blowups, sings))
    rec = v.as_record()
    lines = [f"{k}: {rec[k]}" for k in sorted(rec)]
    lines.append("verdict: " + ("holds" if v.holds else "VIOLATED"))
    _emit(args, rec, lines)
    return EXIT_OK if v.holds else EXIT_NEGATIVE


# -------------------------------------------------------------------- parser


def build_parser():
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="exdiv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def forest_cmd(name, fn, help_):
        sp = sub.add_parser(name, parents=[fmt], help=help_)
        sp.add_argument("forest", help=".prox file or fixture name")
        sp.set_defaults(fn=fn)
        return sp

    forest_cmd("validate", cmd_validate, "check a .prox file")
    forest_cmd("lattice", cmd_lattice, "Gram matrix, total transforms, K-degrees")
    sp = forest_cmd("enumerate", cmd_enumerate, "all effective classes with given K.D and D^2")
    sp.add_argument("--kdeg", type=int, required=True)
    sp.add_argument("--selfint", type=int, required=True)
    for name, fn, h in (
        ("classify", cmd_classify, "A-D-E type of a divisor"),
        ("dot", cmd_dot, "dual graph of a reduced divisor in DOT"),
        ("theta", cmd_theta, "total transform and component met by an A-configuration"),
    ):
        sp = forest_cmd(name, fn, h)
        sp.add_argument("--divisor", required=True, help="comma-separated e-coordinates")
    forest_cmd("budget-families", cmd_budget_families, "maximal disjoint A-configuration families")

    sp = sub.add_parser("fundamental-cycle", parents=[fmt], help="Artin fundamental cycle")
    sp.add_argument("target", help="Dynkin type (A3, D4, E8...) or forest with --divisor")
    sp.add_argument("--divisor")
    sp.set_defaults(fn=cmd_fundamental_cycle)

    def box_args(sp, max_box):
        sp.add_argument("--cap", type=int, default=None, help="coordinate cap for brute-force checks")
        sp.add_argument("--max-box", type=int, default=max_box,
                        help="largest coordinate box per forest; <= 0 for no limit")

    sp = forest_cmd("check-props", cmd_check_props, "run the proposition suite on one forest")
    box_args(sp, 0)
    sp = sub.add_parser("exhaust", parents=[fmt], help="suite over every forest up to N points")
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    box_args(sp, 0)
    sp.set_defaults(fn=cmd_exhaust)
    sp = sub.add_parser("fuzz", parents=[fmt], help="suite over seeded random forests")
    sp.add_argument("--max-points", type=int, required=True)
    sp.add_argument("--min-points", type=int, default=None)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    box_args(sp, propcheck.DEFAULT_MAX_BOX)
    sp.set_defaults(fn=cmd_fuzz)

    sp = sub.add_parser("miyaoka", parents=[fmt], help="singularity budget inequality")
    sp.add_argument("--chi", type=int, required=True)
    sp.add_argument("--k2", type=int, required=True)
    sp.add_argument("--blowups", type=int, required=True)
    sp.add_argument("--sing", action="extend", nargs="+", default=[], metavar="SPEC")
    sp.set_defaults(fn=cmd_miyaoka)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ForestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
