"""Command-line front end: one verb per operation plus runnable suites.

Exit codes: 0 success, 1 domain error (error class name on stderr),
2 usage error.  All numeric output is deterministic given the seeds;
floats print with 17 significant digits, rationals as p/q.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from .errors import FliessKitError
from .evolution import LieAlgebraCurve, evolve, shuffle_volterra
from .fliess import (
    PolynomialRealization,
    cascade_check,
    fliess_eval,
    parse_input_signal,
    realization_to_series,
)
from .groups import (
    UnitalSeries,
    feedback,
    group_inverse,
    shuffle_inverse,
)
from .poly import parse_polynomial
from .products import compose, lie_bracket, mixed_compose, pre_lie, shuffle
from .series import (
    Series,
    format_scalar,
    linf_norm,
    parse_series,
    serialize_series,
)
from .suites import SUITES, run_suite


def _read_series(path, args) -> Series:
    mode = None
    if getattr(args, "rational", False):
        mode = "rational"
    if getattr(args, "float_mode", False):
        mode = "float"
    with open(path) as fh:
        return parse_series(fh.read(), trunc=getattr(args, "trunc", None), mode=mode)


def _emit(text: str, args) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_series(c: Series, args) -> None:
    _emit(serialize_series(c), args)


def _common(parser: argparse.ArgumentParser, trunc=True) -> None:
    if trunc:
        parser.add_argument("--trunc", type=int, default=None, help="output truncation length L")
    parser.add_argument("--out", default=None, help="write output to PATH instead of stdout")
    parser.add_argument("--seed", type=int, default=7, help="base RNG seed")
    parser.add_argument("--threads", type=int, default=1, help="worker cap for sample sweeps")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--rational", action="store_true", help="force exact coefficients")
    mode.add_argument("--float", dest="float_mode", action="store_true", help="force float coefficients")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="fliess-kit",
        description="truncated noncommutative power series toolkit",
    )
    sub = top.add_subparsers(dest="verb", required=True)

    def add(name, help_, positionals=(), trunc=True, extra=None):
        p = sub.add_parser(name, help=help_)
        for pos in positionals:
            p.add_argument(pos)
        _common(p, trunc=trunc)
        if extra:
            extra(p)
        return p

    add("shuffle", "shuffle product of two series files", ("left", "right"))
    add("compose", "cascade composition of two series files", ("left", "right"))
    add("mixed-compose", "mixed composition against delta + right", ("left", "right"))
    add("pre-lie", "pre-Lie product of two series files", ("left", "right"))
    add("bracket", "Lie bracket of two series files", ("left", "right"))
    add("shuffle-inv", "shuffle inverse of a non-proper series", ("series",))
    add("group-inv", "group inverse of delta + series", ("series",))
    add("feedback", "closed-loop series, forward and feedback paths", ("forward", "loop"))

    add(
        "norm",
        "truncated growth norm of a series",
        ("series",),
        extra=lambda p: p.add_argument("--M", default="1", help="geometric weight M > 0"),
    )

    def eval_extra(p):
        p.add_argument("--time", type=float, required=True)

    add("fliess-eval", "evaluate the operator on an input signal", ("series", "signal"), extra=eval_extra)
    add("cascade-check", "trajectory residual of the cascade identity", ("left", "right", "signal"), extra=eval_extra)

    add("realize", "convert a realization (JSON) to its generating series", ("realization",))

    def evolve_extra(p):
        p.add_argument("--steps", type=int, default=256)
        p.add_argument("--times", default="1.0", help="comma-separated sample times in [0,1]")

    add("evolve", "integrate the group evolution for a constant curve", ("series",), extra=evolve_extra)

    def volterra_extra(p):
        p.add_argument("--steps", type=int, default=1024)
        p.add_argument("--time", type=float, default=1.0)

    add("volterra", "nested-integral series for a constant curve", ("series",), extra=volterra_extra)

    def bk_extra(p):
        p.add_argument("--kmax", type=int, default=7)

    add("bk-table", "inverse-coefficient polynomial table", (), trunc=False, extra=bk_extra)

    def verify_extra(p):
        p.add_argument("--M", type=float, default=1.0)
        p.add_argument("--eps", type=float, default=0.5)
        p.add_argument("--L", type=int, default=5)
        p.add_argument("--samples", type=int, default=200)

    vp = sub.add_parser("verify", help="run one bound-verification experiment")
    vp.add_argument(
        "lemma",
        choices=["shuffle-bound", "composition-bound", "shuffle-power", "bk-majorant"],
    )
    _common(vp, trunc=False)
    verify_extra(vp)

    sp = sub.add_parser("suite", help="run a named check suite")
    sp.add_argument("name", choices=sorted(SUITES))
    _common(sp, trunc=False)

    return top


def _load_realization(path) -> PolynomialRealization:
    with open(path) as fh:
        data = json.load(fh)
    state = tuple(data["state"])
    fields = [
        [parse_polynomial(entry) for entry in field] for field in data["g"]
    ]
    outputs = [parse_polynomial(entry) for entry in data["h"]]
    z0 = [parse_polynomial(str(entry)) for entry in data["z0"]]
    return PolynomialRealization(state, fields, outputs, z0)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    verb = args.verb

    if verb in ("shuffle", "compose", "mixed-compose", "pre-lie", "bracket", "feedback"):
        left = _read_series(args.left if hasattr(args, "left") else args.forward, args)
        right = _read_series(args.right if hasattr(args, "right") else args.loop, args)
        op = {
            "shuffle": shuffle,
            "compose": compose,
            "mixed-compose": mixed_compose,
            "pre-lie": pre_lie,
            "bracket": lie_bracket,
            "feedback": feedback,
        }[verb]
        _emit_series(op(left, right, args.trunc), args)
        return 0

    if verb == "shuffle-inv":
        c = _read_series(args.series, args)
        _emit_series(shuffle_inverse(c, args.trunc), args)
        return 0

    if verb == "group-inv":
        c = _read_series(args.series, args)
        _emit_series(group_inverse(UnitalSeries(c), args.trunc).body, args)
        return 0

    if verb == "norm":
        c = _read_series(args.series, args)
        M = Fraction(args.M)
        _emit(format_scalar(linf_norm(c, M)), args)
        return 0

    if verb == "fliess-eval":
        c = _read_series(args.series, args)
        with open(args.signal) as fh:
            u = parse_input_signal(fh.read())
        got = fliess_eval(c, u, args.time)
        lines = [format(v, ".17g") for v in got.value]
        lines.append(f"# top-stratum {format(got.top_stratum, '.17g')}")
        _emit("\n".join(lines), args)
        return 0

    if verb == "cascade-check":
        c = _read_series(args.left, args)
        d = _read_series(args.right, args)
        with open(args.signal) as fh:
            u = parse_input_signal(fh.read())
        _emit(format(cascade_check(c, d, u, args.time, L=args.trunc), ".17g"), args)
        return 0

    if verb == "realize":
        r = _load_realization(args.realization)
        L = args.trunc if args.trunc is not None else 4
        _emit_series(realization_to_series(r, L), args)
        return 0

    if verb == "evolve":
        c = _read_series(args.series, args)
        L = args.trunc if args.trunc is not None else c.trunc
        path = evolve(LieAlgebraCurve.constant_curve(c), L, args.steps)
        times = [float(tok) for tok in args.times.split(",") if tok]
        if args.out:
            curve = LieAlgebraCurve.constant_curve(c)
            print(path.export(args.out, times, curve=curve))
        else:
            blocks = []
            for t in times:
                blocks.append(f"# t={format(t, '.17g')}")
                blocks.append(serialize_series(path.body_at(t)))
            print("\n".join(blocks))
        return 0

    if verb == "volterra":
        c = _read_series(args.series, args)
        L = args.trunc if args.trunc is not None else c.trunc
        got = shuffle_volterra(LieAlgebraCurve.constant_curve(c), args.time, L, args.steps)
        _emit_series(got, args)
        return 0

    if verb == "bk-table":
        table = bounds_mod.bk_table(args.kmax)
        _emit(table.render(), args)
        return 0

    if verb == "verify":
        if args.lemma == "shuffle-bound":
            rep = bounds_mod.verify_shuffle_bound(
                M=args.M, eps=args.eps, L=args.L, samples=args.samples,
                seed=args.seed, threads=args.threads,
            )
        elif args.lemma == "composition-bound":
            rep = bounds_mod.verify_composition_bound(
                M=args.M, eps=args.eps, L=args.L, samples=args.samples,
                seed=args.seed, threads=args.threads,
            )
        elif args.lemma == "shuffle-power":
            rep = bounds_mod.verify_shuffle_power_sum(M=int(args.M), L=args.L, seed=args.seed)
        else:
            rep = bounds_mod.verify_bk_majorant()
        _emit(rep.render(), args)
        return 0 if rep.passed else 1

    if verb == "suite":
        results = run_suite(args.name)
        for r in results:
            print(r.line())
        failed = sum(not r.passed for r in results)
        print(f"suite={args.name} checks={len(results)} failed={failed}")
        return 1 if failed else 0

    raise AssertionError(f"unhandled verb {verb}")


def main() -> None:
    try:
        sys.exit(run())
    except FliessKitError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        sys.exit(1)
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
