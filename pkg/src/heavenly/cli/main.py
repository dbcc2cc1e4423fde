"""Command-line entry point: ``heavenly <subcommand> [options]``.

Subcommands
    verify              run the selected suites and print a text summary
    report              run the suites and emit a JSON, text or CSV report
    derive-constraints  re-derive the coefficient relations and print verdicts
    curvature           print the frame curvature 2-forms of an instance
    signature           sample the metric signature at random points

Every option that sets a configuration field mirrors a key of the config
file (see ``heavenly.cli.config``); options override the file.
"""

from __future__ import annotations

import argparse
import sys

from ..arith import Q
from ..core import EquationConstants
from .config import SUITES, ConfigError, config_from_mapping, read_raw
from .report import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, emit_report, render_csv, run_suites


def _add_config_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("config", nargs="?", help="config file (key = value lines)")
    g.add_argument("--a", help="equation constant a (p/q)")
    g.add_argument("--b", help="equation constant b (p/q)")
    g.add_argument("--c", help="equation constant c (p/q)")
    g.add_argument("--branch", choices=("modified", "generic"))
    g.add_argument("--param", action="append", default=[], metavar="cK=V", help="free parameter, repeatable")
    g.add_argument("--seeds", help="comma-separated seeds")
    g.add_argument("--point", action="append", default=[], metavar="Z1,Z2,Z3,Z4", help="sample point, repeatable")
    g.add_argument("--sample-count", help="random signature sample points per instance")
    g.add_argument("--chart-sign", choices=("1", "-1"))
    g.add_argument("--suites", help=f"comma-separated subset of: {', '.join(SUITES)}; or 'all'")
    g.add_argument("--draws", choices=("yes", "no"), help="add one random draw per seed")
    g.add_argument("--explicit-u", help="debug: polynomial to use instead of a cubic")
    g.add_argument("--perturb", action="append", default=[], metavar="cK=V", help="debug: add V to coefficient cK")


def _kv(items, prefix="") -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected cK=V, got {item!r}")
        k, v = item.split("=", 1)
        out[prefix + k.strip()] = v.strip()
    return out


def config_from_args(args):
    raw = read_raw(args.config) if args.config else {}
    simple = {
        "a": args.a,
        "b": args.b,
        "c": args.c,
        "branch": args.branch,
        "seeds": args.seeds,
        "sample_count": args.sample_count,
        "chart_sign": args.chart_sign,
        "suites": args.suites,
        "draws": args.draws,
        "explicit_u": args.explicit_u,
    }
    raw.update({k: v for k, v in simple.items() if v is not None})
    if args.point:
        raw["points"] = "; ".join(args.point)
    raw.update(_kv(args.param))
    raw.update(_kv(args.perturb, "perturb."))
    return config_from_mapping(raw)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    cfg = config_from_args(args)
    report = run_suites(cfg, jobs=args.jobs)
    return emit_report(report, args.format, args.output)


def cmd_report(args) -> int:
    cfg = config_from_args(args)
    report = run_suites(cfg, jobs=args.jobs)
    return emit_report(report, args.format, args.output, timing=not args.no_timing)


def _consts_from_args(args) -> EquationConstants | None:
    if args.modified:
        return EquationConstants(0, 1, 0)
    if args.a is None and args.b is None and args.c is None:
        return None
    from .config import parse_rational

    vals = [parse_rational(v, k) if v is not None else Q(0) for k, v in (("a", args.a), ("b", args.b), ("c", args.c))]
    return EquationConstants(*vals)


def cmd_derive(args) -> int:
    from ..solutions import rederive_constraints

    consts = _consts_from_args(args)
    rep = rederive_constraints(consts)
    label = "symbolic a, b, c" if consts is None else f"a={consts.a}, b={consts.b}, c={consts.c}"
    print(f"re-derived dependent coefficients ({label}):")
    for k, v in sorted(rep.derived.items()):
        print(f"  c{k} = {v}    [{rep.comparisons.get(k, '-')}]")
    print(f"c4: {rep.c4_verdict}")
    print(f"c10: {rep.branch_note}")
    if rep.modified_comparisons:
        bad = [k for k, v in rep.modified_comparisons.items() if v != "match"]
        status = "all match" if not bad else "mismatch in " + ", ".join(f"c{k}" for k in bad)
        print(f"a=c=0, b=1 specialisation: {status}")
    for d in rep.discrepancies():
        print(f"discrepancy: {d}")
    print(f"residual of the re-derived cubic: {'zero' if rep.residual_zero else 'NONZERO'}")
    return EXIT_OK if rep.residual_zero else EXIT_FAIL


def cmd_curvature(args) -> int:
    from ..curvature import asd_check, curvature_pipeline
    from .suites import build_instances

    cfg = config_from_args(args)
    inst = build_instances(cfg)[0]
    bundle = curvature_pipeline(inst.metric)
    print(f"instance {inst.label}: u = {inst.u}")
    print(f"chart s = {inst.sign}, Delta = {inst.jet.delta}")
    forms = bundle.raised_frame() if args.raised else bundle.frame
    tag = "R^{ab}" if args.raised else "R^a_b"
    for (a, b), form in sorted(forms.items()):
        if args.raised and a >= b:
            continue
        print(f"{tag}[{a + 1}{b + 1}] = {0 if form.is_zero() else form}")
    asd = asd_check(bundle, inst.metric)
    print(f"duality: {asd.verdict} (sign {asd.sign})")
    return EXIT_OK


def cmd_signature(args) -> int:
    import random

    from .suites import build_instances, chart_points, sample_signature

    cfg = config_from_args(args)
    status = EXIT_OK
    rows_all = []
    for inst in build_instances(cfg):
        rng = random.Random(args.seed)
        pts = list(cfg.sample_points) + chart_points(inst, rng, args.points)
        hist, rows, bad = sample_signature(inst, pts)
        rows_all += rows
        print(f"{inst.label}: " + (", ".join(f"{k}: {v}" for k, v in sorted(hist.items())) or "no points"))
        if bad:
            status = EXIT_FAIL
            p, pair = bad[0]
            print(f"  non-neutral signature {pair} at {tuple(str(x) for x in p)}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(render_csv(rows_all))
    return status


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heavenly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run verification suites")
    _add_config_args(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="run suites and emit a report")
    _add_config_args(p)
    p.add_argument("--format", choices=("json", "text", "csv"), default="json")
    p.add_argument("--output", "-o")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="omit timing and versions (byte-stable output)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("derive-constraints", help="re-derive the coefficient relations")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.add_argument("--modified", action="store_true", help="use a=c=0, b=1")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("curvature", help="print the frame curvature 2-forms")
    _add_config_args(p)
    p.add_argument("--raised", action="store_true", help="print R^{ab} instead of R^a_b")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("signature", help="sample the signature at random points")
    _add_config_args(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="export the sample grid as CSV")
    p.set_defaults(func=cmd_signature)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
