"""Command-line front end: ``residua analyze|monitor|equiv|bench``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures
from .bench import LEVELS, BenchScenario, run_bench
from .dateformat import parse_date, print_date
from .errors import ResiduaError, ResourceLimit
from .monitor import monitor
from .oracle import equiv_on_program
from .program import Pair, format_trace, parse_program, parse_trace
from .residual import analyze, parse_silenced

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3
EXIT_MISMATCH = 4
EXIT_LIMIT = 5


def _read(path: str) -> str:
    """Read a file; ``fixture:<name>`` reads from the bundled fixture library."""
    if path.startswith("fixture:"):
        return fixtures.text(path[len("fixture:"):])
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_date(path):
    return parse_date(_read(path))


def _load_programs(paths):
    return [parse_program(_read(p)) for p in paths or ()]


def cmd_analyze(args, out) -> int:
    d = _load_date(args.date)
    ps = _load_programs(args.program)
    if not ps:
        raise ResiduaError("analyze needs at least one --program")
    rep = analyze(d, ps, args.level, fixpoint=args.fixpoint)
    if args.out_date:
        _write(args.out_date, print_date(rep.residual))
    if args.out_silenced:
        _write(args.out_silenced, rep.format_silenced())
    if args.out_report:
        _write(args.out_report, rep.format_report())
    out.write(rep.format_report())
    return EXIT_OK


def cmd_monitor(args, out) -> int:
    d = _load_date(args.date)
    rt = parse_trace(_read(args.trace))
    if rt and not isinstance(rt[0], tuple):
        rt = tuple(Pair(d.param, e) for e in rt)  # a ground trace is one object's view
    must = None
    ps = _load_programs(args.program)
    if ps:
        must = ps[0].aliases
    silenced = parse_silenced(_read(args.silenced)) if args.silenced else ()
    verdicts, stats = monitor(d, rt, must, silenced, args.halt_on_violation)
    for cls, v in verdicts.items():
        out.write(f"{cls} {v}\n")
    out.write(stats.format())
    return EXIT_VIOLATION if any(v.violated for v in verdicts.values()) else EXIT_OK


def cmd_equiv(args, out) -> int:
    da = _load_date(args.date)
    ps = _load_programs(args.program)
    if not ps:
        raise ResiduaError("equiv needs --program")
    if args.residual:
        db = _load_date(args.residual)
        silenced = parse_silenced(_read(args.silenced)) if args.silenced else ()
    else:
        rep = analyze(da, ps, args.level, fixpoint=args.fixpoint)
        db, silenced = rep.residual, rep.silenced
    res = equiv_on_program(da, db, ps[0], args.bound, silenced)
    out.write(res.summary() + "\n")
    if res.mismatches:
        m = res.mismatches[0]
        out.write(f"# counterexample for {m.ident}: original {m.verdict_a}, residual {m.verdict_b}\n")
        out.write(format_trace(m.trace))
        return EXIT_MISMATCH
    return EXIT_OK


def _parse_mix(text: str) -> tuple:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("mix is three comma-separated proportions")
    total = sum(parts)
    if total <= 0:
        raise argparse.ArgumentTypeError("mix proportions must not all be zero")
    return tuple(x / total for x in parts)


def cmd_bench(args, out) -> int:
    s = BenchScenario(users=args.users, mix=args.mix, seed=args.seed, steps=args.steps,
                      level=args.level)
    rep = run_bench(s)
    text = rep.to_csv()
    if args.out_csv:
        _write(args.out_csv, text)
    if args.out_plot:
        from .plot import render_bench

        render_bench(rep, args.out_plot)
    out.write(text)
    if not rep.verdicts_agree:
        out.write("# verdicts differ between levels\n")
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="residua",
        description="Residual analysis of guarded monitoring automata against program event-flow models.",
        epilog="Input paths may be written fixture:<file> to use a bundled example "
               "(e.g. fixture:fig5.date). RESIDUA_LIMIT overrides resource caps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute a residual property and silenced instrumentation points")
    p.add_argument("--date", required=True)
    p.add_argument("--program", action="append", help="program model (.prog); repeat to iterate level 2")
    p.add_argument("--level", type=int, choices=(0, 1, 2), default=2)
    p.add_argument("--fixpoint", action="store_true", help="repeat level 2 on each model until stable")
    p.add_argument("--out-date")
    p.add_argument("--out-silenced")
    p.add_argument("--out-report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("monitor", help="monitor a parametrised trace")
    p.add_argument("--date", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--program", action="append", help="take must-aliases from this model")
    p.add_argument("--silenced")
    p.add_argument("--halt-on-violation", action="store_true")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("equiv", help="bounded verdict-equivalence check on a program model")
    p.add_argument("--date", required=True)
    p.add_argument("--program", action="append")
    p.add_argument("--residual", help="candidate DATE; computed with --level when omitted")
    p.add_argument("--silenced", help="pairs dropped on the residual side")
    p.add_argument("--level", type=int, choices=(0, 1, 2), default=2)
    p.add_argument("--fixpoint", action="store_true")
    p.add_argument("--bound", type=int, default=6)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("bench", help="transaction benchmark over all analysis levels")
    p.add_argument("--users", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--mix", type=_parse_mix, default=(1 / 3, 1 / 3, 1 / 3),
                   help="bronze,silver,gold proportions")
    p.add_argument("--level", choices=LEVELS, default="2", help="highest level to run")
    p.add_argument("--out-csv")
    p.add_argument("--out-plot", help="PNG file for the summary figure")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except ResourceLimit as err:
        print(f"residua: resource limit: {err}", file=sys.stderr)
        return EXIT_LIMIT
    except (ResiduaError, OSError, ValueError) as err:
        print(f"residua: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
