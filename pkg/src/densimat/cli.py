"""Command line entry point: run, list and check-all."""
import argparse
import fnmatch
import json
import os
import sys
from pathlib import Path

from .errors import ConfigError, NumericalDivergence
from .io import format_float
from .scenarios import REGISTRY, default_config, list_scenarios, load_config, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3
DEFAULT_OUT = "out"
TIMING_NAME = "timing.json"


def resolve_out(flag, cfg=None):
    """--out wins, then DENSIMAT_OUT, then the config's output, then ./out."""
    if flag:
        return Path(flag)
    env = os.environ.get("DENSIMAT_OUT")
    if env:
        return Path(env)
    if cfg is not None and cfg.output:
        return Path(cfg.output)
    return Path(DEFAULT_OUT)


def _print_report(report, stream):
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} {report.scenario} ({report.wall_clock:.2f} s)", file=stream)
    for c in report.checks:
        mark = "ok  " if c.passed else "FAIL"
        exp = "" if c.expected is None else f" expected {format_float(c.expected)}"
        print(f"  {mark} {c.name}: {format_float(c.value)}{exp} limit {format_float(c.limit)}",
              file=stream)


def _execute(cfg, args, out, timings):
    try:
        report = run_scenario(cfg, out, args.tolerance_scale, args.dump_fields or None)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDivergence as exc:
        print(f"numerical divergence in {cfg.scenario}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    _print_report(report, sys.stdout)
    timings[cfg.scenario] = round(report.wall_clock, 3)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _write_timings(out, timings):
    if timings:
        out.mkdir(parents=True, exist_ok=True)
        (out / TIMING_NAME).write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")


def cmd_list(args):
    width = max(len(n) for n in REGISTRY)
    for name, desc in list_scenarios():
        print(f"{name:<{width}}  {desc}")
    return EXIT_PASS


def cmd_run(args):
    try:
        if not Path(args.config).exists() and args.config in REGISTRY:
            cfg = default_config(args.config)
        else:
            cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = resolve_out(args.out, cfg)
    timings = {}
    code = _execute(cfg, args, out, timings)
    _write_timings(out, timings)
    return code


def cmd_check_all(args):
    names = [n for n in REGISTRY if fnmatch.fnmatchcase(n, args.filter)]
    if not names:
        print(f"config error: no scenario matches {args.filter!r}", file=sys.stderr)
        return EXIT_CONFIG
    out = resolve_out(args.out)
    timings, codes = {}, []
    for name in names:
        codes.append(_execute(default_config(name), args, out, timings))
    _write_timings(out, timings)
    passed = sum(c == EXIT_PASS for c in codes)
    print(f"{passed}/{len(codes)} scenarios passed")
    return max(codes)


def build_parser():
    p = argparse.ArgumentParser(prog="densimat", description="Density-matrix field scenarios.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output directory (overrides DENSIMAT_OUT)")
        sp.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiply every tolerance by this factor")
        sp.add_argument("--dump-fields", action="store_true", help="write DMF1 field dumps")

    sp = sub.add_parser("run", help="run one scenario from a JSON config")
    sp.add_argument("config", help="path to a JSON config, or a scenario name for its defaults")
    common(sp)
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("list", help="list registered scenarios")
    sp.set_defaults(func=cmd_list)
    sp = sub.add_parser("check-all", help="run every scenario with default parameters")
    sp.add_argument("--filter", default="*", help="glob on scenario names")
    common(sp)
    sp.set_defaults(func=cmd_check_all)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    if getattr(args, "tolerance_scale", 1.0) <= 0:
        print("config error: --tolerance-scale must be positive", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
