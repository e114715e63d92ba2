"""Command-line entry point.

Exit codes: 0 success, 1 oracle mismatch or protocol failure, 2 bad
configuration, 3 a numerical iteration (quadrature or eigensolver) did not
converge.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, QuadratureConvergenceError, UDWError
from .scenario import load_scenario, preset_names, preset_text, parse_scenario

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="udwghost", description="Ghost imaging with delta-coupled detectors in an SPDC field state.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_cmd(name, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument("scenario", help="preset name or path to a .toml scenario file")
        c.add_argument("--theta", type=float, help="override spdc.theta")
        c.add_argument("--beta-scale", type=float, help="override spdc.beta_scale")
        c.add_argument("--radial-nodes", type=int, help="override quadrature.radial_nodes")
        c.add_argument("--out", help="output directory (default: print CSV to stdout)")
        c.add_argument("--plot", action="store_true", help="also write an SVG contrast plot (needs --out)")
        return c

    scenario_cmd("run", "evaluate a scenario at its register tau")
    sw = scenario_cmd("sweep", "evaluate a scenario at every tau in its sweep list")
    sw.add_argument("--workers", type=_positive_int, default=1, help="parallel processes (default 1)")

    sub.add_parser("oracle-check", help="compare the pipeline against independent oracles")
    pr = sub.add_parser("presets", help="inspect the bundled scenarios")
    pr_sub = pr.add_subparsers(dest="action", required=True, parser_class=_Parser)
    pr_sub.add_parser("list", help="list preset names")
    show = pr_sub.add_parser("show", help="print a preset's TOML")
    show.add_argument("name")
    return p


def _scenario(args):
    s = load_scenario(args.scenario)
    return s.with_overrides(theta=args.theta, beta_scale=args.beta_scale, radial_nodes=args.radial_nodes)


def _report(rows, s, args):
    from .runner import emit_report, format_csv

    out = args.out or s.output.dir
    if out is None:
        if args.plot:
            raise ConfigError("--plot needs an output directory (--out or output.dir)")
        sys.stdout.write(format_csv(rows))
        return
    for path in emit_report(rows, s, out, plot=args.plot):
        print(path)


def _dispatch(args) -> int:
    if args.command == "presets":
        if args.action == "list":
            for name in preset_names():
                s = parse_scenario(preset_text(name), name)
                print(f"{name}\t{s.description}")
        else:
            sys.stdout.write(preset_text(args.name))
        return EXIT_OK

    if args.command == "oracle-check":
        from .oracles import run_oracle_suite

        reports = run_oracle_suite()
        for r in reports:
            print(r.line())
        return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL

    from .runner import run_single, run_sweep

    s = _scenario(args)
    rows = [run_single(s)] if args.command == "run" else run_sweep(s, workers=args.workers)
    _report(rows, s, args)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        for k, v in sorted(exc.diagnostics.items()):
            print(f"  {k} = {v}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except UDWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ArithmeticError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
