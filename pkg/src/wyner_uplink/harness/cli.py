"""``wyner-uplink`` command line.

Exit codes: 0 success, 1 invariant violation, 2 configuration error,
3 numerical failure.
"""

import argparse
import logging
import sys
from dataclasses import replace

from ..channel import ChannelProfile
from ..errors import ConfigError, RateError
from ..power_control import SCHEMES
from .io import emit_csv, emit_gnuplot, load_config, parse_validate
from .selftest import run_selftest
from .sweep import PRESETS, SweepSpec, check_orderings, preset, run_sweep

log = logging.getLogger("wyner_uplink")

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_output_flags(p):
    p.add_argument("--output", "-o", help="CSV destination (default: stdout)")
    p.add_argument("--gnuplot", help="also write gnuplot data blocks to this path")
    p.add_argument("--validate", metavar="M,TRIALS,SEED", help="run the Monte Carlo oracle")
    p.add_argument("--workers", type=int, default=1, help="grid points evaluated concurrently")


def build_parser():
    parser = _Parser(prog="wyner-uplink", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    rate = sub.add_parser("rate", help="evaluate a single operating point")
    rate.add_argument("--alpha0", type=complex, default=1.0)
    rate.add_argument("--alpha1", type=complex, default=0.5)
    rate.add_argument("--taps", help="comma-separated taps alpha_{-l1}..alpha_{l2}; overrides alpha0/alpha1")
    rate.add_argument("--l1", type=int, default=0, help="number of taps left of the own cell when using --taps")
    rate.add_argument("--scheme", choices=[s.lower() for s in SCHEMES], action="append",
                      help="repeatable; default all schemes")
    rate.add_argument("--K", type=int, default=5)
    rate.add_argument("--q", type=float, default=0.3)
    rate.add_argument("--power-db", type=float, default=5.0)
    rate.add_argument("--processing", choices=["mcp", "scp", "both"], default="both")
    rate.add_argument("--per-active-user", action="store_true")
    _add_output_flags(rate)

    sweep = sub.add_parser("sweep", help="run a sweep described by a config file")
    sweep.add_argument("--config", required=True)
    _add_output_flags(sweep)

    for name in PRESETS:
        fig = sub.add_parser(name, help=f"reproduce the {name} parameter sweep")
        _add_output_flags(fig)

    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


def _rate_spec(args):
    if args.taps:
        try:
            taps = tuple(complex(t.strip()) for t in args.taps.split(","))
            profile = ChannelProfile(args.l1, len(taps) - args.l1 - 1, taps)
        except ValueError as exc:
            raise ConfigError(f"--taps: {exc}") from None
    else:
        try:
            profile = ChannelProfile.sho(args.alpha0, args.alpha1)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    processing = ("MCP", "SCP") if args.processing == "both" else (args.processing.upper(),)
    return SweepSpec(
        "power_db",
        (args.power_db,),
        profile,
        K=args.K,
        q=args.q,
        power_db=args.power_db,
        schemes=tuple(s.upper() for s in args.scheme) if args.scheme else SCHEMES,
        processing=processing,
        per_active_user=args.per_active_user,
    )


def _spec_from_args(args):
    if args.command == "rate":
        spec = _rate_spec(args)
    elif args.command == "sweep":
        spec = load_config(args.config)
    else:
        spec = preset(args.command)
    overrides = {}
    if args.validate:
        overrides["validate"] = parse_validate(args.validate)
    if args.workers != 1:
        overrides["workers"] = args.workers
    return replace(spec, **overrides) if overrides else spec


def _write_outputs(result, args):
    if args.output:
        emit_csv(result, args.output)
    else:
        emit_csv(result, sys.stdout)
    if args.gnuplot:
        emit_gnuplot(result, args.gnuplot)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.command == "selftest":
        return EXIT_INVARIANT if run_selftest(sys.stdout) else EXIT_OK

    try:
        spec = _spec_from_args(args)
        result = run_sweep(spec)
        _write_outputs(result, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RateError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    failed = result.failed()
    if failed:
        for row in failed:
            print(f"failed row {row.sweep_param}={row.sweep_value} {row.processing}-{row.scheme}: "
                  f"{row.error}", file=sys.stderr)
        return EXIT_NUMERIC
    problems = check_orderings(result)
    if problems:
        print("invariant violations:", file=sys.stderr)
        for line in problems:
            print(f"  {line}", file=sys.stderr)
        print("rows:", file=sys.stderr)
        emit_csv(result, sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
