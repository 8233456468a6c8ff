"""Command line front end: one subcommand per suite plus `all`.

Configuration precedence is defaults, then --config file fields, then
explicit flags; the subcommand always decides the suite.  Exit status: 0
when every check passed, 1 when any failed, 2 for configuration or usage
errors (no partial report is written in that case).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .errors import ConfigError
from .harness import SUITES, ExperimentConfig, _jsonable, run_suite

_OVERRIDE_FIELDS = (
    "seed",
    "truncation_order",
    "band",
    "window",
    "rank",
    "grid",
    "ensemble_count",
    "connection_count",
    "connection_band",
    "parameter_modes",
    "loop_samples",
)


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override its fields")
    p.add_argument("--seed", type=int, help="generator seed echoed in the report")
    p.add_argument("--out", metavar="DIR", help="directory for report.json, CSV tables, figures")
    p.add_argument("--json", action="store_true", help="print the report as JSON on stdout")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.add_argument("--truncation-order", type=int, dest="truncation_order", metavar="K")
    p.add_argument("--band", type=int, metavar="F", help="symbol Fourier band half-width")
    p.add_argument("--window", type=int, metavar="J", help="quantization mode window half-width")
    p.add_argument("--rank", type=int, metavar="L", help="fiber rank")
    p.add_argument("--grid", type=int, nargs=2, metavar=("NTHETA", "NPHI"))
    p.add_argument("--ensemble-count", type=int, dest="ensemble_count", metavar="N")
    p.add_argument("--connection-count", type=int, dest="connection_count", metavar="N")
    p.add_argument("--connection-band", type=int, dest="connection_band", metavar="F")
    p.add_argument("--parameter-modes", type=int, dest="parameter_modes", metavar="N")
    p.add_argument("--loop-samples", type=int, dest="loop_samples", metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psido",
        description="Verification suites for the truncated symbol calculus on the circle.",
    )
    sub = parser.add_subparsers(dest="suite", required=True, metavar="SUITE")
    for name in SUITES + ("all",):
        text = "run every suite" if name == "all" else "run the %s suite" % name
        _add_run_arguments(sub.add_parser(name, help=text))
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {"suite": args.suite}
    for name in _OVERRIDE_FIELDS:
        value = getattr(args, name)
        if value is not None:
            overrides[name] = tuple(value) if isinstance(value, list) else value
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.no_figures:
        overrides["emit_figures"] = False
    return dataclasses.replace(config, **overrides)


def _fmt(value) -> str:
    encoded = _jsonable(value)
    if isinstance(encoded, dict) and set(encoded) == {"real", "imag"}:
        return "%.6g%+.6gj" % (encoded["real"], encoded["imag"])
    if isinstance(encoded, float):
        return "%.6g" % encoded
    return str(encoded)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    report = run_suite(config)
    lines = sys.stderr if args.json else sys.stdout
    for check in report.checks:
        print(
            "%s %s: measured %s, expected %s (tolerance %s, %s)"
            % (
                "PASS" if check.passed else "FAIL",
                check.name,
                _fmt(check.measured),
                _fmt(check.expected),
                _fmt(check.tolerance),
                check.provenance,
            ),
            file=lines,
        )
    passed = sum(1 for c in report.checks if c.passed)
    print(
        "suite %s: %d/%d checks passed in %.2fs (seed %d)"
        % (report.suite, passed, len(report.checks), report.duration_seconds, report.seed),
        file=lines,
    )
    if config.out_dir is not None:
        print("outputs written to %s" % config.out_dir, file=lines)
    if args.json:
        payload = {"body": report.body(), "duration_seconds": report.duration_seconds}
        print(json.dumps(payload, sort_keys=True, indent=2))
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
