"""Command-line front end: ``disentsim <scenario> [--config FILE] [key=value ...] [--out DIR]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (trace or
positivity abort), 4 a required steady-state verdict came back undecided.
"""

from __future__ import annotations

import argparse
import sys

from .ode import NumericalFailure
from .scenarios import SCENARIOS, ConfigError, VerdictUndecided, parse_config_file, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_UNDECIDED = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disentsim",
        description="Scenario-driven simulator for nonlinear disentanglement/thermalisation dynamics.",
    )
    parser.add_argument("scenario", choices=sorted(SCENARIOS), help="named scenario to run")
    parser.add_argument("--config", help="key=value file; CLI overrides take precedence")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument(
        "overrides", nargs="*", metavar="key=value", help="individual parameter overrides"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    try:
        overrides: dict[str, str] = {}
        if args.config:
            overrides.update(parse_config_file(args.config))
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"expected key=value, got {item!r}")
            key, value = item.split("=", 1)
            overrides[key.strip()] = value.strip()
        result = run_scenario(args.scenario, overrides, args.out)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VerdictUndecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED

    for note in result.notes:
        print(note)
    for path in result.outputs:
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
