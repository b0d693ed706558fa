"""Command-line entry point.

Usage:
    gme-witness bound --config run.json
    gme-witness simulate --config run.json --source.eta 0.3 --out results/
    gme-witness sample --config run.json --trials.n 1000000
    gme-witness pvalue --config table.json
    gme-witness pvalue --config run.json --trials results/result.json
    gme-witness scan-n --config run.json --csv

Any config key can be overridden with ``--dotted.path value``. Exit codes:
0 success, 1 invalid configuration or arguments, 2 dimension guard hit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from gmewitness.__version__ import __version__
from gmewitness.cli.commands import COMMANDS
from gmewitness.cli.config import dump_config, load_config
from gmewitness.cli.display import show_rows, show_summary
from gmewitness.cli.output import build_document, write_outputs
from gmewitness.errors import ConfigValidationError, DimensionGuardError, WitnessError
from gmewitness.utils.logging import (
    add_file_sink,
    configure_logger,
    get_logger,
    remove_file_sinks,
)

logger = get_logger("gmewitness.cli.main")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_GUARD = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Parser that reports usage errors as configuration errors (exit 1)."""

    def error(self, message: str):  # type: ignore[override]
        raise ConfigValidationError("<arguments>", message)


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    common.add_argument("--out", type=Path, default=Path("gme-output"), help="Output directory")
    common.add_argument("--csv", action="store_true", help="Also write curve.csv")
    common.add_argument("--log-level", default=None, help="Console log level")

    parser = _ArgumentParser(
        prog="gme-witness", description=__doc__.splitlines()[0], allow_abbrev=False
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(
            name, parents=[common], help=help_text, description=help_text, allow_abbrev=False
        )
        if name == "pvalue":
            sub.add_argument("--trials", type=Path, default=None, help="result.json of a sample run")
    return parser


def parse_overrides(tokens: list[str]) -> dict[str, str]:
    """Turn ``--a.b value`` / ``--a.b=value`` tokens into a dotted-path mapping."""
    overrides: dict[str, str] = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--") or len(token) == 2:
            raise ConfigValidationError("<arguments>", f"unexpected argument '{token}'")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ConfigValidationError(key, "override is missing a value")
            value = tokens[i + 1]
            i += 2
        overrides[key] = value
    return overrides


def run(argv: list[str] | None = None) -> int:
    """Parse arguments, run one command and write its artifacts; returns the exit code."""
    try:
        parser = build_parser()
        args, extra = parser.parse_known_args(argv)
        if args.log_level:
            configure_logger(args.log_level.upper())
        overrides = parse_overrides(extra)
        if args.csv:
            overrides["output.csv"] = "true"
        config = load_config(args.config, overrides)

        out_dir: Path = args.out
        add_file_sink(out_dir)
        logger.info(f"Running '{args.command}' for N={config.n_parties}")

        command, title = COMMANDS[args.command]
        output = command(config, args)
        document = build_document(args.command, config.dump(), output.result, output.rows)
        write_outputs(out_dir, document, output.rows, config.output.csv)

        show_summary(title, output.result)
        if output.rows:
            show_rows(title, output.rows)
        if args.command == "validate":
            sys.stdout.write(dump_config(config).decode() + "\n")
        return EXIT_OK
    except DimensionGuardError as exc:
        logger.error(f"Dimension guard: {exc}")
        return EXIT_GUARD
    except (WitnessError, ValueError) as exc:
        logger.error(f"Invalid input: {exc}")
        return EXIT_INVALID
    finally:
        remove_file_sinks()


def main() -> int:
    """Console-script entry point."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
