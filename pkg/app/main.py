"""Command-line entry point."""
import argparse
import logging
import sys
from typing import Dict, List, Optional, Tuple

from app import __version__
from app.commands import compare, complexity, evaluate, evolve, logreg, selection, similarity, synth
from app.commands.common import apply_config, load_config_file
from app.config import settings
from app.exceptions import UQEvoError, UsageError

logger = logging.getLogger(__name__)

COMMANDS = (synth, evolve, evaluate, compare, similarity, complexity, logreg, selection)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """Top-level parser plus the subcommand parsers by name."""
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Evolutionary search for uncertainty-quantification scorers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="TOML file with one table per subcommand")
    parser.add_argument(
        "--log-level", default=settings.log_level,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser, dict(subparsers.choices)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns 0 on success, 1 on runtime errors, 2 on usage errors."""
    argv = sys.argv[1:] if argv is None else argv
    parser, commands = build_parser()
    try:
        preliminary, _ = parser.parse_known_args(argv)
        if preliminary.config:
            apply_config(commands, load_config_file(preliminary.config))
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UQEvoError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
