"""CLI entry point."""

import argparse
import logging
import sys
from typing import Optional, Sequence

from rich.logging import RichHandler

from . import __version__
from .config import load_profile
from .errors import StegoError, exit_code_for
from .handlers import Handlers
from .parser import ParsedCommand
from .registry import COMMANDS, COMMON_FLAGS, CommandRegistry
from .render import err_console, print_error, render_result
from .shell import StegoShell


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per registry command plus 'shell'."""
    parser = argparse.ArgumentParser(
        prog="nerf-stego",
        description="Hide messages behind a secret viewpoint of a neural radiance field",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")

    common = argparse.ArgumentParser(add_help=False)
    for flag in COMMON_FLAGS:
        common.add_argument(flag.option, dest=flag.name, type=flag.type, choices=flag.choices,
                            default=None, help=flag.help)

    commands = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name, (description, flags) in COMMANDS.items():
        sub = commands.add_parser(name, parents=[common], help=description.split(":")[0],
                                  description=description)
        for flag in flags:
            sub.add_argument(flag.option, dest=flag.name, type=flag.type, choices=flag.choices,
                             required=flag.required, default=None, help=flag.help)
    commands.add_parser("shell", parents=[common], help="Interactive shell")
    return parser


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Route nerf_stego log records through one RichHandler on stderr."""
    logger = logging.getLogger("nerf_stego")
    logger.handlers.clear()
    handler = RichHandler(console=err_console, show_path=False, show_time=verbose)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)
    logger.propagate = False


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command line.

    Returns:
        0 on success, 2 on usage errors, 1 on any other failure, 130 on Ctrl+C
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.verbose, args.quiet)
    try:
        profile = load_profile(args.profile or "desk", args.config)
        handlers = Handlers(profile, seed=args.seed or 0, workers=args.workers or 1)
        registry = CommandRegistry(handlers)

        if args.command == "shell":
            StegoShell(registry).run()
            return 0

        kwargs = {
            key: value for key, value in vars(args).items()
            if key not in ("command", "verbose", "quiet")
        }
        result = registry.execute(ParsedCommand(command=args.command, kwargs=kwargs))
        render_result(result)
        return 0

    except StegoError as e:
        print_error(str(e))
        return exit_code_for(e)
    except KeyboardInterrupt:
        err_console.print("\nInterrupted")
        return 130
    except Exception as e:
        print_error(f"Fatal error: {e}")
        return 1


def main():
    """Main entry point for nerf-stego."""
    sys.exit(run())


if __name__ == "__main__":
    main()
