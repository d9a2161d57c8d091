import argparse
import importlib
import sys
from collections.abc import Callable, Sequence
from typing import NoReturn, Protocol, runtime_checkable

from ._version import __version__
from .domain import MOEvalException
from .log import logger, set_log_level
from .tools import __all__ as cli_tools

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


@runtime_checkable
class CLIModuleProtocol(Protocol):
    add_parser_args: Callable[[argparse.ArgumentParser], None] | None
    main: Callable[[argparse.Namespace], None]
    __doc__: str | None


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1; status 2 is kept for data errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def get_cli_modules() -> dict[str, CLIModuleProtocol]:
    cli_modules: dict[str, CLIModuleProtocol] = {}
    for command in cli_tools:
        try:
            cli_module = importlib.import_module(f".tools.{command}", package="moeval")
            if not isinstance(cli_module, CLIModuleProtocol):
                logger.warning(
                    f"Module {command} does not conform to CLIModuleProtocol. Skipping."
                )
                continue
            cli_modules[command] = cli_module
        except Exception:
            logger.error(
                f"Failed to import CLI module for command: {command}", exc_info=True
            )
    return cli_modules


def create_cli_module_subparsers(
    parser: argparse.ArgumentParser, cli_modules: dict[str, CLIModuleProtocol]
):
    subparsers = parser.add_subparsers(
        dest="command", help="Available commands", required=True
    )
    for command in cli_modules.keys():
        logger.debug(f"Adding CLI subcommand: {command}")

        doc = getattr(cli_modules[command], "__doc__", None)
        cli_module_parser = subparsers.add_parser(
            command,
            help=doc.strip() if doc else f"{command} command",
            description=doc,
        )

        if hasattr(cli_modules[command], "add_parser_args"):
            add_parser_args_fn = cli_modules[command].add_parser_args
            if callable(add_parser_args_fn):
                add_parser_args_fn(cli_module_parser)
        else:
            logger.debug(f"No add_parser_args function found for command: {command}")


def build_parser(cli_modules: dict[str, CLIModuleProtocol]) -> ArgumentParser:
    parser = ArgumentParser(
        prog="moeval",
        description="Multi-objective model evaluation: Pareto fronts, trade-off "
        "curves and leaderboards.",
    )
    parser.add_argument("--version", action="version", version=f"moeval {__version__}")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="INFO",
        help="Diagnostics verbosity on stderr.",
    )
    create_cli_module_subparsers(parser, cli_modules)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    cli_modules = get_cli_modules()
    parser = build_parser(cli_modules)
    args = parser.parse_args(argv)
    set_log_level(args.log_level)

    if not hasattr(cli_modules[args.command], "main"):
        logger.error(f"No main function found for command: {args.command}")
        return EXIT_USAGE
    try:
        cli_modules[args.command].main(args)
    except MOEvalException as err:
        logger.error(str(err))
        return EXIT_DATA
    except OSError as err:
        logger.error(f"Cannot access '{err.filename}': {err.strerror}")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
