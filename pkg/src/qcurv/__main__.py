import argparse
import logging
import pathlib
import sys
from pprint import pprint
from typing import List, Optional

from . import errors, utils
from .harness import commands, config as config_

LOGGER = logging.getLogger("qcurv")


def _add_handler(quiet: bool) -> logging.Handler:
    ch = logging.StreamHandler(sys.stdout)
    ch.setFormatter(
        logging.Formatter("%(asctime)s | %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
    )
    level = logging.WARNING if quiet else logging.INFO
    ch.setLevel(level)
    LOGGER.addHandler(ch)
    LOGGER.setLevel(level)
    return ch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcurv",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="command line interface for qcurv",
    )
    subparsers = parser.add_subparsers(dest="subcommand")
    for name in commands.command_registry.get_all():
        func = commands.command_registry.get(name)
        sub = subparsers.add_parser(
            name,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
            help=(func.__doc__ or name).strip().splitlines()[0],
        )
        sub.add_argument(
            "--config",
            type=pathlib.Path,
            required=True,
            help="path to the run configuration file",
        )
        sub.add_argument(
            "--out",
            type=pathlib.Path,
            required=False,
            help="output directory; overrides `out` in the [run] section",
        )
        sub.add_argument(
            "--seed",
            type=int,
            required=False,
            help="random seed; overrides `seed` in the [run] section",
        )
        sub.add_argument(
            "--quiet",
            default=False,
            action="store_true",
            help="only log warnings and errors, and hide progress bars",
        )
    subparsers.add_parser(
        "info",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="get basic information about the installation",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    if args["subcommand"] is None:
        parser.print_help()
        return commands.EXIT_CONFIG
    if args["subcommand"] == "info":
        pprint(utils.get_config())
        return commands.EXIT_SUCCESS

    ch = _add_handler(args["quiet"])
    try:
        try:
            cfg = config_.read_config(args["config"], command=args["subcommand"])
        except errors.ConfigurationError as e:
            for problem in e.errors:
                LOGGER.error(problem)
            return commands.EXIT_CONFIG
        changes = {
            key: args[key] for key in ("out", "seed") if args.get(key) is not None
        }
        if changes:
            cfg = cfg.replace(**changes)
        return commands.run_command(
            args["subcommand"], cfg, progress=not args["quiet"]
        )
    finally:
        LOGGER.removeHandler(ch)


if __name__ == "__main__":
    sys.exit(main())
