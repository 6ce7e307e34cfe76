#!/usr/bin/env python3
"""
CLI Main Entry Point for the concentra verification lab.

Subcommands:
    verify-cube  exhaustive checks of the cube inequalities
    graph        cycle statistics and degree buckets of one graph
    mc           seeded Monte Carlo over G(n, p)

Exit codes: 0 success, 1 runtime error or violation found,
2 precondition or guard refusal.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src import __version__
from src.cli.commands import CLICommands
from src.utils.config import ENV_PREFIX, LabConfig, load_lab_config
from src.utils.exceptions import ConcentraException, ValidationError
from src.utils.logging_config import setup_logging

EXIT_FAILURE = 1


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability in [0, 1]")
    return value


def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Master seed (64-bit unsigned)")
    common.add_argument(
        "--threads",
        type=int,
        help=f"Worker processes; defaults to ${ENV_PREFIX}THREADS or 1. Never changes results",
    )
    common.add_argument("--out", type=str, help="Output file path")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="Output format")
    common.add_argument("--config", type=str, help="JSON config file (flags take precedence)")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    common.add_argument("--quiet", "-q", action="store_true", help="Only log warnings and errors")
    return common


def create_parser() -> argparse.ArgumentParser:
    """
    Create and configure the argument parser for CLI.

    Returns:
        Configured ArgumentParser instance
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="concentra",
        description="Exhaustive and Monte Carlo checks of concentration bounds on the Boolean cube and G(n, p)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s verify-cube                         # default sweep, m <= 8
  %(prog)s verify-cube --table f.json          # check one tabulated function
  %(prog)s graph --n 4 --p 1 --k 3             # K_4: Z=4 V=24 W=6
  %(prog)s graph --edge-list g.txt --p 0.3     # statistics of a stored graph
  %(prog)s mc --n 200 --np 30 --k 3 --trials 1000 --format csv --out mc.csv
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="{verify-cube,graph,mc}")
    subparsers.required = True

    cube = subparsers.add_parser("verify-cube", parents=[common], help="Exhaustive cube inequality suites")
    cube.add_argument("--m-max", type=int, default=8, help="Largest cube dimension of the sweep (default 8)")
    cube.add_argument(
        "--p", type=_probability, nargs="+", default=[0.1, 0.5, 0.9], help="Product-measure probabilities"
    )
    cube.add_argument("--functions", type=int, default=3, help="Random functions per (m, p)")
    cube.add_argument("--function", type=str, help="JSON multilinear function {m, terms} to check instead")
    cube.add_argument("--table", type=str, help="JSON value table {m, values} to check instead")
    cube.add_argument(
        "--allow-nonmonotone",
        action="store_true",
        help="Run the checks that do not need monotonicity instead of refusing",
    )
    cube.set_defaults(handler="verify_cube")

    graph = subparsers.add_parser("graph", parents=[common], help="Cycle statistics of one graph")
    graph.add_argument("--n", type=int, help="Vertex count of the sampled graph")
    graph.add_argument("--p", type=_probability, help="Edge probability")
    graph.add_argument("--k", type=int, default=3, help="Cycle length (default 3)")
    graph.add_argument("--edge-list", type=str, help="Read the graph from an edge-list file")
    graph.add_argument("--write-edges", type=str, help="Write the graph as an edge list")
    graph.add_argument("--write-cycles", type=str, help="Write the canonical k-cycles, one per line")
    graph.add_argument("--lemmas", action="store_true", help="Also estimate the two degree-lemma frequencies")
    graph.add_argument("--trials", type=int, default=100, help="Trials for --lemmas (default 100)")
    graph.add_argument("--c", type=float, dest="c_constant", default=1.0, help="Constant C of the bucket bound")
    graph.set_defaults(handler="graph")

    mc = subparsers.add_parser("mc", parents=[common], help="Monte Carlo over G(n, p)")
    mc.add_argument("--n", type=int, help="Vertex count")
    scale = mc.add_mutually_exclusive_group()
    scale.add_argument("--p", type=_probability, help="Edge probability")
    scale.add_argument("--np", type=float, dest="np_value", help="Mean degree np (p = np / n)")
    mc.add_argument("--k", type=int, help="Cycle length")
    mc.add_argument("--trials", type=int, help="Number of trials")
    mc.add_argument("--c", type=float, dest="c_constant", help="Constant C (default 1)")
    mc.add_argument("--epsilon", type=float, help="Epsilon of the median-to-mean step (default 0.1)")
    mc.add_argument("--t2-variant", choices=["stated", "proof"], help="Denominator of the local-variance ratio")
    mc.add_argument("--no-w", action="store_true", help="Skip the shared-edge pair count W for k > 3")
    mc.add_argument("--record-timings", action="store_true", help="Store per-trial wall time (breaks byte identity)")
    mc.set_defaults(handler="mc")

    return parser


def validate_arguments(args: argparse.Namespace) -> None:
    """
    Validate command line arguments.

    Raises:
        ValidationError: If arguments are inconsistent
    """
    if args.quiet and args.verbose:
        raise ValidationError("Cannot specify both --quiet and --verbose", "quiet")
    if args.threads is not None and args.threads < 1:
        raise ValidationError("--threads must be at least 1", "threads", args.threads)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise ValidationError("--seed must be a 64-bit unsigned integer", "seed", args.seed)
    if args.command == "verify-cube" and args.function and args.table:
        raise ValidationError("Give at most one of --function and --table", "function")


def build_config(args: argparse.Namespace) -> LabConfig:
    """Environment, then the --config file, then flags."""
    config = load_lab_config()
    if args.config:
        config = LabConfig.load_from_file(args.config, base=config)
    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else config.log_level
    threads = args.threads if args.threads is not None else config.threads
    return dataclasses.replace(config, log_level=level, threads=threads)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for CLI application.

    Returns:
        Exit code (0 success, 1 failure, 2 refusal)
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    try:
        validate_arguments(args)
        config = build_config(args)
        setup_logging(config)
        commands = CLICommands(config, quiet=args.quiet)
        return getattr(commands, args.handler)(args)

    except KeyboardInterrupt:
        print("\nInterrupted.", file=sys.stderr)
        return 130
    except ConcentraException as e:
        logging.getLogger(__name__).debug("Command failed", extra={"error_code": e.error_code})
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger = logging.getLogger(__name__)
        logger.error(f"Unexpected error: {e}", exc_info=True)
        print("An unexpected error occurred. Use --verbose for details.", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
