"""
entwit - entanglement-structure witnesses for graph states

Flow:
1. Command Line Interface
   - 'bounds' command: partition constants c_min/c_max/c_m and witness constants
   - 'simulate' command: sampled k-setting experiment plus a witness verdict
   - 'verify' command: dense-simulation checks of the rank formulas and constants
   - 'intactness' command: m-separability scan under white noise

2. Inputs
   - Graphs from the builder mini-language ("chain:6", "lattice:5x5") or JSON
   - Partitions as block labels ("0,1,1,2,2,2") or JSON
   - Colorings chosen automatically (bipartite or exact chromatic) or given per vertex

3. Computation
   - Cut entropies as GF(2) ranks of adjacency blocks
   - Closed-form c_m for chain, lattice and GHZ-type graphs, exhaustive search otherwise
   - Stabilizer-tableau sampling for large graphs, dense Born sampling for small ones

4. Output
   - Rich tables on the console
   - JSON or CSV files under a file lock, schema-tagged and free of timestamps
   - One plain-text log record per command under ENTWIT_LOG_DIR

Exit codes: 0 success, 1 failed verification, 2 invalid input or configuration.
"""

import argparse
import sys
from typing import List, Optional

from rich.console import Console

from .cli import bounds_command, build_run_config, intactness_command, simulate_command, verify_command
from .cli.common import COLORING_MODES, FORMATS, parse_noise
from .exceptions import EntwitError
from .utils.logging import log_run, setup_run_logging
from .witness import WitnessKind

console = Console(stderr=True)


def _shared_options() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS, help="Show debug logging")
    shared.add_argument("--graph", "-g", required=True, help='Builder string ("chain:6", "lattice:5x5") or JSON path')
    shared.add_argument("--partition", "-p", help='Block labels ("0,1,1,2"), JSON object or JSON path')
    shared.add_argument(
        "--coloring",
        default="auto",
        help=f"One of {', '.join(COLORING_MODES)} or a comma-separated color per vertex",
    )
    shared.add_argument("--k-max", type=int, default=8, help="Largest number of color classes to try")
    shared.add_argument("--kind", choices=[k.value for k in WitnessKind], help="Witness to build")
    shared.add_argument("--m", type=int, help="Block count for m-separability")
    shared.add_argument("--noise", type=parse_noise, default=parse_noise("0"), help="White-noise weight p")
    shared.add_argument("--shots", type=int, help="Shots per setting (default ENTWIT_SHOTS)")
    shared.add_argument("--seed", type=int, help="Seed for reproducible sampling")
    shared.add_argument("--out", "-o", help="Output file")
    shared.add_argument("--format", default="json", choices=FORMATS, help="Output file format")
    shared.add_argument("--z-threshold", type=float, help="Detection threshold in standard errors")
    shared.add_argument("--dense-gate", type=int, help="Largest n for dense simulation")
    shared.add_argument("--enum-gate", type=int, help="Largest n for exhaustive partition search")
    shared.add_argument("--override-gate", action="store_true", help="Allow enumeration past the gate")
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entwit", description="Entanglement-structure witnesses for graph states")

    # Add global verbose flag that will be inherited by subcommands
    parser.add_argument("--verbose", "-v", action="store_true", help="Show debug logging")
    subparsers = parser.add_subparsers(dest="command")
    shared = _shared_options()

    parser_bounds = subparsers.add_parser("bounds", parents=[shared], help="Compute partition and witness constants")
    parser_bounds.add_argument("--keep", help="Comma-separated blocks kept for a subsystem witness")
    parser_bounds.set_defaults(func=bounds_command)

    parser_simulate = subparsers.add_parser("simulate", parents=[shared], help="Sample the settings and test a witness")
    parser_simulate.add_argument("--keep", help="Comma-separated blocks kept for a subsystem witness")
    parser_simulate.add_argument(
        "--correct-byproducts",
        action="store_true",
        help="Use the Z outcomes of dropped neighbors when evaluating a subsystem witness",
    )
    parser_simulate.set_defaults(func=simulate_command)

    parser_verify = subparsers.add_parser("verify", parents=[shared], help="Check constants against dense simulation")
    parser_verify.add_argument("--corrupt-constant", action="store_true", help=argparse.SUPPRESS)
    parser_verify.set_defaults(func=verify_command)

    parser_intactness = subparsers.add_parser(
        "intactness", parents=[shared], help="Bound the entanglement intactness"
    )
    parser_intactness.add_argument("--sampled", action="store_true", help="Use sampled instead of exact expectations")
    parser_intactness.add_argument("--full", action="store_true", help="Evaluate every m instead of stopping early")
    parser_intactness.set_defaults(func=intactness_command)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0

    try:
        logger = setup_run_logging(verbose=args.verbose)
        config = build_run_config(args)
    except EntwitError as e:
        console.print(f"[red]Error: {e.message}[/red]")
        return 2

    try:
        code = args.func(config)
    except EntwitError as e:
        console.print(f"[red]Error: {e.message}[/red]")
        log_run(logger, args.command, config.log_fields(), error=e)
        return 2
    log_run(logger, args.command, config.log_fields(), {"exit_code": code})
    return code


if __name__ == "__main__":
    sys.exit(main())
