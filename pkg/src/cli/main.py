"""
soliton-forge command line
==========================

Usage:
    python -m src.cli.main check 'two(-1,-1/2,1/2,1)' --ops airy,heat,T --expect T=zero
    python -m src.cli.main classify 'resonant(k=[-3/10,0,1/2],a=[1,1,1])'
    python -m src.cli.main reconstruct 'preset(resonant_4)' --M 4
    python -m src.cli.main grid 'line(1,1,-1/2,1)' --profile log --out fig1_left.csv
    python -m src.cli.main sweep 'line(1,1,{k1},1)' --param k1=-2,-1/2,0 --format csv
    python -m src.cli.main selftest --seed 7

The JSON report goes to stdout, or to --out for every command but grid,
where --out names the CSV file. Log messages go to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.cli.commands import (
    EXIT_USAGE,
    CommandResult,
    UsageError,
    cmd_check,
    cmd_classify,
    cmd_grid,
    cmd_reconstruct,
    cmd_sweep,
)
from src.cli.dsl import DSLSemanticError, DSLSyntaxError
from src.cli.selftest import run_selftest
from src.numeric.grids import DEFAULT_STEP
from src.phases.sampling import SEED_ENV_VAR, resolve_seed

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors share one exit path."""

    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG on stderr')
    common.add_argument('--pretty', action='store_true', help='Indent the JSON report')
    common.add_argument('--out', type=str, default=None, help='Write the report (grid: the CSV) to this path')
    common.add_argument('--seed', type=int, default=None, help=f'Random seed (default: ${SEED_ENV_VAR} or built-in)')

    parser = ArgumentParser(prog='soliton-forge', description='Exact KP-II soliton phase checks')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    check = sub.add_parser('check', parents=[common], help='Apply cleared operators to a phase')
    check.add_argument('expr', help='Phase expression')
    check.add_argument('--ops', type=str, default=None, help='Comma-separated operator names')
    check.add_argument('--expect', action='append', default=None, help='name=zero|nonzero (repeatable)')

    classify = sub.add_parser('classify', parents=[common], help='Classification report of a KP phase')
    classify.add_argument('expr', help='Phase expression')
    classify.add_argument('--expect', action='append', default=None, help='flag=value, e.g. resonant_M=3')

    reconstruct = sub.add_parser('reconstruct', parents=[common], help='Recover phase parameters')
    reconstruct.add_argument('expr', help='Phase expression')
    reconstruct.add_argument('--M', dest='m', type=int, default=None, help='Number of exponentials')
    reconstruct.add_argument('--family', choices=['resonant', 'two_soliton'], default='resonant')

    grid = sub.add_parser('grid', parents=[common], help='Sample u on a grid')
    grid.add_argument('expr', help='Phase expression')
    grid.add_argument('--profile', choices=['log', 'arctan2'], default='log')
    grid.add_argument('--grid', type=str, default=None, help='xmin,xmax,nx,ymin,ymax,ny')
    grid.add_argument('--t0', type=float, default=0.0, help='Time slice for KP phases')
    grid.add_argument('--residual', action='store_true', help='Check the finite-difference PDE residual')
    grid.add_argument('--h', type=float, default=DEFAULT_STEP, help='Finite-difference step')
    grid.add_argument('--tol', type=float, default=None, help='Residual tolerance (default: calibrated)')
    grid.add_argument('--expect-max', type=float, default=None, help='Expected max of u')
    grid.add_argument('--atol', type=float, default=1e-9, help='Absolute tolerance for --expect-max')

    sweep = sub.add_parser('sweep', parents=[common], help='Run a template over parameter grids')
    sweep.add_argument('template', help='Phase expression with {name} placeholders')
    sweep.add_argument('--param', action='append', default=None, help='name=v1,v2,... (repeatable)')
    sweep.add_argument('--ops', type=str, default=None, help='Comma-separated operator names')
    sweep.add_argument('--format', dest='fmt', choices=['json', 'csv'], default='json')

    selftest = sub.add_parser('selftest', parents=[common], help='Run the acceptance suite')
    selftest.add_argument('--quick', action='store_true', help='Smaller random samples')
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def dispatch(args: argparse.Namespace) -> CommandResult:
    if args.command == 'selftest':
        return run_selftest(args.seed, args.quick)
    result = _run_command(args)
    # exact commands draw nothing at random; the resolved seed is still echoed
    result.report['invocation']['seed'] = resolve_seed(args.seed)
    return result


def _run_command(args: argparse.Namespace) -> CommandResult:
    if args.command == 'check':
        return cmd_check(args.expr, args.ops, args.expect)
    if args.command == 'classify':
        return cmd_classify(args.expr, args.expect)
    if args.command == 'reconstruct':
        return cmd_reconstruct(args.expr, args.m, args.family)
    if args.command == 'grid':
        return cmd_grid(
            args.expr, profile=args.profile, grid=args.grid, out=args.out, t0=args.t0,
            residual=args.residual, h=args.h, tol=args.tol, expect_max=args.expect_max, atol=args.atol,
        )
    if args.command == 'sweep':
        return cmd_sweep(args.template, args.param, args.ops, args.fmt)
    raise UsageError(f"Unknown command '{args.command}'")


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f'usage error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose)

    try:
        result = dispatch(args)
    except (UsageError, DSLSyntaxError, DSLSemanticError, OSError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_USAGE

    output = result.render(pretty=args.pretty)
    if args.out and args.command != 'grid':
        try:
            text = output if output.endswith('\n') else output + '\n'
            Path(args.out).write_text(text, encoding='utf-8')
        except OSError as exc:
            print(f"error: cannot write '{args.out}': {exc.strerror or exc}", file=sys.stderr)
            return EXIT_USAGE
        logger.info("Wrote report to %s", args.out)
    else:
        sys.stdout.write(output if output.endswith('\n') else output + '\n')
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
