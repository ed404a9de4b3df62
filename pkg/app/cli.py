"""
Command-line surface.

    noether solve <file>      symmetries, charges, expected-integral matches
    noether transform <file>  point transformation and cyclic-coordinate check
    noether verify <file>     numeric drift of the expected integrals

The CLI is a thin layer: it applies flag overrides to the runtime config,
dispatches to a controller and writes the rendered report.
"""
import argparse
import sys
from typing import List, Optional

from app.config import config
from app.constants import DEFAULT_OUTPUT_FORMAT, OUTPUT_FORMATS
from app.controllers import SolveController, TransformController, VerifyController
from app.middleware import handle_errors
from app.utils.logger import logger
from app.utils.responses import get_renderer

CONTROLLERS = {
    'solve': SolveController,
    'transform': TransformController,
    'verify': VerifyController,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='noether',
        description="Variational symmetries and Noether charges of higher-order Lagrangians",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('file', help="problem file")
    common.add_argument('--seed', type=int, default=None, help="seed for span-matching points (env NOETHER_SEED)")
    common.add_argument('--output', '-o', default=None, help="write the report here instead of stdout")
    common.add_argument('--format', choices=OUTPUT_FORMATS, default=DEFAULT_OUTPUT_FORMAT, dest='output_format')
    common.add_argument('--tol-abs', type=float, default=None, help="absolute drift tolerance")
    common.add_argument('--tol-rel', type=float, default=None, help="relative drift tolerance")
    common.add_argument('--max-order', type=int, default=None, help="jet-order cap")
    common.add_argument('--timings', action='store_true', help="include stage timings in the report")

    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('solve', parents=[common], help="find symmetries and conserved quantities")
    commands.add_parser('transform', parents=[common], help="apply the [transform] block")
    commands.add_parser('verify', parents=[common], help="integrate and check drift of [expected] integrals")
    return parser


@handle_errors
def run_command(args: argparse.Namespace) -> int:
    config.override(seed=args.seed, max_order=args.max_order, tol_abs=args.tol_abs, tol_rel=args.tol_rel)
    logger.info(f">>> {args.command} {args.file} <<<")
    logger.debug(f"Configuration: {config.to_dict()}")

    renderer = get_renderer(args.output_format)
    controller = CONTROLLERS[args.command](seed=config.seed, tol_abs=args.tol_abs, tol_rel=args.tol_rel)
    report = controller.run(args.file)
    text = renderer.render(report.to_dict(include_timings=args.timings))

    if args.output:
        with open(args.output, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"Report written to {args.output}")
    else:
        sys.stdout.write(text)
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return run_command(args)
