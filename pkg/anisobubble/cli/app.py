from anisobubble.cli.commands import run_command
from anisobubble.cli.config import flag_overrides, load_config
from anisobubble.cli.constants import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_TOLERANCE,
    SUBCOMMANDS,
    Subcommand,
)
from anisobubble.cli.data.base import ArtifactWriter
from anisobubble.numerics.errors import ConfigError, NumericalError
from anisobubble.numerics.pfunction.constants import PFUNCTION_CHECKS
from anisobubble.numerics.shared.logger import VerboseFunctionExec
from anisobubble.numerics.shared.multi import set_max_workers
import argparse
import logging
import numpy as np
import simplejson
import sys

logger = logging.getLogger(__name__)


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f'Object of type {type(obj).__name__} is not JSON serializable')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='anisobubble',
        description='Numerical checks for critical anisotropic p-Laplace bubbles.',
    )
    parser.add_argument('subcommand', choices=sorted(s.value for s in SUBCOMMANDS))
    parser.add_argument(
        'variant',
        nargs='?',
        choices=sorted(c.value for c in PFUNCTION_CHECKS),
        help='which pfunction-check to run',
    )
    parser.add_argument('--config', type=str, default=None)
    parser.add_argument('--out-dir', type=str, default=None)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--threads', type=int, default=None)
    parser.add_argument('--tol-scale', type=float, default=None)
    parser.add_argument('--draws', type=int, default=None)
    parser.add_argument('--verbose', action='store_true')
    return parser


def _configure_logging(verbose):
    logging.basicConfig(
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        level=logging.DEBUG if verbose else logging.WARNING,
    )


def _artifact_name(subcommand, variant):
    if subcommand == Subcommand.PFUNCTION_CHECK:
        return f'{subcommand.value}-{variant}'
    return subcommand.value


def run(subcommand, config_path=None, flags=None, variant=None, verbose=False):
    """
    Runs one subcommand and returns its exit code. Artifacts <name>.json and <name>.csv
    are written to the output directory whenever the command ran to completion, pass or fail.
    """
    flags = flags or {}
    try:
        subcommand = Subcommand(subcommand)
        if subcommand == Subcommand.PFUNCTION_CHECK and variant is None:
            raise ConfigError('variant', 'pfunction-check needs one of ' + ', '.join(
                sorted(c.value for c in PFUNCTION_CHECKS)
            ))
        config = load_config(config_path, flag_overrides(**flags))
        set_max_workers(config.get('threads'))
    except (ConfigError, ValueError) as err:
        print(f'Invalid configuration: {err}', file=sys.stderr)
        return EXIT_CONFIG

    name = _artifact_name(subcommand, variant)
    writer = ArtifactWriter(config['output']['dir'])
    try:
        with VerboseFunctionExec(f'Running {name}', verbose=verbose):
            result = run_command(subcommand, config, variant)
    except ConfigError as err:
        print(f'Invalid configuration: {err}', file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as err:
        logger.exception(f'{name} rejected its input')
        print(f'Invalid input: {err}', file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, NumericalError, np.linalg.LinAlgError) as err:
        logger.exception(f'{name} failed')
        writer.write_json_file(f'{name}.json', dict(
            error=err.to_dict() if isinstance(err, NumericalError) else dict(message=str(err)),
            subcommand=name,
            **{'pass': False},
        ))
        print(f'Numerical failure: {err}', file=sys.stderr)
        return EXIT_NUMERICAL

    report = dict(result.to_dict(), config=config, seed=config['seed'], subcommand=name)
    writer.write_json_file(f'{name}.json', report)
    writer.write_csv_file(f'{name}.csv', result.rows, columns=result.columns)
    print(simplejson.dumps(
        dict(result.summary, subcommand=name, **{'pass': result.passed}),
        default=_default,
        ignore_nan=True,
        sort_keys=True,
    ))
    return EXIT_OK if result.passed else EXIT_TOLERANCE


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    flags = dict(
        draws=args.draws,
        out_dir=args.out_dir,
        seed=args.seed,
        threads=args.threads,
        tol_scale=args.tol_scale,
    )
    return run(args.subcommand, args.config, flags, variant=args.variant, verbose=args.verbose)


if __name__ == '__main__':
    sys.exit(main())
