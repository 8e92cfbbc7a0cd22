import argparse
import logging
import sys
from datetime import datetime, timezone
from importlib import metadata
from typing import List, Optional

from scipy import fft

from commands import cmd_nonuniform, cmd_simulate, cmd_validate
from config import Config, RunConfig
from errors import BoussinesqError, ConfigError
from storage import get_storage

logger = logging.getLogger('boussinesq')

PACKAGES = ['numpy', 'scipy', 'pydantic', 'python-dotenv']


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='boussinesq',
        description='Lagrangian pseudo-spectral solver for the inviscid 2D Boussinesq system')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for name, help_text in [('simulate', 'Solve one datum and dump the trajectory'),
                            ('validate', 'Run the invariant suite'),
                            ('nonuniform', 'Run the non-uniform dependence experiment')]:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--config', metavar='PATH', help='JSON run configuration')
        sub.add_argument('--out', metavar='DIR', help='Output directory')
        sub.add_argument('--threads', type=int, metavar='N', help='FFT workers and experiment pool size')
        sub.add_argument('--preset', metavar='NAME', help='Initial datum preset')
        if name == 'validate':
            sub.add_argument('--checks', metavar='NAME,...', help='Comma-separated subset of checks')
    return parser


def configure_logging(level: str = Config.LOG_LEVEL):
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        force=True)


def package_versions() -> dict:
    versions = {}
    for package in PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = None
    versions['python'] = sys.version.split()[0]
    return versions


def write_manifest(storage, command: str, config: RunConfig, argv: List[str]):
    storage.store_json({
        'command': command,
        'argv': argv,
        'config': config.model_dump(mode='json'),
        'versions': package_versions(),
        'timestamp': datetime.now(timezone.utc).isoformat(),
    }, 'manifest.json')


def run_command(args: argparse.Namespace, config: RunConfig, storage) -> int:
    if args.command == 'simulate':
        return cmd_simulate(config, storage)
    if args.command == 'validate':
        checks = [c.strip() for c in args.checks.split(',') if c.strip()] if args.checks else None
        return cmd_validate(config, storage, checks)
    return cmd_nonuniform(config, storage)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = create_parser().parse_args(argv)
    configure_logging()

    overrides = {'output_dir': args.out, 'threads': args.threads, 'datum.preset': args.preset}
    try:
        config = RunConfig.load(args.config, overrides)
        storage = get_storage(config.output_dir)
        write_manifest(storage, args.command, config, argv)
        logger.info(f"Running '{args.command}' into {config.output_dir} with {config.threads} thread(s)")
        with fft.set_workers(config.threads):
            status = run_command(args, config, storage)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return e.exit_code
    except BoussinesqError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 5

    logger.info(f"'{args.command}' finished with exit status {status}")
    return status


if __name__ == '__main__':
    sys.exit(main())
