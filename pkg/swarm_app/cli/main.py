"""Command-line entry point"""
import argparse
import logging
import sys

from ..core.errors import HarmonicSwarmError
from ..utils.constants import (
    AVAILABLE_PRESETS,
    EXIT_OK,
    MODES,
    RENDER_BUCKETS,
    RENDER_LOWEST_CHAR,
    RENDER_OBSTACLE_CHAR,
)
from ..utils.log import setup_logging
from ..utils.resources import get_preset_path, preset_names
from .runner import run_scenario
from .scenario import build_scenario, read_settings

logger = logging.getLogger(__name__)


def render_scale_help():
    """Legend of the ASCII renders, built from the bucket table"""
    lines = ['ASCII renders bucket each cell on v / max|v|:']
    lines += [f"  {char}  {threshold:g} and above" for threshold, char in RENDER_BUCKETS]
    lines.append(f"  {RENDER_LOWEST_CHAR}  below {RENDER_BUCKETS[-1][0]:g}")
    lines.append(f"  {RENDER_OBSTACLE_CHAR}  obstacle")
    return '\n'.join(lines)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='harmonic-swarm',
        description='Build environment harmonics and target shapes with weighted robot swarms.',
        epilog=render_scale_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--config', help='scenario file (INI); relative paths resolve against it')
    parser.add_argument('--preset', choices=preset_names(), help='start from a bundled figure scenario')
    parser.add_argument('--list-presets', action='store_true', help='list bundled presets and exit')
    parser.add_argument('--mode', choices=MODES)
    parser.add_argument('--environment', help='environment file')
    parser.add_argument('--shape', help='target shape overlay file')
    parser.add_argument('--harmonic', type=int, help='target harmonic, 1-based')
    parser.add_argument('--robots', type=int)
    parser.add_argument('--steps', type=int)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--threads', type=int, help='worker threads for per-harmonic swarms')
    parser.add_argument('--allow-partial', action='store_true', default=None,
                        help='exit 0 and keep results when some dynamics did not converge')
    parser.add_argument('--exact-dynamics', action='store_true', default=None,
                        help='iterate the attractor matrices instead of simulating robots')
    parser.add_argument('--out', help='output directory')
    parser.add_argument('--progress', action='store_true', help='show progress bars')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')
    return parser


def _overrides(args):
    """Command-line flags as a settings layer"""
    return {
        'scenario': {'mode': args.mode, 'environment': args.environment, 'harmonic': args.harmonic},
        'shape': {'path': args.shape},
        'swarm': {'robots': args.robots, 'steps': args.steps, 'seed': args.seed},
        'output': {'directory': args.out},
        'runtime': {
            'threads': args.threads,
            'allow_partial': args.allow_partial,
            'exact_dynamics': args.exact_dynamics,
        },
    }


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    setup_logging(level)

    if args.list_presets:
        for name, description, _ in AVAILABLE_PRESETS:
            print(f"{name:<12} {description}")
        return EXIT_OK

    try:
        layers = []
        if args.preset:
            layers.append(read_settings(get_preset_path(args.preset)))
        if args.config:
            layers.append(read_settings(args.config))
        layers.append(_overrides(args))
        scenario = build_scenario(*layers)
        show_progress = args.progress and not args.quiet and sys.stderr.isatty()
        return run_scenario(scenario, show_progress=show_progress)
    except HarmonicSwarmError as e:
        logger.error("%s", e)
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
