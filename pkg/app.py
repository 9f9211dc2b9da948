"""
hypercircle command line.

    python app.py uniformize data/lawson-squares.json --output-dir out/lawson
    python app.py validate data/lawson-curve.json
    python app.py sphere data/octahedron-sphere.json --fold-symmetry
    python app.py render out/lawson --depth 3

Exit codes: 0 ok, 1 validation or convergence failure, 2 input error.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from commands import execute_command, get_command, get_commands
from utils.env_config import EnvConfig

_TYPES = {'string': str, 'integer': int, 'number': float}


def _add_parameter(parser: argparse.ArgumentParser, name: str, schema: Dict[str, Any], required: bool) -> None:
    kind = schema['type']
    help_text = schema.get('description')
    if required:
        parser.add_argument(name, type=_TYPES[kind], help=help_text)
        return
    flag = '--' + name.replace('_', '-')
    if kind == 'boolean':
        parser.add_argument(flag, dest=name, action='store_true', default=None, help=help_text)
    elif kind == 'array':
        parser.add_argument(flag, dest=name, nargs='+', choices=schema['items'].get('enum'), help=help_text)
    else:
        parser.add_argument(flag, dest=name, type=_TYPES[kind], help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='hypercircle', description='Hyper-ideal circle patterns and uniformization.')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='Logging level (default: HYPERCIRCLE_LOG_LEVEL or INFO)')
    sub = parser.add_subparsers(dest='command', required=True)
    for command in get_commands():
        cmd = sub.add_parser(command['name'], help=command['description'], description=command['description'])
        schema = command['parameters']
        for name, prop in schema['properties'].items():
            _add_parameter(cmd, name, prop, name in schema.get('required', []))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    try:
        level = args.log_level or EnvConfig.get_log_level()
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    params = {k: v for k, v in vars(args).items() if k not in ('command', 'log_level')}
    result = execute_command(args.command, params)
    get_command(args.command)['ui'](result)
    return int(result.get('exit_code', 0 if result.get('success') else 1))


if __name__ == "__main__":
    sys.exit(main())
