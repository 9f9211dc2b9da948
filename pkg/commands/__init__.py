"""
Command registry.

Every subcommand is described by a parameter schema and a function that
returns a result dict ({'success', 'exit_code', 'message' | 'error', ...}).
app.py builds its argument parser from these schemas; tests may call
execute_command directly.

Available commands:
- uniformize: solve a run document and write the solution, generators and figures
- validate: test the angle data against the realizability conditions
- sphere: realize sphere angle data by doubling across a V1 vertex
- render: redraw a solved run at another depth or with other layers
"""

import logging
from typing import Any, Callable, Dict, List

from pydantic import ValidationError

from hypercircle.errors import HypercircleError
from hypercircle.svg import LAYERS
from commands.render.logic import cmd_render
from commands.render.ui import show_render
from commands.sphere.logic import cmd_sphere
from commands.sphere.ui import show_sphere
from commands.uniformize.logic import cmd_uniformize
from commands.uniformize.ui import show_uniformize
from commands.validate.logic import cmd_validate
from commands.validate.ui import show_validate

logger = logging.getLogger(__name__)

_CONFIG = {'type': 'string', 'description': 'Run document (JSON)'}
_OUTPUT = {'type': 'string', 'description': 'Output directory (default: run document, then HYPERCIRCLE_OUTPUT_DIR)'}
_THREADS = {'type': 'integer', 'description': 'Worker threads for gradient evaluation (default: HYPERCIRCLE_THREADS)'}
_GRAD_TOL = {'type': 'number', 'description': 'Stop when the gradient norm is below this'}
_MAX_ITER = {'type': 'integer', 'description': 'Iteration limit'}
_LAYERS = {'type': 'array', 'items': {'type': 'string', 'enum': list(LAYERS)},
           'description': 'SVG layers to draw'}
_DEPTH = {'type': 'integer', 'description': 'Word length of the drawn universal-cover copies'}
_SEED = {'type': 'integer', 'description': 'Start the layout in the star of this vertex'}


def get_commands() -> List[Dict[str, Any]]:
    """All subcommands with their parameter schemas."""
    return [
        {
            'name': 'uniformize',
            'description': 'Solve the angle equations, lay out a fundamental domain and draw it.',
            'parameters': {
                'type': 'object',
                'properties': {
                    'config': _CONFIG,
                    'output_dir': _OUTPUT,
                    'threads': _THREADS,
                    'grad_tol': _GRAD_TOL,
                    'max_iter': _MAX_ITER,
                    'lm_memory': {'type': 'integer', 'description': 'Stored correction pairs'},
                    'seed_vertex': _SEED,
                    'depth': _DEPTH,
                    'layers': _LAYERS,
                    'trace': {'type': 'boolean', 'description': 'Write the per-iteration trace'},
                    'validate': {'type': 'boolean', 'description': 'Check the realizability conditions first'},
                },
                'required': ['config'],
            },
            'function': cmd_uniformize,
            'ui': show_uniformize,
        },
        {
            'name': 'validate',
            'description': 'Check angle data against the realizability conditions and write a report.',
            'parameters': {
                'type': 'object',
                'properties': {
                    'config': _CONFIG,
                    'output_dir': _OUTPUT,
                    'cap': {'type': 'integer',
                            'description': 'Exhaustive domain sweep limit (default: HYPERCIRCLE_VALIDATOR_CAP)'},
                    'threads': _THREADS,
                    'exhaustive': {'type': 'boolean', 'description': 'Fail instead of sampling above the cap'},
                },
                'required': ['config'],
            },
            'function': cmd_validate,
            'ui': show_validate,
        },
        {
            'name': 'sphere',
            'description': 'Realize sphere angle data by doubling across the circle of k_inf.',
            'parameters': {
                'type': 'object',
                'properties': {
                    'config': _CONFIG,
                    'k_inf': {'type': 'integer', 'description': 'V1 vertex whose circle becomes the unit circle'},
                    'output_dir': _OUTPUT,
                    'threads': _THREADS,
                    'grad_tol': _GRAD_TOL,
                    'max_iter': _MAX_ITER,
                    'fold_symmetry': {'type': 'boolean', 'description': 'Solve in the quotient by the copy swap'},
                    'layers': _LAYERS,
                },
                'required': ['config'],
            },
            'function': cmd_sphere,
            'ui': show_sphere,
        },
        {
            'name': 'render',
            'description': 'Redraw a solved run directory without solving again.',
            'parameters': {
                'type': 'object',
                'properties': {
                    'run_dir': {'type': 'string', 'description': 'Directory holding solution.json'},
                    'output_dir': {'type': 'string', 'description': 'Where to write the SVGs (default: run_dir)'},
                    'depth': _DEPTH,
                    'layers': _LAYERS,
                    'size': {'type': 'integer', 'description': 'SVG width and height in pixels'},
                    'seed_vertex': _SEED,
                },
                'required': ['run_dir'],
            },
            'function': cmd_render,
            'ui': show_render,
        },
    ]


def get_command(name: str) -> Dict[str, Any]:
    for command in get_commands():
        if command['name'] == name:
            return command
    raise KeyError(name)


def _failure(error: str, exit_code: int, **extra) -> Dict[str, Any]:
    return dict({'success': False, 'error': error, 'exit_code': exit_code}, **extra)


def execute_command(name: str, parameters: Dict[str, Any]) -> Dict[str, Any]:
    """Run a command by name; exceptions become failure dicts with an exit code."""
    try:
        function: Callable[..., Dict[str, Any]] = get_command(name)['function']
    except KeyError:
        return _failure(f"Unknown command: {name}", 2)

    params = {k: v for k, v in parameters.items() if v is not None}
    try:
        return function(**params)
    except HypercircleError as e:
        logger.error("%s failed: %s", name, e)
        return _failure(str(e), e.exit_code, error_type=type(e).__name__, details=e.details)
    except ValidationError as e:
        return _failure(f"invalid run document: {e}", 2, error_type='ValidationError')
    except (FileNotFoundError, ValueError) as e:
        return _failure(str(e), 2, error_type=type(e).__name__)
    except OSError as e:
        return _failure(f"cannot write artifacts: {e}", 1, error_type=type(e).__name__)


__all__ = [
    'get_commands',
    'get_command',
    'execute_command',
    'cmd_uniformize',
    'cmd_validate',
    'cmd_sphere',
    'cmd_render',
]
