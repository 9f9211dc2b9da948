import logging
from typing import Any, Dict, List, Optional

from hypercircle.errors import InputError, NotSphere
from hypercircle.spherepipeline import realize_on_sphere
from commands.ingest import ingest, resolve_output_dir, run_hash, solver_options
from commands.sphere.data import save_sphere
from commands.uniformize.logic import render_options
from utils.run_config import load_run_config

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-7


def cmd_sphere(
    config: str,
    k_inf: Optional[int] = None,
    output_dir: Optional[str] = None,
    threads: Optional[int] = None,
    grad_tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    fold_symmetry: Optional[bool] = None,
    layers: Optional[List[str]] = None,
) -> Dict[str, Any]:
    cfg = load_run_config(config)
    k_inf = k_inf if k_inf is not None else cfg.k_inf
    if k_inf is None:
        raise InputError("the sphere command needs k_inf (flag or run document)")
    opts = solver_options(cfg, threads, grad_tol, max_iter)
    out = resolve_output_dir(cfg, output_dir)
    ingested = ingest(cfg)
    if ingested.lifted is not None:
        raise NotSphere("a branched cover is not a sphere pattern input", {'genus': ingested.data.complex.genus})

    fold = bool(fold_symmetry if fold_symmetry is not None else cfg.solver.fold_symmetry)
    data = ingested.data
    realization = realize_on_sphere(data.complex, data.theta, k_inf, opts, fold_symmetry=fold)
    paths = save_sphere(out, realization, run_hash(cfg), fold, render_options(cfg, layers))

    worst = max(realization.residuals.values())
    if worst > RESIDUAL_TOL:
        return {
            'success': False,
            'exit_code': 1,
            'error': f"sphere pattern re-measures off by {worst:.3e}",
            'residuals': realization.residuals,
            'artifacts': [str(p) for p in paths],
        }
    return {
        'success': True,
        'exit_code': 0,
        'message': f"sphere pattern with k_inf = {k_inf}, "
                   f"{realization.result.iterations} iterations, |g| = {realization.result.grad_norm:.3e}",
        'residuals': realization.residuals,
        'artifacts': [str(p) for p in paths],
    }
