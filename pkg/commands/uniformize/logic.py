import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from hypercircle.cellcomplex import Triangulation, subtriangulate
from hypercircle.energy import AngleData, Residuals, TargetData, residuals
from hypercircle.hypkernel import DecoratedMetric, psi
from hypercircle.layout import (
    CirclePattern2D,
    FuchsianGenerator,
    HypLayout,
    TileCopy,
    circles,
    corner_angle_sum,
    develop,
    fuchsian_generators,
    interior_vertices,
    tile,
)
from hypercircle.optimizer import SolveOptions, SolveResult, minimize
from hypercircle.svg import RenderOptions
from commands.ingest import ingest, resolve_output_dir, run_hash, solver_options
from commands.uniformize.data import save_run
from commands.validate.data import save_report
from commands.validate.logic import run_checks
from utils.run_config import RunConfig, load_run_config

logger = logging.getLogger(__name__)


@dataclass
class Uniformization:
    data: AngleData
    tri: Triangulation
    target: TargetData
    result: SolveResult
    metric: DecoratedMetric
    layout: HypLayout
    generators: List[FuchsianGenerator]
    pattern: CirclePattern2D
    copies: List[TileCopy]
    residuals: Residuals

    def layout_residuals(self) -> Dict[str, float]:
        """Re-measured edge lengths, cone angles, pairings and face-circle agreement of the developed domain."""
        cone = 0.0
        for v in interior_vertices(self.layout):
            if self.tri.complex.is_v1(v):
                cone = max(cone, abs(corner_angle_sum(self.layout, v) - float(self.target.Theta[v])))
        pairing = max((g.residual for g in self.generators), default=0.0)
        return {
            'edge_length': self.layout.edge_residual(),
            'cone_angle': cone,
            'pairing': pairing,
            'redundant_circles': self.pattern.redundant_residual,
        }


def develop_solution(
    data: AngleData,
    tri: Triangulation,
    metric: DecoratedMetric,
    seed_vertex: Optional[int],
    depth: int,
):
    logger.info("layout: developing %d triangles", len(tri.triangles))
    layout = develop(tri, metric, seed_vertex)
    generators = fuchsian_generators(layout)
    pattern = circles(layout, metric, data.complex)
    copies = tile(layout, generators, depth)
    return layout, generators, pattern, copies


def uniformize(
    data: AngleData,
    opts: Optional[SolveOptions] = None,
    seed_vertex: Optional[int] = None,
    depth: int = 2,
) -> Uniformization:
    """Solve the angle equations for (C, theta, Theta) and develop the result."""
    opts = opts or SolveOptions()
    tri = subtriangulate(data.complex)
    target = TargetData.from_angle_data(data, tri)
    logger.info("solve: %d variables over %d triangles", tri.n_edges + len(tri.v1), len(tri.triangles))
    result = minimize(tri, target, opts)
    metric = result.report.metric if result.report is not None and result.report.metric is not None \
        else psi(result.x_star, tri)
    layout, generators, pattern, copies = develop_solution(data, tri, metric, seed_vertex, depth)
    res = residuals(result.x_star, tri, target, opts.threads)
    return Uniformization(data, tri, target, result, metric, layout, generators, pattern, copies, res)


def render_options(cfg: RunConfig, layers: Optional[List[str]] = None, size: Optional[int] = None) -> RenderOptions:
    return RenderOptions(
        size=size if size is not None else cfg.render.size,
        layers=tuple(layers if layers is not None else cfg.render.layers),
    )


def build_summary(cfg: RunConfig, run: Uniformization, opts: SolveOptions, validated: bool) -> Dict[str, Any]:
    c = run.data.complex
    r = run.result
    return {
        'input_hash': run_hash(cfg),
        'input_kind': cfg.input_kind,
        'genus': c.genus,
        'vertices': c.n_vertices,
        'v1': sorted(c.v1),
        'converged': r.converged,
        'iterations': r.iterations,
        'grad_norm': r.grad_norm,
        'trace_length': len(r.trace),
        'max_angle_residual': run.residuals.max_angle,
        'max_cone_residual': run.residuals.max_cone,
        'layout_residuals': run.layout_residuals(),
        'generators': sum(1 for g in run.generators if not g.trivial),
        'tiles': len(run.copies),
        'threads': opts.threads,
        'validated': validated,
        'positive_radii': [int(v) for v in np.flatnonzero(run.metric.r > 0.0)],
    }


def cmd_uniformize(
    config: str,
    output_dir: Optional[str] = None,
    threads: Optional[int] = None,
    grad_tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    lm_memory: Optional[int] = None,
    seed_vertex: Optional[int] = None,
    depth: Optional[int] = None,
    layers: Optional[List[str]] = None,
    trace: Optional[bool] = None,
    validate: Optional[bool] = None,
) -> Dict[str, Any]:
    cfg = load_run_config(config)
    opts = solver_options(cfg, threads, grad_tol, max_iter, lm_memory)
    out = resolve_output_dir(cfg, output_dir)
    ingested = ingest(cfg)

    validated = bool(validate if validate is not None else cfg.validate_input)
    if validated:
        report = run_checks(ingested.data, threads=opts.threads)
        if not report.passed:
            path = save_report(out, report, run_hash(cfg), ingested.to_dict())
            return {
                'success': False,
                'exit_code': 1,
                'error': f"input fails {report.theorem} conditions {report.failed()}",
                'report': report.to_dict(),
                'artifacts': [str(path)],
            }

    seed = seed_vertex if seed_vertex is not None else cfg.render.seed_vertex
    run = uniformize(ingested.data, opts, seed, depth if depth is not None else cfg.render.depth)
    summary = build_summary(cfg, run, opts, validated)
    keep_trace = trace if trace is not None else cfg.solver.trace
    paths = save_run(out, cfg, ingested, run, summary, render_options(cfg, layers), keep_trace)
    return {
        'success': True,
        'exit_code': 0,
        'message': f"converged in {run.result.iterations} iterations, |g| = {run.result.grad_norm:.3e}",
        'summary': summary,
        'artifacts': [str(p) for p in paths],
    }
