"""
Re-render a solved run at another tiling depth or with other layers.

The stored (a, b) are mapped back to lengths and radii on the same
subtriangulation; nothing is solved again.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from hypercircle.cellcomplex import subtriangulate
from hypercircle.errors import InputError
from hypercircle.hypkernel import TetraCoords, psi
from commands.ingest import ingest
from commands.uniformize.data import load_solution, save_figures
from commands.uniformize.logic import develop_solution, render_options
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)


def cmd_render(
    run_dir: str,
    output_dir: Optional[str] = None,
    depth: Optional[int] = None,
    layers: Optional[List[str]] = None,
    size: Optional[int] = None,
    seed_vertex: Optional[int] = None,
) -> Dict[str, Any]:
    doc = load_solution(run_dir)
    cfg = RunConfig.model_validate(doc['run'])
    ingested = ingest(cfg)
    tri = subtriangulate(ingested.data.complex)
    a, b = np.asarray(doc['a'], dtype=float), np.asarray(doc['b'], dtype=float)
    if a.shape != (tri.n_edges,) or b.shape != (tri.n_vertices,):
        raise InputError(
            f"stored solution has {a.size} edges and {b.size} vertices, "
            f"the run describes {tri.n_edges} and {tri.n_vertices}",
        )
    metric = psi(TetraCoords(a, b), tri)

    seed = seed_vertex if seed_vertex is not None else doc.get('seed_vertex')
    depth = depth if depth is not None else cfg.render.depth
    layout, _, pattern, copies = develop_solution(ingested.data, tri, metric, seed, depth)
    out = Path(output_dir) if output_dir else Path(run_dir)
    paths = save_figures(out, pattern, layout, copies, render_options(cfg, layers, size))
    logger.info("render: depth %d, %d copies", depth, len(copies))
    return {
        'success': True,
        'exit_code': 0,
        'message': f"rendered depth {depth} ({len(copies)} copies)",
        'artifacts': [str(p) for p in paths],
    }
