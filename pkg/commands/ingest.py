"""
Shared command plumbing: turn a run document into angle data, and
resolve settings (CLI flag, then run document, then environment).
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from hypercircle.branchcover import BranchCoverSpec, LiftedAngleData, hyperelliptic, lift
from hypercircle.cellcomplex import build_complex, build_from_net
from hypercircle.delaunay import (
    DelaunayPattern,
    FlatConeSurface,
    from_stereographic,
    intrinsic_delaunay_flat,
    spherical_delaunay,
)
from hypercircle.energy import AngleData
from hypercircle.errors import InputError
from hypercircle.optimizer import SolveOptions
from utils.artifacts import input_hash
from utils.env_config import EnvConfig
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass
class Ingested:
    """Angle data ready for the solver, plus whatever produced it."""

    kind: str
    data: AngleData
    pattern: Optional[DelaunayPattern] = None
    lifted: Optional[LiftedAngleData] = None

    def to_dict(self) -> Dict[str, Any]:
        c = self.data.complex
        doc: Dict[str, Any] = {
            'kind': self.kind,
            'vertices': c.n_vertices,
            'edges': c.n_edges,
            'faces': c.n_faces,
            'genus': c.genus,
            'v1': sorted(c.v1),
        }
        if self.pattern is not None:
            doc['flips'] = self.pattern.flips
            doc['merged_edges'] = len(self.pattern.removed_diagonals)
        if self.lifted is not None:
            doc['sheets'] = self.lifted.sheets
            doc['ramified'] = [int(v) for v in np.flatnonzero(self.lifted.ramification >= 2)]
        return doc


def chart_points(chart: List[Any]) -> np.ndarray:
    """Unit vectors for stereographic chart entries ([re, im] or "inf")."""
    out = []
    for i, z in enumerate(chart):
        if isinstance(z, str):
            if z.strip().lower() != 'inf':
                raise InputError(f"chart entry {i} is {z!r}; the only token allowed is 'inf'")
            out.append(from_stereographic(None))
            continue
        if len(z) != 2:
            raise InputError(f"chart entry {i} must be [re, im], got {z!r}")
        out.append(from_stereographic(complex(float(z[0]), float(z[1]))))
    return np.array(out)


def _sphere_points(section) -> np.ndarray:
    if section.chart is not None:
        return chart_points(section.chart)
    return np.asarray(section.points, dtype=float)


def _ingest_flat(section) -> Ingested:
    surface = FlatConeSurface.from_faces(section.faces, section.lengths, section.face_edges)
    pattern = intrinsic_delaunay_flat(surface, section.budget)
    c = pattern.complex
    return Ingested('flat_cone_surface', AngleData(c, pattern.theta, np.full(c.n_vertices, TWO_PI)), pattern)


def _ingest_points(section) -> Ingested:
    pattern = spherical_delaunay(_sphere_points(section)).with_tags(section.v1)
    c = pattern.complex
    return Ingested('sphere_points', AngleData(c, pattern.theta, np.full(c.n_vertices, TWO_PI)), pattern)


def _ingest_cover(section) -> Ingested:
    base = spherical_delaunay(_sphere_points(section)).with_tags(section.v1)
    spec = BranchCoverSpec.from_dict({'sheets': section.sheets, 'branch': section.branch})
    swaps = spec.sheets == 2 and spec.monodromy and all(p == (1, 0) for p in spec.monodromy.values())
    if swaps:
        lifted = hyperelliptic(base, sorted(spec.monodromy))
    else:
        lifted = lift(base, spec)
    return Ingested('cover_spec', lifted.angle_data(corrected=True), base, lifted)


def _ingest_angles(section) -> Ingested:
    if section.faces is not None:
        n_vertices = 1 + max((v for face in section.faces for v in face), default=-1)
        v1 = range(n_vertices) if section.v1_all else section.v1
        c = build_complex(section.faces, v1, face_edges=section.face_edges)
    else:
        c = build_from_net(section.polygons, section.identifications, v1_all=section.v1_all)
        if not section.v1_all:
            c = c.with_tags(section.v1)
    Theta = section.Theta if section.Theta is not None else np.full(c.n_vertices, TWO_PI)
    return Ingested('angle_data', AngleData(c, section.theta, Theta))


_INGEST = {
    'flat_cone_surface': _ingest_flat,
    'sphere_points': _ingest_points,
    'cover_spec': _ingest_cover,
    'angle_data': _ingest_angles,
}


def ingest(cfg: RunConfig) -> Ingested:
    kind = cfg.input_kind
    logger.info("ingest: %s", kind)
    out = _INGEST[kind](cfg.input_section)
    c = out.data.complex
    logger.info("ingest: V=%d E=%d F=%d genus=%d |V1|=%d",
                c.n_vertices, c.n_edges, c.n_faces, c.genus, len(c.v1))
    return out


def input_document(cfg: RunConfig) -> Dict[str, Any]:
    """The input section alone, keyed by its kind; this is what gets hashed."""
    return {cfg.input_kind: cfg.input_section.model_dump(mode='json', exclude_none=True)}


def run_hash(cfg: RunConfig) -> str:
    return input_hash(input_document(cfg))


# --- settings ---

def _first(*values):
    return next((v for v in values if v is not None), None)


def resolve_threads(cfg: Optional[RunConfig], threads: Optional[int]) -> int:
    return _first(threads, cfg.solver.threads if cfg else None) or EnvConfig.get_threads()


def resolve_output_dir(cfg: Optional[RunConfig], output_dir: Optional[str]) -> Path:
    return Path(_first(output_dir, cfg.output_dir if cfg else None) or EnvConfig.get_output_dir())


def solver_options(
    cfg: RunConfig,
    threads: Optional[int] = None,
    grad_tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    lm_memory: Optional[int] = None,
) -> SolveOptions:
    s = cfg.solver
    return SolveOptions(
        grad_tol=_first(grad_tol, s.grad_tol),
        max_iter=_first(max_iter, s.max_iter),
        memory=_first(lm_memory, s.lm_memory),
        init_a1=s.init_a1,
        threads=resolve_threads(cfg, threads),
    )
