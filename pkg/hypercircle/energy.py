"""
Target data and the gradient field of the angle functional.

Only the gradient is ever evaluated: its components are angle sums minus
targets, so the functional value (hyper-ideal volumes) is never needed.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from hypercircle.cellcomplex import CellComplex, Triangulation
from hypercircle.errors import DomainError, InvalidInput
from hypercircle.hypkernel import (
    DecoratedMetric,
    TetraCoords,
    decorated_angles,
    er_violations,
    face_classes,
    psi,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass
class AngleData:
    """(C, theta, Theta): intersection angles on edges, cone angles on vertices."""

    complex: CellComplex
    theta: np.ndarray
    Theta: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.Theta = np.asarray(self.Theta, dtype=float)
        if self.theta.shape != (self.complex.n_edges,):
            raise InvalidInput(f"theta has {self.theta.size} entries, complex has {self.complex.n_edges} edges")
        if self.Theta.shape != (self.complex.n_vertices,):
            raise InvalidInput(f"Theta has {self.Theta.size} entries, complex has {self.complex.n_vertices} vertices")

    def corrected(self) -> 'AngleData':
        """Same data with every cone angle set to 2 pi."""
        return AngleData(self.complex, self.theta.copy(), np.full(self.complex.n_vertices, TWO_PI))


@dataclass
class TargetData:
    """theta_tilde on the edges of T (pi on redundant edges) and Theta per vertex."""

    theta_tilde: np.ndarray
    Theta: np.ndarray

    @classmethod
    def from_angle_data(cls, data: AngleData, tri: Triangulation, wide_edges: Sequence[int] = (),
                        keep_v0_cone_angles: bool = False) -> 'TargetData':
        """Targets for the solver.

        theta must lie in (0, pi], except on wide_edges where (0, 2 pi)
        is allowed; the doubled sphere carries 2 theta on its fold edges.
        V0 cone angles are reset to 2 pi unless keep_v0_cone_angles is set.
        """
        if tri.source is not data.complex and tri.source.faces != data.complex.faces:
            raise InvalidInput("angle data and triangulation describe different complexes")
        n_source = data.complex.n_edges
        theta_tilde = np.full(tri.n_edges, math.pi)
        theta_tilde[:n_source] = data.theta
        wide = np.asarray(list(wide_edges), dtype=int)
        if wide.size and (wide.min() < 0 or wide.max() >= n_source):
            raise InvalidInput("wide edges must be edges of the complex", {'edges': wide.tolist()})
        is_wide = np.zeros(tri.n_edges, dtype=bool)
        is_wide[wide] = True
        ok = (theta_tilde > 0.0) & np.where(is_wide, theta_tilde < TWO_PI, theta_tilde <= math.pi)
        bad = np.flatnonzero(~ok)
        if bad.size:
            raise InvalidInput(f"theta on edge {int(bad[0])} is outside its allowed range",
                               {'edges': bad.tolist()})
        Theta = np.array(data.Theta, dtype=float)
        if not keep_v0_cone_angles:
            for k in tri.complex.v0:
                Theta[k] = TWO_PI
        if np.any(Theta <= 0.0):
            raise InvalidInput("cone angles must be positive")
        return cls(theta_tilde, Theta)


class VariableLayout:
    """Flat vector x = [a over edges of T, b over sorted V1]."""

    def __init__(self, tri: Triangulation):
        self.n_edges = tri.n_edges
        self.n_vertices = tri.n_vertices
        self.v1 = sorted(tri.v1)
        self.edge_class = np.asarray(tri.edge_class, dtype=int)

    @property
    def size(self) -> int:
        return self.n_edges + len(self.v1)

    def pack(self, t: TetraCoords) -> np.ndarray:
        return np.concatenate([np.asarray(t.a, dtype=float), np.asarray(t.b, dtype=float)[self.v1]])

    def unpack(self, x: np.ndarray) -> TetraCoords:
        a = np.array(x[:self.n_edges], dtype=float)
        b = np.zeros(self.n_vertices)
        b[self.v1] = x[self.n_edges:]
        return TetraCoords(a, b)

    def lower_bounds(self) -> np.ndarray:
        """Open lower bounds: 0 on E_T^1 edges and on b, -inf on E_T^0 edges."""
        lb = np.full(self.size, -np.inf)
        lb[:self.n_edges][self.edge_class == 1] = 0.0
        lb[self.n_edges:] = 0.0
        return lb


def _chunks(n: int, parts: int) -> List[range]:
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(parts)]


def _angles_for(t: TetraCoords, tri: Triangulation, classes, faces: range):
    out = []
    for k in faces:
        sides = tri.triangle_edges[k]
        corners = tri.triangles[k]
        out.append(decorated_angles([t.a[e] for e in sides], [t.b[v] for v in corners], classes[k]))
    return out


def angle_sums(t: TetraCoords, tri: Triangulation, threads: int = 1):
    """Per-edge alpha sums and per-vertex beta sums, accumulated in face order."""
    classes = face_classes(tri)
    n_faces = len(tri.triangles)
    if threads > 1 and n_faces > 1:
        chunks = _chunks(n_faces, threads)
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda r: _angles_for(t, tri, classes, r), chunks))
        per_face = [fa for part in parts for fa in part]
    else:
        per_face = _angles_for(t, tri, classes, range(n_faces))

    alpha_sum = np.zeros(tri.n_edges)
    beta_sum = np.zeros(tri.n_vertices)
    extended = 0
    for k, fa in enumerate(per_face):
        for s, e in enumerate(tri.triangle_edges[k]):
            alpha_sum[e] += fa.alpha[s]
        for c, v in enumerate(tri.triangles[k]):
            beta_sum[v] += fa.beta[c]
        extended += fa.extended
    return alpha_sum, beta_sum, extended


def gradient(t: TetraCoords, tri: Triangulation, target: TargetData, threads: int = 1) -> np.ndarray:
    """g_a = sum alpha - theta_tilde per edge, g_b = sum beta - Theta per V1 vertex."""
    alpha_sum, beta_sum, extended = angle_sums(t, tri, threads)
    v1 = sorted(tri.v1)
    if extended:
        logger.debug("%d triangles evaluated by the constant extension", extended)
    return np.concatenate([alpha_sum - target.theta_tilde, beta_sum[v1] - target.Theta[v1]])


@dataclass
class FeasibilityReport:
    in_TE: bool
    violations: List[Dict[str, Any]] = field(default_factory=list)
    metric: Optional[DecoratedMetric] = None

    def min_slack(self) -> float:
        if not self.violations:
            return 0.0
        return min(v['slack'] for v in self.violations)

    def to_dict(self) -> Dict[str, Any]:
        return {'in_TE': self.in_TE, 'violations': self.violations}


def box_violations(t: TetraCoords, tri: Triangulation) -> List[Dict[str, Any]]:
    out = []
    for k in sorted(tri.v1):
        if not t.b[k] > 0.0:
            out.append({'constraint': 'b_positive', 'vertex': int(k), 'slack': float(t.b[k])})
    for e, cls in enumerate(tri.edge_class):
        if cls == 1 and not t.a[e] > 0.0:
            out.append({'constraint': 'a_positive', 'edge': e, 'slack': float(t.a[e])})
    return out


def feasibility(t: TetraCoords, tri: Triangulation) -> FeasibilityReport:
    """Evaluate psi and report every violated constraint of TE with its slack."""
    violations = box_violations(t, tri)
    if violations:
        return FeasibilityReport(False, violations)
    try:
        m = psi(t, tri)
    except DomainError as e:
        return FeasibilityReport(False, [{'constraint': 'domain', 'slack': float('-inf'), 'message': str(e)}])
    violations = er_violations(m, tri)
    return FeasibilityReport(not violations, violations, m)


@dataclass
class Residuals:
    max_angle: float
    max_cone: float

    def to_dict(self) -> Dict[str, float]:
        return {'max_angle_residual': self.max_angle, 'max_cone_residual': self.max_cone}


def residuals(t: TetraCoords, tri: Triangulation, target: TargetData, threads: int = 1) -> Residuals:
    alpha_sum, beta_sum, _ = angle_sums(t, tri, threads)
    v1 = sorted(tri.v1)
    max_angle = float(np.max(np.abs(alpha_sum - target.theta_tilde))) if tri.n_edges else 0.0
    max_cone = float(np.max(np.abs(beta_sum[v1] - target.Theta[v1]))) if v1 else 0.0
    return Residuals(max_angle, max_cone)


def hyperbolic_excess(Theta: Sequence[float], chi: int) -> float:
    """sum (2 pi - Theta) - 2 pi chi; positive exactly for hyperbolic targets."""
    return float(np.sum(TWO_PI - np.asarray(Theta))) - TWO_PI * chi
