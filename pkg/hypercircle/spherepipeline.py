"""
Patterns on the sphere through a doubled hyperbolic problem.

Removing the open star of a V1 vertex k_inf leaves a disk bounded by the
loop sigma. Two copies of that disk glued along sigma form a sphere whose
target data (doubled angles on sigma, cone angles 2 theta_{i k_inf} at
the sigma vertices) is hyperbolic. Its solution is symmetric under the
copy swap; one copy, laid out in the Poincare disk, is a pattern with
convex geodesic boundary, and the unit circle closes it up as the circle
of k_inf.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hypercircle.cellcomplex import CellComplex, Triangulation, build_complex, subtriangulate
from hypercircle.delaunay import PlaneCircle, circle_intersection_angle
from hypercircle.energy import AngleData, TargetData, VariableLayout
from hypercircle.errors import InputError, KInfNotV1, NotSphere, SphereError, SymmetryResidualTooLarge
from hypercircle.hypkernel import psi, triangle_beta
from hypercircle.layout import (
    CirclePattern2D,
    HypLayout,
    circles,
    develop,
    from_klein,
    geodesic_circle,
    inverse,
    inversive_product,
    klein,
    translation,
)
from hypercircle.optimizer import SolveOptions, SolveResult, minimize

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SYMMETRY_TOL = 1e-6
SYMMETRY_WARN = 1e-8


@dataclass
class DoubledData:
    """Two copies of C minus the open star of k_inf, glued along sigma.

    Copy 1 keeps the vertex order of C (k_inf removed); copy 2 reverses
    every face. Sigma vertices and sigma edges are shared.
    """

    source: CellComplex
    k_inf: int
    complex: CellComplex
    theta_tilde: np.ndarray
    Theta: np.ndarray
    sigma_vertices: Tuple[int, ...]
    sigma_edges: Tuple[int, ...]
    vertex_source: Tuple[int, ...]
    edge_source: Tuple[int, ...]
    face_source: Tuple[int, ...]
    face_copy: Tuple[int, ...]
    vertex_involution: Tuple[int, ...]
    edge_involution: Tuple[int, ...]
    face_involution: Tuple[int, ...]

    def angle_data(self) -> AngleData:
        return AngleData(self.complex, self.theta_tilde, self.Theta)

    def copy_faces(self, copy: int) -> List[int]:
        return [f for f, k in enumerate(self.face_copy) if k == copy]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k_inf': self.k_inf,
            'faces': self.complex.n_faces,
            'sigma_vertices': [self.vertex_source[v] for v in self.sigma_vertices],
            'sigma_edges': [self.edge_source[e] for e in self.sigma_edges],
        }


def _star_disk(c: CellComplex, k_inf: int) -> Tuple[set, List[int]]:
    around = {f for f, _ in c.vertex_star(k_inf)}
    sigma = sorted({
        e for f in around for e in c.face_edges[f]
        if k_inf not in c.edges[e]
    })
    for e in sigma:
        f, g = c.edge_faces(e)
        if f in around and g in around:
            raise SphereError(f"closed star of vertex {k_inf} is not an embedded disk",
                              {'edge': e})
    ends = {v for e in sigma for v in c.edges[e]}
    if len(ends) != len(sigma):
        raise SphereError(f"link of vertex {k_inf} is not a simple loop",
                          {'vertices': len(ends), 'edges': len(sigma)})
    return around, sigma


def double(c: CellComplex, theta: Sequence[float], k_inf: int) -> DoubledData:
    """Doubled complex and target data across the link of k_inf."""
    if c.genus != 0:
        raise NotSphere(f"complex has genus {c.genus}", {'genus': c.genus})
    if not 0 <= k_inf < c.n_vertices:
        raise InputError(f"vertex {k_inf} does not exist", {'vertex': k_inf})
    if not c.is_v1(k_inf):
        raise KInfNotV1(f"vertex {k_inf} is in V0; doubling needs a V1 vertex (the V0 variant is not supported)", {'vertex': k_inf})
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.n_edges,):
        raise InputError(f"theta has {theta.size} entries, complex has {c.n_edges} edges")

    around, sigma = _star_disk(c, k_inf)
    on_sigma = set(sigma)
    sigma_ends = {v for e in sigma for v in c.edges[e]}
    kept_faces = [f for f in range(c.n_faces) if f not in around]
    kept_edges = [e for e in range(c.n_edges) if k_inf not in c.edges[e]]

    rest = [v for v in range(c.n_vertices) if v != k_inf]
    vert1 = {v: i for i, v in enumerate(rest)}
    vert2 = dict(vert1)
    n_vertices = len(rest)
    for v in rest:
        if v not in sigma_ends:
            vert2[v] = n_vertices
            n_vertices += 1

    def label(e: int, copy: int) -> Tuple:
        return ('s', e) if e in on_sigma else (('a', e) if copy == 1 else ('b', e))

    cycles, labels = [], []
    for f in kept_faces:
        cycles.append([vert1[v] for v in c.faces[f]])
        labels.append([label(e, 1) for e in c.face_edges[f]])
    for f in kept_faces:
        cycle = c.faces[f]
        n = len(cycle)
        cycles.append([vert2[v] for v in reversed(cycle)])
        labels.append([label(c.face_edges[f][(n - 2 - s) % n], 2) for s in range(n)])

    order = [label(e, 1) for e in kept_edges] + [('b', e) for e in kept_edges if e not in on_sigma]
    v1 = {vert1[v] for v in c.v1 if v != k_inf} | {vert2[v] for v in c.v1 if v != k_inf}
    doubled = build_complex(cycles, v1, face_edges=labels, edge_order=order)

    edge_source = tuple(lab[1] for lab in order)
    theta_tilde = np.array([
        2.0 * theta[e] if lab[0] == 's' else theta[e] for lab, e in zip(order, edge_source)
    ])

    to_k = {c.other_endpoint(e, k_inf): float(theta[e]) for e in c.vertex_edges(k_inf)}
    Theta = np.full(n_vertices, TWO_PI)
    for v in sigma_ends:
        if v in to_k:
            Theta[vert1[v]] = 2.0 * to_k[v]

    vertex_source = [0] * n_vertices
    vertex_involution = list(range(n_vertices))
    for v in rest:
        vertex_source[vert1[v]] = v
        vertex_source[vert2[v]] = v
        vertex_involution[vert1[v]] = vert2[v]
        vertex_involution[vert2[v]] = vert1[v]
    index = {lab: i for i, lab in enumerate(order)}
    edge_involution = []
    for lab in order:
        kind, e = lab
        edge_involution.append(index[lab] if kind == 's' else index[('b' if kind == 'a' else 'a', e)])
    m = len(kept_faces)
    face_involution = tuple((f + m) % (2 * m) for f in range(2 * m))

    out = DoubledData(
        c, k_inf, doubled, theta_tilde, Theta,
        tuple(sorted(vert1[v] for v in sigma_ends)),
        tuple(index[('s', e)] for e in sigma),
        tuple(vertex_source), edge_source,
        tuple(kept_faces + kept_faces), tuple([1] * m + [2] * m),
        tuple(vertex_involution), tuple(edge_involution), face_involution,
    )
    logger.info("doubled across the link of vertex %d: %d faces, |sigma| = %d",
                k_inf, doubled.n_faces, len(sigma))
    return out


def doubled_triangulation(dd: DoubledData) -> Triangulation:
    """Fans keyed by source vertex, so both copies get mirrored diagonals."""
    return subtriangulate(dd.complex, fan_key=lambda v: dd.vertex_source[v])


def triangulation_involution(tri: Triangulation, dd: DoubledData) -> Tuple[List[int], List[int]]:
    """Triangle and edge maps of the copy swap on the symmetric subtriangulation."""
    by_key = {(tri.triangle_face[k], frozenset(corners)): k for k, corners in enumerate(tri.triangles)}
    triangle_map = []
    for k, corners in enumerate(tri.triangles):
        key = (dd.face_involution[tri.triangle_face[k]],
               frozenset(dd.vertex_involution[v] for v in corners))
        if key not in by_key:
            raise SphereError("subtriangulation is not symmetric under the copy swap", {'triangle': k})
        triangle_map.append(by_key[key])

    edge_map = [-1] * tri.n_edges
    for k, corners in enumerate(tri.triangles):
        g = triangle_map[k]
        image = tri.triangles[g]
        for s, e in enumerate(tri.triangle_edges[k]):
            ends = {dd.vertex_involution[corners[s]], dd.vertex_involution[corners[(s + 1) % 3]]}
            for t in range(3):
                if {image[t], image[(t + 1) % 3]} == ends:
                    edge_map[e] = tri.triangle_edges[g][t]
    return triangle_map, edge_map


def _variable_partner(tri: Triangulation, dd: DoubledData) -> np.ndarray:
    _, edge_map = triangulation_involution(tri, dd)
    layout = VariableLayout(tri)
    slot = {v: i for i, v in enumerate(layout.v1)}
    partner = list(edge_map)
    partner += [tri.n_edges + slot[dd.vertex_involution[v]] for v in layout.v1]
    return np.asarray(partner, dtype=int)


def fold_map(tri: Triangulation, dd: DoubledData) -> np.ndarray:
    """Reduced index per variable; each swap orbit shares one index."""
    partner = _variable_partner(tri, dd)
    ids: Dict[int, int] = {}
    out = []
    for i, p in enumerate(partner):
        root = min(i, int(p))
        if root not in ids:
            ids[root] = len(ids)
        out.append(ids[root])
    return np.asarray(out, dtype=int)


def symmetry_residual(result: SolveResult, tri: Triangulation, dd: DoubledData) -> float:
    x = VariableLayout(tri).pack(result.x_star)
    partner = _variable_partner(tri, dd)
    return float(np.max(np.abs(x - x[partner]))) if x.size else 0.0


@dataclass
class SpherePattern:
    """Circles of C on the Riemann sphere, in the disk chart of copy 1."""

    vertex_circles: Dict[int, PlaneCircle]
    face_circles: Dict[int, PlaneCircle]

    def to_dict(self) -> Dict[str, Any]:
        def circle(x: PlaneCircle) -> Dict[str, Any]:
            return {'center': [x.center.real, x.center.imag], 'radius': x.radius, 'interior': x.interior}

        return {
            'vertex_circles': {str(k): circle(v) for k, v in sorted(self.vertex_circles.items())},
            'face_circles': {str(k): circle(v) for k, v in sorted(self.face_circles.items())},
        }


@dataclass
class SphereRealization:
    doubled: DoubledData
    tri: Triangulation
    result: SolveResult
    layout: HypLayout
    pattern2d: CirclePattern2D
    sphere: SpherePattern
    residuals: Dict[str, float] = field(default_factory=dict)


def _recentred(layout: HypLayout) -> HypLayout:
    """Move the Klein centroid of the laid-out corners to the origin."""
    ks = [klein(z) for pos in layout.positions.values() for z in pos]
    centre = from_klein(sum(ks) / len(ks))
    return layout.moved(inverse(translation(centre)))


def _corner_sum(layout: HypLayout, v: int) -> float:
    total = 0.0
    for k, pos in layout.positions.items():
        corners = layout.tri.triangles[k]
        if v not in corners:
            continue
        cc = corners.index(v)
        ls = layout.lengths(k)
        total += triangle_beta(ls[cc], ls[(cc + 2) % 3], ls[(cc + 1) % 3])
    return total


def _sphere_pattern(c: CellComplex, dd: DoubledData, layout: HypLayout,
                    pattern: CirclePattern2D) -> SpherePattern:
    vertex_circles: Dict[int, PlaneCircle] = {}
    for vc in pattern.vertex_circles:
        vertex_circles.setdefault(dd.vertex_source[vc.vertex], vc.circle)
    vertex_circles[dd.k_inf] = PlaneCircle(0j, 1.0, interior=False)

    face_circles = {dd.face_source[f]: circle for f, circle in pattern.face_circles.items()}
    tri = layout.tri
    for e in dd.sigma_edges:
        source_edge = dd.edge_source[e]
        f = next(g for g in c.edge_faces(source_edge) if dd.k_inf in c.faces[g])
        if f in face_circles:
            continue
        k, s = next((k, s) for k, s in tri.complex.edge_sides(e) if k in layout.positions)
        pos = layout.positions[k]
        geo = geodesic_circle(pos[s], pos[(s + 1) % 3])
        if geo is None:
            raise SphereError(f"boundary geodesic of face {f} passes through the chart centre", {'face': f})
        face_circles[f] = geo
    return SpherePattern(vertex_circles, face_circles)


def sphere_residuals(c: CellComplex, theta: Sequence[float], dd: DoubledData,
                     layout: HypLayout, sphere: SpherePattern) -> Dict[str, float]:
    """Re-measure the emitted pattern against the input data."""
    theta = np.asarray(theta, dtype=float)
    to_k = {c.other_endpoint(e, dd.k_inf): float(theta[e]) for e in c.vertex_edges(dd.k_inf)}
    boundary = 0.0
    for v in dd.sigma_vertices:
        target = to_k.get(dd.vertex_source[v], math.pi)
        boundary = max(boundary, abs(_corner_sum(layout, v) - target))

    angle = 0.0
    for e in range(c.n_edges):
        f, g = c.edge_faces(e)
        measured = circle_intersection_angle(sphere.face_circles[f], sphere.face_circles[g])
        angle = max(angle, abs(measured - theta[e]))

    orthogonality = 0.0
    for f, cycle in enumerate(c.faces):
        for v in cycle:
            if c.is_v1(v) and v in sphere.vertex_circles:
                orthogonality = max(orthogonality,
                                    abs(inversive_product(sphere.vertex_circles[v], sphere.face_circles[f])))
    return {'boundary_angle': boundary, 'theta': angle, 'orthogonality': orthogonality}


def realize_on_sphere(
    c: CellComplex,
    theta: Sequence[float],
    k_inf: int,
    opts: Optional[SolveOptions] = None,
    fold_symmetry: bool = False,
) -> SphereRealization:
    """Solve the doubled problem and return copy 1 as a pattern on the sphere."""
    dd = double(c, theta, k_inf)
    tri = doubled_triangulation(dd)
    # fold edges carry 2 theta, and sigma vertices next to k_inf keep their 2 theta cone angle
    target = TargetData.from_angle_data(dd.angle_data(), tri, wide_edges=dd.sigma_edges,
                                        keep_v0_cone_angles=True)
    fold = fold_map(tri, dd) if fold_symmetry else None
    result = minimize(tri, target, opts, fold=fold)

    residual = symmetry_residual(result, tri, dd)
    if residual > SYMMETRY_TOL:
        raise SymmetryResidualTooLarge(
            f"solution breaks the copy swap by {residual:.3e}", {'residual': residual},
        )
    if residual > SYMMETRY_WARN:
        logger.warning("symmetry residual %.3e above %.0e", residual, SYMMETRY_WARN)

    metric = result.report.metric if result.report and result.report.metric is not None else psi(result.x_star, tri)
    first = [k for k, f in enumerate(tri.triangle_face) if dd.face_copy[f] == 1]
    layout = _recentred(develop(tri, metric, faces=first))
    pattern = circles(layout, metric, dd.complex)
    sphere = _sphere_pattern(c, dd, layout, pattern)

    residuals = sphere_residuals(c, theta, dd, layout, sphere)
    residuals['symmetry'] = residual
    logger.info("sphere pattern: theta residual %.2e, boundary angle residual %.2e",
                residuals['theta'], residuals['boundary_angle'])
    return SphereRealization(dd, tri, result, layout, pattern, sphere, residuals)
