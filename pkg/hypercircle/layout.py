"""
Developing a solved pattern in the Poincare disk.

Isometries are SU(1,1) matrices acting by Moebius transformations on the
unit disk. Real SL(2,R) forms (for reports) come from conjugation by the
Cayley map C = [[1, -i], [1, i]], with the sign fixed so that the first
nonzero entry is positive.

Each triangle k of the subtriangulation gets a matrix M_k that carries
its canonical placement (corner 0 at the origin, corner 1 on the
positive real axis, corner 2 in the upper half) to its developed
position.
"""

import cmath
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from hypercircle.cellcomplex import CellComplex, Triangulation
from hypercircle.delaunay import PlaneCircle, circumcircle
from hypercircle.errors import NumericalDrift, OrthocircleFailure, PairingMismatch
from hypercircle.hypkernel import DecoratedMetric, triangle_beta

logger = logging.getLogger(__name__)

DRIFT_TOL = 1e-7
PAIRING_TOL = 1e-8
IDENTITY_TOL = 1e-8
CAYLEY = np.array([[1.0, -1j], [1.0, 1j]])
CAYLEY_INV = np.linalg.inv(CAYLEY)


# --- disk isometries ---

def mobius(m: np.ndarray, z: complex) -> complex:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def translation(p: complex) -> np.ndarray:
    """Isometry sending 0 to p along the diameter through p."""
    s = 1.0 / math.sqrt(1.0 - abs(p) ** 2)
    return s * np.array([[1.0, p], [np.conj(p), 1.0]], dtype=complex)


def rotation(phi: float) -> np.ndarray:
    h = cmath.exp(0.5j * phi)
    return np.array([[h, 0.0], [0.0, 1.0 / h]], dtype=complex)


def inverse(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex)


def isometry_from_pair(p: complex, q: complex) -> np.ndarray:
    """Isometry sending 0 to p and the positive real axis through q."""
    t = translation(p)
    w = mobius(inverse(t), q)
    return t @ rotation(cmath.phase(w))


def distance(z: complex, w: complex) -> float:
    return 2.0 * math.atanh(min(abs(z - w) / abs(1.0 - np.conj(w) * z), 1.0 - 1e-17))


def matrix_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Distance in PSU(1,1): matrices M and -M act identically."""
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def to_real_form(m: np.ndarray) -> np.ndarray:
    """SL(2,R) representative of a disk isometry."""
    h = CAYLEY_INV @ m @ CAYLEY
    out = np.real(h)
    for x in out.flat:
        if abs(x) > 1e-15:
            if x < 0:
                out = -out
            break
    return out


def klein(z: complex) -> complex:
    return 2.0 * z / (1.0 + abs(z) ** 2)


def from_klein(k: complex) -> complex:
    return k / (1.0 + math.sqrt(max(0.0, 1.0 - abs(k) ** 2)))


def hyperbolic_circle(center: complex, radius: float) -> PlaneCircle:
    """Euclidean picture of the hyperbolic circle of the given radius."""
    rho = abs(center)
    u = center / rho if rho > 0.0 else 1.0
    d = 2.0 * math.atanh(rho)
    t_plus = math.tanh(0.5 * (d + radius))
    t_minus = math.tanh(0.5 * (d - radius))
    return PlaneCircle(u * 0.5 * (t_plus + t_minus), 0.5 * (t_plus - t_minus))


def transform_circle(m: np.ndarray, circle: PlaneCircle) -> PlaneCircle:
    if circle.radius == 0.0:
        return PlaneCircle(mobius(m, circle.center), 0.0, circle.interior)
    pts = [mobius(m, circle.center + circle.radius * cmath.exp(2j * math.pi * k / 3.0)) for k in range(3)]
    center, radius = circumcircle(*pts)
    inside = mobius(m, circle.center)
    interior = circle.interior if abs(inside - center) < radius else not circle.interior
    return PlaneCircle(center, radius, interior)


def geodesic_circle(z1: complex, z2: complex) -> Optional[PlaneCircle]:
    """Circle carrying the geodesic through z1 and z2; None for a diameter."""
    cross = z1.real * z2.imag - z1.imag * z2.real
    if abs(cross) < 1e-12:
        return None
    a = np.array([[z1.real, z1.imag], [z2.real, z2.imag]])
    rhs = 0.5 * np.array([1.0 + abs(z1) ** 2, 1.0 + abs(z2) ** 2])
    cx, cy = np.linalg.solve(a, rhs)
    c = complex(cx, cy)
    return PlaneCircle(c, float(np.sqrt(max(abs(c) ** 2 - 1.0, 0.0))))


# --- development ---

def canonical_triangle(lengths: Sequence[float], anchor: int = 0) -> List[complex]:
    """Corner positions with `anchor` at 0 and the next corner on the positive axis."""
    c = anchor
    out_len = lengths[c]
    in_len = lengths[(c + 2) % 3]
    beta = triangle_beta(out_len, in_len, lengths[(c + 1) % 3])
    pos = [0j, 0j, 0j]
    pos[(c + 1) % 3] = complex(math.tanh(0.5 * out_len), 0.0)
    pos[(c + 2) % 3] = math.tanh(0.5 * in_len) * cmath.exp(1j * beta)
    return pos


@dataclass
class HypLayout:
    """Developed positions of the triangles of T in the disk."""

    tri: Triangulation
    metric: DecoratedMetric
    positions: Dict[int, List[complex]]
    matrices: Dict[int, np.ndarray]
    order: List[int]
    tree_edges: Set[int]
    seed_face: int
    seed_vertex: Optional[int] = None

    @property
    def faces(self) -> List[int]:
        return sorted(self.positions)

    def lengths(self, k: int) -> List[float]:
        return [float(self.metric.l[e]) for e in self.tri.triangle_edges[k]]

    def boundary_edges(self) -> List[int]:
        """Co-tree edges with both sides laid out."""
        out = []
        for e in range(self.tri.n_edges):
            if e in self.tree_edges:
                continue
            (f, _), (g, _) = self.tri.complex.edge_sides(e)
            if f in self.positions and g in self.positions:
                out.append(e)
        return out

    def moved(self, m: np.ndarray) -> 'HypLayout':
        """The same layout after applying the isometry m."""
        positions = {k: [mobius(m, z) for z in pos] for k, pos in self.positions.items()}
        matrices = {k: m @ mk for k, mk in self.matrices.items()}
        return HypLayout(self.tri, self.metric, positions, matrices, list(self.order),
                         set(self.tree_edges), self.seed_face, self.seed_vertex)

    def edge_residual(self) -> float:
        worst = 0.0
        for k, pos in self.positions.items():
            for s, e in enumerate(self.tri.triangle_edges[k]):
                d = distance(pos[s], pos[(s + 1) % 3])
                worst = max(worst, abs(d - float(self.metric.l[e])))
        return worst


def _place_across(layout_pos: Sequence[complex], s: int, lengths_g: Sequence[float], t: int,
                  length: float, where: str) -> List[complex]:
    u, w = layout_pos[s], layout_pos[(s + 1) % 3]
    drift = abs(distance(w, u) - length)
    if drift > DRIFT_TOL:
        raise NumericalDrift(f"shared edge re-measures off by {drift:.3e} at {where}", {'drift': drift})
    frame = isometry_from_pair(w, u)
    canon = canonical_triangle(lengths_g, anchor=t)
    return [mobius(frame, z) for z in canon]


def _matrix_of(pos: Sequence[complex]) -> np.ndarray:
    return isometry_from_pair(pos[0], pos[1])


def _seed_positions(tri: Triangulation, lengths: Sequence[float], k: int) -> List[complex]:
    corners = tri.triangles[k]
    c = min(range(3), key=lambda i: corners[i])
    pos = canonical_triangle(lengths, anchor=c)
    e_out, e_in = tri.triangle_edges[k][c], tri.triangle_edges[k][(c + 2) % 3]
    if e_in < e_out:
        turn = rotation(-cmath.phase(pos[(c + 2) % 3]))
        pos = [mobius(turn, z) for z in pos]
    return pos


def develop(
    tri: Triangulation,
    m: DecoratedMetric,
    seed_vertex: Optional[int] = None,
    faces: Optional[Iterable[int]] = None,
) -> HypLayout:
    """Lay out the triangles by BFS across shared edges.

    Redundant edges are crossed first so that every merged face is laid
    out in one piece. With seed_vertex, the whole star of that vertex is
    placed first, counterclockwise.
    """
    subset = set(range(len(tri.triangles))) if faces is None else set(faces)
    lengths = {k: [float(m.l[e]) for e in tri.triangle_edges[k]] for k in subset}
    c = tri.complex
    positions: Dict[int, List[complex]] = {}
    order: List[int] = []
    tree: Set[int] = set()

    def place(g: int, k: int, s: int) -> None:
        e = tri.triangle_edges[k][s]
        _, t = c.other_side(k, s)
        positions[g] = _place_across(positions[k], s, lengths[g], t, float(m.l[e]), f"edge {e}")
        order.append(g)
        tree.add(e)

    if seed_vertex is not None:
        star = [(k, cc) for k, cc in c.vertex_star(seed_vertex) if k in subset]
        if not star:
            raise NumericalDrift(f"seed vertex {seed_vertex} has no triangle in the layout", {})
        seed = star[0][0]
        positions[seed] = _seed_positions(tri, lengths[seed], seed)
        order.append(seed)
        full_star = c.vertex_star(seed_vertex)
        for i in range(len(full_star) - 1):
            k, cc = full_star[i]
            g, _ = full_star[i + 1]
            s = (cc - 1) % 3
            if k in positions and g in subset and g not in positions:
                place(g, k, s)
    else:
        seed = min(subset)
        positions[seed] = _seed_positions(tri, lengths[seed], seed)
        order.append(seed)

    queue = deque(order)
    while queue:
        k = queue.popleft()
        sides = sorted(range(3), key=lambda s: (not tri.redundant[tri.triangle_edges[k][s]], s))
        for s in sides:
            g, _ = c.other_side(k, s)
            if g in subset and g not in positions:
                place(g, k, s)
                if tri.redundant[tri.triangle_edges[k][s]]:
                    queue.appendleft(g)
                else:
                    queue.append(g)

    missing = subset - set(positions)
    if missing:
        raise NumericalDrift(f"{len(missing)} triangles are not reachable from the seed face",
                             {'missing': sorted(missing)[:20]})
    matrices = {k: _matrix_of(pos) for k, pos in positions.items()}
    layout = HypLayout(tri, m, positions, matrices, order, tree, seed, seed_vertex)
    logger.info("developed %d triangles from seed face %d, %d co-tree edges",
                len(positions), seed, len(layout.boundary_edges()))
    return layout


def neighbour_matrix(layout: HypLayout, k: int, mk: np.ndarray, s: int) -> Tuple[int, np.ndarray]:
    """Placement of the triangle across side s of k, when k sits at mk."""
    tri = layout.tri
    pos = [mobius(mk, z) for z in canonical_triangle(layout.lengths(k))]
    g, t = tri.complex.other_side(k, s)
    e = tri.triangle_edges[k][s]
    placed = _place_across(pos, s, layout.lengths(g), t, float(layout.metric.l[e]), f"edge {e}")
    return g, _matrix_of(placed)


def holonomy(layout: HypLayout, v: int) -> np.ndarray:
    """Composite of the transition isometries once around v."""
    star = layout.tri.complex.vertex_star(v)
    k0 = star[0][0]
    start = layout.matrices.get(k0, np.eye(2, dtype=complex))
    mk = start
    for k, cc in star:
        _, mk = neighbour_matrix(layout, k, mk, (cc - 1) % 3)
    return mk @ inverse(start)


def corner_angle_sum(layout: HypLayout, v: int) -> float:
    total = 0.0
    for k, cc in layout.tri.complex.vertex_star(v):
        ls = layout.lengths(k)
        total += triangle_beta(ls[cc], ls[(cc + 2) % 3], ls[(cc + 1) % 3])
    return total


def interior_vertices(layout: HypLayout) -> List[int]:
    """Vertices whose whole star is laid out."""
    c = layout.tri.complex
    return [v for v in range(c.n_vertices) if all(k in layout.positions for k, _ in c.vertex_star(v))]


# --- Fuchsian generators ---

@dataclass
class FuchsianGenerator:
    """Isometry taking the source copy of an edge onto its target copy."""

    edge: int
    source: Tuple[int, int]
    target: Tuple[int, int]
    disk: np.ndarray
    matrix: np.ndarray
    residual: float
    trivial: bool = False

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def to_dict(self) -> Dict:
        return {
            'edge': self.edge,
            'source': list(self.source),
            'target': list(self.target),
            'matrix': [float(x) for x in self.matrix.flat],
            'residual': self.residual,
            'trivial': self.trivial,
        }


def fuchsian_generators(layout: HypLayout) -> List[FuchsianGenerator]:
    """One generator per co-tree edge; identity pairings are flagged trivial."""
    tri = layout.tri
    out = []
    for e in layout.boundary_edges():
        (f, s), (g, t) = tri.complex.edge_sides(e)
        pf, pg = layout.positions[f], layout.positions[g]
        u_f, w_f = pf[s], pf[(s + 1) % 3]
        w_g, u_g = pg[t], pg[(t + 1) % 3]
        gen = isometry_from_pair(w_f, u_f) @ inverse(isometry_from_pair(w_g, u_g))
        residual = max(abs(mobius(gen, w_g) - w_f), abs(mobius(gen, u_g) - u_f))
        if residual > PAIRING_TOL:
            raise PairingMismatch(
                f"generator for edge {e} misplaces its endpoints by {residual:.3e}",
                {'edge': e, 'residual': residual},
            )
        trivial = matrix_distance(gen, np.eye(2)) < IDENTITY_TOL
        out.append(FuchsianGenerator(e, (g, t), (f, s), gen, to_real_form(gen), residual, trivial))
    logger.info("%d boundary pairings, %d nontrivial generators",
                len(out), sum(1 for x in out if not x.trivial))
    return out


# --- circles ---

def orthocircle(circles: Sequence[PlaneCircle]) -> PlaneCircle:
    """Circle orthogonal to three circles (through them when the radii are 0)."""
    (c1, r1), (c2, r2), (c3, r3) = [(z.center, z.radius) for z in circles]
    a = np.array([[2 * (c2 - c1).real, 2 * (c2 - c1).imag],
                  [2 * (c3 - c1).real, 2 * (c3 - c1).imag]])
    rhs = np.array([abs(c2) ** 2 - abs(c1) ** 2 - (r2 ** 2 - r1 ** 2),
                    abs(c3) ** 2 - abs(c1) ** 2 - (r3 ** 2 - r1 ** 2)])
    det = float(np.linalg.det(a))
    scale = max(abs(c2 - c1), abs(c3 - c1)) ** 2
    if abs(det) <= 1e-14 * max(scale, 1e-300):
        raise OrthocircleFailure("vertex circle centers are collinear", {'det': det})
    x, y = np.linalg.solve(a, rhs)
    center = complex(x, y)
    r_sq = abs(center - c1) ** 2 - r1 ** 2
    if r_sq <= 0.0:
        raise OrthocircleFailure("no real circle is orthogonal to the vertex circles", {'radius_sq': r_sq})
    return PlaneCircle(center, math.sqrt(r_sq))


def inversive_product(a: PlaneCircle, b: PlaneCircle) -> float:
    """0 for orthogonal circles; a point on a circle counts as orthogonal."""
    d2 = abs(a.center - b.center) ** 2
    if a.radius == 0.0 or b.radius == 0.0:
        return math.sqrt(d2) - max(a.radius, b.radius)
    return (d2 - a.radius ** 2 - b.radius ** 2) / (2.0 * a.radius * b.radius)


@dataclass
class VertexCircle:
    vertex: int
    center: complex
    radius: float
    circle: PlaneCircle


@dataclass
class CirclePattern2D:
    """Vertex circles per laid-out corner and one face circle per face of C.

    redundant_residual is the worst disagreement (centre distance plus
    radius difference) between the circles of two triangles that share a
    redundant tree edge; it is 0 when no such edge exists.
    """

    vertex_circles: List[VertexCircle]
    face_circles: Dict[int, PlaneCircle]
    triangle_circles: Dict[int, PlaneCircle]
    extra_circles: List[PlaneCircle] = field(default_factory=list)
    redundant_residual: float = 0.0


def redundant_circle_residual(layout: HypLayout, triangle_circles: Dict[int, PlaneCircle]) -> float:
    tri = layout.tri
    worst = 0.0
    for e in layout.tree_edges:
        if not tri.redundant[e]:
            continue
        (k, _), (j, _) = tri.complex.edge_sides(e)
        if k not in triangle_circles or j not in triangle_circles:
            continue
        a, b = triangle_circles[k], triangle_circles[j]
        worst = max(worst, abs(a.center - b.center) + abs(a.radius - b.radius))
    return worst


def circles(layout: HypLayout, m: DecoratedMetric, c: Optional[CellComplex] = None) -> CirclePattern2D:
    tri = layout.tri
    source = c or tri.source
    seen = set()
    vertex_circles = []
    corner_circles: Dict[Tuple[int, int], PlaneCircle] = {}
    for k in layout.order:
        for cc, v in enumerate(tri.triangles[k]):
            z = layout.positions[k][cc]
            circle = hyperbolic_circle(z, float(m.r[v]))
            corner_circles[(k, cc)] = circle
            key = (v, round(z.real, 9), round(z.imag, 9))
            if key not in seen:
                seen.add(key)
                vertex_circles.append(VertexCircle(v, z, float(m.r[v]), circle))

    triangle_circles = {k: orthocircle([corner_circles[(k, cc)] for cc in range(3)]) for k in layout.order}
    face_circles: Dict[int, PlaneCircle] = {}
    for k in layout.order:
        f = tri.triangle_face[k]
        if f not in face_circles:
            face_circles[f] = triangle_circles[k]
    residual = redundant_circle_residual(layout, triangle_circles)
    logger.debug("%d vertex circles, %d face circles (source has %d faces), redundant residual %.2e",
                 len(vertex_circles), len(face_circles), source.n_faces, residual)
    return CirclePattern2D(vertex_circles, face_circles, triangle_circles, redundant_residual=residual)


# --- tiling ---

@dataclass
class TileCopy:
    word: Tuple[int, ...]
    matrix: np.ndarray


def tile(layout: HypLayout, gens: Sequence[FuchsianGenerator], depth: int) -> List[TileCopy]:
    """Reduced words up to `depth` in the nontrivial generators, deduplicated."""
    letters: List[Tuple[int, np.ndarray]] = []
    for i, gen in enumerate(x for x in gens if not x.trivial):
        letters.append((i + 1, gen.disk))
        letters.append((-(i + 1), inverse(gen.disk)))
    copies = [TileCopy((), np.eye(2, dtype=complex))]
    frontier = list(copies)
    for _ in range(max(0, depth)):
        nxt = []
        for copy in frontier:
            for letter, mat in letters:
                if copy.word and copy.word[-1] == -letter:
                    continue
                candidate = copy.matrix @ mat
                if any(matrix_distance(candidate, other.matrix) < 1e-9 for other in copies):
                    continue
                new = TileCopy(copy.word + (letter,), candidate)
                copies.append(new)
                nxt.append(new)
        frontier = nxt
    logger.debug("tiling depth %d: %d copies", depth, len(copies))
    return copies


def triangle_sample(layout: HypLayout, k: int) -> complex:
    """A point inside laid-out triangle k (Klein centroid)."""
    ks = [klein(z) for z in layout.positions[k]]
    return from_klein(sum(ks) / 3.0)


def contains(corners: Sequence[complex], z: complex, margin: float = 1e-9) -> bool:
    """Point-in-geodesic-triangle test; geodesics are straight in the Klein model."""
    p = klein(z)
    ks = [klein(w) for w in corners]
    signs = []
    for i in range(3):
        a, b = ks[i], ks[(i + 1) % 3]
        cross = (b - a).real * (p - a).imag - (b - a).imag * (p - a).real
        signs.append(cross)
    return all(x > margin for x in signs) or all(x < -margin for x in signs)
