"""
Starting Delaunay patterns and their intersection angles.

Type 2 input: points on the round sphere, triangulated by their convex
hull (scipy.spatial.ConvexHull). Cocircular fans are merged into
polygonal faces.

Type 1 input: a flat cone surface given by edge lengths. It is made
intrinsically Delaunay by edge flips and merged along edges whose
opposite angles sum to pi.

Angle convention: theta is the angle of the lens where the two face
disks overlap. For a Delaunay edge it is the sum of the two opposite
corner angles, so theta = pi exactly on redundant (cocircular) edges.
"""

import heapq
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from hypercircle.cellcomplex import CellComplex, build_complex
from hypercircle.errors import DegenerateInput, Disjoint, DuplicatePoint, InputError, NonConvergence

logger = logging.getLogger(__name__)

COCIRCULAR_TOL = 1e-9
DUPLICATE_TOL = 1e-12
UNIT_TOL = 1e-9
TWO_PI = 2.0 * math.pi


# --- circles ---

@dataclass(frozen=True)
class PlaneCircle:
    """Circle in the plane; `interior` selects which side is the disk."""

    center: complex
    radius: float
    interior: bool = True


@dataclass(frozen=True)
class SphereCap:
    """Cap {x on S^2 : normal . x >= offset} with unit normal."""

    normal: Tuple[float, float, float]
    offset: float

    @property
    def chord_radius(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.offset * self.offset))


Circle = Union[PlaneCircle, SphereCap]


def _clamped_acos(x: float, what: str) -> float:
    if x > 1.0 + 1e-12 or x < -1.0 - 1e-12:
        raise Disjoint(f"{what} do not intersect (cosine {x:.6g})", {'cosine': x})
    return math.acos(min(1.0, max(-1.0, x)))


def circle_intersection_angle(c1: Circle, c2: Circle) -> float:
    """Angle in (0, pi] of the region common to both disks, at a crossing point."""
    if isinstance(c1, SphereCap) and isinstance(c2, SphereCap):
        rho = c1.chord_radius * c2.chord_radius
        if rho == 0.0:
            raise Disjoint("degenerate cap", {})
        dot = float(np.dot(c1.normal, c2.normal))
        return _clamped_acos((c1.offset * c2.offset - dot) / rho, "caps")
    if isinstance(c1, PlaneCircle) and isinstance(c2, PlaneCircle):
        d = abs(c1.center - c2.center)
        cos_theta = (d * d - c1.radius ** 2 - c2.radius ** 2) / (2.0 * c1.radius * c2.radius)
        theta = _clamped_acos(cos_theta, "circles")
        if c1.interior != c2.interior:
            theta = math.pi - theta
        return theta
    raise TypeError("both circles must live in the same model")


# --- stereographic chart ---

def from_stereographic(z: Optional[complex]) -> np.ndarray:
    """Inverse projection from the north pole; None stands for infinity."""
    if z is None:
        return np.array([0.0, 0.0, 1.0])
    x, y = z.real, z.imag
    q = x * x + y * y
    return np.array([2.0 * x, 2.0 * y, q - 1.0]) / (q + 1.0)


def to_stereographic(p: Sequence[float]) -> Optional[complex]:
    if p[2] >= 1.0 - 1e-15:
        return None
    return complex(p[0], p[1]) / (1.0 - p[2])


def _rotation_to_north(q: np.ndarray) -> np.ndarray:
    north = np.array([0.0, 0.0, 1.0])
    v = np.cross(q, north)
    c = float(np.dot(q, north))
    if np.linalg.norm(v) < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
    return np.eye(3) + vx + vx @ vx / (1.0 + c)


def _projected_circle(cap: SphereCap, rotation: np.ndarray) -> PlaneCircle:
    n = rotation @ np.asarray(cap.normal)
    h = cap.offset
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    w = np.cross(n, u)
    rho = cap.chord_radius
    zs = []
    for t in (0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0):
        p = h * n + rho * (math.cos(t) * u + math.sin(t) * w)
        zs.append(complex(p[0], p[1]) / (1.0 - p[2]))
    center, radius = circumcircle(*zs)
    return PlaneCircle(center, radius, interior=bool(n[2] < h))


def circumcircle(z1: complex, z2: complex, z3: complex) -> Tuple[complex, float]:
    b, c = z2 - z1, z3 - z1
    d = 2.0 * (b.real * c.imag - b.imag * c.real)
    if d == 0.0:
        raise DegenerateInput("collinear points have no circumcircle")
    bb, cc = abs(b) ** 2, abs(c) ** 2
    ux = (c.imag * bb - b.imag * cc) / d
    uy = (b.real * cc - c.real * bb) / d
    center = z1 + complex(ux, uy)
    return center, abs(center - z1)


def choose_projection_pole(caps: Sequence[SphereCap]) -> np.ndarray:
    """Candidate direction farthest from every circle (deterministic)."""
    candidates = []
    for sx in (-1.0, 0.0, 1.0):
        for sy in (-1.0, 0.0, 1.0):
            for sz in (-1.0, 0.0, 1.0):
                if sx or sy or sz:
                    candidates.append(np.array([sx, sy, sz]) / math.sqrt(sx * sx + sy * sy + sz * sz))
    candidates.append(np.array([0.267261241912, 0.534522483825, 0.801783725737]))

    def clearance(q: np.ndarray) -> float:
        return min(abs(float(np.dot(c.normal, q)) - c.offset) for c in caps)

    return max(candidates, key=clearance)


# --- spherical Delaunay ---

@dataclass
class DelaunayPattern:
    """Delaunay cell complex with theta per edge (lens angles)."""

    complex: CellComplex
    theta: np.ndarray
    points: Optional[np.ndarray] = None
    caps: Optional[List[SphereCap]] = None
    cone_angles: Optional[np.ndarray] = None
    removed_diagonals: List[Tuple[int, int]] = field(default_factory=list)
    flips: int = 0
    theta_path_gap: float = 0.0

    def with_tags(self, v1) -> 'DelaunayPattern':
        return DelaunayPattern(
            self.complex.with_tags(v1), self.theta, self.points, self.caps,
            self.cone_angles, self.removed_diagonals, self.flips, self.theta_path_gap,
        )


def normalize_points(points: Sequence[Sequence[float]]) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InputError("sphere points must be 3-vectors")
    norms = np.linalg.norm(pts, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
    if bad.size:
        raise InputError(f"point {int(bad[0])} is not on the unit sphere (norm {norms[bad[0]]:.12g})",
                         {'points': bad.tolist()})
    return pts / norms[:, None]


def _chain_cycle(successor: Dict[int, int]) -> List[int]:
    start = min(successor)
    cycle = [start]
    v = successor[start]
    while v != start:
        cycle.append(v)
        v = successor[v]
        if len(cycle) > len(successor):
            raise DegenerateInput("merged facet boundary is not a simple cycle")
    return cycle


def spherical_delaunay(points: Sequence[Sequence[float]]) -> DelaunayPattern:
    pts = normalize_points(points)
    n = len(pts)
    if n < 4:
        raise DegenerateInput(f"need at least 4 points, got {n}")
    pairs = cKDTree(pts).query_pairs(DUPLICATE_TOL)
    if pairs:
        i, j = sorted(min(pairs))
        raise DuplicatePoint(f"points {i} and {j} coincide", {'points': [i, j]})
    centered = pts - pts.mean(axis=0)
    if np.linalg.svd(centered, compute_uv=False)[-1] < 1e-10:
        raise DegenerateInput("all points lie on one circle")
    try:
        hull = ConvexHull(pts)
    except QhullError as e:
        raise DegenerateInput(f"convex hull failed: {e}") from e
    if len(hull.vertices) != n:
        missing = sorted(set(range(n)) - set(int(v) for v in hull.vertices))
        raise DegenerateInput(f"points {missing} are not hull vertices", {'points': missing})

    normals = hull.equations[:, :3]
    offsets = -hull.equations[:, 3]
    simplices = []
    for k, simplex in enumerate(hull.simplices):
        a, b, c = (int(x) for x in simplex)
        if np.dot(np.cross(pts[b] - pts[a], pts[c] - pts[a]), normals[k]) < 0:
            b, c = c, b
        simplices.append((a, b, c))

    # merge adjacent facets whose planes agree
    parent = list(range(len(simplices)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, nbrs in enumerate(hull.neighbors):
        for m in (int(x) for x in nbrs):
            if m > k and np.linalg.norm(normals[k] - normals[m]) < COCIRCULAR_TOL \
                    and abs(offsets[k] - offsets[m]) < COCIRCULAR_TOL:
                rk, rm = find(k), find(m)
                if rk != rm:
                    parent[max(rk, rm)] = min(rk, rm)

    groups: Dict[int, List[int]] = defaultdict(list)
    for k in range(len(simplices)):
        groups[find(k)].append(k)

    faces = []
    caps = []
    removed = []
    for root in sorted(groups):
        members = groups[root]
        directed = set()
        for k in members:
            a, b, c = simplices[k]
            directed |= {(a, b), (b, c), (c, a)}
        successor = {}
        for u, w in directed:
            if (w, u) in directed:
                if u < w:
                    removed.append((u, w))
            else:
                successor[u] = w
        faces.append(_chain_cycle(successor))
        normal = normals[members].mean(axis=0)
        normal /= np.linalg.norm(normal)
        caps.append(SphereCap(tuple(float(x) for x in normal), float(offsets[members].mean())))

    complex_ = build_complex(faces, ())
    theta = np.empty(complex_.n_edges)
    rotation = _rotation_to_north(choose_projection_pole(caps))
    gap = 0.0
    for e in range(complex_.n_edges):
        f, g = complex_.edge_faces(e)
        theta[e] = circle_intersection_angle(caps[f], caps[g])
        planar = circle_intersection_angle(_projected_circle(caps[f], rotation), _projected_circle(caps[g], rotation))
        gap = max(gap, abs(planar - theta[e]))
    if gap > 1e-9:
        logger.warning("plane-normal and stereographic angles differ by %.3e", gap)
    logger.info("spherical Delaunay: %d points, %d faces (%d merged diagonals)",
                n, complex_.n_faces, len(removed))
    return DelaunayPattern(complex_, theta, points=pts, caps=caps,
                           removed_diagonals=sorted(removed), theta_path_gap=gap)


def stereographic_theta(pattern: DelaunayPattern, pole: Optional[Sequence[float]] = None) -> np.ndarray:
    """Re-measure theta by projecting every face circle to the plane."""
    q = np.asarray(pole, dtype=float) if pole is not None else choose_projection_pole(pattern.caps)
    rotation = _rotation_to_north(q / np.linalg.norm(q))
    projected = [_projected_circle(cap, rotation) for cap in pattern.caps]
    c = pattern.complex
    out = np.empty(c.n_edges)
    for e in range(c.n_edges):
        f, g = c.edge_faces(e)
        out[e] = circle_intersection_angle(projected[f], projected[g])
    return out


def empty_cap_violations(pattern: DelaunayPattern, margin: float = 1e-10) -> List[Tuple[int, int]]:
    """(face, point) pairs where a point lies strictly inside a face cap."""
    out = []
    for f, cap in enumerate(pattern.caps):
        heights = pattern.points @ np.asarray(cap.normal)
        for p in np.flatnonzero(heights > cap.offset + margin):
            out.append((f, int(p)))
    return out


# --- flat cone surfaces ---

@dataclass
class FlatConeSurface:
    """Triangles with per-side edge labels and Euclidean edge lengths."""

    triangles: List[Tuple[int, int, int]]
    triangle_edges: List[Tuple[Hashable, Hashable, Hashable]]
    lengths: Dict[Hashable, float]

    @classmethod
    def from_faces(cls, faces: Sequence[Sequence[int]], lengths: Any,
                   face_edges: Optional[Sequence[Sequence[Hashable]]] = None) -> 'FlatConeSurface':
        tris = [tuple(int(v) for v in f) for f in faces]
        if any(len(t) != 3 for t in tris):
            raise InputError("flat cone surface faces must be triangles")
        if face_edges is None:
            labels = [tuple(frozenset((t[s], t[(s + 1) % 3])) for s in range(3)) for t in tris]
            if isinstance(lengths, dict):
                raise InputError("without face_edges, lengths must be a list parallel to faces")
        else:
            labels = [tuple(_label(x) for x in row) for row in face_edges]
        if isinstance(lengths, dict):
            table = {_label(k): float(v) for k, v in lengths.items()}
        else:
            table = {}
            for row, values in zip(labels, lengths):
                for label, value in zip(row, values):
                    table[label] = float(value)
        return cls(tris, labels, table)


def _label(x: Any) -> Hashable:
    return tuple(x) if isinstance(x, list) else x


def _corner_angle(x: float, y: float, z: float) -> float:
    """Euclidean angle between sides x and y, opposite z (half-angle form)."""
    s = 0.5 * (x + y + z)
    num = (s - x) * (s - y)
    den = s * (s - z)
    if num <= 0.0:
        return 0.0
    if den <= 0.0:
        return math.pi
    return 2.0 * math.atan(math.sqrt(num / den))


class IntrinsicTriangulation:
    """Mutable edge-length triangulation supporting intrinsic flips."""

    def __init__(self, surface: FlatConeSurface):
        self.verts = [list(t) for t in surface.triangles]
        ids: Dict[Hashable, int] = {}
        self.tri_edges = []
        for row in surface.triangle_edges:
            out = []
            for label in row:
                if label not in ids:
                    ids[label] = len(ids)
                out.append(ids[label])
            self.tri_edges.append(out)
        self.labels: List[Hashable] = [None] * len(ids)
        for label, e in ids.items():
            self.labels[e] = label
        missing = [label for label in self.labels if label not in surface.lengths]
        if missing:
            raise InputError(f"no length given for edge {missing[0]!r}")
        self.length = [float(surface.lengths[label]) for label in self.labels]
        self.sides: List[List[Tuple[int, int]]] = [[] for _ in self.labels]
        for k, row in enumerate(self.tri_edges):
            for s, e in enumerate(row):
                self.sides[e].append((k, s))
        for e, sides in enumerate(self.sides):
            if len(sides) != 2:
                raise InputError(f"edge {self.labels[e]!r} bounds {len(sides)} triangle sides, expected 2")
        for k in range(len(self.verts)):
            ls = self.side_lengths(k)
            for s in range(3):
                if not ls[s] < ls[(s + 1) % 3] + ls[(s + 2) % 3]:
                    raise InputError(f"triangle {k} violates the triangle inequality", {'triangle': k})
        self.n_vertices = max(v for t in self.verts for v in t) + 1

    @property
    def n_edges(self) -> int:
        return len(self.length)

    def side_lengths(self, k: int) -> List[float]:
        return [self.length[e] for e in self.tri_edges[k]]

    def corner_angle(self, k: int, c: int) -> float:
        ls = self.side_lengths(k)
        return _corner_angle(ls[c], ls[(c + 2) % 3], ls[(c + 1) % 3])

    def opposite_angle_sum(self, e: int) -> float:
        return sum(self.corner_angle(k, (s + 2) % 3) for k, s in self.sides[e])

    def cone_angles(self) -> np.ndarray:
        out = np.zeros(self.n_vertices)
        for k, t in enumerate(self.verts):
            for c in range(3):
                out[t[c]] += self.corner_angle(k, c)
        return out

    def violation(self, e: int) -> float:
        return self.opposite_angle_sum(e) - math.pi

    def flip(self, e: int) -> bool:
        """Flip e inside its quad; False when the flip would create a loop."""
        (k, s), (m, t) = self.sides[e]
        if k == m:
            return False
        a, b, c = (self.verts[k][(s + i) % 3] for i in range(3))
        d = self.verts[m][(t + 2) % 3]
        if c == d:
            return False
        e_bc, e_ca = self.tri_edges[k][(s + 1) % 3], self.tri_edges[k][(s + 2) % 3]
        e_ad, e_db = self.tri_edges[m][(t + 1) % 3], self.tri_edges[m][(t + 2) % 3]
        angle_a = self.corner_angle(k, s) + self.corner_angle(m, (t + 1) % 3)
        l_ac, l_ad = self.length[e_ca], self.length[e_ad]
        new_length = math.sqrt(max(0.0, l_ac ** 2 + l_ad ** 2 - 2.0 * l_ac * l_ad * math.cos(angle_a)))

        remap = {
            (k, (s + 1) % 3): (m, 1),
            (k, (s + 2) % 3): (k, 2),
            (m, (t + 1) % 3): (k, 0),
            (m, (t + 2) % 3): (m, 0),
        }
        self.verts[k] = [a, d, c]
        self.tri_edges[k] = [e_ad, e, e_ca]
        self.verts[m] = [d, b, c]
        self.tri_edges[m] = [e_db, e_bc, e]
        self.length[e] = new_length
        # only the sides on k and m move; the far side of each quad edge stays put
        for edge in {e_ad, e_ca, e_db, e_bc}:
            self.sides[edge] = [remap.get(side, side) for side in self.sides[edge]]
        self.sides[e] = [(k, 1), (m, 2)]
        return True

    def make_delaunay(self, budget: Optional[int] = None, tol: float = COCIRCULAR_TOL) -> int:
        """Flip worst violations first (ties by edge id); returns the flip count."""
        budget = budget if budget is not None else 50 * self.n_edges
        heap = [(-self.violation(e), e) for e in range(self.n_edges) if self.violation(e) > tol]
        heapq.heapify(heap)
        flips = 0
        stuck = set()
        while heap:
            _, e = heapq.heappop(heap)
            current = self.violation(e)
            if current <= tol or e in stuck:
                continue
            if flips >= budget:
                raise NonConvergence(f"no Delaunay triangulation after {flips} flips",
                                     {'flips': flips, 'edge': e, 'violation': current})
            if not self.flip(e):
                stuck.add(e)
                logger.warning("edge %r cannot be flipped without creating a loop", self.labels[e])
                continue
            flips += 1
            logger.debug("flip %d: edge %r", flips, self.labels[e])
            (k, _), (m, _) = self.sides[e]
            for edge in set(self.tri_edges[k]) | set(self.tri_edges[m]):
                v = self.violation(edge)
                if v > tol:
                    heapq.heappush(heap, (-v, edge))
        if stuck:
            worst = max(self.violation(e) for e in stuck)
            if worst > tol:
                raise NonConvergence("non-Delaunay edges remain that cannot be flipped",
                                     {'edges': [repr(self.labels[e]) for e in sorted(stuck)]})
        return flips


def intrinsic_delaunay_flat(surface: FlatConeSurface, budget: Optional[int] = None) -> DelaunayPattern:
    mesh = IntrinsicTriangulation(surface)
    flips = mesh.make_delaunay(budget)
    cones = mesh.cone_angles()
    low = np.flatnonzero(cones < TWO_PI - COCIRCULAR_TOL)
    if low.size:
        raise InputError(f"vertex {int(low[0])} has cone angle {cones[low[0]]:.12g} < 2 pi",
                         {'vertices': low.tolist()})
    v1 = [int(v) for v in np.flatnonzero(cones > TWO_PI + COCIRCULAR_TOL)]

    sums = [mesh.opposite_angle_sum(e) for e in range(mesh.n_edges)]
    redundant = [abs(x - math.pi) <= COCIRCULAR_TOL for x in sums]

    parent = list(range(len(mesh.verts)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, flag in enumerate(redundant):
        if flag:
            (k, _), (m, _) = mesh.sides[e]
            rk, rm = find(k), find(m)
            if rk != rm:
                parent[max(rk, rm)] = min(rk, rm)

    groups: Dict[int, List[int]] = defaultdict(list)
    for k in range(len(mesh.verts)):
        groups[find(k)].append(k)

    faces, face_labels = [], []
    removed = []
    for root in sorted(groups):
        successor, label_of = {}, {}
        for k in groups[root]:
            for s, e in enumerate(mesh.tri_edges[k]):
                tail, head = mesh.verts[k][s], mesh.verts[k][(s + 1) % 3]
                if redundant[e]:
                    if tail < head:
                        removed.append((tail, head))
                    continue
                successor[tail] = head
                label_of[tail] = e
        cycle = _chain_cycle(successor)
        faces.append(cycle)
        face_labels.append([label_of[v] for v in cycle])

    kept = [e for e in range(mesh.n_edges) if not redundant[e]]
    complex_ = build_complex(faces, v1, face_edges=face_labels, edge_order=kept)
    theta = np.array([sums[kept[e]] for e in range(complex_.n_edges)])
    logger.info("intrinsic Delaunay: %d flips, %d faces, %d redundant edges, |V1|=%d",
                flips, complex_.n_faces, len(removed), len(v1))
    return DelaunayPattern(complex_, theta, cone_angles=cones, removed_diagonals=sorted(removed), flips=flips)
