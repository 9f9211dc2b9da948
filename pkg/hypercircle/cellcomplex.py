"""
Polygonal cell complexes on closed oriented surfaces.

A face is a cyclic vertex sequence. Side s of face f runs from corner s to
corner s+1 and carries one edge id. Edges are either identified by their
endpoint pair (vertex-pair mode) or given explicit per-side labels, which
allows several edges between the same two vertices (Lawson-type nets).

Views built on top of a complex:
- DualComplex: one dual vertex per face, one dual edge per edge, one dual
  face per vertex.
- Subdivision: the triangulation by corner edges and dual edges, whose
  faces are (primal vertex, dual edge) triangles.
- Triangulation: the fan subtriangulation with redundant diagonals.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from hypercircle.errors import (
    BadCycle,
    ComplexError,
    InconsistentOrientation,
    NonManifoldEdge,
    StrongRegularityViolation,
)

logger = logging.getLogger(__name__)

Corner = Tuple[int, int]
Side = Tuple[int, int]


class CellComplex:
    """Validated cell complex with a V0/V1 vertex partition.

    Use build_complex() to construct one; the constructor only derives
    incidence tables and assumes the input already passed validation.
    """

    def __init__(
        self,
        faces: Tuple[Tuple[int, ...], ...],
        face_edges: Tuple[Tuple[int, ...], ...],
        edges: Tuple[Tuple[int, int], ...],
        n_vertices: int,
        v1: Iterable[int],
        labelled: bool,
        edge_labels: Optional[Tuple[Hashable, ...]] = None,
    ):
        self.faces = faces
        self.face_edges = face_edges
        self.edges = edges
        self.n_vertices = n_vertices
        self.v1 = frozenset(v1)
        self.labelled = labelled
        self.edge_labels = edge_labels if edge_labels is not None else tuple(range(len(edges)))

        sides: List[List[Side]] = [[] for _ in edges]
        for f, cycle_edges in enumerate(face_edges):
            for s, e in enumerate(cycle_edges):
                sides[e].append((f, s))
        self._edge_sides = [tuple(s) for s in sides]

        corners: List[List[Corner]] = [[] for _ in range(n_vertices)]
        for f, cycle in enumerate(faces):
            for c, v in enumerate(cycle):
                corners[v].append((f, c))
        self._corners = corners
        self._star_cache: Dict[int, Tuple[Corner, ...]] = {}

    # --- sizes ---

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    @property
    def v0(self) -> frozenset:
        return frozenset(range(self.n_vertices)) - self.v1

    def is_v1(self, k: int) -> bool:
        return k in self.v1

    # --- incidence ---

    def edge_sides(self, e: int) -> Tuple[Side, ...]:
        return self._edge_sides[e]

    def edge_faces(self, e: int) -> Tuple[int, int]:
        (f, _), (g, _) = self._edge_sides[e]
        return f, g

    def side_vertices(self, f: int, s: int) -> Tuple[int, int]:
        cycle = self.faces[f]
        return cycle[s], cycle[(s + 1) % len(cycle)]

    def other_side(self, f: int, s: int) -> Side:
        e = self.face_edges[f][s]
        first, second = self._edge_sides[e]
        return second if first == (f, s) else first

    def corner_index(self, f: int, v: int) -> int:
        return self.faces[f].index(v)

    def corners(self, v: int) -> List[Corner]:
        return list(self._corners[v])

    def vertex_star(self, v: int) -> Tuple[Corner, ...]:
        """Corners around v in counterclockwise order, starting at its first corner."""
        if v in self._star_cache:
            return self._star_cache[v]
        start = self._corners[v][0]
        star = [start]
        f, c = start
        while True:
            n = len(self.faces[f])
            g, t = self.other_side(f, (c - 1) % n)
            if (g, t) == start:
                break
            star.append((g, t))
            if len(star) > len(self._corners[v]):
                break
            f, c = g, t
        self._star_cache[v] = tuple(star)
        return self._star_cache[v]

    def vertex_edges(self, v: int) -> List[int]:
        """Edges at v in the order of vertex_star (the incoming side of each corner)."""
        out = []
        for f, c in self.vertex_star(v):
            out.append(self.face_edges[f][(c - 1) % len(self.faces[f])])
        return out

    def degree(self, v: int) -> int:
        return len(self._corners[v])

    def other_endpoint(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return b if a == v else a

    def with_tags(self, v1: Iterable[int]) -> 'CellComplex':
        """Same combinatorics under a different V0/V1 partition."""
        return CellComplex(
            self.faces, self.face_edges, self.edges, self.n_vertices, v1,
            self.labelled, self.edge_labels,
        )

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            'faces': [list(c) for c in self.faces],
            'v1': sorted(self.v1),
        }
        if self.labelled:
            doc['face_edges'] = [list(c) for c in self.face_edges]
        return doc

    # --- validation ---

    def _validate(self) -> None:
        for e, sides in enumerate(self._edge_sides):
            if len(sides) != 2:
                raise NonManifoldEdge(
                    f"edge {e} ({self.edge_labels[e]!r}) bounds {len(sides)} face sides, expected 2",
                    {'edge': e, 'sides': [list(s) for s in sides]},
                )
            (f, s), (g, t) = sides
            if f == g:
                raise StrongRegularityViolation(
                    f"face {f} is glued to itself along edge {e}",
                    {'face': f, 'edge': e},
                )
            tail, head = self.side_vertices(f, s)
            other_tail, other_head = self.side_vertices(g, t)
            if {tail, head} != {other_tail, other_head}:
                raise NonManifoldEdge(
                    f"edge {e} ({self.edge_labels[e]!r}) glues different vertex pairs",
                    {'edge': e, 'pairs': [[tail, head], [other_tail, other_head]]},
                )
            if (tail, head) != (other_head, other_tail):
                raise InconsistentOrientation(
                    f"faces {f} and {g} traverse edge {e} in the same direction",
                    {'edge': e, 'faces': [f, g]},
                )

        for v in range(self.n_vertices):
            star = self.vertex_star(v)
            if len(star) != len(self._corners[v]):
                raise StrongRegularityViolation(
                    f"link of vertex {v} is not a single cycle",
                    {'vertex': v, 'link': [list(c) for c in star], 'corners': len(self._corners[v])},
                )
            if len(star) < 3:
                raise StrongRegularityViolation(
                    f"vertex {v} has degree {len(star)} < 3",
                    {'vertex': v, 'degree': len(star)},
                )

        if not self.labelled:
            self._check_face_intersections()

        chi = self.euler_characteristic
        if chi > 2 or chi % 2:
            raise ComplexError(f"Euler characteristic {chi} is not that of a closed oriented surface")

    def _check_face_intersections(self) -> None:
        vertex_faces: Dict[int, set] = defaultdict(set)
        for f, cycle in enumerate(self.faces):
            for v in cycle:
                vertex_faces[v].add(f)
        edge_sets = [set(c) for c in self.face_edges]
        vertex_sets = [set(c) for c in self.faces]
        for f in range(self.n_faces):
            neighbours = set()
            for v in self.faces[f]:
                neighbours |= vertex_faces[v]
            for g in sorted(neighbours):
                if g <= f:
                    continue
                shared = vertex_sets[f] & vertex_sets[g]
                if len(shared) < 2:
                    continue
                shared_edges = edge_sets[f] & edge_sets[g]
                ok = (
                    len(shared) == 2
                    and len(shared_edges) == 1
                    and set(self.edges[next(iter(shared_edges))]) == shared
                )
                if not ok:
                    raise StrongRegularityViolation(
                        f"faces {f} and {g} meet in {sorted(shared)}, which is not a single cell",
                        {'faces': [f, g], 'shared_vertices': sorted(shared), 'shared_edges': sorted(shared_edges)},
                    )


def build_complex(
    face_cycles: Sequence[Sequence[int]],
    v1_tags: Iterable[int],
    face_edges: Optional[Sequence[Sequence[Hashable]]] = None,
    edge_order: Optional[Sequence[Hashable]] = None,
) -> CellComplex:
    """Validate face cycles and assemble a CellComplex.

    Without face_edges, sides are identified by their unordered endpoint
    pair. With face_edges, each side carries a label and equal labels are
    glued. Edge ids follow edge_order when given, else first appearance.
    """
    faces: List[Tuple[int, ...]] = []
    for f, cycle in enumerate(face_cycles):
        cycle = tuple(int(v) for v in cycle)
        if len(cycle) < 3:
            raise BadCycle(f"face {f} has {len(cycle)} vertices, need at least 3", {'face': f})
        if min(cycle) < 0:
            raise BadCycle(f"face {f} has a negative vertex index", {'face': f})
        if len(set(cycle)) != len(cycle):
            raise BadCycle(f"face {f} repeats a vertex: {list(cycle)}", {'face': f, 'cycle': list(cycle)})
        faces.append(cycle)
    if not faces:
        raise BadCycle("complex has no faces")

    n_vertices = max(max(c) for c in faces) + 1
    used = set(v for c in faces for v in c)
    if len(used) != n_vertices:
        missing = sorted(set(range(n_vertices)) - used)
        raise BadCycle(f"vertex indices are not dense; unused: {missing[:10]}", {'unused': missing})

    labelled = face_edges is not None
    if labelled:
        if len(face_edges) != len(faces):
            raise BadCycle("face_edges must list one label per side of every face")
        side_labels = []
        for f, labels in enumerate(face_edges):
            if len(labels) != len(faces[f]):
                raise BadCycle(f"face {f} has {len(faces[f])} sides but {len(labels)} edge labels", {'face': f})
            side_labels.append([_hashable(x) for x in labels])
    else:
        side_labels = [
            [frozenset((cycle[s], cycle[(s + 1) % len(cycle)])) for s in range(len(cycle))]
            for cycle in faces
        ]

    if edge_order is not None:
        ids = {_hashable(label): i for i, label in enumerate(edge_order)}
        seen = set(label for labels in side_labels for label in labels)
        unknown = [label for label in seen if label not in ids]
        if unknown or len(ids) != len(seen):
            raise BadCycle("edge_order does not match the side labels", {'unknown': [repr(u) for u in unknown[:5]]})
    else:
        ids = {}
        for labels in side_labels:
            for label in labels:
                if label not in ids:
                    ids[label] = len(ids)

    n_edges = len(ids)
    endpoints: List[Optional[Tuple[int, int]]] = [None] * n_edges
    labels_by_id: List[Hashable] = [None] * n_edges
    face_edge_ids = []
    for f, labels in enumerate(side_labels):
        row = []
        for s, label in enumerate(labels):
            e = ids[label]
            if endpoints[e] is None:
                endpoints[e] = (faces[f][s], faces[f][(s + 1) % len(faces[f])])
                labels_by_id[e] = label
            row.append(e)
        face_edge_ids.append(tuple(row))

    v1 = set(int(v) for v in v1_tags)
    bad = sorted(v for v in v1 if v < 0 or v >= n_vertices)
    if bad:
        raise BadCycle(f"V1 tags reference unknown vertices {bad}", {'vertices': bad})

    complex_ = CellComplex(
        tuple(faces), tuple(face_edge_ids), tuple(endpoints), n_vertices, v1, labelled,
        tuple(labels_by_id),
    )
    complex_._validate()
    logger.debug(
        "built complex V=%d E=%d F=%d genus=%d |V1|=%d",
        complex_.n_vertices, complex_.n_edges, complex_.n_faces, complex_.genus, len(complex_.v1),
    )
    return complex_


def build_from_net(
    polygons: Sequence[int],
    identifications: Sequence[Sequence[int]],
    v1_corners: Optional[Iterable[Sequence[int]]] = None,
    v1_all: bool = False,
) -> CellComplex:
    """Glue a polygon net along side pairings.

    polygons[f] is the side count of polygon f. Each identification
    [f, s, g, t] glues side s of f to side t of g with reversed direction.
    Vertices are the classes of corners under the gluing, numbered by first
    appearance in (face, corner) order.
    """
    corner_ids = {}
    for f, n in enumerate(polygons):
        if n < 3:
            raise BadCycle(f"polygon {f} has {n} sides", {'face': f})
        for c in range(n):
            corner_ids[(f, c)] = len(corner_ids)
    parent = list(range(len(corner_ids)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    side_label: Dict[Side, Hashable] = {}
    for k, pairing in enumerate(identifications):
        if len(pairing) != 4:
            raise BadCycle(f"identification {k} must be [face, side, face, side]", {'identification': k})
        f, s, g, t = (int(x) for x in pairing)
        for face, side in ((f, s), (g, t)):
            if face < 0 or face >= len(polygons) or side < 0 or side >= polygons[face]:
                raise BadCycle(f"identification {k} references missing side {face}:{side}", {'identification': k})
            if (face, side) in side_label:
                raise NonManifoldEdge(f"side {face}:{side} is identified twice", {'side': [face, side]})
            side_label[(face, side)] = ('net', k)
        nf, ng = polygons[f], polygons[g]
        union(corner_ids[(f, s)], corner_ids[(g, (t + 1) % ng)])
        union(corner_ids[(f, (s + 1) % nf)], corner_ids[(g, t)])

    loose = [[f, s] for f, n in enumerate(polygons) for s in range(n) if (f, s) not in side_label]
    if loose:
        raise NonManifoldEdge(f"{len(loose)} sides are not identified (surface with boundary)", {'sides': loose[:10]})

    vertex_of_root: Dict[int, int] = {}
    cycles = []
    labels = []
    for f, n in enumerate(polygons):
        cycle = []
        for c in range(n):
            root = find(corner_ids[(f, c)])
            if root not in vertex_of_root:
                vertex_of_root[root] = len(vertex_of_root)
            cycle.append(vertex_of_root[root])
        cycles.append(cycle)
        labels.append([side_label[(f, s)] for s in range(n)])

    if v1_all:
        v1 = set(range(len(vertex_of_root)))
    else:
        v1 = set(cycles[int(f)][int(c)] for f, c in (v1_corners or []))
    return build_complex(cycles, v1, face_edges=labels)


def _hashable(label: Any) -> Hashable:
    if isinstance(label, list):
        return tuple(_hashable(x) for x in label)
    return label


# --- dual complex ---

@dataclass(frozen=True)
class DualComplex:
    """Dual cells with links back to the primal complex.

    Dual vertex f is primal face f, dual edge e crosses primal edge e, and
    dual face v surrounds primal vertex v.
    """

    primal: CellComplex
    edge_ends: Tuple[Tuple[int, int], ...]
    face_cycles: Tuple[Tuple[int, ...], ...]
    face_edges: Tuple[Tuple[int, ...], ...]

    @property
    def n_vertices(self) -> int:
        return self.primal.n_faces

    @property
    def n_edges(self) -> int:
        return len(self.edge_ends)

    @property
    def n_faces(self) -> int:
        return len(self.face_cycles)

    def as_complex(self) -> CellComplex:
        return build_complex(
            self.face_cycles, (), face_edges=self.face_edges,
            edge_order=list(range(self.n_edges)),
        )


def dual(c: CellComplex) -> DualComplex:
    edge_ends = tuple(c.edge_faces(e) for e in range(c.n_edges))
    cycles = []
    crossings = []
    for v in range(c.n_vertices):
        star = c.vertex_star(v)
        cycles.append(tuple(f for f, _ in star))
        crossings.append(tuple(c.face_edges[f][(k - 1) % len(c.faces[f])] for f, k in star))
    return DualComplex(c, edge_ends, tuple(cycles), tuple(crossings))


# --- subdivision by corner and dual edges ---

@dataclass(frozen=True)
class Subdivision:
    """Triangles i-O_f-O_g, one per (edge, endpoint).

    Vertex ids 0..|V|-1 are primal vertices; |V|+f is the dual vertex O_f.
    """

    primal: CellComplex
    complex: CellComplex
    face_primal: Tuple[int, ...]
    face_edge: Tuple[int, ...]

    @property
    def n_primal(self) -> int:
        return self.primal.n_vertices

    def is_primal(self, vhat: int) -> bool:
        return vhat < self.primal.n_vertices

    def dual_vertex(self, f: int) -> int:
        return self.primal.n_vertices + f

    def is_dual_edge(self, ehat: int) -> bool:
        return ehat < self.primal.n_edges


def subdivide(c: CellComplex) -> Subdivision:
    n = c.n_vertices
    triangles = []
    labels = []
    face_primal = []
    face_edge = []
    for e in range(c.n_edges):
        (f, s), (g, t) = c.edge_sides(e)
        u, w = c.side_vertices(f, s)
        of, og = n + f, n + g
        nf, ng = len(c.faces[f]), len(c.faces[g])
        u_in_g = (t + 1) % ng
        triangles.append((u, og, of))
        labels.append((('c', g, u_in_g), ('d', e), ('c', f, s)))
        face_primal.append(u)
        face_edge.append(e)
        triangles.append((w, of, og))
        labels.append((('c', f, (s + 1) % nf), ('d', e), ('c', g, t)))
        face_primal.append(w)
        face_edge.append(e)

    order: List[Hashable] = [('d', e) for e in range(c.n_edges)]
    order += [('c', f, k) for f in range(c.n_faces) for k in range(len(c.faces[f]))]
    tagged = [v for v in c.v1]
    hat = build_complex(triangles, tagged, face_edges=labels, edge_order=order)
    return Subdivision(c, hat, tuple(face_primal), tuple(face_edge))


# --- subtriangulation ---

@dataclass(frozen=True)
class Triangulation:
    """Fan subtriangulation. Edge ids below source.n_edges are source edges."""

    source: CellComplex
    complex: CellComplex
    redundant: Tuple[bool, ...]
    edge_class: Tuple[int, ...]
    triangle_face: Tuple[int, ...]

    @property
    def n_vertices(self) -> int:
        return self.complex.n_vertices

    @property
    def n_edges(self) -> int:
        return self.complex.n_edges

    @property
    def triangles(self) -> Tuple[Tuple[int, ...], ...]:
        return self.complex.faces

    @property
    def triangle_edges(self) -> Tuple[Tuple[int, ...], ...]:
        return self.complex.face_edges

    @property
    def v1(self) -> frozenset:
        return self.complex.v1

    @property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        return self.complex.edges

    def source_triangles(self, f: int) -> List[int]:
        return [k for k, g in enumerate(self.triangle_face) if g == f]

    def merged_faces(self) -> List[Tuple[int, ...]]:
        """Contract redundant edges and return the merged face cycles."""
        groups: Dict[int, List[int]] = defaultdict(list)
        for k, f in enumerate(self.triangle_face):
            groups[f].append(k)
        out = []
        for f in sorted(groups):
            successor = {}
            for k in groups[f]:
                for s, e in enumerate(self.triangle_edges[k]):
                    if not self.redundant[e]:
                        tail, head = self.complex.side_vertices(k, s)
                        successor[tail] = head
            start = min(successor)
            cycle = [start]
            v = successor[start]
            while v != start:
                cycle.append(v)
                v = successor[v]
            out.append(tuple(cycle))
        return out


def fan_triangles(cycle: Sequence[int], key: Callable[[int], Any] = lambda v: v) -> List[Tuple[int, int, int]]:
    """Fan of a polygon from its vertex of least key, as corner-index triples."""
    n = len(cycle)
    p = min(range(n), key=lambda i: key(cycle[i]))
    return [(p, (p + i) % n, (p + i + 1) % n) for i in range(1, n - 1)]


def subtriangulate(c: CellComplex, fan_key: Optional[Callable[[int], Any]] = None) -> Triangulation:
    key = fan_key or (lambda v: v)
    triangles = []
    labels = []
    triangle_face = []
    diagonals: List[Hashable] = []
    for f, cycle in enumerate(c.faces):
        n = len(cycle)
        sides = c.face_edges[f]
        for p, i, j in fan_triangles(cycle, key):
            tri = (cycle[p], cycle[i], cycle[j])
            row = []
            for a, b in ((p, i), (i, j), (j, p)):
                if (b - a) % n == 1:
                    row.append(('e', sides[a]))
                elif (a - b) % n == 1:
                    row.append(('e', sides[b]))
                else:
                    label = ('diag', f, min(a, b), max(a, b))
                    if label not in diagonals:
                        diagonals.append(label)
                    row.append(label)
            triangles.append(tri)
            labels.append(tuple(row))
            triangle_face.append(f)

    order = [('e', e) for e in range(c.n_edges)] + diagonals
    tri_complex = build_complex(triangles, c.v1, face_edges=labels, edge_order=order)
    redundant = tuple(e >= c.n_edges for e in range(tri_complex.n_edges))
    edge_class = tuple(
        1 if (u in c.v1 and w in c.v1) else 0 for u, w in tri_complex.edges
    )
    logger.debug("subtriangulated %d faces into %d triangles, %d redundant edges",
                 c.n_faces, len(triangles), len(diagonals))
    return Triangulation(c, tri_complex, redundant, edge_class, tuple(triangle_face))
