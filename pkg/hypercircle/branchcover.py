"""
Lifting a spherical Delaunay pattern through a branched cover.

The cover is described by monodromy permutations at branch vertices.
Cut the sphere along a spanning tree of the base one-skeleton, rooted at
the lowest-id unbranched vertex. The complement is a disk carrying N
trivial sheets, and crossing a tree edge permutes the sheets.

Convention: perm[i] is the sheet reached from sheet i. The permutation of
a vertex is the loop around it read counterclockwise, starting just
after its cut toward the root. Loops compose left to right in crossing
order.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from hypercircle.cellcomplex import CellComplex, build_complex
from hypercircle.delaunay import DelaunayPattern
from hypercircle.energy import AngleData
from hypercircle.errors import (
    BranchPointNotVertex,
    CoverError,
    DisconnectedCover,
    MonodromyProductNotIdentity,
    OddBranchCount,
)

logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]
TWO_PI = 2.0 * math.pi


def perm_identity(n: int) -> Perm:
    return tuple(range(n))


def perm_compose(first: Perm, then: Perm) -> Perm:
    """Apply `first`, then `then`."""
    return tuple(then[first[i]] for i in range(len(first)))


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def normalize_perm(images: Sequence[int], sheets: int) -> Perm:
    """Accept 0-based or 1-based image lists."""
    images = [int(x) for x in images]
    if sorted(images) == list(range(1, sheets + 1)):
        images = [x - 1 for x in images]
    if sorted(images) != list(range(sheets)):
        raise CoverError(f"{images} is not a permutation of {sheets} sheets", {'perm': images})
    return tuple(images)


@dataclass
class BranchCoverSpec:
    sheets: int
    monodromy: Dict[int, Perm]

    @classmethod
    def from_dict(cls, doc: Mapping) -> 'BranchCoverSpec':
        sheets = int(doc['sheets'])
        if sheets < 1:
            raise CoverError(f"sheet count must be positive, got {sheets}")
        monodromy = {}
        for entry in doc.get('branch', []):
            v = int(entry['vertex'])
            if v in monodromy:
                raise CoverError(f"vertex {v} is listed twice", {'vertex': v})
            monodromy[v] = normalize_perm(entry['perm'], sheets)
        return cls(sheets, monodromy)

    def perm_at(self, v: int) -> Perm:
        return self.monodromy.get(v, perm_identity(self.sheets))

    def to_dict(self) -> Dict:
        return {
            'sheets': self.sheets,
            'branch': [{'vertex': v, 'perm': list(p)} for v, p in sorted(self.monodromy.items())],
        }


@dataclass
class LiftedAngleData:
    """Covering complex with pulled-back theta and Theta = 2 pi N_k."""

    complex: CellComplex
    theta: np.ndarray
    Theta: np.ndarray
    ramification: np.ndarray
    sheets: int
    base: CellComplex
    vertex_proj: np.ndarray
    edge_proj: np.ndarray
    face_proj: np.ndarray
    deck: Optional[Dict[str, np.ndarray]] = None
    tree_perms: Dict[int, Perm] = field(default_factory=dict)

    @property
    def genus(self) -> int:
        return self.complex.genus

    def angle_data(self, corrected: bool = True) -> AngleData:
        data = AngleData(self.complex, self.theta, self.Theta)
        return data.corrected() if corrected else data


def _spanning_tree(c: CellComplex, root: int) -> Dict[int, Tuple[int, int]]:
    """BFS tree: child vertex -> (parent vertex, edge id)."""
    parent: Dict[int, Tuple[int, int]] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in sorted(c.vertex_edges(v)):
            w = c.other_endpoint(e, v)
            if w not in seen:
                seen.add(w)
                parent[w] = (v, e)
                queue.append(w)
    return parent


def _children_ccw(c: CellComplex, v: int, parent_edge: Optional[int], tree_edges: set) -> List[int]:
    edges = c.vertex_edges(v)
    if parent_edge is not None:
        i = edges.index(parent_edge)
        edges = edges[i + 1:] + edges[:i]
    return [e for e in edges if e in tree_edges and e != parent_edge]


def tree_permutations(c: CellComplex, spec: BranchCoverSpec) -> Tuple[int, Dict[int, Tuple[int, Perm]]]:
    """Sheet permutation on every tree edge, keyed by edge: (child vertex, perm).

    perm is applied when crossing the edge counterclockwise around the child.
    """
    n = spec.sheets
    trivial = perm_identity(n)
    unbranched = [v for v in range(c.n_vertices) if spec.perm_at(v) == trivial]
    root = unbranched[0] if unbranched else 0
    parent = _spanning_tree(c, root)
    tree_edges = {e for _, e in parent.values()}
    child_of_edge = {e: w for w, (_, e) in parent.items()}

    order = [root]
    for v in order:
        for e in _children_ccw(c, v, parent[v][1] if v in parent else None, tree_edges):
            order.append(child_of_edge[e])

    rho: Dict[int, Tuple[int, Perm]] = {}
    for v in reversed(order):
        parent_edge = parent[v][1] if v in parent else None
        children = _children_ccw(c, v, parent_edge, tree_edges)
        inner = trivial
        for e in children:
            inner = perm_compose(rho[e][1], inner)
        if parent_edge is None:
            loop = perm_inverse(inner)
            if loop != spec.perm_at(v):
                raise MonodromyProductNotIdentity(
                    f"monodromy around root vertex {v} is {list(loop)}, expected {list(spec.perm_at(v))}",
                    {'root': v, 'product': list(loop)},
                )
        else:
            rho[parent_edge] = (v, perm_compose(inner, spec.perm_at(v)))
    return root, rho


def _check_transitive(n: int, perms: Sequence[Perm]) -> None:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i, j in enumerate(p):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    classes = sorted(set(find(i) for i in range(n)))
    if len(classes) > 1:
        raise DisconnectedCover(
            f"monodromy splits the {n} sheets into {len(classes)} orbits",
            {'orbits': [[i for i in range(n) if find(i) == r] for r in classes]},
        )


def lift(base: DelaunayPattern, spec: BranchCoverSpec) -> LiftedAngleData:
    c = base.complex
    n = spec.sheets
    for v in spec.monodromy:
        if v < 0 or v >= c.n_vertices:
            raise BranchPointNotVertex(f"branch point {v} is not a vertex of the base complex", {'vertex': v})
    _check_transitive(n, list(spec.monodromy.values()) or [perm_identity(n)])
    root, rho = tree_permutations(c, spec)

    # sheet permutation applied when leaving base face f through side s
    def crossing(f: int, s: int) -> Perm:
        e = c.face_edges[f][s]
        if e not in rho:
            return perm_identity(n)
        child, p = rho[e]
        _, head = c.side_vertices(f, s)
        return p if head == child else perm_inverse(p)

    F = c.n_faces

    corner_ids: Dict[Tuple[int, int, int], int] = {}
    for i in range(n):
        for f, cycle in enumerate(c.faces):
            for k in range(len(cycle)):
                corner_ids[(f, k, i)] = len(corner_ids)
    uf = list(range(len(corner_ids)))

    def find(x: int) -> int:
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            uf[max(rx, ry)] = min(rx, ry)

    side_label: Dict[Tuple[int, int, int], Tuple[int, int]] = {}
    for e in range(c.n_edges):
        (f, s), (g, t) = c.edge_sides(e)
        p = crossing(f, s)
        nf, ng = len(c.faces[f]), len(c.faces[g])
        for i in range(n):
            j = p[i]
            side_label[(f, s, i)] = (e, i)
            side_label[(g, t, j)] = (e, i)
            union(corner_ids[(f, s, i)], corner_ids[(g, (t + 1) % ng, j)])
            union(corner_ids[(f, (s + 1) % nf, i)], corner_ids[(g, t, j)])

    # vertices ordered by base vertex, then by first corner
    classes: Dict[int, List[Tuple[int, int, int]]] = {}
    for key in sorted(corner_ids, key=lambda k: corner_ids[k]):
        classes.setdefault(find(corner_ids[key]), []).append(key)

    def base_vertex(key: Tuple[int, int, int]) -> int:
        f, k, _ = key
        return c.faces[f][k]

    roots = sorted(classes, key=lambda r: (base_vertex(classes[r][0]), r))
    vertex_of_root = {r: i for i, r in enumerate(roots)}
    vertex_proj = np.array([base_vertex(classes[r][0]) for r in roots], dtype=int)
    ramification = np.array(
        [len(classes[r]) // c.degree(int(vertex_proj[i])) for i, r in enumerate(roots)], dtype=int
    )

    cycles, labels, face_proj = [None] * (n * F), [None] * (n * F), np.zeros(n * F, dtype=int)
    for i in range(n):
        for f, cycle in enumerate(c.faces):
            fid = i * F + f
            cycles[fid] = [vertex_of_root[find(corner_ids[(f, k, i)])] for k in range(len(cycle))]
            labels[fid] = [side_label[(f, s, i)] for s in range(len(cycle))]
            face_proj[fid] = f

    v1 = [v for v in range(len(roots)) if ramification[v] >= 2]
    order = [(e, i) for e in range(c.n_edges) for i in range(n)]
    covering = build_complex(cycles, v1, face_edges=labels, edge_order=order)
    edge_proj = np.array([e for e, _ in order], dtype=int)

    chi_expected = n * c.euler_characteristic - int(np.sum(ramification - 1))
    if covering.euler_characteristic != chi_expected:
        raise CoverError(
            f"Riemann-Hurwitz fails: chi = {covering.euler_characteristic}, expected {chi_expected}",
            {'chi': covering.euler_characteristic, 'expected': chi_expected},
        )
    for v in range(c.n_vertices):
        total = int(np.sum(ramification[vertex_proj == v]))
        if total != n:
            raise CoverError(f"fiber over vertex {v} has total index {total}, expected {n}", {'vertex': v})

    theta = np.asarray(base.theta)[edge_proj]
    Theta = TWO_PI * ramification.astype(float)
    logger.info(
        "lifted %d-sheeted cover: V=%d E=%d F=%d genus=%d, %d ramified vertices",
        n, covering.n_vertices, covering.n_edges, covering.n_faces, covering.genus, len(v1),
    )
    return LiftedAngleData(
        covering, theta, Theta, ramification, n, c, vertex_proj, edge_proj, face_proj,
        tree_perms={e: p for e, (_, p) in rho.items()},
    )


def hyperelliptic(base: DelaunayPattern, branch_vertices: Sequence[int]) -> LiftedAngleData:
    """Two sheets exchanged around each branch vertex, with the deck involution recorded."""
    branch = sorted(set(int(v) for v in branch_vertices))
    if len(branch) % 2:
        raise OddBranchCount(f"{len(branch)} branch vertices; a double cover needs an even number",
                             {'branch_vertices': branch})
    if len(branch) < 4:
        raise CoverError(f"need at least 4 branch vertices, got {len(branch)}", {'branch_vertices': branch})
    spec = BranchCoverSpec(2, {v: (1, 0) for v in branch})
    lifted = lift(base, spec)
    lifted.deck = deck_involution(lifted)
    return lifted


def deck_involution(lifted: LiftedAngleData) -> Dict[str, np.ndarray]:
    """Sheet swap on faces, vertices and edges of a two-sheeted lift."""
    c = lifted.complex
    F = lifted.base.n_faces
    faces = np.array([(fid + F) % (2 * F) for fid in range(c.n_faces)], dtype=int)
    vertices = np.full(c.n_vertices, -1, dtype=int)
    edges = np.full(c.n_edges, -1, dtype=int)
    for fid in range(c.n_faces):
        other = faces[fid]
        for k, v in enumerate(c.faces[fid]):
            vertices[v] = c.faces[other][k]
        for s, e in enumerate(c.face_edges[fid]):
            edges[e] = c.face_edges[other][s]
    return {'faces': faces, 'vertices': vertices, 'edges': edges}
