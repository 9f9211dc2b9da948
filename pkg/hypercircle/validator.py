"""
Realizability checks for angle data.

check_schlenker tests the four conditions on a closed surface. The last
condition quantifies over admissible domains: connected, non-punctured
unions of open vertex stars in the subdivision T^ (corner and dual edges).
Domains are named by their generating vertex set, so the sweep enumerates
subsets of T^ vertices as bitmasks.

check_rivin and check_bao_bonahon test the sphere conditions on simple
loops and paths of the dual graph.

Every failed condition carries a certificate that replay_certificate()
re-evaluates from the input data alone.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from hypercircle.cellcomplex import CellComplex, Subdivision, subdivide
from hypercircle.errors import CapExceeded, InputError, NotSphere, ValidatorError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
EQ_TOL = 1e-9
DEFAULT_CAP = 18
SAMPLE_BUDGET = 20000
MAX_LOOP_LENGTH = 12
MAX_LOOPS = 1_000_000


# --- admissible domains ---

@dataclass(frozen=True)
class AdmissibleDomain:
    """Open-star union of `generators` in T^ together with its boundary trace.

    boundary_walks lists the closed boundary curves as T^ sides (triangle,
    side) with the domain on the left. An edge outside the domain whose two
    triangles are inside appears twice.
    """

    generators: Tuple[int, ...]
    edges: Tuple[int, ...]
    triangles: Tuple[int, ...]
    boundary_walks: Tuple[Tuple[Tuple[int, int], ...], ...]
    boundary_dual_edges: Tuple[int, ...]
    boundary_primal: Tuple[int, ...]
    chi: int
    chi_surface: int
    handles: int
    strict: bool

    @property
    def boundary_components(self) -> int:
        return len(self.boundary_walks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'generators': list(self.generators),
            'chi': self.chi,
            'handles': self.handles,
            'boundary_components': self.boundary_components,
            'boundary_dual_edges': list(self.boundary_dual_edges),
            'boundary_primal': list(self.boundary_primal),
            'strict': self.strict,
        }


class _Graph:
    """Bitmask view of the T^ one-skeleton."""

    def __init__(self, sub: Subdivision):
        hat = sub.complex
        self.sub = sub
        self.n = hat.n_vertices
        self.full = (1 << self.n) - 1
        self.nb = [0] * self.n
        for a, b in hat.edges:
            if a != b:
                self.nb[a] |= 1 << b
                self.nb[b] |= 1 << a
        self.primal = (1 << sub.n_primal) - 1
        self.v0 = 0
        for k in sub.primal.v0:
            self.v0 |= 1 << k

    def neighbourhood(self, mask: int) -> int:
        out = 0
        for v in _bits(mask):
            out |= self.nb[v]
        return out & ~mask

    def connected(self, mask: int) -> bool:
        seen = mask & -mask
        frontier = seen
        while frontier:
            grow = 0
            for v in _bits(frontier):
                grow |= self.nb[v]
            grow &= mask & ~seen
            seen |= grow
            frontier = grow
        return seen == mask

    def punctured(self, mask: int) -> bool:
        outside = self.full & ~mask
        for v in _bits(outside):
            if self.nb[v] and not (self.nb[v] & ~mask):
                return True
        return False

    def candidate(self, mask: int) -> bool:
        """Strict admissible generating set, other than the star of a single V0 vertex."""
        if mask == 0 or mask == self.full or not mask & self.primal:
            return False
        if mask & (mask - 1) == 0 and mask & self.v0:
            return False
        if self.neighbourhood(mask) & self.v0:
            return False
        return self.connected(mask) and not self.punctured(mask)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def open_star_union(sub: Subdivision, generators: Iterable[int]) -> AdmissibleDomain:
    """Cells, boundary walks and Euler characteristic of the open-star union."""
    hat = sub.complex
    gens = tuple(sorted(set(int(v) for v in generators)))
    inside = set(gens)
    edge_in = [a in inside or b in inside for a, b in hat.edges]
    tri_in = [any(v in inside for v in cycle) for cycle in hat.faces]

    boundary = [(k, s) for k in range(hat.n_faces) if tri_in[k]
                for s in range(3) if not edge_in[hat.face_edges[k][s]]]

    def successor(side: Tuple[int, int]) -> Tuple[int, int]:
        k, s = side
        out = (s + 1) % 3
        while edge_in[hat.face_edges[k][out]]:
            g, t = hat.other_side(k, out)
            k, out = g, (t + 1) % 3
        return k, out

    walks = []
    visited = set()
    for side in boundary:
        if side in visited:
            continue
        walk = []
        cur = side
        while cur not in visited:
            visited.add(cur)
            walk.append(cur)
            cur = successor(cur)
        walks.append(tuple(walk))

    n_edges_in = sum(edge_in)
    n_tri_in = sum(tri_in)
    chi = len(gens) - n_edges_in + n_tri_in

    # the same domain as a compact surface with boundary: triangles glued
    # along interior edges only, boundary sides kept apart
    parent = {(k, c): (k, c) for k in range(hat.n_faces) if tri_in[k] for c in range(3)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(hat.n_edges):
        if not edge_in[e]:
            continue
        (k, s), (g, t) = hat.edge_sides(e)
        for x, y in (((k, s), (g, (t + 1) % 3)), ((k, (s + 1) % 3), (g, t))):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    corner_classes = len({find(x) for x in parent})
    chi_surface = corner_classes - (n_edges_in + len(boundary)) + n_tri_in

    doubled = 2 - len(walks) - chi_surface
    if chi_surface != chi or doubled < 0 or doubled % 2:
        raise ValidatorError(
            f"inconsistent domain topology for generators {list(gens)}",
            {'chi': chi, 'chi_surface': chi_surface, 'boundary_components': len(walks)},
        )

    dual_edges = []
    primal = []
    for walk in walks:
        for k, s in walk:
            e = hat.face_edges[k][s]
            if sub.is_dual_edge(e):
                dual_edges.append(e)
            tail = hat.faces[k][s]
            if sub.is_primal(tail):
                primal.append(tail)
    strict = not any(v in sub.primal.v0 for v in primal)
    return AdmissibleDomain(
        gens,
        tuple(e for e in range(hat.n_edges) if edge_in[e]),
        tuple(k for k in range(hat.n_faces) if tri_in[k]),
        tuple(walks),
        tuple(dual_edges),
        tuple(primal),
        chi,
        chi_surface,
        doubled // 2,
        strict,
    )


def is_admissible(sub: Subdivision, generators: Iterable[int]) -> bool:
    """Check the admissible-domain axioms directly on the cells of the union."""
    hat = sub.complex
    inside = set(int(v) for v in generators)
    edges = {e for e, (a, b) in enumerate(hat.edges) if a in inside or b in inside}
    tris = {k for k, cycle in enumerate(hat.faces) if any(v in inside for v in cycle)}

    if not inside or not any(sub.is_primal(v) for v in inside):
        return False
    if len(inside) == hat.n_vertices:
        return False

    for v in range(hat.n_vertices):
        if v in inside:
            continue
        star_tris = {f for f, _ in hat.corners(v)}
        star_edges = set(hat.vertex_edges(v))
        if star_tris <= tris and star_edges <= edges:
            return False

    cells = [('v', v) for v in inside] + [('e', e) for e in edges] + [('t', k) for k in tris]
    parent = {cell: cell for cell in cells}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for e in edges:
        for k, _ in hat.edge_sides(e):
            union(('e', e), ('t', k))
        for v in hat.edges[e]:
            if v in inside:
                union(('e', e), ('v', v))
    for k in tris:
        for v in hat.faces[k]:
            if v in inside:
                union(('t', k), ('v', v))
    return len({find(c) for c in cells}) == 1


def domain_inequality(
    sub: Subdivision,
    theta: Sequence[float],
    Theta: Sequence[float],
    domain: AdmissibleDomain,
) -> Tuple[float, float]:
    """(lhs, rhs) of the domain inequality; admissible data needs lhs > rhs."""
    lhs = 0.0
    for e in domain.boundary_dual_edges:
        lhs += math.pi - float(theta[e])
    for k in domain.generators:
        if sub.is_primal(k):
            lhs += TWO_PI - float(Theta[k])
    lhs += math.pi * len(domain.boundary_primal)
    return lhs, TWO_PI * domain.chi


# --- report ---

@dataclass
class PolytopeReport:
    theorem: str
    conditions: Dict[int, bool]
    certificates: List[Dict[str, Any]] = field(default_factory=list)
    geometry: str = 'hyperbolic'
    sampled: bool = False
    checked: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def failed(self) -> List[int]:
        return [k for k in sorted(self.conditions) if not self.conditions[k]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theorem': self.theorem,
            'passed': self.passed,
            'geometry': self.geometry,
            'sampled': self.sampled,
            'conditions': {str(k): v for k, v in sorted(self.conditions.items())},
            'checked': dict(self.checked),
            'certificates': self.certificates,
        }


def _as_arrays(c: CellComplex, theta, Theta=None):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.n_edges,):
        raise InputError(f"theta has {theta.size} entries, complex has {c.n_edges} edges")
    if Theta is None:
        return theta, None
    Theta = np.asarray(Theta, dtype=float)
    if Theta.shape != (c.n_vertices,):
        raise InputError(f"Theta has {Theta.size} entries, complex has {c.n_vertices} vertices")
    return theta, Theta


def _range_certificates(theta: np.ndarray) -> List[Dict[str, Any]]:
    return [
        {'condition': 1, 'kind': 'edge', 'edge': int(e), 'theta': float(theta[e])}
        for e in np.flatnonzero(~((theta > 0.0) & (theta < math.pi)))
    ]


def _dual_sum(theta: Sequence[float], edges: Sequence[int]) -> float:
    total = 0.0
    for e in edges:
        total += math.pi - float(theta[e])
    return total


# --- closed surfaces ---

def _exhaustive_masks(graph: _Graph, threads: int) -> List[int]:
    total = 1 << graph.n

    def scan(bounds: Tuple[int, int]) -> List[int]:
        return [m for m in range(*bounds) if graph.candidate(m)]

    parts = max(1, min(threads, total))
    edges = np.linspace(1, total, parts + 1).astype(int)
    chunks = [(int(edges[i]), int(edges[i + 1])) for i in range(parts)]
    if parts == 1:
        return scan(chunks[0])
    with ThreadPoolExecutor(max_workers=parts) as pool:
        found = list(pool.map(scan, chunks))
    return [m for part in found for m in part]


def _sampled_masks(graph: _Graph, cap: int, budget: int) -> List[int]:
    """Connected generating sets grown level by level up to `cap` vertices, plus complements."""
    level = {1 << v for v in range(graph.n)}
    seen = set(level)
    size = 1
    while size < cap and len(seen) < budget:
        nxt = set()
        for m in sorted(level):
            for v in _bits(graph.neighbourhood(m)):
                grown = m | (1 << v)
                if grown not in seen:
                    nxt.add(grown)
                    if len(seen) + len(nxt) >= budget:
                        break
            if len(seen) + len(nxt) >= budget:
                break
        if not nxt:
            break
        seen |= nxt
        level = nxt
        size += 1
    pool = seen | {graph.full & ~m for m in seen}
    return sorted(m for m in pool if graph.candidate(m))


def check_schlenker(
    c: CellComplex,
    theta: Sequence[float],
    Theta: Sequence[float],
    cap: int = DEFAULT_CAP,
    geometry: str = 'hyperbolic',
    threads: int = 1,
    require_exhaustive: bool = False,
    sample_budget: int = SAMPLE_BUDGET,
) -> PolytopeReport:
    """Test (C, theta, Theta) against the realizability conditions on a closed surface.

    The domain sweep is exhaustive when T^ has at most `cap` vertices.
    Larger inputs get a sampled sweep and report.sampled, unless
    require_exhaustive is set, in which case CapExceeded is raised.
    """
    if geometry not in ('hyperbolic', 'euclidean'):
        raise InputError(f"unknown geometry {geometry!r}")
    theta, Theta = _as_arrays(c, theta, Theta)
    certificates: List[Dict[str, Any]] = []
    conditions: Dict[int, bool] = {}

    bad = _range_certificates(theta)
    conditions[1] = not bad
    certificates += bad

    bad = []
    for k in range(c.n_vertices):
        if c.is_v1(k):
            if not Theta[k] > 0.0:
                bad.append({'condition': 2, 'kind': 'vertex', 'vertex': k, 'Theta': float(Theta[k])})
            continue
        expected = _dual_sum(theta, c.vertex_edges(k))
        if abs(Theta[k] - expected) > EQ_TOL:
            bad.append({'condition': 2, 'kind': 'vertex', 'vertex': k,
                        'Theta': float(Theta[k]), 'expected': expected})
    conditions[2] = not bad
    certificates += bad

    chi_s = c.euler_characteristic
    total = float(np.sum(TWO_PI - Theta))
    if geometry == 'hyperbolic':
        conditions[3] = total > TWO_PI * chi_s + EQ_TOL
    else:
        conditions[3] = abs(total - TWO_PI * chi_s) <= EQ_TOL
    if not conditions[3]:
        certificates.append({'condition': 3, 'kind': 'total', 'value': total, 'rhs': TWO_PI * chi_s})

    sub = subdivide(c)
    graph = _Graph(sub)
    sampled = graph.n > cap
    if sampled:
        if require_exhaustive:
            raise CapExceeded(
                f"T^ has {graph.n} vertices, exhaustive domain sweep is capped at {cap}",
                {'vertices': graph.n, 'cap': cap},
            )
        logger.warning("domain sweep sampled: T^ has %d vertices (cap %d)", graph.n, cap)
        masks = _sampled_masks(graph, cap, sample_budget)
    else:
        masks = _exhaustive_masks(graph, threads)

    bad = []
    for m in masks:
        domain = open_star_union(sub, _bits(m))
        lhs, rhs = domain_inequality(sub, theta, Theta, domain)
        if not lhs > rhs + EQ_TOL:
            bad.append({'condition': 4, 'kind': 'domain', 'generators': list(domain.generators),
                        'lhs': lhs, 'rhs': rhs, 'chi': domain.chi})
    conditions[4] = not bad
    certificates += bad
    logger.info("domain sweep checked %d strict admissible domains (%s), %d violations",
                len(masks), 'sampled' if sampled else 'exhaustive', len(bad))

    return PolytopeReport(
        'schlenker', conditions, certificates, geometry, sampled,
        {'domains': len(masks), 'subdivision_vertices': graph.n},
    )


# --- spheres ---

def _dual_adjacency(c: CellComplex) -> List[List[Tuple[int, int]]]:
    adj: List[List[Tuple[int, int]]] = [[] for _ in range(c.n_faces)]
    for e in range(c.n_edges):
        f, g = c.edge_faces(e)
        adj[f].append((g, e))
        if g != f:
            adj[g].append((f, e))
    for row in adj:
        row.sort()
    return adj


def simple_loops(c: CellComplex, max_length: int = MAX_LOOP_LENGTH,
                 max_loops: int = MAX_LOOPS) -> List[Tuple[int, ...]]:
    """Simple cycles of the dual graph as edge sequences, each listed once."""
    adj = _dual_adjacency(c)
    found: Dict[FrozenSet[int], Tuple[int, ...]] = {}

    def walk(start: int, u: int, on_path: set, path: List[int]) -> None:
        for w, e in adj[u]:
            if e in path:
                continue
            if w == start:
                key = frozenset(path + [e])
                if key not in found:
                    found[key] = tuple(path + [e])
                    if len(found) > max_loops:
                        raise CapExceeded(f"more than {max_loops} simple dual loops",
                                          {'max_loops': max_loops, 'max_length': max_length})
            elif w > start and w not in on_path and len(path) + 1 < max_length:
                on_path.add(w)
                path.append(e)
                walk(start, w, on_path, path)
                path.pop()
                on_path.discard(w)

    for s in range(c.n_faces):
        walk(s, s, {s}, [])
    return list(found.values())


def simple_paths(c: CellComplex, a: int, b: int, max_length: int = MAX_LOOP_LENGTH,
                 limit: int = MAX_LOOPS) -> List[Tuple[int, ...]]:
    return _paths(_dual_adjacency(c), a, b, max_length, limit)


def _paths(adj: List[List[Tuple[int, int]]], a: int, b: int, max_length: int,
           limit: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []

    def walk(u: int, on_path: set, path: List[int]) -> None:
        for w, e in adj[u]:
            if w in on_path:
                continue
            if w == b:
                out.append(tuple(path + [e]))
                if len(out) > limit:
                    raise CapExceeded(f"more than {limit} simple dual paths", {'limit': limit})
            elif len(path) + 1 < max_length:
                on_path.add(w)
                path.append(e)
                walk(w, on_path, path)
                path.pop()
                on_path.discard(w)

    walk(a, {a}, [])
    return out


def check_bao_bonahon(
    c: CellComplex,
    theta: Sequence[float],
    max_length: int = MAX_LOOP_LENGTH,
    max_loops: int = MAX_LOOPS,
) -> PolytopeReport:
    """Sphere conditions with V0 vertices as points and V1 vertices as true circles.

    Dual-face loops around V0 vertices must sum to exactly 2 pi, every
    other simple loop must exceed it, and paths between two vertices of a
    dual face that leave its boundary must exceed pi.
    """
    if c.genus != 0:
        raise NotSphere(f"complex has genus {c.genus}", {'genus': c.genus})
    theta, _ = _as_arrays(c, theta)
    conditions: Dict[int, bool] = {}
    certificates: List[Dict[str, Any]] = []

    bad = _range_certificates(theta)
    conditions[1] = not bad
    certificates += bad

    face_sets = [frozenset(c.vertex_edges(k)) for k in range(c.n_vertices)]
    face_of = {s: k for k, s in enumerate(face_sets)}

    loops = simple_loops(c, max_length, max_loops)
    bad = []
    for loop in loops:
        value = _dual_sum(theta, loop)
        k = face_of.get(frozenset(loop))
        if k is not None and not c.is_v1(k):
            ok = abs(value - TWO_PI) <= EQ_TOL
            required = 'equal'
        else:
            ok = value > TWO_PI + EQ_TOL
            required = 'greater'
        if not ok:
            bad.append({'condition': 2, 'kind': 'loop', 'edges': list(loop), 'sum': value,
                        'face': k, 'required': required})
    conditions[2] = not bad
    certificates += bad

    pairs = set()
    for k in range(c.n_vertices):
        on_face = sorted({f for f, _ in c.vertex_star(k)})
        for i, a in enumerate(on_face):
            for b in on_face[i + 1:]:
                pairs.add((a, b))
    adj = _dual_adjacency(c)
    bad = []
    n_paths = 0
    for a, b in sorted(pairs):
        for path in _paths(adj, a, b, max_length, max_loops):
            edges = frozenset(path)
            if any(edges <= s for s in face_sets):
                continue
            n_paths += 1
            value = _dual_sum(theta, path)
            if not value > math.pi + EQ_TOL:
                bad.append({'condition': 3, 'kind': 'path', 'edges': list(path), 'sum': value,
                            'ends': [a, b]})
    conditions[3] = not bad
    certificates += bad

    sampled = c.n_faces > max_length
    if sampled:
        logger.warning("dual loops longer than %d edges were not enumerated", max_length)
    return PolytopeReport(
        'bao_bonahon', conditions, certificates, 'sphere', sampled,
        {'loops': len(loops), 'paths': n_paths},
    )


def check_rivin(
    c: CellComplex,
    theta: Sequence[float],
    max_length: int = MAX_LOOP_LENGTH,
    max_loops: int = MAX_LOOPS,
) -> PolytopeReport:
    """Delaunay case: every vertex is a point of the pattern."""
    report = check_bao_bonahon(c.with_tags(()), theta, max_length, max_loops)
    report.theorem = 'rivin'
    return report


# --- certificates ---

def replay_certificate(
    c: CellComplex,
    theta: Sequence[float],
    Theta: Optional[Sequence[float]],
    certificate: Dict[str, Any],
) -> float:
    """Recompute the quantity a certificate reports, from the data alone.

    Returns the edge angle, the vertex cone angle, the cone-angle total, the
    domain lhs, or the loop/path sum, depending on the certificate kind.
    """
    kind = certificate['kind']
    if kind == 'edge':
        return float(theta[certificate['edge']])
    if kind == 'vertex':
        return float(Theta[certificate['vertex']])
    if kind == 'total':
        return float(np.sum(TWO_PI - np.asarray(Theta, dtype=float)))
    if kind in ('loop', 'path'):
        return _dual_sum(theta, certificate['edges'])
    if kind == 'domain':
        sub = subdivide(c)
        domain = open_star_union(sub, certificate['generators'])
        return domain_inequality(sub, theta, Theta, domain)[0]
    raise InputError(f"unknown certificate kind {kind!r}")
