"""
Bundled example inputs, as run-document input sections.

Each builder returns the dict that goes under the matching key of a run
document (`flat_cone_surface`, `cover_spec`, `angle_data`), so the same
data can be written to data/*.json or fed to the ingest functions.
"""

import math
from typing import Any, Dict, List, Optional

import numpy as np

from hypercircle.cellcomplex import CellComplex, build_complex

SQRT2 = math.sqrt(2.0)


def _sigma(j: int) -> int:
    return -1 if j % 2 == 0 else 1


def _side(j: int, s: int) -> str:
    return f"e{j % 6}{'+' if s > 0 else '-'}"


def _south(s: int) -> int:
    return 2 if s > 0 else 3


def lawson_squares_cells() -> List[Dict[str, Any]]:
    """The six squares Q_0..Q_5 of the genus-2 Lawson surface.

    Vertices: 0 = N+, 1 = N-, 2 = S+, 3 = S-. Edge e(j, s) joins N_s to
    S_{s sigma(j)}, sigma alternating -1, +1 from j = 0. Square Q_k runs
    N+, S_{sigma(k)}, N-, S_{-sigma(k)}.
    """
    out = []
    for k in range(6):
        sk = _sigma(k)
        out.append({
            'cycle': [0, _south(sk), 1, _south(-sk)],
            'sides': [_side(k, 1), _side(k - 1, -1), _side(k, -1), _side(k - 1, 1)],
        })
    return out


def lawson_net() -> CellComplex:
    """Lawson squares as a cell complex, every vertex in V1."""
    cells = lawson_squares_cells()
    order = [_side(j, s) for j in range(6) for s in (1, -1)]
    return build_complex([q['cycle'] for q in cells], range(4),
                         face_edges=[q['sides'] for q in cells], edge_order=order)


def lawson_squares() -> Dict[str, Any]:
    """Six unit squares cut along the N+ N- diagonal (cone angle 3 pi at all four vertices)."""
    faces, face_edges = [], []
    lengths: Dict[str, float] = {}
    for k, q in enumerate(lawson_squares_cells()):
        a, b, c, d = q['cycle']
        s0, s1, s2, s3 = q['sides']
        diag = f"d{k}"
        faces += [[a, b, c], [a, c, d]]
        face_edges += [[s0, s1, diag], [diag, s2, s3]]
        for side in q['sides']:
            lengths[side] = 1.0
        lengths[diag] = SQRT2
    return {'faces': faces, 'face_edges': face_edges, 'lengths': lengths}


def lawson_centers() -> Dict[str, Any]:
    """Lawson squares coned off at their centers (vertices 4..9, cone angle 2 pi)."""
    faces, face_edges = [], []
    lengths: Dict[str, float] = {}
    for k, q in enumerate(lawson_squares_cells()):
        center = 4 + k
        for s in range(4):
            t = (s + 1) % 4
            faces.append([q['cycle'][s], q['cycle'][t], center])
            face_edges.append([q['sides'][s], f"c{k}{t}", f"c{k}{s}"])
            lengths[q['sides'][s]] = 1.0
            lengths[f"c{k}{s}"] = SQRT2 / 2.0
    return {'faces': faces, 'face_edges': face_edges, 'lengths': lengths}


def _chart(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def lawson_curve() -> Dict[str, Any]:
    """mu^2 = lambda^6 - 1: twelfth roots of unity and both poles, branched at the sixth roots."""
    chart: List[Any] = [_chart(complex(math.cos(k * math.pi / 6.0), math.sin(k * math.pi / 6.0)))
                        for k in range(12)]
    chart += [[0.0, 0.0], 'inf']
    return {
        'chart': chart,
        'sheets': 2,
        'branch': [{'vertex': k, 'perm': [1, 0]} for k in range(0, 12, 2)],
    }


def hyperelliptic_random(seed: int = 0, extra: int = 8, jitter: float = 0.05) -> Dict[str, Any]:
    """Genus-2 double cover branched near the octahedron vertices, plus random unbranched points."""
    rng = np.random.default_rng(seed)
    base = [0j, 1 + 0j, 1j, -1 + 0j, -1j]
    chart: List[Any] = ['inf']
    for z in base:
        dz = complex(*rng.normal(scale=jitter, size=2))
        chart.append(_chart(z + dz))
    radius = np.sqrt(rng.uniform(0.05, 4.0, size=extra))
    phase = rng.uniform(0.0, 2.0 * math.pi, size=extra)
    for r, p in zip(radius, phase):
        chart.append(_chart(complex(r * math.cos(p), r * math.sin(p))))
    return {
        'chart': chart,
        'sheets': 2,
        'branch': [{'vertex': k, 'perm': [1, 0]} for k in range(6)],
    }


OCTAHEDRON_FACES = [
    [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
    [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
]
OCTAHEDRON_NORTH = 4
OCTAHEDRON_SOUTH = 5


def octahedron_complex(v1: Optional[List[int]] = None) -> CellComplex:
    """Vertices +x, -x, +y, -y, +z, -z."""
    return build_complex(OCTAHEDRON_FACES, range(6) if v1 is None else v1)


def octahedron_sphere(theta: float = math.pi / 3.0) -> Dict[str, Any]:
    """Octahedral angle data with every vertex a true circle; k_inf is the north pole."""
    c = octahedron_complex()
    return {
        'faces': OCTAHEDRON_FACES,
        'theta': [theta] * c.n_edges,
        'v1_all': True,
    }


def octahedron_ideal(north: float = math.pi / 3.0, south: float = math.pi / 2.0,
                     equator: float = 7.0 * math.pi / 12.0) -> Dict[str, Any]:
    """Octahedral angle data where only the north pole is a true circle.

    The other five vertices are ideal. Every V0 vertex sees angle sums of
    exactly 2 pi, as the Bao-Bonahon equality demands. Right angles
    everywhere would leave the doubled surface flat, so the equator
    edges are wider than pi/2.
    """
    c = octahedron_complex([OCTAHEDRON_NORTH])
    theta = []
    for u, v in c.edges:
        if OCTAHEDRON_NORTH in (u, v):
            theta.append(north)
        elif OCTAHEDRON_SOUTH in (u, v):
            theta.append(south)
        else:
            theta.append(equator)
    return {
        'faces': OCTAHEDRON_FACES,
        'theta': theta,
        'v1': [OCTAHEDRON_NORTH],
    }


def flat_torus(n: int = 3) -> Dict[str, Any]:
    """Equilateral n x n torus; every vertex has cone angle 2 pi."""
    def vid(i: int, j: int) -> int:
        return (i % n) * n + (j % n)

    faces = []
    for i in range(n):
        for j in range(n):
            faces.append([vid(i, j), vid(i + 1, j), vid(i, j + 1)])
            faces.append([vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)])
    return {'faces': faces, 'lengths': [[1.0, 1.0, 1.0] for _ in faces]}


BUNDLES = {
    'lawson-squares': ('flat_cone_surface', lawson_squares),
    'lawson-centers': ('flat_cone_surface', lawson_centers),
    'lawson-curve': ('cover_spec', lawson_curve),
    'hyperelliptic-random': ('cover_spec', hyperelliptic_random),
    'octahedron-sphere': ('angle_data', octahedron_sphere),
    'octahedron-ideal': ('angle_data', octahedron_ideal),
}


def bundle(name: str) -> Dict[str, Any]:
    """Run document for a bundled example."""
    if name not in BUNDLES:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(BUNDLES)}")
    kind, builder = BUNDLES[name]
    doc: Dict[str, Any] = {kind: builder()}
    if name in ('octahedron-sphere', 'octahedron-ideal'):
        doc['k_inf'] = OCTAHEDRON_NORTH
    return doc
