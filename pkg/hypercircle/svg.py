"""
SVG figures of developed patterns (drawsvg).

Geodesics are arcs of circles orthogonal to the unit circle. Coordinates
are written with 9 significant digits so output is byte-stable.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import drawsvg as draw
import numpy as np

from hypercircle.delaunay import PlaneCircle
from hypercircle.layout import (
    CirclePattern2D,
    HypLayout,
    TileCopy,
    geodesic_circle,
    hyperbolic_circle,
    mobius,
    transform_circle,
)

logger = logging.getLogger(__name__)

LAYERS = ('edges', 'vertex_circles', 'face_circles', 'domain')


@dataclass
class RenderOptions:
    size: int = 800
    margin: int = 20
    layers: Tuple[str, ...] = LAYERS
    edge_color: str = '#222222'
    domain_color: str = '#c0392b'
    vertex_color: str = '#2471a3'
    face_color: str = '#7d8c8d'


def _r(x: float) -> float:
    return float(f"{x:.9g}")


class _Canvas:
    def __init__(self, opts: RenderOptions):
        self.opts = opts
        self.scale = 0.5 * opts.size - opts.margin
        self.mid = 0.5 * opts.size

    def xy(self, z: complex) -> Tuple[float, float]:
        return _r(self.mid + self.scale * z.real), _r(self.mid - self.scale * z.imag)

    def length(self, r: float) -> float:
        return _r(self.scale * r)


def _geodesic_path(canvas: _Canvas, z1: complex, z2: complex, **style) -> draw.Path:
    x1, y1 = canvas.xy(z1)
    x2, y2 = canvas.xy(z2)
    path = draw.Path(fill='none', **style)
    path.M(x1, y1)
    arc = geodesic_circle(z1, z2)
    if arc is None:
        return path.L(x2, y2)
    c, radius = arc.center, arc.radius
    cx, cy = canvas.xy(c)
    sweep = 1 if (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx) > 0 else 0
    r = canvas.length(radius)
    return path.A(r, r, 0, 0, sweep, x2, y2)


def _circle(canvas: _Canvas, circle: PlaneCircle, **style) -> draw.Circle:
    x, y = canvas.xy(circle.center)
    return draw.Circle(x, y, canvas.length(circle.radius), **style)


def _copy_edges(layout: HypLayout, matrix: np.ndarray) -> List[Tuple[complex, complex]]:
    tri = layout.tri
    seen = set()
    out = []
    for k in layout.order:
        pos = [mobius(matrix, z) for z in layout.positions[k]]
        for s, e in enumerate(tri.triangle_edges[k]):
            if tri.redundant[e]:
                continue
            a, b = pos[s], pos[(s + 1) % 3]
            key = tuple(sorted([(round(a.real, 9), round(a.imag, 9)), (round(b.real, 9), round(b.imag, 9))]))
            if key in seen:
                continue
            seen.add(key)
            out.append((a, b))
    return out


def _domain_boundary(layout: HypLayout) -> List[Tuple[complex, complex]]:
    out = []
    for e in layout.boundary_edges():
        (f, s), (g, t) = layout.tri.complex.edge_sides(e)
        pf, pg = layout.positions[f], layout.positions[g]
        if abs(pf[s] - pg[(t + 1) % 3]) + abs(pf[(s + 1) % 3] - pg[t]) < 1e-9:
            continue
        out.append((pf[s], pf[(s + 1) % 3]))
        out.append((pg[t], pg[(t + 1) % 3]))
    for k in layout.order:
        for s, e in enumerate(layout.tri.triangle_edges[k]):
            g, _ = layout.tri.complex.other_side(k, s)
            if g not in layout.positions:
                pos = layout.positions[k]
                out.append((pos[s], pos[(s + 1) % 3]))
    return out


def render_svg(
    pattern: CirclePattern2D,
    layout: HypLayout,
    copies: Sequence[TileCopy],
    opts: Optional[RenderOptions] = None,
) -> draw.Drawing:
    opts = opts or RenderOptions()
    canvas = _Canvas(opts)
    d = draw.Drawing(opts.size, opts.size)
    d.append(draw.Rectangle(0, 0, opts.size, opts.size, fill='white'))
    d.append(_circle(canvas, PlaneCircle(0j, 1.0), fill='none', stroke='black', stroke_width=1.5))

    identity = np.eye(2, dtype=complex)
    tiles = list(copies) or [TileCopy((), identity)]

    if 'face_circles' in opts.layers:
        group = draw.Group(id='face-circles', fill='none', stroke=opts.face_color, stroke_width=0.6)
        for copy in tiles:
            for f in sorted(pattern.face_circles):
                group.append(_circle(canvas, transform_circle(copy.matrix, pattern.face_circles[f])))
            for circle in pattern.extra_circles:
                group.append(_circle(canvas, transform_circle(copy.matrix, circle)))
        d.append(group)

    if 'vertex_circles' in opts.layers:
        group = draw.Group(id='vertex-circles', fill=opts.vertex_color, fill_opacity=0.25,
                           stroke=opts.vertex_color, stroke_width=0.6)
        for copy in tiles:
            for vc in pattern.vertex_circles:
                if vc.radius > 0.0:
                    circle = hyperbolic_circle(mobius(copy.matrix, vc.center), vc.radius)
                    group.append(_circle(canvas, circle))
        d.append(group)

    if 'edges' in opts.layers:
        group = draw.Group(id='edges', stroke=opts.edge_color, stroke_width=0.8)
        for copy in tiles:
            for a, b in _copy_edges(layout, copy.matrix):
                group.append(_geodesic_path(canvas, a, b))
        d.append(group)

    if 'domain' in opts.layers:
        group = draw.Group(id='fundamental-domain', stroke=opts.domain_color, stroke_width=2.0)
        for a, b in _domain_boundary(layout):
            group.append(_geodesic_path(canvas, a, b))
        d.append(group)

    logger.debug("rendered %d copies, layers %s", len(tiles), ','.join(opts.layers))
    return d


def save_svg(drawing: draw.Drawing, path) -> None:
    try:
        drawing.save_svg(str(path))
    except OSError as e:
        raise IOError(f"cannot write SVG to {path}: {e}") from e
