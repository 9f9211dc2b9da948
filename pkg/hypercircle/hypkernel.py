"""
Hyperbolic trigonometry of decorated triangles.

Coordinates:
- TetraCoords (a, b): principal edge lengths of the hyper-ideal
  tetrahedron over each triangle and truncation parameters at V1 vertices.
- DecoratedMetric (l, r): geodesic edge lengths and vertex-circle radii.

psi / psi_inverse convert between them. decorated_angles returns the six
dihedral angles (alpha on sides, beta at corners) of one triangle, with
the constant extension 0 / pi once a triangle inequality fails.

Triangle conventions: corners 0, 1, 2 in cycle order; side s joins
corner s to corner s+1; the corner opposite side s is s+2.

Everything transcendental is evaluated through log cosh / log sinh and
acosh(1 + delta) with delta computed without cancellation, so the
formulas stay finite for the extreme points a line search can try.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hypercircle.cellcomplex import Triangulation
from hypercircle.errors import DomainError, NotInER

LN2 = math.log(2.0)
ARG_TOL = 1e-12
PI = math.pi


# --- log-space helpers ---

def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - LN2


def _log_sinh(x: float) -> float:
    if x <= 0.0:
        raise DomainError(f"log sinh of non-positive argument {x!r}")
    return x + math.log(-math.expm1(-2.0 * x)) - LN2


def _log_add(p: float, q: float) -> float:
    hi, lo = (p, q) if p >= q else (q, p)
    return hi + math.log1p(math.exp(lo - hi))


def _acosh1p_from_log(log_delta: float) -> float:
    """acosh(1 + delta) given log(delta)."""
    if log_delta > 40.0:
        return LN2 + log_delta + math.exp(-log_delta)
    d = math.exp(log_delta)
    return math.log1p(d + math.sqrt(d * (2.0 + d)))


def _acosh1p(delta: float) -> float:
    if delta < 0.0:
        if delta < -ARG_TOL:
            raise DomainError(f"acosh argument {1.0 + delta!r} below 1")
        return 0.0
    return math.log1p(delta + math.sqrt(delta * (2.0 + delta)))


# --- the length formulas ---

def f1(x: float) -> float:
    """2 asinh(e^(x/2)): length between two decorating horocycles."""
    half = 0.5 * x
    if half > 20.0:
        return 2.0 * (half + LN2 + 0.25 * math.exp(-x))
    return 2.0 * math.asinh(math.exp(half))


def f2(b: float, x: float) -> float:
    """acosh((cosh b + e^x) / sinh b)."""
    if b <= 0.0:
        raise DomainError(f"f2 needs b > 0, got {b!r}")
    return _acosh1p_from_log(_log_add(-b, x) - _log_sinh(b))


def f3(u: float, v: float, x: float) -> float:
    """acosh((cosh u cosh v + cosh x) / (sinh u sinh v))."""
    if u <= 0.0 or v <= 0.0:
        raise DomainError(f"f3 needs u, v > 0, got {u!r}, {v!r}")
    return _acosh1p_from_log(
        _log_add(_log_cosh(u - v), _log_cosh(x)) - _log_sinh(u) - _log_sinh(v)
    )


def r_of_b(b: float) -> float:
    """asinh(1 / sinh b); an involution on (0, inf)."""
    if b <= 0.0:
        raise DomainError(f"r_of_b needs b > 0, got {b!r}")
    return math.asinh(math.exp(-_log_sinh(b)))


b_of_r = r_of_b


# --- inverses of the length formulas ---

def a_from_f3(l: float, bu: float, bv: float) -> float:
    excess = (2.0 * math.sinh(0.5 * l) ** 2 * math.sinh(bu) * math.sinh(bv)
              - (math.cosh(bu - bv) + 1.0))
    if excess <= 0.0:
        raise DomainError(f"no positive a with f3({bu!r}, {bv!r}, a) = {l!r}")
    return _acosh1p(excess)


def a_from_f2(l: float, b: float) -> float:
    ea = 2.0 * math.sinh(b) * math.sinh(0.5 * l) ** 2 - math.exp(-b)
    if ea <= 0.0:
        raise DomainError(f"no a with f2({b!r}, a) = {l!r}")
    return math.log(ea)


def a_from_f1(l: float) -> float:
    return 2.0 * _log_sinh(0.5 * l)


# --- triangle angle ---

def triangle_beta(l1: float, l2: float, l3: float) -> float:
    """Angle between sides l1 and l2, opposite l3.

    Half-angle form of the hyperbolic law of cosines; returns pi when
    l3 >= l1 + l2 and 0 when l1 or l2 is too long. Zero sides (lengths
    that underflowed) fall into those two degenerate cases.
    """
    if not (l1 >= 0.0 and l2 >= 0.0 and l3 >= 0.0):
        raise DomainError(f"triangle sides must be non-negative: {l1!r}, {l2!r}, {l3!r}")
    s = 0.5 * (l1 + l2 + l3)
    if s - l1 <= 0.0 or s - l2 <= 0.0:
        return 0.0
    if s - l3 <= 0.0:
        return PI
    half_log = 0.5 * (_log_sinh(s - l1) + _log_sinh(s - l2) - _log_sinh(s) - _log_sinh(s - l3))
    if half_log > 700.0:
        return PI
    return 2.0 * math.atan(math.exp(half_log))


g = triangle_beta


# --- coordinates ---

@dataclass
class TetraCoords:
    """a per edge of the triangulation, b per vertex (0 on V0)."""

    a: np.ndarray
    b: np.ndarray

    def copy(self) -> 'TetraCoords':
        return TetraCoords(self.a.copy(), self.b.copy())


@dataclass
class DecoratedMetric:
    """l per edge of the triangulation, r per vertex (0 on V0)."""

    l: np.ndarray
    r: np.ndarray


@dataclass
class TruncatingFaceLengths:
    corner: int
    sigma: float
    sigma_out: float
    sigma_in: float


@dataclass
class FaceAngles:
    alpha: Tuple[float, float, float]
    beta: Tuple[float, float, float]
    extended: bool = False
    truncations: List[TruncatingFaceLengths] = field(default_factory=list)


@dataclass
class TriangleAngles:
    """alpha[k, s] on side s and beta[k, c] at corner c of triangle k."""

    alpha: np.ndarray
    beta: np.ndarray
    extended: np.ndarray


def edge_length(a: float, bu: float, bv: float, u_v1: bool, v_v1: bool) -> float:
    if u_v1 and v_v1:
        return f3(bu, bv, a)
    if u_v1:
        return f2(bu, a)
    if v_v1:
        return f2(bv, a)
    return f1(a)


def psi(t: TetraCoords, tri: Triangulation) -> DecoratedMetric:
    v1 = tri.v1
    r = np.zeros(tri.n_vertices)
    for k in v1:
        if not t.b[k] > 0.0:
            raise DomainError(f"b[{k}] = {t.b[k]!r} must be positive on V1", {'vertex': k})
        r[k] = r_of_b(float(t.b[k]))
    l = np.empty(tri.n_edges)
    for e, (u, w) in enumerate(tri.edges):
        l[e] = edge_length(float(t.a[e]), float(t.b[u]), float(t.b[w]), u in v1, w in v1)
    return DecoratedMetric(l, r)


def er_violations(m: DecoratedMetric, tri: Triangulation) -> List[dict]:
    """Every violated constraint of the decorated-metric polytope with its slack."""
    out = []
    v1 = tri.v1
    for k in range(tri.n_vertices):
        rk = float(m.r[k])
        if k in v1 and not rk > 0.0:
            out.append({'constraint': 'radius_positive', 'vertex': k, 'slack': rk})
        if k not in v1 and rk != 0.0:
            out.append({'constraint': 'radius_zero', 'vertex': k, 'slack': -abs(rk)})
    for e, (u, w) in enumerate(tri.edges):
        slack = float(m.l[e] - m.r[u] - m.r[w])
        if not slack > 0.0:
            out.append({'constraint': 'circles_disjoint', 'edge': e, 'slack': slack})
    for k, sides in enumerate(tri.triangle_edges):
        ls = [float(m.l[e]) for e in sides]
        for s in range(3):
            slack = ls[(s + 1) % 3] + ls[(s + 2) % 3] - ls[s]
            if not slack > 0.0:
                out.append({'constraint': 'triangle_inequality', 'face': k, 'side': s, 'slack': slack})
    return out


def psi_inverse(m: DecoratedMetric, tri: Triangulation) -> TetraCoords:
    violations = er_violations(m, tri)
    if violations:
        first = violations[0]
        where = ', '.join(f"{k}={v}" for k, v in first.items() if k in ('edge', 'face', 'vertex'))
        raise NotInER(
            f"metric violates {first['constraint']} at {where} (slack {first['slack']:.3e})",
            {'violations': violations},
        )
    v1 = tri.v1
    b = np.zeros(tri.n_vertices)
    for k in v1:
        b[k] = b_of_r(float(m.r[k]))
    a = np.empty(tri.n_edges)
    for e, (u, w) in enumerate(tri.edges):
        le = float(m.l[e])
        if u in v1 and w in v1:
            a[e] = a_from_f3(le, b[u], b[w])
        elif u in v1:
            a[e] = a_from_f2(le, b[u])
        elif w in v1:
            a[e] = a_from_f2(le, b[w])
        else:
            a[e] = a_from_f1(le)
    return TetraCoords(a, b)


# --- decorated angles ---

def _betas(ls: Sequence[float]) -> Tuple[float, float, float]:
    return tuple(g(ls[c], ls[(c + 2) % 3], ls[(c + 1) % 3]) for c in range(3))


def _extended(ls: Sequence[float]) -> Optional[FaceAngles]:
    for s in range(3):
        if ls[s] >= ls[(s + 1) % 3] + ls[(s + 2) % 3]:
            alpha = [0.0, 0.0, 0.0]
            beta = [0.0, 0.0, 0.0]
            alpha[s] = PI
            beta[(s + 2) % 3] = PI
            return FaceAngles(tuple(alpha), tuple(beta), extended=True)
    return None


def truncation_at(corner: int, a: Sequence[float], b: Sequence[float], v1: Sequence[bool]) -> TruncatingFaceLengths:
    """Side lengths of the truncating face at a V1 corner.

    sigma joins the two principal edges at the corner, sigma_out and
    sigma_in lie on the faces over the outgoing and incoming sides.
    """
    c = corner
    s_out, s_in, s_op = c, (c + 2) % 3, (c + 1) % 3
    nxt, prv = (c + 1) % 3, (c + 2) % 3
    if v1[nxt] and v1[prv]:
        sigma = f3(a[s_in], a[s_out], a[s_op])
    elif v1[prv]:
        sigma = f2(a[s_in], a[s_op] - a[s_out])
    elif v1[nxt]:
        sigma = f2(a[s_out], a[s_op] - a[s_in])
    else:
        sigma = f1(a[s_in] + a[s_out] + a[s_op])
    sigma_out = f3(a[s_out], b[c], b[nxt]) if v1[nxt] else f2(b[c], -a[s_out])
    sigma_in = f3(a[s_in], b[c], b[prv]) if v1[prv] else f2(b[c], -a[s_in])
    return TruncatingFaceLengths(c, sigma, sigma_out, sigma_in)


def alpha_from_corner(corner: int, side: int, a, b, v1) -> float:
    """alpha on a side incident to a V1 corner, read off its truncating face."""
    tr = truncation_at(corner, a, b, v1)
    if side == corner:
        return g(tr.sigma, tr.sigma_out, tr.sigma_in)
    return g(tr.sigma, tr.sigma_in, tr.sigma_out)


def _check_box(a, b, v1) -> None:
    for c in range(3):
        if v1[c] and not b[c] > 0.0:
            raise DomainError(f"b at corner {c} must be positive, got {b[c]!r}")
    for s in range(3):
        if v1[s] and v1[(s + 1) % 3] and not a[s] > 0.0:
            raise DomainError(f"a on side {s} joins two V1 corners and must be positive, got {a[s]!r}")


def decorated_angles(
    a: Sequence[float],
    b: Sequence[float],
    v1: Sequence[bool],
    keep_truncations: bool = False,
) -> FaceAngles:
    """Six dihedral angles of one decorated triangle.

    a[s] per side, b[c] per corner (ignored on V0 corners), v1[c] the
    corner class. Raises DomainError outside the open box of the
    coordinates; triangle-inequality failures get the constant extension.
    """
    a = [float(x) for x in a]
    b = [float(x) if v1[c] else 0.0 for c, x in enumerate(b)]
    _check_box(a, b, v1)
    ls = [edge_length(a[s], b[s], b[(s + 1) % 3], v1[s], v1[(s + 1) % 3]) for s in range(3)]
    ext = _extended(ls)
    if ext is not None:
        return ext
    beta = _betas(ls)
    n1 = sum(1 for x in v1 if x)
    truncations: List[TruncatingFaceLengths] = []

    if n1 == 0:
        alpha = tuple(
            0.5 * (PI + beta[(s + 2) % 3] - beta[s] - beta[(s + 1) % 3]) for s in range(3)
        )
    elif n1 == 3:
        t0 = truncation_at(0, a, b, v1)
        t1 = truncation_at(1, a, b, v1)
        truncations = [t0, t1]
        alpha = (
            g(t0.sigma, t0.sigma_out, t0.sigma_in),
            g(t1.sigma, t1.sigma_out, t1.sigma_in),
            g(t0.sigma, t0.sigma_in, t0.sigma_out),
        )
    elif n1 == 2:
        j = next(c for c in range(3) if not v1[c])
        i = (j + 2) % 3
        tr = truncation_at(i, a, b, v1)
        truncations = [tr]
        alpha_ij = g(tr.sigma, tr.sigma_out, tr.sigma_in)
        alpha_ki = g(tr.sigma, tr.sigma_in, tr.sigma_out)
        alpha_jk = PI - alpha_ij - beta[j]
        alpha = [0.0, 0.0, 0.0]
        alpha[i], alpha[j], alpha[(j + 1) % 3] = alpha_ij, alpha_jk, alpha_ki
        alpha = tuple(alpha)
    else:
        i = next(c for c in range(3) if v1[c])
        j = (i + 1) % 3
        tr = truncation_at(i, a, b, v1)
        truncations = [tr]
        alpha_ij = g(tr.sigma, tr.sigma_out, tr.sigma_in)
        alpha_jk = PI - beta[j] - alpha_ij
        alpha_ki = g(tr.sigma, tr.sigma_in, tr.sigma_out)
        alpha = [0.0, 0.0, 0.0]
        alpha[i], alpha[j], alpha[(i + 2) % 3] = alpha_ij, alpha_jk, alpha_ki
        alpha = tuple(alpha)

    return FaceAngles(alpha, beta, extended=False, truncations=truncations if keep_truncations else [])


def face_classes(tri: Triangulation) -> List[Tuple[bool, bool, bool]]:
    """V1 pattern of each triangle's corners, computed once per triangulation."""
    v1 = tri.v1
    return [tuple(v in v1 for v in cycle) for cycle in tri.triangles]


def face_angles(t: TetraCoords, tri: Triangulation, k: int, classes=None) -> FaceAngles:
    sides = tri.triangle_edges[k]
    corners = tri.triangles[k]
    pattern = classes[k] if classes is not None else tuple(v in tri.v1 for v in corners)
    return decorated_angles([t.a[e] for e in sides], [t.b[v] for v in corners], pattern)


def triangle_angles(t: TetraCoords, tri: Triangulation, faces: Optional[Sequence[int]] = None) -> TriangleAngles:
    classes = face_classes(tri)
    ks = range(len(tri.triangles)) if faces is None else faces
    alpha = np.zeros((len(tri.triangles), 3))
    beta = np.zeros((len(tri.triangles), 3))
    extended = np.zeros(len(tri.triangles), dtype=bool)
    for k in ks:
        fa = face_angles(t, tri, k, classes)
        alpha[k] = fa.alpha
        beta[k] = fa.beta
        extended[k] = fa.extended
    return TriangleAngles(alpha, beta, extended)
