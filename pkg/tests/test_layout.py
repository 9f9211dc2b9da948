import cmath
import math

import numpy as np
import pytest

from hypercircle.delaunay import PlaneCircle, circle_intersection_angle
from hypercircle.errors import OrthocircleFailure
from hypercircle.layout import (
    canonical_triangle,
    circles,
    contains,
    corner_angle_sum,
    develop,
    distance,
    from_klein,
    fuchsian_generators,
    geodesic_circle,
    holonomy,
    hyperbolic_circle,
    interior_vertices,
    inverse,
    inversive_product,
    isometry_from_pair,
    klein,
    matrix_distance,
    mobius,
    orthocircle,
    redundant_circle_residual,
    tile,
    to_real_form,
    triangle_sample,
)


@pytest.fixture(scope='module')
def developed(lawson_solution):
    layout = develop(lawson_solution.tri, lawson_solution.metric)
    return layout, fuchsian_generators(layout)


def test_isometries_preserve_distance():
    m = isometry_from_pair(0.3 - 0.2j, 0.5 + 0.1j)
    assert mobius(m, 0j) == pytest.approx(0.3 - 0.2j)
    z, w = 0.1 + 0.4j, -0.6 + 0.05j
    assert distance(mobius(m, z), mobius(m, w)) == pytest.approx(distance(z, w), rel=1e-12)
    assert matrix_distance(m @ inverse(m), np.eye(2)) < 1e-12


def test_isometry_direction():
    p, q = 0.2 + 0.1j, -0.4 + 0.3j
    m = isometry_from_pair(p, q)
    w = mobius(inverse(m), q)
    assert abs(w.imag) < 1e-12 and w.real > 0.0


def test_real_form_has_unit_determinant():
    m = isometry_from_pair(0.5 + 0.2j, -0.1j)
    h = to_real_form(m)
    assert np.isrealobj(h)
    assert np.linalg.det(h) == pytest.approx(1.0)
    assert abs(np.trace(h)) == pytest.approx(abs(np.trace(m).real), rel=1e-12)


def test_klein_round_trip():
    for z in (0j, 0.5 + 0.5j, -0.9 + 0.01j):
        assert from_klein(klein(z)) == pytest.approx(z)


def test_canonical_triangle_has_the_given_sides():
    lengths = [1.2, 0.8, 1.5]
    for anchor in range(3):
        pos = canonical_triangle(lengths, anchor)
        assert pos[anchor] == 0j
        assert pos[(anchor + 1) % 3].imag == 0.0
        for s in range(3):
            assert distance(pos[s], pos[(s + 1) % 3]) == pytest.approx(lengths[s], rel=1e-10)
        assert contains(pos, triangle_sample_of(pos))


def triangle_sample_of(pos):
    return from_klein(sum(klein(z) for z in pos) / 3.0)


def test_hyperbolic_circle_radius():
    c = 0.4 + 0.3j
    circle = hyperbolic_circle(c, 0.7)
    for k in range(6):
        z = circle.center + circle.radius * cmath.exp(1j * k)
        assert distance(c, z) == pytest.approx(0.7, rel=1e-10)


def test_geodesic_circle_is_orthogonal_to_the_boundary():
    g = geodesic_circle(0.2 + 0.3j, -0.5 + 0.1j)
    unit = PlaneCircle(0j, 1.0)
    assert inversive_product(g, unit) == pytest.approx(0.0, abs=1e-12)
    assert geodesic_circle(0.2 + 0.2j, -0.3 - 0.3j) is None


def test_orthocircle_of_collinear_centers_fails():
    row = [PlaneCircle(complex(x, 0.0), 0.1) for x in (0.0, 1.0, 2.0)]
    with pytest.raises(OrthocircleFailure):
        orthocircle(row)


def test_layout_matches_the_metric(developed, lawson_solution):
    layout, _ = developed
    assert sorted(layout.positions) == list(range(len(lawson_solution.tri.triangles)))
    assert layout.edge_residual() < 1e-9
    assert len(layout.tree_edges) == len(layout.positions) - 1
    for k in layout.faces:
        assert contains(layout.positions[k], triangle_sample(layout, k))


def test_cone_angles_close_up(developed, lawson_solution):
    layout, _ = developed
    for v in range(lawson_solution.tri.n_vertices):
        assert corner_angle_sum(layout, v) == pytest.approx(2.0 * math.pi, abs=1e-8)
        assert matrix_distance(holonomy(layout, v), np.eye(2)) < 1e-7
    assert interior_vertices(layout) == list(range(lawson_solution.tri.n_vertices))


def test_generators_are_hyperbolic(developed):
    _, gens = developed
    nontrivial = [g for g in gens if not g.trivial]
    assert len(nontrivial) >= 4
    for g in nontrivial:
        assert abs(g.trace) > 2.0
        assert np.linalg.det(g.matrix) == pytest.approx(1.0)
        assert g.residual < 1e-8
        doc = g.to_dict()
        assert len(doc['matrix']) == 4


def test_vertex_circles_are_orthogonal_to_face_circles(developed, lawson_solution):
    layout, _ = developed
    pattern = circles(layout, lawson_solution.metric)
    tri = lawson_solution.tri
    for k in layout.order:
        face_circle = pattern.triangle_circles[k]
        for cc, v in enumerate(tri.triangles[k]):
            z = layout.positions[k][cc]
            circle = hyperbolic_circle(z, float(lawson_solution.metric.r[v]))
            assert inversive_product(circle, face_circle) == pytest.approx(0.0, abs=1e-7)
    assert set(pattern.face_circles) == set(range(lawson_solution.data.complex.n_faces))


def test_redundant_diagonals_merge_face_circles(developed, lawson_solution):
    layout, _ = developed
    pattern = circles(layout, lawson_solution.metric)
    tri = lawson_solution.tri
    for e in range(tri.n_edges):
        if not tri.redundant[e] or e not in layout.tree_edges:
            continue
        (k, _), (m, _) = tri.complex.edge_sides(e)
        a, b = pattern.triangle_circles[k], pattern.triangle_circles[m]
        assert abs(a.center - b.center) < 1e-7
        assert a.radius == pytest.approx(b.radius, abs=1e-7)


def test_redundant_residual_is_reported(developed, lawson_solution):
    layout, _ = developed
    pattern = circles(layout, lawson_solution.metric)
    assert any(lawson_solution.tri.redundant[e] for e in layout.tree_edges)
    assert pattern.redundant_residual < 1e-8
    assert redundant_circle_residual(layout, pattern.triangle_circles) == pattern.redundant_residual


def test_redundant_residual_sees_a_displaced_circle(developed, lawson_solution):
    layout, _ = developed
    pattern = circles(layout, lawson_solution.metric)
    tri = lawson_solution.tri
    e = next(e for e in layout.tree_edges if tri.redundant[e])
    (k, _), _ = tri.complex.edge_sides(e)
    moved = dict(pattern.triangle_circles)
    old = moved[k]
    moved[k] = PlaneCircle(old.center + 1e-3, old.radius, old.interior)
    assert redundant_circle_residual(layout, moved) >= 1e-3 - 1e-8


def test_face_circles_meet_at_the_target_angle(developed, lawson_solution):
    layout, _ = developed
    pattern = circles(layout, lawson_solution.metric)
    tri = lawson_solution.tri
    checked = 0
    for e in layout.tree_edges:
        if tri.redundant[e]:
            continue
        (k, _), (m, _) = tri.complex.edge_sides(e)
        angle = circle_intersection_angle(pattern.triangle_circles[k], pattern.triangle_circles[m])
        assert angle == pytest.approx(math.pi / 2.0, abs=1e-7)
        checked += 1
    assert checked > 0


def test_tiling(developed):
    layout, gens = developed
    nontrivial = sum(1 for g in gens if not g.trivial)
    assert len(tile(layout, gens, 0)) == 1
    copies = tile(layout, gens, 1)
    assert 1 < len(copies) <= 1 + 2 * nontrivial
    deeper = tile(layout, gens, 2)
    assert len(deeper) > len(copies)
    for copy in deeper:
        assert all(copy.word[i] != -copy.word[i + 1] for i in range(len(copy.word) - 1))


def test_seed_vertex_star_comes_first(lawson_solution):
    tri = lawson_solution.tri
    layout = develop(tri, lawson_solution.metric, seed_vertex=2)
    star = {k for k, _ in tri.complex.vertex_star(2)}
    assert layout.seed_vertex == 2
    assert set(layout.order[:len(star)]) == star
    assert layout.edge_residual() < 1e-9
