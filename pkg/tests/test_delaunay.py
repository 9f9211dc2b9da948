import math

import numpy as np
import pytest

from hypercircle.delaunay import (
    FlatConeSurface,
    IntrinsicTriangulation,
    PlaneCircle,
    SphereCap,
    circle_intersection_angle,
    empty_cap_violations,
    from_stereographic,
    intrinsic_delaunay_flat,
    spherical_delaunay,
    stereographic_theta,
    to_stereographic,
)
from hypercircle.errors import DegenerateInput, Disjoint, DuplicatePoint, InputError
from hypercircle.examples import flat_torus, lawson_centers, lawson_squares

AXES = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]


def _random_sphere(n, seed):
    pts = np.random.default_rng(seed).normal(size=(n, 3))
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def _surface(doc):
    return FlatConeSurface.from_faces(doc['faces'], doc['lengths'], doc.get('face_edges'))


def test_plane_circles_at_unit_distance():
    c1, c2 = PlaneCircle(0j, 1.0), PlaneCircle(1 + 0j, 1.0)
    assert circle_intersection_angle(c1, c2) == pytest.approx(2.0 * math.pi / 3.0)
    flipped = PlaneCircle(1 + 0j, 1.0, interior=False)
    assert circle_intersection_angle(c1, flipped) == pytest.approx(math.pi / 3.0)


def test_disjoint_circles_raise():
    with pytest.raises(Disjoint):
        circle_intersection_angle(PlaneCircle(0j, 1.0), PlaneCircle(5 + 0j, 1.0))


def test_orthogonal_caps():
    s = 1.0 / math.sqrt(3.0)
    a = SphereCap((s, s, s), s)
    b = SphereCap((s, s, -s), s)
    assert circle_intersection_angle(a, b) == pytest.approx(math.pi / 2.0)


def test_stereographic_round_trip():
    for z in (0j, 1 + 0j, -0.3 + 2.5j, 40 - 7j):
        p = from_stereographic(z)
        assert np.linalg.norm(p) == pytest.approx(1.0)
        assert to_stereographic(p) == pytest.approx(z)
    assert to_stereographic(from_stereographic(None)) is None


def test_octahedron_points():
    pattern = spherical_delaunay(AXES)
    c = pattern.complex
    assert (c.n_vertices, c.n_edges, c.n_faces) == (6, 12, 8)
    np.testing.assert_allclose(pattern.theta, math.pi / 2.0, atol=1e-12)
    assert not pattern.removed_diagonals
    assert pattern.theta_path_gap < 1e-9


def test_cube_merges_into_squares():
    s = 1.0 / math.sqrt(3.0)
    cube = [[x * s, y * s, z * s] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    pattern = spherical_delaunay(cube)
    c = pattern.complex
    assert c.n_faces == 6
    assert all(len(cycle) == 4 for cycle in c.faces)
    assert len(pattern.removed_diagonals) == 6
    np.testing.assert_allclose(pattern.theta, math.pi / 3.0, atol=1e-9)


def test_random_points_have_empty_caps():
    pattern = spherical_delaunay(_random_sphere(40, seed=5))
    assert pattern.complex.genus == 0
    assert empty_cap_violations(pattern) == []
    assert np.all((pattern.theta > 0.0) & (pattern.theta < math.pi))


def test_theta_is_the_same_in_the_plane():
    pattern = spherical_delaunay(_random_sphere(25, seed=9))
    np.testing.assert_allclose(stereographic_theta(pattern), pattern.theta, atol=1e-9)
    np.testing.assert_allclose(stereographic_theta(pattern, pole=[0.3, -0.2, 0.9]), pattern.theta, atol=1e-9)


def test_exterior_angles_close_up_at_every_vertex():
    pattern = spherical_delaunay(_random_sphere(30, seed=2))
    c = pattern.complex
    for v in range(c.n_vertices):
        total = sum(math.pi - pattern.theta[e] for e in c.vertex_edges(v))
        assert total == pytest.approx(2.0 * math.pi, abs=1e-9)


def test_degenerate_point_sets():
    with pytest.raises(DegenerateInput):
        spherical_delaunay(AXES[:3])
    with pytest.raises(DuplicatePoint):
        spherical_delaunay(AXES + [AXES[0]])
    with pytest.raises(DegenerateInput):
        spherical_delaunay([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]])
    with pytest.raises(InputError):
        spherical_delaunay([[2, 0, 0]] + AXES[1:])


def test_equilateral_torus_needs_no_flips():
    pattern = intrinsic_delaunay_flat(_surface(flat_torus(3)))
    assert pattern.flips == 0
    assert pattern.complex.n_edges == 27
    assert not pattern.complex.v1
    np.testing.assert_allclose(pattern.theta, 2.0 * math.pi / 3.0, atol=1e-12)
    np.testing.assert_allclose(pattern.cone_angles, 2.0 * math.pi, atol=1e-12)


def test_sheared_torus_is_flipped_to_delaunay():
    doc = flat_torus(3)
    d = math.sqrt(3.6)
    doc['lengths'] = [[1.0, d, 1.0] if k % 2 == 0 else [1.0, 1.0, d] for k in range(len(doc['faces']))]
    pattern = intrinsic_delaunay_flat(_surface(doc))
    assert pattern.flips >= 9
    assert pattern.complex.genus == 1
    assert np.all(pattern.theta < math.pi)
    np.testing.assert_allclose(pattern.cone_angles, 2.0 * math.pi, atol=1e-9)


def test_flip_preserves_the_cone_angles():
    doc = flat_torus(3)
    d = math.sqrt(3.6)
    doc['lengths'] = [[1.0, d, 1.0] if k % 2 == 0 else [1.0, 1.0, d] for k in range(len(doc['faces']))]
    mesh = IntrinsicTriangulation(_surface(doc))
    before = mesh.cone_angles()
    e = max(range(mesh.n_edges), key=mesh.violation)
    assert mesh.violation(e) > 0.0
    assert mesh.flip(e)
    assert mesh.violation(e) < 0.0
    np.testing.assert_allclose(mesh.cone_angles(), before, atol=1e-9)


def _side_map(mesh):
    sides = [set() for _ in range(mesh.n_edges)]
    for k, row in enumerate(mesh.tri_edges):
        for s, e in enumerate(row):
            sides[e].add((k, s))
    return sides


def test_flips_keep_the_side_map_in_sync():
    doc = flat_torus(3)
    d = math.sqrt(3.6)
    doc['lengths'] = [[1.0, d, 1.0] if k % 2 == 0 else [1.0, 1.0, d] for k in range(len(doc['faces']))]
    mesh = IntrinsicTriangulation(_surface(doc))
    flipped = 0
    for e in range(mesh.n_edges):
        if mesh.violation(e) > 0.0 and mesh.flip(e):
            flipped += 1
            assert [set(x) for x in mesh.sides] == _side_map(mesh)
            assert all(len(x) == 2 for x in mesh.sides)
    assert flipped > 0
    mesh.make_delaunay()
    assert [set(x) for x in mesh.sides] == _side_map(mesh)


def test_lawson_squares_surface():
    pattern = intrinsic_delaunay_flat(_surface(lawson_squares()))
    c = pattern.complex
    assert (c.n_vertices, c.n_edges, c.n_faces) == (4, 12, 6)
    assert c.genus == 2
    assert c.v1 == frozenset(range(4))
    assert len(pattern.removed_diagonals) == 6
    np.testing.assert_allclose(pattern.theta, math.pi / 2.0, atol=1e-9)
    np.testing.assert_allclose(pattern.cone_angles, 3.0 * math.pi, atol=1e-9)


def test_lawson_centers_surface():
    pattern = intrinsic_delaunay_flat(_surface(lawson_centers()))
    c = pattern.complex
    assert (c.n_vertices, c.n_edges, c.n_faces) == (10, 24, 12)
    assert c.v1 == frozenset(range(4))
    np.testing.assert_allclose(pattern.theta, math.pi / 2.0, atol=1e-9)


def test_missing_length_is_an_input_error():
    doc = lawson_squares()
    del doc['lengths']['d0']
    with pytest.raises(InputError):
        IntrinsicTriangulation(_surface(doc))
