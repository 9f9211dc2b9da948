import math

import numpy as np
import pytest

from hypercircle.cellcomplex import subtriangulate
from hypercircle.errors import DomainError, NotInER
from hypercircle.examples import octahedron_complex
from hypercircle.hypkernel import (
    DecoratedMetric,
    TetraCoords,
    a_from_f1,
    a_from_f2,
    a_from_f3,
    alpha_from_corner,
    decorated_angles,
    er_violations,
    f1,
    f2,
    f3,
    psi,
    psi_inverse,
    r_of_b,
    triangle_beta,
)


@pytest.mark.parametrize('b', [0.05, 0.7, 2.0, 9.0])
def test_f3_with_equal_truncations_is_twice_the_radius(b):
    assert f3(b, b, 0.0) == pytest.approx(2.0 * r_of_b(b), rel=1e-12)


@pytest.mark.parametrize('b', [1e-3, 0.4, 1.0, 5.0, 30.0])
def test_r_of_b_is_an_involution(b):
    assert r_of_b(r_of_b(b)) == pytest.approx(b, rel=1e-10)


@pytest.mark.parametrize('x', [-3.0, -0.2, 0.0, 1.5, 12.0])
def test_f1_and_f2_invert(x):
    assert a_from_f1(f1(x)) == pytest.approx(x, abs=1e-10)
    for b in (0.3, 1.0, 2.5):
        assert a_from_f2(f2(b, x), b) == pytest.approx(x, abs=1e-9)


@pytest.mark.parametrize('x', [0.1, 0.8, 3.0])
def test_f3_inverts_on_positive_arguments(x):
    for u, v in ((0.5, 0.5), (0.3, 1.7), (2.0, 1.1)):
        assert a_from_f3(f3(u, v, x), u, v) == pytest.approx(x, rel=1e-9)


def test_large_arguments_stay_finite():
    assert math.isfinite(f1(200.0))
    assert math.isfinite(f2(1e-6, 300.0))
    assert math.isfinite(f3(40.0, 1e-5, 250.0))


def test_length_formulas_reject_nonpositive_truncation():
    with pytest.raises(DomainError):
        f2(0.0, 1.0)
    with pytest.raises(DomainError):
        f3(1.0, -0.1, 1.0)
    with pytest.raises(DomainError):
        r_of_b(0.0)


@pytest.mark.parametrize('l', [0.2, 1.0, 4.0])
def test_equilateral_angle(l):
    beta = triangle_beta(l, l, l)
    assert math.cos(beta) == pytest.approx(math.cosh(l) / (math.cosh(l) + 1.0), rel=1e-12)


def test_degenerate_triangles_get_the_extension_values():
    assert triangle_beta(1.0, 1.0, 2.5) == math.pi
    assert triangle_beta(3.0, 1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        triangle_beta(-1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        triangle_beta(float('nan'), 1.0, 1.0)


def test_zero_sides_are_degenerate_not_errors():
    assert triangle_beta(736.19, 0.0, 0.0) == 0.0
    assert triangle_beta(0.0, 0.0, 5.0) == math.pi
    assert triangle_beta(0.0, 2.0, 2.0) == 0.0
    assert triangle_beta(0.0, 0.0, 0.0) == 0.0


def test_underflowed_truncation_length_keeps_angles_finite():
    # f1 of a very negative sum underflows to a zero-length truncating side
    assert f1(-1520.0) == 0.0
    fa = decorated_angles([-760.0, 0.0, -760.0], [0.5, 0.0, 0.0], (True, False, False))
    assert not fa.extended
    values = np.array(fa.alpha + fa.beta)
    assert np.all(np.isfinite(values))
    assert np.all((values >= 0.0) & (values <= math.pi))


def test_very_negative_a_in_a_mixed_triangle():
    fa = decorated_angles([-1500.0] * 3, [0.7, 0.0, 0.0], (True, False, False))
    values = np.array(fa.alpha + fa.beta)
    assert np.all(np.isfinite(values))
    assert np.all((values >= 0.0) & (values <= math.pi))


def test_ideal_triangle_angles():
    a = [0.3, -0.4, 1.1]
    fa = decorated_angles(a, [0.0, 0.0, 0.0], (False, False, False))
    assert not fa.extended
    assert sum(fa.alpha) == pytest.approx(0.5 * (3.0 * math.pi - sum(fa.beta)), abs=1e-12)
    for s in range(3):
        expected = 0.5 * (math.pi + fa.beta[(s + 2) % 3] - fa.beta[s] - fa.beta[(s + 1) % 3])
        assert fa.alpha[s] == pytest.approx(expected, abs=1e-12)
    assert all(0.0 < x < math.pi for x in fa.alpha)


def test_long_side_triggers_the_constant_extension():
    fa = decorated_angles([10.0, 0.0, 0.0], [0.0, 0.0, 0.0], (False, False, False))
    assert fa.extended
    assert fa.alpha == (math.pi, 0.0, 0.0)
    assert fa.beta == (0.0, 0.0, math.pi)


def test_box_is_enforced():
    with pytest.raises(DomainError):
        decorated_angles([0.0, 1.0, 1.0], [1.0, 1.0, 1.0], (True, True, True))
    with pytest.raises(DomainError):
        decorated_angles([1.0, 1.0, 1.0], [1.0, 0.0, 1.0], (True, True, True))


def test_alpha_agrees_at_both_ends_of_a_side():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(40):
        a = rng.uniform(0.4, 1.6, size=3)
        b = rng.uniform(0.4, 1.6, size=3)
        v1 = (True, True, True)
        fa = decorated_angles(a, b, v1)
        if fa.extended:
            continue
        for s in range(3):
            from_tail = alpha_from_corner(s, s, a, b, v1)
            from_head = alpha_from_corner((s + 1) % 3, s, a, b, v1)
            assert from_tail == pytest.approx(from_head, abs=1e-9)
            assert fa.alpha[s] == pytest.approx(from_tail, abs=1e-9)
        checked += 1
    assert checked > 10


@pytest.mark.parametrize('v1', [(True, True, False), (True, False, False)])
def test_mixed_triangles_have_angles_in_range(v1):
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.uniform(0.3, 1.5, size=3)
        b = rng.uniform(0.3, 1.5, size=3)
        fa = decorated_angles(a, b, v1)
        if fa.extended:
            continue
        assert all(0.0 <= x <= math.pi for x in fa.alpha)
        assert all(0.0 < x < math.pi for x in fa.beta)


@pytest.mark.parametrize('tags', [range(6), [0, 1, 4], []])
def test_psi_round_trip(tags):
    tri = subtriangulate(octahedron_complex(list(tags)))
    rng = np.random.default_rng(11)
    edge_class = np.asarray(tri.edge_class)
    checked = 0
    for _ in range(30):
        a = np.where(edge_class == 1, rng.uniform(0.3, 2.0, tri.n_edges), rng.uniform(-1.0, 1.5, tri.n_edges))
        b = np.zeros(tri.n_vertices)
        v1 = sorted(tri.v1)
        b[v1] = rng.uniform(0.4, 2.0, len(v1))
        t = TetraCoords(a, b)
        m = psi(t, tri)
        if er_violations(m, tri):
            continue
        back = psi_inverse(m, tri)
        np.testing.assert_allclose(back.a, a, atol=1e-8)
        np.testing.assert_allclose(back.b, b, atol=1e-8)
        checked += 1
    assert checked > 0


def test_psi_rejects_nonpositive_b(octahedron_tri):
    t = TetraCoords(np.ones(octahedron_tri.n_edges), np.zeros(octahedron_tri.n_vertices))
    with pytest.raises(DomainError):
        psi(t, octahedron_tri)


def test_psi_inverse_reports_the_violated_constraint(octahedron_tri):
    tri = octahedron_tri
    l = np.full(tri.n_edges, 3.0)
    l[0] = 20.0
    m = DecoratedMetric(l, np.full(tri.n_vertices, 0.5))
    with pytest.raises(NotInER) as exc:
        psi_inverse(m, tri)
    kinds = {v['constraint'] for v in exc.value.details['violations']}
    assert 'triangle_inequality' in kinds


def test_overlapping_circles_are_flagged(octahedron_tri):
    tri = octahedron_tri
    m = DecoratedMetric(np.full(tri.n_edges, 1.0), np.full(tri.n_vertices, 0.6))
    found = er_violations(m, tri)
    assert {v['constraint'] for v in found} == {'circles_disjoint'}
    assert len(found) == tri.n_edges
