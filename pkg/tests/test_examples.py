import math

import pytest

from hypercircle.cellcomplex import build_complex
from hypercircle.delaunay import FlatConeSurface, intrinsic_delaunay_flat
from hypercircle.examples import (
    BUNDLES,
    OCTAHEDRON_NORTH,
    bundle,
    flat_torus,
    hyperelliptic_random,
    lawson_centers,
    lawson_curve,
    lawson_squares,
    octahedron_complex,
    octahedron_ideal,
    octahedron_sphere,
)
from conftest import read_json


def _approx_chart(chart):
    return [z if isinstance(z, str) else pytest.approx(z, abs=1e-12) for z in chart]


@pytest.mark.parametrize('name, builder', [
    ('lawson-squares', lawson_squares),
    ('lawson-centers', lawson_centers),
])
def test_flat_bundles_match_their_builders(data_dir, name, builder):
    stored = read_json(data_dir / f"{name}.json")['flat_cone_surface']
    built = builder()
    assert stored['faces'] == built['faces']
    assert stored['face_edges'] == built['face_edges']
    assert stored['lengths'] == pytest.approx(built['lengths'], rel=1e-15)


def test_lawson_curve_bundle(data_dir):
    stored = read_json(data_dir / 'lawson-curve.json')['cover_spec']
    built = lawson_curve()
    assert stored['chart'] == _approx_chart(built['chart'])
    assert stored['branch'] == built['branch']
    assert stored['sheets'] == 2


def test_octahedron_bundle(data_dir):
    doc = read_json(data_dir / 'octahedron-sphere.json')
    assert doc['k_inf'] == OCTAHEDRON_NORTH
    built = octahedron_sphere()
    assert doc['angle_data']['faces'] == built['faces']
    assert doc['angle_data']['theta'] == pytest.approx(built['theta'])
    assert doc['angle_data']['v1_all'] is True


def test_ideal_octahedron_bundle(data_dir):
    doc = read_json(data_dir / 'octahedron-ideal.json')
    assert doc['k_inf'] == OCTAHEDRON_NORTH
    built = octahedron_ideal()
    assert doc['angle_data']['faces'] == built['faces']
    assert doc['angle_data']['theta'] == pytest.approx(built['theta'], rel=1e-15)
    assert doc['angle_data']['v1'] == built['v1'] == [OCTAHEDRON_NORTH]


def test_ideal_octahedron_closes_up_at_the_ideal_vertices():
    built = octahedron_ideal()
    c = octahedron_complex(built['v1'])
    for v in range(c.n_vertices):
        if v == OCTAHEDRON_NORTH:
            continue
        total = sum(math.pi - built['theta'][e] for e in c.vertex_edges(v))
        assert total == pytest.approx(2.0 * math.pi, abs=1e-12)


def test_hyperelliptic_bundle_shape(data_dir):
    stored = read_json(data_dir / 'hyperelliptic-random.json')['cover_spec']
    built = hyperelliptic_random()
    assert stored['chart'][0] == 'inf' and built['chart'][0] == 'inf'
    assert len(stored['chart']) == len(built['chart'])
    assert stored['branch'] == built['branch']


def test_random_cover_is_reproducible():
    assert hyperelliptic_random(seed=3) == hyperelliptic_random(seed=3)
    assert hyperelliptic_random(seed=3) != hyperelliptic_random(seed=4)


def test_bundle_documents():
    assert set(BUNDLES) == {'lawson-squares', 'lawson-centers', 'lawson-curve',
                            'hyperelliptic-random', 'octahedron-sphere', 'octahedron-ideal'}
    assert bundle('octahedron-sphere')['k_inf'] == OCTAHEDRON_NORTH
    assert bundle('octahedron-ideal')['k_inf'] == OCTAHEDRON_NORTH
    assert set(bundle('lawson-curve')) == {'cover_spec'}
    with pytest.raises(KeyError):
        bundle('klein-quartic')


def test_flat_torus_builder():
    doc = flat_torus(4)
    assert len(doc['faces']) == 32
    c = build_complex(doc['faces'], [])
    assert c.genus == 1
    pattern = intrinsic_delaunay_flat(FlatConeSurface.from_faces(doc['faces'], doc['lengths']))
    assert list(pattern.theta) == pytest.approx([2.0 * math.pi / 3.0] * c.n_edges)
