import pytest
from pydantic import ValidationError

from hypercircle.errors import InputError
from hypercircle.examples import octahedron_sphere
from utils.run_config import RunConfig, load_run_config
from conftest import write_json


def test_minimal_document():
    cfg = RunConfig.model_validate({'angle_data': octahedron_sphere()})
    assert cfg.input_kind == 'angle_data'
    assert cfg.input_section.v1_all
    assert cfg.solver.grad_tol == 1e-10
    assert cfg.solver.max_iter == 1000
    assert cfg.render.depth == 2
    assert cfg.render.layers == ['edges', 'vertex_circles', 'face_circles', 'domain']


@pytest.mark.parametrize('doc', [
    {},
    {'angle_data': octahedron_sphere(), 'sphere_points': {'points': [[1, 0, 0]]}},
    {'angle_data': octahedron_sphere(), 'colour': 'red'},
    {'angle_data': octahedron_sphere(), 'solver': {'grad_tol': 0.0}},
    {'angle_data': octahedron_sphere(), 'render': {'layers': ['edges', 'ghosts']}},
    {'sphere_points': {'points': [[1, 0, 0]], 'chart': [[0.0, 0.0]]}},
    {'angle_data': {'theta': [1.0]}},
    {'angle_data': {'polygons': [4], 'theta': [1.0]}},
    {'cover_spec': {'chart': [[0.0, 0.0]], 'sheets': 0}},
])
def test_invalid_documents(doc):
    with pytest.raises(ValidationError):
        RunConfig.model_validate(doc)


def test_section_from_a_file(tmp_path):
    write_json(tmp_path / 'inputs' / 'octa.json', octahedron_sphere())
    run = write_json(tmp_path / 'run.json', {'angle_data': 'inputs/octa.json', 'k_inf': 4,
                                              'solver': {'max_iter': 50}})
    cfg = load_run_config(run)
    assert cfg.k_inf == 4
    assert len(cfg.angle_data.theta) == 12
    assert cfg.solver.max_iter == 50


def test_missing_section_file(tmp_path):
    run = write_json(tmp_path / 'run.json', {'angle_data': 'nowhere.json'})
    with pytest.raises(InputError):
        load_run_config(run)


def test_unreadable_documents(tmp_path):
    with pytest.raises(InputError):
        load_run_config(tmp_path / 'missing.json')
    bad = tmp_path / 'bad.json'
    bad.write_text('[1, 2', encoding='utf-8')
    with pytest.raises(InputError):
        load_run_config(bad)
    listed = write_json(tmp_path / 'list.json', [1, 2])
    with pytest.raises(InputError):
        load_run_config(listed)


def test_bundled_documents_validate(data_dir):
    names = sorted(p.name for p in data_dir.glob('*.json'))
    assert names
    for path in data_dir.glob('*.json'):
        cfg = load_run_config(path)
        assert cfg.description
