import math
import shutil

import pytest

from app import build_parser, main
from commands import execute_command, get_commands
from commands.ingest import ingest, resolve_output_dir, resolve_threads, solver_options
from hypercircle.examples import lawson_squares_cells
from utils.run_config import RunConfig
from conftest import read_json, write_json


def lawson_angles(theta):
    cells = lawson_squares_cells()
    return {
        'angle_data': {
            'faces': [q['cycle'] for q in cells],
            'face_edges': [q['sides'] for q in cells],
            'theta': [theta] * 12,
            'v1_all': True,
        },
    }


@pytest.fixture
def lawson_doc(tmp_path):
    doc = lawson_angles(math.pi / 2.0)
    doc['solver'] = {'grad_tol': 1e-9, 'max_iter': 500}
    doc['render'] = {'depth': 1}
    return write_json(tmp_path / 'lawson.json', doc)


@pytest.fixture
def octahedron_doc(tmp_path, data_dir):
    return shutil.copy(data_dir / 'octahedron-sphere.json', tmp_path / 'octahedron.json')


def test_parser_follows_the_command_schemas():
    parser = build_parser()
    args = parser.parse_args(['uniformize', 'run.json', '--grad-tol', '1e-8', '--layers', 'edges', 'domain',
                              '--validate'])
    assert args.config == 'run.json'
    assert args.grad_tol == 1e-8
    assert args.layers == ['edges', 'domain']
    assert args.validate is True
    assert args.trace is None
    assert {c['name'] for c in get_commands()} == {'uniformize', 'validate', 'sphere', 'render'}


def test_usage_errors_exit_2(capsys):
    assert main(['validate']) == 2
    assert main(['uniformize', 'run.json', '--layers', 'ghosts']) == 2


def test_missing_run_document(tmp_path):
    out = tmp_path / 'out'
    assert main(['uniformize', str(tmp_path / 'nope.json'), '--output-dir', str(out)]) == 2
    assert not out.exists()


def test_invalid_run_document(tmp_path):
    path = write_json(tmp_path / 'bad.json', {'angle_data': {'theta': [1.0]}})
    result = execute_command('validate', {'config': str(path), 'output_dir': str(tmp_path / 'out')})
    assert result['exit_code'] == 2
    assert result['error_type'] == 'ValidationError'


def test_unknown_command():
    assert execute_command('triangulate', {})['exit_code'] == 2


def test_bad_log_level_in_environment(monkeypatch, octahedron_doc, tmp_path):
    monkeypatch.setenv('HYPERCIRCLE_LOG_LEVEL', 'loud')
    assert main(['validate', str(octahedron_doc), '--output-dir', str(tmp_path / 'out')]) == 2


def test_validate_sphere_data(octahedron_doc, tmp_path, capsys):
    out = tmp_path / 'out'
    assert main(['validate', str(octahedron_doc), '--output-dir', str(out)]) == 0
    report = read_json(out / 'validation.json')
    assert report['theorem'] == 'bao_bonahon'
    assert report['passed'] is True
    assert report['input_hash'].startswith('sha256:')
    assert report['complex']['vertices'] == 6
    assert 'bao_bonahon: all conditions hold' in capsys.readouterr().out


def test_validate_lawson(lawson_doc, tmp_path):
    result = execute_command('validate', {'config': str(lawson_doc), 'output_dir': str(tmp_path / 'ok')})
    assert result['exit_code'] == 0
    assert result['report']['theorem'] == 'schlenker'
    assert result['report']['sampled'] is False


def test_validate_reports_failures(tmp_path):
    path = write_json(tmp_path / 'flat.json', lawson_angles(math.pi - 0.01))
    out = tmp_path / 'out'
    assert main(['validate', str(path), '--output-dir', str(out)]) == 1
    report = read_json(out / 'validation.json')
    assert report['passed'] is False
    assert report['conditions']['4'] is False
    assert all(c['lhs'] <= c['rhs'] for c in report['certificates'] if c['kind'] == 'domain')


def test_exhaustive_flag_respects_the_cap(lawson_doc, tmp_path):
    result = execute_command('validate', {'config': str(lawson_doc), 'output_dir': str(tmp_path / 'out'),
                                          'cap': 4, 'exhaustive': True})
    assert result['exit_code'] == 1
    assert result['error_type'] == 'CapExceeded'


def test_validate_before_solving_stops_early(tmp_path):
    path = write_json(tmp_path / 'flat.json', lawson_angles(math.pi - 0.01))
    out = tmp_path / 'out'
    assert main(['uniformize', str(path), '--output-dir', str(out), '--validate']) == 1
    assert (out / 'validation.json').is_file()
    assert not (out / 'solution.json').exists()


def test_uniformize_then_render(lawson_doc, tmp_path):
    out = tmp_path / 'run'
    assert main(['uniformize', str(lawson_doc), '--output-dir', str(out), '--trace']) == 0
    summary = read_json(out / 'summary.json')
    assert summary['converged'] is True
    assert summary['genus'] == 2
    assert summary['generators'] >= 4
    assert summary['max_angle_residual'] < 1e-8
    assert summary['layout_residuals']['edge_length'] < 1e-8
    assert summary['layout_residuals']['redundant_circles'] < 1e-8
    assert summary['positive_radii'] == [0, 1, 2, 3]
    assert summary['complex']['kind'] == 'angle_data'

    solution = read_json(out / 'solution.json')
    assert len(solution['a']) == len(solution['edges'])
    assert len(read_json(out / 'trace.json')) == summary['iterations']
    gens = read_json(out / 'generators.json')
    assert gens['nontrivial'] == summary['generators']
    for name in ('domain.svg', 'cover.svg'):
        assert (out / name).read_text(encoding='utf-8').lstrip().startswith('<')

    redrawn = tmp_path / 'redrawn'
    assert main(['render', str(out), '--output-dir', str(redrawn), '--depth', '0',
                 '--layers', 'edges']) == 0
    assert (redrawn / 'cover.svg').is_file()


def test_render_needs_a_solution(tmp_path):
    assert main(['render', str(tmp_path)]) == 2


def test_sphere_needs_k_inf(lawson_doc, tmp_path):
    result = execute_command('sphere', {'config': str(lawson_doc), 'output_dir': str(tmp_path / 'out')})
    assert result['exit_code'] == 2
    result = execute_command('sphere', {'config': str(lawson_doc), 'k_inf': 0,
                                        'output_dir': str(tmp_path / 'out')})
    assert result['exit_code'] == 2
    assert result['error_type'] == 'NotSphere'


def test_settings_precedence(monkeypatch, lawson_doc, tmp_path):
    cfg = RunConfig.model_validate(dict(read_json(lawson_doc), output_dir=str(tmp_path / 'doc'),
                                        solver={'threads': 3, 'grad_tol': 1e-7}))
    monkeypatch.setenv('HYPERCIRCLE_THREADS', '5')
    monkeypatch.setenv('HYPERCIRCLE_OUTPUT_DIR', str(tmp_path / 'env'))
    assert resolve_threads(cfg, 2) == 2
    assert resolve_threads(cfg, None) == 3
    assert resolve_threads(RunConfig.model_validate(read_json(lawson_doc)), None) == 5
    assert resolve_output_dir(cfg, str(tmp_path / 'flag')) == tmp_path / 'flag'
    assert resolve_output_dir(cfg, None) == tmp_path / 'doc'
    assert resolve_output_dir(RunConfig.model_validate(read_json(lawson_doc)), None) == tmp_path / 'env'
    opts = solver_options(cfg, grad_tol=1e-12)
    assert opts.grad_tol == 1e-12
    assert opts.threads == 3
    assert solver_options(cfg).grad_tol == 1e-7


def test_ingest_lawson_angles(lawson_doc):
    ingested = ingest(RunConfig.model_validate(read_json(lawson_doc)))
    c = ingested.data.complex
    assert (c.n_vertices, c.n_edges, c.n_faces, c.genus) == (4, 12, 6, 2)
    assert ingested.to_dict()['v1'] == [0, 1, 2, 3]


@pytest.mark.slow
def test_sphere_bundle(octahedron_doc, tmp_path):
    out = tmp_path / 'sphere'
    assert main(['sphere', str(octahedron_doc), '--output-dir', str(out), '--fold-symmetry']) == 0
    doc = read_json(out / 'sphere.json')
    assert doc['doubled']['k_inf'] == 4
    assert doc['solver']['fold_symmetry'] is True
    assert max(doc['residuals'].values()) < 1e-7
    assert (out / 'half_pattern.svg').is_file()


def test_validate_ideal_octahedron(data_dir, tmp_path):
    out = tmp_path / 'out'
    assert main(['validate', str(data_dir / 'octahedron-ideal.json'), '--output-dir', str(out)]) == 0
    report = read_json(out / 'validation.json')
    assert report['theorem'] == 'bao_bonahon'
    assert report['passed'] is True


@pytest.mark.slow
def test_sphere_bundle_with_ideal_vertices(data_dir, tmp_path):
    out = tmp_path / 'ideal'
    assert main(['sphere', str(data_dir / 'octahedron-ideal.json'), '--output-dir', str(out)]) == 0
    doc = read_json(out / 'sphere.json')
    assert doc['doubled']['k_inf'] == 4
    assert max(doc['residuals'].values()) < 1e-7


@pytest.mark.slow
@pytest.mark.parametrize('name', ['lawson-squares', 'lawson-centers', 'lawson-curve'])
def test_uniformize_bundles(data_dir, tmp_path, name):
    out = tmp_path / name
    assert main(['uniformize', str(data_dir / f"{name}.json"), '--output-dir', str(out)]) == 0
    summary = read_json(out / 'summary.json')
    assert summary['genus'] == 2
    assert summary['max_angle_residual'] < 1e-7
    assert summary['max_cone_residual'] < 1e-7
