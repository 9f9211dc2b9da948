import json
import math
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from hypercircle.cellcomplex import subtriangulate
from hypercircle.energy import AngleData, TargetData
from hypercircle.examples import lawson_net, octahedron_complex
from hypercircle.hypkernel import psi
from hypercircle.optimizer import SolveOptions, minimize

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / 'data'


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def octahedron():
    return octahedron_complex()


@pytest.fixture
def octahedron_tri(octahedron):
    return subtriangulate(octahedron)


@pytest.fixture
def lawson():
    return lawson_net()


@pytest.fixture
def lawson_tri(lawson):
    return subtriangulate(lawson)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ('HYPERCIRCLE_THREADS', 'HYPERCIRCLE_OUTPUT_DIR', 'HYPERCIRCLE_LOG_LEVEL',
                'HYPERCIRCLE_VALIDATOR_CAP'):
        monkeypatch.delenv(key, raising=False)


def write_json(path: Path, doc) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc), encoding='utf-8')
    return path


def read_json(path: Path):
    return json.loads(Path(path).read_text(encoding='utf-8'))


HALF_PI = math.pi / 2.0


@pytest.fixture(scope='session')
def lawson_solution():
    """Lawson squares with right-angle intersections and Theta = 2 pi, solved once."""
    c = lawson_net()
    tri = subtriangulate(c)
    data = AngleData(c, np.full(c.n_edges, HALF_PI), np.full(c.n_vertices, 2.0 * math.pi))
    target = TargetData.from_angle_data(data, tri)
    result = minimize(tri, target, SolveOptions(grad_tol=1e-10, max_iter=500))
    return SimpleNamespace(data=data, tri=tri, target=target, result=result, metric=psi(result.x_star, tri))
