import pytest

from utils.env_config import EnvConfig, get_output_dir, get_threads


def test_defaults():
    assert EnvConfig.get_threads() == 1
    assert EnvConfig.get_output_dir() == './out'
    assert EnvConfig.get_log_level() == 'INFO'
    assert EnvConfig.get_validator_cap() == 18


def test_values_from_environment(monkeypatch):
    monkeypatch.setenv('HYPERCIRCLE_THREADS', ' 4 ')
    monkeypatch.setenv('HYPERCIRCLE_OUTPUT_DIR', '/tmp/runs')
    monkeypatch.setenv('HYPERCIRCLE_LOG_LEVEL', 'debug')
    monkeypatch.setenv('HYPERCIRCLE_VALIDATOR_CAP', '22')
    assert get_threads() == 4
    assert get_output_dir() == '/tmp/runs'
    assert EnvConfig.get_log_level() == 'DEBUG'
    assert EnvConfig.get_validator_cap() == 22


def test_blank_values_fall_back(monkeypatch):
    monkeypatch.setenv('HYPERCIRCLE_OUTPUT_DIR', '   ')
    assert EnvConfig.get_output_dir() == './out'


@pytest.mark.parametrize('key, value', [
    ('HYPERCIRCLE_THREADS', 'many'),
    ('HYPERCIRCLE_THREADS', '0'),
    ('HYPERCIRCLE_VALIDATOR_CAP', '-3'),
    ('HYPERCIRCLE_LOG_LEVEL', 'loud'),
])
def test_invalid_values(monkeypatch, key, value):
    monkeypatch.setenv(key, value)
    getter = {
        'HYPERCIRCLE_THREADS': EnvConfig.get_threads,
        'HYPERCIRCLE_VALIDATOR_CAP': EnvConfig.get_validator_cap,
        'HYPERCIRCLE_LOG_LEVEL': EnvConfig.get_log_level,
    }[key]
    with pytest.raises(ValueError):
        getter()
