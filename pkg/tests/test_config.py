import pytest

from mbhf.config import EngineConfig
from mbhf.config.constants import DEFAULT_MAXN_DOUBLE, DEFAULT_QUAD_H_HIGH, DEFAULT_QUAD_T_LOW

ENV_KEYS = [
    "MBHF_THREADS", "MBHF_DETERMINISTIC", "MBHF_EQUALITY_SAMPLES", "MBHF_SEED", "MBHF_QUAD_T", "MBHF_QUAD_H",
    "MBHF_QUAD_DELTA", "MBHF_SERIES_TOL", "MBHF_MAP_DEPTH", "MBHF_OUTPUT_DIR", "MBHF_LOG_LEVEL",
]


@pytest.fixture
def clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    return monkeypatch


def test_defaults_from_empty_environment(clean_env):
    config = EngineConfig.from_env()
    assert config.threads is None
    assert config.deterministic
    assert config.quad_T_low == DEFAULT_QUAD_T_LOW
    assert config.output_dir == "mbhf_output"
    assert config.worker_count() >= 1


def test_environment_overrides(clean_env):
    clean_env.setenv("MBHF_THREADS", "3")
    clean_env.setenv("MBHF_DETERMINISTIC", "false")
    clean_env.setenv("MBHF_QUAD_T", "20")
    clean_env.setenv("MBHF_MAP_DEPTH", "2")
    clean_env.setenv("MBHF_LOG_LEVEL", "DEBUG")
    config = EngineConfig.from_env()
    assert config.worker_count() == 3
    assert not config.deterministic
    assert config.quad_defaults(3) == (20.0, DEFAULT_QUAD_H_HIGH)
    assert config.quad_defaults(1)[0] == 20.0
    assert config.map_depth == 2
    assert config.log_level == "DEBUG"


def test_series_shell_caps():
    config = EngineConfig(series_maxN_single=50)
    assert config.series_max_shells(1) == 50
    assert config.series_max_shells(2) == DEFAULT_MAXN_DOUBLE
    assert config.series_max_shells(3) == config.series_maxN_triple


def test_quad_step_adapts_only_at_the_default():
    assert EngineConfig().quad_step(2) is None
    assert EngineConfig(quad_h_high=0.1).quad_step(3) == 0.1
    assert EngineConfig(quad_h_high=0.1).quad_step(1) is None
