"""Shared fixtures for the MB engine tests."""

import pytest

from mbhf.config import EngineConfig
from mbhf.notation import default_seeds
from mbhf.series import default_registry
from mbhf.storage import FileManager

# generic values keeping clear of integer-difference degeneracies
GENERIC = {'a': 0.31, "a'": 0.29, 'b': 0.43, "b'": 0.57, 'c': 2.11, "c'": 1.73, 'd': 2.61}


@pytest.fixture
def generic_params():
    return dict(GENERIC)


@pytest.fixture(scope="session")
def seeds():
    return default_seeds()


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture
def config():
    """Single-threaded configuration with the shipped defaults."""
    return EngineConfig(threads=1)


@pytest.fixture
def file_manager(tmp_path):
    return FileManager(str(tmp_path / "out"))
