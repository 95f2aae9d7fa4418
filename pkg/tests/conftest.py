import numpy as np
import pytest

from dios_fpj.config import default_config
from dios_fpj.scene import build_scene
from dios_fpj.sweep import scene_seed

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def defaults():
    return default_config()


@pytest.fixture(scope="session")
def default_scene(defaults):
    return build_scene(defaults, scene_seed(0))


@pytest.fixture(scope="session")
def small_config(defaults):
    """Cheap geometry-preserving config for engine tests."""
    return defaults.replace(
        arrays={"n_a": 8, "n_d": 64},
        geometry={"k_refractive": 2, "k_reflective": 2},
        schedule={"n_blocks": 40, "slots": 3},
    )


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
