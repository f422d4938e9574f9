import pytest

from cokernel_toolkit import AsyncCokernelToolkit, CokernelToolkit

CONFIG_VARIABLES = (
    'PRECISION_K', 'INTERVAL_WIDTH_BITS', 'BRUTEFORCE_BOUND', 'HL_MAX_VARS', 'REFINEMENT_DEPTH', 'LOG_LEVEL',
)


@pytest.fixture
def clean_env(monkeypatch):
    for name in CONFIG_VARIABLES:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


@pytest.fixture
def toolkit(clean_env):
    return CokernelToolkit()


@pytest.fixture
def async_toolkit(clean_env):
    return AsyncCokernelToolkit(jobs=2)
