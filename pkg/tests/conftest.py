import numpy as np
import pytest

from ptzgs import presets, runner
from ptzgs.graph import ring_graph
from ptzgs.objective import ModelSet

from support import SEC4_XSTAR, sec4_objectives


@pytest.fixture(scope="session")
def sec4_models():
    return sec4_objectives()


@pytest.fixture(scope="session")
def sec4_modelset(sec4_models):
    return ModelSet(sec4_models)


@pytest.fixture(scope="session")
def ring6():
    return ring_graph(6)


@pytest.fixture(scope="session")
def sec4_xstar():
    return SEC4_XSTAR.copy()


@pytest.fixture(scope="session")
def ss_result():
    """Full single-stage benchmark run, shared by diagnostics and acceptance tests."""
    return runner.run(presets.preset_config(presets.PAPER_SEC4, "ss"))


@pytest.fixture(scope="session")
def ms_result():
    """Full two-stage benchmark run, shared by diagnostics and acceptance tests."""
    return runner.run(presets.preset_config(presets.PAPER_SEC4, "ms"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
