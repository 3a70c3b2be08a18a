# tests/conftest.py
import json

import numpy as np
import pytest

from core.bench.run_events import RunEventManager
from core.bench.synthetic_objective import SyntheticObjective
from core.space.parameter_space import Dimension, ParameterSpace


@pytest.fixture
def small_space() -> ParameterSpace:
    """Depth 0..2: one global dimension plus one dimension per layer."""
    return ParameterSpace(
        max_depth=2,
        dims=(
            Dimension("g", 0.0, 1.0, layer=0),
            Dimension("a1", -1.0, 1.0, layer=1),
            Dimension("a2", 0.0, 10.0, layer=2),
        ),
    )


@pytest.fixture
def small_space_dict(small_space) -> dict:
    return small_space.to_dict()


@pytest.fixture
def flat_space() -> ParameterSpace:
    """A single always-relevant dimension on [0, 1]."""
    return ParameterSpace(max_depth=0, dims=(Dimension("x", 0.0, 1.0, layer=0),))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def objective() -> SyntheticObjective:
    return SyntheticObjective.from_json()


@pytest.fixture(autouse=True)
def fresh_event_manager():
    RunEventManager.reset()
    yield
    RunEventManager.reset()


@pytest.fixture
def write_json(tmp_path):
    def _write(name: str, data: dict) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write
