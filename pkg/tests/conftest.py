from __future__ import annotations

import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from openbook_forge import load_fixture  # noqa: E402
from openbook_forge.generate import random_diagram  # noqa: E402

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FUZZ_SEED = 20240607


@pytest.fixture(scope="session")
def unknot():
    return load_fixture("unknot")


@pytest.fixture(scope="session")
def hopf():
    return load_fixture("hopf")


@pytest.fixture(scope="session")
def loose():
    return load_fixture("loose")


@pytest.fixture(scope="session")
def fixtures3(unknot, hopf, loose):
    return {"unknot": unknot, "hopf": hopf, "loose": loose}


@pytest.fixture(scope="session")
def fuzz_diagrams():
    rng = random.Random(FUZZ_SEED)
    return [random_diagram(rng) for _ in range(60)]


@st.composite
def diagrams(draw, max_cells: int = 10, components=None):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_diagram(random.Random(seed), max_cells=max_cells, components=components)
