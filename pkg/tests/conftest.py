import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

POINT_TABLE = HERE / "fixtures" / "point_derivations.json"


@pytest.fixture(scope="session")
def point_table():
    from painleve_equiv import load_derivations

    return load_derivations(POINT_TABLE)
