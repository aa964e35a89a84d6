from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from signedflow.generators import named

settings.register_profile("desk", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("desk")


@pytest.fixture
def triangle():
    return named("triangle")


@pytest.fixture
def barbell():
    return named("barbell")


@pytest.fixture
def k13():
    return named("k13_loops")
