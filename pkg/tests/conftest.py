import math

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

BASE_CUBIC = (0j, 1 + 0j, 1 - 1j)
EQUILATERAL = tuple(complex(math.cos(2 * math.pi * k / 3), math.sin(2 * math.pi * k / 3)) for k in range(3))
SCALENE = (
    (0j, 2 + 0j, 0.3 + 1.1j),
    (-1 - 0.2j, 1.5 + 0.1j, 0.2 + 2j),
    (0.1 + 0.1j, 3 + 0.5j, 1 - 1.7j),
)
REAL3 = (-1 + 0j, 0j, 1 + 0j)


@pytest.fixture
def base_cubic():
    return BASE_CUBIC


@pytest.fixture
def equilateral():
    return EQUILATERAL
