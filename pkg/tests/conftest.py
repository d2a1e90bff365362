from fractions import Fraction

import pytest
from hypothesis import settings

from rmmcopula.copula import RmmCopula
from rmmcopula.presets import CATALOG

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

PRESET_KEYS = tuple(CATALOG)
NON_PI_KEYS = tuple(k for k in PRESET_KEYS if k != "pi")


@pytest.fixture(params=PRESET_KEYS)
def preset_key(request):
    return request.param


@pytest.fixture
def preset_copula(preset_key):
    return RmmCopula.from_preset(preset_key)


def frac(s):
    return Fraction(s)
