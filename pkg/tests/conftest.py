import math
import os

import pytest

from motherbody.conformal import solve_map
from motherbody.config import reset_settings
from motherbody.measures import build_measures
from motherbody.model import ModelParams
from motherbody.spectral import build_curve

# t* = 0.1911... for a = 2, c = 1
PHASE_ONE_POINTS = [
    (2.0, 1.0, 0.1),
    (2.0, 1.0, 0.15),
    (math.sqrt(2.0), 1.0, 0.05),
    (3.0, 2.0, 0.3),
]


@pytest.fixture(scope='session')
def params():
    return ModelParams(a=2.0, c=1.0, t=0.1)


@pytest.fixture(scope='session')
def cd(params):
    return solve_map(params)


@pytest.fixture(scope='session')
def ms(cd):
    return build_measures(cd)


@pytest.fixture(scope='session')
def curve(cd):
    return build_curve(cd)


@pytest.fixture
def clean_env(monkeypatch):
    """Drop MOTHERBODY_* variables and rebuild settings around the test"""
    for key in list(os.environ):
        if key.startswith('MOTHERBODY_'):
            monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield monkeypatch
    reset_settings()
