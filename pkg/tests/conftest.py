import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from okubo_connect.instances import DEFAULT_SHAPE, euler_instance, gauss_spec, random_instance
from okubo_connect.model import build_frame

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def gauss():
    spec = gauss_spec(0.3, 0.45, 0.7)
    return spec, build_frame(spec)


@pytest.fixture(scope="session")
def generic2():
    spec = random_instance(1, DEFAULT_SHAPE)
    return spec, build_frame(spec)


@pytest.fixture(scope="session")
def designed():
    spec = euler_instance()
    return spec, build_frame(spec)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))
