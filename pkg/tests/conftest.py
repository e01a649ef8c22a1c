import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from toricroots import ToricDatum

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def int_vectors(n, bound=5):
    return st.lists(st.integers(-bound, bound), min_size=n, max_size=n).map(tuple)


def square_matrices(n, bound=5):
    return st.lists(int_vectors(n, bound), min_size=n, max_size=n).map(tuple)


@pytest.fixture
def affine_plane():
    return ToricDatum.from_rays([(1, 0), (0, 1)], 2)


@pytest.fixture
def affine_space3():
    return ToricDatum.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)


@pytest.fixture
def a1_cone():
    # sigma = Cone((0,1),(2,-1)), sigma_dual = Cone((1,0),(1,2))
    return ToricDatum.from_rays([(0, 1), (2, -1)], 2)
