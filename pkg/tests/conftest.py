import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def grid8():
    from regionlab import synth, weights

    geoms = synth.grid_geometries(8, 8)
    return geoms, weights.knn_weights(synth.centroids_of(geoms), 5, ids=[g.id for g in geoms])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
