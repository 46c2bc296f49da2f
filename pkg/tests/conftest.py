import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("suite")


@pytest.fixture()
def rng():
    return np.random.default_rng(0xC0FFEE)


@pytest.fixture()
def small_image(rng):
    # smallest stock geometry that can carry the default 32x768 frame
    return rng.random((3, 96, 96))


@pytest.fixture()
def tiny_codec():
    from semlink import ToyProjectionCodec

    return ToyProjectionCodec(n_queries=4, dim=8, seed=3, text_dim=6, image_shape=(3, 4, 4))
