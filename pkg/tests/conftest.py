import numpy as np
import pytest

from bridgesampler import (
    BrownianBridgeSchedule,
    GaussianConditionalModel,
    GaussianMixtureConditionalModel,
    VariancePreservingSchedule,
)


@pytest.fixture
def bb():
    return BrownianBridgeSchedule(T=1.0, sigma=1.0)


@pytest.fixture
def vp():
    return VariancePreservingSchedule(T=1.0, beta_min=0.1, beta_max=20.0)


@pytest.fixture
def vp_const():
    # Constant beta = 2 has simple analytic values to pin against.
    return VariancePreservingSchedule(T=1.0, beta_min=2.0, beta_max=2.0)


@pytest.fixture
def gauss1():
    # 1-dim standard conditional prior: the worked-instance model.
    return GaussianConditionalModel.isotropic(1, var=1.0)


@pytest.fixture
def gauss2():
    # The default experiment model: prior mean 0.25 y + 0.5, variance 1.5.
    return GaussianConditionalModel.isotropic(2, mean_scale=0.25, mean_offset=0.5, var=1.5)


@pytest.fixture
def mixture1():
    return GaussianMixtureConditionalModel(
        weights=np.array([0.3, 0.7]),
        offsets=np.array([[-1.0], [2.0]]),
        var=np.array([0.5]),
        mean_scale=0.1,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
