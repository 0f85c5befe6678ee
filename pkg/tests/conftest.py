import numpy as np
import pytest

from twogroup_sis import IntegratorConfig, ModelParams

# PSET-A: supercritical reference set (R0 = 1.525)
PSET_A = dict(b=0.5, b1=0.3, d=0.1, epsilon=0.2, lambda1=1.0, lambda2=5.0,
              gamma1=0.3, gamma2=0.1, p=0.9)
# PSET-B: subcritical, same demography (R0 = 0.75)
PSET_B = dict(b=0.5, b1=0.3, d=0.1, epsilon=0.2, lambda1=0.5, lambda2=0.8,
              gamma1=0.3, gamma2=0.1, p=0.5)


@pytest.fixture
def pset_a() -> ModelParams:
    return ModelParams(**PSET_A)


@pytest.fixture
def pset_b() -> ModelParams:
    return ModelParams(**PSET_B)


@pytest.fixture
def config() -> IntegratorConfig:
    return IntegratorConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
