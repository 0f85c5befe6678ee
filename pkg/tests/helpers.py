"""Shared samplers and oracle utilities for the test suite."""

from __future__ import annotations

import math

import numpy as np

from twogroup_sis import ModelParams, r0

RATE_LO = 0.01
RATE_HI = 10.0


def sample_params(rng: np.random.Generator, p_lo: float = 0.05, p_hi: float = 0.95
                  ) -> ModelParams:
    """Rates log-uniform in [0.01, 10] with b1 <= b (rejection), p uniform."""
    while True:
        rates = np.exp(rng.uniform(math.log(RATE_LO), math.log(RATE_HI), size=8))
        b, b1, d, eps, l1, l2, g1, g2 = rates
        if b1 <= b:
            break
    return ModelParams(b=b, b1=b1, d=d, epsilon=eps, lambda1=l1, lambda2=l2,
                       gamma1=g1, gamma2=g2, p=float(rng.uniform(p_lo, p_hi)))


def sample_params_r0(rng: np.random.Generator, above: bool, margin: float = 0.05
                     ) -> ModelParams:
    """Random valid parameters conditioned on R0 > 1+margin or R0 < 1-margin."""
    while True:
        params = sample_params(rng)
        value = r0(params)
        if above and value > 1.0 + margin:
            return params
        if not above and value < 1.0 - margin:
            return params


def sample_params_bounded_growth(rng: np.random.Generator, horizon: float,
                                 max_log: float = 600.0) -> ModelParams:
    """Random parameters whose absolute populations stay in double range.

    N'/N lies in [b1-d-eps, b-d]; reject sets whose extreme exponential
    growth or decay would overflow/underflow doubles within the horizon.
    """
    while True:
        params = sample_params(rng)
        worst = max(params.b - params.d, params.d + params.epsilon - params.b1)
        if worst * horizon <= max_log:
            return params


def interior_start(rng: np.random.Generator, margin: float = 1e-3
                   ) -> tuple[float, float]:
    i1 = float(rng.uniform(margin, 1.0 - 2.0 * margin))
    i2 = float(rng.uniform(margin, 1.0 - margin - i1))
    return i1, i2


def interior_simplex(rng: np.random.Generator, n: int, margin: float = 0.0
                     ) -> np.ndarray:
    pts = rng.dirichlet((1.0, 1.0, 1.0), size=n)
    if margin:
        pts = margin + (1.0 - 3.0 * margin) * pts
    return pts


def rel_gap(a: float, b: float, floor: float = 1.0) -> float:
    return abs(a - b) / max(floor, abs(a), abs(b))


def r0_one_lambda1(params: ModelParams) -> float:
    """The lambda1 that places the parameter set exactly on R0 = 1."""
    tail = params.q * params.lambda2 / (params.b + params.epsilon + params.gamma2)
    return (1.0 - tail) * (params.b + params.epsilon + params.gamma1) / params.p
