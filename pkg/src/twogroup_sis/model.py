"""Core SIS model with two dissimilar infective groups in a varying population.

The population splits into susceptibles S and two infective groups I1, I2
with different contact and recovery rates (I2 is typically the small,
highly active group).  Newly infected susceptibles are routed into I1
with probability p and into I2 with probability q = 1 - p.

Three equivalent views of the dynamics are provided:

* absolute counts (S, I1, I2), population size N = S + I1 + I2 varying;
* proportions (s, i1, i2) = (S, I1, I2)/N on the unit simplex;
* the planar reduction (i1, i2) obtained by eliminating s = 1 - i1 - i2,
  living in the triangle {i1 >= 0, i2 >= 0, i1 + i2 <= 1}.

The basic reproduction number is

    R0 = p*lambda1/(b + epsilon + gamma1) + q*lambda2/(b + epsilon + gamma2).

Note that the disease-free death rate d cancels out of the proportions
and planar dynamics; it is kept in :class:`ModelParams` because the
absolute system needs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError, ParameterError

#: accepted deviation of s + i1 + i2 from 1 for proportion states
SIMPLEX_TOL = 1e-9

#: slack allowed on planar coordinates (post-step clamps etc.)
COORD_TOL = 1e-12

PARAM_NAMES = ("b", "b1", "d", "epsilon", "lambda1", "lambda2", "gamma1", "gamma2", "p")


@dataclass(frozen=True)
class ModelParams:
    """The nine model rates plus the routing fraction p.

    b        per capita birth rate of susceptibles
    b1       per capita birth rate of infectives (b1 <= b)
    d        per capita disease-free death rate
    epsilon  excess per capita death rate of infectives
    lambda1  effective per capita contact rate of I1
    lambda2  effective per capita contact rate of I2
    gamma1   per capita recovery rate of I1
    gamma2   per capita recovery rate of I2
    p        fraction of new infections routed into I1

    All rates are 1/time in one consistent (arbitrary) time unit.
    The boundary values p in {0, 1} are accepted; the model then
    degenerates to a single infective class.
    """

    b: float
    b1: float
    d: float
    epsilon: float
    lambda1: float
    lambda2: float
    gamma1: float
    gamma2: float
    p: float

    def __post_init__(self) -> None:
        for name in PARAM_NAMES[:-1]:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            if value <= 0.0:
                raise ParameterError(f"{name} must be > 0, got {value!r}")
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p)):
            raise ParameterError(f"p must be a finite number, got {self.p!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {self.p!r}")
        if self.b1 > self.b:
            raise ParameterError(f"b1 must not exceed b (b1={self.b1!r}, b={self.b!r})")

    @property
    def b2(self) -> float:
        """Birth-rate surplus of susceptibles, b - b1 >= 0."""
        return self.b - self.b1

    @property
    def q(self) -> float:
        """Routing fraction into I2, 1 - p."""
        return 1.0 - self.p

    def to_dict(self) -> dict:
        return {name: float(getattr(self, name)) for name in PARAM_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        """Strict construction: every key required, unknown keys rejected."""
        if not isinstance(data, dict):
            raise ParameterError(f"params must be an object, got {type(data).__name__}")
        unknown = set(data) - set(PARAM_NAMES)
        if unknown:
            raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
        missing = set(PARAM_NAMES) - set(data)
        if missing:
            raise ParameterError(f"missing parameter keys: {sorted(missing)}")
        values = {}
        for name in PARAM_NAMES:
            value = data[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f"{name} must be a number, got {value!r}")
            values[name] = float(value)
        return cls(**values)

    def replace(self, **changes) -> "ModelParams":
        values = self.to_dict()
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class AbsoluteState:
    """Population counts (S, I1, I2); N = S + I1 + I2 must be positive."""

    S: float
    I1: float
    I2: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0.0:
                raise DomainError(f"{f.name} must be finite and >= 0, got {value!r}")
        if self.N <= 0.0:
            raise DomainError("total population must be positive")

    @property
    def N(self) -> float:
        return self.S + self.I1 + self.I2

    def to_proportions(self) -> "ProportionState":
        n = self.N
        return ProportionState(self.S / n, self.I1 / n, self.I2 / n)


@dataclass(frozen=True)
class ProportionState:
    """Fractions (s, i1, i2) with s + i1 + i2 = 1 up to ``SIMPLEX_TOL``."""

    s: float
    i1: float
    i2: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0.0:
                raise DomainError(f"{f.name} must be finite and >= 0, got {value!r}")
        drift = abs(self.s + self.i1 + self.i2 - 1.0)
        if drift > SIMPLEX_TOL:
            raise DomainError(
                f"proportions must sum to 1 within {SIMPLEX_TOL:g} (off by {drift:.3e})")

    def to_planar(self) -> "PlanarState":
        return PlanarState(self.i1, self.i2)


@dataclass(frozen=True)
class PlanarState:
    """Infective fractions (i1, i2) in the triangle i1, i2 >= 0, i1 + i2 <= 1."""

    i1: float
    i2: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0.0:
                raise DomainError(f"{f.name} must be finite and >= 0, got {value!r}")
        if self.i1 + self.i2 > 1.0 + SIMPLEX_TOL:
            raise DomainError(f"i1 + i2 must not exceed 1, got {self.i1 + self.i2!r}")


@dataclass(frozen=True)
class Matrix2:
    """2x2 real matrix with closed-form eigenvalues.

    The eigenvalue pair always satisfies sum == trace and
    product == determinant to relative 1e-12.
    """

    a11: float
    a12: float
    a21: float
    a22: float

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def eigenvalues(self) -> tuple[complex, complex]:
        """Eigenvalues ordered by (real part, imaginary part).

        Uses the numerically stable root pairing: the larger-magnitude
        root comes from the quadratic formula without cancellation, the
        other from the product relation.
        """
        tr = self.trace
        det = self.det
        disc = tr * tr - 4.0 * det
        if disc >= 0.0:
            sd = math.sqrt(disc)
            big = 0.5 * (tr + sd) if tr >= 0.0 else 0.5 * (tr - sd)
            if big == 0.0:
                return (0j, 0j)
            other = det / big
            lo, hi = (big, other) if big <= other else (other, big)
            return (complex(lo), complex(hi))
        half = 0.5 * math.sqrt(-disc)
        return (complex(0.5 * tr, -half), complex(0.5 * tr, half))


def r0(params: ModelParams) -> float:
    """Basic reproduction number of the two-group model."""
    return (params.p * params.lambda1 / (params.b + params.epsilon + params.gamma1)
            + params.q * params.lambda2 / (params.b + params.epsilon + params.gamma2))


def total_population_rate(params: ModelParams, state: AbsoluteState) -> float:
    """N' = (b1 - d) N + b2 S - epsilon (I1 + I2)."""
    return ((params.b1 - params.d) * state.N + params.b2 * state.S
            - params.epsilon * (state.I1 + state.I2))


def vf_absolute(params: ModelParams, state: AbsoluteState) -> tuple[float, float, float]:
    """Right-hand side (S', I1', I2') of the absolute system.

    Incidence is of the proportionate-mixing form lambda_j I_j S / N.
    The component sum always equals :func:`total_population_rate`.
    """
    S, I1, I2 = state.S, state.I1, state.I2
    N = state.N
    incidence = (params.lambda1 * I1 + params.lambda2 * I2) * S / N
    dS = (params.b1 * N + (params.b2 - params.d) * S
          + params.gamma1 * I1 + params.gamma2 * I2 - incidence)
    dI1 = params.p * incidence - (params.d + params.epsilon + params.gamma1) * I1
    dI2 = params.q * incidence - (params.d + params.epsilon + params.gamma2) * I2
    return (dS, dI1, dI2)


def _f_proportions(params: ModelParams, s: float, i1: float, i2: float
                   ) -> tuple[float, float, float]:
    # raw component formulas, usable off the simplex (auxiliary-field
    # restrictions and the invariant-plane identity need that)
    total = i1 + i2
    incidence = s * (params.lambda1 * i1 + params.lambda2 * i2)
    ds = (params.b1 * (1.0 - s) + params.b2 * s * (1.0 - s)
          + params.gamma1 * i1 + params.gamma2 * i2
          + (params.epsilon - params.lambda1) * i1 * s
          + (params.epsilon - params.lambda2) * i2 * s)
    di1 = (params.p * incidence + params.epsilon * i1 * total
           - (params.b1 + params.epsilon + params.gamma1) * i1 - params.b2 * s * i1)
    di2 = (params.q * incidence + params.epsilon * i2 * total
           - (params.b1 + params.epsilon + params.gamma2) * i2 - params.b2 * s * i2)
    return (ds, di1, di2)


def vf_proportions(params: ModelParams, state: ProportionState
                   ) -> tuple[float, float, float]:
    """Right-hand side (s', i1', i2') of the proportions system.

    The death rate d cancels in this system.  At the disease-free corner
    (1, 0, 0) the field vanishes identically.
    """
    return _f_proportions(params, state.s, state.i1, state.i2)


def vf_planar(params: ModelParams, state: PlanarState) -> tuple[float, float]:
    """Right-hand side (i1', i2') of the planar reduction.

    Identical (exactly, in real arithmetic) to components 2 and 3 of
    :func:`vf_proportions` evaluated at (1 - i1 - i2, i1, i2).
    """
    i1, i2 = state.i1, state.i2
    p, q = params.p, params.q
    l1, l2 = params.lambda1, params.lambda2
    loss1 = params.b + params.epsilon + params.gamma1
    loss2 = params.b + params.epsilon + params.gamma2
    be = params.b2 + params.epsilon
    total = i1 + i2
    di1 = (p * l1 - loss1) * i1 + p * l2 * i2 + total * ((be - p * l1) * i1 - p * l2 * i2)
    di2 = q * l1 * i1 + (q * l2 - loss2) * i2 + total * ((be - q * l2) * i2 - q * l1 * i1)
    return (di1, di2)


def planar_field_arrays(params: ModelParams, i1: np.ndarray, i2: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`vf_planar` over numpy arrays (grid scans, plots)."""
    p, q = params.p, params.q
    l1, l2 = params.lambda1, params.lambda2
    loss1 = params.b + params.epsilon + params.gamma1
    loss2 = params.b + params.epsilon + params.gamma2
    be = params.b2 + params.epsilon
    total = i1 + i2
    di1 = (p * l1 - loss1) * i1 + p * l2 * i2 + total * ((be - p * l1) * i1 - p * l2 * i2)
    di2 = q * l1 * i1 + (q * l2 - loss2) * i2 + total * ((be - q * l2) * i2 - q * l1 * i1)
    return (di1, di2)


def jacobian_planar(params: ModelParams, state: PlanarState) -> Matrix2:
    """Analytic Jacobian of the planar field at (i1, i2)."""
    i1, i2 = state.i1, state.i2
    p, q = params.p, params.q
    l1, l2 = params.lambda1, params.lambda2
    a1 = p * l1 - (params.b + params.epsilon + params.gamma1)
    a2 = q * l2 - (params.b + params.epsilon + params.gamma2)
    be = params.b2 + params.epsilon
    c1 = be - p * l1
    c2 = be - q * l2
    e1 = p * l2
    e2 = q * l1
    return Matrix2(
        a11=a1 + 2.0 * c1 * i1 + (c1 - e1) * i2,
        a12=e1 + (c1 - e1) * i1 - 2.0 * e1 * i2,
        a21=e2 + (c2 - e2) * i2 - 2.0 * e2 * i1,
        a22=a2 + 2.0 * c2 * i2 + (c2 - e2) * i1,
    )


def planar_to_simplex(state: PlanarState) -> ProportionState:
    """Lift (i1, i2) back to the simplex as (1 - i1 - i2, i1, i2)."""
    s = 1.0 - state.i1 - state.i2
    if s < -SIMPLEX_TOL:
        raise DomainError(f"i1 + i2 exceeds 1 by {-s:.3e}")
    return ProportionState(max(s, 0.0), state.i1, state.i2)


def simplex_to_planar(state: ProportionState) -> PlanarState:
    """Project a simplex state onto the planar coordinates (drop s)."""
    return PlanarState(state.i1, state.i2)
