"""Rest points of the planar system and their linearized classification.

The planar field has at most two rest points in the feasible triangle:
the disease-free origin (always) and, when R0 > 1, a unique interior
endemic state.  The interior point is found in closed form: eliminating
the common factor between the two equilibrium conditions leaves a
homogeneous quadratic whose nonnegative root line i2 = m*i1 carries all
rest points, and substituting that line into the first equation reduces
it to alpha*i1 + beta*i1^2 = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalError, ParameterError
from .model import (
    Matrix2,
    ModelParams,
    PlanarState,
    jacobian_planar,
    planar_field_arrays,
    r0,
    vf_planar,
)

#: eigenvalue real parts within this relative distance of zero (scaled by
#: the spectral radius) are treated as zero when classifying
HYPERBOLICITY_RTOL = 1e-8

#: every reported rest point must satisfy |field| <= this
RESIDUAL_TOL = 1e-10


class StabilityClass(str, enum.Enum):
    SINK = "Sink"
    SADDLE = "Saddle"
    SOURCE = "Source"
    NON_HYPERBOLIC = "NonHyperbolic"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class RestPoint:
    """An equilibrium of the planar system with its linearization."""

    location: PlanarState
    jacobian: Matrix2
    eigenvalues: tuple[complex, complex]
    stability: StabilityClass
    residual: float

    @property
    def is_origin(self) -> bool:
        return self.location.i1 == 0.0 and self.location.i2 == 0.0

    def to_dict(self) -> dict:
        i1, i2 = self.location.i1, self.location.i2
        return {
            "i1": i1,
            "i2": i2,
            "s": 1.0 - i1 - i2,
            "eigenvalues": [{"re": e.real, "im": e.imag} for e in self.eigenvalues],
            "class": self.stability.value,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class QuadraticForm:
    """Homogeneous form a*i1^2 + b*i1*i2 + c*i2^2 from the rest-point elimination.

    For p, q in (0, 1): a = q*lambda1*(b1+gamma1) > 0 and
    c = -p*lambda2*(b1+gamma2) < 0, so the zero set is two lines through
    the origin with slopes of opposite sign.
    """

    a: float
    b: float
    c: float

    def __call__(self, i1: float, i2: float) -> float:
        return self.a * i1 * i1 + self.b * i1 * i2 + self.c * i2 * i2


def classify_eigenvalues(eigenvalues: tuple[complex, complex],
                         rtol: float = HYPERBOLICITY_RTOL) -> StabilityClass:
    """Stability class from eigenvalue real-part signs.

    A real part within rtol * (spectral radius) of zero makes the point
    non-hyperbolic; this keeps classification deterministic at the
    threshold R0 = 1, where the origin is genuinely degenerate.
    """
    scale = max(abs(eigenvalues[0]), abs(eigenvalues[1]))
    if scale == 0.0:
        return StabilityClass.NON_HYPERBOLIC
    tol = rtol * scale
    re = (eigenvalues[0].real, eigenvalues[1].real)
    if any(abs(x) <= tol for x in re):
        return StabilityClass.NON_HYPERBOLIC
    if all(x < 0.0 for x in re):
        return StabilityClass.SINK
    if all(x > 0.0 for x in re):
        return StabilityClass.SOURCE
    return StabilityClass.SADDLE


def origin_matrix(params: ModelParams) -> Matrix2:
    """Linearization of the planar field at the disease-free origin.

    Its determinant factors as
    (b+eps+gamma1)(b+eps+gamma2)(1 - R0), so sign(det) = sign(1 - R0);
    the determinant is computed from the entries, never from an expansion.
    """
    loss1 = params.b + params.epsilon + params.gamma1
    loss2 = params.b + params.epsilon + params.gamma2
    return Matrix2(
        a11=params.p * params.lambda1 - loss1,
        a12=params.p * params.lambda2,
        a21=params.q * params.lambda1,
        a22=params.q * params.lambda2 - loss2,
    )


def classify_origin(params: ModelParams) -> StabilityClass:
    """Classify the origin: Sink for R0 < 1, Saddle for R0 > 1.

    Classified from the eigenvalues, then cross-checked against the
    threshold rule; a strict disagreement raises InternalError because
    the two derivations are equivalent.
    """
    cls = classify_eigenvalues(origin_matrix(params).eigenvalues())
    threshold = r0(params)
    if cls is StabilityClass.SOURCE:
        raise InternalError("origin classified as a source; trace must be negative")
    if cls is StabilityClass.SINK and threshold > 1.0 + HYPERBOLICITY_RTOL:
        raise InternalError(f"origin eigenvalues say sink but R0 = {threshold!r} > 1")
    if cls is StabilityClass.SADDLE and threshold < 1.0 - HYPERBOLICITY_RTOL:
        raise InternalError(f"origin eigenvalues say saddle but R0 = {threshold!r} < 1")
    return cls


def _line_coefficients(params: ModelParams):
    # linear/quadratic coefficients of the planar field:
    #   i1' = a1*i1 + e1*i2 + (i1+i2)(c1*i1 - e1*i2)
    #   i2' = e2*i1 + a2*i2 + (i1+i2)(c2*i2 - e2*i1)
    p, q = params.p, params.q
    l1, l2 = params.lambda1, params.lambda2
    be = params.b2 + params.epsilon
    a1 = p * l1 - (params.b + params.epsilon + params.gamma1)
    a2 = q * l2 - (params.b + params.epsilon + params.gamma2)
    return a1, a2, be - p * l1, be - q * l2, p * l2, q * l1


def _elimination_value(params: ModelParams, i1: float, i2: float) -> float:
    # difference of the two products obtained by eliminating (i1 + i2)
    # between the equilibrium conditions; vanishes on the rest-point rays
    a1, a2, c1, c2, e1, e2 = _line_coefficients(params)
    return ((a1 * i1 + e1 * i2) * (c2 * i2 - e2 * i1)
            - (e2 * i1 + a2 * i2) * (c1 * i1 - e1 * i2))


def equilibrium_quadratic(params: ModelParams) -> QuadraticForm:
    """Quadratic form whose zero lines carry every rest point.

    The outer coefficients have closed forms; the cross coefficient is
    recovered by evaluation, b = Q(1,1) - Q(1,0) - Q(0,1), which is exact
    to round-off for a homogeneous quadratic.
    """
    a = params.q * params.lambda1 * (params.b1 + params.gamma1)
    c = -params.p * params.lambda2 * (params.b1 + params.gamma2)
    b = (_elimination_value(params, 1.0, 1.0)
         - _elimination_value(params, 1.0, 0.0)
         - _elimination_value(params, 0.0, 1.0))
    return QuadraticForm(a=a, b=b, c=c)


def equilibrium_ray(params: ModelParams) -> float:
    """Slope m >= 0 of the line i2 = m*i1 containing all rest points.

    Along i2 = m*i1 the quadratic form reduces to c*m^2 + b*m + a = 0;
    since a > 0 and c < 0 the two roots have opposite signs and exactly
    one is nonnegative.  Requires p, q in (0, 1) (otherwise the form
    degenerates and the rest points sit on a coordinate axis).
    """
    if not 0.0 < params.p < 1.0:
        raise ParameterError("equilibrium ray requires 0 < p < 1")
    form = equilibrium_quadratic(params)
    a, b, c = form.a, form.b, form.c
    disc = b * b - 4.0 * a * c
    if disc <= 0.0 or a <= 0.0 or c >= 0.0:
        raise InternalError(
            f"rest-point quadratic lost its sign structure (a={a!r}, b={b!r}, c={c!r})")
    sd = math.sqrt(disc)
    # stable pairing: r1 from the non-cancelling branch, r2 via Vieta
    w = -0.5 * (b + math.copysign(sd, b)) if b != 0.0 else 0.5 * sd
    r1 = w / c
    r2 = a / w
    m = r1 if r1 >= 0.0 else r2
    if m < 0.0:
        raise InternalError("no nonnegative root for the rest-point ray")
    return m


def _make_rest_point(params: ModelParams, i1: float, i2: float) -> RestPoint:
    location = PlanarState(i1, i2)
    jac = jacobian_planar(params, location)
    eig = jac.eigenvalues()
    f1, f2 = vf_planar(params, location)
    return RestPoint(
        location=location,
        jacobian=jac,
        eigenvalues=eig,
        stability=classify_eigenvalues(eig),
        residual=math.hypot(f1, f2),
    )


def _axis_equilibrium(params: ModelParams) -> RestPoint:
    # p in {0, 1}: one group is empty and the endemic state sits on the
    # corresponding axis, solving the single-group reduction
    # a*i + c*i^2 = 0 directly.
    a1, a2, c1, c2, _, _ = _line_coefficients(params)
    a, c = (a1, c1) if params.p == 1.0 else (a2, c2)
    if c == 0.0:
        raise InternalError("degenerate single-group reduction (zero quadratic term)")
    i_star = -a / c
    if not 0.0 < i_star < 1.0:
        raise InternalError(f"single-group endemic level {i_star!r} not in (0, 1)")
    if params.p == 1.0:
        return _make_rest_point(params, i_star, 0.0)
    return _make_rest_point(params, 0.0, i_star)


def endemic_equilibrium(params: ModelParams) -> RestPoint | None:
    """The unique endemic rest point, or None when R0 <= 1.

    For R0 > 1 the point is guaranteed to lie strictly inside the
    triangle with a negative Jacobian trace and sink classification;
    violations raise InternalError.
    """
    threshold = r0(params)
    if threshold <= 1.0 + HYPERBOLICITY_RTOL:
        return None

    if params.p in (0.0, 1.0):
        point = _axis_equilibrium(params)
    else:
        m = equilibrium_ray(params)
        a1, _, c1, _, e1, _ = _line_coefficients(params)
        alpha = a1 + e1 * m
        beta = (1.0 + m) * (c1 - e1 * m)
        if beta == 0.0:
            raise InternalError("degenerate ray substitution (beta = 0)")
        i1_star = -alpha / beta
        i2_star = m * i1_star
        if not (i1_star > 0.0 and i2_star > 0.0 and i1_star + i2_star < 1.0):
            raise InternalError(
                f"computed endemic state ({i1_star!r}, {i2_star!r}) not interior")
        point = _make_rest_point(params, i1_star, i2_star)

    if point.residual > RESIDUAL_TOL:
        raise InternalError(f"endemic residual {point.residual:.3e} above tolerance")
    if point.jacobian.trace >= 0.0:
        raise InternalError("endemic Jacobian trace must be negative")
    if point.stability is not StabilityClass.SINK:
        raise InternalError(f"endemic point classified {point.stability}, expected Sink")
    return point


def _scan_for_extra_rest_points(params: ModelParams, known: list[RestPoint],
                                scan_n: int) -> None:
    # brute-force certificate: sign-change scan of the two zero curves over
    # the triangle, Newton-polish of every candidate cell, and a check that
    # nothing converges to an interior point away from the known list
    grid = np.linspace(0.0, 1.0, scan_n + 1)
    g1, g2 = np.meshgrid(grid, grid, indexing="ij")
    f1, f2 = planar_field_arrays(params, g1, g2)

    def straddles(f):
        corners = np.stack([f[:-1, :-1], f[1:, :-1], f[:-1, 1:], f[1:, 1:]])
        return (corners.min(axis=0) <= 0.0) & (corners.max(axis=0) >= 0.0)

    inside = (g1[:-1, :-1] + g2[:-1, :-1]) <= 1.0
    candidates = np.argwhere(straddles(f1) & straddles(f2) & inside)
    h = 1.0 / scan_n
    known_xy = [(rp.location.i1, rp.location.i2) for rp in known]

    coeffs = _line_coefficients(params)
    for j, k in candidates:
        x = (j + 0.5) * h
        y = (k + 0.5) * h
        if any(math.hypot(x - kx, y - ky) < 2.0 * h for kx, ky in known_xy):
            continue
        # Newton refinement from the cell center; iterates may leave the
        # triangle, so use the unvalidated closed forms
        converged = False
        for _ in range(50):
            v1, v2 = _field_raw(coeffs, x, y)
            if math.hypot(v1, v2) < 1e-13:
                converged = True
                break
            j11, j12, j21, j22 = _jacobian_raw(coeffs, x, y)
            det = j11 * j22 - j12 * j21
            if det == 0.0:
                break
            x -= (j22 * v1 - j12 * v2) / det
            y -= (j11 * v2 - j21 * v1) / det
            if not (math.isfinite(x) and math.isfinite(y)):
                break
            if not (-0.5 < x < 1.5 and -0.5 < y < 1.5):
                break
        if not converged:
            continue
        interior = x > 1e-9 and y > 1e-9 and x + y < 1.0 - 1e-9
        novel = all(math.hypot(x - kx, y - ky) > 1e-6 for kx, ky in known_xy)
        if interior and novel:
            raise InternalError(
                f"grid scan found an unreported interior rest point near ({x!r}, {y!r})")


def _field_raw(coeffs, i1: float, i2: float) -> tuple[float, float]:
    a1, a2, c1, c2, e1, e2 = coeffs
    total = i1 + i2
    return (a1 * i1 + e1 * i2 + total * (c1 * i1 - e1 * i2),
            e2 * i1 + a2 * i2 + total * (c2 * i2 - e2 * i1))


def _jacobian_raw(coeffs, i1: float, i2: float) -> tuple[float, float, float, float]:
    a1, a2, c1, c2, e1, e2 = coeffs
    return (a1 + 2.0 * c1 * i1 + (c1 - e1) * i2,
            e1 + (c1 - e1) * i1 - 2.0 * e1 * i2,
            e2 + (c2 - e2) * i2 - 2.0 * e2 * i1,
            a2 + 2.0 * c2 * i2 + (c2 - e2) * i1)


def all_rest_points(params: ModelParams, scan_n: int = 200) -> list[RestPoint]:
    """Every rest point in the triangle: origin first, endemic second.

    Always re-certifies uniqueness with a ``scan_n`` x ``scan_n``
    sign-change scan of the two zero curves; an unreported interior
    intersection raises InternalError.  Set ``scan_n=0`` to skip the scan
    (inner loops that need only the known points).
    """
    origin = _make_rest_point(params, 0.0, 0.0)
    # the origin residual is exactly zero; its class comes with the
    # threshold cross-check
    origin = RestPoint(
        location=origin.location,
        jacobian=origin.jacobian,
        eigenvalues=origin.eigenvalues,
        stability=classify_origin(params),
        residual=0.0,
    )
    points = [origin]
    endemic = endemic_equilibrium(params)
    if endemic is not None:
        points.append(endemic)
    if scan_n:
        _scan_for_extra_rest_points(params, points, scan_n)
    return points
