"""Property suite certifying the qualitative theory for one parameter set.

Each check re-derives a structural claim numerically and independently of
the code path it certifies (finite differences against closed forms,
long integrations against equilibrium solves, grid scans against the
closed-form rest-point construction).  ``run_verification`` returns one
result per property; the CLI turns failures into exit code 3.

Test hook: every check that consumes the planar vector field takes it as
an argument, so a corrupted field can be injected to prove the suite
actually rejects wrong dynamics (see ``cli.cmd_verify``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import dulac_curl, dulac_field
from .equilibria import (
    HYPERBOLICITY_RTOL,
    RESIDUAL_TOL,
    StabilityClass,
    all_rest_points,
    classify_origin,
    endemic_equilibrium,
    equilibrium_quadratic,
    equilibrium_ray,
    origin_matrix,
)
from .errors import InternalError
from .integrate import (
    COORD_TOL,
    DRIFT_TOL,
    IntegratorConfig,
    TerminalReason,
    integrate,
    invariance_audit,
)
from .model import (
    AbsoluteState,
    ModelParams,
    PlanarState,
    ProportionState,
    _f_proportions,
    jacobian_planar,
    planar_to_simplex,
    r0,
    total_population_rate,
    vf_absolute,
    vf_planar,
    vf_proportions,
)

PlanarField = Callable[[ModelParams, PlanarState], tuple[float, float]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _interior_planar(rng, n, margin=1e-3):
    i1 = rng.uniform(margin, 1.0 - 2.0 * margin, size=n)
    i2 = rng.uniform(margin, 1.0 - margin - i1)
    return np.column_stack([i1, i2])


def _interior_simplex(rng, n, margin=0.0):
    # uniform barycentric samples with an optional distance from the edges
    a = rng.dirichlet((1.0, 1.0, 1.0), size=n)
    if margin:
        a = margin + (1.0 - 3.0 * margin) * a
    return a


def _rel_gap(a: float, b: float, floor: float = 1.0) -> float:
    return abs(a - b) / max(floor, abs(a), abs(b))


def check_origin_classification(params: ModelParams) -> CheckResult:
    """Eigenvalue class of the origin agrees with the threshold rule."""
    threshold = r0(params)
    try:
        cls = classify_origin(params)
    except InternalError as exc:
        return CheckResult("origin-classification", False, str(exc))
    if threshold < 1.0 - HYPERBOLICITY_RTOL:
        ok = cls is StabilityClass.SINK
    elif threshold > 1.0 + HYPERBOLICITY_RTOL:
        ok = cls is StabilityClass.SADDLE
    else:
        ok = cls is StabilityClass.NON_HYPERBOLIC
    return CheckResult("origin-classification", ok,
                       f"R0={threshold:.6g}, origin={cls.value}")


def check_det_sign(params: ModelParams) -> CheckResult:
    """sign(det of origin matrix) equals sign(1 - R0)."""
    det = origin_matrix(params).det
    gap = 1.0 - r0(params)
    ok = (det > 0) == (gap > 0) or (det == 0 and abs(gap) <= HYPERBOLICITY_RTOL)
    return CheckResult("det-sign", ok, f"det={det:.6g}, 1-R0={gap:.6g}")


def check_planar_consistency(params: ModelParams, rng,
                             planar_field: PlanarField = vf_planar) -> CheckResult:
    """Planar field equals components 2,3 of the proportions field."""
    worst = 0.0
    for i1, i2 in _interior_planar(rng, 1000):
        state = ProportionState(1.0 - i1 - i2, i1, i2)
        _, p2, p3 = vf_proportions(params, state)
        f1, f2 = planar_field(params, PlanarState(i1, i2))
        worst = max(worst, _rel_gap(f1, p2), _rel_gap(f2, p3))
    return CheckResult("planar-consistency", worst <= 1e-12,
                       f"max rel gap {worst:.3e} (tol 1e-12)")


def check_quotient_rule(params: ModelParams, rng) -> CheckResult:
    """Proportions field equals d/dt(X/N) computed from the absolute field."""
    worst = 0.0
    for _ in range(200):
        counts = rng.uniform(1.0, 100.0, size=3)
        state = AbsoluteState(*counts)
        n = state.N
        d_abs = vf_absolute(params, state)
        dn = total_population_rate(params, state)
        frac = ProportionState(counts[0] / n, counts[1] / n, counts[2] / n)
        d_prop = vf_proportions(params, frac)
        for x, dx, dp in zip(counts, d_abs, d_prop):
            worst = max(worst, _rel_gap((dx * n - x * dn) / (n * n), dp))
    return CheckResult("quotient-rule", worst <= 1e-10,
                       f"max rel gap {worst:.3e} (tol 1e-10)")


def check_sum_dynamics(params: ModelParams, rng) -> CheckResult:
    """Off-simplex sum derivative equals (1-sum)(b1 + b2 s - eps(i1+i2))."""
    worst = 0.0
    for _ in range(200):
        s, i1, i2 = rng.uniform(0.05, 0.8, size=3)
        ds, di1, di2 = _f_proportions(params, s, i1, i2)
        sigma = s + i1 + i2
        expected = (1.0 - sigma) * (params.b1 + params.b2 * s
                                    - params.epsilon * i1 - params.epsilon * i2)
        worst = max(worst, _rel_gap(ds + di1 + di2, expected))
    return CheckResult("sum-dynamics", worst <= 1e-12,
                       f"max rel gap {worst:.3e} (tol 1e-12)")


def check_boundary_inflow(params: ModelParams) -> CheckResult:
    """The field never points out of the simplex along its three edges."""
    taus = np.linspace(0.0, 1.0, 101)
    worst = 0.0
    for tau in taus:
        ds, _, _ = vf_proportions(params, ProportionState(0.0, tau, 1.0 - tau))
        _, di1, _ = vf_proportions(params, ProportionState(1.0 - tau, 0.0, tau))
        _, _, di2 = vf_proportions(params, ProportionState(1.0 - tau, tau, 0.0))
        worst = min(worst, ds, di1, di2)
    return CheckResult("boundary-inflow", worst >= -1e-14,
                       f"most outward normal component {worst:.3e}")


def check_jacobian_fd(params: ModelParams, rng,
                      planar_field: PlanarField = vf_planar) -> CheckResult:
    """Analytic Jacobian against central finite differences (h = 1e-6)."""
    h = 1e-6
    worst = 0.0
    for i1, i2 in _interior_planar(rng, 100, margin=1e-3):
        jac = jacobian_planar(params, PlanarState(i1, i2))
        analytic = np.array([[jac.a11, jac.a12], [jac.a21, jac.a22]])
        fd = np.empty((2, 2))
        fp = planar_field(params, PlanarState(i1 + h, i2))
        fm = planar_field(params, PlanarState(i1 - h, i2))
        fd[:, 0] = [(fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)]
        fp = planar_field(params, PlanarState(i1, i2 + h))
        fm = planar_field(params, PlanarState(i1, i2 - h))
        fd[:, 1] = [(fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)]
        scale = max(1.0, float(np.linalg.norm(analytic)))
        worst = max(worst, float(np.linalg.norm(fd - analytic)) / scale)
    return CheckResult("jacobian-fd", worst <= 1e-5,
                       f"max rel gap {worst:.3e} (tol 1e-5)")


def check_quadratic_form(params: ModelParams, rng) -> CheckResult:
    """Recovered quadratic matches the elimination at random points."""
    from .equilibria import _elimination_value
    form = equilibrium_quadratic(params)
    worst = 0.0
    for _ in range(200):
        i1, i2 = rng.uniform(-1.0, 1.0, size=2)
        worst = max(worst, _rel_gap(form(i1, i2), _elimination_value(params, i1, i2)))
    detail = f"max rel gap {worst:.3e} (tol 1e-10)"
    if not 0.0 < params.p < 1.0:
        return CheckResult("quadratic-form", worst <= 1e-10, detail + ", degenerate p")
    m = equilibrium_ray(params)
    on_ray = abs(form(1.0, m))
    ok = worst <= 1e-10 and form.a > 0.0 and form.c < 0.0 and on_ray <= 1e-10
    return CheckResult("quadratic-form", ok, detail + f", |Q(1,m)|={on_ray:.3e}")


def check_threshold_dichotomy(params: ModelParams) -> CheckResult:
    """Endemic state exists iff R0 > 1; it is an interior hyperbolic sink."""
    threshold = r0(params)
    try:
        endemic = endemic_equilibrium(params)
    except InternalError as exc:
        return CheckResult("threshold-dichotomy", False, str(exc))
    if threshold <= 1.0 + HYPERBOLICITY_RTOL:
        ok = endemic is None
        return CheckResult("threshold-dichotomy", ok,
                           f"R0={threshold:.6g}, endemic={'absent' if ok else 'present'}")
    if endemic is None:
        return CheckResult("threshold-dichotomy", False,
                           f"R0={threshold:.6g} but no endemic state")
    checks = [
        endemic.stability is StabilityClass.SINK,
        endemic.jacobian.trace < 0.0,
        endemic.residual <= RESIDUAL_TOL,
    ]
    if 0.0 < params.p < 1.0:
        m = equilibrium_ray(params)
        ray_gap = _rel_gap(endemic.location.i2, m * endemic.location.i1)
        checks.append(ray_gap <= 1e-10)
    return CheckResult("threshold-dichotomy", all(checks),
                       f"R0={threshold:.6g}, endemic=({endemic.location.i1:.6g}, "
                       f"{endemic.location.i2:.6g}), trace={endemic.jacobian.trace:.6g}")


def check_rest_point_scan(params: ModelParams) -> CheckResult:
    """Grid scan certifies that no interior rest point went unreported."""
    try:
        points = all_rest_points(params, scan_n=200)
    except InternalError as exc:
        return CheckResult("rest-point-scan", False, str(exc))
    return CheckResult("rest-point-scan", True,
                       f"{len(points)} rest point(s), none unreported")


def check_dulac_negativity(params: ModelParams) -> CheckResult:
    """Closed-form curl component is negative on an interior grid."""
    worst = -math.inf
    n = 50
    for j in range(1, n):
        for k in range(1, n - j):
            i1 = j / n
            i2 = k / n
            worst = max(worst, dulac_curl(params, ProportionState(1.0 - i1 - i2, i1, i2)))
    return CheckResult("dulac-negativity", worst < 0.0,
                       f"max over grid {worst:.6g}")


def check_dulac_orthogonality(params: ModelParams, rng) -> CheckResult:
    """g . f vanishes on the simplex interior."""
    worst = 0.0
    for s, i1, i2 in _interior_simplex(rng, 100, margin=0.05):
        g = dulac_field(params, (s, i1, i2))
        f = vf_proportions(params, ProportionState(s, i1, i2))
        worst = max(worst, abs(g[0] * f[0] + g[1] * f[1] + g[2] * f[2]))
    return CheckResult("dulac-orthogonality", worst <= 1e-10,
                       f"max |g.f| {worst:.3e} (tol 1e-10)")


def _fd_curl_dot_ones(params: ModelParams, point, h: float = 1e-5) -> float:
    def g(q):
        return dulac_field(params, q)

    s, i1, i2 = point

    def partial(axis, comp):
        dq = [0.0, 0.0, 0.0]
        dq[axis] = h
        plus = g((s + dq[0], i1 + dq[1], i2 + dq[2]))
        minus = g((s - dq[0], i1 - dq[1], i2 - dq[2]))
        return (plus[comp] - minus[comp]) / (2.0 * h)

    # (curl g).(1,1,1) = (d g3/d i1 - d g2/d i2) + (d g1/d i2 - d g3/d s)
    #                    + (d g2/d s - d g1/d i1)
    return (partial(1, 2) - partial(2, 1)
            + partial(2, 0) - partial(0, 2)
            + partial(0, 1) - partial(1, 0))


def check_dulac_curl_fd(params: ModelParams, rng) -> CheckResult:
    """Finite-difference curl of g matches the closed form away from edges."""
    worst = 0.0
    for s, i1, i2 in _interior_simplex(rng, 10, margin=0.05):
        closed = dulac_curl(params, ProportionState(s, i1, i2))
        fd = _fd_curl_dot_ones(params, (s, i1, i2))
        worst = max(worst, abs(fd - closed) / abs(closed))
    return CheckResult("dulac-curl-fd", worst <= 1e-4,
                       f"max rel gap {worst:.3e} (tol 1e-4)")


def check_attractor_convergence(params: ModelParams, config: IntegratorConfig,
                                rng, planar_field: PlanarField = vf_planar
                                ) -> tuple[CheckResult, CheckResult, CheckResult]:
    """Trajectories settle on the attractor the threshold designates.

    Also audits simplex containment of the runs and re-derives the trace
    at the endemic state by finite differences of the (injectable) planar
    field, so corrupted dynamics are caught here.
    """
    rest = all_rest_points(params, scan_n=0)
    target = rest[1] if len(rest) > 1 else rest[0]
    target3 = planar_to_simplex(target.location)
    target_vec = np.array([target3.s, target3.i1, target3.i2])

    fails = []
    drift = 0.0
    min_coord = 0.0
    echo_ok = True
    for i1, i2 in _interior_planar(rng, 4, margin=0.05):
        start = ProportionState(1.0 - i1 - i2, i1, i2)
        run = integrate("proportions", params, start, config, rest_points=rest)
        final_gap = float(np.linalg.norm(run.final_state - target_vec))
        captured = (run.terminal is TerminalReason.CONVERGED
                    and rest[run.capture_index] is target)
        if not captured and final_gap > 1e-6:
            fails.append(f"start ({i1:.3f}, {i2:.3f}) ended {final_gap:.2e} away")
        audit = invariance_audit(run)
        drift = max(drift, audit.max_simplex_drift)
        min_coord = min(min_coord, audit.min_coordinate)
        if not _no_revisit(run, config):
            echo_ok = False

    conv = CheckResult("attractor-convergence", not fails,
                       "; ".join(fails) if fails else
                       f"4 starts reached the {'endemic state' if len(rest) > 1 else 'origin'}")
    inv = CheckResult("simplex-invariance",
                      drift <= DRIFT_TOL and min_coord >= -COORD_TOL,
                      f"max drift {drift:.3e}, min coordinate {min_coord:.3e}")

    # independent trace certificate at the endemic state, via the field
    if len(rest) > 1:
        h = 1e-6
        x, y = target.location.i1, target.location.i2
        fp1 = planar_field(params, PlanarState(x + h, y))
        fm1 = planar_field(params, PlanarState(x - h, y))
        fp2 = planar_field(params, PlanarState(x, y + h))
        fm2 = planar_field(params, PlanarState(x, y - h))
        trace_fd = (fp1[0] - fm1[0]) / (2 * h) + (fp2[1] - fm2[1]) / (2 * h)
        trace = CheckResult("interior-trace", trace_fd < 0.0,
                            f"finite-difference trace {trace_fd:.6g}")
    else:
        trace = CheckResult("interior-trace", True, "no interior rest point (R0 <= 1)")
    if not echo_ok:
        conv = CheckResult(conv.name, False, conv.detail + "; trajectory revisited "
                                                           "an earlier state")
    return conv, inv, trace


def _no_revisit(run, config: IntegratorConfig) -> bool:
    # no trajectory returns near an earlier non-equilibrium sample after
    # having moved away from it (echo of the no-cycles certificate)
    pts = run.states
    tol = config.convergence_tol
    for j in range(len(pts) - 2):
        if run.speeds[j] <= tol:
            continue
        away = False
        for k in range(j + 1, len(pts)):
            gap = float(np.linalg.norm(pts[k] - pts[j]))
            if gap >= 10.0 * tol:
                away = True
            elif away and gap < tol:
                return False
    return True


def run_verification(params: ModelParams, config: IntegratorConfig | None = None,
                     seed: int = 20260809,
                     planar_field: PlanarField = vf_planar) -> list[CheckResult]:
    """Run every property check against one parameter set."""
    config = config or IntegratorConfig()
    rng = np.random.default_rng(seed)
    results = [
        check_origin_classification(params),
        check_det_sign(params),
        check_planar_consistency(params, rng, planar_field),
        check_quotient_rule(params, rng),
        check_sum_dynamics(params, rng),
        check_boundary_inflow(params),
        check_jacobian_fd(params, rng, planar_field),
        check_quadratic_form(params, rng),
        check_threshold_dichotomy(params),
        check_rest_point_scan(params),
        check_dulac_negativity(params),
        check_dulac_orthogonality(params, rng),
        check_dulac_curl_fd(params, rng),
    ]
    results.extend(check_attractor_convergence(params, config, rng, planar_field))
    return results
