"""Adaptive integration of the three model systems with rest-point capture.

The stepper is an explicit Dormand-Prince 5(4) embedded pair with the
standard controller (safety 0.9, growth clamped to [0.2, 5]); local error
per step is measured against atol + rtol * |state|.  Trajectories stop at
the horizon, on convergence capture, or on step-size underflow.

The proportions system is advanced in deviation coordinates
(i1, i2, u = 1 - s - i1 - i2), an exact linear reparametrization of the
raw 3D system.  Directly stepping (s, i1, i2) lets roundoff seed the
off-simplex mode, which the dynamics amplify exponentially whenever
b1 + b2*s < eps*(i1+i2); in deviation coordinates an on-simplex start
stays on the simplex to machine precision while deliberately off-simplex
starts still follow the true 3D flow.  Sum drift is audited, never
projected away; the only state correction is a post-step clamp sending
coordinates in (-1e-12, 0) to zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from . import _backend, _reference
from .equilibria import RestPoint, all_rest_points
from .errors import DomainError, ParameterError
from .model import (
    SIMPLEX_TOL,
    AbsoluteState,
    ModelParams,
    PlanarState,
    ProportionState,
)

#: initial off-simplex deviations at or below this are representation noise
#: of a normalized input and are treated as exactly on-simplex
SNAP_TOL = 1e-14

#: audit thresholds
DRIFT_TOL = 1e-9
COORD_TOL = 1e-12

SYSTEMS = ("absolute", "proportions", "planar")
_SYSTEM_ID = {"absolute": 0, "proportions": 1, "planar": 2}


class TerminalReason(str, enum.Enum):
    HORIZON_REACHED = "HorizonReached"
    CONVERGED = "ConvergedTo"
    STEP_SIZE_UNDERFLOW = "StepSizeUnderflow"


_TERMINAL_BY_CODE = {
    _reference.TERM_HORIZON: TerminalReason.HORIZON_REACHED,
    _reference.TERM_CONVERGED: TerminalReason.CONVERGED,
    _reference.TERM_UNDERFLOW: TerminalReason.STEP_SIZE_UNDERFLOW,
}


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control, horizon, sampling and capture settings."""

    rtol: float = 1e-8
    atol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 1.0
    t_end: float = 1000.0
    record_every: float = 1.0
    convergence_tol: float = 1e-8
    stall_window: float = 10.0

    def __post_init__(self) -> None:
        if not (0.0 < self.h_min <= self.h_init <= self.h_max):
            raise ParameterError("need 0 < h_min <= h_init <= h_max")
        if self.rtol <= 0.0 or self.atol <= 0.0:
            raise ParameterError("rtol and atol must be positive")
        if self.t_end <= 0.0:
            raise ParameterError("t_end must be positive")
        if self.record_every <= 0.0:
            raise ParameterError("record_every must be positive")
        if self.convergence_tol <= 0.0 or self.stall_window < 0.0:
            raise ParameterError("convergence_tol must be > 0, stall_window >= 0")

    def to_dict(self) -> dict:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}

    def replace(self, **changes) -> "IntegratorConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of one system.

    ``states`` rows are in the system's natural coordinates:
    absolute (S, I1, I2), proportions (s, i1, i2), planar (i1, i2).
    ``speeds`` holds the vector-field norm at each sample.
    """

    system: str
    times: np.ndarray
    states: np.ndarray
    speeds: np.ndarray
    terminal: TerminalReason
    capture_index: int | None
    capture_time: float | None
    rest_points: tuple[RestPoint, ...] | None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class ConvergenceOutcome:
    """Which rest point (if any) a trajectory settled on."""

    limit: RestPoint | None
    time_of_capture: float | None


@dataclass(frozen=True)
class InvarianceReport:
    """Containment audit of a proportions or planar trajectory."""

    applicable: bool
    max_simplex_drift: float | None
    min_coordinate: float | None
    boundary_violations: int

    @property
    def clean(self) -> bool:
        if not self.applicable:
            return True
        return self.boundary_violations == 0


def _params_vector(params: ModelParams) -> tuple:
    return (params.b, params.b1, params.b2, params.d, params.epsilon,
            params.lambda1, params.lambda2, params.gamma1, params.gamma2,
            params.p, params.q)


def _initial_vector(system: str, state) -> tuple:
    if system == "absolute":
        if not isinstance(state, AbsoluteState):
            state = AbsoluteState(*state)
        return (state.S, state.I1, state.I2)
    if system == "proportions":
        if not isinstance(state, ProportionState):
            state = ProportionState(*state)
        u = 1.0 - state.s - state.i1 - state.i2
        if abs(u) <= SNAP_TOL:
            u = 0.0
        return (state.i1, state.i2, u)
    if not isinstance(state, PlanarState):
        state = PlanarState(*state)
    return (state.i1, state.i2)


def _rest_array(system: str, rest_points: tuple[RestPoint, ...]) -> np.ndarray | None:
    if not rest_points:
        return None
    if system == "proportions":
        rows = [(1.0 - rp.location.i1 - rp.location.i2, rp.location.i1, rp.location.i2)
                for rp in rest_points]
    else:
        rows = [(rp.location.i1, rp.location.i2) for rp in rest_points]
    return np.asarray(rows, dtype=np.float64)


def integrate(system: str, params: ModelParams, initial, config: IntegratorConfig,
              rest_points: list[RestPoint] | tuple[RestPoint, ...] | None = None,
              ) -> Trajectory:
    """Integrate one trajectory of the tagged system.

    For the proportions and planar systems, rest points are looked up
    (origin plus endemic state, no uniqueness scan) when not supplied,
    and the run stops early once the state has stayed within
    ``convergence_tol`` of one of them, at vector-field norm below the
    same tolerance, for a full ``stall_window``.  Pass ``rest_points=[]``
    to disable capture.  The absolute system never captures.
    """
    if system not in SYSTEMS:
        raise ParameterError(f"unknown system {system!r}, expected one of {SYSTEMS}")
    if system == "absolute":
        if rest_points:
            raise ParameterError("rest-point capture applies to the proportions "
                                 "and planar systems only")
        rest_tuple: tuple[RestPoint, ...] = ()
    elif rest_points is None:
        rest_tuple = tuple(all_rest_points(params, scan_n=0))
    else:
        rest_tuple = tuple(rest_points)

    times, states, speeds, code, cap_idx, cap_time = _backend.integrate_core(
        _SYSTEM_ID[system],
        _params_vector(params),
        _initial_vector(system, initial),
        _rest_array(system, rest_tuple),
        config.rtol, config.atol, config.h_init, config.h_min, config.h_max,
        config.t_end, config.record_every, config.convergence_tol,
        config.stall_window,
    )
    terminal = _TERMINAL_BY_CODE[code]
    return Trajectory(
        system=system,
        times=times,
        states=states,
        speeds=speeds,
        terminal=terminal,
        capture_index=cap_idx if terminal is TerminalReason.CONVERGED else None,
        capture_time=cap_time if terminal is TerminalReason.CONVERGED else None,
        rest_points=rest_tuple or None,
    )


def detect_convergence(trajectory: Trajectory, rest_points, config: IntegratorConfig
                       ) -> ConvergenceOutcome:
    """Post-hoc capture decision over recorded samples.

    Capture is declared when the trailing run of samples that sit within
    ``convergence_tol`` of a rest point, at speed below the tolerance,
    covers at least ``stall_window`` (or the whole trajectory, if shorter).
    Ties go to the rest point nearest the final sample.
    """
    if trajectory.system == "absolute":
        raise DomainError("convergence detection applies to the proportions "
                          "and planar systems only")
    rest_points = tuple(rest_points)
    if not rest_points:
        return ConvergenceOutcome(limit=None, time_of_capture=None)
    rest = _rest_array(trajectory.system, rest_points)

    pts = trajectory.states
    if trajectory.system == "proportions":
        coords = pts
    else:
        coords = pts[:, :2]
    dists = np.linalg.norm(coords[:, None, :] - rest[None, :, :], axis=2)
    near = dists.min(axis=1) <= config.convergence_tol
    slow = trajectory.speeds <= config.convergence_tol
    ok = near & slow

    if not ok[-1]:
        return ConvergenceOutcome(limit=None, time_of_capture=None)
    start = len(ok) - 1
    while start > 0 and ok[start - 1]:
        start -= 1
    t0, t1 = trajectory.times[start], trajectory.times[-1]
    duration = float(trajectory.times[-1] - trajectory.times[0])
    if t1 - t0 < min(config.stall_window, duration):
        return ConvergenceOutcome(limit=None, time_of_capture=None)
    winner = int(dists[-1].argmin())
    return ConvergenceOutcome(limit=rest_points[winner], time_of_capture=float(t0))


def invariance_audit(trajectory: Trajectory) -> InvarianceReport:
    """Containment report: sum drift, most negative coordinate, violations.

    Absolute-system trajectories get an explicit not-applicable marker.
    """
    if trajectory.system == "absolute":
        return InvarianceReport(applicable=False, max_simplex_drift=None,
                                min_coordinate=None, boundary_violations=0)
    pts = trajectory.states
    min_coord = float(pts.min())
    if trajectory.system == "proportions":
        sums = pts.sum(axis=1)
        drift = float(np.abs(sums - 1.0).max())
        bad = (np.abs(sums - 1.0) > DRIFT_TOL) | (pts.min(axis=1) < -COORD_TOL)
    else:
        sums = pts.sum(axis=1)
        drift = float(np.maximum(sums - 1.0, 0.0).max())
        bad = (sums > 1.0 + SIMPLEX_TOL) | (pts.min(axis=1) < -COORD_TOL)
    return InvarianceReport(
        applicable=True,
        max_simplex_drift=drift,
        min_coordinate=min_coord,
        boundary_violations=int(bad.sum()),
    )


_CSV_HEADERS = {
    "absolute": "t,S,I1,I2,N",
    "proportions": "t,s,i1,i2",
    "planar": "t,i1,i2",
}


def trajectory_to_csv(trajectory: Trajectory, stream) -> None:
    """Write the sample table as CSV (17 significant digits, LF endings)."""
    stream.write(_CSV_HEADERS[trajectory.system] + "\n")
    absolute = trajectory.system == "absolute"
    for t, row in zip(trajectory.times, trajectory.states):
        cells = [f"{t:.17g}"] + [f"{v:.17g}" for v in row]
        if absolute:
            n = row[0] + row[1] + row[2]
            cells.append(f"{n:.17g}")
        stream.write(",".join(cells) + "\n")
