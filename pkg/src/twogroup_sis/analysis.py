"""Numerical certificates and parameter studies.

Contents:

* the Dulac-type auxiliary field g with g . f = 0 and a strictly negative
  curl component along (1,1,1) on the simplex interior, which rules out
  periodic orbits, homoclinic loops and phase polygons there;
* threshold sweeps (one parameter, many values) reporting R0, the origin
  class and the endemic state per value;
* basin probes integrating a grid of interior starts and labelling each
  by its captured rest point;
* the decomposition of R0 into per-group contributions, which makes the
  core-group effect visible: a small routing fraction q with a large
  contact rate lambda2 can dominate the threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .equilibria import RestPoint, StabilityClass, all_rest_points, classify_origin
from .errors import DomainError, InternalError, ParameterError
from .integrate import IntegratorConfig, TerminalReason, integrate
from .model import ModelParams, PARAM_NAMES, ProportionState, _f_proportions, r0

LABEL_ORIGIN = "origin"
LABEL_ENDEMIC = "endemic"
LABEL_UNRESOLVED = "unresolved"


def dulac_curl(params: ModelParams, state: ProportionState) -> float:
    """Closed form of (curl g) . (1,1,1) at an interior simplex point.

    Equals -(p*lambda2/i1^2 + q*lambda1/i2^2 + (b1+gamma1)/(i2*s^2)
    + (b1+gamma2)/(i1*s^2)), hence strictly negative wherever defined.
    """
    s, i1, i2 = state.s, state.i1, state.i2
    if s <= 0.0 or i1 <= 0.0 or i2 <= 0.0:
        raise DomainError("curl form needs a strictly interior state")
    return -(params.p * params.lambda2 / (i1 * i1)
             + params.q * params.lambda1 / (i2 * i2)
             + (params.b1 + params.gamma1) / (i2 * s * s)
             + (params.b1 + params.gamma2) / (i1 * s * s))


def dulac_field(params: ModelParams, point) -> tuple[float, float, float]:
    """Auxiliary field g = g1 + g2 + g3 at a 3D point near the simplex.

    Each piece divides a pair of field components, restricted to two
    coordinates via the sum constraint, by the product of those
    coordinates; off the plane the restrictions are taken literally
    (each piece stays independent of its omitted coordinate):

        g1(i1,i2) = ( 0,            -f3/(i1 i2),  f2/(i1 i2))
        g2(s, i2) = ( f3/(s i2),     0,          -f1/(s i2))
        g3(s, i1) = (-f2/(s i1),     f1/(s i1),   0)

    where in g1 the components use s = 1-i1-i2, in g2 they use
    i1 = 1-s-i2, and in g3 they use i2 = 1-s-i1.  By construction
    g . f = 0 on the simplex.
    """
    s, i1, i2 = (float(point[0]), float(point[1]), float(point[2]))
    if i1 * i2 == 0.0 or s * i2 == 0.0 or s * i1 == 0.0:
        raise DomainError("auxiliary field undefined where coordinate products vanish")
    _, f2_a, f3_a = _f_proportions(params, 1.0 - i1 - i2, i1, i2)
    f1_b, _, f3_b = _f_proportions(params, s, 1.0 - s - i2, i2)
    f1_c, f2_c, _ = _f_proportions(params, s, i1, 1.0 - s - i1)
    d_a = i1 * i2
    d_b = s * i2
    d_c = s * i1
    return (f3_b / d_b - f2_c / d_c,
            -f3_a / d_a + f1_c / d_c,
            f2_a / d_a - f1_b / d_b)


def core_group_decomposition(params: ModelParams) -> tuple[float, float]:
    """The two additive contributions to R0, (group 1, group 2).

    Their sum is exactly r0(params).  Even a small q yields a dominant
    second term once lambda2 is much larger than lambda1.
    """
    return (params.p * params.lambda1 / (params.b + params.epsilon + params.gamma1),
            params.q * params.lambda2 / (params.b + params.epsilon + params.gamma2))


@dataclass(frozen=True)
class SweepRow:
    """One row of a threshold sweep."""

    parameter: str
    value: float
    r0: float | None
    origin_class: StabilityClass | None
    endemic_i1: float | None
    endemic_i2: float | None
    endemic_class: StabilityClass | None
    error: str | None = None

    @property
    def endemic_present(self) -> bool:
        return self.endemic_i1 is not None

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "value": self.value,
            "r0": self.r0,
            "origin_class": None if self.origin_class is None else self.origin_class.value,
            "endemic_i1": self.endemic_i1,
            "endemic_i2": self.endemic_i2,
            "endemic_class": None if self.endemic_class is None else self.endemic_class.value,
            "error": self.error,
        }


def threshold_sweep(params: ModelParams, parameter: str, values) -> list[SweepRow]:
    """Sweep one model parameter and report the equilibrium structure.

    Rows come back sorted by the swept value.  A value that produces
    invalid parameters (or a numerical failure) yields a row with the
    error recorded instead of aborting the sweep.
    """
    if parameter not in PARAM_NAMES:
        raise ParameterError(f"unknown parameter {parameter!r}")
    values = [float(v) for v in values]
    if not values:
        raise ParameterError("sweep needs at least one value")
    rows: list[SweepRow] = []
    for value in sorted(values):
        try:
            swept = params.replace(**{parameter: value})
            points = all_rest_points(swept, scan_n=0)
            endemic = points[1] if len(points) > 1 else None
            rows.append(SweepRow(
                parameter=parameter,
                value=value,
                r0=r0(swept),
                origin_class=points[0].stability,
                endemic_i1=None if endemic is None else endemic.location.i1,
                endemic_i2=None if endemic is None else endemic.location.i2,
                endemic_class=None if endemic is None else endemic.stability,
            ))
        except (ParameterError, DomainError, InternalError) as exc:
            rows.append(SweepRow(parameter=parameter, value=value, r0=None,
                                 origin_class=None, endemic_i1=None,
                                 endemic_i2=None, endemic_class=None,
                                 error=str(exc)))
    return rows


@dataclass(frozen=True)
class BasinCell:
    i1: float
    i2: float
    label: str
    capture_time: float | None


@dataclass(frozen=True)
class BasinReport:
    """Capture labels for a grid of interior starting points."""

    grid_n: int
    cells: tuple[BasinCell, ...]
    counts: dict

    @property
    def unresolved(self) -> int:
        return self.counts.get(LABEL_UNRESOLVED, 0)


def basin_probe(params: ModelParams, grid_n: int, config: IntegratorConfig
                ) -> BasinReport:
    """Integrate from every interior grid start and label its limit.

    Starts are (j, k)/(grid_n + 1) with j, k >= 1 and j + k <= grid_n,
    strictly inside the triangle, so the excluded stable-manifold point
    of the saddle (the origin itself) is never sampled.  A start whose
    trajectory reaches the horizon uncaptured is labelled unresolved;
    a capture by the wrong attractor raises InternalError.
    """
    if grid_n < 2:
        raise ParameterError("grid_n must be at least 2")
    rest = all_rest_points(params)
    threshold = r0(params)
    expected = LABEL_ENDEMIC if len(rest) > 1 else LABEL_ORIGIN
    names = [LABEL_ORIGIN if rp.is_origin else LABEL_ENDEMIC for rp in rest]

    step = 1.0 / (grid_n + 1)
    cells: list[BasinCell] = []
    counts: dict[str, int] = {}
    for j in range(1, grid_n + 1):
        for k in range(1, grid_n + 1 - j):
            i1 = j * step
            i2 = k * step
            run = integrate("planar", params, (i1, i2), config, rest_points=rest)
            if run.terminal is TerminalReason.CONVERGED:
                label = names[run.capture_index]
                capture_time = run.capture_time
                if label != expected:
                    raise InternalError(
                        f"start ({i1:.4f}, {i2:.4f}) captured by {label}; "
                        f"R0 = {threshold!r} demands {expected}")
            else:
                label = LABEL_UNRESOLVED
                capture_time = None
            cells.append(BasinCell(i1=i1, i2=i2, label=label, capture_time=capture_time))
            counts[label] = counts.get(label, 0) + 1
    return BasinReport(grid_n=grid_n, cells=tuple(cells), counts=counts)


# ---------------------------------------------------------------- exports

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, StabilityClass):
        return value.value
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def sweep_to_csv(rows: list[SweepRow], stream) -> None:
    stream.write("parameter,value,r0,origin_class,endemic_i1,endemic_i2,"
                 "endemic_class,error\n")
    for row in rows:
        stream.write(",".join([
            row.parameter, _fmt(row.value), _fmt(row.r0), _fmt(row.origin_class),
            _fmt(row.endemic_i1), _fmt(row.endemic_i2), _fmt(row.endemic_class),
            row.error or "",
        ]) + "\n")


def sweep_to_json(rows: list[SweepRow], stream) -> None:
    json.dump([row.to_dict() for row in rows], stream, indent=2, sort_keys=True)
    stream.write("\n")


def basin_to_csv(report: BasinReport, stream) -> None:
    stream.write("i1,i2,label,capture_time\n")
    for cell in report.cells:
        stream.write(",".join([
            _fmt(cell.i1), _fmt(cell.i2), cell.label, _fmt(cell.capture_time),
        ]) + "\n")


def basin_to_json(report: BasinReport, stream) -> None:
    payload = {
        "grid_n": report.grid_n,
        "counts": dict(sorted(report.counts.items())),
        "cells": [
            {"i1": c.i1, "i2": c.i2, "label": c.label, "capture_time": c.capture_time}
            for c in report.cells
        ],
    }
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")
