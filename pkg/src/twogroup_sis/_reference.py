"""Pure-Python adaptive integration kernel (fallback backend).

Mirrors ``_speedups.pyx`` statement for statement; keep the two in sync.
Scalar arithmetic throughout: the state dimension is at most 3, so plain
floats beat numpy here.

Systems (internal coordinates):
  0 absolute     y = (S, I1, I2)
  1 proportions  y = (i1, i2, u) with u = 1 - s - i1 - i2; samples are
                 emitted as (s, i1, i2) with s = 1 - u - i1 - i2.  The
                 deviation u obeys u' = -u * (b1 + b2*s - eps*(i1+i2)),
                 an exact linear change of coordinates of the raw system,
                 so an initial u = 0 stays exactly 0 and the simplex
                 constraint cannot drift through roundoff amplification.
  2 planar       y = (i1, i2)

Stepper: Dormand-Prince 5(4) embedded pair, FSAL, error per step measured
against atol + rtol * |y| (RMS), safety 0.9, step growth clamped to
[0.2, 5].  Steps land exactly on the recording grid and on t_end.
"""

from __future__ import annotations

import math

import numpy as np

ABSOLUTE, PROPORTIONS, PLANAR = 0, 1, 2
TERM_HORIZON, TERM_CONVERGED, TERM_UNDERFLOW = 0, 1, 2

#: post-step clamp window: coordinates in (-1e-12, 0) snap to 0
NEG_CLAMP = 1e-12

# Dormand-Prince 5(4) tableau
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# b - bhat (error weights, 5th minus embedded 4th)
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


def _rhs(system, pv, y):
    b, b1, b2, d, ep, l1, l2, g1, g2, p, q = pv
    if system == ABSOLUTE:
        S, i1, i2 = y
        n = S + i1 + i2
        inc = (l1 * i1 + l2 * i2) * S / n
        return ((b1 * n + (b2 - d) * S + g1 * i1 + g2 * i2 - inc),
                (p * inc - (d + ep + g1) * i1),
                (q * inc - (d + ep + g2) * i2))
    if system == PROPORTIONS:
        i1, i2, u = y
        s = 1.0 - u - i1 - i2
        inc = s * (l1 * i1 + l2 * i2)
        tot = i1 + i2
        return ((p * inc + ep * i1 * tot - (b1 + ep + g1) * i1 - b2 * s * i1),
                (q * inc + ep * i2 * tot - (b1 + ep + g2) * i2 - b2 * s * i2),
                (-u * (b1 + b2 * s - ep * tot)))
    i1, i2 = y
    tot = i1 + i2
    return (((p * l1 - b - ep - g1) * i1 + p * l2 * i2
             + tot * ((b2 + ep - p * l1) * i1 - p * l2 * i2)),
            (q * l1 * i1 + (q * l2 - b - ep - g2) * i2
             + tot * ((b2 + ep - q * l2) * i2 - q * l1 * i1)))


def _speed(system, k):
    # norm of the public-coordinate velocity
    if system == PROPORTIONS:
        ds = -k[2] - k[0] - k[1]
        return math.sqrt(ds * ds + k[0] * k[0] + k[1] * k[1])
    if len(k) == 3:
        return math.sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
    return math.sqrt(k[0] * k[0] + k[1] * k[1])


def _public(system, y):
    if system == PROPORTIONS:
        return (1.0 - y[2] - y[0] - y[1], y[0], y[1])
    return tuple(y)


def _nearest_rest_point(system, y, rest):
    best, best_d = -1, math.inf
    pub = _public(system, y)
    for idx in range(rest.shape[0]):
        dist = 0.0
        for c in range(rest.shape[1]):
            diff = pub[c] - rest[idx, c]
            dist += diff * diff
        if dist < best_d:
            best, best_d = idx, dist
    return best, math.sqrt(best_d)


def _clamp(system, y):
    # infective fractions / counts dipping into (-NEG_CLAMP, 0) snap to 0
    out = list(y)
    n = 2 if system == PROPORTIONS else len(out)
    for c in range(n):
        if -NEG_CLAMP < out[c] < 0.0:
            out[c] = 0.0
    return tuple(out)


def integrate_core(system, pv, y0, rest, rtol, atol, h_init, h_min, h_max,
                   t_end, record_every, conv_tol, stall_window):
    """Run one adaptive trajectory.

    Returns (times, states, speeds, terminal, capture_index, capture_time)
    with states in public coordinates, one row per recorded sample.
    """
    dim = 2 if system == PLANAR else 3
    pub_dim = dim
    y = tuple(y0)
    has_rest = rest is not None and rest.shape[0] > 0

    times = [0.0]
    states = [_public(system, y)]
    k1 = _rhs(system, pv, y)
    speeds = [_speed(system, k1)]

    if has_rest:
        idx, dist = _nearest_rest_point(system, y, rest)
        if dist <= conv_tol and speeds[0] <= conv_tol:
            return (np.array(times), np.array(states), np.array(speeds),
                    TERM_CONVERGED, idx, 0.0)

    t = 0.0
    rec_k = 1
    next_rec = record_every
    h_free = min(max(h_init, h_min), h_max)
    cc_start = -1.0
    terminal = TERM_HORIZON
    cap_idx = -1
    cap_time = -1.0

    while True:
        t_target = next_rec if next_rec < t_end else t_end
        span = t_target - t
        trimmed = span <= h_free
        h = span if trimmed else h_free

        # DOPRI 5(4) step with FSAL
        y2 = tuple(y[c] + h * A21 * k1[c] for c in range(dim))
        k2 = _rhs(system, pv, y2)
        y3 = tuple(y[c] + h * (A31 * k1[c] + A32 * k2[c]) for c in range(dim))
        k3 = _rhs(system, pv, y3)
        y4 = tuple(y[c] + h * (A41 * k1[c] + A42 * k2[c] + A43 * k3[c])
                   for c in range(dim))
        k4 = _rhs(system, pv, y4)
        y5 = tuple(y[c] + h * (A51 * k1[c] + A52 * k2[c] + A53 * k3[c] + A54 * k4[c])
                   for c in range(dim))
        k5 = _rhs(system, pv, y5)
        y6 = tuple(y[c] + h * (A61 * k1[c] + A62 * k2[c] + A63 * k3[c]
                               + A64 * k4[c] + A65 * k5[c]) for c in range(dim))
        k6 = _rhs(system, pv, y6)
        ynew = tuple(y[c] + h * (B1 * k1[c] + B3 * k3[c] + B4 * k4[c]
                                 + B5 * k5[c] + B6 * k6[c]) for c in range(dim))
        k7 = _rhs(system, pv, ynew)

        err = 0.0
        for c in range(dim):
            e = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c]
                     + E5 * k5[c] + E6 * k6[c] + E7 * k7[c])
            sc = atol + rtol * max(abs(y[c]), abs(ynew[c]))
            w = e / sc
            err += w * w
        err = math.sqrt(err / dim)

        if err <= 1.0:
            t = t_target if trimmed else t + h
            clamped = _clamp(system, ynew)
            if clamped != ynew:
                y = clamped
                k1 = _rhs(system, pv, y)
            else:
                y = ynew
                k1 = k7

            if has_rest:
                speed = _speed(system, k1)
                idx, dist = _nearest_rest_point(system, y, rest)
                if dist <= conv_tol and speed <= conv_tol:
                    if cc_start < 0.0:
                        cc_start = t
                    if t - cc_start >= stall_window:
                        terminal = TERM_CONVERGED
                        cap_idx = idx
                        cap_time = cc_start
                        break
                else:
                    cc_start = -1.0

            if trimmed and t_target == next_rec:
                times.append(t)
                states.append(_public(system, y))
                speeds.append(_speed(system, k1))
                rec_k += 1
                next_rec = rec_k * record_every
            if t >= t_end:
                break

            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if not trimmed:
                h_free = h * factor
            elif factor < 1.0:
                h_free = h * factor
            h_free = min(h_free, h_max)
            if h_free < h_min:
                h_free = h_min
        else:
            # non-finite err (state blew up) shrinks maximally
            factor = max(0.2, min(1.0, 0.9 * err ** -0.2)) if math.isfinite(err) else 0.2
            h_new = h * factor
            if h_new < h_min:
                terminal = TERM_UNDERFLOW
                break
            h_free = h_new

    if times[-1] != t:
        times.append(t)
        states.append(_public(system, y))
        speeds.append(_speed(system, k1))

    return (np.array(times), np.array(states).reshape(len(times), pub_dim),
            np.array(speeds), terminal, cap_idx, cap_time)
