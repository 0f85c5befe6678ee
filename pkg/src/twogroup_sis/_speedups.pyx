# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive integration kernel.

Mirrors ``_reference.py`` statement for statement; keep the two in sync.
See that module for the coordinate conventions and controller contract.
"""

from libc.math cimport fabs, sqrt, isfinite, INFINITY

import numpy as np

ABSOLUTE, PROPORTIONS, PLANAR = 0, 1, 2
TERM_HORIZON, TERM_CONVERGED, TERM_UNDERFLOW = 0, 1, 2

cdef double NEG_CLAMP = 1e-12

# Dormand-Prince 5(4) tableau
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef inline void _rhs(int system, double* pv, double* y, double* out) nogil:
    cdef double b = pv[0], b1 = pv[1], b2 = pv[2], d = pv[3], ep = pv[4]
    cdef double l1 = pv[5], l2 = pv[6], g1 = pv[7], g2 = pv[8]
    cdef double p = pv[9], q = pv[10]
    cdef double S, i1, i2, u, s, n, inc, tot
    if system == 0:
        S = y[0]; i1 = y[1]; i2 = y[2]
        n = S + i1 + i2
        inc = (l1 * i1 + l2 * i2) * S / n
        out[0] = b1 * n + (b2 - d) * S + g1 * i1 + g2 * i2 - inc
        out[1] = p * inc - (d + ep + g1) * i1
        out[2] = q * inc - (d + ep + g2) * i2
    elif system == 1:
        i1 = y[0]; i2 = y[1]; u = y[2]
        s = 1.0 - u - i1 - i2
        inc = s * (l1 * i1 + l2 * i2)
        tot = i1 + i2
        out[0] = p * inc + ep * i1 * tot - (b1 + ep + g1) * i1 - b2 * s * i1
        out[1] = q * inc + ep * i2 * tot - (b1 + ep + g2) * i2 - b2 * s * i2
        out[2] = -u * (b1 + b2 * s - ep * tot)
    else:
        i1 = y[0]; i2 = y[1]
        tot = i1 + i2
        out[0] = ((p * l1 - b - ep - g1) * i1 + p * l2 * i2
                  + tot * ((b2 + ep - p * l1) * i1 - p * l2 * i2))
        out[1] = (q * l1 * i1 + (q * l2 - b - ep - g2) * i2
                  + tot * ((b2 + ep - q * l2) * i2 - q * l1 * i1))


cdef inline double _speed(int system, int dim, double* k) nogil:
    cdef double ds
    if system == 1:
        ds = -k[2] - k[0] - k[1]
        return sqrt(ds * ds + k[0] * k[0] + k[1] * k[1])
    if dim == 3:
        return sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
    return sqrt(k[0] * k[0] + k[1] * k[1])


cdef inline void _public(int system, double* y, double* out) nogil:
    if system == 1:
        out[0] = 1.0 - y[2] - y[0] - y[1]
        out[1] = y[0]
        out[2] = y[1]
    else:
        out[0] = y[0]
        out[1] = y[1]
        out[2] = y[2]


cdef inline int _record(int system, int dim, double t, double* y, double* k1,
                        int n, double[::1] times, double[:, ::1] states,
                        double[::1] speeds) nogil:
    cdef double pub[3]
    cdef int c
    _public(system, y, pub)
    times[n] = t
    for c in range(dim):
        states[n, c] = pub[c]
    speeds[n] = _speed(system, dim, k1)
    return n + 1


def integrate_core(int system, pv_in, y0_in, rest_in, double rtol, double atol,
                   double h_init, double h_min, double h_max, double t_end,
                   double record_every, double conv_tol, double stall_window):
    """Run one adaptive trajectory; see ``_reference.integrate_core``."""
    cdef double pv[11]
    cdef double y[3]
    cdef double ynew[3]
    cdef double ytmp[3]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double k5[3]
    cdef double k6[3]
    cdef double k7[3]
    cdef double pub[3]
    cdef int dim = 2 if system == 2 else 3
    cdef int c, best
    cdef Py_ssize_t r

    for c in range(11):
        pv[c] = pv_in[c]
    for c in range(dim):
        y[c] = y0_in[c]

    if rest_in is None:
        rest_np = np.empty((0, dim), dtype=np.float64)
    else:
        rest_np = np.ascontiguousarray(rest_in, dtype=np.float64)
    cdef double[:, ::1] rest = rest_np
    cdef Py_ssize_t n_rest = rest.shape[0]

    cdef Py_ssize_t n_max = <Py_ssize_t> (t_end / record_every) + 4
    times_arr = np.empty(n_max, dtype=np.float64)
    states_arr = np.empty((n_max, dim), dtype=np.float64)
    speeds_arr = np.empty(n_max, dtype=np.float64)
    cdef double[::1] times = times_arr
    cdef double[:, ::1] states = states_arr
    cdef double[::1] speeds = speeds_arr

    cdef int n = 0
    _rhs(system, pv, y, k1)
    n = _record(system, dim, 0.0, y, k1, n, times, states, speeds)

    cdef double dist, diff, best_d, speed
    cdef int terminal = TERM_HORIZON
    cdef int cap_idx = -1
    cdef double cap_time = -1.0

    if n_rest > 0:
        _public(system, y, pub)
        best = -1
        best_d = INFINITY
        for r in range(n_rest):
            dist = 0.0
            for c in range(dim):
                diff = pub[c] - rest[r, c]
                dist += diff * diff
            if dist < best_d:
                best = <int> r
                best_d = dist
        if sqrt(best_d) <= conv_tol and speeds[0] <= conv_tol:
            return (times_arr[:1].copy(), states_arr[:1].copy(),
                    speeds_arr[:1].copy(), TERM_CONVERGED, best, 0.0)

    cdef double t = 0.0
    cdef Py_ssize_t rec_k = 1
    cdef double next_rec = record_every
    cdef double h_free = min(max(h_init, h_min), h_max)
    cdef double cc_start = -1.0
    cdef double t_target, span, h, err, e, sc, w, factor, h_new
    cdef bint trimmed, clamped, cond

    while True:
        t_target = next_rec if next_rec < t_end else t_end
        span = t_target - t
        trimmed = span <= h_free
        h = span if trimmed else h_free

        for c in range(dim):
            ytmp[c] = y[c] + h * A21 * k1[c]
        _rhs(system, pv, ytmp, k2)
        for c in range(dim):
            ytmp[c] = y[c] + h * (A31 * k1[c] + A32 * k2[c])
        _rhs(system, pv, ytmp, k3)
        for c in range(dim):
            ytmp[c] = y[c] + h * (A41 * k1[c] + A42 * k2[c] + A43 * k3[c])
        _rhs(system, pv, ytmp, k4)
        for c in range(dim):
            ytmp[c] = y[c] + h * (A51 * k1[c] + A52 * k2[c] + A53 * k3[c]
                                  + A54 * k4[c])
        _rhs(system, pv, ytmp, k5)
        for c in range(dim):
            ytmp[c] = y[c] + h * (A61 * k1[c] + A62 * k2[c] + A63 * k3[c]
                                  + A64 * k4[c] + A65 * k5[c])
        _rhs(system, pv, ytmp, k6)
        for c in range(dim):
            ynew[c] = y[c] + h * (B1 * k1[c] + B3 * k3[c] + B4 * k4[c]
                                  + B5 * k5[c] + B6 * k6[c])
        _rhs(system, pv, ynew, k7)

        err = 0.0
        for c in range(dim):
            e = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c]
                     + E5 * k5[c] + E6 * k6[c] + E7 * k7[c])
            sc = atol + rtol * max(fabs(y[c]), fabs(ynew[c]))
            w = e / sc
            err += w * w
        err = sqrt(err / dim)

        if err <= 1.0:
            t = t_target if trimmed else t + h
            clamped = False
            for c in range(2 if system == 1 else dim):
                if -NEG_CLAMP < ynew[c] < 0.0:
                    ynew[c] = 0.0
                    clamped = True
            for c in range(dim):
                y[c] = ynew[c]
            if clamped:
                _rhs(system, pv, y, k1)
            else:
                for c in range(dim):
                    k1[c] = k7[c]

            if n_rest > 0:
                speed = _speed(system, dim, k1)
                _public(system, y, pub)
                best = -1
                best_d = INFINITY
                for r in range(n_rest):
                    dist = 0.0
                    for c in range(dim):
                        diff = pub[c] - rest[r, c]
                        dist += diff * diff
                    if dist < best_d:
                        best = <int> r
                        best_d = dist
                cond = sqrt(best_d) <= conv_tol and speed <= conv_tol
                if cond:
                    if cc_start < 0.0:
                        cc_start = t
                    if t - cc_start >= stall_window:
                        terminal = TERM_CONVERGED
                        cap_idx = best
                        cap_time = cc_start
                        break
                else:
                    cc_start = -1.0

            if trimmed and t_target == next_rec:
                n = _record(system, dim, t, y, k1, n, times, states, speeds)
                rec_k += 1
                next_rec = rec_k * record_every
            if t >= t_end:
                break

            if err == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * err ** -0.2
                if factor > 5.0:
                    factor = 5.0
                elif factor < 0.2:
                    factor = 0.2
            if not trimmed:
                h_free = h * factor
            elif factor < 1.0:
                h_free = h * factor
            if h_free > h_max:
                h_free = h_max
            if h_free < h_min:
                h_free = h_min
        else:
            if isfinite(err):
                factor = 0.9 * err ** -0.2
                if factor > 1.0:
                    factor = 1.0
                elif factor < 0.2:
                    factor = 0.2
            else:
                factor = 0.2
            h_new = h * factor
            if h_new < h_min:
                terminal = TERM_UNDERFLOW
                break
            h_free = h_new

    if times[n - 1] != t:
        n = _record(system, dim, t, y, k1, n, times, states, speeds)

    return (times_arr[:n].copy(), states_arr[:n].copy(), speeds_arr[:n].copy(),
            terminal, cap_idx, cap_time)
