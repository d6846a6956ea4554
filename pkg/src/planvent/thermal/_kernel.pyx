# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hourly march; same algorithm and signature as ``_kernel_py``."""
import numpy as np
from libc.math cimport sqrt, fabs, ceil, exp

from planvent.thermal._kernel_py import propagator

cdef double G = 9.81
cdef double KELVIN = 273.15
cdef double RHO_CP = 1.2 * 1005.0
cdef double DISCHARGE = 0.6
cdef double MAX_NORM_STEP = 2.0
cdef double SERIES_TOL = 1e-15
cdef int MAX_TERMS = 60

BACKEND = "cython"


cdef inline double _stack_flow(double area, double height, double dt_abs, double t_mean_c) nogil:
    if area <= 0.0 or dt_abs <= 0.0:
        return 0.0
    return DISCHARGE / 3.0 * area * sqrt(G * height * dt_abs / (t_mean_c + KELVIN))


cdef inline double _modulation(double t_in, double t_out, double d1, double d2, double threshold,
                               bint occupied, bint requires_occupancy) nogil:
    cdef double dt
    if requires_occupancy and not occupied:
        return 0.0
    if t_in < threshold or not t_out < t_in:
        return 0.0
    dt = t_in - t_out
    if dt <= d1:
        return 0.0
    if dt >= d2:
        return 1.0
    return (dt - d1) / (d2 - d1)


def stack_flow(double area, double height, double dt_abs, double t_mean_c):
    return _stack_flow(area, height, dt_abs, t_mean_c)


def modulation(double t_in, double t_out, double d1, double d2, double threshold,
               bint occupied, bint requires_occupancy):
    return _modulation(t_in, t_out, d1, d2, threshold, occupied, requires_occupancy)


cdef void _advance(double[:, ::1] K, double[::1] b, const double[::1] C, double[::1] T, double dt,
                   double[::1] term, double[::1] tmp, double[::1] acc) nogil:
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t i, j, s, k, m
    cdef double norm = 0.0, row, h, scale, big, v
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += fabs(K[i, j])
        row /= C[i]
        if row > norm:
            norm = row
    m = <Py_ssize_t>ceil(norm * dt / MAX_NORM_STEP)
    if m < 1:
        m = 1
    h = dt / m
    for s in range(m):
        scale = 0.0
        for i in range(n):
            if fabs(T[i]) > scale:
                scale = fabs(T[i])
        scale = SERIES_TOL * (scale + 1.0)
        for i in range(n):
            v = 0.0
            for j in range(n):
                v += K[i, j] * T[j]
            term[i] = h * (b[i] / C[i] - v / C[i])
            acc[i] = term[i]
        for k in range(1, MAX_TERMS):
            big = 0.0
            for i in range(n):
                v = 0.0
                for j in range(n):
                    v += K[i, j] * term[j]
                tmp[i] = (-h / (k + 1)) * (v / C[i])
            for i in range(n):
                term[i] = tmp[i]
                acc[i] += tmp[i]
                if fabs(tmp[i]) > big:
                    big = fabs(tmp[i])
            if big <= scale:
                break
        for i in range(n):
            T[i] += acc[i]


def advance(K, b, C, T, double dt):
    Kc = np.ascontiguousarray(K, dtype=np.float64)
    bc = np.ascontiguousarray(b, dtype=np.float64)
    Cc = np.ascontiguousarray(C, dtype=np.float64)
    Tc = np.array(T, dtype=np.float64)
    n = Tc.shape[0]
    _advance(Kc, bc, Cc, Tc, dt, np.empty(n), np.empty(n), np.empty(n))
    return Tc


cdef inline void _relax_pair(double[::1] T, Py_ssize_t a, Py_ssize_t b, double decay,
                             double share_a) nogil:
    # share_a = C_a / (C_a + C_b)
    cdef double mean = share_a * T[a] + (1.0 - share_a) * T[b]
    cdef double d = (T[a] - T[b]) * decay
    T[a] = mean + d * (1.0 - share_a)
    T[b] = mean - d * share_a


def march(const double[::1] capacitance, const double[::1] volume, const double[::1] ua_outdoor,
          const double[::1] ua_ground, double t_ground, const double[::1] crack_flow,
          const double[:, ::1] conductance,
          const Py_ssize_t[::1] window_zone, const double[::1] window_area, const double[::1] window_height,
          const Py_ssize_t[::1] door_a, const Py_ssize_t[::1] door_b, const double[::1] door_area,
          const double[::1] door_height,
          const double[::1] t_out, const double[:, ::1] gains, const unsigned char[:, ::1] occupied,
          bint vent, double d1, double d2, double threshold, bint requires_occupancy,
          double door_floor, Py_ssize_t warmup, double t_init, double dt, Py_ssize_t substeps,
          double[:, ::1] out_temp, double[:, ::1] out_ach, double[:, ::1] out_mod,
          double[::1] out_start):
    cdef Py_ssize_t n = capacitance.shape[0]
    cdef Py_ssize_t hours = t_out.shape[0]
    cdef Py_ssize_t nw = window_zone.shape[0], nd = door_a.shape[0]
    cdef Py_ssize_t step, hr, i, j, w, d, a, bz, sub
    cdef double to, q, m, v
    cdef double h = dt / substeps, frac = 1.0 / substeps
    cdef Py_ssize_t unsafe = 0
    base = np.asarray(ua_outdoor) + np.asarray(ua_ground) + RHO_CP * np.asarray(crack_flow)
    cond = np.asarray(conductance)
    E_arr, P_arr = propagator(-cond + np.diag(cond.sum(axis=1) + base), np.asarray(capacitance), h)
    cdef const double[:, ::1] E = E_arr
    cdef const double[:, ::1] P = P_arr
    cdef const double[::1] base_diag = base
    cdef double[::1] T = np.full(n, t_init)
    cdef double[::1] Tn = np.zeros(n)
    cdef double[::1] b = np.zeros(n)
    cdef double[::1] pb = np.zeros(n)
    cdef double[::1] sig = np.zeros(n)
    cdef double[::1] flow_out = np.zeros(n)
    cdef double[::1] gw = np.zeros(nw)
    cdef double[::1] gd = np.zeros(nd)
    # per-door constants: stack coefficient Cd/3 A sqrt(g H), decay rate per unit flow, C_a share
    cdef double[::1] d_coef = np.zeros(nd)
    cdef double[::1] d_rate = np.zeros(nd)
    cdef double[::1] d_share = np.zeros(nd)
    for d in range(nd):
        a = door_a[d]
        bz = door_b[d]
        d_coef[d] = DISCHARGE / 3.0 * door_area[d] * sqrt(G * door_height[d])
        d_rate[d] = RHO_CP * 0.5 * h * (1.0 / capacitance[a] + 1.0 / capacitance[bz])
        d_share[d] = capacitance[a] / (capacitance[a] + capacitance[bz])
    with nogil:
        for step in range(-warmup, hours):
            hr = step % hours
            if hr < 0:
                hr += hours
            if step == 0:
                for i in range(n):
                    out_start[i] = T[i]
            to = t_out[hr]
            for i in range(n):
                b[i] = gains[hr, i] + ua_ground[i] * t_ground + (base_diag[i] - ua_ground[i]) * to
            for i in range(n):
                v = 0.0
                for j in range(n):
                    v += P[i, j] * b[j]
                pb[i] = v
            if step >= 0:
                for i in range(n):
                    out_ach[hr, i] = 0.0
                    out_mod[hr, i] = 0.0
            for sub in range(substeps):
                for i in range(n):
                    if vent:
                        sig[i] = _modulation(T[i], to, d1, d2, threshold, occupied[hr, i] != 0,
                                             requires_occupancy)
                        if sig[i] > 0.0 and not to < T[i]:
                            unsafe += 1
                    else:
                        sig[i] = 0.0
                    flow_out[i] = crack_flow[i]
                for w in range(nw):
                    i = window_zone[w]
                    q = 0.0
                    if sig[i] > 0.0:
                        q = _stack_flow(sig[i] * window_area[w], window_height[w], fabs(T[i] - to),
                                        0.5 * (T[i] + to))
                    flow_out[i] += q
                    gw[w] = exp(-RHO_CP * q * 0.5 * h / capacitance[i])
                for d in range(nd):
                    a = door_a[d]
                    bz = door_b[d]
                    m = door_floor
                    if sig[a] > m:
                        m = sig[a]
                    if sig[bz] > m:
                        m = sig[bz]
                    v = fabs(T[a] - T[bz])
                    q = 0.0
                    if m > 0.0 and v > 0.0 and d_coef[d] > 0.0:
                        q = m * d_coef[d] * sqrt(v / (0.5 * (T[a] + T[bz]) + KELVIN))
                    gd[d] = exp(-q * d_rate[d])
                # gw, gd hold the half-step decay factors of each opening
                for w in range(nw):
                    i = window_zone[w]
                    T[i] = to + (T[i] - to) * gw[w]
                for d in range(nd):
                    _relax_pair(T, door_a[d], door_b[d], gd[d], d_share[d])
                for i in range(n):
                    v = pb[i]
                    for j in range(n):
                        v += E[i, j] * T[j]
                    Tn[i] = v
                for i in range(n):
                    T[i] = Tn[i]
                for d in range(nd - 1, -1, -1):
                    _relax_pair(T, door_a[d], door_b[d], gd[d], d_share[d])
                for w in range(nw - 1, -1, -1):
                    i = window_zone[w]
                    T[i] = to + (T[i] - to) * gw[w]
                if step >= 0:
                    for i in range(n):
                        out_ach[hr, i] += flow_out[i] * 3600.0 / volume[i]
                        out_mod[hr, i] += sig[i]
            if step >= 0:
                for i in range(n):
                    out_temp[hr, i] = T[i]
                    out_ach[hr, i] *= frac
                    out_mod[hr, i] = min(1.0, out_mod[hr, i] * frac)
    return unsafe
