"""Reference implementation of the hourly march (numpy, no compiled code).

:func:`advance` integrates C dT/dt = b - K T exactly for coefficients frozen
over a step. With A = K / C (row-scaled) the solution is

    T(h) = T + h * phi1(-h A) (b/C - A T),    phi1(z) = sum z^k / (k+1)!

evaluated as a Taylor series in pieces short enough that |A| h <= 2. This
needs no matrix inverse, so an adiabatic network (singular K) is fine, and
1' C T is conserved exactly whenever K has zero column sums.

:func:`march` splits K into its constant part (conduction, cracks) and the
air exchange through open windows and doors, which changes every step. The
constant part uses a propagator computed once; each opening is an exact
one- or two-node relaxation, applied for half a step before and after it
(Strang splitting). Every piece conserves heat the way the full system does.
"""
from __future__ import annotations

import math

import numpy as np

G = 9.81
KELVIN = 273.15
RHO_CP = 1.2 * 1005.0
DISCHARGE = 0.6
MAX_NORM_STEP = 2.0
SERIES_TOL = 1e-15
MAX_TERMS = 60

BACKEND = "python"


def stack_flow(area, height, dt_abs, t_mean_c):
    """Single-sided stack flow (m3/s) through a fully open area."""
    if area <= 0.0 or dt_abs <= 0.0:
        return 0.0
    return DISCHARGE / 3.0 * area * math.sqrt(G * height * dt_abs / (t_mean_c + KELVIN))


def modulation(t_in, t_out, d1, d2, threshold, occupied, requires_occupancy):
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


def advance(K, b, C, T, dt):
    """Exact step of C dT/dt = b - K T over ``dt`` seconds."""
    K = np.asarray(K, dtype=float)
    C = np.asarray(C, dtype=float)
    T = np.array(T, dtype=float)
    A = K / C[:, None]
    c = np.asarray(b, dtype=float) / C
    norm = float(np.abs(A).sum(axis=1).max()) if A.size else 0.0
    m = max(1, int(math.ceil(norm * dt / MAX_NORM_STEP)))
    h = dt / m
    for _ in range(m):
        term = h * (c - A @ T)
        acc = term.copy()
        scale = float(np.abs(T).max()) + 1.0
        for k in range(1, MAX_TERMS):
            term = (-h / (k + 1)) * (A @ term)
            acc += term
            if float(np.abs(term).max()) <= SERIES_TOL * scale:
                break
        T = T + acc
    return T


def propagator(K, C, h):
    """(E, P) with T(h) = E T + P b for C dT/dt = b - K T, b constant.

    exp of the augmented matrix [[-A, diag(1/C)], [0, 0]] by Taylor series
    with scaling and squaring.
    """
    K = np.asarray(K, dtype=float)
    C = np.asarray(C, dtype=float)
    n = C.size
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = -K / C[:, None]
    M[:n, n:] = np.diag(1.0 / C)
    M *= h
    norm = float(np.abs(M).sum(axis=1).max())
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    M /= 2.0 ** squarings
    X = np.eye(2 * n)
    term = np.eye(2 * n)
    for k in range(1, MAX_TERMS):
        term = term @ M / k
        X += term
        if float(np.abs(term).max()) <= SERIES_TOL:
            break
    for _ in range(squarings):
        X = X @ X
    return np.ascontiguousarray(X[:n, :n]), np.ascontiguousarray(X[:n, n:])


def _relax_outdoor(T, i, to, g, C, h):
    T[i] = to + (T[i] - to) * math.exp(-g * h / C[i])


def _relax_pair(T, a, b, g, C, h):
    ca, cb = C[a], C[b]
    mean = (ca * T[a] + cb * T[b]) / (ca + cb)
    d = (T[a] - T[b]) * math.exp(-g * h * (1.0 / ca + 1.0 / cb))
    T[a] = mean + d * cb / (ca + cb)
    T[b] = mean - d * ca / (ca + cb)


def march(capacitance, volume, ua_outdoor, ua_ground, t_ground, crack_flow, conductance,
          window_zone, window_area, window_height,
          door_a, door_b, door_area, door_height,
          t_out, gains, occupied,
          vent, d1, d2, threshold, requires_occupancy, door_floor,
          warmup, t_init, dt, substeps,
          out_temp, out_ach, out_mod, out_start):
    """Hourly march over ``len(t_out)`` hours, preceded by ``warmup`` hours over
    the tail of the year. Each hour is split into ``substeps`` equal steps and
    openings are re-decided at the start of each. Fills ``out_temp`` with
    end-of-hour temperatures and ``out_ach``/``out_mod`` with hourly means
    (hours x zones), writes the state at the start of the first recorded hour
    to ``out_start`` and returns the number of opening decisions taken with
    outdoor air not colder than indoor (always 0 unless the rule is broken).

    ``vent`` 0 keeps windows closed and interior doors at ``door_floor``; 1 lets
    each zone's windows follow the modulation rule and doors take the larger
    of their two zones' signals, never below ``door_floor``.
    """
    n = capacitance.shape[0]
    hours = t_out.shape[0]
    T = np.full(n, float(t_init))
    base_diag = ua_outdoor + ua_ground + RHO_CP * crack_flow
    K = -conductance + np.diag(conductance.sum(axis=1) + base_diag)
    h = dt / substeps
    E, P = propagator(K, capacitance, h)
    frac = 1.0 / substeps
    nw, nd = window_zone.shape[0], door_a.shape[0]
    gw = np.zeros(nw)
    gd = np.zeros(nd)
    unsafe = 0
    for step in range(-warmup, hours):
        hr = step % hours
        if step == 0:
            out_start[:] = T
        to = t_out[hr]
        pb = P @ (gains[hr] + ua_ground * t_ground + (base_diag - ua_ground) * to)
        if step >= 0:
            out_ach[hr] = 0.0
            out_mod[hr] = 0.0
        for _ in range(substeps):
            sig = np.zeros(n)
            if vent:
                for i in range(n):
                    sig[i] = modulation(T[i], to, d1, d2, threshold, occupied[hr, i], requires_occupancy)
                    if sig[i] > 0.0 and not to < T[i]:
                        unsafe += 1
            flow_out = crack_flow.copy()
            for w in range(nw):
                i = window_zone[w]
                q = 0.0
                if sig[i] > 0.0:
                    q = stack_flow(sig[i] * window_area[w], window_height[w], abs(T[i] - to),
                                   0.5 * (T[i] + to))
                flow_out[i] += q
                gw[w] = RHO_CP * q
            for d in range(nd):
                a, bz = door_a[d], door_b[d]
                m = max(door_floor, sig[a], sig[bz])
                gd[d] = RHO_CP * stack_flow(m * door_area[d], door_height[d], abs(T[a] - T[bz]),
                                            0.5 * (T[a] + T[bz]))
            for w in range(nw):
                if gw[w] > 0.0:
                    _relax_outdoor(T, window_zone[w], to, gw[w], capacitance, 0.5 * h)
            for d in range(nd):
                _relax_pair(T, door_a[d], door_b[d], gd[d], capacitance, 0.5 * h)
            T = E @ T + pb
            for d in range(nd - 1, -1, -1):
                _relax_pair(T, door_a[d], door_b[d], gd[d], capacitance, 0.5 * h)
            for w in range(nw - 1, -1, -1):
                if gw[w] > 0.0:
                    _relax_outdoor(T, window_zone[w], to, gw[w], capacitance, 0.5 * h)
            if step >= 0:
                out_ach[hr] += flow_out * 3600.0 / volume
                out_mod[hr] += sig
        if step >= 0:
            out_temp[hr] = T
            out_ach[hr] *= frac
            out_mod[hr] = np.minimum(1.0, out_mod[hr] * frac)
    return unsafe
