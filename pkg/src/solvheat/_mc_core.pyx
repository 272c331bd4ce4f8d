# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Monte Carlo and Crank-Nicolson hot loops.

Same contracts as solvheat._mc_core_py: callers pre-draw all randomness,
so the two backends consume identical streams and differ only in
floating-point accumulation order.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, exp, sin, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline void _g_eval(int code, double p1, double p2, double amp, double theta0,
                         double u, double* g1, double* g2) noexcept nogil:
    cdef double e, ph
    if code == 0:
        g1[0] = u
        g2[0] = 1.0
    elif code == 1:
        g1[0] = exp(p1 * u)
        g2[0] = 1.0
    elif code == 2:
        g1[0] = -p1 * exp(p1 * u)
        g2[0] = p2 * exp(p2 * u)
    elif code == 3:
        e = exp(p1 * u)
        ph = p2 * u - theta0
        g1[0] = -amp * e * cos(ph)
        g2[0] = -amp * e * sin(ph)
    else:
        e = exp(p1 * u)
        g1[0] = e * (p1 - 1.0 - p1 * u)
        g2[0] = -p1 * e


def bridge_covariances(noise, double t, double target, double beta,
                       int code, double p1, double p2, quadrature="trapezoid"):
    """Per-path covariance entries (S11, S12, S22) of bridge paths."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] z = np.ascontiguousarray(noise, dtype=np.float64)
    cdef Py_ssize_t n_paths = z.shape[0]
    cdef Py_ssize_t n_steps = z.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s11 = np.empty(n_paths)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s12 = np.empty(n_paths)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s22 = np.empty(n_paths)
    cdef double[:, ::1] zv = z
    cdef double[::1] a11 = s11, a12 = s12, a22 = s22
    cdef bint midpoint = quadrature == "midpoint"
    if not midpoint and quadrature != "trapezoid":
        raise ValueError(f"unknown quadrature {quadrature!r}")

    cdef double h = t / n_steps
    cdef double sq = sqrt(h)
    cdef double amp = sqrt(p1 * p1 + p2 * p2)
    cdef double theta0 = atan2(p1, p2)
    cdef Py_ssize_t p, j
    cdef double w_end, wj, bj, wn, corr, u, uprev, g1, g2, t11, t12, t22, frac

    with nogil:
        for p in range(n_paths):
            wn = 0.0
            for j in range(n_steps):
                wn += zv[p, j]
            wn *= sq
            corr = target - wn
            t11 = t12 = t22 = 0.0
            bj = 0.0
            uprev = 0.0  # u at s_0 = 0 (B(0) = 0)
            if midpoint:
                for j in range(1, n_steps + 1):
                    bj += zv[p, j - 1]
                    frac = <double> j / <double> n_steps
                    u = sq * bj + frac * corr - beta * (frac * t)
                    _g_eval(code, p1, p2, amp, theta0, 0.5 * (uprev + u), &g1, &g2)
                    t11 += h * g1 * g1
                    t12 += h * g1 * g2
                    t22 += h * g2 * g2
                    uprev = u
            else:
                _g_eval(code, p1, p2, amp, theta0, 0.0, &g1, &g2)
                w_end = 0.5 * h
                t11 = w_end * g1 * g1
                t12 = w_end * g1 * g2
                t22 = w_end * g2 * g2
                for j in range(1, n_steps + 1):
                    bj += zv[p, j - 1]
                    frac = <double> j / <double> n_steps
                    u = sq * bj + frac * corr - beta * (frac * t)
                    _g_eval(code, p1, p2, amp, theta0, u, &g1, &g2)
                    wj = w_end if j == n_steps else h
                    t11 += wj * g1 * g1
                    t12 += wj * g1 * g2
                    t22 += wj * g2 * g2
            a11[p] = t11
            a12[p] = t12
            a22[p] = t22
    return s11, s12, s22


def sde_endpoints(noise_b, noise_w, double t, double beta,
                  int code, double p1, double p2):
    """Euler-Maruyama endpoints (theta, vx, vy); left-endpoint integrals."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] zb = np.ascontiguousarray(noise_b, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] zw = np.ascontiguousarray(noise_w, dtype=np.float64)
    cdef Py_ssize_t n_paths = zb.shape[0]
    cdef Py_ssize_t n_steps = zb.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] theta = np.empty(n_paths)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vx = np.empty(n_paths)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vy = np.empty(n_paths)
    cdef double[:, ::1] bv = zb, wv = zw
    cdef double[::1] tv = theta, xv = vx, yv = vy
    cdef double h = t / n_steps
    cdef double sq = sqrt(h)
    cdef double amp = sqrt(p1 * p1 + p2 * p2)
    cdef double theta0 = atan2(p1, p2)
    cdef Py_ssize_t p, j
    cdef double bj, u, g1, g2, ax, ay, dw

    with nogil:
        for p in range(n_paths):
            bj = 0.0
            ax = ay = 0.0
            for j in range(n_steps):
                u = sq * bj - beta * (h * j)
                _g_eval(code, p1, p2, amp, theta0, u, &g1, &g2)
                dw = sq * wv[p, j]
                ax += g1 * dw
                ay += g2 * dw
                bj += bv[p, j]
            tv[p] = sq * bj - beta * t
            xv[p] = ax
            yv[p] = ay
    return theta, vx, vy


def cn_evolve(u0, diag, double c_sub, double c_sup, schedule):
    """Crank-Nicolson evolution of every row of u0 (layout (m, n_theta+1)).

    ``diag`` (m, n_theta-1) holds the spatial operator's diagonal
    (including the potential); sub/super entries are the constants c_sub,
    c_sup.  ``schedule`` is a list of (dt, count) pairs.  Dirichlet ends.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] u = np.ascontiguousarray(u0, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] dg = np.ascontiguousarray(diag, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t nn = dg.shape[1]  # interior size n_theta - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] inv = np.empty((m, nn))
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] cp = np.empty((m, nn))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rhs = np.empty(nn)
    cdef double[:, ::1] uv = u, dv = dg, iv = inv, cv = cp
    cdef double[::1] rv = rhs
    cdef double dt, a, c, apl, cpl, bi, prev
    cdef Py_ssize_t j, i, count, step

    for dt_py, count_py in schedule:
        dt = dt_py
        count = count_py
        a = -0.5 * dt * c_sub
        c = -0.5 * dt * c_sup
        apl = 0.5 * dt * c_sub
        cpl = 0.5 * dt * c_sup
        with nogil:
            for j in range(m):
                prev = 1.0 / (1.0 - 0.5 * dt * dv[j, 0])
                iv[j, 0] = prev
                cv[j, 0] = c * prev
                for i in range(1, nn):
                    bi = 1.0 - 0.5 * dt * dv[j, i]
                    prev = 1.0 / (bi - a * cv[j, i - 1])
                    iv[j, i] = prev
                    cv[j, i] = c * prev
            for step in range(count):
                for j in range(m):
                    for i in range(nn):
                        rv[i] = (
                            apl * uv[j, i]
                            + (1.0 + 0.5 * dt * dv[j, i]) * uv[j, i + 1]
                            + cpl * uv[j, i + 2]
                        )
                    prev = rv[0] * iv[j, 0]
                    rv[0] = prev
                    for i in range(1, nn):
                        prev = (rv[i] - a * prev) * iv[j, i]
                        rv[i] = prev
                    uv[j, nn] = rv[nn - 1]
                    for i in range(nn - 2, -1, -1):
                        rv[i] = rv[i] - cv[j, i] * rv[i + 1]
                        uv[j, i + 1] = rv[i]
    return u
