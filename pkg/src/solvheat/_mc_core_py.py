"""NumPy implementation of the Monte Carlo hot loops.

Chunk-level kernels shared with the compiled backend: both consume
pre-drawn standard normals (so the random stream is backend-independent)
and return per-path quantities; all statistics happen in the caller.
"""

from __future__ import annotations

import numpy as np

from ._regimes import g_pair

BACKEND_NAME = "python"


def bridge_covariances(noise, t, target, beta, code, p1, p2, quadrature="trapezoid"):
    """Covariance entries of every bridge path in a chunk.

    noise : (n_paths, n_steps) standard normals
    Returns (S11, S12, S22), each (n_paths,): the quadrature of the
    integrand entries g g^T along the bridge from 0 to ``target``.
    """
    noise = np.asarray(noise, dtype=float)
    n_paths, n_steps = noise.shape
    h = t / n_steps
    s = np.linspace(0.0, t, n_steps + 1)

    b = np.empty((n_paths, n_steps + 1))
    b[:, 0] = 0.0
    np.cumsum(noise, axis=1, out=b[:, 1:])
    b[:, 1:] *= np.sqrt(h)
    # pin the endpoint: B(s) <- B(s) + (s/t) (target - B(t))
    b += (s / t)[None, :] * (target - b[:, -1])[:, None]

    u = b - beta * s[None, :]
    if quadrature == "trapezoid":
        g1, g2 = g_pair(u, code, p1, p2)
        w = np.full(n_steps + 1, h)
        w[0] = w[-1] = h / 2.0
        s11 = (g1 * g1) @ w
        s12 = (g1 * g2) @ w
        s22 = (g2 * g2) @ w
    elif quadrature == "midpoint":
        um = 0.5 * (u[:, :-1] + u[:, 1:])
        g1, g2 = g_pair(um, code, p1, p2)
        s11 = h * np.sum(g1 * g1, axis=1)
        s12 = h * np.sum(g1 * g2, axis=1)
        s22 = h * np.sum(g2 * g2, axis=1)
    else:
        raise ValueError(f"unknown quadrature {quadrature!r}")
    return s11, s12, s22


def cn_evolve(u0, diag, c_sub, c_sup, schedule):
    """Crank-Nicolson evolution of every row of u0 (layout (m, n_theta+1)).

    Mirrors the compiled kernel: ``diag`` holds the spatial operator's
    diagonal on the interior nodes, sub/super entries are constants,
    Dirichlet ends.  Thomas factors are precomputed once per step size;
    the sweeps vectorize over the m systems.
    """
    u = np.array(u0, dtype=float).T.copy()  # (n+1, m)
    dg = np.asarray(diag, dtype=float).T  # (nn, m)
    nn = dg.shape[0]
    for dt, count in schedule:
        a = -0.5 * dt * c_sub
        c = -0.5 * dt * c_sup
        ap = 0.5 * dt * c_sub
        cp_sup = 0.5 * dt * c_sup
        b = 1.0 - 0.5 * dt * dg
        bp = 1.0 + 0.5 * dt * dg
        inv = np.empty_like(b)
        cp = np.empty_like(b)
        inv[0] = 1.0 / b[0]
        cp[0] = c * inv[0]
        for i in range(1, nn):
            inv[i] = 1.0 / (b[i] - a * cp[i - 1])
            cp[i] = c * inv[i]
        for _ in range(count):
            rhs = bp * u[1:-1]
            rhs += ap * u[:-2]
            rhs += cp_sup * u[2:]
            d = np.empty_like(rhs)
            d[0] = rhs[0] * inv[0]
            for i in range(1, nn):
                d[i] = (rhs[i] - a * d[i - 1]) * inv[i]
            w = np.empty_like(rhs)
            w[-1] = d[-1]
            for i in range(nn - 2, -1, -1):
                w[i] = d[i] - cp[i] * w[i + 1]
            u[1:-1] = w
    return np.ascontiguousarray(u.T)


def sde_endpoints(noise_b, noise_w, t, beta, code, p1, p2):
    """Euler-Maruyama endpoints (theta, vx, vy) for a chunk of paths.

    The stochastic integral uses left endpoints: v = sum_j g(u_j) dW_j.
    """
    noise_b = np.asarray(noise_b, dtype=float)
    noise_w = np.asarray(noise_w, dtype=float)
    n_paths, n_steps = noise_b.shape
    h = t / n_steps
    sq = np.sqrt(h)
    s = np.linspace(0.0, t, n_steps + 1)

    b = np.empty((n_paths, n_steps + 1))
    b[:, 0] = 0.0
    np.cumsum(noise_b, axis=1, out=b[:, 1:])
    b[:, 1:] *= sq

    u_left = b[:, :-1] - beta * s[None, :-1]
    g1, g2 = g_pair(u_left, code, p1, p2)
    dw = sq * noise_w
    theta = b[:, -1] - beta * t
    vx = np.sum(g1 * dw, axis=1)
    vy = np.sum(g2 * dw, axis=1)
    return theta, vx, vy
