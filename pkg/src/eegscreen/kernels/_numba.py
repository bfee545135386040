"""numba-compiled kernels; same signatures and arithmetic as ``_numpy``."""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def pair_counts(points, times, radii, theiler):
    n, dim = points.shape
    nr = radii.shape[0]
    hist = np.zeros(nr + 1, dtype=np.int64)
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            if abs(times[j] - times[i]) <= theiler:
                continue
            acc = 0.0
            for d in range(dim):
                diff = points[i, d] - points[j, d]
                acc += diff * diff
            dist = math.sqrt(acc)
            # first radius >= dist
            lo = 0
            hi = nr
            while lo < hi:
                mid = (lo + hi) // 2
                if radii[mid] < dist:
                    lo = mid + 1
                else:
                    hi = mid
            hist[lo] += 1
            total += 1
    return np.cumsum(hist)[:nr], total


@njit(cache=True)
def lorenz_rk4(state, sigma, rho, beta, dt, n_out, transient):
    x = state[0]
    y = state[1]
    z = state[2]
    out = np.empty(n_out)
    h2 = dt / 2.0
    h6 = dt / 6.0
    for step in range(transient + n_out):
        k1x = sigma * (y - x)
        k1y = x * (rho - z) - y
        k1z = x * y - beta * z
        ax = x + h2 * k1x
        ay = y + h2 * k1y
        az = z + h2 * k1z
        k2x = sigma * (ay - ax)
        k2y = ax * (rho - az) - ay
        k2z = ax * ay - beta * az
        bx = x + h2 * k2x
        by = y + h2 * k2y
        bz = z + h2 * k2z
        k3x = sigma * (by - bx)
        k3y = bx * (rho - bz) - by
        k3z = bx * by - beta * bz
        cx = x + dt * k3x
        cy = y + dt * k3y
        cz = z + dt * k3z
        k4x = sigma * (cy - cx)
        k4y = cx * (rho - cz) - cy
        k4z = cx * cy - beta * cz
        x = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        z = z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        if step >= transient:
            out[step - transient] = x
    return out


@njit(cache=True)
def kalman_random_walk(z, q, r, x0, p0):
    n = z.shape[0]
    est = np.empty(n)
    x = x0
    p = p0
    for k in range(n):
        p = p + q
        gain = p / (p + r)
        x = x + gain * (z[k] - x)
        p = (1.0 - gain) * p
        est[k] = x
    return est


@njit(cache=True)
def kalman_smooth(z, q, r, x0, p0):
    n = z.shape[0]
    xf = np.empty(n)
    pf = np.empty(n)
    x = x0
    p = p0
    for k in range(n):
        p = p + q
        gain = p / (p + r)
        x = x + gain * (z[k] - x)
        p = (1.0 - gain) * p
        xf[k] = x
        pf[k] = p
    xs = xf.copy()
    for k in range(n - 2, -1, -1):
        g = pf[k] / (pf[k] + q)
        xs[k] = xf[k] + g * (xs[k + 1] - xf[k])
    return xs


@njit(cache=True)
def smo_solve(kmat, y, c, tol, max_iter):
    n = y.shape[0]
    q = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            q[a, b] = (y[a] * y[b]) * kmat[a, b]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    converged = False
    while it < max_iter:
        i = -1
        j = -1
        gmax = -np.inf
        gmin = np.inf
        for t in range(n):
            s = -y[t] * grad[t]
            if (y[t] > 0 and alpha[t] < c) or (y[t] < 0 and alpha[t] > 0):
                if s > gmax:
                    gmax = s
                    i = t
            if (y[t] < 0 and alpha[t] < c) or (y[t] > 0 and alpha[t] > 0):
                if s < gmin:
                    gmin = s
                    j = t
        if i < 0 or j < 0 or gmax - gmin < tol:
            converged = True
            break
        ai_old = alpha[i]
        aj_old = alpha[j]
        ai = ai_old
        aj = aj_old
        if y[i] != y[j]:
            quad = q[i, i] + q[j, j] + 2.0 * q[i, j]
            if quad <= 0.0:
                quad = 1e-12
            delta = (-grad[i] - grad[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0.0:
                if aj < 0.0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = -diff
            if diff > 0.0:
                if ai > c:
                    ai = c
                    aj = c - diff
            else:
                if aj > c:
                    aj = c
                    ai = c + diff
        else:
            quad = q[i, i] + q[j, j] - 2.0 * q[i, j]
            if quad <= 0.0:
                quad = 1e-12
            delta = (grad[i] - grad[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > c:
                if ai > c:
                    ai = c
                    aj = total - c
            else:
                if aj < 0.0:
                    aj = 0.0
                    ai = total
            if total > c:
                if aj > c:
                    aj = c
                    ai = total - c
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = total
        alpha[i] = ai
        alpha[j] = aj
        dai = ai - ai_old
        daj = aj - aj_old
        for t in range(n):
            grad[t] += q[t, i] * dai + q[t, j] * daj
        it += 1

    ub = np.inf
    lb = -np.inf
    free_sum = 0.0
    n_free = 0
    for t in range(n):
        yg = y[t] * grad[t]
        if alpha[t] >= c:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0.0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            n_free += 1
            free_sum += yg
    if n_free > 0:
        rho = free_sum / n_free
    else:
        rho = (ub + lb) / 2.0
    return alpha, -rho, it, converged
