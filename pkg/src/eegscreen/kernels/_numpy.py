"""Pure-numpy reference kernels.

Each function mirrors the arithmetic of its counterpart in ``_numba`` so the
two backends agree to the last bit on counting kernels and to rounding on
the iterative ones.
"""
import numpy as np

_BLOCK = 256


def pair_counts(points, times, radii, theiler):
    """Cumulative count of pairs ``i < j`` with ``|t_i - t_j| > theiler`` and distance <= r.

    Returns ``(counts, total)`` where ``counts[k]`` is the number of
    qualifying pairs with Euclidean distance at most ``radii[k]`` and
    ``total`` the number of qualifying pairs.
    """
    n, dim = points.shape
    nr = radii.shape[0]
    hist = np.zeros(nr + 1, dtype=np.int64)
    total = 0
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        # squared distance summed component by component, as the jit kernel does
        acc = np.zeros((stop - start, n))
        for d in range(dim):
            diff = points[start:stop, d][:, None] - points[None, :, d]
            acc += diff * diff
        dist = np.sqrt(acc)
        rows = np.arange(start, stop)[:, None]
        cols = np.arange(n)[None, :]
        mask = (cols > rows) & (np.abs(times[None, :] - times[start:stop, None]) > theiler)
        sel = dist[mask]
        total += sel.size
        idx = np.searchsorted(radii, sel, side="left")
        hist += np.bincount(idx, minlength=nr + 1)
    return np.cumsum(hist)[:nr], total


def lorenz_rk4(state, sigma, rho, beta, dt, n_out, transient):
    x, y, z = float(state[0]), float(state[1]), float(state[2])
    out = np.empty(n_out)
    h2 = dt / 2.0
    h6 = dt / 6.0
    for step in range(transient + n_out):
        k1x = sigma * (y - x)
        k1y = x * (rho - z) - y
        k1z = x * y - beta * z
        ax, ay, az = x + h2 * k1x, y + h2 * k1y, z + h2 * k1z
        k2x = sigma * (ay - ax)
        k2y = ax * (rho - az) - ay
        k2z = ax * ay - beta * az
        bx, by, bz = x + h2 * k2x, y + h2 * k2y, z + h2 * k2z
        k3x = sigma * (by - bx)
        k3y = bx * (rho - bz) - by
        k3z = bx * by - beta * bz
        cx, cy, cz = x + dt * k3x, y + dt * k3y, z + dt * k3z
        k4x = sigma * (cy - cx)
        k4y = cx * (rho - cz) - cy
        k4z = cx * cy - beta * cz
        x = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        z = z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        if step >= transient:
            out[step - transient] = x
    return out


def kalman_random_walk(z, q, r, x0, p0):
    """Scalar Kalman filter for ``s_k = s_{k-1} + w``, ``z_k = s_k + v``."""
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


def kalman_smooth(z, q, r, x0, p0):
    """Forward Kalman pass followed by the Rauch-Tung-Striebel backward pass."""
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


def smo_solve(kmat, y, c, tol, max_iter):
    """Dual soft-margin SVM by SMO with maximal-violating-pair selection.

    Returns ``(alpha, bias, iterations, converged)``.
    """
    n = y.shape[0]
    q = (y[:, None] * y[None, :]) * kmat
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    converged = False
    while it < max_iter:
        score = -y * grad
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        if score[i] - score[j] < tol:
            converged = True
            break
        ai_old = alpha[i]
        aj_old = alpha[j]
        ai, aj = _pair_update(q, grad, y, alpha[i], alpha[j], i, j, c)
        alpha[i] = ai
        alpha[j] = aj
        dai = ai - ai_old
        daj = aj - aj_old
        grad += q[:, i] * dai + q[:, j] * daj
        it += 1
    return alpha, _bias(alpha, grad, y, c), it, converged


def _pair_update(q, grad, y, ai, aj, i, j, c):
    tau = 1e-12
    if y[i] != y[j]:
        quad = q[i, i] + q[j, j] + 2.0 * q[i, j]
        if quad <= 0.0:
            quad = tau
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
            quad = tau
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
    return ai, aj


def _bias(alpha, grad, y, c):
    ub = np.inf
    lb = -np.inf
    free_sum = 0.0
    n_free = 0
    for t in range(y.shape[0]):
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
    rho = free_sum / n_free if n_free > 0 else (ub + lb) / 2.0
    return -rho
