"""Pure NumPy implementations of the hot kernels.

These are the fallback for environments where the compiled extension
(``selkit._kernels``) is not built.  The split search is written so that its
floating point result is bit-identical to the compiled version: prefix sums
come from ``np.cumsum`` (an in-order accumulation, matching the sequential
loop in C) and the per-position score uses the same expression.  The Newton
fits use vectorized reductions whose summation order differs from the C
loop, so optima agree only to roughly 1e-10; both backends satisfy the same
gradient-norm convergence contract.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"

# relative slack distinguishing a real gain from accumulated rounding noise
_GAIN_EPS = 1e-12


def best_split(X, orders, y, mask, feats, n_node, min_leaf):
    """Best squared-error split of one tree node over candidate features.

    ``X`` is the full n-by-p feature matrix, ``orders[j]`` the row indices
    sorted by feature j over the full sample, ``mask`` (uint8) the rows
    belonging to the node, and ``feats`` the candidate feature indices in
    ascending order.  Returns ``(found, feature, score, threshold)`` where
    ``score`` is the proxy objective ``s_L^2/n_L + s_R^2/n_R`` (maximizing
    it minimizes the split SSE).  A split must beat the parent score beyond
    rounding slack; ties keep the lowest feature index, then the lowest
    threshold.
    """
    keep = mask != 0
    ym = y[keep]
    if ym.shape[0] < 2:
        return False, -1, 0.0, 0.0
    total = float(np.cumsum(ym)[-1])
    parent = total * total / n_node
    limit = parent + _GAIN_EPS * (1.0 + abs(parent))
    best_score = -np.inf
    best_feat = -1
    best_thresh = 0.0
    k = np.arange(1, n_node, dtype=np.float64)
    for j in feats:
        order = orders[j]
        idx = order[keep[order]]
        xs = X[idx, j]
        cs = np.cumsum(y[idx])
        left = cs[:-1]
        score = left * left / k + (total - left) * (total - left) / (n_node - k)
        valid = (xs[1:] > xs[:-1]) & (k >= min_leaf) & ((n_node - k) >= min_leaf)
        if not valid.any():
            continue
        score = np.where(valid, score, -np.inf)
        t = int(np.argmax(score))
        if not np.isfinite(score[t]):
            continue
        a = float(xs[t])
        b = float(xs[t + 1])
        mid = 0.5 * (a + b)
        if mid >= b:  # midpoint rounded up onto the right value
            mid = a
        # re-score the winner with per-side sums in row-index order: features
        # that induce the same partition (either orientation) then tie
        # bitwise and the lowest feature index wins
        left_rows = keep & (X[:, j] <= mid)
        ys_left = y[left_rows]
        ys_right = y[keep & ~left_rows]
        nl = ys_left.shape[0]
        sl = float(np.cumsum(ys_left)[-1]) if nl else 0.0
        sr = float(np.cumsum(ys_right)[-1]) if ys_right.shape[0] else 0.0
        sc = sl * sl / nl + sr * sr / (n_node - nl)
        if sc > limit and sc > best_score:
            best_score = sc
            best_feat = int(j)
            best_thresh = mid
    if best_feat < 0:
        return False, -1, 0.0, 0.0
    return True, best_feat, best_score, best_thresh


def _cauchy_nll(z, mu, gamma):
    if gamma <= 0.0 or not math.isfinite(gamma) or not math.isfinite(mu):
        return math.inf
    d = z - mu
    m = z.shape[0]
    return m * math.log(math.pi) - m * math.log(gamma) + float(np.log(gamma * gamma + d * d).sum())


def _cauchy_derivs(z, mu, gamma):
    """Gradient and Hessian of the log-likelihood in (mu, log gamma)."""
    m = z.shape[0]
    d = z - mu
    w = 1.0 / (gamma * gamma + d * d)
    g1 = float((2.0 * d * w).sum())
    g2 = m - 2.0 * gamma * gamma * float(w.sum())
    ww = w * w
    h11 = float((2.0 * (d * d - gamma * gamma) * ww).sum())
    h12 = -4.0 * gamma * gamma * float((d * ww).sum())
    h22 = -4.0 * gamma * gamma * float((d * d * ww).sum())
    return g1, g2, h11, h12, h22


def cauchy_fit(z, mu0, gamma0, max_iter, tol):
    """Damped Newton ascent of the Cauchy log-likelihood in (mu, log gamma).

    Returns ``(mu, gamma, loglik, iterations, converged, grad_norm)``.
    Convergence means the gradient norm fell below ``tol``; a non-converged
    fit is still returned so the caller can inspect it.
    """
    z = np.asarray(z, dtype=np.float64)
    mu = float(mu0)
    gamma = float(gamma0)
    eta = math.log(gamma)
    f_cur = _cauchy_nll(z, mu, gamma)
    converged = False
    n_done = 0
    for _ in range(max_iter):
        g1, g2, h11, h12, h22 = _cauchy_derivs(z, mu, gamma)
        gn = math.sqrt(g1 * g1 + g2 * g2)
        if gn < tol:
            converged = True
            break
        det = h11 * h22 - h12 * h12
        if det > 0.0 and h11 < 0.0:
            dmu = -(h22 * g1 - h12 * g2) / det
            deta = -(h11 * g2 - h12 * g1) / det
        else:
            dmu = g1 / gn
            deta = g2 / gn
        t = 1.0
        accepted = False
        for _ in range(60):
            cmu = mu + t * dmu
            ceta = eta + t * deta
            cg = math.exp(ceta) if ceta < 700.0 else math.inf
            f_cand = _cauchy_nll(z, cmu, cg)
            # damp only on a real increase; near the optimum a good Newton
            # step can raise the computed value by a few ulps
            if f_cand <= f_cur + 8.881784197001252e-16 * (1.0 + abs(f_cur)):
                mu, eta, gamma, f_cur = cmu, ceta, cg, f_cand
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        n_done += 1
    if not converged:
        g1, g2, _, _, _ = _cauchy_derivs(z, mu, gamma)
        gn = math.sqrt(g1 * g1 + g2 * g2)
        converged = gn < tol
    return mu, gamma, -f_cur, n_done, converged, gn
