# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: CART split search and Cauchy Newton fits.

Kept in lockstep with the NumPy fallback in ``selkit._kernels_py``.  The
split search must produce bit-identical results to the fallback (sequential
prefix sums, same score expression, first strict maximum wins); the Newton
fit follows the identical control flow but sums in loop order, so optima
agree with the fallback to ~1e-10 rather than exactly.
"""

from libc.math cimport exp, fabs, log, sqrt, isfinite, INFINITY, M_PI

NAME = "native"

cdef double _GAIN_EPS = 1e-12


def best_split(const double[::1, :] X, const long long[:, ::1] orders, const double[:] y,
               const unsigned char[::1] mask, const long long[::1] feats,
               long long n_node, long long min_leaf):
    """Best squared-error split of one tree node over candidate features.

    See ``selkit._kernels_py.best_split`` for the contract.
    """
    cdef Py_ssize_t n = mask.shape[0]
    cdef Py_ssize_t n_feats = feats.shape[0]
    cdef Py_ssize_t i, fi
    cdef long long j, r, k, nl
    cdef double total = 0.0
    cdef double parent, limit, s, v, prev, score, mid, sl, sr
    cdef double feat_best, feat_thresh
    cdef bint feat_found
    cdef double best_score = -INFINITY
    cdef double best_thresh = 0.0
    cdef long long best_feat = -1

    with nogil:
        for i in range(n):
            if mask[i]:
                total += y[i]
        parent = total * total / n_node
        limit = parent + _GAIN_EPS * (1.0 + fabs(parent))
        for fi in range(n_feats):
            j = feats[fi]
            s = 0.0
            k = 0
            prev = 0.0
            feat_best = -INFINITY
            feat_thresh = 0.0
            feat_found = False
            for i in range(n):
                r = orders[j, i]
                if not mask[r]:
                    continue
                v = X[r, j]
                if k > 0 and v > prev and k >= min_leaf and (n_node - k) >= min_leaf:
                    score = s * s / k + (total - s) * (total - s) / (n_node - k)
                    if score > feat_best:
                        mid = 0.5 * (prev + v)
                        if mid >= v:  # midpoint rounded up onto the right value
                            mid = prev
                        feat_best = score
                        feat_thresh = mid
                        feat_found = True
                s += y[r]
                k += 1
                prev = v
            if not feat_found:
                continue
            # re-score the winner with per-side sums in row-index order:
            # features that induce the same partition (either orientation)
            # then tie bitwise and the lowest feature index wins
            sl = 0.0
            sr = 0.0
            nl = 0
            for i in range(n):
                if mask[i]:
                    if X[i, j] <= feat_thresh:
                        sl += y[i]
                        nl += 1
                    else:
                        sr += y[i]
            score = sl * sl / nl + sr * sr / (n_node - nl)
            if score > limit and score > best_score:
                best_score = score
                best_feat = j
                best_thresh = feat_thresh

    if best_feat < 0:
        return False, -1, 0.0, 0.0
    return True, int(best_feat), best_score, best_thresh


cdef double _cauchy_nll(const double[::1] z, double mu, double gamma) noexcept nogil:
    cdef Py_ssize_t m = z.shape[0]
    cdef Py_ssize_t i
    cdef double s = 0.0
    cdef double d
    if gamma <= 0.0 or not isfinite(gamma) or not isfinite(mu):
        return INFINITY
    for i in range(m):
        d = z[i] - mu
        s += log(gamma * gamma + d * d)
    return m * log(M_PI) - m * log(gamma) + s


cdef void _cauchy_derivs(const double[::1] z, double mu, double gamma, double* out) noexcept nogil:
    """out = (g_mu, g_eta, h11, h12, h22) of the log-likelihood in (mu, log gamma)."""
    cdef Py_ssize_t m = z.shape[0]
    cdef Py_ssize_t i
    cdef double d, w, ww
    cdef double g1 = 0.0, sw = 0.0, h11 = 0.0, sb = 0.0, sc = 0.0
    cdef double g2 = gamma * gamma
    for i in range(m):
        d = z[i] - mu
        w = 1.0 / (g2 + d * d)
        ww = w * w
        g1 += 2.0 * d * w
        sw += w
        h11 += 2.0 * (d * d - g2) * ww
        sb += d * ww
        sc += d * d * ww
    out[0] = g1
    out[1] = m - 2.0 * g2 * sw
    out[2] = h11
    out[3] = -4.0 * g2 * sb
    out[4] = -4.0 * g2 * sc


def cauchy_fit(const double[::1] z, double mu0, double gamma0, int max_iter, double tol):
    """Damped Newton ascent of the Cauchy log-likelihood in (mu, log gamma).

    Returns ``(mu, gamma, loglik, iterations, converged, grad_norm)``.
    """
    cdef double mu = mu0
    cdef double gamma = gamma0
    cdef double eta = log(gamma0)
    cdef double f_cur, g1, g2, h11, h12, h22, gn, det, dmu, deta
    cdef double t, cmu, ceta, cg, f_cand
    cdef double derivs[5]
    cdef bint converged = False
    cdef bint accepted
    cdef int n_done = 0
    cdef int it, halves

    with nogil:
        f_cur = _cauchy_nll(z, mu, gamma)
        for it in range(max_iter):
            _cauchy_derivs(z, mu, gamma, derivs)
            g1 = derivs[0]
            g2 = derivs[1]
            h11 = derivs[2]
            h12 = derivs[3]
            h22 = derivs[4]
            gn = sqrt(g1 * g1 + g2 * g2)
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
            for halves in range(60):
                cmu = mu + t * dmu
                ceta = eta + t * deta
                cg = exp(ceta) if ceta < 700.0 else INFINITY
                f_cand = _cauchy_nll(z, cmu, cg)
                # damp only on a real increase; near the optimum a good Newton
                # step can raise the computed value by a few ulps
                if f_cand <= f_cur + 8.881784197001252e-16 * (1.0 + fabs(f_cur)):
                    mu = cmu
                    eta = ceta
                    gamma = cg
                    f_cur = f_cand
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
            n_done += 1
        if not converged:
            _cauchy_derivs(z, mu, gamma, derivs)
            gn = sqrt(derivs[0] * derivs[0] + derivs[1] * derivs[1])
            converged = gn < tol
    return mu, gamma, -f_cur, n_done, converged, gn
