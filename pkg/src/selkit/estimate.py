"""Model-based (SEL level 3) estimators.

Cauchy location/scale fits for latent processes, recency-weighted Poisson
team strengths, the naive mean-goals strength, ordinary least squares and
two-stage least squares.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import backend
from .core import Process
from .errors import (
    ConvergenceError,
    DisconnectedScheduleError,
    EmptyInputError,
    FutureMatchError,
    NonFiniteValueError,
    RankDeficientError,
    TooShortError,
    UnknownTeamError,
)
from .extract import quantiles

_CAUCHY_MAX_ITER = 200
_CAUCHY_GRAD_TOL = 1e-8


@dataclass(frozen=True)
class CauchyFit:
    """Joint maximum-likelihood estimate of a Cauchy location and scale.

    ``gradient_norm`` is the norm of the log-likelihood gradient in
    (location, log scale) at the returned point; ``converged`` means it fell
    below 1e-8.
    """

    location: float
    scale: float
    log_likelihood: float
    iterations: int
    converged: bool
    gradient_norm: float


def _cauchy_init(arr: np.ndarray) -> tuple[float, float]:
    q25, q50, q75 = quantiles(arr, (0.25, 0.5, 0.75))
    gamma0 = 0.5 * (q75 - q25)  # half-IQR is consistent for the Cauchy scale
    if gamma0 <= 0.0:
        gamma0 = 1e-3
    return float(q50), float(gamma0)


def cauchy_mle(zs) -> CauchyFit:
    """Damped Newton fit of (location, scale), initialized at the sample
    median and half-interquartile range.

    A fit that exhausts its iteration budget is still returned, flagged
    ``converged=False``.
    """
    if isinstance(zs, Process):
        zs = zs.values
    arr = np.ascontiguousarray(zs, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 3:
        raise TooShortError("cauchy_mle needs at least three observations")
    if not np.isfinite(arr).all():
        raise NonFiniteValueError("process contains non-finite entries")
    mu0, gamma0 = _cauchy_init(arr)
    mu, gamma, ll, iters, converged, gn = backend.kernels.cauchy_fit(
        arr, mu0, gamma0, _CAUCHY_MAX_ITER, _CAUCHY_GRAD_TOL
    )
    return CauchyFit(mu, gamma, ll, iters, converged, gn)


def cauchy_mle_batch(z_matrix) -> list[CauchyFit]:
    """Row-wise :func:`cauchy_mle` over an (n, m) matrix of processes.

    Initial values come from one vectorized quantile pass, which dominates
    per-row Python overhead for large n.
    """
    Z = np.ascontiguousarray(z_matrix, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] < 3:
        raise TooShortError("processes need at least three observations each")
    if not np.isfinite(Z).all():
        raise NonFiniteValueError("process matrix contains non-finite entries")
    q = np.quantile(Z, (0.25, 0.5, 0.75), axis=1, method="linear")
    fit = backend.kernels.cauchy_fit
    out = []
    for i in range(Z.shape[0]):
        gamma0 = 0.5 * (q[2, i] - q[0, i])
        if gamma0 <= 0.0:
            gamma0 = 1e-3
        res = fit(Z[i], float(q[1, i]), float(gamma0), _CAUCHY_MAX_ITER, _CAUCHY_GRAD_TOL)
        out.append(CauchyFit(*res))
    return out


def empirical_mean_feature(zs) -> float:
    """Arithmetic mean of the full process (the descriptive-statistics
    stand-in for the location of a heavy-tailed process)."""
    if isinstance(zs, Process):
        zs = zs.values
    arr = np.asarray(zs, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("mean of an empty process")
    return float(arr.mean())


# --- team strengths ------------------------------------------------------------


@dataclass(frozen=True)
class MatchRecord:
    """One dated result between two distinct teams."""

    date: dt.date
    home_team: str
    away_team: str
    home_goals: int
    away_goals: int

    def __post_init__(self):
        if self.home_team == self.away_team:
            raise ValueError("home and away team must differ")
        if self.home_goals < 0 or self.away_goals < 0:
            raise ValueError("goals must be non-negative")


@dataclass(frozen=True)
class StrengthTable:
    """Fitted per-team strengths of the log-linear Poisson goals model
    log(rate) = intercept + (r_scorer - r_opponent) + home_effect * at_home,
    with the strengths centered to sum to zero."""

    strengths: Mapping[str, float]
    intercept: float
    home_effect: float
    reference_date: dt.date
    half_life_days: float


def recency_weight(match_date: dt.date, reference_date: dt.date, half_life_days: float) -> float:
    """Exponential decay by age: weight halves every ``half_life_days``."""
    if half_life_days <= 0:
        raise ValueError("half_life_days must be positive")
    delta = (reference_date - match_date).days
    if delta < 0:
        raise FutureMatchError(f"match on {match_date} is after reference {reference_date}")
    return 0.5 ** (delta / half_life_days)


def _check_connected(matches: Sequence[MatchRecord], teams: list[str]) -> None:
    index = {t: i for i, t in enumerate(teams)}
    parent = list(range(len(teams)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for match in matches:
        ra, rb = find(index[match.home_team]), find(index[match.away_team])
        if ra != rb:
            parent[ra] = rb
    roots = {find(i) for i in range(len(teams))}
    if len(roots) > 1:
        raise DisconnectedScheduleError(
            f"schedule splits into {len(roots)} groups with no cross-matches"
        )


def fit_strengths(
    matches: Sequence[MatchRecord],
    reference_date: dt.date | None = None,
    half_life_days: float = 500.0,
) -> StrengthTable:
    """Recency-weighted Poisson regression of goals on team contrasts.

    Each match contributes two observations: the home team's goals with
    linear predictor ``b0 + (r_home - r_away) + h`` and the away team's with
    ``b0 + (r_away - r_home)``.  Fitting is iteratively reweighted least
    squares (Newton for the log link); the strengths are re-centered to sum
    to zero after every iteration, which fixes the one flat direction of the
    design without changing any predicted rate.
    """
    if not matches:
        raise EmptyInputError("no matches supplied")
    if reference_date is None:
        reference_date = max(m.date for m in matches)
    teams = sorted({t for m in matches for t in (m.home_team, m.away_team)})
    if len(teams) < 2:
        raise ValueError("need at least two teams")
    _check_connected(matches, teams)
    index = {t: i for i, t in enumerate(teams)}

    n_obs = 2 * len(matches)
    n_teams = len(teams)
    X = np.zeros((n_obs, 2 + n_teams), dtype=np.float64)
    y = np.empty(n_obs, dtype=np.float64)
    w = np.empty(n_obs, dtype=np.float64)
    for k, match in enumerate(matches):
        weight = recency_weight(match.date, reference_date, half_life_days)
        hi, ai = index[match.home_team], index[match.away_team]
        r = 2 * k
        X[r, 0] = 1.0
        X[r, 1] = 1.0
        X[r, 2 + hi] = 1.0
        X[r, 2 + ai] = -1.0
        y[r] = match.home_goals
        w[r] = weight
        X[r + 1, 0] = 1.0
        X[r + 1, 2 + ai] = 1.0
        X[r + 1, 2 + hi] = -1.0
        y[r + 1] = match.away_goals
        w[r + 1] = weight

    beta = np.zeros(2 + n_teams, dtype=np.float64)
    mean_rate = float((w * y).sum() / w.sum())
    beta[0] = math.log(max(mean_rate, 1e-8))
    for _ in range(100):
        eta = np.clip(X @ beta, -30.0, 30.0)
        lam = np.exp(eta)
        irls_w = w * lam
        z = eta + (y - lam) / lam
        sw = np.sqrt(irls_w)
        new_beta, *_ = np.linalg.lstsq(X * sw[:, None], z * sw, rcond=None)
        new_beta[2:] -= new_beta[2:].mean()  # sum-to-zero strengths
        change = float(np.max(np.abs(new_beta - beta)))
        beta = new_beta
        if change < 1e-8:
            break
    else:
        raise ConvergenceError("strength fit did not converge in 100 iterations")

    strengths = {team: float(beta[2 + i]) for i, team in enumerate(teams)}
    return StrengthTable(strengths, float(beta[0]), float(beta[1]), reference_date, half_life_days)


def strength_score_norm(table: StrengthTable, matches: Sequence[MatchRecord]) -> float:
    """Norm of the weighted Poisson score equations at a fitted table
    (diagnostic; ~0 at the optimum)."""
    teams = sorted(table.strengths)
    index = {t: i for i, t in enumerate(teams)}
    score = np.zeros(2 + len(teams), dtype=np.float64)
    for match in matches:
        weight = recency_weight(match.date, table.reference_date, table.half_life_days)
        hi, ai = index[match.home_team], index[match.away_team]
        r_home, r_away = table.strengths[match.home_team], table.strengths[match.away_team]
        lam_h = math.exp(table.intercept + (r_home - r_away) + table.home_effect)
        lam_a = math.exp(table.intercept + (r_away - r_home))
        resid_h = weight * (match.home_goals - lam_h)
        resid_a = weight * (match.away_goals - lam_a)
        score[0] += resid_h + resid_a
        score[1] += resid_h
        score[2 + hi] += resid_h - resid_a
        score[2 + ai] += resid_a - resid_h
    return float(np.linalg.norm(score))


def mean_goals_strength(matches: Sequence[MatchRecord], team: str) -> float:
    """Average goals scored by one team across all its matches."""
    goals = [
        m.home_goals if m.home_team == team else m.away_goals
        for m in matches
        if team in (m.home_team, m.away_team)
    ]
    if not goals:
        raise UnknownTeamError(f"team {team!r} appears in no match")
    return float(np.mean(goals))


# --- linear regression ----------------------------------------------------------


@dataclass(frozen=True)
class LinearFit:
    """Least-squares coefficients (intercept first) and the unbiased
    residual variance RSS / (n - p - 1)."""

    coefficients: np.ndarray
    residual_variance: float

    def predict(self, X) -> np.ndarray:
        A = _with_intercept(np.asarray(X, dtype=np.float64))
        return A @ self.coefficients


def _with_intercept(X: np.ndarray) -> np.ndarray:
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(X.shape[0]), X])


def ols(X, y) -> LinearFit:
    """Ordinary least squares with an implicit intercept column, solved by
    QR; rank deficiency is detected from the R diagonal."""
    A = _with_intercept(np.asarray(X, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64)
    n, p1 = A.shape
    if n <= p1:
        raise RankDeficientError(f"need more than {p1} rows, have {n}")
    Q, R = np.linalg.qr(A)
    diag = np.abs(np.diag(R))
    if diag.min() <= diag.max() * n * np.finfo(np.float64).eps:
        raise RankDeficientError("design matrix is rank deficient")
    coef = np.linalg.solve(R, Q.T @ yv)
    resid = yv - A @ coef
    rss = float(resid @ resid)
    return LinearFit(coef, rss / (n - p1))


def two_stage_least_squares(y, X, Z, W) -> LinearFit:
    """Instrumented regression: regress Z on W, then y on [X, fitted Z].

    The fitted-Z coefficient is the last entry of the returned coefficient
    vector.
    """
    first = ols(W, Z)
    z_hat = first.predict(W)
    X2 = np.asarray(X, dtype=np.float64)
    if X2.ndim == 1:
        X2 = X2[:, None]
    return ols(np.column_stack([X2, z_hat]), y)
