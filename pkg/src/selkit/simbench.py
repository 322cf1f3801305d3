"""Monte Carlo harness comparing learners with and without SEL covariates.

Each replication draws a regression problem whose target depends on the
squared location of a latent heavy-tailed (Cauchy) process that the models
never observe directly.  Three boosted-tree models compete on identical
train/test rows: a baseline seeing only the observed covariates, one with
the process sample mean appended (descriptive, level 2), and one with the
maximum-likelihood location estimate appended (estimated, level 3).  The
report aggregates per-replication relative RMSE (base 100 versus the
baseline) with empirical 5th/95th percentile bands.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Column, Dataset, SelLevel, SplitSpec, split
from .estimate import cauchy_mle_batch
from .extract import quantiles
from .learn import fit_gbt, predict, rmse
from .rng import RngStream

BASELINE = "baseline"
SEL_MOMENTS = "sel_moments"
SEL_MLE = "sel_mle"
MODELS = (BASELINE, SEL_MOMENTS, SEL_MLE)


@dataclass(frozen=True)
class GbtConfig:
    n_trees: int = 200
    max_depth: int = 3
    learning_rate: float = 0.1
    min_leaf: int = 5


@dataclass(frozen=True)
class SimConfig:
    """Study design: sample size, process length, covariate counts, and the
    coefficient ranges redrawn for every replication."""

    n: int = 1500
    m: int = 400
    p_values: tuple[int, ...] = (2, 5, 10, 20, 30)
    reps: int = 200
    master_seed: int = 42
    beta_range: tuple[float, float] = (-2.0, 5.0)
    beta_mu_range: tuple[float, float] = (1.0, 5.0)
    cauchy_scale: float = 1.0
    train_fraction: float = 0.7
    gbt: GbtConfig = field(default_factory=GbtConfig)

    def __post_init__(self):
        if self.n < 10 or self.m < 10 or self.reps < 1:
            raise ValueError("need n >= 10, m >= 10, reps >= 1")
        if not self.p_values or any(p < 1 for p in self.p_values):
            raise ValueError("p_values must be positive")
        if self.beta_range[0] > self.beta_range[1]:
            raise ValueError("beta_range must be ordered")
        if self.beta_mu_range[0] > self.beta_mu_range[1]:
            raise ValueError("beta_mu_range must be ordered")
        if self.cauchy_scale <= 0:
            raise ValueError("cauchy_scale must be positive")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class SimInstance:
    """One simulated problem; ``processes`` holds the latent sequences as an
    (n, m) matrix, row i belonging to individual i."""

    X: np.ndarray
    processes: np.ndarray
    mu_true: np.ndarray
    beta: np.ndarray
    beta_mu: float
    epsilon: np.ndarray
    y: np.ndarray


def generate_instance(cfg: SimConfig, p: int, rng: RngStream) -> SimInstance:
    """Draw one replication from a single stream.

    Draw order (fixed so results are reproducible): slope coefficients, the
    squared-location coefficient, the latent locations, the observed
    covariate matrix (row major), the standard-Cauchy process noise, then
    the target noise.  The target is ``X @ beta + beta_mu * mu^2 + eps``.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    lo, hi = cfg.beta_range
    beta = lo + (hi - lo) * rng.random(p)
    mlo, mhi = cfg.beta_mu_range
    beta_mu = float(mlo + (mhi - mlo) * rng.random(1)[0])
    mu = rng.normal(cfg.n)
    X = rng.normal(cfg.n * p).reshape(cfg.n, p)
    Z = mu[:, None] + cfg.cauchy_scale * rng.cauchy(cfg.n * cfg.m).reshape(cfg.n, cfg.m)
    eps = rng.normal(cfg.n)
    y = X @ beta + beta_mu * mu * mu + eps
    return SimInstance(X, Z, mu, beta, beta_mu, eps, y)


def fixture_p10() -> tuple[int, np.ndarray, float]:
    """The fixed ten-covariate coefficient set used for the importance and
    partial-dependence demonstrations: (p, slopes, squared-location
    coefficient)."""
    beta = np.array([-1.04, -1.32, 4.50, -1.69, 0.53, 1.34, 3.35, 4.10, -0.99, 0.98])
    return 10, beta, 4.50


def generate_fixture_instance(cfg: SimConfig, rng: RngStream) -> SimInstance:
    """Like :func:`generate_instance` but with the fixed coefficients of
    :func:`fixture_p10` instead of drawn ones."""
    p, beta, beta_mu = fixture_p10()
    mu = rng.normal(cfg.n)
    X = rng.normal(cfg.n * p).reshape(cfg.n, p)
    Z = mu[:, None] + cfg.cauchy_scale * rng.cauchy(cfg.n * cfg.m).reshape(cfg.n, cfg.m)
    eps = rng.normal(cfg.n)
    y = X @ beta + beta_mu * mu * mu + eps
    return SimInstance(X, Z, mu, beta, beta_mu, eps, y)


def instance_datasets(inst: SimInstance) -> tuple[Dataset, Dataset, Dataset]:
    """The three competing model inputs: covariates only, plus the process
    mean ('sel_mean'), plus the MLE location ('sel_mle')."""
    n, p = inst.X.shape
    base_cols = [Column(f"x{j}", inst.X[:, j], SelLevel.RAW) for j in range(p)]
    target = Column("y", inst.y, SelLevel.RAW)
    z_mean = inst.processes.mean(axis=1)
    mu_hat = np.array([f.location for f in cauchy_mle_batch(inst.processes)])
    ds_base = Dataset(base_cols + [target], "y")
    ds_mean = Dataset(
        base_cols + [Column("sel_mean", z_mean, SelLevel.DESCRIPTIVE), target], "y"
    )
    ds_mle = Dataset(
        base_cols + [Column("sel_mle", mu_hat, SelLevel.ESTIMATED), target], "y"
    )
    return ds_base, ds_mean, ds_mle


def run_rep(
    inst: SimInstance, split_spec: SplitSpec, gbt_cfg: GbtConfig
) -> tuple[float, float, float]:
    """Train the three competing models on identical train rows and return
    their held-out RMSEs (baseline, process mean, MLE location)."""
    out = []
    for ds in instance_datasets(inst):
        train, test = split(ds, split_spec)
        model = fit_gbt(
            train,
            n_trees=gbt_cfg.n_trees,
            max_depth=gbt_cfg.max_depth,
            learning_rate=gbt_cfg.learning_rate,
            min_leaf=gbt_cfg.min_leaf,
        )
        out.append(rmse(test.target_values, predict(model, test)))
    return out[0], out[1], out[2]


@dataclass(frozen=True)
class ReportRow:
    n_cols: int
    model: str
    mean_ratio: float
    p5: float
    p95: float


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[ReportRow, ...]

    def row(self, n_cols: int, model: str) -> ReportRow:
        for r in self.rows:
            if r.n_cols == n_cols and r.model == model:
                return r
        raise KeyError((n_cols, model))

    def to_long_csv(self) -> str:
        lines = ["n_cols,model,mean_ratio,p5,p95"]
        for r in self.rows:
            lines.append(
                f"{r.n_cols},{r.model},{r.mean_ratio!r},{r.p5!r},{r.p95!r}"
            )
        return "\n".join(lines) + "\n"

    def to_wide_csv(self) -> str:
        """Plot-data layout: one row per covariate count with the MLE model
        under 'sel_*', the process-mean model under 'moments_*', and the
        baseline under 'vanilla'."""
        lines = ["n_cols,sel_mean,sel_p5,sel_p95,moments_mean,moments_p5,moments_p95,vanilla"]
        for p in sorted({r.n_cols for r in self.rows}):
            mle = self.row(p, SEL_MLE)
            mom = self.row(p, SEL_MOMENTS)
            base = self.row(p, BASELINE)
            lines.append(
                f"{p},{mle.mean_ratio!r},{mle.p5!r},{mle.p95!r},"
                f"{mom.mean_ratio!r},{mom.p5!r},{mom.p95!r},{base.mean_ratio!r}"
            )
        return "\n".join(lines) + "\n"


def _one_task(cfg: SimConfig, p: int, rep: int) -> tuple[float, float]:
    """Relative RMSE (base 100) of the two SEL models for one replication."""
    rng = RngStream(cfg.master_seed, rep)
    inst = generate_instance(cfg, p, rng)
    split_spec = SplitSpec(cfg.train_fraction, rng.next_seed())
    r_base, r_mean, r_mle = run_rep(inst, split_spec, cfg.gbt)
    return 100.0 * r_mean / r_base, 100.0 * r_mle / r_base


def _run_task(args) -> tuple[int, int, float, float]:
    cfg, p, rep = args
    ratio_mean, ratio_mle = _one_task(cfg, p, rep)
    return p, rep, ratio_mean, ratio_mle


def run_benchmark(cfg: SimConfig, threads: int | None = None) -> BenchmarkReport:
    """Full sweep over ``cfg.p_values`` with ``cfg.reps`` replications each.

    Replication ``rep`` always draws from stream ``(master_seed, rep)``, and
    ratios are aggregated in replication order, so the report is identical
    for any worker count or scheduling.
    """
    if threads is None:
        threads = os.cpu_count() or 1
    tasks = [(cfg, p, rep) for p in cfg.p_values for rep in range(cfg.reps)]
    if threads <= 1 or len(tasks) == 1:
        results = [_run_task(t) for t in tasks]
    else:
        try:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_run_task, tasks, chunksize=4))
        except (OSError, PermissionError):  # no process support: degrade to threads
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_run_task, tasks))

    by_p: dict[int, dict[int, tuple[float, float]]] = {p: {} for p in cfg.p_values}
    for p, rep, ratio_mean, ratio_mle in results:
        by_p[p][rep] = (ratio_mean, ratio_mle)
    rows = []
    for p in cfg.p_values:
        ordered = [by_p[p][rep] for rep in range(cfg.reps)]
        means = np.array([r[0] for r in ordered])
        mles = np.array([r[1] for r in ordered])
        rows.append(ReportRow(p, BASELINE, 100.0, 100.0, 100.0))
        for model, ratios in ((SEL_MOMENTS, means), (SEL_MLE, mles)):
            p5, p95 = quantiles(ratios, (0.05, 0.95))
            rows.append(ReportRow(p, model, float(ratios.mean()), float(p5), float(p95)))
    return BenchmarkReport(tuple(rows))
