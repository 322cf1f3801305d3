"""Acceptance gate: every shipped claim verified at its stated tolerance.

Each test prints one ``[acceptance] <criterion>: PASS`` line on success (run
with ``pytest -s`` to see them inline).  The benchmark criteria drive the
installed command line exactly as a user would.
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from oracles import (
    cauchy_grid_search,
    exhaustive_tree,
    spearman,
    synthetic_matches,
    tree_equal,
)
from selkit.core import Column, Dataset, SelLevel, SplitSpec, split, standardize
from selkit.estimate import (
    cauchy_mle,
    cauchy_mle_batch,
    empirical_mean_feature,
    fit_strengths,
    ols,
    two_stage_least_squares,
)
from selkit.explain import partial_dependence, permutation_importance
from selkit.extract import color_histogram, histogram_moments, moments
from selkit.learn import coordinate_descent, fit_gbt, fit_lasso, fit_tree
from selkit.pnm import RasterImage
from selkit.rng import RngStream
from selkit.simbench import SimConfig, generate_fixture_instance

SRC = Path(__file__).resolve().parent.parent / "src"
CLI_ENV = {
    "PYTHONPATH": str(SRC),
    "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
    "HOME": os.environ.get("HOME", "/tmp"),
}


def _run_cli(args, cwd):
    result = subprocess.run(
        [sys.executable, "-m", "selkit", *args],
        capture_output=True,
        text=True,
        env=CLI_ENV,
        cwd=cwd,
    )
    assert result.returncode == 0, result.stderr
    return result


def _read_report(path):
    rows = {}
    lines = Path(path).read_text().splitlines()
    assert lines[0] == "n_cols,model,mean_ratio,p5,p95"
    for line in lines[1:]:
        n_cols, model, mean_ratio, p5, p95 = line.split(",")
        rows[(int(n_cols), model)] = (float(mean_ratio), float(p5), float(p95))
    return rows


def _passed(name):
    print(f"[acceptance] {name}: PASS")


# --- criterion 1: benchmark reproduces the relative-RMSE ordering ----------


@pytest.mark.slow
def test_c1_benchmark_full_profile(tmp_path):
    out = tmp_path / "report.csv"
    wide = tmp_path / "wide.csv"
    threads = str(os.cpu_count() or 1)
    started = time.monotonic()
    _run_cli(
        [
            "simulate", "--n", "1500", "--m", "400", "--reps", "200",
            "--p-values", "2,5,10,20,30", "--seed", "42",
            "--threads", threads, "--out", str(out), "--wide-out", str(wide),
        ],
        tmp_path,
    )
    elapsed = time.monotonic() - started
    rows = _read_report(out)
    for p in (2, 5, 10, 20, 30):
        mle_mean = rows[(p, "sel_mle")][0]
        assert mle_mean < 100.0, f"sel_mle mean {mle_mean} at p={p}"
        if p <= 10:
            assert mle_mean < 97.0, f"sel_mle mean {mle_mean} at p={p}"
            assert mle_mean <= rows[(p, "sel_moments")][0]
        assert rows[(p, "baseline")] == (100.0, 100.0, 100.0)
    for key, (mean_ratio, p5, p95) in rows.items():
        assert p5 <= mean_ratio <= p95, key
    assert elapsed < 1800, f"full profile took {elapsed:.0f}s"
    assert wide.read_text().splitlines()[0] == (
        "n_cols,sel_mean,sel_p5,sel_p95,moments_mean,moments_p5,moments_p95,vanilla"
    )
    _passed(f"benchmark full profile ({elapsed:.0f}s)")


@pytest.mark.slow
def test_c1_benchmark_reduced_profile_runtime(tmp_path):
    started = time.monotonic()
    _run_cli(
        [
            "simulate", "--n", "500", "--m", "400", "--reps", "50",
            "--p-values", "2,5,10,20,30", "--seed", "42",
            "--threads", str(os.cpu_count() or 1),
            "--out", str(tmp_path / "r.csv"), "--wide-out", str(tmp_path / "w.csv"),
        ],
        tmp_path,
    )
    elapsed = time.monotonic() - started
    assert elapsed < 180, f"reduced profile took {elapsed:.0f}s"
    rows = _read_report(tmp_path / "r.csv")
    assert rows[(2, "sel_mle")][0] < 100.0
    _passed(f"benchmark reduced profile ({elapsed:.0f}s)")


# --- criteria 2 and 3: importance rank and dependence shape ----------------


@pytest.fixture(scope="module")
def fixture_study():
    cfg = SimConfig()
    outcomes = []
    for seed in range(20):
        rng = RngStream(seed, 0)
        inst = generate_fixture_instance(cfg, rng)
        mu_hat = np.array([f.location for f in cauchy_mle_batch(inst.processes)])
        cols = [Column(f"x{j}", inst.X[:, j], SelLevel.RAW) for j in range(10)]
        cols.append(Column("sel_mle", mu_hat, SelLevel.ESTIMATED))
        cols.append(Column("y", inst.y, SelLevel.RAW))
        ds = Dataset(cols, "y")
        train, test = split(ds, SplitSpec(0.7, rng.next_seed()))
        model = fit_gbt(train)
        report = permutation_importance(model, test, shuffles=10, seed=seed)
        curve = partial_dependence(model, ds, "sel_mle", grid_size=50)
        center = int(np.argmin(np.abs(curve.grid)))
        outcomes.append(
            {
                "rank_first": report.rank_of("sel_mle") == 1,
                "u_shaped": curve.values[0] > curve.values[center]
                and curve.values[-1] > curve.values[center],
            }
        )
    return outcomes


def test_c2_importance_rank(fixture_study):
    wins = sum(o["rank_first"] for o in fixture_study)
    assert wins >= 18, f"sel_mle ranked first in only {wins}/20 runs"
    _passed(f"importance rank ({wins}/20)")


def test_c3_dependence_shape(fixture_study):
    wins = sum(o["u_shaped"] for o in fixture_study)
    assert wins >= 18, f"u-shape seen in only {wins}/20 runs"
    _passed(f"dependence shape ({wins}/20)")


# --- criterion 4: location estimator quality --------------------------------


def test_c4_cauchy_mle_quality():
    stream = RngStream(2024, 0)
    mus = stream.normal(200)
    Z = mus[:, None] + stream.cauchy(200 * 400).reshape(200, 400)
    fits = cauchy_mle_batch(Z)
    errors = [abs(f.location - mu) for f, mu in zip(fits, mus)]
    assert float(np.median(errors)) <= 0.2
    for f in fits:
        if f.converged:
            assert f.gradient_norm < 1e-6
    for i in range(0, 200, 20):  # 10 spot checks against the grid oracle
        mu_grid, gamma_grid = cauchy_grid_search(Z[i], resolution=1e-4)
        assert abs(fits[i].location - mu_grid) < 1e-3
        assert abs(fits[i].scale - gamma_grid) < 1e-3
    _passed("cauchy mle quality")


# --- criterion 5: descriptive vs estimated feature stability ----------------


def test_c5_mean_feature_noisier_than_mle():
    means, locations = [], []
    for rep in range(100):
        z = RngStream(2025, rep).cauchy(400, 3.0, 1.0)
        means.append(empirical_mean_feature(z))
        locations.append(cauchy_mle(z).location)
    ratio = float(np.var(means) / np.var(locations))
    assert ratio > 10.0, f"variance ratio only {ratio:.2f}"
    _passed(f"estimator variance ratio ({ratio:.0f}x)")


# --- criterion 6: strength recovery ------------------------------------------


def test_c6_strength_recovery():
    matches, truth, reference = synthetic_matches(seed=303, n_teams=20, n_matches=500)
    started = time.monotonic()
    table = fit_strengths(matches, reference, 500.0)
    elapsed = time.monotonic() - started
    teams = sorted(truth)
    rho = spearman(
        np.array([truth[t] for t in teams]),
        np.array([table.strengths[t] for t in teams]),
    )
    assert rho >= 0.9, f"spearman {rho:.3f}"
    assert abs(table.home_effect - 0.3) < 0.1
    assert abs(sum(table.strengths.values())) < 1e-10
    assert elapsed < 10.0
    _passed(f"strength recovery (rho={rho:.3f}, {elapsed:.2f}s)")


# --- criterion 7: learner oracles ---------------------------------------------


def test_c7_learner_oracles():
    stream = RngStream(2026, 0)
    for rep in range(100):
        n = 10 + int(stream.random(1)[0] * 41)
        p = 1 + int(stream.random(1)[0] * 4)
        depth = 1 + int(stream.random(1)[0] * 2)
        X = stream.normal(n * p).reshape(n, p)
        y = stream.normal(n)
        cols = [Column(f"x{j}", X[:, j], SelLevel.RAW) for j in range(p)]
        ds = Dataset(cols + [Column("y", y, SelLevel.RAW)], "y")
        got = fit_tree(ds, max_depth=depth, min_leaf=1)
        assert tree_equal(got.root, exhaustive_tree(X, y, np.arange(n), depth, 1))

    for seed in (1, 2, 3):
        s = RngStream(2027, seed)
        X = s.normal(120 * 3).reshape(120, 3)
        y = X @ s.normal(3) + s.normal(120, 0.0, 0.5)
        cols = [Column(f"x{j}", X[:, j], SelLevel.RAW) for j in range(3)]
        ds = Dataset(cols + [Column("y", y, SelLevel.RAW)], "y")
        model = fit_gbt(ds, n_trees=80, max_depth=2)
        assert (np.diff(model.train_losses) <= 1e-12).all()

        lam = 0.15
        lasso = fit_lasso(ds, lam)
        std, _ = standardize(ds, exclude={"y"})
        Xs = std.feature_matrix()
        resid = (y - y.mean()) - Xs @ lasso.coefficients
        grad = Xs.T @ resid / ds.n_rows
        for j, b in enumerate(lasso.coefficients):
            if b != 0.0:
                assert abs(grad[j] - lam * np.sign(b)) < 1e-6
            else:
                assert abs(grad[j]) <= lam + 1e-6

    n, p = 64, 4
    Q, _ = np.linalg.qr(RngStream(2028, 0).normal(n * p).reshape(n, p))
    Xo = Q * np.sqrt(n)
    Xo = Xo - Xo.mean(axis=0)
    Q2, _ = np.linalg.qr(Xo)
    Xo = Q2 * np.sqrt(n)
    yo = Xo @ np.array([1.4, -0.6, 0.02, 0.0]) + RngStream(2028, 1).normal(n, 0.0, 0.1)
    yc = yo - yo.mean()
    beta_ols = np.linalg.lstsq(Xo, yc, rcond=None)[0]
    lam = 0.25
    got = coordinate_descent(Xo, yc, lam)
    scale = (Xo * Xo).sum(axis=0) / n
    want = np.sign(beta_ols) * np.maximum(np.abs(beta_ols) - lam / scale, 0.0)
    assert np.abs(got - want).max() < 1e-8
    _passed("learner oracles")


# --- criterion 8: instrumented regression -------------------------------------


def test_c8_two_stage_property():
    stream = RngStream(2029, 0)
    X = stream.normal(300)
    Z = stream.normal(300)
    y = 1.0 + 2.0 * X + 1.5 * Z + stream.normal(300, 0.0, 0.1)
    tsls = two_stage_least_squares(y, X, Z, Z)
    direct = ols(np.column_stack([X, Z]), y)
    assert np.abs(tsls.coefficients - direct.coefficients).max() < 1e-10

    s = RngStream(2030, 0)
    n = 10_000
    W = s.normal(n)
    U = s.normal(n)
    Z = W + 0.8 * U + s.normal(n, 0.0, 0.5)
    X = s.normal(n)
    eps = 0.8 * U + s.normal(n, 0.0, 0.5)
    beta_z = 1.5
    y = 2.0 * X + beta_z * Z + eps
    biased = ols(np.column_stack([X, Z]), y)
    fixed = two_stage_least_squares(y, X, Z, W)
    err_fixed = abs(fixed.coefficients[-1] - beta_z)
    err_biased = abs(biased.coefficients[-1] - beta_z)
    assert err_fixed < err_biased
    _passed(f"two-stage property (bias {err_biased:.3f} -> {err_fixed:.3f})")


# --- criterion 9: extractor exactness ------------------------------------------


def test_c9_extractor_exactness():
    stream = RngStream(2031, 0)
    for rep in range(50):
        w = 2 + int(stream.random(1)[0] * 7)
        h = 2 + int(stream.random(1)[0] * 7)
        pix = (stream.random(w * h) * 256).astype(np.uint8)
        (hist,) = color_histogram(RasterImage(w, h, 1, pix))
        got = histogram_moments(hist)
        want = moments(pix.astype(np.float64))
        assert abs(got.mean - want.mean) < 1e-9
        assert abs(got.variance - want.variance) < 1e-9
        if want.has_higher_moments:
            assert abs(got.skewness - want.skewness) < 1e-9
            assert abs(got.excess_kurtosis - want.excess_kurtosis) < 1e-9

    for rep in range(1000):
        n = 5 + int(stream.random(1)[0] * 60)
        xs = stream.normal(n, 0.0, 3.0)
        a = 0.25 + float(stream.random(1)[0]) * 4.0
        b = float(stream.normal(1, 0.0, 10.0)[0])
        s = moments(xs)
        t = moments(a * xs + b)
        assert abs(t.mean - (a * s.mean + b)) < 1e-10 * max(1.0, abs(a * s.mean + b))
        assert abs(t.skewness - s.skewness) < 1e-10
        assert abs(t.excess_kurtosis - s.excess_kurtosis) < 1e-10
        flipped = moments(-xs)
        assert abs(flipped.skewness + s.skewness) < 1e-10
    _passed("extractor exactness")


# --- criterion 10: end-to-end determinism ---------------------------------------


@pytest.mark.slow
def test_c10_simulate_determinism(tmp_path):
    base = ["simulate", "--n", "300", "--m", "60", "--reps", "8",
            "--p-values", "2,5", "--seed", "42", "--gbt-trees", "40"]

    def run(tag, threads):
        out = tmp_path / f"{tag}.csv"
        wide = tmp_path / f"{tag}_wide.csv"
        _run_cli(base + ["--threads", threads, "--out", str(out),
                         "--wide-out", str(wide)], tmp_path)
        return out.read_bytes(), wide.read_bytes()

    first = run("a", "1")
    second = run("b", "1")
    eight = run("c", "8")
    assert first == second
    assert first == eight
    _passed("simulate determinism")
