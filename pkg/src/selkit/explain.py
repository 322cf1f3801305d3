"""Model explanation: permutation feature importance and partial dependence.

Both are model-agnostic rank/shape diagnostics: importance measures how much
held-out RMSE degrades when one feature column is shuffled, and the partial
dependence curve traces the average prediction as one feature sweeps a
quantile grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Column, Dataset
from .errors import DegenerateVarianceError, MissingFeatureError
from .extract import quantiles
from .learn import Model, predict, rmse
from .rng import RngStream


@dataclass(frozen=True)
class ImportanceReport:
    """Per-feature mean RMSE increase over k shuffles, sorted descending."""

    entries: tuple[tuple[str, float], ...]
    shuffles: int
    seed: int

    def rank_of(self, feature: str) -> int:
        """1-based rank of a feature (1 = most important)."""
        for i, (name, _) in enumerate(self.entries):
            if name == feature:
                return i + 1
        raise MissingFeatureError(f"{feature!r} not in report")


@dataclass(frozen=True)
class PdpCurve:
    feature: str
    grid: np.ndarray
    values: np.ndarray


def permutation_importance(
    model: Model, ds_test: Dataset, shuffles: int = 10, seed: int = 0
) -> ImportanceReport:
    """Shuffle each model feature ``shuffles`` times and report the mean
    held-out RMSE increase.

    Shuffle ``s`` of feature ``f`` uses stream ``(seed, f * shuffles + s)``
    with features numbered in model order, so the report does not depend on
    the dataset's column order.
    """
    if shuffles < 1:
        raise ValueError("shuffles must be at least 1")
    y = ds_test.target_values
    baseline = rmse(y, predict(model, ds_test))
    entries = []
    for f_idx, name in enumerate(model.feature_names):
        col = ds_test.column(name)
        increases = []
        for s in range(shuffles):
            stream = RngStream(seed, f_idx * shuffles + s)
            shuffled = col.values[stream.permutation(ds_test.n_rows)]
            cols = [
                Column(c.name, shuffled if c.name == name else c.values, c.sel_level)
                for c in ds_test.columns
            ]
            permuted = Dataset(cols, ds_test.target)
            increases.append(rmse(y, predict(model, permuted)) - baseline)
        entries.append((name, float(np.mean(increases))))
    entries.sort(key=lambda e: -e[1])
    return ImportanceReport(tuple(entries), shuffles, seed)


def partial_dependence(
    model: Model, ds: Dataset, feature: str, grid_size: int = 50
) -> PdpCurve:
    """Mean prediction while one feature is forced to each point of an
    empirical-quantile grid (probabilities equally spaced on [0.01, 0.99];
    duplicate grid points collapse)."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    col = ds.column(feature)
    if feature not in model.feature_names:
        raise MissingFeatureError(f"model does not use feature {feature!r}")
    probs = np.linspace(0.01, 0.99, grid_size)
    grid = np.unique(quantiles(col.values, probs))
    if grid.shape[0] < 2:
        raise DegenerateVarianceError(f"feature {feature!r} is constant")
    values = np.empty(grid.shape[0], dtype=np.float64)
    for g_idx, g in enumerate(grid):
        forced = np.full(ds.n_rows, g)
        cols = [
            Column(c.name, forced if c.name == feature else c.values, c.sel_level)
            for c in ds.columns
        ]
        values[g_idx] = float(predict(model, Dataset(cols, ds.target)).mean())
    return PdpCurve(feature, grid, values)
