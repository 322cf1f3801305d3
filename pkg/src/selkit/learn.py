"""From-scratch learners: CART regression trees, bagged forests, squared-loss
gradient boosting, and LASSO by cyclic coordinate descent.

Tree growth is exact greedy search over every (feature, midpoint threshold)
pair.  Split ties break deterministically toward the lowest feature index,
then the lowest threshold, so fitted models are reproducible bit for bit
across platforms and backends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import backend
from .core import Dataset, standardize
from .errors import (
    ConvergenceError,
    InvalidMtryError,
    InvalidRateError,
    LengthMismatchError,
    MissingFeatureError,
    MissingFileError,
    TooFewRowsError,
)
from .rng import RngStream


@dataclass(frozen=True)
class Leaf:
    value: float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class TreeModel:
    root: TreeNode
    feature_names: tuple[str, ...]


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]
    mtry: int
    bootstrap_seed: int
    feature_names: tuple[str, ...]


@dataclass(frozen=True)
class GbtModel:
    """Boosted trees; prediction = init_value + learning_rate * sum of tree
    outputs.  ``train_losses`` records the training MSE after the init and
    after each round."""

    init_value: float
    trees: tuple[TreeNode, ...]
    learning_rate: float
    feature_names: tuple[str, ...]
    train_losses: tuple[float, ...] = ()


@dataclass(frozen=True)
class LassoModel:
    """L1-penalized linear model; ``coefficients`` live on the standardized
    feature scale, ``scaling`` maps them back."""

    coefficients: np.ndarray
    intercept: float
    lam: float
    scaling: tuple[tuple[str, float, float], ...]
    feature_names: tuple[str, ...]

    @property
    def original_coefficients(self) -> tuple[np.ndarray, float]:
        """(slopes, intercept) on the raw feature scale."""
        sds = np.array([s[2] for s in self.scaling])
        means = np.array([s[1] for s in self.scaling])
        slopes = self.coefficients / sds
        return slopes, self.intercept - float((slopes * means).sum())


Model = Union[TreeModel, ForestModel, GbtModel, LassoModel]


# --- tree growth -----------------------------------------------------------------


def _presort(X: np.ndarray) -> np.ndarray:
    """(p, n) row indices, row j sorting feature j ascending (stable)."""
    p = X.shape[1]
    orders = np.empty((p, X.shape[0]), dtype=np.int64)
    for j in range(p):
        orders[j] = np.argsort(X[:, j], kind="stable")
    return orders


def _sample_features(stream: RngStream, p: int, mtry: int) -> np.ndarray:
    """mtry distinct feature indices, ascending (partial Fisher-Yates)."""
    pool = np.arange(p, dtype=np.int64)
    u = stream.random(mtry)
    for i in range(mtry):
        j = i + int(u[i] * (p - i))
        pool[i], pool[j] = pool[j], pool[i]
    return np.sort(pool[:mtry])


def _grow(X, y, orders, all_feats, mask, n_node, depth_left, min_leaf, stream, mtry):
    if depth_left == 0 or n_node < 2 * min_leaf:
        return Leaf(float(y[mask].mean()))
    p = X.shape[1]
    if stream is not None and mtry < p:
        feats = _sample_features(stream, p, mtry)
    else:
        feats = all_feats
    found, feature, _, threshold = backend.kernels.best_split(
        X, orders, y, mask.view(np.uint8), feats, n_node, min_leaf
    )
    if not found:
        return Leaf(float(y[mask].mean()))
    go_left = mask & (X[:, feature] <= threshold)
    go_right = mask & ~go_left
    n_left = int(go_left.sum())
    left = _grow(X, y, orders, all_feats, go_left, n_left, depth_left - 1,
                 min_leaf, stream, mtry)
    right = _grow(X, y, orders, all_feats, go_right, n_node - n_left, depth_left - 1,
                  min_leaf, stream, mtry)
    return Split(int(feature), float(threshold), left, right)


def _route(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Vectorized prediction of one tree over an n-by-p matrix."""
    out = np.empty(X.shape[0], dtype=np.float64)
    stack = [(node, np.arange(X.shape[0], dtype=np.int64))]
    while stack:
        cur, idx = stack.pop()
        if isinstance(cur, Leaf):
            out[idx] = cur.value
            continue
        goes_left = X[idx, cur.feature] <= cur.threshold
        stack.append((cur.left, idx[goes_left]))
        stack.append((cur.right, idx[~goes_left]))
    return out


def fit_tree(ds: Dataset, max_depth: int, min_leaf: int = 1) -> TreeModel:
    """Exact greedy CART regression tree on the dataset's feature columns."""
    if max_depth < 0 or min_leaf < 1:
        raise ValueError("max_depth must be >= 0 and min_leaf >= 1")
    if ds.n_rows < 2 * min_leaf:
        raise TooFewRowsError(f"need at least {2 * min_leaf} rows, have {ds.n_rows}")
    X = ds.feature_matrix()
    y = ds.target_values
    feats = np.arange(X.shape[1], dtype=np.int64)
    root = _grow(
        X, y, _presort(X), feats, np.ones(ds.n_rows, dtype=bool), ds.n_rows,
        max_depth, min_leaf, None, X.shape[1],
    )
    return TreeModel(root, ds.feature_names)


def fit_forest(
    ds: Dataset,
    n_trees: int,
    mtry: int,
    max_depth: int,
    seed: int,
    min_leaf: int = 5,
    bootstrap: bool = True,
) -> ForestModel:
    """Bagged CART trees with per-split feature subsampling.

    Tree t draws its bootstrap rows and split candidates from stream
    ``(seed, t)``, so refits are reproducible and trees are independent.
    ``bootstrap=False`` is a hook for equivalence tests against a single
    tree.
    """
    p = len(ds.feature_names)
    if not 1 <= mtry <= p:
        raise InvalidMtryError(f"mtry must lie in [1, {p}]")
    if ds.n_rows < 2 * min_leaf:
        raise TooFewRowsError(f"need at least {2 * min_leaf} rows, have {ds.n_rows}")
    X = ds.feature_matrix()
    y = ds.target_values
    n = ds.n_rows
    feats = np.arange(p, dtype=np.int64)
    trees = []
    for t in range(n_trees):
        stream = RngStream(seed, t)
        if bootstrap:
            rows = stream.integers(n, n)
            Xb = np.asfortranarray(X[rows])
            yb = y[rows]
        else:
            Xb, yb = X, y
        root = _grow(
            Xb, yb, _presort(Xb), feats, np.ones(n, dtype=bool), n, max_depth,
            min_leaf, stream, mtry,
        )
        trees.append(root)
    return ForestModel(tuple(trees), mtry, seed, ds.feature_names)


def fit_gbt(
    ds: Dataset,
    n_trees: int = 200,
    max_depth: int = 3,
    learning_rate: float = 0.1,
    seed: int = 0,
    min_leaf: int = 5,
) -> GbtModel:
    """Squared-loss gradient boosting: stage-wise CART fits to residuals.

    The procedure is deterministic (no row or column subsampling); ``seed``
    is accepted for interface symmetry with the other learners.
    """
    del seed
    if not 0.0 < learning_rate <= 1.0:
        raise InvalidRateError("learning_rate must lie in (0, 1]")
    if ds.n_rows < 2:
        raise TooFewRowsError("gradient boosting needs at least two rows")
    X = ds.feature_matrix()
    y = ds.target_values
    n = ds.n_rows
    orders = _presort(X)
    feats = np.arange(X.shape[1], dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    init = float(y.mean())
    current = np.full(n, init)
    residual = y - current
    losses = [float((residual * residual).mean())]
    trees = []
    for _ in range(n_trees):
        root = _grow(X, residual, orders, feats, mask, n, max_depth, min_leaf, None, X.shape[1])
        current += learning_rate * _route(root, X)
        residual = y - current
        losses.append(float((residual * residual).mean()))
        trees.append(root)
    return GbtModel(init, tuple(trees), learning_rate, ds.feature_names, tuple(losses))


# --- lasso -----------------------------------------------------------------------


def soft_threshold(x: float, t: float) -> float:
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


def coordinate_descent(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    tol: float = 1e-7,
    max_sweeps: int = 10_000,
) -> np.ndarray:
    """Cyclic coordinate descent for (1/2n)||y - Xb||^2 + lam * ||b||_1.

    ``y`` should already be centered and ``X`` column-scaled; convergence is
    declared when no coefficient moves by more than ``tol`` in a sweep.
    """
    n, p = X.shape
    col_scale = (X * X).sum(axis=0) / n
    beta = np.zeros(p, dtype=np.float64)
    resid = y.astype(np.float64).copy()
    for _ in range(max_sweeps):
        delta_max = 0.0
        for j in range(p):
            if col_scale[j] == 0.0:
                continue
            rho = float(X[:, j] @ resid) / n + col_scale[j] * beta[j]
            new = soft_threshold(rho, lam) / col_scale[j]
            step = new - beta[j]
            if step != 0.0:
                resid -= step * X[:, j]
                beta[j] = new
                delta_max = max(delta_max, abs(step))
        if delta_max < tol:
            return beta
    raise ConvergenceError(f"coordinate descent did not converge in {max_sweeps} sweeps")


def fit_lasso(ds: Dataset, lam: float) -> LassoModel:
    """LASSO on standardized features; the intercept is the target mean."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    std, stats = standardize(ds, exclude={ds.target})
    names = std.feature_names
    X = std.feature_matrix()
    y = ds.target_values
    intercept = float(y.mean())
    beta = coordinate_descent(X, y - intercept, lam)
    scaling = tuple((name, stats[name][0], stats[name][1]) for name in names)
    return LassoModel(beta, intercept, lam, scaling, names)


def lasso_lambda_max(ds: Dataset) -> float:
    """Smallest penalty that zeroes every coefficient,
    max_j |x_j . (y - mean(y))| / n on standardized features."""
    std, _ = standardize(ds, exclude={ds.target})
    X = std.feature_matrix()
    y = ds.target_values
    return float(np.abs(X.T @ (y - y.mean())).max()) / ds.n_rows


# --- prediction / error ------------------------------------------------------------


def predict(model: Model, ds: Dataset) -> np.ndarray:
    """Model predictions for every dataset row; features are resolved by
    name, extra columns are ignored."""
    present = {c.name for c in ds.columns}
    for name in model.feature_names:
        if name not in present:
            raise MissingFeatureError(f"dataset lacks model feature {name!r}")
    X = ds.feature_matrix(model.feature_names)
    if isinstance(model, TreeModel):
        return _route(model.root, X)
    if isinstance(model, ForestModel):
        total = np.zeros(ds.n_rows, dtype=np.float64)
        for tree in model.trees:
            total += _route(tree, X)
        return total / max(len(model.trees), 1)
    if isinstance(model, GbtModel):
        out = np.full(ds.n_rows, model.init_value, dtype=np.float64)
        for tree in model.trees:
            out += model.learning_rate * _route(tree, X)
        return out
    if isinstance(model, LassoModel):
        means = np.array([s[1] for s in model.scaling])
        sds = np.array([s[2] for s in model.scaling])
        return model.intercept + ((X - means) / sds) @ model.coefficients
    raise TypeError(f"unsupported model type {type(model).__name__}")


def rmse(y_true, y_pred) -> float:
    a = np.asarray(y_true, dtype=np.float64)
    b = np.asarray(y_pred, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatchError(f"length {a.shape} vs {b.shape}")
    if a.size == 0:
        raise LengthMismatchError("rmse of empty vectors")
    d = a - b
    return float(np.sqrt((d * d).mean()))


# --- serialization -----------------------------------------------------------------


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d: dict) -> TreeNode:
    if "value" in d:
        return Leaf(float(d["value"]))
    return Split(
        int(d["feature"]),
        float(d["threshold"]),
        _node_from_dict(d["left"]),
        _node_from_dict(d["right"]),
    )


def model_to_dict(model: Model) -> dict:
    if isinstance(model, TreeModel):
        return {
            "type": "tree",
            "feature_names": list(model.feature_names),
            "root": _node_to_dict(model.root),
        }
    if isinstance(model, ForestModel):
        return {
            "type": "forest",
            "feature_names": list(model.feature_names),
            "mtry": model.mtry,
            "bootstrap_seed": model.bootstrap_seed,
            "trees": [_node_to_dict(t) for t in model.trees],
        }
    if isinstance(model, GbtModel):
        return {
            "type": "gbt",
            "learning_rate": model.learning_rate,
            "init_value": model.init_value,
            "feature_names": list(model.feature_names),
            "trees": [_node_to_dict(t) for t in model.trees],
        }
    if isinstance(model, LassoModel):
        return {
            "type": "lasso",
            "feature_names": list(model.feature_names),
            "coefficients": [float(b) for b in model.coefficients],
            "intercept": model.intercept,
            "lambda": model.lam,
            "scaling": {name: [mean, sd] for name, mean, sd in model.scaling},
        }
    raise TypeError(f"unsupported model type {type(model).__name__}")


def model_from_dict(d: dict) -> Model:
    kind = d.get("type")
    names = tuple(d["feature_names"])
    if kind == "tree":
        return TreeModel(_node_from_dict(d["root"]), names)
    if kind == "forest":
        return ForestModel(
            tuple(_node_from_dict(t) for t in d["trees"]),
            int(d["mtry"]),
            int(d["bootstrap_seed"]),
            names,
        )
    if kind == "gbt":
        return GbtModel(
            float(d["init_value"]),
            tuple(_node_from_dict(t) for t in d["trees"]),
            float(d["learning_rate"]),
            names,
        )
    if kind == "lasso":
        scaling = tuple((n, float(ms[0]), float(ms[1])) for n, ms in d["scaling"].items())
        return LassoModel(
            np.asarray(d["coefficients"], dtype=np.float64),
            float(d["intercept"]),
            float(d["lambda"]),
            scaling,
            names,
        )
    raise ValueError(f"unknown model type {kind!r}")


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path) -> Model:
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"no such model file: {p}")
    return model_from_dict(json.loads(p.read_text(encoding="utf-8")))
