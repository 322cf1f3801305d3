"""Core data model: column-labeled datasets, CSV ingestion, splitting and
standardization.

Every column carries a SEL provenance level so downstream reports can tell
raw measurements apart from constructed covariates: proxies (level 1),
descriptive summaries (level 2) and model-based estimates (level 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateSplitError,
    DegenerateVarianceError,
    MissingFeatureError,
    MissingFileError,
    MissingTargetError,
    NonFiniteValueError,
    ParseError,
    WriteError,
)
from .rng import RngStream


class SelLevel(Enum):
    """Provenance of a column: observed, or constructed at one of the three
    SEL levels."""

    RAW = "raw"
    PROXY = "sel1"
    DESCRIPTIVE = "sel2"
    ESTIMATED = "sel3"


def _as_float_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if not np.isfinite(arr).all():
        raise NonFiniteValueError(f"{what} contains NaN or infinite entries")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Column:
    name: str
    values: np.ndarray
    sel_level: SelLevel = SelLevel.RAW


class Dataset:
    """Immutable table of equally long float columns with one target.

    Column order is preserved; names are unique; all entries are finite.
    """

    __slots__ = ("columns", "target", "n_rows", "_by_name")

    def __init__(self, columns: Sequence[Column], target: str):
        cols = []
        by_name: dict[str, Column] = {}
        n_rows = None
        for col in columns:
            values = _as_float_vector(col.values, f"column {col.name!r}")
            if n_rows is None:
                n_rows = values.shape[0]
            elif values.shape[0] != n_rows:
                raise ValueError(
                    f"column {col.name!r} has {values.shape[0]} rows, expected {n_rows}"
                )
            if col.name in by_name:
                raise ValueError(f"duplicate column name {col.name!r}")
            frozen = Column(col.name, values, col.sel_level)
            by_name[col.name] = frozen
            cols.append(frozen)
        if n_rows is None or n_rows < 1:
            raise ValueError("dataset needs at least one column and one row")
        if target not in by_name:
            raise MissingTargetError(f"target column {target!r} not present")
        self.columns = tuple(cols)
        self.target = target
        self.n_rows = n_rows
        self._by_name = by_name

    @classmethod
    def from_arrays(
        cls,
        named: Sequence[tuple[str, np.ndarray]],
        target: str,
        levels: Mapping[str, SelLevel] | None = None,
    ) -> "Dataset":
        levels = levels or {}
        cols = [Column(n, v, levels.get(n, SelLevel.RAW)) for n, v in named]
        return cls(cols, target)

    def column(self, name: str) -> Column:
        try:
            return self._by_name[name]
        except KeyError:
            raise MissingFeatureError(f"no column named {name!r}") from None

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.name != self.target)

    def feature_matrix(self, names: Iterable[str] | None = None) -> np.ndarray:
        """Stack the requested columns (default: all non-target) as an
        n-by-p Fortran-ordered matrix."""
        use = tuple(names) if names is not None else self.feature_names
        out = np.empty((self.n_rows, len(use)), dtype=np.float64, order="F")
        for j, name in enumerate(use):
            out[:, j] = self.column(name).values
        return out

    @property
    def target_values(self) -> np.ndarray:
        return self._by_name[self.target].values

    def with_column(self, name: str, values, sel_level: SelLevel) -> "Dataset":
        return Dataset(list(self.columns) + [Column(name, values, sel_level)], self.target)

    def take(self, rows) -> "Dataset":
        idx = np.asarray(rows, dtype=np.int64)
        cols = [Column(c.name, c.values[idx], c.sel_level) for c in self.columns]
        return Dataset(cols, self.target)


@dataclass(frozen=True)
class Process:
    """Per-individual numeric sequence from which SEL features are extracted."""

    id: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] < 2:
            raise ValueError("process needs at least two entries")
        if not np.isfinite(values).all():
            raise NonFiniteValueError(f"process {self.id} contains non-finite entries")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SplitSpec:
    """Shuffled train/test split: train gets floor(train_fraction * n) rows."""

    train_fraction: float = 0.7
    shuffle_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


# --- CSV ---------------------------------------------------------------------


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(row, col, f"cannot parse {cell.strip()!r} as a real number") from None
    if not math.isfinite(value):
        raise NonFiniteValueError(f"row {row}, column {col}: non-finite value {cell.strip()!r}")
    return value


def read_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a headered numeric CSV into (column names, n-by-p array).

    Row/column coordinates in errors are 1-based; the header is row 1.
    """
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"no such file: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, 0, "missing header row")
    names = [c.strip() for c in lines[0].split(",")]
    width = len(names)
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise ParseError(r, 0, f"expected {width} cells, found {len(cells)}")
        rows.append([_parse_cell(cell, r, c) for c, cell in enumerate(cells, start=1)])
    if not rows:
        raise ParseError(2, 0, "no data rows")
    return names, np.asarray(rows, dtype=np.float64)


def read_csv(path, target: str) -> Dataset:
    """Read a comma-separated numeric file into a Dataset.

    All columns are tagged ``SelLevel.RAW``; provenance of constructed
    columns is not persisted in CSV.
    """
    names, matrix = read_matrix_csv(path)
    if target not in names:
        raise MissingTargetError(f"target column {target!r} not in header {names}")
    if len(set(names)) != len(names):
        raise ParseError(1, 0, "duplicate column names in header")
    cols = [Column(name, matrix[:, j], SelLevel.RAW) for j, name in enumerate(names)]
    return Dataset(cols, target)


def _format_value(v: float) -> str:
    return repr(float(v))


def write_csv(ds: Dataset, path) -> None:
    """Write a Dataset as UTF-8 CSV with a shortest-round-trip float format,
    so a re-read reproduces the values exactly."""
    header = ",".join(c.name for c in ds.columns)
    lines = [header]
    stacked = [c.values for c in ds.columns]
    for i in range(ds.n_rows):
        lines.append(",".join(_format_value(col[i]) for col in stacked))
    write_text(path, "\n".join(lines) + "\n")


def write_text(path, text: str) -> None:
    """Write text with '\\n' newlines, mapping OS failures to WriteError."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


# --- splitting / scaling ------------------------------------------------------


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Disjoint, exhaustive, seed-deterministic row split.

    Row order within each side follows the original dataset, which keeps
    outputs easy to diff across runs.
    """
    n = ds.n_rows
    # tiny epsilon guards FP droop in fraction * n (e.g. 0.3 * 10)
    n_train = int(math.floor(spec.train_fraction * n + 1e-9))
    if n < 2 or n_train == 0 or n_train == n:
        raise DegenerateSplitError(
            f"cannot split {n} rows with train_fraction={spec.train_fraction}"
        )
    perm = RngStream(spec.shuffle_seed, 0).permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return ds.take(train_idx), ds.take(test_idx)


def standardize(
    ds: Dataset, exclude: Iterable[str] = ()
) -> tuple[Dataset, dict[str, tuple[float, float]]]:
    """Center and scale every non-excluded column to mean 0, sd 1 (n-1
    denominator).  Returns the transformed dataset and the per-column
    (mean, sd) needed to invert the transform exactly."""
    skip = set(exclude)
    stats: dict[str, tuple[float, float]] = {}
    cols = []
    for col in ds.columns:
        if col.name in skip:
            cols.append(col)
            continue
        mean = float(col.values.mean())
        sd = float(col.values.std(ddof=1)) if ds.n_rows > 1 else 0.0
        if sd <= 0.0:
            raise DegenerateVarianceError(f"column {col.name!r} has zero variance")
        stats[col.name] = (mean, sd)
        cols.append(Column(col.name, (col.values - mean) / sd, col.sel_level))
    return Dataset(cols, ds.target), stats


def unstandardize(ds: Dataset, stats: Mapping[str, tuple[float, float]]) -> Dataset:
    """Inverse of :func:`standardize` for the columns present in ``stats``."""
    cols = []
    for col in ds.columns:
        if col.name in stats:
            mean, sd = stats[col.name]
            cols.append(Column(col.name, col.values * sd + mean, col.sel_level))
        else:
            cols.append(col)
    return Dataset(cols, ds.target)
