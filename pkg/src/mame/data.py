"""Dataset ingestion, feature metadata, splits, and run configuration.

CSV conventions: UTF-8, comma delimiter, optional header row, '.' decimal
separator, no quoting of numeric cells. Non-numeric columns are auto-coded
to integers by a lexicographic map over the distinct raw strings.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParseError

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Dataset:
    """An n x p numeric feature matrix plus per-feature metadata."""

    X: np.ndarray
    feature_names: tuple[str, ...]
    feature_kind: tuple[str, ...]
    row_ids: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be 2-D")
        n, p = X.shape
        if n < 2:
            raise ValueError(f"need at least 2 rows, got {n}")
        if p < 1:
            raise ValueError("need at least 1 feature")
        if not np.all(np.isfinite(X)):
            raise ValueError("missing or non-finite values are not supported")
        if len(self.feature_names) != p or len(self.feature_kind) != p:
            raise ValueError("feature metadata length mismatch")
        if len(self.row_ids) != n:
            raise ValueError("row_ids length mismatch")
        for j, kind in enumerate(self.feature_kind):
            if kind not in (CONTINUOUS, CATEGORICAL):
                raise ValueError(f"unknown feature kind {kind!r}")
            if kind == CATEGORICAL:
                col = X[:, j]
                if np.any(col < 0) or np.any(col != np.round(col)):
                    raise ValueError(
                        f"categorical feature {j} must be integer-coded >= 0"
                    )
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature location/scale and observed categorical codes."""

    mean: np.ndarray
    std: np.ndarray
    category_values: dict[int, np.ndarray]


@dataclass(frozen=True)
class Split:
    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int


@dataclass(frozen=True)
class RunConfig:
    """Solver and sampling knobs; defaults match the shipped CLI flags."""

    rho: float = 2.0
    t: float = 1.01
    epsilon: float = 1e-10
    tau: float = 1e-6
    tol: float = 1e-6
    cg_iters: int = 10
    neighborhood_size: int = 10
    target_nonzeros: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.t <= 1:
            raise ValueError("t must be > 1")
        for name in ("epsilon", "tau", "tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("cg_iters", "neighborhood_size", "target_nonzeros"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def _parse_cell(raw: str) -> float | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        value = float(raw)
    except ValueError:
        return None
    if not np.isfinite(value):
        return None
    return value


def load_csv(
    path: str,
    has_header: bool = True,
    kinds: list[str] | None = None,
) -> Dataset:
    """Load a rectangular CSV into a Dataset.

    Columns whose cells do not all parse as finite numbers are auto-coded:
    distinct raw strings are sorted lexicographically and mapped to
    0, 1, 2, ... Ragged rows raise ParseError naming the offending line.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows: list[list[str]] = []
        line_nos: list[int] = []
        for row in reader:
            rows.append(row)
            line_nos.append(reader.line_num)
    if not rows:
        raise ParseError(f"{path}: empty file")

    header: list[str] | None = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        line_nos = line_nos[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")

    p = len(rows[0])
    if p < 1:
        raise ParseError(f"line {line_nos[0]}: empty row")
    for row, line_no in zip(rows, line_nos):
        if len(row) != p:
            raise ParseError(
                f"line {line_no}: expected {p} cells, got {len(row)}"
            )
    if header is not None and len(header) != p:
        raise ParseError(f"{path}: header has {len(header)} cells, rows have {p}")
    if kinds is not None and len(kinds) != p:
        raise ValueError(f"kinds has {len(kinds)} entries for {p} columns")

    n = len(rows)
    X = np.empty((n, p), dtype=float)
    resolved_kinds: list[str] = []
    for j in range(p):
        raw_col = [row[j] for row in rows]
        parsed = [_parse_cell(c) for c in raw_col]
        declared = kinds[j] if kinds is not None else None
        if all(v is not None for v in parsed):
            X[:, j] = parsed
            resolved_kinds.append(declared or CONTINUOUS)
        else:
            # Any blank cell is a missing value, never a category.
            for raw, line_no in zip(raw_col, line_nos):
                if raw.strip() == "":
                    raise ParseError(f"line {line_no}: missing value in column {j}")
            if declared == CONTINUOUS:
                bad = next(
                    line_no
                    for v, line_no in zip(parsed, line_nos)
                    if v is None
                )
                raise ParseError(
                    f"line {bad}: non-numeric value in continuous column {j}"
                )
            codes = {s: c for c, s in enumerate(sorted(set(raw_col)))}
            X[:, j] = [codes[s] for s in raw_col]
            resolved_kinds.append(CATEGORICAL)

    names = tuple(header) if header is not None else tuple(
        f"f{j}" for j in range(p)
    )
    return Dataset(
        X=X,
        feature_names=names,
        feature_kind=tuple(resolved_kinds),
        row_ids=tuple(str(i) for i in range(n)),
    )


def save_csv(d: Dataset, path: str, write_header: bool = True) -> None:
    """Write a Dataset back to CSV with round-trippable float formatting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if write_header:
            writer.writerow(d.feature_names)
        for row in d.X:
            writer.writerow([repr(float(v)) for v in row])


def split_dataset(d: Dataset, train_frac: float, seed: int) -> Split:
    """Partition rows into train/test by a seeded shuffle.

    floor(train_frac * n) rows go to training; index lists come back sorted.
    """
    if d.n < 2:
        raise ValueError("need at least 2 rows to split")
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must be in (0, 1)")
    n_train = int(np.floor(train_frac * d.n))
    if n_train < 1 or d.n - n_train < 1:
        raise ValueError(
            f"train_frac={train_frac} leaves an empty partition for n={d.n}"
        )
    perm = np.random.default_rng(seed).permutation(d.n)
    return Split(
        train_idx=np.sort(perm[:n_train]),
        test_idx=np.sort(perm[n_train:]),
        seed=seed,
    )


def feature_stats(d: Dataset, idx: np.ndarray) -> FeatureStats:
    """Per-feature mean/population-std over the given rows.

    Degenerate (constant) columns get std forced to 1 so downstream
    perturbation scaling never divides by zero.
    """
    idx = np.asarray(idx, dtype=int)
    if idx.size == 0:
        raise ValueError("idx must be non-empty")
    sub = d.X[idx]
    mean = sub.mean(axis=0)
    std = sub.std(axis=0)  # population std
    std = np.where(std > 0, std, 1.0)
    categories = {
        j: np.unique(sub[:, j])
        for j, kind in enumerate(d.feature_kind)
        if kind == CATEGORICAL
    }
    return FeatureStats(mean=mean, std=std, category_values=categories)
