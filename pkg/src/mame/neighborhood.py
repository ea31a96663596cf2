"""Perturbation neighborhoods, kernel weights, and the coordinate-wise map.

Each explained instance x_i gets m perturbed copies: continuous features get
Gaussian noise scaled by the training std, categorical features are resampled
from the observed codes with a fixed flip probability. The oracle always sees
raw feature space; the coordinate map g is applied afterwards to produce the
design the surrogate is fit on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CATEGORICAL, Dataset, FeatureStats, RunConfig
from .oracles import Oracle, predict_batch

IDENTITY = 0
ZSCORE = 1

DEFAULT_FLIP_PROB = 0.3


@dataclass(frozen=True)
class CoordinateMap:
    """Per-feature transform applied independently to each coordinate."""

    mode: np.ndarray  # (p,) int: IDENTITY or ZSCORE
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def identity(cls, p: int) -> "CoordinateMap":
        return cls(np.zeros(p, dtype=int), np.zeros(p), np.ones(p))

    @classmethod
    def zscore(cls, stats: FeatureStats, kinds=None) -> "CoordinateMap":
        """Standardize continuous features; categorical codes pass through."""
        p = stats.mean.shape[0]
        mode = np.full(p, ZSCORE, dtype=int)
        if kinds is not None:
            mode = np.array(
                [IDENTITY if k == CATEGORICAL else ZSCORE for k in kinds],
                dtype=int,
            )
        return cls(mode, stats.mean.copy(), stats.std.copy())

    def apply(self, Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        scaled = (Z - self.mean) / self.std
        return np.where(self.mode == ZSCORE, scaled, Z)

    def inverse(self, G: np.ndarray) -> np.ndarray:
        G = np.atleast_2d(np.asarray(G, dtype=float))
        raw = G * self.std + self.mean
        return np.where(self.mode == ZSCORE, raw, G)


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian similarity kernel width; defaults to 0.75 * sqrt(p)."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("kernel width must be positive")

    @classmethod
    def default(cls, p: int) -> "KernelConfig":
        return cls(0.75 * np.sqrt(p))


@dataclass(frozen=True)
class Neighborhood:
    anchor_idx: int
    Z: np.ndarray  # (m, p) raw perturbations
    G: np.ndarray  # (m, p) mapped perturbations
    psi: np.ndarray  # (m,) kernel weights in (0, 1]
    fz: np.ndarray  # (m,) oracle responses

    @property
    def m(self) -> int:
        return self.Z.shape[0]


def sample_neighborhood(
    d: Dataset,
    stats: FeatureStats,
    i: int,
    m: int,
    seed: int,
    flip_prob: float = DEFAULT_FLIP_PROB,
) -> np.ndarray:
    """Draw m raw perturbations around row i, deterministically per (seed, i)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    x = d.X[i]
    rng = np.random.default_rng([int(seed), int(i)])
    Z = x + rng.standard_normal((m, d.p)) * stats.std
    for j, kind in enumerate(d.feature_kind):
        if kind != CATEGORICAL:
            continue
        cats = stats.category_values.get(j)
        if cats is None or cats.size == 0:
            cats = np.array([x[j]])
        flips = rng.random(m) < flip_prob
        draws = cats[rng.integers(0, cats.size, size=m)]
        Z[:, j] = np.where(flips, draws, x[j])
    return Z


def kernel_weights(
    x_i: np.ndarray, Z: np.ndarray, cfg: KernelConfig
) -> np.ndarray:
    """psi_r = exp(-||x_i - z_r||^2 / sigma^2), all in (0, 1]."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    x_i = np.asarray(x_i, dtype=float)
    if x_i.shape[0] != Z.shape[1]:
        raise ValueError("dimension mismatch between anchor and perturbations")
    sq = np.sum((Z - x_i) ** 2, axis=1)
    return np.exp(-sq / cfg.sigma**2)


def build_neighborhoods(
    d: Dataset,
    stats: FeatureStats,
    oracle: Oracle,
    coord_map: CoordinateMap,
    cfg: RunConfig,
    idx,
    kernel: KernelConfig | None = None,
    flip_prob: float = DEFAULT_FLIP_PROB,
) -> list[Neighborhood]:
    """Sample one neighborhood per index and query the oracle in one pass.

    The oracle sees raw perturbations; the coordinate map is applied after
    the batched query. Per-index seeding makes the output independent of the
    order of idx.
    """
    if oracle.p != d.p:
        raise ValueError(f"oracle expects p={oracle.p}, dataset has p={d.p}")
    idx = [int(i) for i in idx]
    kernel = kernel or KernelConfig.default(d.p)
    m = cfg.neighborhood_size
    zs = [
        sample_neighborhood(d, stats, i, m, cfg.seed, flip_prob) for i in idx
    ]
    all_fz = predict_batch(oracle, np.vstack(zs)) if zs else np.empty(0)
    out = []
    for pos, (i, Z) in enumerate(zip(idx, zs)):
        fz = all_fz[pos * m : (pos + 1) * m]
        out.append(
            Neighborhood(
                anchor_idx=i,
                Z=Z,
                G=coord_map.apply(Z),
                psi=kernel_weights(d.X[i], Z, kernel),
                fz=fz,
            )
        )
    return out
