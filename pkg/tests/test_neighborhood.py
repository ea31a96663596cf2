import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import gaussian_dataset
from mame.data import Dataset, RunConfig, feature_stats
from mame.neighborhood import (
    CoordinateMap,
    KernelConfig,
    build_neighborhoods,
    kernel_weights,
    sample_neighborhood,
)
from mame.oracles import make_synthetic_blackbox, predict_batch


def categorical_dataset(codes_column):
    n = len(codes_column)
    X = np.column_stack([np.linspace(0.0, 1.0, n), codes_column])
    return Dataset(
        X=X,
        feature_names=("x", "c"),
        feature_kind=("continuous", "categorical"),
        row_ids=tuple(str(i) for i in range(n)),
    )


class TestSampling:
    def test_deterministic_per_seed_and_index(self):
        d = gaussian_dataset(6, 3, 0)
        stats = feature_stats(d, np.arange(6))
        a = sample_neighborhood(d, stats, 2, 8, seed=11)
        b = sample_neighborhood(d, stats, 2, 8, seed=11)
        assert np.array_equal(a, b)
        c = sample_neighborhood(d, stats, 2, 8, seed=12)
        assert not np.array_equal(a, c)

    def test_constant_columns_get_unit_noise(self):
        X = np.full((4, 2), 3.0)
        X[:, 1] = np.arange(4)  # keep the dataset itself valid
        d = Dataset(
            X=X,
            feature_names=("a", "b"),
            feature_kind=("continuous", "continuous"),
            row_ids=tuple(str(i) for i in range(4)),
        )
        stats = feature_stats(d, np.arange(4))
        assert stats.std[0] == 1.0
        Z = sample_neighborhood(d, stats, 0, 4000, seed=0)
        spread = np.std(Z[:, 0] - d.X[0, 0])
        assert 0.9 < spread < 1.1

    def test_single_category_never_changes(self):
        d = categorical_dataset([2.0, 2.0, 2.0, 2.0])
        stats = feature_stats(d, np.arange(4))
        Z = sample_neighborhood(d, stats, 1, 50, seed=3)
        assert np.all(Z[:, 1] == 2.0)

    def test_flip_probability(self):
        d = categorical_dataset([0.0, 1.0] * 50)
        stats = feature_stats(d, np.arange(100))
        Z = sample_neighborhood(d, stats, 0, 20000, seed=5, flip_prob=0.3)
        # anchor code is 0; draws are uniform over {0,1}, so the observed
        # change rate is flip_prob / 2
        changed = np.mean(Z[:, 1] != d.X[0, 1])
        assert abs(changed - 0.15) < 0.02


class TestKernel:
    def test_zero_distance_weight_one(self):
        x = np.array([1.0, -2.0])
        assert kernel_weights(x, x[None, :], KernelConfig(1.0))[0] == 1.0

    def test_analytic_e_minus_one(self):
        x = np.zeros(2)
        z = np.array([[1.0, 1.0]])  # squared distance 2
        psi = kernel_weights(x, z, KernelConfig(np.sqrt(2.0)))
        assert abs(psi[0] - np.exp(-1.0)) < 1e-12

    def test_default_width(self):
        assert KernelConfig.default(4).sigma == 0.75 * 2.0

    def test_invalid_width(self):
        with pytest.raises(ValueError):
            KernelConfig(0.0)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=500))
    def test_monotone_in_distance(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=3)
        Z = x + rng.normal(size=(10, 3))
        psi = kernel_weights(x, Z, KernelConfig(1.3))
        d = np.linalg.norm(Z - x, axis=1)
        order = np.argsort(d)
        assert np.all(np.diff(psi[order]) <= 1e-15)
        assert np.all((psi > 0) & (psi <= 1.0))


class TestCoordinateMap:
    def test_identity(self):
        m = CoordinateMap.identity(3)
        Z = np.random.default_rng(0).normal(size=(4, 3))
        assert np.array_equal(m.apply(Z), Z)

    def test_zscore_round_trip(self):
        d = gaussian_dataset(30, 4, 2)
        stats = feature_stats(d, np.arange(30))
        m = CoordinateMap.zscore(stats)
        Z = np.random.default_rng(1).normal(size=(10, 4))
        back = m.inverse(m.apply(Z))
        assert np.max(np.abs(back - Z)) < 1e-12

    def test_zscore_skips_categorical(self):
        d = categorical_dataset([0.0, 1.0, 0.0, 1.0])
        stats = feature_stats(d, np.arange(4))
        m = CoordinateMap.zscore(stats, d.feature_kind)
        Z = d.X[:2]
        G = m.apply(Z)
        assert np.array_equal(G[:, 1], Z[:, 1])  # categorical untouched
        assert not np.array_equal(G[:, 0], Z[:, 0])


class TestBuildNeighborhoods:
    def test_counts_and_oracle_passthrough(self):
        d = gaussian_dataset(3, 2, 4)
        stats = feature_stats(d, np.arange(3))
        oracle = make_synthetic_blackbox("linear", 2, 4)
        cfg = RunConfig(seed=4, neighborhood_size=10)
        nbhds = build_neighborhoods(
            d, stats, oracle, CoordinateMap.identity(2), cfg, np.arange(3)
        )
        assert len(nbhds) == 3
        assert sum(nb.m for nb in nbhds) == 30
        for nb in nbhds:
            want = predict_batch(oracle, nb.Z)
            assert np.allclose(nb.fz, want, rtol=0, atol=1e-12)
            assert np.array_equal(nb.G, nb.Z)  # identity map

    def test_order_invariance(self):
        d = gaussian_dataset(5, 2, 6)
        stats = feature_stats(d, np.arange(5))
        oracle = make_synthetic_blackbox("linear", 2, 6)
        cfg = RunConfig(seed=6, neighborhood_size=4)
        fwd = build_neighborhoods(
            d, stats, oracle, CoordinateMap.identity(2), cfg, [0, 1, 2, 3, 4]
        )
        rev = build_neighborhoods(
            d, stats, oracle, CoordinateMap.identity(2), cfg, [4, 3, 2, 1, 0]
        )
        by_anchor = {nb.anchor_idx: nb for nb in rev}
        for nb in fwd:
            assert np.array_equal(nb.Z, by_anchor[nb.anchor_idx].Z)

    def test_oracle_sees_raw_space(self):
        d = gaussian_dataset(3, 2, 8)
        stats = feature_stats(d, np.arange(3))
        oracle = make_synthetic_blackbox("linear", 2, 8)
        cfg = RunConfig(seed=8, neighborhood_size=6)
        zmap = CoordinateMap.zscore(stats)
        nbhds = build_neighborhoods(d, stats, oracle, zmap, cfg, np.arange(3))
        for nb in nbhds:
            assert np.allclose(nb.fz, predict_batch(oracle, nb.Z))
            assert np.allclose(nb.G, zmap.apply(nb.Z))
            assert not np.array_equal(nb.G, nb.Z)
