"""Quantitative metrics and the fast-vs-exact study harness.

Generalized fidelity routes every test point through its nearest training
anchor (Euclidean, lowest index on ties), predicts with that anchor's
cluster representative, and scores R^2 against the black-box outputs.
Feature-importance agreement is Kendall's tau-b over descending-importance
ranks. The study harness runs the fast and exact paths over a grid of step
sizes and reports the normalized max-mean-infimum distance between the two
snapshot families along with wall times.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import kendalltau, rankdata

from .data import RunConfig
from .errors import MameError
from .graph import PriorGraph
from .lasso import LeafFit
from .neighborhood import CoordinateMap
from .oracles import Oracle, predict_batch
from .solver import PathSolution, build_problem, run_exact_path
from .solver import ar_path_from_problem
from .tree import LevelView


@dataclass(frozen=True)
class FidelityPoint:
    clusters: int
    r_squared: float
    undefined: bool = False


@dataclass(frozen=True)
class FidelityCurve:
    method: str
    points: tuple[FidelityPoint, ...]


@dataclass(frozen=True)
class ArExactReport:
    t_grid: tuple[float, ...]
    normalized_distance: tuple[float, ...]
    ar_seconds: tuple[float, ...]
    exact_seconds: tuple[float, ...]

    def rows(self):
        return list(
            zip(self.t_grid, self.normalized_distance, self.ar_seconds,
                self.exact_seconds)
        )


def nearest_training(
    x_test: np.ndarray, X_train: np.ndarray, candidate_idx
) -> int:
    """Index of the closest candidate row by Euclidean distance (low-index ties)."""
    candidates = np.asarray(list(candidate_idx), dtype=int)
    if candidates.size == 0:
        raise ValueError("candidate list is empty")
    d = np.linalg.norm(X_train[candidates] - x_test, axis=1)
    return int(candidates[np.argmin(d)])


def r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> tuple[float, bool]:
    """R^2 with the test-mean baseline; flags zero-variance targets."""
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        return float("nan"), True
    ss_err = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_err / ss_tot, False


def fidelity_at_view(
    view: LevelView,
    coord_map: CoordinateMap,
    X_test: np.ndarray,
    X_train: np.ndarray,
    fz_test: np.ndarray,
) -> FidelityPoint:
    """One fidelity point: candidates are exactly the instances in the view.

    For tree levels that is every training row (the clusters partition the
    set); for SP-LIME views only the chosen representatives appear, matching
    the protocol of picking the nearest chosen anchor.
    """
    theta_of: dict[int, np.ndarray] = {}
    for members, theta in view.clusters:
        if theta is None:
            raise ValueError("level view has no representatives")
        for m in members:
            theta_of[m] = theta
    candidates = sorted(theta_of)
    G_test = coord_map.apply(X_test)
    preds = np.empty(X_test.shape[0])
    for r in range(X_test.shape[0]):
        anchor = nearest_training(X_test[r], X_train, candidates)
        preds[r] = G_test[r] @ theta_of[anchor]
    r2, undefined = r_squared(fz_test, preds)
    return FidelityPoint(
        clusters=view.cluster_count, r_squared=r2, undefined=undefined
    )


def generalized_fidelity(
    levels,
    coord_map: CoordinateMap,
    oracle: Oracle,
    X_test: np.ndarray,
    X_train: np.ndarray,
    method: str,
) -> FidelityCurve:
    """Fidelity across the given level views, one point per cluster count."""
    fz_test = predict_batch(oracle, X_test)
    points = tuple(
        fidelity_at_view(view, coord_map, X_test, X_train, fz_test)
        for view in levels
    )
    return FidelityCurve(method=method, points=points)


def importance_ranks(importance: np.ndarray) -> np.ndarray:
    """Ranks by descending importance; ties get the average rank."""
    return rankdata(-np.asarray(importance, dtype=float), method="average")


def kendall_tau(rank_a, rank_b) -> float:
    """Tie-corrected Kendall correlation (tau-b) between two rank vectors."""
    rank_a = np.asarray(rank_a, dtype=float)
    rank_b = np.asarray(rank_b, dtype=float)
    if rank_a.shape != rank_b.shape or rank_a.ndim != 1:
        raise ValueError("rank vectors must be 1-D and the same length")
    if rank_a.size < 2:
        raise ValueError("need at least 2 items")
    return float(kendalltau(rank_a, rank_b, variant="b").statistic)


def rank_correlation(
    importance_method: np.ndarray, importance_blackbox: np.ndarray
) -> float:
    return kendall_tau(
        importance_ranks(importance_method),
        importance_ranks(importance_blackbox),
    )


def _min_distances(stack_a: np.ndarray, stack_b: np.ndarray) -> np.ndarray:
    """min_b ||a - b||_F for every row a of the flattened snapshot stacks.

    The Gram expansion locates each argmin cheaply; the winning distance is
    then recomputed directly, since the expansion cancels catastrophically
    for near-identical snapshots.
    """
    sq_a = np.sum(stack_a**2, axis=1)[:, None]
    sq_b = np.sum(stack_b**2, axis=1)[None, :]
    d2 = sq_a + sq_b - 2.0 * (stack_a @ stack_b.T)
    np.maximum(d2, 0.0, out=d2)
    nearest = d2.argmin(axis=1)
    return np.linalg.norm(stack_a - stack_b[nearest], axis=1)


def path_distance(ar: PathSolution, exact: PathSolution) -> float:
    """max of the two mean infimum distances between snapshot families."""
    ar_stack = np.stack(
        [ar.snapshots[lv.k].ravel() for lv in ar.levels if lv.k in ar.snapshots]
    )
    ex_stack = np.stack([exact.snapshots[lv.k].ravel() for lv in exact.levels])
    d_k = float(np.mean(_min_distances(ar_stack, ex_stack)))
    d_b = float(np.mean(_min_distances(ex_stack, ar_stack)))
    return max(d_k, d_b)


def leaf_spread(leaf: LeafFit, graph: PriorGraph) -> float:
    """mu: the largest leaf-explanation distance across any prior edge."""
    diffs = leaf.theta0[:, graph.edge_i] - leaf.theta0[:, graph.edge_j]
    return float(np.max(np.linalg.norm(diffs, axis=0)))


def ar_exact_study(
    nbhds,
    graph: PriorGraph,
    leaf: LeafFit,
    cfg: RunConfig,
    t_grid,
    epsilon: float,
    backend: str | None = None,
) -> ArExactReport:
    """Fast-vs-exact comparison over a grid of multiplicative step sizes.

    For each t the fast path runs with snapshots at every level, the exact
    path solves the same beta grid, and the snapshot-family distance is
    normalized by p * n * mu where mu is the largest edge-wise leaf distance.
    Rows come back sorted ascending by t.
    """
    mu = leaf_spread(leaf, graph)
    if mu == 0.0:
        raise MameError(
            "all adjacent leaf explanations are identical (mu = 0); the "
            "normalized distance is undefined"
        )
    prob = build_problem(nbhds, leaf)
    norm = prob.p * prob.n * mu
    t_sorted = sorted(float(t) for t in t_grid)
    distances, ar_secs, exact_secs = [], [], []
    for t in t_sorted:
        cfg_t = replace(cfg, t=t, epsilon=epsilon)
        ar = ar_path_from_problem(
            prob, graph, leaf.theta0, cfg_t, snapshot_all=True, backend=backend
        )
        grid = [lv.beta for lv in ar.levels]
        exact = run_exact_path(nbhds, graph, leaf, cfg_t, grid, backend=backend)
        distances.append(path_distance(ar, exact) / norm)
        ar_secs.append(float(sum(ar.wall_times)))
        exact_secs.append(float(sum(exact.wall_times)))
    return ArExactReport(
        t_grid=tuple(t_sorted),
        normalized_distance=tuple(distances),
        ar_seconds=tuple(ar_secs),
        exact_seconds=tuple(exact_secs),
    )
