"""Comparison methods: Two Step convex clustering and SP-LIME selection.

Two Step reuses the path machinery verbatim: the fidelity term becomes the
squared distance to the precomputed leaf explanations (identity design, unit
weight, no l1 term), so the same sweeps cluster explanation vectors instead
of fitting them. SP-LIME greedily picks a budget of representative instances
under a binary-support coverage objective weighted by feature importance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import RunConfig
from .graph import PriorGraph
from .lasso import LeafFit
from .solver import (
    PathSolution,
    QuadProblem,
    ar_path_from_problem,
    exact_path_from_problem,
)
from .tree import ExplanationTree, build_tree, median_representatives

SUPPORT_EPS = 1e-12


@dataclass(frozen=True)
class TwoStepPath:
    """Path over explanation space; omega holds the input leaf explanations."""

    omega: np.ndarray  # (p, n)
    path: PathSolution


@dataclass(frozen=True)
class SpLimeSelection:
    chosen: tuple[int, ...]
    importance: np.ndarray  # (p,)
    coverage_trace: tuple[float, ...]


def two_step_problem(omega: np.ndarray) -> QuadProblem:
    """Fidelity ||omega_i - theta_i||^2 per column: A_i = 2I, B_i = 2 omega_i."""
    p, n = omega.shape
    A = np.ascontiguousarray(np.broadcast_to(2.0 * np.eye(p), (n, p, p)).copy())
    return QuadProblem(
        A=A, B=np.ascontiguousarray(2.0 * omega), alphas=np.zeros(n)
    )


def two_step_path(
    leaf: LeafFit,
    g: PriorGraph,
    cfg: RunConfig,
    snapshot_all: bool = False,
    backend: str | None = None,
) -> TwoStepPath:
    """Convex-cluster the leaf explanations along the same beta schedule."""
    omega = np.ascontiguousarray(leaf.theta0, dtype=float)
    path = ar_path_from_problem(
        two_step_problem(omega), g, omega, cfg,
        snapshot_all=snapshot_all, backend=backend,
    )
    return TwoStepPath(omega=omega, path=path)


def two_step_exact_path(
    leaf: LeafFit,
    g: PriorGraph,
    cfg: RunConfig,
    beta_grid,
    backend: str | None = None,
) -> TwoStepPath:
    omega = np.ascontiguousarray(leaf.theta0, dtype=float)
    path = exact_path_from_problem(
        two_step_problem(omega), g, omega, cfg, beta_grid, backend=backend
    )
    return TwoStepPath(omega=omega, path=path)


def two_step_medians(ts: TwoStepPath, leaf: LeafFit) -> ExplanationTree:
    """Tree over the Two Step merges with coordinate-wise median representatives."""
    tree = build_tree(ts.path.merge_events, ts.path.n)
    return median_representatives(tree, leaf.theta0)


def feature_importance(theta: np.ndarray) -> np.ndarray:
    """Single-level importance: sqrt(sum_i |theta_ij|) per feature."""
    return np.sqrt(np.sum(np.abs(theta), axis=1))


def feature_importance_multilevel(snapshots) -> np.ndarray:
    """Importance pooled over levels: sqrt(sum_i sum_k |theta_ij^(k)|)."""
    snapshots = list(snapshots)
    if not snapshots:
        raise ValueError("need at least one snapshot")
    total = np.zeros(snapshots[0].shape[0])
    for theta in snapshots:
        total += np.sum(np.abs(theta), axis=1)
    return np.sqrt(total)


def sp_lime_pick(leaf: LeafFit, budget: int) -> SpLimeSelection:
    """Greedy submodular pick of representative, diverse leaf explanations.

    Coverage of a set S is sum_j I_j * 1[some i in S has theta_ij != 0] with
    I_j = sqrt(sum_i |theta_ij|); ties go to the lower instance index.
    """
    theta = leaf.theta0
    p, n = theta.shape
    if not 1 <= budget <= n:
        raise ValueError(f"budget must be in [1, {n}], got {budget}")
    importance = feature_importance(theta)
    support = np.abs(theta) > SUPPORT_EPS  # (p, n)
    covered = np.zeros(p, dtype=bool)
    chosen: list[int] = []
    trace: list[float] = []
    remaining = np.ones(n, dtype=bool)
    for _ in range(budget):
        gains = np.where(
            remaining,
            importance @ (support & ~covered[:, None]),
            -np.inf,
        )
        pick = int(np.argmax(gains))  # argmax takes the first max: low index
        chosen.append(pick)
        remaining[pick] = False
        covered |= support[:, pick]
        trace.append(float(importance @ covered))
    return SpLimeSelection(
        chosen=tuple(chosen),
        importance=importance,
        coverage_trace=tuple(trace),
    )


def coverage_value(theta: np.ndarray, subset) -> float:
    """Brute-force-friendly coverage of an instance subset."""
    importance = feature_importance(theta)
    support = np.abs(theta[:, list(subset)]) > SUPPORT_EPS
    return float(importance @ support.any(axis=1))
