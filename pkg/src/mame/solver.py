"""Leaf fits, ADMM updates, and the regularization path solvers.

The joint objective couples per-instance weighted lassos through a group
penalty on explanation differences over prior-graph edges:

    sum_i sum_z psi(f(z) - g(z)^T theta_i)^2 + alpha_i ||theta_i||_1
        + beta sum_l w_l ||theta_i - theta_j||_2

Splitting Theta = U (l1 block) and Theta D = V (group block) gives four
closed-form-or-linear updates per sweep:

  theta: conjugate gradients on the coupled positive-definite system
         (2 G_i' Psi G_i + rho I) theta_i + rho (Theta D D')_i = rhs_i
  u:     per-column soft threshold at alpha_i / rho
  v:     per-edge group soft threshold at beta w_l / rho
  duals: Z1 += Theta - U,  Z2 += Theta D - V

Two path modes share the machinery. The fast mode sweeps once per level on
the geometric schedule beta_k = epsilon * t^k, recording cluster merges when
an edge's v-column norm drops under the grouping threshold. The exact mode
iterates each grid level until primal and scaled dual residuals vanish,
warm-starting from the previous level, and snapshots every grid point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ._kernels import Workspace, backend_name, get_backend
from .data import RunConfig
from .errors import ConvergenceError
from .graph import Incidence, PriorGraph, incidence
from .lasso import LeafFit, fit_leaves, neighborhood_quad
from .tree import DisjointSet, MergeEvent, record_merge

AR_ITER_CAP = 1_000_000
EXACT_INNER_CAP = 100_000
AR_CG_RTOL = 1e-14
EXACT_CG_RTOL = 1e-10
EXACT_FEAS_SCALE = 1e-8

__all__ = [
    "AdmmState",
    "PathLevel",
    "PathSolution",
    "QuadProblem",
    "ar_path_from_problem",
    "build_problem",
    "exact_path_from_problem",
    "fit_leaves",
    "run_ar_path",
    "run_exact_path",
    "theta_update",
    "u_update",
    "v_update",
    "dual_update",
]


@dataclass(frozen=True)
class QuadProblem:
    """Per-column quadratic fidelity in Gram form plus the l1 weights.

    A[i] = 2 G_i' Psi_i G_i and B[:, i] = 2 G_i' Psi_i f_i, so the fidelity
    term equals 0.5 theta_i' A_i theta_i - B_i' theta_i up to a constant.
    """

    A: np.ndarray  # (n, p, p)
    B: np.ndarray  # (p, n)
    alphas: np.ndarray  # (n,)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.A.shape[1]


@dataclass
class AdmmState:
    Theta: np.ndarray  # (p, n)
    U: np.ndarray  # (p, n)
    V: np.ndarray  # (p, |E|)
    Z1: np.ndarray  # (p, n)
    Z2: np.ndarray  # (p, |E|)
    beta: float
    k: int = 0


@dataclass(frozen=True)
class PathLevel:
    k: int
    beta: float
    merged_edges: tuple[int, ...]
    components: int


@dataclass(frozen=True)
class PathSolution:
    """Levels, merge events, and Theta snapshots of one path run."""

    mode: str  # "ar" or "exact"
    n: int
    p: int
    levels: list[PathLevel]
    snapshots: dict[int, np.ndarray]
    merge_events: list[MergeEvent]
    wall_times: list[float] = field(repr=False, default_factory=list)

    @property
    def betas(self) -> np.ndarray:
        return np.array([lv.beta for lv in self.levels])

    @property
    def final_theta(self) -> np.ndarray:
        return self.snapshots[self.levels[-1].k]


def build_problem(nbhds, leaf: LeafFit) -> QuadProblem:
    """Gram-form fidelity for the sampled neighborhoods."""
    quads = [neighborhood_quad(nb) for nb in nbhds]
    A = np.ascontiguousarray(np.stack([2.0 * q.Q for q in quads]))
    B = np.ascontiguousarray(np.column_stack([2.0 * q.c for q in quads]))
    return QuadProblem(A=A, B=B, alphas=np.asarray(leaf.alpha, dtype=float))


def init_state(theta0: np.ndarray, inc: Incidence, epsilon: float) -> AdmmState:
    theta = np.ascontiguousarray(theta0, dtype=float)
    return AdmmState(
        Theta=theta.copy(),
        U=theta.copy(),
        V=np.ascontiguousarray(inc.apply(theta)),
        Z1=np.zeros_like(theta),
        Z2=np.zeros((theta.shape[0], inc.num_edges)),
        beta=epsilon,
        k=0,
    )


# ---------------------------------------------------------------------------
# Reference single-step updates. These are the tested contracts; the path
# drivers below run the same math through the selected kernel backend.
# ---------------------------------------------------------------------------


def theta_update(
    state: AdmmState,
    prob: QuadProblem,
    inc: Incidence,
    cfg: RunConfig,
    exact: bool = False,
) -> np.ndarray:
    """Solve the coupled quadratic subproblem for Theta by warm-started CG.

    Fast mode caps CG at cfg.cg_iters; exact mode runs to relative residual
    1e-10. Returns a new matrix; the state is left untouched.
    """
    if not np.all(np.isfinite(state.Theta)):
        raise ValueError("non-finite state")
    rhs = (
        prob.B
        + cfg.rho * (state.U - state.Z1)
        + cfg.rho * inc.apply_transpose(state.V - state.Z2)
    )
    if not np.all(np.isfinite(rhs)):
        raise ValueError("non-finite right-hand side in theta update")
    x = np.ascontiguousarray(state.Theta.copy())
    work = Workspace(prob.p, prob.n, inc.edge_i, inc.edge_j)
    backend = get_backend()
    if exact:
        max_iter, rtol = 4 * prob.p * prob.n + 50, EXACT_CG_RTOL
    else:
        max_iter, rtol = cfg.cg_iters, AR_CG_RTOL
    backend.cg_solve(
        prob.A, inc.edge_i, inc.edge_j, cfg.rho,
        np.ascontiguousarray(rhs), x, max_iter, rtol, work,
    )
    return x


def u_update(state: AdmmState, leaf: LeafFit, cfg: RunConfig) -> np.ndarray:
    """Per-column l1 prox: soft threshold of Theta + Z1 at alpha_i / rho."""
    target = state.Theta + state.Z1
    kappa = np.asarray(leaf.alpha, dtype=float) / cfg.rho
    return np.sign(target) * np.maximum(np.abs(target) - kappa[None, :], 0.0)


def v_update(
    state: AdmmState,
    g: PriorGraph,
    cfg: RunConfig,
    beta: float | None = None,
) -> np.ndarray:
    """Per-edge group prox: block soft threshold at beta * w_l / rho."""
    beta = state.beta if beta is None else beta
    a = state.Theta[:, g.edge_i] - state.Theta[:, g.edge_j] + state.Z2
    norms = np.linalg.norm(a, axis=0)
    thr = beta * g.weights / cfg.rho
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > thr, 1.0 - thr / norms, 0.0)
    scale[norms == 0.0] = 0.0
    return a * scale


def dual_update(state: AdmmState, inc: Incidence) -> tuple[np.ndarray, np.ndarray]:
    """Scaled dual ascent on both constraint blocks."""
    z1 = state.Z1 + (state.Theta - state.U)
    z2 = state.Z2 + (inc.apply(state.Theta) - state.V)
    return z1, z2


# ---------------------------------------------------------------------------
# Path drivers
# ---------------------------------------------------------------------------


def _prepare(prob: QuadProblem, graph: PriorGraph, theta0: np.ndarray, cfg):
    inc = incidence(graph)
    state = init_state(theta0, inc, cfg.epsilon)
    work = Workspace(prob.p, prob.n, inc.edge_i, inc.edge_j)
    v_norms = np.empty(inc.num_edges)
    weights = np.ascontiguousarray(graph.weights, dtype=float)
    return inc, state, work, v_norms, weights


def run_ar_path(
    nbhds,
    graph: PriorGraph,
    leaf: LeafFit,
    cfg: RunConfig,
    snapshot_all: bool = False,
    backend: str | None = None,
) -> PathSolution:
    """Fast path over the sampled neighborhoods, starting from the leaf fit."""
    prob = build_problem(nbhds, leaf)
    return ar_path_from_problem(
        prob, graph, leaf.theta0, cfg, snapshot_all=snapshot_all, backend=backend
    )


def run_exact_path(
    nbhds,
    graph: PriorGraph,
    leaf: LeafFit,
    cfg: RunConfig,
    beta_grid,
    backend: str | None = None,
) -> PathSolution:
    """Exact path over the sampled neighborhoods on an explicit beta grid."""
    prob = build_problem(nbhds, leaf)
    return exact_path_from_problem(
        prob, graph, leaf.theta0, cfg, beta_grid, backend=backend
    )


def ar_path_from_problem(
    prob: QuadProblem,
    graph: PriorGraph,
    theta0: np.ndarray,
    cfg: RunConfig,
    snapshot_all: bool = False,
    backend: str | None = None,
) -> PathSolution:
    """One ADMM sweep per level on the geometric beta schedule.

    Starts from the leaf solution (Theta = U = theta0, V = Theta D, zero
    duals) and stops once ||V||_F falls below cfg.tol, i.e. every edge
    difference has fused. Theta is snapshotted at merge levels plus both
    endpoints (every level with snapshot_all). Raises ConvergenceError at
    the hard level cap.
    """
    bk = get_backend(backend)
    inc, state, work, v_norms, weights = _prepare(prob, graph, theta0, cfg)
    ds = DisjointSet(prob.n)
    levels: list[PathLevel] = []
    events: list[MergeEvent] = []
    snapshots: dict[int, np.ndarray] = {0: state.Theta.copy()}
    wall: list[float] = []

    k = 0
    while True:
        if k >= AR_ITER_CAP:
            raise ConvergenceError(
                f"AR path hit the {AR_ITER_CAP}-level cap; last ||V||_F = "
                f"{float(np.linalg.norm(state.V)):.3e}"
            )
        beta = cfg.epsilon * cfg.t**k
        started = time.perf_counter()
        v_fro = bk.admm_sweep(
            prob.A, prob.B, inc.edge_i, inc.edge_j, weights, prob.alphas,
            beta, cfg.rho, cfg.cg_iters, AR_CG_RTOL,
            state.Theta, state.U, state.V, state.Z1, state.Z2, v_norms, work,
        )
        wall.append(time.perf_counter() - started)

        merged: list[int] = []
        for l in np.flatnonzero(v_norms < cfg.tau):
            ev = record_merge(
                ds, int(inc.edge_i[l]), int(inc.edge_j[l]), k, beta
            )
            if ev is not None:
                merged.append(int(l))
                events.append(ev)
        levels.append(
            PathLevel(
                k=k,
                beta=beta,
                merged_edges=tuple(merged),
                components=ds.component_count,
            )
        )
        if merged or snapshot_all:
            snapshots[k] = state.Theta.copy()
        if v_fro <= cfg.tol:
            break
        k += 1

    snapshots.setdefault(k, state.Theta.copy())
    return PathSolution(
        mode="ar",
        n=prob.n,
        p=prob.p,
        levels=levels,
        snapshots=snapshots,
        merge_events=events,
        wall_times=wall,
    )


def exact_path_from_problem(
    prob: QuadProblem,
    graph: PriorGraph,
    theta0: np.ndarray,
    cfg: RunConfig,
    beta_grid,
    backend: str | None = None,
) -> PathSolution:
    """Converged ADMM solution at every grid level, warm-started in order.

    Each level iterates full sweeps until both primal residuals and the
    scaled dual residual drop below 1e-8 sqrt(p n) (hard cap 1e5 inner
    iterations -> ConvergenceError). Snapshots are stored at every grid
    point.
    """
    beta_grid = [float(b) for b in beta_grid]
    if any(b2 < b1 for b1, b2 in zip(beta_grid, beta_grid[1:])):
        raise ValueError("beta_grid must be ascending")
    if not beta_grid:
        raise ValueError("beta_grid is empty")
    bk = get_backend(backend)
    inc, state, work, v_norms, weights = _prepare(prob, graph, theta0, cfg)
    ds = DisjointSet(prob.n)
    feas_tol = EXACT_FEAS_SCALE * np.sqrt(prob.p * prob.n)
    cg_cap = 4 * prob.p * prob.n + 50

    levels: list[PathLevel] = []
    events: list[MergeEvent] = []
    snapshots: dict[int, np.ndarray] = {}
    wall: list[float] = []

    for k, beta in enumerate(beta_grid):
        started = time.perf_counter()
        used = bk.run_until_feasible(
            prob.A, prob.B, inc.edge_i, inc.edge_j, weights, prob.alphas,
            beta, cfg.rho, cg_cap, EXACT_CG_RTOL,
            state.Theta, state.U, state.V, state.Z1, state.Z2, v_norms, work,
            feas_tol, EXACT_INNER_CAP,
        )
        if used < 0:
            raise ConvergenceError(
                f"exact solve at beta={beta:.3e} exceeded "
                f"{EXACT_INNER_CAP} inner iterations"
            )
        wall.append(time.perf_counter() - started)
        merged = []
        for l in np.flatnonzero(v_norms < cfg.tau):
            ev = record_merge(
                ds, int(inc.edge_i[l]), int(inc.edge_j[l]), k, beta
            )
            if ev is not None:
                merged.append(int(l))
                events.append(ev)
        levels.append(
            PathLevel(
                k=k,
                beta=beta,
                merged_edges=tuple(merged),
                components=ds.component_count,
            )
        )
        snapshots[k] = state.Theta.copy()

    return PathSolution(
        mode="exact",
        n=prob.n,
        p=prob.p,
        levels=levels,
        snapshots=snapshots,
        merge_events=events,
        wall_times=wall,
    )


def solver_backend_name(backend: str | None = None) -> str:
    return backend_name(get_backend(backend))
