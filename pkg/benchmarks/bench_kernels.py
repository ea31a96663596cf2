"""Benchmark the ADMM sweep kernels: compiled extension vs numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sweeps 400]

Reports per-sweep wall time for both backends across problem sizes, plus an
end-to-end fast-path comparison. The sweep is the unit of work the whole
path solver multiplies by thousands, so this ratio is the one that matters.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mame._kernels import Workspace, available_backends, get_backend
from mame.data import RunConfig
from mame.graph import incidence, prediction_chain_graph
from mame.lasso import LeafFit
from mame.solver import QuadProblem, ar_path_from_problem, init_state


def make_problem(n: int, p: int, seed: int = 0, m: int = 10):
    """Synthetic Gram-form problem: the sweep cost only depends on shapes."""
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(n, m, p))
    psi = np.exp(-rng.random((n, m)))
    fz = rng.normal(size=(n, m))
    A = np.ascontiguousarray(
        2.0 * np.einsum("imp,im,imq->ipq", G, psi, G)
    )
    B = np.ascontiguousarray(2.0 * np.einsum("imp,im,im->pi", G, psi, fz))
    prob = QuadProblem(A=A, B=B, alphas=np.abs(rng.normal(size=n)))
    theta0 = np.ascontiguousarray(rng.normal(size=(p, n)))
    leaf = LeafFit(theta0=theta0, alpha=prob.alphas, nnz=np.full(n, p))
    graph = prediction_chain_graph(rng.normal(size=n))
    cfg = RunConfig(seed=seed)
    return prob, graph, leaf, cfg


def time_sweeps(backend_name: str, prob, graph, leaf, cfg, sweeps: int) -> float:
    bk = get_backend(backend_name)
    inc = incidence(graph)
    state = init_state(leaf.theta0, inc, cfg.epsilon)
    work = Workspace(prob.p, prob.n, inc.edge_i, inc.edge_j)
    v_norms = np.empty(inc.num_edges)
    beta = cfg.epsilon
    args = (prob.A, prob.B, inc.edge_i, inc.edge_j, graph.weights, prob.alphas)
    for _ in range(20):  # warm-up
        bk.admm_sweep(
            *args, beta, cfg.rho, cfg.cg_iters, 1e-14,
            state.Theta, state.U, state.V, state.Z1, state.Z2, v_norms, work,
        )
        beta *= cfg.t
    started = time.perf_counter()
    for _ in range(sweeps):
        bk.admm_sweep(
            *args, beta, cfg.rho, cfg.cg_iters, 1e-14,
            state.Theta, state.U, state.V, state.Z1, state.Z2, v_norms, work,
        )
        beta *= cfg.t
    return (time.perf_counter() - started) / sweeps


def time_full_path(backend_name: str, prob, graph, leaf, cfg) -> tuple[float, int]:
    started = time.perf_counter()
    path = ar_path_from_problem(
        prob, graph, leaf.theta0, cfg, backend=backend_name
    )
    return time.perf_counter() - started, len(path.levels)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sweeps", type=int, default=400)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"{'size':>14} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")
    for n, p in ((20, 4), (50, 8), (100, 8), (200, 16)):
        prob, graph, leaf, cfg = make_problem(n, p)
        per = {
            b: time_sweeps(b, prob, graph, leaf, cfg, args.sweeps)
            for b in backends
        }
        row = f"n={n:<4} p={p:<4}"
        cells = " ".join(f"{per[b] * 1e6:>10.1f}us" for b in backends)
        speed = (
            f"{per['python'] / per['compiled']:.1f}x"
            if "compiled" in per
            else "n/a"
        )
        print(f"{row:>14} {cells}   {speed}")

    print("\nfull fast path (t=1.05, n=50 p=8):")
    prob, graph, leaf, cfg = make_problem(50, 8)
    cfg = RunConfig(seed=0, t=1.05)
    for b in backends:
        secs, levels = time_full_path(b, prob, graph, leaf, cfg)
        print(f"  {b:>9}: {secs:.3f}s over {levels} levels")


if __name__ == "__main__":
    main()
