"""Kernel backend selection: compiled extension when available, numpy otherwise.

The compiled module (`mame._kernels._speedups`, built from Cython) and the
pure-Python module (`pybackend`) expose the same functions:

    cg_solve(A, ei, ej, rho, rhs, x, max_iter, rtol, work)
    admm_sweep(A, B, ei, ej, w, alphas, beta, rho, cg_iters, cg_rtol,
               theta, u, v, z1, z2, v_norms, work)
    primal_residuals(theta, u, v, ei, ej)
    run_until_feasible(..., feas_tol, max_inner)

Selection happens at import; set MAME_BACKEND=python|compiled to force one
(`compiled` raises if the extension is missing).
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from . import pybackend

try:
    from . import _speedups  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    _speedups = None


class Workspace:
    """Preallocated scratch for one path run (fixed p, n, edge list)."""

    __slots__ = ("rhs", "r", "pdir", "ap", "usign", "uprev", "vprev", "D")

    def __init__(self, p: int, n: int, edge_i: np.ndarray, edge_j: np.ndarray):
        self.rhs = np.empty((p, n))
        self.r = np.empty((p, n))
        self.pdir = np.empty((p, n))
        self.ap = np.empty((p, n))
        self.usign = np.empty((p, n))
        self.uprev = np.empty((p, n))
        self.vprev = np.empty((p, edge_i.shape[0]))
        m = edge_i.shape[0]
        rows = np.concatenate([edge_i, edge_j])
        cols = np.concatenate([np.arange(m), np.arange(m)])
        vals = np.concatenate([np.ones(m), -np.ones(m)])
        self.D = sp.csr_matrix((vals, (rows, cols)), shape=(n, m))


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _speedups is not None else ("python",)


def get_backend(name: str | None = None):
    """Resolve a backend module by name or the MAME_BACKEND environment var."""
    if name is None:
        name = os.environ.get("MAME_BACKEND", "auto")
    if name == "auto":
        return _speedups if _speedups is not None else pybackend
    if name == "python":
        return pybackend
    if name == "compiled":
        if _speedups is None:
            raise RuntimeError(
                "compiled backend requested but the extension is not built; "
                "reinstall the package or set MAME_BACKEND=python"
            )
        return _speedups
    raise ValueError(f"unknown backend {name!r}")


def backend_name(module) -> str:
    return "python" if module is pybackend else "compiled"
