"""Pure-numpy implementation of the hot ADMM kernels.

Mirrors the compiled extension's API exactly; selected automatically when the
extension is unavailable (or forced via MAME_BACKEND=python). All state
arrays are updated in place so callers can hot-loop without reallocating.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _matvec(A, X, ei, ej, rho, D, out):
    """out = batch(A_i x_i) + rho*X + rho*(X D D^T)."""
    np.einsum("ijk,ki->ji", A, X, out=out)
    out += rho * X
    diff = X[:, ei] - X[:, ej]
    out += rho * (D @ diff.T).T


def cg_solve(A, ei, ej, rho, rhs, x, max_iter, rtol, work):
    """Conjugate gradients on the coupled theta system; x updated in place.

    Returns (iterations, relative_residual). A zero right-hand side has the
    exact solution 0 (the operator is positive definite), returned directly.
    """
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        x[:] = 0.0
        return 0, 0.0
    D = work.D
    ap, r, p_dir = work.ap, work.r, work.pdir
    _matvec(A, x, ei, ej, rho, D, ap)
    np.subtract(rhs, ap, out=r)
    np.copyto(p_dir, r)
    rs = float(np.vdot(r, r))
    it = 0
    while it < max_iter and np.sqrt(rs) > rtol * bnorm:
        _matvec(A, p_dir, ei, ej, rho, D, ap)
        denom = float(np.vdot(p_dir, ap))
        if denom <= 0.0:
            break  # numerically exhausted
        step = rs / denom
        x += step * p_dir
        r -= step * ap
        rs_new = float(np.vdot(r, r))
        p_dir *= rs_new / rs
        p_dir += r
        rs = rs_new
        it += 1
    return it, float(np.sqrt(rs) / bnorm)


def admm_sweep(
    A,
    B,
    ei,
    ej,
    w,
    alphas,
    beta,
    rho,
    cg_iters,
    cg_rtol,
    theta,
    u,
    v,
    z1,
    z2,
    v_norms,
    work,
):
    """One full pass of the theta/u/v/dual updates; returns ||V||_F.

    theta, u, v, z1, z2 and v_norms are all updated in place.
    """
    D = work.D
    rhs = work.rhs
    # theta subproblem right-hand side
    np.multiply(rho, u, out=rhs)
    rhs -= rho * z1
    rhs += B
    rhs += rho * (D @ (v - z2).T).T
    cg_solve(A, ei, ej, rho, rhs, theta, cg_iters, cg_rtol, work)
    # u: per-column soft threshold at alpha_i / rho
    np.add(theta, z1, out=u)
    kappa = alphas / rho
    np.sign(u, out=work.usign)
    np.abs(u, out=u)
    u -= kappa[None, :]
    np.maximum(u, 0.0, out=u)
    u *= work.usign
    # v: per-edge block soft threshold at beta * w_l / rho
    a = theta[:, ei] - theta[:, ej] + z2
    norms = np.linalg.norm(a, axis=0)
    thr = (beta / rho) * w
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > thr, 1.0 - thr / norms, 0.0)
    scale[norms == 0.0] = 0.0
    v[:] = a * scale
    np.multiply(norms, scale, out=v_norms)
    # scaled dual ascent
    z1 += theta
    z1 -= u
    np.subtract(a, v, out=z2)
    return float(np.linalg.norm(v_norms))


def primal_residuals(theta, u, v, ei, ej):
    """(||Theta - U||_F, ||Theta D - V||_F)."""
    r1 = float(np.linalg.norm(theta - u))
    r2 = float(np.linalg.norm(theta[:, ei] - theta[:, ej] - v))
    return r1, r2


def run_until_feasible(
    A,
    B,
    ei,
    ej,
    w,
    alphas,
    beta,
    rho,
    cg_iters,
    cg_rtol,
    theta,
    u,
    v,
    z1,
    z2,
    v_norms,
    work,
    feas_tol,
    max_inner,
):
    """Sweep until primal and scaled dual residuals drop below feas_tol.

    The dual part (rho times the iterate change in U and V) guards against
    transient dips of the primal residuals before the fixed point. Returns
    the number of sweeps used, or -1 if max_inner was exhausted.
    """
    uprev, vprev = work.uprev, work.vprev
    for it in range(max_inner):
        uprev[:] = u
        vprev[:] = v
        admm_sweep(
            A, B, ei, ej, w, alphas, beta, rho, cg_iters, cg_rtol,
            theta, u, v, z1, z2, v_norms, work,
        )
        r1, r2 = primal_residuals(theta, u, v, ei, ej)
        dual = rho * max(
            float(np.linalg.norm(u - uprev)), float(np.linalg.norm(v - vprev))
        )
        if max(r1, r2, dual) <= feas_tol:
            return it + 1
    return -1
