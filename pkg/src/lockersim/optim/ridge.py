"""Inequality-constrained ridge regression via a primal active-set method.

Minimizes ``||nu - X theta||^2 + gamma * sum(theta_j^2 over penalized j)``
subject to homogeneous inequality rows ``A theta_orig >= 0`` stated on the
back-transformed (original-scale) weights. The constraint matrix is moved
into standardized space, the QP is solved there (the zero vector is
always feasible), and the minimizer is mapped back. KKT residuals are
verified to 1e-9 before returning.
"""

from __future__ import annotations

import numpy as np

from .model import RidgeProblem

_KKT_TOL = 1e-9
_MAX_ITER = 10_000


class QpError(RuntimeError):
    """Active-set failure with diagnostics; never silently swallowed."""


def back_transform(theta_std: np.ndarray, col_mean: np.ndarray,
                   col_scale: np.ndarray) -> np.ndarray:
    """Map standardized-space coefficients to original-scale weights.

    Column 0 is the intercept carrier: theta_orig[j] = theta_std[j]/s_j
    for j >= 1 and the intercept absorbs the centering shifts.
    """
    theta = theta_std / col_scale
    theta[0] = theta_std[0] - float(np.sum(theta_std[1:] * col_mean[1:] / col_scale[1:]))
    return theta


def _constraints_to_std(A: np.ndarray, col_mean: np.ndarray,
                        col_scale: np.ndarray) -> np.ndarray:
    """Rewrite rows a @ theta_orig >= 0 as rows over standardized coefficients."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    G = A / col_scale[None, :]
    # an intercept entry a_0 contributes a_0 * (theta_std_0 - sum mu_j/s_j * theta_std_j)
    G[:, 0] = A[:, 0]
    G[:, 1:] -= np.outer(A[:, 0], col_mean[1:] / col_scale[1:])
    return G


def qp_ridge_constrained(problem: RidgeProblem) -> np.ndarray:
    """Solve the (possibly constrained) ridge problem; returns original-scale weights."""
    X = problem.X
    nu = problem.nu
    p = X.shape[1]
    penalize = np.asarray(problem.penalize, dtype=bool)

    H = 2.0 * (X.T @ X + problem.gamma * np.diag(penalize.astype(float)))
    g = -2.0 * (X.T @ nu)

    if problem.constraints is None or len(problem.constraints) == 0:
        step, _ = _solve_equality(H, g, np.zeros((0, p)))
        theta_std = step  # single Newton step from the origin
        _check_kkt(H, g, np.zeros((0, p)), theta_std, np.zeros(0))
        return back_transform(theta_std, problem.col_mean, problem.col_scale)

    G = _constraints_to_std(problem.constraints, problem.col_mean, problem.col_scale)
    theta_std, mu, active = _active_set(H, g, G)
    mu_full = np.zeros(G.shape[0])
    mu_full[active] = mu
    _check_kkt(H, g, G, theta_std, mu_full)
    return back_transform(theta_std, problem.col_mean, problem.col_scale)


def _solve_equality(H, g, A_eq):
    """Minimize 0.5 p'Hp + g'p subject to A_eq p = 0 via the KKT system.

    Returns (p, mu) where stationarity reads H p + g = A_eq' mu.
    """
    n = H.shape[0]
    m = A_eq.shape[0]
    if m == 0:
        try:
            return np.linalg.solve(H, -g), np.zeros(0)
        except np.linalg.LinAlgError as exc:
            raise QpError(f"singular Hessian (p={n}): {exc}") from exc
    K = np.zeros((n + m, n + m))
    K[:n, :n] = H
    K[:n, n:] = -A_eq.T
    K[n:, :n] = A_eq
    rhs = np.concatenate([-g, np.zeros(m)])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError as exc:
        raise QpError(f"singular KKT system (p={n}, active={m}): {exc}") from exc
    return sol[:n], sol[n:]


def _active_set(H, g, G):
    """Primal active-set loop for G x >= 0 starting from the feasible origin."""
    n = H.shape[0]
    m = G.shape[0]
    x = np.zeros(n)
    work: list[int] = []

    for _ in range(_MAX_ITER):
        A_w = G[work] if work else np.zeros((0, n))
        step, mu = _solve_equality(H, H @ x + g, A_w)
        if float(np.max(np.abs(step), initial=0.0)) <= 1e-11:
            if not work:
                return x, np.zeros(0), []
            worst = int(np.argmin(mu))
            if mu[worst] >= -_KKT_TOL:
                return x, mu, list(work)
            work.pop(worst)
            continue
        # longest feasible move along step w.r.t. constraints outside the set
        alpha = 1.0
        blocker = -1
        for i in range(m):
            if i in work:
                continue
            slope = float(G[i] @ step)
            if slope < -1e-12:
                bound = -float(G[i] @ x) / slope
                if bound < alpha - 1e-15:
                    alpha = max(bound, 0.0)
                    blocker = i
        x = x + alpha * step
        if blocker >= 0:
            work.append(blocker)
    raise QpError(f"active-set did not converge within {_MAX_ITER} iterations "
                  f"(p={n}, m={m}, |working|={len(work)})")


def _check_kkt(H, g, G, x, mu):
    """Stationarity, primal/dual feasibility and complementarity to 1e-9."""
    grad = H @ x + g
    if G.shape[0]:
        grad = grad - G.T @ mu
    scale = max(1.0, float(np.max(np.abs(H))), float(np.max(np.abs(g))))
    stat = float(np.max(np.abs(grad), initial=0.0))
    feas = float(np.min(G @ x)) if G.shape[0] else 0.0
    dual = float(np.min(mu, initial=0.0))
    comp = float(np.max(np.abs(mu * (G @ x)), initial=0.0)) if G.shape[0] else 0.0
    if stat > _KKT_TOL * scale or feas < -_KKT_TOL or dual < -_KKT_TOL or comp > _KKT_TOL * scale:
        raise QpError(
            f"KKT residual too large: stationarity {stat:.3e}, primal {feas:.3e}, "
            f"dual {dual:.3e}, complementarity {comp:.3e}"
        )
