"""Independent brute-force oracles used to validate the fast paths.

Everything here trades speed for obviousness: full grid enumeration for
integer programs, basis enumeration for LPs, projected gradient for the
ridge QP, and explicit per-compartment plan search for the feasibility
check. None of these share code with the implementations they audit.
"""

from __future__ import annotations

import itertools

import numpy as np

from .optim.model import NO_BOUND, IntModel, LpModel, RidgeProblem


def enumerate_ilp(model: IntModel):
    """Solve a tiny IntModel by enumerating the whole integer box.

    Returns (status, objective, x). Intended for models with at most a
    few thousand lattice points.
    """
    n = model.n_vars
    if n == 0:
        ok = bool(np.all(model.row_lo <= 0) and np.all(model.row_hi >= 0))
        return ("optimal" if ok else "infeasible"), 0.0, np.zeros(0, dtype=np.int64)
    ranges = [range(int(model.lb[j]), int(model.ub[j]) + 1) for j in range(n)]
    grid = np.array(list(itertools.product(*ranges)), dtype=np.int64)

    m = model.n_rows
    ok = np.ones(grid.shape[0], dtype=bool)
    for i in range(m):
        s, e = model.row_ptr[i], model.row_ptr[i + 1]
        acts = grid[:, model.cols[s:e]] @ model.coefs[s:e]
        if model.row_lo[i] > -NO_BOUND:
            ok &= acts >= model.row_lo[i]
        if model.row_hi[i] < NO_BOUND:
            ok &= acts <= model.row_hi[i]
    if not ok.any():
        return "infeasible", 0.0, None
    feas = grid[ok]
    if not model.has_objective:
        return "optimal", 0.0, feas[0]
    vals = feas @ model.obj
    best = int(np.argmax(vals))
    return "optimal", float(vals[best]), feas[best]


def lp_by_vertex_enumeration(model: LpModel, tol: float = 1e-9):
    """Best objective over all basic feasible points of a small dense LP.

    Enumerates every choice of n active constraints (rows at equality or
    variables at zero), solves the square system and keeps feasible
    solutions. Returns (status, objective) with status "infeasible" or
    "unbounded" left to the caller to rule out by construction.
    """
    m, n = model.A.shape
    # candidate active sets: each row contributes its hyperplane, each
    # variable its nonnegativity bound
    planes = [(model.A[i], model.b[i]) for i in range(m)]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        planes.append((e, 0.0))
    # equality rows are always active
    eq_rows = [i for i in range(m) if model.sense[i] == 0]
    free = [i for i in range(len(planes)) if i >= m or model.sense[i] != 0]

    best = None
    for combo in itertools.combinations(free, n - len(eq_rows)):
        idx = eq_rows + list(combo)
        A = np.array([planes[i][0] for i in idx])
        b = np.array([planes[i][1] for i in idx])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, b)
        if np.any(x < -tol):
            continue
        acts = model.A @ x
        if np.any((model.sense == -1) & (acts > model.b + tol)):
            continue
        if np.any((model.sense == 1) & (acts < model.b - tol)):
            continue
        if np.any((model.sense == 0) & (np.abs(acts - model.b) > tol)):
            continue
        val = float(model.c @ x)
        if best is None or val > best:
            best = val
    if best is None:
        return "infeasible", 0.0
    return "optimal", best


def qp_projected_gradient(problem: RidgeProblem, iters: int = 1_000_000):
    """Long-run projected-gradient solution of the ridge QP (original scale).

    Unconstrained problems use plain gradient descent on the primal;
    constrained ones run projected gradient ascent on the Lagrangian dual
    (the projection is a clamp at zero), which needs no polyhedral
    projection and shares nothing with the active-set path.
    """
    from .optim.ridge import _constraints_to_std, back_transform

    X, nu = problem.X, problem.nu
    p = X.shape[1]
    H = 2.0 * (X.T @ X + problem.gamma * np.diag(np.asarray(problem.penalize, float)))
    g = -2.0 * (X.T @ nu)

    if problem.constraints is None or len(problem.constraints) == 0:
        L = float(np.linalg.eigvalsh(H).max())
        x = np.zeros(p)
        step = 1.0 / L
        for _ in range(iters):
            x -= step * (H @ x + g)
        return back_transform(x, problem.col_mean, problem.col_scale)

    G = _constraints_to_std(np.asarray(problem.constraints, float),
                            problem.col_mean, problem.col_scale)
    Hinv = np.linalg.inv(H)
    M = G @ Hinv @ G.T
    L = float(np.linalg.eigvalsh(M).max())
    mu = np.zeros(G.shape[0])
    step = 1.0 / L
    for _ in range(iters):
        x = Hinv @ (G.T @ mu - g)
        mu = np.maximum(0.0, mu - step * (G @ x))
    x = Hinv @ (G.T @ mu - g)
    return back_transform(x, problem.col_mean, problem.col_scale)


def ridge_objective(problem: RidgeProblem, theta_orig: np.ndarray) -> float:
    """Objective value of original-scale weights, for oracle comparisons."""
    from .optim.ridge import _constraints_to_std  # noqa: F401  (shared convention)

    # rebuild the standardized coefficients that produce theta_orig
    s = problem.col_scale
    mu = problem.col_mean
    theta_std = theta_orig * s
    theta_std[0] = theta_orig[0] + float(np.sum(theta_orig[1:] * mu[1:]))
    resid = problem.nu - problem.X @ theta_std
    pen = float(np.sum((theta_std**2) * np.asarray(problem.penalize, float)))
    return float(resid @ resid) + problem.gamma * pen


def feasible_by_row_packing(L: np.ndarray, O: np.ndarray, cfg, request=None) -> bool:
    """Feasibility check by explicit per-compartment plan construction.

    Pins every locker parcel to its own compartment row, then tries to
    place each pending order (worst-case storage time B) into a concrete
    compartment of sufficient size by depth-first search over rows.
    Exponential; for probe-sized instances only.
    """
    orders = []
    for d in range(1, cfg.D + 1):
        for c in range(1, cfg.C + 1):
            for f in range(1, cfg.F + 1):
                orders.extend([(d, f)] * int(O[d - 1, c - 1, f - 1]))
    if request is not None:
        orders.append((request.d, request.e))
    # larger parcels first: fewer compatible rows, better pruning
    orders.sort(key=lambda o: (-o[0], o[1]))

    horizon = cfg.F + cfg.B  # enough to hold every worst-case interval
    rows = []
    for dlt in range(1, cfg.D + 1):
        pinned = []
        for c in range(cfg.C):
            for h in range(1, cfg.B):
                pinned.extend([h] * int(L[dlt - 1, c, h - 1]))
        if len(pinned) > cfg.Q[dlt - 1]:
            return False
        for k in range(cfg.Q[dlt - 1]):
            occ = np.zeros(horizon + 1, dtype=bool)
            if k < len(pinned):
                h = pinned[k]
                occ[1 : cfg.B - h + 1] = True  # occupies plan epochs 1..B-h
            rows.append((dlt, occ))

    def place(i: int) -> bool:
        if i == len(orders):
            return True
        d, f = orders[i]
        seen = set()
        for dlt, occ in rows:
            if dlt < d:
                continue
            key = (dlt, occ.tobytes())
            if key in seen:  # identical rows are interchangeable
                continue
            seen.add(key)
            span = slice(f, min(f + cfg.B, horizon + 1))
            if not occ[span].any():
                occ[span] = True
                if place(i + 1):
                    occ[span] = False
                    return True
                occ[span] = False
        return False

    return place(0)


def achievable_window_multisets(L: np.ndarray, O: np.ndarray, cfg):
    """All window multisets realizable by explicit row packings of (L, O).

    Enumerates every assignment of order units to concrete compartments
    (worst-case storage), collects the per-row maximal free runs over the
    horizon F, and returns a set of canonical multisets. Exponential;
    tiny states only.
    """
    orders = []
    for d in range(1, cfg.D + 1):
        for c in range(1, cfg.C + 1):
            for f in range(1, cfg.F + 1):
                orders.extend([(d, f)] * int(O[d - 1, c - 1, f - 1]))

    rows = []
    for dlt in range(1, cfg.D + 1):
        pinned = []
        for c in range(cfg.C):
            for h in range(1, cfg.B):
                pinned.extend([h] * int(L[dlt - 1, c, h - 1]))
        if len(pinned) > cfg.Q[dlt - 1]:
            return set()
        for k in range(cfg.Q[dlt - 1]):
            occ = np.zeros(cfg.F + 1, dtype=bool)
            if k < len(pinned):
                h = pinned[k]
                occ[1 : min(cfg.B - h, cfg.F) + 1] = True
            rows.append([dlt, occ])

    results = set()

    def windows_of(rows_now):
        counts = {}
        for dlt, occ in rows_now:
            run = 0
            for f in range(1, cfg.F + 1):
                if not occ[f]:
                    run += 1
                elif run:
                    counts[(dlt, run)] = counts.get((dlt, run), 0) + 1
                    run = 0
            if run:
                counts[(dlt, run)] = counts.get((dlt, run), 0) + 1
        return tuple(sorted(counts.items()))

    def assign(i: int):
        if i == len(orders):
            results.add(windows_of(rows))
            return
        d, f = orders[i]
        for row in rows:
            dlt, occ = row
            if dlt < d:
                continue
            span = slice(f, min(f + cfg.B, cfg.F + 1))
            if not occ[span].any():
                occ[span] = True
                assign(i + 1)
                occ[span] = False

    assign(0)
    return results
