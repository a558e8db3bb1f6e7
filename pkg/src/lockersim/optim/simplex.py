"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves ``maximize c @ x`` over nonnegative variables with <=, ==, >=
rows. Bland's rule (smallest eligible index enters, smallest basic index
leaves on ties) is used throughout, which guarantees termination and
makes the solve deterministic. Intended for the small dense programs in
this package (tens of variables); numerical tolerance 1e-9.
"""

from __future__ import annotations

import numpy as np

from .model import LpModel, LpResult

_TOL = 1e-9


class SimplexError(RuntimeError):
    """Numerical failure inside the simplex; never silently ignored."""


def _pivot(tab, basis, row, col):
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and abs(tab[i, col]) > 0.0:
            tab[i] -= tab[i, col] * tab[row]
    basis[row] = col


def _bland_iterate(tab, basis, n_total, max_iter):
    """Run primal simplex on a tableau whose last row is the (max) objective."""
    m = tab.shape[0] - 1
    for _ in range(max_iter):
        # entering: smallest index with positive reduced profit
        col = -1
        for j in range(n_total):
            if tab[m, j] > _TOL:
                col = j
                break
        if col < 0:
            return "optimal"
        # leaving: min ratio, ties to the smallest basic variable index
        row = -1
        best = np.inf
        for i in range(m):
            if tab[i, col] > _TOL:
                ratio = tab[i, -1] / tab[i, col]
                if ratio < best - _TOL or (ratio < best + _TOL and
                                           (row < 0 or basis[i] < basis[row])):
                    best = ratio
                    row = i
        if row < 0:
            return "unbounded"
        _pivot(tab, basis, row, col)
    raise SimplexError("simplex iteration limit reached")


def lp_solve(model: LpModel, max_iter: int = 100_000) -> LpResult:
    """Exact (to 1e-9) solution of a small dense LP."""
    m, n = model.A.shape
    A = model.A.copy()
    b = model.b.copy()
    sense = model.sense.copy()
    # normalize to nonnegative rhs
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            sense[i] = -sense[i]

    n_slack = int(np.sum(sense == -1))
    n_surplus = int(np.sum(sense == 1))
    n_art = int(np.sum(sense != -1))
    n_total = n + n_slack + n_surplus + n_art

    tab = np.zeros((m + 1, n_total + 1))
    tab[:m, :n] = A
    tab[:m, -1] = b
    basis = np.full(m, -1, dtype=np.int64)

    s_idx = n
    p_idx = n + n_slack
    a_idx = n + n_slack + n_surplus
    art_cols = []
    for i in range(m):
        if sense[i] == -1:
            tab[i, s_idx] = 1.0
            basis[i] = s_idx
            s_idx += 1
        else:
            if sense[i] == 1:
                tab[i, p_idx] = -1.0
                p_idx += 1
            tab[i, a_idx] = 1.0
            basis[i] = a_idx
            art_cols.append(a_idx)
            a_idx += 1

    if art_cols:
        # phase 1: maximize -sum(artificials)
        for i in range(m):
            if basis[i] in art_cols:
                tab[m] += tab[i]
        tab[m, art_cols] = 0.0
        status = _bland_iterate(tab, basis, n_total, max_iter)
        if status != "optimal":
            raise SimplexError("phase-1 simplex failed to terminate cleanly")
        if tab[m, -1] > 1e-7:
            return LpResult(status="infeasible", x=None, objective=0.0)
        # drive any remaining artificials out of the basis
        for i in range(m):
            if basis[i] in art_cols:
                for j in range(n + n_slack + n_surplus):
                    if abs(tab[i, j]) > _TOL:
                        _pivot(tab, basis, i, j)
                        break
        tab[:, art_cols] = 0.0

    # phase 2: original objective, expressed in reduced form
    tab[m, :] = 0.0
    tab[m, :n] = model.c
    for i in range(m):
        j = basis[i]
        if j < n and abs(model.c[j]) > 0.0:
            tab[m] -= model.c[j] * tab[i]
            tab[m, j] = 0.0
    for jc in art_cols:
        tab[m, jc] = 0.0

    status = _bland_iterate(tab, basis, n + n_slack + n_surplus, max_iter)
    if status == "unbounded":
        return LpResult(status="unbounded", x=None, objective=np.inf)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i, -1]
    return LpResult(status="optimal", x=x, objective=float(model.c @ x))
