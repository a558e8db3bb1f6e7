"""Exact solver for bounded-integer linear programs.

Depth-first search over the integer box with incremental bound
propagation (interval arithmetic on every row, exact in int64) and
objective bounding. Instances solved here are tiny but hot -- the
feasibility check and tentative-plan models run hundreds of thousands of
times per experiment -- so the kernel is compiled with numba.

The search is fully deterministic: variables branch in model order,
values are tried from the objective-preferred end, and the first
incumbent among ties is kept, so identical models yield identical
assignments.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .model import NO_BOUND, IlpResult, IntModel

_OPTIMAL = 0
_INFEASIBLE = 1
_NODE_LIMIT = 2

DEFAULT_NODE_LIMIT = 50_000_000


@njit(cache=True)
def _propagate(lb, ub, row_ptr, cols, coefs, row_lo, row_hi, vr_ptr, vr_rows,
               queue, in_queue, seed_var):
    """Tighten variable bounds to a fixpoint; returns False on infeasibility.

    Stale row activities only ever under-tighten (the row is re-queued on
    any change), so derived bounds are always valid.
    """
    m = row_lo.shape[0]
    head = 0
    tail = 0
    if seed_var < 0:
        for r in range(m):
            queue[tail] = r
            in_queue[r] = True
            tail = (tail + 1) % (m + 1)
    else:
        for k in range(vr_ptr[seed_var], vr_ptr[seed_var + 1]):
            r = vr_rows[k]
            if not in_queue[r]:
                queue[tail] = r
                in_queue[r] = True
                tail = (tail + 1) % (m + 1)

    while head != tail:
        r = queue[head]
        head = (head + 1) % (m + 1)
        in_queue[r] = False
        s = row_ptr[r]
        e = row_ptr[r + 1]
        minact = np.int64(0)
        maxact = np.int64(0)
        for k in range(s, e):
            a = coefs[k]
            j = cols[k]
            if a > 0:
                minact += a * lb[j]
                maxact += a * ub[j]
            else:
                minact += a * ub[j]
                maxact += a * lb[j]
        lo = row_lo[r]
        hi = row_hi[r]
        if minact > hi or maxact < lo:
            while head != tail:  # reset flags for the next call
                in_queue[queue[head]] = False
                head = (head + 1) % (m + 1)
            return False
        if minact >= lo and maxact <= hi:
            continue  # row satisfied for every completion; nothing to tighten
        for k in range(s, e):
            a = coefs[k]
            j = cols[k]
            if lb[j] == ub[j]:
                continue
            if a > 0:
                rest_min = minact - a * lb[j]
                rest_max = maxact - a * ub[j]
                nub = ub[j]
                nlb = lb[j]
                if hi < NO_BOUND:
                    v = (hi - rest_min) // a
                    if v < nub:
                        nub = v
                if lo > -NO_BOUND:
                    p = lo - rest_max
                    v = -((-p) // a)
                    if v > nlb:
                        nlb = v
            else:
                a2 = -a
                rest_min = minact - a * ub[j]
                rest_max = maxact - a * lb[j]
                nub = ub[j]
                nlb = lb[j]
                if hi < NO_BOUND:
                    p = hi - rest_min
                    v = -(p // a2)
                    if v > nlb:
                        nlb = v
                if lo > -NO_BOUND:
                    p = lo - rest_max
                    v = (-p) // a2
                    if v < nub:
                        nub = v
            if nlb > nub:
                while head != tail:
                    in_queue[queue[head]] = False
                    head = (head + 1) % (m + 1)
                return False
            changed = False
            if nub < ub[j]:
                ub[j] = nub
                changed = True
            if nlb > lb[j]:
                lb[j] = nlb
                changed = True
            if changed:
                for kk in range(vr_ptr[j], vr_ptr[j + 1]):
                    rr = vr_rows[kk]
                    if not in_queue[rr]:
                        queue[tail] = rr
                        in_queue[rr] = True
                        tail = (tail + 1) % (m + 1)
    return True


@njit(cache=True)
def _search(lb0, ub0, row_ptr, cols, coefs, row_lo, row_hi, vr_ptr, vr_rows,
            obj, branch_high, use_obj, stop_at_first, node_limit):
    n = lb0.shape[0]
    m = row_lo.shape[0]
    lb = lb0.copy()
    ub = ub0.copy()
    queue = np.empty(m + 1, dtype=np.int64)
    in_queue = np.zeros(m, dtype=np.bool_)

    best_x = np.zeros(n, dtype=np.int64)
    best_obj = -1.0e300
    found = False
    nodes = 1

    if not _propagate(lb, ub, row_ptr, cols, coefs, row_lo, row_hi,
                      vr_ptr, vr_rows, queue, in_queue, -1):
        return _INFEASIBLE, best_x, 0.0, nodes

    saved_lb = np.empty((n + 1, n), dtype=np.int64)
    saved_ub = np.empty((n + 1, n), dtype=np.int64)
    br_var = np.empty(n + 1, dtype=np.int64)
    br_val = np.empty(n + 1, dtype=np.int64)
    br_step = np.empty(n + 1, dtype=np.int64)
    br_end = np.empty(n + 1, dtype=np.int64)
    depth = 0

    descending = True
    while True:
        if descending:
            # current bounds are propagated and consistent
            if use_obj and found:
                bound = 0.0
                for j in range(n):
                    cj = obj[j]
                    bound += cj * ub[j] if cj > 0 else cj * lb[j]
                if bound <= best_obj + 1e-9:
                    descending = False
                    continue
            jbr = -1
            for j in range(n):
                if lb[j] < ub[j]:
                    jbr = j
                    break
            if jbr < 0:
                # leaf: every variable fixed
                val = 0.0
                for j in range(n):
                    val += obj[j] * lb[j]
                if (not found) or val > best_obj + 1e-9:
                    found = True
                    best_obj = val
                    for j in range(n):
                        best_x[j] = lb[j]
                if stop_at_first:
                    return _OPTIMAL, best_x, best_obj, nodes
                descending = False
                continue
            for j in range(n):
                saved_lb[depth, j] = lb[j]
                saved_ub[depth, j] = ub[j]
            br_var[depth] = jbr
            if branch_high[jbr]:
                br_val[depth] = ub[jbr]
                br_step[depth] = -1
                br_end[depth] = lb[jbr]
            else:
                br_val[depth] = lb[jbr]
                br_step[depth] = 1
                br_end[depth] = ub[jbr]
            lb[jbr] = br_val[depth]
            ub[jbr] = br_val[depth]
            depth += 1
            nodes += 1
            if nodes > node_limit:
                return _NODE_LIMIT, best_x, best_obj, nodes
            descending = _propagate(lb, ub, row_ptr, cols, coefs, row_lo,
                                    row_hi, vr_ptr, vr_rows, queue, in_queue, jbr)
        else:
            # advance to the next value at the deepest open level
            if depth == 0:
                break
            i = depth - 1
            if br_val[i] == br_end[i]:
                depth -= 1
                continue
            br_val[i] += br_step[i]
            for j in range(n):
                lb[j] = saved_lb[i, j]
                ub[j] = saved_ub[i, j]
            jbr = br_var[i]
            lb[jbr] = br_val[i]
            ub[jbr] = br_val[i]
            nodes += 1
            if nodes > node_limit:
                return _NODE_LIMIT, best_x, best_obj, nodes
            descending = _propagate(lb, ub, row_ptr, cols, coefs, row_lo,
                                    row_hi, vr_ptr, vr_rows, queue, in_queue, jbr)

    if found:
        return _OPTIMAL, best_x, best_obj, nodes
    return _INFEASIBLE, best_x, 0.0, nodes


def _var_row_incidence(model: IntModel):
    n = model.n_vars
    counts = np.zeros(n + 1, dtype=np.int64)
    for j in model.cols:
        counts[j + 1] += 1
    vr_ptr = np.cumsum(counts)
    vr_rows = np.zeros(model.cols.shape[0], dtype=np.int64)
    cursor = vr_ptr[:-1].copy()
    for r in range(model.n_rows):
        for k in range(model.row_ptr[r], model.row_ptr[r + 1]):
            j = model.cols[k]
            vr_rows[cursor[j]] = r
            cursor[j] += 1
    return vr_ptr, vr_rows


def ilp_solve(model: IntModel, feasibility_only: bool = False,
              node_limit: int = DEFAULT_NODE_LIMIT) -> IlpResult:
    """Solve a bounded-integer model exactly.

    Returns the maximizer of the objective (or any feasible point in
    feasibility mode). Deterministic across calls for identical models.
    """
    if model.n_vars == 0:
        ok = bool(np.all(model.row_lo <= 0) and np.all(model.row_hi >= 0))
        return IlpResult(status="optimal" if ok else "infeasible",
                         x=np.zeros(0, dtype=np.int64) if ok else None,
                         objective=0.0, nodes=0)
    vr_ptr, vr_rows = _var_row_incidence(model)
    use_obj = model.has_objective and not feasibility_only
    status, x, obj, nodes = _search(
        model.lb, model.ub, model.row_ptr, model.cols, model.coefs,
        model.row_lo, model.row_hi, vr_ptr, vr_rows,
        model.obj, model.branch_high,
        use_obj, feasibility_only or not model.has_objective,
        node_limit,
    )
    if status == _NODE_LIMIT:
        raise RuntimeError(
            f"ILP node limit {node_limit} exceeded on a model with "
            f"{model.n_vars} variables / {model.n_rows} rows"
        )
    if status == _INFEASIBLE:
        return IlpResult(status="infeasible", x=None, objective=0.0, nodes=nodes)
    objective = float(model.obj @ x) if model.has_objective else float(obj)
    return IlpResult(status="optimal", x=x.copy(), objective=objective, nodes=nodes)
