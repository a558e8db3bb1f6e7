"""Feasibility check, allocation decision space and capacity-window CFA.

All three tentative-plan systems live here. The feasibility check asks
whether every pending order (plus optionally the candidate request) can
be placed under worst-case storage times; the allocation model adds the
committed first-epoch assignment; the CFA model additionally accounts
for capacity windows -- maximal stretches of free capacity per
compartment size -- and optimizes one of three objectives:

* DL: window capacity weighted by compartment size first, length second;
* LD: window length first, compartment size second;
* BU: free capacity at the very next allocation only, larger sizes first.

DL and LD realize the two-level lexicographic order inside a single
objective by weighting the secondary objective with the reciprocal of a
strict upper bound on its value; if that weight underflows, the solver
falls back to an explicit two-stage solve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .domain import RequestType
from .optim import IntModel, IntModelBuilder, ilp_solve
from .optim.model import extend_model

SECONDARY_WEIGHT_FLOOR = 1e-12


class Scheme(str, enum.Enum):
    DL = "DL"
    LD = "LD"
    BU = "BU"


def with_request(O: np.ndarray, request: RequestType | None) -> np.ndarray:
    """Pending orders augmented by the candidate request (f = lead time)."""
    if request is None:
        return O
    O2 = O.copy()
    O2[request.d - 1, request.c - 1, request.e - 1] += 1
    return O2


def locker_load(L: np.ndarray, dlt: int, f: int, B: int) -> int:
    """Compartments of size dlt still blocked at plan epoch f under
    worst-case storage: parcels with dwell h occupy epochs f <= B - h."""
    if f > B - 1:
        return 0
    return int(L[dlt - 1, :, : B - f].sum())


def upper_bound_capacity(cfg, horizon: int) -> int:
    """Strict upper bound on the size-weighted free-capacity objective."""
    return 1 + horizon * int(sum((d + 1) * q for d, q in enumerate(cfg.Q)))


def upper_bound_windows(cfg, horizon: int) -> int:
    """Strict upper bound on the length-weighted window objective."""
    return 1 + (2 * horizon - 1) * cfg.total_compartments


def cfa_coefficients(scheme: Scheme, cfg, horizon: int | None = None) -> np.ndarray:
    """Window weights v[dlt-1, lam-1] realizing the lexicographic order."""
    H = horizon or cfg.F
    if scheme is Scheme.BU:
        raise ValueError("BU weights free next-day capacity, not windows")
    dlt = np.arange(1, cfg.D + 1)[:, None]
    lam = np.arange(1, H + 1)[None, :]
    if scheme is Scheme.DL:
        return dlt * lam + (2 * lam - 1) / upper_bound_windows(cfg, H)
    return (2 * lam - 1) + dlt * lam / upper_bound_capacity(cfg, H)


def secondary_weight_underflows(scheme: Scheme, cfg, horizon: int | None = None) -> bool:
    """True when the weighted single solve would be numerically unsafe."""
    H = horizon or cfg.F
    if scheme is Scheme.BU:
        return False
    bound = upper_bound_windows(cfg, H) if scheme is Scheme.DL else upper_bound_capacity(cfg, H)
    return 1.0 / bound < SECONDARY_WEIGHT_FLOOR


# ---------------------------------------------------------------------------
# feasibility check


def feasibility_model(L: np.ndarray, O: np.ndarray, cfg,
                      request: RequestType | None = None) -> IntModel:
    """Constraint system deciding whether (L, O [+ request]) is allocatable.

    Tentative per-epoch allocations y[dlt, c, f] must cover every order,
    respect prefix-upgrade compatibility and never exceed capacity under
    worst-case (B-day) storage. Variables are only created for (c, f)
    cells that actually hold orders.
    """
    O_t = with_request(O, request)
    b = IntModelBuilder()
    y = _add_tentative_vars(b, O_t, cfg)
    _add_coverage_rows(b, y, O_t, cfg)
    _add_capacity_rows(b, y, L, cfg, s_ids=None)
    return b.build()


def check_feasible(L: np.ndarray, O: np.ndarray, cfg,
                   request: RequestType | None = None) -> bool:
    """Worst-case feasibility of the system, optionally with a new request."""
    model = feasibility_model(L, O, cfg, request)
    return ilp_solve(model, feasibility_only=True).is_optimal


def _add_tentative_vars(b, O_t, cfg, obj=None):
    """y[dlt, c, f] for cells with orders; returns an index dict."""
    totals = O_t.sum(axis=0)  # (C, F)
    y = {}
    for c in range(1, cfg.C + 1):
        for f in range(1, cfg.F + 1):
            n = int(totals[c - 1, f - 1])
            if n == 0:
                continue
            for dlt in range(1, cfg.D + 1):
                ub = min(cfg.Q[dlt - 1], n)
                # try filling the smaller compartments first: feasible and
                # window-friendly plans are found early, tightening the bound
                y[dlt, c, f] = b.add_var(0, ub, name=f"y[{dlt},{c},{f}]",
                                         high_first=True)
    return y


def _add_coverage_rows(b, y, O_t, cfg):
    """Prefix-compatibility and full-coverage rows."""
    totals = O_t.sum(axis=0)
    prefix = np.cumsum(O_t, axis=0)  # (D, C, F) orders of size <= dlt
    for c in range(1, cfg.C + 1):
        for f in range(1, cfg.F + 1):
            n = int(totals[c - 1, f - 1])
            if n == 0:
                continue
            for dlt in range(1, cfg.D):
                cap = int(prefix[dlt - 1, c - 1, f - 1])
                if cap >= n:
                    continue  # implied by the coverage equality
                b.add_le([(y[j, c, f], 1) for j in range(1, dlt + 1)], cap)
            b.add_eq([(y[dlt, c, f], 1) for dlt in range(1, cfg.D + 1)], n)


def _add_capacity_rows(b, y, L, cfg, s_ids):
    """Sliding worst-case capacity rows; equalities when slack vars exist."""
    for dlt in range(1, cfg.D + 1):
        for f in range(1, cfg.F + 1):
            if f <= min(cfg.F, cfg.B - 1):
                rhs = cfg.Q[dlt - 1] - locker_load(L, dlt, f, cfg.B)
                lo_j = 1
            else:
                rhs = cfg.Q[dlt - 1]
                lo_j = f - cfg.B + 1
            terms = [
                (y[dlt, c, j], 1)
                for c in range(1, cfg.C + 1)
                for j in range(lo_j, f + 1)
                if (dlt, c, j) in y
            ]
            if s_ids is not None:
                terms.append((s_ids[dlt, f], 1))
                b.add_eq(terms, rhs)
            elif terms or rhs < 0:
                b.add_le(terms, rhs)


# ---------------------------------------------------------------------------
# allocation decision space and CFA


@dataclass(eq=False)
class PlanProblem:
    """A built tentative-plan model plus variable maps for extraction."""

    model: IntModel
    cfg: object
    horizon: int
    y: dict = field(default_factory=dict)
    a: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)
    wf: dict = field(default_factory=dict)
    w: dict = field(default_factory=dict)

    def allocation(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.cfg.D, self.cfg.D, self.cfg.C), dtype=np.int64)
        for (d, dlt, c), idx in self.a.items():
            out[d - 1, dlt - 1, c - 1] = x[idx]
        return out

    def windows(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.cfg.D, self.horizon), dtype=np.int64)
        for (dlt, lam), idx in self.w.items():
            out[dlt - 1, lam - 1] = x[idx]
        return out

    def free_capacity(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.cfg.D, self.horizon), dtype=np.int64)
        for (dlt, f), idx in self.s.items():
            out[dlt - 1, f - 1] = x[idx]
        return out

    def size_weighted_value(self, x: np.ndarray) -> int:
        w = self.windows(x)
        dlt = np.arange(1, self.cfg.D + 1)[:, None]
        lam = np.arange(1, self.horizon + 1)[None, :]
        return int((dlt * lam * w).sum())

    def length_weighted_value(self, x: np.ndarray) -> int:
        w = self.windows(x)
        lam = np.arange(1, self.horizon + 1)[None, :]
        return int(((2 * lam - 1) * w).sum())


def _add_allocation_vars(b, y, O_t, cfg):
    """Committed first-epoch assignment a[d, dlt, c] linked to y[., ., 1]."""
    a = {}
    for d in range(1, cfg.D + 1):
        for c in range(1, cfg.C + 1):
            due = int(O_t[d - 1, c - 1, 0])
            if due == 0:
                continue
            for dlt in range(d, cfg.D + 1):
                a[d, dlt, c] = b.add_var(0, due, name=f"a[{d},{dlt},{c}]")
            b.add_eq([(a[d, dlt, c], 1) for dlt in range(d, cfg.D + 1)], due)
    for dlt in range(1, cfg.D + 1):
        for c in range(1, cfg.C + 1):
            terms = []
            if (dlt, c, 1) in y:
                terms.append((y[dlt, c, 1], 1))
            terms.extend((a[d, dlt, c], -1) for d in range(1, dlt + 1) if (d, dlt, c) in a)
            if terms:
                b.add_eq(terms, 0)
    return a


def allocation_space_model(L: np.ndarray, O: np.ndarray, cfg) -> PlanProblem:
    """Decision space for the end-of-day allocation (no objective)."""
    b = IntModelBuilder()
    y = _add_tentative_vars(b, O, cfg)
    _add_coverage_rows(b, y, O, cfg)
    _add_capacity_rows(b, y, L, cfg, s_ids=None)
    a = _add_allocation_vars(b, y, O, cfg)
    return PlanProblem(model=b.build(), cfg=cfg, horizon=cfg.F, y=y, a=a)


def add_window_accounting(b, cfg, horizon, s_ids, end_allocation_terms,
                          last_free_end, w_obj=None):
    """Window variables and their accounting rows on top of s[dlt, f].

    ``end_allocation_terms(dlt, f)`` supplies the allocation terms that a
    window ending at f-1 must be followed by; windows may only end before
    an allocation epoch <= ``last_free_end`` or at the horizon itself.
    Returns (wf, w) index maps.
    """
    wf, w = {}, {}
    # long windows carry the objective; creating them first makes the
    # depth-first dive assemble near-optimal decompositions immediately
    for dlt in range(cfg.D, 0, -1):
        for lam in range(horizon, 0, -1):
            per_row = (horizon + 1) // (lam + 1)
            obj = 0.0 if w_obj is None else float(w_obj[dlt - 1, lam - 1])
            w[dlt, lam] = b.add_var(
                0, cfg.Q[dlt - 1] * max(per_row, 1), obj=obj, name=f"w[{dlt},{lam}]"
            )
            for f in range(1, horizon - lam + 2):
                end = f + lam - 1
                forbidden = end != horizon and end + 1 > last_free_end
                ub = 0 if forbidden else cfg.Q[dlt - 1]
                wf[dlt, lam, f] = b.add_var(0, ub, name=f"wf[{dlt},{lam},{f}]",
                                            high_first=True)
    for dlt in range(1, cfg.D + 1):
        # coverage: windows over epoch f account exactly for the free capacity
        for f in range(1, horizon + 1):
            terms = [
                (wf[dlt, lam, j], 1)
                for j in range(1, f + 1)
                for lam in range(f - j + 1, horizon - j + 2)
            ]
            terms.append((s_ids[dlt, f], -1))
            b.add_eq(terms, 0)
        # a window ending before the horizon must be followed by an allocation
        for f in range(2, last_free_end + 1):
            terms = [(wf[dlt, j, f - j], 1) for j in range(1, f)]
            terms.extend((v, -1) for v in end_allocation_terms(dlt, f))
            b.add_le(terms, 0)
        # aggregate per length
        for lam in range(1, horizon + 1):
            terms = [(wf[dlt, lam, f], 1) for f in range(1, horizon - lam + 2)]
            terms.append((w[dlt, lam], -1))
            b.add_eq(terms, 0)
        # implied: window lengths account for the total free capacity;
        # redundant but lets the bound see the s profile early
        terms = [(w[dlt, lam], lam) for lam in range(1, horizon + 1)]
        terms.extend((s_ids[dlt, f], -1) for f in range(1, horizon + 1))
        b.add_eq(terms, 0)
    return wf, w


def cfa_model(L: np.ndarray, O: np.ndarray, cfg, scheme: Scheme) -> PlanProblem:
    """Full end-of-day allocation model with capacity-window objective."""
    b = IntModelBuilder()
    y = _add_tentative_vars(b, O, cfg)
    _add_coverage_rows(b, y, O, cfg)
    s_ids = {}
    for dlt in range(1, cfg.D + 1):
        for f in range(1, cfg.F + 1):
            obj = float(dlt) if (scheme is Scheme.BU and f == 1) else 0.0
            s_ids[dlt, f] = b.add_var(0, cfg.Q[dlt - 1], obj=obj, name=f"s[{dlt},{f}]")
    _add_capacity_rows(b, y, L, cfg, s_ids=s_ids)
    a = _add_allocation_vars(b, y, O, cfg)

    v = None if scheme is Scheme.BU else cfa_coefficients(scheme, cfg)

    def end_terms(dlt, f):
        return [y[dlt, c, f] for c in range(1, cfg.C + 1) if (dlt, c, f) in y]

    wf, w = add_window_accounting(
        b, cfg, cfg.F, s_ids, end_terms, last_free_end=cfg.F, w_obj=v
    )
    return PlanProblem(model=b.build(), cfg=cfg, horizon=cfg.F,
                       y=y, a=a, s=s_ids, wf=wf, w=w)


def solve_cfa(L: np.ndarray, O: np.ndarray, cfg, scheme: Scheme,
              force_two_stage: bool = False):
    """Solve the CFA; returns (PlanProblem, solution vector).

    DL/LD run as a single weighted solve unless the secondary weight
    would underflow (or two-stage is forced), in which case the
    lexicographic order is realized by two sequential solves.
    """
    problem = cfa_model(L, O, cfg, scheme)
    if scheme is Scheme.BU or not (force_two_stage or secondary_weight_underflows(scheme, cfg)):
        res = ilp_solve(problem.model)
        if not res.is_optimal:
            raise RuntimeError("allocation model infeasible for a reachable state")
        return problem, res.x
    return solve_cfa_two_stage(L, O, cfg, scheme)


def solve_cfa_two_stage(L: np.ndarray, O: np.ndarray, cfg, scheme: Scheme):
    """Explicit lexicographic solve: primary alone, then secondary."""
    if scheme is Scheme.BU:
        raise ValueError("BU has a single objective")
    dlt = np.arange(1, cfg.D + 1)[:, None]
    lam = np.arange(1, cfg.F + 1)[None, :]
    size_w = (dlt * lam).astype(float)
    len_w = (2 * lam - 1) * np.ones((cfg.D, 1))
    primary, secondary = (size_w, len_w) if scheme is Scheme.DL else (len_w, size_w)

    stage1 = _cfa_with_weights(L, O, cfg, primary)
    res1 = ilp_solve(stage1.model)
    if not res1.is_optimal:
        raise RuntimeError("allocation model infeasible for a reachable state")
    z1 = int(round(res1.objective))

    stage2 = _cfa_with_weights(L, O, cfg, secondary)
    pin = [(stage2.w[d, l], int(primary[d - 1, l - 1]))
           for (d, l) in stage2.w if primary[d - 1, l - 1]]
    stage2_model = extend_model(stage2.model, [(pin, z1, z1)])
    res2 = ilp_solve(stage2_model)
    if not res2.is_optimal:
        raise RuntimeError("two-stage CFA lost feasibility at the second stage")
    stage2.model = stage2_model
    return stage2, res2.x


def _cfa_with_weights(L, O, cfg, weights):
    b = IntModelBuilder()
    y = _add_tentative_vars(b, O, cfg)
    _add_coverage_rows(b, y, O, cfg)
    s_ids = {
        (dlt, f): b.add_var(0, cfg.Q[dlt - 1], name=f"s[{dlt},{f}]")
        for dlt in range(1, cfg.D + 1)
        for f in range(1, cfg.F + 1)
    }
    _add_capacity_rows(b, y, L, cfg, s_ids=s_ids)
    a = _add_allocation_vars(b, y, O, cfg)

    def end_terms(dlt, f):
        return [y[dlt, c, f] for c in range(1, cfg.C + 1) if (dlt, c, f) in y]

    wf, w = add_window_accounting(
        b, cfg, cfg.F, s_ids, end_terms, last_free_end=cfg.F, w_obj=weights
    )
    return PlanProblem(model=b.build(), cfg=cfg, horizon=cfg.F,
                       y=y, a=a, s=s_ids, wf=wf, w=w)


def windows_achievable(L: np.ndarray, O: np.ndarray, cfg, counts) -> bool:
    """True when a tentative plan with exactly this window multiset exists.

    ``counts`` maps (size, length) to window counts; unmentioned pairs
    are pinned to zero.
    """
    problem = cfa_model(L, O, cfg, Scheme.DL)
    pins = [
        ([(idx, 1)], int(counts.get((dlt, lam), 0)), int(counts.get((dlt, lam), 0)))
        for (dlt, lam), idx in problem.w.items()
    ]
    pinned = extend_model(problem.model, pins)
    return ilp_solve(pinned, feasibility_only=True).is_optimal


def allocation_achievable(L: np.ndarray, O: np.ndarray, cfg, a: np.ndarray) -> bool:
    """True when the committed assignment ``a`` lies in the decision space."""
    problem = allocation_space_model(L, O, cfg)
    pins = []
    for d in range(1, cfg.D + 1):
        for dlt in range(1, cfg.D + 1):
            for c in range(1, cfg.C + 1):
                want = int(a[d - 1, dlt - 1, c - 1])
                if (d, dlt, c) in problem.a:
                    pins.append(([(problem.a[d, dlt, c], 1)], want, want))
                elif want:
                    return False
    pinned = extend_model(problem.model, pins)
    return ilp_solve(pinned, feasibility_only=True).is_optimal


def decide_allocation(L: np.ndarray, O: np.ndarray, cfg, scheme: Scheme) -> np.ndarray:
    """Committed allocation a[d, dlt, c] for the orders due today."""
    problem, x = solve_cfa(L, O, cfg, scheme)
    return problem.allocation(x)


def count_windows_oracle(rows, horizon: int):
    """Window multiset of an explicit per-compartment plan grid.

    ``rows`` is an iterable of (dlt, occupied) pairs where ``occupied``
    is a boolean array over plan epochs 1..horizon (index 0 = epoch 1).
    Maximal free runs are bucketed by (size, length).
    """
    counts: dict[tuple[int, int], int] = {}
    for dlt, occ in rows:
        occ = np.asarray(occ, dtype=bool)
        if occ.shape[0] != horizon:
            raise ValueError("grid row length must equal the horizon")
        run = 0
        for f in range(horizon):
            if not occ[f]:
                run += 1
            elif run:
                counts[(dlt, run)] = counts.get((dlt, run), 0) + 1
                run = 0
        if run:
            counts[(dlt, run)] = counts.get((dlt, run), 0) + 1
    return counts
