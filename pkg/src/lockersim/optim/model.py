"""Model containers for the exact in-repo optimization engine.

``IntModel`` holds a bounded-integer linear program in CSR form with
two-sided row bounds; ``LpModel`` a continuous LP; ``RidgeProblem`` an
inequality-constrained ridge regression. All variable bounds of an
IntModel must be finite and all constraint coefficients integer, which
keeps bound propagation exact in int64 arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Sentinel for a missing row bound; large enough to never bind, small
# enough that activity sums cannot overflow int64.
NO_BOUND = 2**62


class IntModelBuilder:
    """Incremental builder for bounded-integer models."""

    def __init__(self):
        self._lb = []
        self._ub = []
        self._obj = []
        self._high = []
        self._names = []
        self._rows = []  # (terms, lo, hi)
        self._has_obj = False

    @property
    def n_vars(self) -> int:
        return len(self._lb)

    def add_var(self, lb: int, ub: int, obj: float = 0.0, name: str = "",
                high_first: bool | None = None) -> int:
        """Add an integer variable; ``high_first`` steers which end of the
        domain the search tries first (default: the objective-preferred end)."""
        if ub < lb:
            raise ValueError(f"empty domain [{lb}, {ub}] for variable {name!r}")
        self._lb.append(int(lb))
        self._ub.append(int(ub))
        self._obj.append(float(obj))
        if high_first is None:
            high_first = obj > 0.0
        self._high.append(bool(high_first))
        if obj != 0.0:
            self._has_obj = True
        self._names.append(name or f"x{len(self._lb) - 1}")
        return len(self._lb) - 1

    def add_constraint(self, terms, lo=None, hi=None) -> None:
        """Add lo <= sum(coef * var) <= hi; either bound may be None."""
        if lo is None and hi is None:
            raise ValueError("constraint needs at least one bound")
        clean = [(int(v), int(c)) for v, c in terms if c != 0]
        self._rows.append((clean, lo, hi))

    def add_eq(self, terms, rhs: int) -> None:
        self.add_constraint(terms, lo=rhs, hi=rhs)

    def add_le(self, terms, rhs: int) -> None:
        self.add_constraint(terms, hi=rhs)

    def add_ge(self, terms, rhs: int) -> None:
        self.add_constraint(terms, lo=rhs)

    def build(self) -> "IntModel":
        n = len(self._lb)
        m = len(self._rows)
        row_ptr = np.zeros(m + 1, dtype=np.int64)
        nnz = sum(len(r[0]) for r in self._rows)
        cols = np.zeros(nnz, dtype=np.int64)
        coefs = np.zeros(nnz, dtype=np.int64)
        row_lo = np.full(m, -NO_BOUND, dtype=np.int64)
        row_hi = np.full(m, NO_BOUND, dtype=np.int64)
        k = 0
        for i, (terms, lo, hi) in enumerate(self._rows):
            for v, c in terms:
                if not 0 <= v < n:
                    raise ValueError(f"constraint {i} references unknown variable {v}")
                cols[k] = v
                coefs[k] = c
                k += 1
            row_ptr[i + 1] = k
            if lo is not None:
                row_lo[i] = int(lo)
            if hi is not None:
                row_hi[i] = int(hi)
        return IntModel(
            lb=np.array(self._lb, dtype=np.int64),
            ub=np.array(self._ub, dtype=np.int64),
            obj=np.array(self._obj, dtype=np.float64),
            has_objective=self._has_obj,
            row_ptr=row_ptr,
            cols=cols,
            coefs=coefs,
            row_lo=row_lo,
            row_hi=row_hi,
            branch_high=np.array(self._high, dtype=np.bool_),
            names=tuple(self._names),
        )


@dataclass(eq=False)
class IntModel:
    """Bounded-integer linear program: maximize obj subject to row bounds."""

    lb: np.ndarray
    ub: np.ndarray
    obj: np.ndarray
    has_objective: bool
    row_ptr: np.ndarray
    cols: np.ndarray
    coefs: np.ndarray
    row_lo: np.ndarray
    row_hi: np.ndarray
    branch_high: np.ndarray = None
    names: tuple = ()

    def __post_init__(self):
        if self.branch_high is None:
            self.branch_high = self.obj > 0.0

    @property
    def n_vars(self) -> int:
        return self.lb.shape[0]

    @property
    def n_rows(self) -> int:
        return self.row_lo.shape[0]

    def to_lp_text(self) -> str:
        """Human-readable dump in an LP-like text format for debugging."""
        lines = ["Maximize"] if self.has_objective else ["Feasibility"]
        if self.has_objective:
            terms = " + ".join(
                f"{self.obj[j]:g} {self.names[j]}" for j in range(self.n_vars) if self.obj[j]
            )
            lines.append(f"  obj: {terms if terms else '0'}")
        lines.append("Subject To")
        for i in range(self.n_rows):
            s, e = self.row_ptr[i], self.row_ptr[i + 1]
            expr = " + ".join(
                f"{self.coefs[k]:d} {self.names[self.cols[k]]}" for k in range(s, e)
            )
            lo, hi = self.row_lo[i], self.row_hi[i]
            if lo == hi:
                lines.append(f"  c{i}: {expr} = {lo}")
            elif lo <= -NO_BOUND:
                lines.append(f"  c{i}: {expr} <= {hi}")
            elif hi >= NO_BOUND:
                lines.append(f"  c{i}: {expr} >= {lo}")
            else:
                lines.append(f"  c{i}: {lo} <= {expr} <= {hi}")
        lines.append("Bounds")
        for j in range(self.n_vars):
            lines.append(f"  {self.lb[j]} <= {self.names[j]} <= {self.ub[j]}")
        lines.append("Integers")
        lines.append("  " + " ".join(self.names))
        return "\n".join(lines)


def extend_model(model: "IntModel", rows) -> "IntModel":
    """New IntModel equal to ``model`` plus extra (terms, lo, hi) rows."""
    b = IntModelBuilder()
    for j in range(model.n_vars):
        b.add_var(int(model.lb[j]), int(model.ub[j]), obj=float(model.obj[j]),
                  name=model.names[j], high_first=bool(model.branch_high[j]))
    for i in range(model.n_rows):
        s, e = model.row_ptr[i], model.row_ptr[i + 1]
        row = [(int(model.cols[k]), int(model.coefs[k])) for k in range(s, e)]
        lo = None if model.row_lo[i] <= -NO_BOUND else int(model.row_lo[i])
        hi = None if model.row_hi[i] >= NO_BOUND else int(model.row_hi[i])
        b.add_constraint(row, lo=lo, hi=hi)
    for terms, lo, hi in rows:
        b.add_constraint(terms, lo=lo, hi=hi)
    out = b.build()
    out.has_objective = model.has_objective
    return out


@dataclass(eq=False)
class IlpResult:
    status: str  # "optimal" | "infeasible"
    x: np.ndarray | None
    objective: float
    nodes: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(eq=False)
class LpModel:
    """Continuous LP over nonnegative variables: maximize c @ x.

    Rows are (coefficients, sense, rhs) with sense in {-1, 0, +1} for
    <=, ==, >=.
    """

    c: np.ndarray
    A: np.ndarray
    sense: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.sense = np.asarray(self.sense, dtype=np.int64)
        self.b = np.asarray(self.b, dtype=float)
        if self.A.shape != (self.b.shape[0], self.c.shape[0]):
            raise ValueError("inconsistent LP dimensions")


@dataclass(eq=False)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float


@dataclass(eq=False)
class RidgeProblem:
    """Inequality-constrained ridge regression.

    ``X`` is the standardized design matrix (column 0 is the raw
    intercept carrier), ``nu`` the targets and ``gamma`` the ridge weight
    applied to the coordinates flagged in ``penalize``. ``constraints``
    (may be None) holds rows a with a @ theta >= 0 stated on the
    back-transformed (original-scale) weights; ``col_mean``/``col_scale``
    describe the standardization so the solver can move the constraints
    into standardized space and map the solution back.
    """

    X: np.ndarray
    nu: np.ndarray
    gamma: float
    penalize: np.ndarray
    constraints: np.ndarray | None = None
    col_mean: np.ndarray | None = None
    col_scale: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.nu = np.asarray(self.nu, dtype=float)
        p = self.X.shape[1]
        if self.gamma < 0:
            raise ValueError("ridge weight must be nonnegative")
        if self.col_mean is None:
            self.col_mean = np.zeros(p)
        if self.col_scale is None:
            self.col_scale = np.ones(p)
