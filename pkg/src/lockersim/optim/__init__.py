"""Exact in-repo optimization engine: bounded ILP, dense simplex, ridge QP."""

from .model import (
    IlpResult,
    IntModel,
    IntModelBuilder,
    LpModel,
    LpResult,
    RidgeProblem,
    NO_BOUND,
)
from .ilp import ilp_solve
from .simplex import SimplexError, lp_solve
from .ridge import QpError, back_transform, qp_ridge_constrained

__all__ = [
    "IlpResult",
    "IntModel",
    "IntModelBuilder",
    "LpModel",
    "LpResult",
    "RidgeProblem",
    "NO_BOUND",
    "ilp_solve",
    "lp_solve",
    "SimplexError",
    "QpError",
    "qp_ridge_constrained",
    "back_transform",
]
