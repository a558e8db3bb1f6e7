"""Sequential decision model: states, transitions, rewards, epoch types.

A day consists of T request slots followed by one allocation epoch at
T+1. Every slot is a decision epoch even when no request arrives (the
decision is then a forced rejection), which keeps trajectories a fixed
length per day and makes replay deterministic.

State tensors use 0-based numpy indexing for the 1-based model indices:
``L[dlt-1, c-1, h-1]`` counts compartments of size dlt occupied by a
type-c parcel on its h-th day; ``O[d-1, c-1, f-1]`` counts accepted
orders of size d and type c due at the f-th allocation from now.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Epoch(enum.Enum):
    DEMAND_CONTROL = "demand_control"
    ALLOCATION = "allocation"


@dataclass(frozen=True)
class RequestType:
    """A request: customer type c, parcel size d, lead time e (all 1-based).

    ``None`` stands in for the no-arrival outcome wherever a request may
    appear.
    """

    c: int
    d: int
    e: int


@dataclass(eq=False)
class PreDecisionState:
    """State (tau, t, L, O, r) observed before deciding."""

    tau: int
    t: int
    L: np.ndarray
    O: np.ndarray
    r: RequestType | None = None

    def __eq__(self, other):
        if not isinstance(other, PreDecisionState):
            return NotImplemented
        return (
            (self.tau, self.t, self.r) == (other.tau, other.t, other.r)
            and np.array_equal(self.L, other.L)
            and np.array_equal(self.O, other.O)
        )


@dataclass(eq=False)
class PostDecisionState:
    """State (tau, t, L, O) right after the decision, before new information."""

    tau: int
    t: int
    L: np.ndarray
    O: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, PostDecisionState):
            return NotImplemented
        return (self.tau, self.t) == (other.tau, other.t) and np.array_equal(
            self.L, other.L
        ) and np.array_equal(self.O, other.O)


@dataclass(eq=False)
class ExogenousInfo:
    """New information revealed between epochs: next clock, request, pickups.

    ``P[dlt-1, c-1, h-1]`` counts parcels released from the locker during
    the transition, bounded cell-wise by the originating post-decision
    occupancy.
    """

    tau: int
    t: int
    r: RequestType | None
    P: np.ndarray


def empty_occupancy(cfg) -> np.ndarray:
    return np.zeros((cfg.D, cfg.C, cfg.B - 1), dtype=np.int64)


def empty_orders(cfg) -> np.ndarray:
    return np.zeros((cfg.D, cfg.C, cfg.F), dtype=np.int64)


def initial_state(cfg, tau: int = 1) -> PostDecisionState:
    """Empty locker, no pending orders, positioned at the end of day tau-1."""
    return PostDecisionState(tau=tau - 1, t=cfg.T + 1, L=empty_occupancy(cfg), O=empty_orders(cfg))


def classify_epoch(t: int, cfg) -> Epoch:
    """Allocation epoch iff t == T+1; demand-control epoch for t in 1..T."""
    if not 1 <= t <= cfg.T + 1:
        raise ValueError(f"slot t={t} outside 1..T+1={cfg.T + 1}")
    return Epoch.ALLOCATION if t == cfg.T + 1 else Epoch.DEMAND_CONTROL


def check_state(L: np.ndarray, O: np.ndarray, cfg) -> None:
    """Raise if (L, O) violates the basic occupancy invariants."""
    if np.any(L < 0) or np.any(O < 0):
        raise ValueError("negative occupancy or order count")
    per_size = L.sum(axis=(1, 2))
    for dlt in range(cfg.D):
        if per_size[dlt] > cfg.Q[dlt]:
            raise ValueError(
                f"occupancy {per_size[dlt]} exceeds Q_{dlt + 1}={cfg.Q[dlt]}"
            )


def apply_demand_control(state: PreDecisionState, g: int, cfg) -> PostDecisionState:
    """Accept (g=1) or reject (g=0) the current request.

    The locker occupancy never changes here; acceptance adds one pending
    order at (d_r, c_r, f=e_r).
    """
    if classify_epoch(state.t, cfg) is not Epoch.DEMAND_CONTROL:
        raise ValueError("demand control only at slots 1..T")
    if g not in (0, 1):
        raise ValueError(f"demand control decision must be 0 or 1, got {g}")
    if g == 1 and state.r is None:
        raise ValueError("cannot accept when no request arrived")
    O = state.O.copy()
    if g == 1:
        r = state.r
        O[r.d - 1, r.c - 1, r.e - 1] += 1
    return PostDecisionState(tau=state.tau, t=state.t, L=state.L.copy(), O=O)


def apply_allocation(state: PreDecisionState, a: np.ndarray, cfg) -> PostDecisionState:
    """Allocate all orders due today and roll dwell/fulfillment clocks.

    ``a[d-1, dlt-1, c-1]`` counts size-d parcels of type c put into
    size-dlt compartments (dlt >= d). All orders with f=1 must be covered
    exactly; occupied dwell times shift by one day, with parcels leaving
    dwell B-1 dropping out of the tracked state (they are guaranteed to
    be gone by the end of their B-th day).
    """
    if classify_epoch(state.t, cfg) is not Epoch.ALLOCATION:
        raise ValueError("allocation only at t = T+1")
    a = np.asarray(a, dtype=np.int64)
    if a.shape != (cfg.D, cfg.D, cfg.C):
        raise ValueError(f"allocation tensor must be (D, D, C), got {a.shape}")
    if np.any(a < 0):
        raise ValueError("allocation counts must be nonnegative")
    for d in range(1, cfg.D + 1):
        for dlt in range(1, d):
            if np.any(a[d - 1, dlt - 1, :] != 0):
                raise ValueError(f"size-{d} parcel assigned to smaller compartment {dlt}")
    covered = a.sum(axis=1)
    if not np.array_equal(covered, state.O[:, :, 0]):
        raise ValueError("allocation must cover exactly the orders due today")

    L = np.zeros_like(state.L)
    L[:, :, 1:] = state.L[:, :, :-1]
    L[:, :, 0] = a.sum(axis=0)
    O = np.zeros_like(state.O)
    O[:, :, :-1] = state.O[:, :, 1:]
    check_state(L, O, cfg)
    return PostDecisionState(tau=state.tau, t=state.t, L=L, O=O)


def apply_exogenous(post: PostDecisionState, info: ExogenousInfo, cfg) -> PreDecisionState:
    """Reveal pickups and the next epoch's clock/request."""
    P = np.asarray(info.P, dtype=np.int64)
    if P.shape != post.L.shape:
        raise ValueError("pickup tensor shape mismatch")
    if np.any(P < 0) or np.any(P > post.L):
        raise ValueError("pickups exceed current occupancy")
    return PreDecisionState(
        tau=info.tau, t=info.t, L=post.L - P, O=post.O.copy(), r=info.r
    )


def reward(state: PreDecisionState, decision, cfg) -> float:
    """Priority weight on acceptance; zero on rejection and allocation."""
    if classify_epoch(state.t, cfg) is Epoch.ALLOCATION:
        return 0.0
    g = int(decision)
    if g == 1 and state.r is None:
        raise ValueError("cannot accept when no request arrived")
    return float(cfg.m[state.r.c - 1]) if g == 1 else 0.0
