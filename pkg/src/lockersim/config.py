"""Problem configuration: locker layout, time grid, demand and pickup laws.

A configuration bundles everything that stays fixed over a simulation run:
compartment counts per size, the slot grid of a day, customer priorities,
the per-slot arrival mix and the pickup-time distribution. Indices are
1-based in the public vocabulary (sizes d/delta, customer types c, lead
times e, dwell h, fulfillment f) and 0-based inside numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .stochastic import PickupLaw

# Aggregate share of parcels picked up on day 1/2/3 across the whole
# customer population; all pickup variants must preserve this mix.
_AGGREGATE_PICKUP = np.array([0.6, 0.2, 0.2])

PICKUP_VARIANTS = {
    # per customer type: P(b = 1..3)
    "id": [(0.6, 0.2, 0.2), (0.6, 0.2, 0.2)],
    "pf": [(0.8, 0.1, 0.1), (0.5, 0.25, 0.25)],
    "pu": [(0.94, 0.04, 0.02), (0.43, 0.28, 0.29)],
}

SETTING_IDS = tuple(f"{m}{v}" for m in (1, 2, 3) for v in ("id", "pf", "pu"))


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    """All global parameters of a locker demand-management instance.

    Attributes:
        D: number of compartment/parcel sizes.
        Q: compartments per size, length D.
        C: number of customer types.
        m: priority weight per customer type, length C.
        E: maximum lead time in days; the pending-order horizon F equals E.
        B: maximum storage time in days.
        T: request slots per day (the allocation decision happens at T+1).
        p_customer: per-slot arrival probability of each customer type.
        p_none: per-slot probability of no arrival.
        p_size: (C, D) parcel-size probabilities per customer type.
        p_lead: (C, E) lead-time probabilities per customer type.
        pickup: pickup-day law per customer type; the within-day pickup
            slot q is uniform over {1..T}.
        name: optional setting label such as "3pu".
    """

    D: int
    Q: tuple[int, ...]
    C: int
    m: tuple[float, ...]
    E: int
    B: int
    T: int
    p_customer: tuple[float, ...]
    p_none: float
    p_size: np.ndarray
    p_lead: np.ndarray
    pickup: PickupLaw
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "p_size", np.asarray(self.p_size, dtype=float))
        object.__setattr__(self, "p_lead", np.asarray(self.p_lead, dtype=float))
        if len(self.Q) != self.D or any(q < 0 for q in self.Q):
            raise ValueError("Q must have one nonnegative entry per size")
        if len(self.m) != self.C or any(w <= 0 for w in self.m):
            raise ValueError("m must have one positive weight per customer type")
        if self.B < 1:
            raise ValueError("maximum storage time B must be >= 1")
        if self.E < 1 or self.T < 1:
            raise ValueError("E and T must be >= 1")
        total = sum(self.p_customer) + self.p_none
        if not np.isclose(total, 1.0):
            raise ValueError(f"arrival probabilities sum to {total}, expected 1")
        if self.p_size.shape != (self.C, self.D):
            raise ValueError("p_size must be (C, D)")
        if self.p_lead.shape != (self.C, self.E):
            raise ValueError("p_lead must be (C, E)")
        if not np.allclose(self.p_size.sum(axis=1), 1.0):
            raise ValueError("each p_size row must sum to 1")
        if not np.allclose(self.p_lead.sum(axis=1), 1.0):
            raise ValueError("each p_lead row must sum to 1")
        if self.pickup.p_b.shape != (self.C, self.B):
            raise ValueError("pickup law must be (C, B)")

    @property
    def F(self) -> int:
        """Planning horizon for pending orders (= maximum lead time E)."""
        return self.E

    @property
    def F_hat(self) -> int:
        """Extended tentative-plan horizon F + B - 1 used for features."""
        return self.F + self.B - 1

    @property
    def total_compartments(self) -> int:
        return int(sum(self.Q))

    def arrival_mix(self) -> np.ndarray:
        """P(customer type | some request arrives), length C."""
        p = np.asarray(self.p_customer, dtype=float)
        return p / p.sum()


def pickup_table(variant: str, arrival_share: tuple[float, ...] = (0.3, 0.6)) -> PickupLaw:
    """Two-type pickup law for one of the named variants (id, pf, pu).

    Asserts that the population-aggregated distribution stays at the
    60/20/20 day-1/2/3 mix regardless of the variant.
    """
    if variant not in PICKUP_VARIANTS:
        raise ValueError(f"unknown pickup variant {variant!r}")
    p_b = np.array(PICKUP_VARIANTS[variant], dtype=float)
    share = np.asarray(arrival_share, dtype=float)
    share = share / share.sum()
    aggregated = share @ p_b
    if not np.allclose(aggregated, _AGGREGATE_PICKUP, atol=1e-9):
        raise ValueError(
            f"pickup variant {variant!r} breaks the aggregate 60/20/20 mix: {aggregated}"
        )
    return PickupLaw(p_b=p_b)


def parse_setting(setting: str) -> tuple[int, str]:
    """Split a setting id like "3pu" into (premium weight, pickup variant)."""
    setting = setting.strip()
    if len(setting) < 3 or not setting[0].isdigit():
        raise ValueError(f"malformed setting id {setting!r}")
    m1 = int(setting[0])
    variant = setting[1:]
    if m1 not in (1, 2, 3) or variant not in PICKUP_VARIANTS:
        raise ValueError(f"unknown setting id {setting!r}")
    return m1, variant


def _two_type_config(Q, T, m1, pickup_variant, name=""):
    return ProblemConfig(
        D=3,
        Q=tuple(Q),
        C=2,
        m=(float(m1), 1.0),
        E=5,
        B=3,
        T=T,
        p_customer=(0.3, 0.6),
        p_none=0.1,
        p_size=np.array([[1 / 2, 1 / 3, 1 / 6], [1 / 2, 1 / 3, 1 / 6]]),
        p_lead=np.array([[1.0, 0.0, 0.0, 0.0, 0.0], [0.2, 0.2, 0.3, 0.2, 0.1]]),
        pickup=pickup_table(pickup_variant),
        name=name or f"{m1}{pickup_variant}",
    )


def main_config(m1: int = 1, pickup_variant: str = "id") -> ProblemConfig:
    """Full-size instance: Q=(15,10,5), T=20, two customer types."""
    return _two_type_config((15, 10, 5), 20, m1, pickup_variant)


def desk_config(m1: int = 1, pickup_variant: str = "id") -> ProblemConfig:
    """Reduced instance for fast experiments: Q=(4,3,2), T=10."""
    return _two_type_config((4, 3, 2), 10, m1, pickup_variant)


def setting_config(setting: str, scale: str = "paper") -> ProblemConfig:
    """Config for a setting id ("1id".."3pu") at the given scale."""
    m1, variant = parse_setting(setting)
    if scale == "paper":
        return main_config(m1, variant)
    if scale == "desk":
        return desk_config(m1, variant)
    raise ValueError(f"unknown scale {scale!r}")


def small_two_size_config() -> ProblemConfig:
    """Hand-traceable instance: two sizes, Q=(3,2), one customer type, T=9.

    Used by the walkthrough tests and demos; lead times up to 6 days and a
    3-day maximum storage time.
    """
    return ProblemConfig(
        D=2,
        Q=(3, 2),
        C=1,
        m=(1.0,),
        E=6,
        B=3,
        T=9,
        p_customer=(0.9,),
        p_none=0.1,
        p_size=np.array([[0.7, 0.3]]),
        p_lead=np.array([[0.3, 0.2, 0.2, 0.1, 0.1, 0.1]]),
        pickup=PickupLaw(p_b=np.array([[0.6, 0.2, 0.2]])),
        name="two-size",
    )


def probe_config() -> ProblemConfig:
    """Minimal instance (Q=(1,1), one type, T=3, B=2, E=2) for exhaustive checks."""
    return ProblemConfig(
        D=2,
        Q=(1, 1),
        C=1,
        m=(1.0,),
        E=2,
        B=2,
        T=3,
        p_customer=(0.8,),
        p_none=0.2,
        p_size=np.array([[0.5, 0.5]]),
        p_lead=np.array([[0.5, 0.5]]),
        pickup=PickupLaw(p_b=np.array([[0.7, 0.3]])),
        name="probe",
    )
