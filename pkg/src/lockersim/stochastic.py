"""Pickup-time laws, conditional residual distributions and scenario streams.

The within-day pickup slot q is uniform over {1..T} for every customer
type; the pickup day b follows a per-type law over {1..B}. Scenario
streams pre-draw the arrival sequence and one pickup tag per prospective
parcel so that two policies consuming the same stream see identical
randomness no matter which requests they accept (common random numbers).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np


class DegenerateLawError(ValueError):
    """Raised when conditioning on a survival event of probability zero."""


@dataclass(frozen=True, eq=False)
class PickupLaw:
    """Pickup-day distribution per customer type: p_b[c-1, b-1], rows sum to 1."""

    p_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p_b", np.asarray(self.p_b, dtype=float))
        if self.p_b.ndim != 2:
            raise ValueError("p_b must be a (C, B) matrix")
        if np.any(self.p_b < 0) or not np.allclose(self.p_b.sum(axis=1), 1.0):
            raise ValueError("each pickup row must be a probability vector")

    @property
    def B(self) -> int:
        return self.p_b.shape[1]


def residual_pickup_distribution(
    law: PickupLaw, c: int, h: int, t: int, T: int
) -> np.ndarray:
    """Distribution of the total pickup day beta for a surviving parcel.

    A parcel of customer type ``c`` is spending its ``h``-th day in the
    locker and is still present at slot ``t``, i.e. it survived the event
    {b > h} or {b = h, q > t}. Pickups at slot q are revealed at the
    slot-q epoch, so "later today" carries the leftover slot mass
    (T - t)/T, which vanishes at the allocation epoch t = T+1.

    Returns a length-B vector over beta in {1..B} with zero mass below h.
    """
    if not 1 <= h <= law.B - 1:
        raise ValueError(f"dwell h={h} outside 1..B-1")
    if not 1 <= t <= T + 1:
        raise ValueError(f"slot t={t} outside 1..T+1")
    row = law.p_b[c - 1]
    w = np.zeros(law.B)
    w[h - 1] = row[h - 1] * max(T - t, 0) / T
    w[h:] = row[h:]
    total = w.sum()
    if total <= 0.0:
        raise DegenerateLawError(
            f"survival event has probability zero for (c={c}, h={h}, t={t})"
        )
    return w / total


def conditional_pickup_day(law: PickupLaw, c: int, min_day: int) -> np.ndarray:
    """Pickup-day distribution conditioned on {b >= min_day}, length B."""
    row = law.p_b[c - 1]
    w = np.zeros(law.B)
    w[min_day - 1 :] = row[min_day - 1 :]
    total = w.sum()
    if total <= 0.0:
        raise DegenerateLawError(f"no pickup mass at or after day {min_day} for c={c}")
    return w / total


def draw_request(cfg, rng: np.random.Generator):
    """Sample one slot's arrival outcome: a (c, d, e) triple or None.

    Consumes exactly three uniforms regardless of the outcome so that
    streams with equal arrival tables are reproducible draw-for-draw.
    """
    u = rng.random(3)
    return _request_from_uniforms(cfg, u[0], u[1], u[2])


def _request_from_uniforms(cfg, u_type, u_size, u_lead):
    from .domain import RequestType

    acc = 0.0
    c = 0
    for i, p in enumerate(cfg.p_customer):
        acc += p
        if u_type < acc:
            c = i + 1
            break
    if c == 0:
        return None
    d = int(np.searchsorted(np.cumsum(cfg.p_size[c - 1]), u_size, side="right")) + 1
    e = int(np.searchsorted(np.cumsum(cfg.p_lead[c - 1]), u_lead, side="right")) + 1
    return RequestType(c=c, d=min(d, cfg.D), e=min(e, cfg.E))


@dataclass(eq=False)
class ScenarioStream:
    """Pre-drawn arrival and pickup randomness for one simulated instance.

    ``arr_c/arr_d/arr_e`` hold the request attributes per (day-1, slot-1)
    with 0 encoding "no arrival". ``tag_b/tag_q`` hold the pickup tag of
    the prospective parcel carried by the request arriving in that slot;
    the tag depends only on (master_seed, instance, day, slot), never on
    any policy's decisions.
    """

    master_seed: int
    instance: int
    days: int
    T: int
    arr_c: np.ndarray
    arr_d: np.ndarray
    arr_e: np.ndarray
    tag_b: np.ndarray
    tag_q: np.ndarray

    def arrival(self, day: int, slot: int):
        from .domain import RequestType

        c = int(self.arr_c[day - 1, slot - 1])
        if c == 0:
            return None
        return RequestType(
            c=c, d=int(self.arr_d[day - 1, slot - 1]), e=int(self.arr_e[day - 1, slot - 1])
        )

    def pickup_tag(self, day: int, slot: int) -> tuple[int, int]:
        """(b, q) tag of the parcel behind the request arriving at (day, slot)."""
        return int(self.tag_b[day - 1, slot - 1]), int(self.tag_q[day - 1, slot - 1])

    def __eq__(self, other):
        if not isinstance(other, ScenarioStream):
            return NotImplemented
        return (
            self.days == other.days
            and self.T == other.T
            and all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("arr_c", "arr_d", "arr_e", "tag_b", "tag_q")
            )
        )


def build_scenario_stream(cfg, master_seed: int, instance: int, days: int) -> ScenarioStream:
    """Draw a scenario stream for ``days`` simulated days.

    Seeding is hierarchical and setting-free: the arrival child stream
    depends on (master_seed, instance) only, so settings that share one
    arrival table see identical request sequences; pickup tags are built
    from a second child stream of uniforms shared across settings and
    pushed through the setting's own pickup law.
    """
    arr_rng = np.random.default_rng(np.random.SeedSequence([int(master_seed), 11, int(instance)]))
    tag_rng = np.random.default_rng(np.random.SeedSequence([int(master_seed), 13, int(instance)]))

    u_arr = arr_rng.random((days, cfg.T, 3))
    u_tag = tag_rng.random((days, cfg.T, 2))

    arr_c = np.zeros((days, cfg.T), dtype=np.int64)
    arr_d = np.zeros((days, cfg.T), dtype=np.int64)
    arr_e = np.zeros((days, cfg.T), dtype=np.int64)
    tag_b = np.zeros((days, cfg.T), dtype=np.int64)
    tag_q = np.zeros((days, cfg.T), dtype=np.int64)

    cum_b = np.cumsum(cfg.pickup.p_b, axis=1)
    for day in range(days):
        for slot in range(cfg.T):
            r = _request_from_uniforms(cfg, *u_arr[day, slot])
            if r is None:
                continue
            arr_c[day, slot] = r.c
            arr_d[day, slot] = r.d
            arr_e[day, slot] = r.e
            b = int(np.searchsorted(cum_b[r.c - 1], u_tag[day, slot, 0], side="right")) + 1
            tag_b[day, slot] = min(b, cfg.B)
            tag_q[day, slot] = min(int(u_tag[day, slot, 1] * cfg.T) + 1, cfg.T)

    return ScenarioStream(
        master_seed=int(master_seed),
        instance=int(instance),
        days=days,
        T=cfg.T,
        arr_c=arr_c,
        arr_d=arr_d,
        arr_e=arr_e,
        tag_b=tag_b,
        tag_q=tag_q,
    )


def dump_stream(stream: ScenarioStream) -> str:
    """Serialize a stream as a flat text log, one line per (day, slot)."""
    out = io.StringIO()
    out.write(
        f"# master_seed={stream.master_seed} instance={stream.instance} "
        f"days={stream.days} T={stream.T}\n"
    )
    out.write("day,slot,c,d,e,b,q\n")
    for day in range(1, stream.days + 1):
        for slot in range(1, stream.T + 1):
            c = stream.arr_c[day - 1, slot - 1]
            if c == 0:
                out.write(f"{day},{slot},-,-,-,-,-\n")
            else:
                out.write(
                    f"{day},{slot},{c},{stream.arr_d[day-1, slot-1]},"
                    f"{stream.arr_e[day-1, slot-1]},{stream.tag_b[day-1, slot-1]},"
                    f"{stream.tag_q[day-1, slot-1]}\n"
                )
    return out.getvalue()


def load_stream(text: str) -> ScenarioStream:
    """Reconstruct a stream from the text-log format of :func:`dump_stream`."""
    lines = text.strip().splitlines()
    meta = {}
    for tok in lines[0].lstrip("# ").split():
        k, v = tok.split("=")
        meta[k] = int(v)
    days, T = meta["days"], meta["T"]
    arrays = {f: np.zeros((days, T), dtype=np.int64) for f in ("arr_c", "arr_d", "arr_e", "tag_b", "tag_q")}
    for line in lines[2:]:
        parts = line.split(",")
        day, slot = int(parts[0]), int(parts[1])
        if parts[2] == "-":
            continue
        for f, v in zip(("arr_c", "arr_d", "arr_e", "tag_b", "tag_q"), parts[2:]):
            arrays[f][day - 1, slot - 1] = int(v)
    return ScenarioStream(
        master_seed=meta["master_seed"], instance=meta["instance"], days=days, T=T, **arrays
    )
