"""Dense simplex vs. vertex enumeration."""

import numpy as np
import pytest

from lockersim.optim import LpModel, lp_solve
from lockersim.oracles import lp_by_vertex_enumeration


def test_single_variable_cap():
    model = LpModel(c=[1.0], A=[[1.0]], sense=[-1], b=[3.0])
    res = lp_solve(model)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(3.0)


def test_infeasible_system():
    model = LpModel(c=[1.0], A=[[1.0], [1.0]], sense=[-1, 1], b=[1.0, 2.0])
    assert lp_solve(model).status == "infeasible"


def test_unbounded_detected():
    model = LpModel(c=[1.0, 0.0], A=[[0.0, 1.0]], sense=[-1], b=[1.0])
    assert lp_solve(model).status == "unbounded"


def test_equality_and_ge_rows():
    # max x + y subject to x + y = 2, x >= 0.5
    model = LpModel(
        c=[1.0, 1.0],
        A=[[1.0, 1.0], [1.0, 0.0]],
        sense=[0, 1],
        b=[2.0, 0.5],
    )
    res = lp_solve(model)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(2.0)


def test_degenerate_redundant_rows_terminate():
    # several copies of the same binding constraint; Bland's rule must
    # still terminate at the optimum
    model = LpModel(
        c=[1.0, 1.0],
        A=[[1.0, 1.0]] * 4 + [[1.0, 0.0]],
        sense=[-1] * 4 + [-1],
        b=[1.0, 1.0, 1.0, 1.0, 0.6],
    )
    res = lp_solve(model)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0)


def random_bounded_lp(rng, n=None, m=None):
    n = n or int(rng.integers(2, 6))
    m = m or int(rng.integers(1, 5))
    rows = [rng.normal(size=n) for _ in range(m)]
    senses = [-1] * m
    rhs = [float(abs(rng.normal()) + 0.5) for _ in range(m)]
    # box rows guarantee boundedness
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append(e)
        senses.append(-1)
        rhs.append(float(rng.integers(1, 6)))
    return LpModel(c=rng.normal(size=n), A=np.array(rows), sense=senses, b=rhs)


def test_random_lps_match_vertex_enumeration():
    rng = np.random.default_rng(31)
    for _ in range(60):
        model = random_bounded_lp(rng)
        res = lp_solve(model)
        status, best = lp_by_vertex_enumeration(model)
        assert res.status == status == "optimal"
        assert res.objective == pytest.approx(best, abs=1e-8)


def test_ten_variable_lp_against_oracle():
    rng = np.random.default_rng(77)
    model = random_bounded_lp(rng, n=10, m=4)
    res = lp_solve(model)
    status, best = lp_by_vertex_enumeration(model)
    assert res.status == status == "optimal"
    assert res.objective == pytest.approx(best, abs=1e-8)
