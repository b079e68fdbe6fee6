import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goodwill import Grid, NegativeState, mol, objective, preset_params

from conftest import make_params

FLAT_REVENUE = 0.34 * (1.0 - math.exp(-0.028)) / 0.028


def _zero(grid):
    return np.zeros(grid.shape), np.zeros(grid.n_time + 1)


def test_flat_goodwill_revenue():
    assert FLAT_REVENUE == pytest.approx(0.33528411741343117, rel=1e-14)
    g = Grid(20, 20)
    out = objective.evaluate(make_params(), g, np.ones(g.shape), *_zero(g))
    assert out.total == pytest.approx(FLAT_REVENUE, abs=1e-4)
    assert out.ad_cost == 0.0 and out.fixed == 0.0


def test_advertising_cost_only():
    p = make_params(discount_rate=1e-9)
    g = Grid(10, 10)
    c = 0.7
    out = objective.evaluate(p, g, np.zeros(g.shape), np.full(g.shape, c), np.zeros(g.n_time + 1))
    assert out.total == pytest.approx(-0.08 * c * c, rel=1e-6)


def test_boundary_cost_has_unit_weight():
    p = make_params(discount_rate=1e-9)
    g = Grid(10, 10)
    out = objective.evaluate(p, g, np.zeros(g.shape), np.zeros(g.shape), np.full(g.n_time + 1, 1.0))
    assert out.ad_cost == pytest.approx(0.08, rel=1e-6)


def test_fixed_cost():
    g = Grid(10, 10)
    out = objective.evaluate(make_params(fixed_cost=0.2, discount_rate=1e-9), g, np.zeros(g.shape), *_zero(g))
    assert out.fixed == pytest.approx(0.2, rel=1e-6)
    assert out.total == pytest.approx(out.revenue - out.ad_cost - out.fixed, abs=1e-15)


def test_zero_control_baseline_matches_reference():
    g = Grid(50, 50)
    p = preset_params("lq_rho1_eps01")
    G = mol.forward_state(p, g, *_zero(g)).G
    assert objective.evaluate(p, g, G, *_zero(g)).total == pytest.approx(0.31, rel=0.1)


def test_negative_state_rejected():
    g = Grid(5, 5)
    G = np.ones(g.shape)
    G[2, 2] = -1e-3
    with pytest.raises(NegativeState):
        objective.evaluate(make_params(gamma=0.5), g, G, *_zero(g))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.0), st.integers(0, 2**31))
def test_monotone_in_goodwill(gamma, seed):
    rng = np.random.default_rng(seed)
    g = Grid(8, 8)
    p = make_params(gamma=gamma)
    G = rng.uniform(0.0, 3.0, g.shape)
    lo = objective.evaluate(p, g, G, *_zero(g)).revenue
    hi = objective.evaluate(p, g, G + rng.uniform(0.0, 1.0, g.shape), *_zero(g)).revenue
    assert hi >= lo


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100.0))
def test_revenue_scales_with_coefficient(lam):
    g = Grid(8, 8)
    G = np.linspace(0.5, 2.0, g.shape[0] * g.shape[1]).reshape(g.shape)
    base = objective.evaluate(make_params(gamma=0.3), g, G, *_zero(g)).revenue
    scaled = objective.evaluate(make_params(gamma=0.3, revenue_coeff=0.34 * lam), g, G, *_zero(g)).revenue
    assert scaled == pytest.approx(lam * base, rel=1e-12)


def test_quadrature_second_order():
    # G = 1 + t a^2: revenue = K int e^{-rt}(1 + t/3) dt
    r, K = 0.028, 0.34
    t = np.linspace(0.0, 1.0, 10001)
    from scipy.integrate import simpson
    exact = simpson(K * np.exp(-r * t) * (1.0 + t / 3.0), x=t)
    errs = []
    for n in (10, 20, 40):
        g = Grid(n, n)
        tt, aa = np.meshgrid(g.t, g.a, indexing="ij")
        errs.append(abs(objective.evaluate(make_params(), g, 1.0 + tt * aa ** 2, *_zero(g)).total - exact))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)
