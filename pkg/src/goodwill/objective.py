"""Discounted profit functional on grid fields."""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeState


@dataclass(frozen=True)
class ProfitBreakdown:
    revenue: float
    ad_cost: float
    fixed: float

    @property
    def total(self):
        return self.revenue - self.ad_cost - self.fixed


def _integrate(grid, f):
    return float(grid.time_weights() @ f @ grid.space_weights())


def evaluate(params, grid, G, u, u0):
    """Double trapezoid of e^{-rt} (K G^gamma - beta/2 (u^2 + u0^2) - c_f) over [0,T]x[0,1].

    ``u0`` does not depend on the segment, so its cost enters with the full
    unit measure of the segment axis.
    """
    G = np.asarray(G, dtype=float)
    u = np.asarray(u, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if G.shape != grid.shape or u.shape != grid.shape or u0.shape != (grid.n_time + 1,):
        raise ValueError("fields do not match the grid")
    if G.min() < 0.0:
        raise NegativeState(f"goodwill is negative ({G.min():.3g})")
    disc = np.exp(-params.discount_rate * grid.t)[:, None]
    revenue = _integrate(grid, disc * params.revenue_coeff * G ** params.gamma)
    ad_cost = _integrate(grid, disc * 0.5 * params.beta * (u ** 2 + u0[:, None] ** 2))
    fixed = _integrate(grid, disc * params.fixed_cost * np.ones(grid.shape))
    return ProfitBreakdown(revenue=revenue, ad_cost=ad_cost, fixed=fixed)
