"""Method-of-lines discretisation of the state and adjoint equations.

Space is discretised with upwind differences for the goodwill transport and
downwind differences for the costate; both are advanced with classical RK4 at
the grid time step. Controls between time nodes are interpolated linearly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularState
from .model import check_controls, check_initial_goodwill

STATE_FLOOR = 1e-12


@dataclass(frozen=True)
class MolState:
    G: np.ndarray
    boundary: np.ndarray


@dataclass(frozen=True)
class MolAdjoint:
    xi: np.ndarray


def boundary_weights(grid):
    """Trapezoid weights over a_1..a_N used by the algebraic boundary row (zero at a_0)."""
    w = np.full(grid.n_space + 1, grid.da)
    w[0] = 0.0
    w[1] *= 0.5
    w[-1] *= 0.5
    return w


def boundary_value(params, grid, g, u_rho_row, u0_rho):
    """G_0 = da*(f_1/2 + f_2 + ... + f_{N-1} + f_N/2) + u0^rho with f_i = R_i G_i + u_i^rho."""
    rec = params.recommendation(grid.a)
    return boundary_weights(grid) @ (rec * g + u_rho_row) + u0_rho


def _stage_powers(u, rho):
    """u^rho at the RK4 stage times t_j, t_j + dt/2 and t_{j+1}."""
    return u ** rho, (0.5 * (u[1:] + u[:-1])) ** rho


def forward_state(params, grid, u, u0):
    """Integrate the goodwill rows i = 1..N forward in time for fixed controls."""
    u, u0 = check_controls(params, u, u0, grid)
    a, da, dt = grid.a, grid.da, grid.dt
    dep = params.delta(a)
    rec = params.recommendation(a)
    bw = boundary_weights(grid)
    p_node, p_mid = _stage_powers(u, params.rho)
    p0_node, p0_mid = _stage_powers(u0, params.rho)

    def close(g, p, p0):
        g[0] = bw @ (rec * g + p) + p0
        return g

    def rate(g, p):
        k = np.zeros_like(g)
        k[1:] = -g[1:] * (dep[1:] + 1.0 / da) + g[:-1] / da + p[1:]
        return k

    G = np.empty(grid.shape)
    boundary = np.empty(grid.n_time + 1)
    G[0] = check_initial_goodwill(params, a)
    g = close(G[0].copy(), p_node[0], p0_node[0])
    boundary[0] = g[0]
    for j in range(grid.n_time):
        k1 = rate(g, p_node[j])
        k2 = rate(close(g + 0.5 * dt * k1, p_mid[j], p0_mid[j]), p_mid[j])
        k3 = rate(close(g + 0.5 * dt * k2, p_mid[j], p0_mid[j]), p_mid[j])
        k4 = rate(close(g + dt * k3, p_node[j + 1], p0_node[j + 1]), p_node[j + 1])
        g = close(g + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), p_node[j + 1], p0_node[j + 1])
        G[j + 1] = g
        boundary[j + 1] = g[0]
    return MolState(G=G, boundary=boundary)


def control_gradient(params, grid, u, u0, xi):
    """Adjoint-based gradient densities of J with respect to (u, u0).

    dJ/du  = -e^{-rt} beta u  - rho u^(rho-1) (xi(t,a) + xi(t,0))
    dJ/du0 = -e^{-rt} beta u0 - rho u0^(rho-1) xi(t,0)

    Only meaningful at strictly positive controls when rho < 1.
    """
    rho = params.rho
    disc = np.exp(-params.discount_rate * grid.t)
    xi0 = xi[:, 0]
    grad_u = -disc[:, None] * params.beta * u - rho * u ** (rho - 1.0) * (xi + xi0[:, None])
    grad_u0 = -disc * params.beta * u0 - rho * u0 ** (rho - 1.0) * xi0
    return grad_u, grad_u0


def directional_derivative(grid, grad_u, grad_u0, h, h0):
    """Trapezoid inner product of the gradient densities with a direction (h, h0)."""
    wt = grid.time_weights()
    return float(wt @ (grad_u * h) @ grid.space_weights() + wt @ (grad_u0 * h0))


def backward_adjoint(params, grid, state):
    """Integrate the costate rows i = 0..N-1 backward from xi(T, .) = 0 with xi_N = 0.

    The i = 0 row uses the same downwind stencil as the interior rows, so
    xi(t, 0) evolves as one of the unknowns.
    """
    G = state.G
    gamma = params.gamma
    if not np.all(np.isfinite(G)):
        raise SingularState("state contains non-finite values")
    if gamma < 1.0 and G.min() <= STATE_FLOOR:
        raise SingularState(f"goodwill fell to {G.min():.3g}; G^(gamma-1) is singular")
    a, t, da, dt = grid.a, grid.t, grid.da, grid.dt
    dep = params.delta(a)[:-1]
    rec = params.recommendation(a)[:-1]
    scale = params.revenue_coeff * gamma

    def marginal_revenue(g):
        return np.ones(g.size - 1) if gamma == 1.0 else g[:-1] ** (gamma - 1.0)

    def rate(x, s, mr):
        k = np.zeros_like(x)
        k[:-1] = (scale * np.exp(-params.discount_rate * s) * mr
                  - x[0] * rec + x[:-1] * (dep + 1.0 / da) - x[1:] / da)
        return k

    xi = np.zeros(grid.shape)
    x = np.zeros(grid.n_space + 1)
    h = -dt
    for j in range(grid.n_time, 0, -1):
        s = t[j]
        mr_hi = marginal_revenue(G[j])
        mr_mid = marginal_revenue(0.5 * (G[j] + G[j - 1]))
        mr_lo = marginal_revenue(G[j - 1])
        k1 = rate(x, s, mr_hi)
        k2 = rate(x + 0.5 * h * k1, s + 0.5 * h, mr_mid)
        k3 = rate(x + 0.5 * h * k2, s + 0.5 * h, mr_mid)
        k4 = rate(x + h * k3, s + h, mr_lo)
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x[-1] = 0.0
        xi[j - 1] = x
    return MolAdjoint(xi=xi)
