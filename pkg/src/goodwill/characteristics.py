"""State solution along characteristic lines.

For segments reached from the initial profile (a >= t) the goodwill is the
initial value carried along the characteristic with depreciation plus the
advertising collected on the way. For a < t the characteristic starts at the
boundary, where the inflow is assembled from renewal densities B_phi solving

    B_phi(t) = F_phi(t) + int_0^t k(t - s) B_phi(s) ds,   k = R*D on [0, 1], 0 after.

All integrals are trapezoid sums on a lattice with equal steps in t and a, so
characteristics run through lattice nodes.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SingularStep
from .model import (check_controls, check_initial_goodwill, discount_factor,
                    discount_profile, renewal_multiplier, trapezoid_weights)


@dataclass(frozen=True)
class VolterraProblem:
    kernel: Callable
    forcing: Callable
    t_max: float


@dataclass(frozen=True)
class BoundaryDensity:
    t: np.ndarray
    b: np.ndarray
    db: Optional[np.ndarray] = None


@dataclass(frozen=True)
class CharacteristicSolution:
    G: np.ndarray
    boundary: np.ndarray  # trace G(t, 0+) from the renewal branch
    diagonal_jump: float  # max |G| jump across the line a = t


def volterra_trapezoid(kernel, forcing, h):
    """Solve b = f + k * b on nodes k*h by the trapezoid rule.

    ``kernel`` has one sample per node; ``forcing`` may carry several
    right-hand sides as columns.
    """
    kernel = np.asarray(kernel, dtype=float)
    f = np.asarray(forcing, dtype=float)
    diag = 1.0 - 0.5 * h * kernel[0]
    if diag <= 0.0:
        raise SingularStep(f"1 - h*k(0)/2 = {diag:.3g}; refine the step")
    b = np.empty_like(f)
    b[0] = f[0]
    for j in range(1, f.shape[0]):
        acc = 0.5 * kernel[j] * b[0]
        if j > 1:
            acc = acc + kernel[j - 1:0:-1] @ b[1:j]
        b[j] = (f[j] + h * acc) / diag
    return b


def volterra_residual(kernel, forcing, b, h):
    """Residual of the discrete equation at every node, same quadrature as the solver."""
    kernel = np.asarray(kernel, dtype=float)
    b = np.asarray(b, dtype=float)
    res = np.empty_like(b)
    res[0] = b[0] - forcing[0]
    for j in range(1, b.shape[0]):
        conv = trapezoid_weights(j, h) @ (kernel[j::-1, None] * b[:j + 1].reshape(j + 1, -1))
        res[j] = b[j] - forcing[j] - conv.reshape(b[j].shape)
    return res


def solve_volterra(problem, steps):
    if steps < 2:
        raise ValueError("steps must be at least 2")
    t = np.linspace(0.0, problem.t_max, steps + 1)
    h = problem.t_max / steps
    b = volterra_trapezoid(problem.kernel(t), problem.forcing(t), h)
    return BoundaryDensity(t=t, b=b)


def renewal_kernel(params, intervals=256):
    """k(t) = R(t) D(t) on [0, 1] and zero afterwards."""
    def kernel(t):
        t = np.asarray(t, dtype=float)
        inside = np.clip(t, 0.0, 1.0)
        k = params.recommendation(inside) * discount_factor(params, inside, intervals)
        return np.where(t <= 1.0, k, 0.0)
    return kernel


def renewal_forcing(params, phi, intervals=256):
    """F_phi(t) = int_{min(t,1)}^1 phi(s - t) R(s) D(s) / D(s - t) ds."""
    def forcing(t):
        out = []
        for tk in np.atleast_1d(np.asarray(t, dtype=float)):
            lo = min(tk, 1.0)
            if lo >= 1.0:
                out.append(0.0)
                continue
            s = np.linspace(lo, 1.0, intervals + 1)
            survival = discount_factor(params, s, intervals) / discount_factor(params, s - tk, intervals)
            vals = phi(s - tk) * params.recommendation(s) * survival
            out.append(float(trapezoid_weights(intervals, (1.0 - lo) / intervals) @ vals))
        return np.array(out) if np.ndim(t) else out[0]
    return forcing


def renewal_problem(params, phi, t_max):
    return VolterraProblem(renewal_kernel(params), renewal_forcing(params, phi), t_max)


def derivative_bd(params, steps, t_max=None):
    """B_D together with its derivative, which solves the renewal equation with forcing -k/mu."""
    t_max = params.horizon if t_max is None else t_max
    if steps < 2:
        raise ValueError("steps must be at least 2")
    t = np.linspace(0.0, t_max, steps + 1)
    h = t_max / steps
    kernel = renewal_kernel(params)(t)
    mu = renewal_multiplier(params)
    b = volterra_trapezoid(kernel, renewal_forcing(params, lambda a: discount_factor(params, a))(t), h)
    db = volterra_trapezoid(kernel, -kernel / mu, h)
    return BoundaryDensity(t=t, b=b, db=db)


def _lattice_forcing(phi, rec, dsc, h, length):
    """F_phi on lattice nodes for every column of ``phi`` (values on the space nodes)."""
    n = rec.size - 1
    f = np.zeros((length, phi.shape[1]))
    for k in range(min(n, length)):
        i = np.arange(k, n + 1)
        weights = trapezoid_weights(n - k, h) * rec[i] * dsc[i] / dsc[i - k]
        f[k] = weights @ phi[:n - k + 1]
    return f


def _resample_time(values, src_t, dst_t):
    """Linear interpolation along axis 0 from times ``src_t`` to ``dst_t``."""
    if src_t.size == dst_t.size and np.allclose(src_t, dst_t, rtol=0.0, atol=1e-12):
        return values
    idx = np.clip(np.searchsorted(src_t, dst_t, side="right") - 1, 0, src_t.size - 2)
    lam = np.clip((dst_t - src_t[idx]) / (src_t[idx + 1] - src_t[idx]), 0.0, 1.0)
    lam = lam.reshape((-1,) + (1,) * (values.ndim - 1))
    return (1.0 - lam) * values[idx] + lam * values[idx + 1]


def solve_state_characteristics(params, grid, u, u0):
    u, u0 = check_controls(params, u, u0, grid)
    n = grid.n_space
    h = grid.da
    steps = max(1, int(np.ceil(grid.horizon / h - 1e-9)))
    lat_t = h * np.arange(steps + 1)

    a = grid.a
    rec = params.recommendation(a)
    dsc = discount_profile(params, a)
    g0 = check_initial_goodwill(params, a)
    kernel = np.zeros(steps + 1)
    kernel[:min(n, steps) + 1] = (rec * dsc)[:min(n, steps) + 1]
    mu = renewal_multiplier(params, n)

    p = _resample_time(u, grid.t, lat_t) ** params.rho
    p0 = _resample_time(u0, grid.t, lat_t) ** params.rho
    w = p @ trapezoid_weights(n, h) + p0

    # Column 0 carries G0, column 1 + s carries u^rho(s, .); one Volterra sweep solves all.
    phi = np.column_stack([g0, p.T])
    dens = volterra_trapezoid(kernel, _lattice_forcing(phi, rec, dsc, h, steps + 1), h)
    b_g0 = dens[:, 0]
    b_src = dens[:, 1:]  # b_src[q, s] = B_{u^rho(s)}(q h)
    db = volterra_trapezoid(kernel, -kernel / mu, h)

    inflow = np.empty(steps + 1)
    for k in range(steps + 1):
        q = np.arange(k + 1)
        quad = trapezoid_weights(k, h) if k else np.zeros(1)
        inflow[k] = (b_g0[k] + quad @ b_src[q, k - q] + w[k]
                     - mu * (quad @ (db[k - q] * w[q])))

    # Trapezoid of u^rho/D along each diagonal, accumulated from its entry point.
    q_src = p / dsc
    along = np.zeros_like(p)
    for k in range(1, steps + 1):
        along[k, 1:] = along[k - 1, :-1] + 0.5 * h * (q_src[k - 1, :-1] + q_src[k, 1:])

    G = np.empty_like(p)
    idx = np.arange(n + 1)
    for k in range(steps + 1):
        upstream = idx >= k
        G[k, upstream] = g0[idx[upstream] - k] / dsc[idx[upstream] - k]
        G[k, ~upstream] = inflow[k - idx[~upstream]]
    G = dsc * (G + along)
    diag = idx[: min(n, steps) + 1]
    jump = float(np.max(dsc[diag] * np.abs(g0[0] - inflow[0]))) if diag.size else 0.0

    return CharacteristicSolution(G=_resample_time(G, lat_t, grid.t),
                                  boundary=_resample_time(inflow, lat_t, grid.t),
                                  diagonal_jump=jump)


def boundary_identity_residual(params, grid, boundary, G, u, u0):
    """|G(t,0) - int R G da - int u^rho da - u0^rho| at every time node."""
    rho = params.rho
    wa = grid.space_weights()
    rhs = (params.recommendation(grid.a) * G) @ wa + (np.asarray(u) ** rho) @ wa + np.asarray(u0) ** rho
    return np.abs(np.asarray(boundary) - rhs)
