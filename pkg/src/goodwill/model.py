"""Model definition and the derived quantities shared by both state solvers.

Fields are numpy arrays of shape ``(M + 1, N + 1)`` indexed ``[j, i]`` for the
value at ``(t_j, a_i)``; boundary series are arrays of length ``M + 1``.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from . import profiles
from .errors import CflViolation, InadmissibleControl, NegativeControl, StabilityViolation

Profile = Callable[[np.ndarray], np.ndarray]

# Probe nodes for construction-time checks of the profile ranges.
_PROBE = np.linspace(0.0, 1.0, 257)


def trapezoid_weights(n, step):
    """Composite trapezoid weights for ``n`` intervals of width ``step``."""
    w = np.full(n + 1, float(step))
    w[0] = w[-1] = 0.5 * step
    return w


@dataclass(frozen=True)
class ModelParams:
    delta: Profile
    recommendation: Profile
    rho: float
    gamma: float
    discount_rate: float
    beta: float
    revenue_coeff: float
    initial_goodwill: Profile = field(default_factory=lambda: profiles.Constant(1.5))
    fixed_cost: float = 0.0
    horizon: float = 1.0
    max_intensity: float = math.inf

    def __post_init__(self):
        for name in ("delta", "recommendation", "initial_goodwill"):
            object.__setattr__(self, name, profiles.resolve(name, getattr(self, name)))
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        for name in ("discount_rate", "beta", "horizon", "max_intensity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.revenue_coeff < 0.0:
            raise ValueError("revenue_coeff must be non-negative")
        if self.fixed_cost < 0.0:
            raise ValueError("fixed_cost must be non-negative")
        d = self.delta(_PROBE)
        if np.any(d < 0.0) or np.any(d > 1.0):
            raise ValueError("delta must map [0, 1] into [0, 1]")
        if np.any(self.recommendation(_PROBE) < 0.0):
            raise ValueError("recommendation rate must be non-negative")
        check_initial_goodwill(self, _PROBE)


def check_initial_goodwill(params, a):
    g0 = params.initial_goodwill(a)
    if not np.all(np.isfinite(g0)) or np.any(g0 <= 0.0):
        raise ValueError("initial goodwill must be strictly positive")
    return g0


@dataclass(frozen=True)
class Grid:
    """Uniform mesh with ``n_space`` intervals on [0, 1] and ``n_time`` steps on [0, T]."""

    n_space: int
    n_time: int
    horizon: float = 1.0

    def __post_init__(self):
        if self.n_space < 2 or self.n_time < 2:
            raise ValueError("grid needs at least two intervals in each direction")
        if self.dt > self.da * (1.0 + 1e-12):
            raise CflViolation(f"time step {self.dt:g} exceeds space step {self.da:g}")

    @classmethod
    def matching(cls, n_space, horizon=1.0):
        """Grid with dt == da whenever the horizon allows it (M = ceil(N*T))."""
        return cls(n_space, max(2, math.ceil(round(n_space * horizon, 9))), horizon)

    @property
    def da(self):
        return 1.0 / self.n_space

    @property
    def dt(self):
        return self.horizon / self.n_time

    @property
    def a(self):
        return np.linspace(0.0, 1.0, self.n_space + 1)

    @property
    def t(self):
        return np.linspace(0.0, self.horizon, self.n_time + 1)

    @property
    def shape(self):
        return (self.n_time + 1, self.n_space + 1)

    def space_weights(self):
        return trapezoid_weights(self.n_space, self.da)

    def time_weights(self):
        return trapezoid_weights(self.n_time, self.dt)


def discount_profile(params, a_nodes):
    """D on uniform nodes starting at 0, by cumulative trapezoid of delta."""
    a_nodes = np.asarray(a_nodes, dtype=float)
    d = params.delta(a_nodes)
    steps = np.diff(a_nodes)
    cumulative = np.concatenate(([0.0], np.cumsum(0.5 * steps * (d[1:] + d[:-1]))))
    return np.exp(-cumulative)


def discount_factor(params, a, intervals=256):
    """D(a) = exp(-int_0^a delta), composite trapezoid with ``intervals`` panels on [0, a]."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ValueError("discount_factor is defined on [0, 1]")
    s = a[..., None] * np.linspace(0.0, 1.0, intervals + 1)
    d = params.delta(s)
    integral = (a / intervals) * (d.sum(axis=-1) - 0.5 * (d[..., 0] + d[..., -1]))
    out = np.exp(-integral)
    return float(out) if out.ndim == 0 else out


def stability_check(params, quad_nodes=1000):
    """Return ``(passes, value)`` with value = int_0^1 R*D da on ``quad_nodes + 1`` nodes."""
    if quad_nodes < 2:
        raise ValueError("quad_nodes must be at least 2")
    a = np.linspace(0.0, 1.0, quad_nodes + 1)
    value = float(trapezoid_weights(quad_nodes, 1.0 / quad_nodes)
                  @ (params.recommendation(a) * discount_profile(params, a)))
    return value < 1.0, value


def renewal_multiplier(params, quad_nodes=1000):
    """mu = 1 / (1 - int R*D), the amplification of boundary inflow by recommendations."""
    ok, value = stability_check(params, quad_nodes)
    if not ok:
        raise StabilityViolation(f"int_0^1 R(a) D(a) da = {value:.6g} is not below 1")
    return 1.0 / (1.0 - value)


def check_controls(params, u, u0, grid=None):
    u = np.asarray(u, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if u.ndim != 2 or u0.ndim != 1 or u.shape[0] != u0.shape[0]:
        raise ValueError(f"control shapes {u.shape} and {u0.shape} do not match")
    if grid is not None and u.shape != grid.shape:
        raise ValueError(f"control field shape {u.shape} does not match grid {grid.shape}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(u0))):
        raise InadmissibleControl("controls must be finite")
    if u.min() < 0.0 or u0.min() < 0.0:
        raise InadmissibleControl("controls must be non-negative")
    cap = params.max_intensity
    if u.max() > cap or u0.max() > cap:
        raise InadmissibleControl(f"controls exceed the maximal intensity {cap}")
    return u, u0


def aggregate_boundary_control(params, u, u0):
    """w(t_j) = int_0^1 u^rho(t_j, a) da + u0^rho(t_j), trapezoid over all space nodes."""
    u = np.asarray(u, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if u.min() < 0.0 or u0.min() < 0.0:
        raise NegativeControl("controls must be non-negative")
    n = u.shape[1] - 1
    return u ** params.rho @ trapezoid_weights(n, 1.0 / n) + u0 ** params.rho


def lifted_boundary(params, grid, w):
    """g(t_j, a_i) = mu * w(t_j) * D(a_i)."""
    mu = renewal_multiplier(params, grid.n_space)
    return mu * np.outer(np.asarray(w, dtype=float), discount_profile(params, grid.a))
