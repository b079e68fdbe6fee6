"""Forward-backward sweeping on the optimality system, with coarse-to-fine continuation."""

from dataclasses import dataclass, field
import logging
from typing import List, Optional

import numpy as np

from . import mol, objective
from .errors import NoConvergence
from .model import Grid, check_controls

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ControlPair:
    u: np.ndarray
    u0: np.ndarray

    @classmethod
    def zeros(cls, grid):
        return cls(np.zeros(grid.shape), np.zeros(grid.n_time + 1))

    @classmethod
    def constant(cls, grid, value, value0=None):
        value0 = value if value0 is None else value0
        return cls(np.full(grid.shape, float(value)), np.full(grid.n_time + 1, float(value0)))


def default_levels(horizon=1.0, sizes=(10, 25, 50)):
    return [Grid.matching(n, horizon) for n in sizes]


@dataclass(frozen=True)
class SweepConfig:
    relaxation: float = 0.5
    tol_control: float = 1e-6
    max_iters: int = 500
    refinement_levels: List[Grid] = field(default_factory=default_levels)

    def __post_init__(self):
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")
        if self.tol_control <= 0.0 or self.max_iters < 1:
            raise ValueError("tol_control and max_iters must be positive")
        levels = self.refinement_levels
        if not levels:
            raise ValueError("at least one refinement level is required")
        for coarse, fine in zip(levels, levels[1:]):
            if fine.n_space <= coarse.n_space or fine.n_time <= coarse.n_time:
                raise ValueError("refinement levels must increase in N and M")


@dataclass
class SolveReport:
    grid: Grid
    G_star: np.ndarray
    xi: np.ndarray
    u_star: np.ndarray
    u0_star: np.ndarray
    J_star: float
    J_zero: float
    iterations_per_level: List[int]
    final_control_change: float
    objective_history: List[List[float]] = field(default_factory=list)
    converged: bool = True

    @property
    def max_u(self):
        return float(self.u_star.max())

    @property
    def max_u0(self):
        return float(self.u0_star.max())

    @property
    def max_G(self):
        return float(self.G_star.max())

    @property
    def gain(self):
        """Relative profit increase (J - J0) / J0."""
        return (self.J_star - self.J_zero) / self.J_zero


def control_from_costate(params, t, xi0, xia=None):
    """Maximiser of the Hamiltonian in the control for switching value s = xi(t,0) [+ xi(t,a)].

    Zero for s > 0, saturated at the maximal intensity for very negative s,
    and (-(rho/beta) e^{rt} s)^(1/(2-rho)) in between.
    """
    s = np.asarray(xi0, dtype=float)
    if xia is not None:
        s = s + np.asarray(xia, dtype=float)
    rho = params.rho
    base = np.maximum(-(rho / params.beta) * np.exp(params.discount_rate * np.asarray(t)) * s, 0.0)
    out = np.minimum(base ** (1.0 / (2.0 - rho)), params.max_intensity)
    return float(out) if out.ndim == 0 else out


def control_norm(grid, u, u0):
    """Discrete L2 norm of a control pair (trapezoid in t and a)."""
    wt = grid.time_weights()
    return float(np.sqrt(wt @ (u ** 2) @ grid.space_weights() + wt @ u0 ** 2))


def controls_from_adjoint(params, grid, xi):
    t = grid.t
    u = control_from_costate(params, t[:, None], xi[:, :1], xi)
    u0 = control_from_costate(params, t, xi[:, 0])
    return u, u0


@dataclass(frozen=True)
class _Sweep:
    u: np.ndarray
    u0: np.ndarray
    change: float
    state: mol.MolState
    adjoint: mol.MolAdjoint


def _sweep(params, grid, u, u0, omega):
    state = mol.forward_state(params, grid, u, u0)
    adjoint = mol.backward_adjoint(params, grid, state)
    cand_u, cand_u0 = controls_from_adjoint(params, grid, adjoint.xi)
    new_u = omega * cand_u + (1.0 - omega) * u
    new_u0 = omega * cand_u0 + (1.0 - omega) * u0
    change = control_norm(grid, new_u - u, new_u0 - u0) / (1.0 + control_norm(grid, u, u0))
    return _Sweep(new_u, new_u0, change, state, adjoint)


def sweep_once(params, grid, u, u0, omega):
    """One forward solve, one backward solve and a relaxed control update.

    Returns ``(u_new, u0_new, change)`` with the relative discrete-L2 change.
    """
    u, u0 = check_controls(params, u, u0, grid)
    step = _sweep(params, grid, u, u0, omega)
    return step.u, step.u0, step.change


def transfer_controls(pair, src, dst):
    """Bilinear interpolation of a control pair onto another grid (keeps bounds)."""
    u = np.array([np.interp(dst.a, src.a, row) for row in pair.u])
    u = np.array([np.interp(dst.t, src.t, col) for col in u.T]).T
    return ControlPair(u, np.interp(dst.t, src.t, pair.u0))


def _iterate_level(params, grid, pair, config):
    u, u0 = check_controls(params, pair.u, pair.u0, grid)
    history = []
    change = np.inf
    for it in range(1, config.max_iters + 1):
        step = _sweep(params, grid, u, u0, config.relaxation)
        history.append(objective.evaluate(params, grid, step.state.G, u, u0).total)
        u, u0, change = step.u, step.u0, step.change
        if change < config.tol_control:
            return ControlPair(u, u0), it, change, history, True
    return ControlPair(u, u0), config.max_iters, change, history, False


def solve(params, config=None, initial_guess=None, initial_grid=None):
    """Optimal controls on the finest refinement level.

    ``initial_guess`` lives on ``initial_grid`` (default: the coarsest level)
    and is transferred to the first level by interpolation.
    """
    config = SweepConfig() if config is None else config
    levels = config.refinement_levels
    for g in levels:
        if abs(g.horizon - params.horizon) > 1e-12:
            raise ValueError("refinement levels must span the model horizon")
    first = levels[0]
    if initial_guess is None:
        pair = ControlPair.zeros(first)
    else:
        pair = transfer_controls(initial_guess, initial_grid or first, first)

    iterations, histories = [], []
    prev = first
    converged = True
    change = np.inf
    for grid in levels:
        pair = transfer_controls(pair, prev, grid)
        pair, its, change, history, ok = _iterate_level(params, grid, pair, config)
        log.info("level N=%d M=%d: %d sweeps, change %.3g", grid.n_space, grid.n_time, its, change)
        iterations.append(its)
        histories.append(history)
        converged = converged and ok
        prev = grid

    grid = levels[-1]
    state = mol.forward_state(params, grid, pair.u, pair.u0)
    adjoint = mol.backward_adjoint(params, grid, state)
    zero = ControlPair.zeros(grid)
    state_zero = mol.forward_state(params, grid, zero.u, zero.u0)
    report = SolveReport(
        grid=grid,
        G_star=state.G,
        xi=adjoint.xi,
        u_star=pair.u,
        u0_star=pair.u0,
        J_star=objective.evaluate(params, grid, state.G, pair.u, pair.u0).total,
        J_zero=objective.evaluate(params, grid, state_zero.G, zero.u, zero.u0).total,
        iterations_per_level=iterations,
        final_control_change=float(change),
        objective_history=histories,
        converged=converged,
    )
    if not converged:
        raise NoConvergence(f"sweep did not reach tol {config.tol_control:g} "
                            f"(last change {change:.3g})", report)
    return report
