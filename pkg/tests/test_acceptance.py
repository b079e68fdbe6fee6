"""End-to-end acceptance checks. Each prints one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from goodwill import Grid, StabilityViolation, mol, objective, preset_params
from goodwill.characteristics import (boundary_identity_residual, renewal_problem,
                                      solve_state_characteristics, solve_volterra)
from goodwill.model import discount_factor, renewal_multiplier, stability_check
from goodwill.sweep import ControlPair, SweepConfig, control_norm, controls_from_adjoint, solve

from conftest import make_params, record_criterion

TOL = 1e-6

# (rho, eps_g): J0, J, max u, max u0, max G
REFERENCE = {
    "lq_rho05_eps01": (0.31, 0.318, 0.175, 0.11, 1.55),
    "lq_rho05_eps1": (0.276, 0.387, 0.769, 0.485, 2.111),
    "lq_rho1_eps01": (0.31, 0.313, 0.217, 0.108, 1.5),
    "lq_rho1_eps1": (0.276, 0.36, 1.325, 0.662, 2.307),
}
NAMES = list(REFERENCE)


@pytest.fixture(scope="module")
def optimised():
    out = {}
    for name in NAMES:
        start = time.perf_counter()
        rep = solve(preset_params(name), SweepConfig(relaxation=0.5, tol_control=TOL))
        out[name] = (rep, time.perf_counter() - start)
    return out


def _rel(got, want):
    return abs(got - want) / abs(want)


@pytest.mark.parametrize("name", NAMES)
def test_reference_values(optimised, name):
    rep, elapsed = optimised[name]
    want = REFERENCE[name]
    got = (rep.J_zero, rep.J_star, rep.max_u, rep.max_u0, rep.max_G)
    tols = (0.10, 0.10, 0.20, 0.20, 0.20)
    labels = ("J0", "J", "max_u", "max_u0", "max_G")
    misses = [f"{lab} {g:.4g} vs {w:.4g}" for lab, g, w, tol in zip(labels, got, want, tols)
              if _rel(g, w) > tol]
    ok = not misses and elapsed < 60.0
    detail = "; ".join(misses) if misses else f"{elapsed:.1f}s"
    record_criterion(f"1 reference values {name}", ok, detail)
    assert ok, detail


def _smooth3(x):
    return np.convolve(x, np.ones(3) / 3.0, mode="valid")


@pytest.mark.parametrize("name", ["lq_rho05_eps1", "lq_rho1_eps1"])
def test_strengthening_shape(optimised, name):
    u = optimised[name][0].u_star
    peak_at_start = bool(np.all(np.argmax(u, axis=0) == 0))
    decreasing = all(np.all(np.diff(_smooth3(u[:, i])) <= 1e-12) for i in range(u.shape[1]))
    ok = peak_at_start and decreasing
    record_criterion(f"2 decreasing profile {name}", ok,
                     f"peak at t=0: {peak_at_start}, non-increasing: {decreasing}")
    assert ok


def test_supportive_shape(optimised):
    u = optimised["lq_rho1_eps01"][0].u_star
    m = u.shape[0]
    interior = [i for i in range(u.shape[1]) if 0 < int(np.argmax(u[:, i])) < m - 1]
    ok = bool(interior)
    record_criterion("2 interior maximum lq_rho1_eps01", ok, f"{len(interior)} segments with interior peak")
    assert ok


def _l2_gap(params, n):
    g = Grid(n, n)
    tt, aa = np.meshgrid(g.t, g.a, indexing="ij")
    u = 0.2 * (1.0 + aa) * (1.0 + tt)
    u0 = np.full(n + 1, 0.1)
    d = mol.forward_state(params, g, u, u0).G - solve_state_characteristics(params, g, u, u0).G
    return float(np.sqrt(g.time_weights() @ d ** 2 @ g.space_weights()))


def test_oracle_equivalence():
    p = preset_params("lq_rho1_eps1")
    coarse, fine = _l2_gap(p, 50), _l2_gap(p, 100)
    ratio = coarse / fine
    ok = coarse <= 0.05 and abs(ratio - 2.0) <= 0.6
    record_criterion("3 characteristic vs MOL", ok, f"L2 {coarse:.4g} -> {fine:.4g}, ratio {ratio:.3f}")
    assert ok


def test_volterra_closed_form():
    p = make_params(recommendation=0.5)
    dens = solve_volterra(renewal_problem(p, lambda a: discount_factor(p, a), 1.0), 1000)
    err = float(np.max(np.abs(dens.b - (1.0 - 0.5 * np.exp(0.5 * dens.t)))))
    ok = err <= 1e-4
    record_criterion("4 Volterra closed form", ok, f"max error {err:.2e}")
    assert ok


def _directions(grid, count, seed=0):
    rng = np.random.default_rng(seed)
    tt, aa = np.meshgrid(grid.t, grid.a, indexing="ij")
    for _ in range(count):
        c = rng.standard_normal((3, 3))
        c0 = rng.standard_normal(3)
        h = sum(c[p, q] * np.cos(p * np.pi * tt) * np.cos(q * np.pi * aa)
                for p in range(3) for q in range(3))
        h0 = sum(c0[p] * np.cos(p * np.pi * grid.t) for p in range(3))
        yield h, h0


def test_gradient_check():
    p = preset_params("lq_rho1_eps1")
    g = Grid(3200, 3200)
    u = np.full(g.shape, 0.3)
    u0 = np.full(g.n_time + 1, 0.2)
    eps = 1e-5

    def J(v, v0):
        return objective.evaluate(p, g, mol.forward_state(p, g, v, v0).G, v, v0).total

    xi = mol.backward_adjoint(p, g, mol.forward_state(p, g, u, u0)).xi
    gu, gu0 = mol.control_gradient(p, g, u, u0, xi)
    errs = []
    for h, h0 in _directions(g, 10):
        adj = mol.directional_derivative(g, gu, gu0, h, h0)
        fd = (J(u + eps * h, u0 + eps * h0) - J(u - eps * h, u0 - eps * h0)) / (2.0 * eps)
        errs.append(abs(adj - fd) / abs(fd))
    ok = max(errs) < 0.01
    record_criterion("5 adjoint gradient vs finite differences", ok, f"max rel error {max(errs):.2e}")
    assert ok


def test_fixed_point(optimised):
    worst = 0.0
    for name in NAMES:
        rep = optimised[name][0]
        u, u0 = controls_from_adjoint(preset_params(name), rep.grid, rep.xi)
        worst = max(worst, control_norm(rep.grid, u - rep.u_star, u0 - rep.u0_star))
    ok = worst < 10 * TOL
    record_criterion("6 maximum-principle fixed point", ok, f"max L2 gap {worst:.2e}")
    assert ok


def test_boundary_identity(optimised):
    worst = 0.0
    for name in NAMES:
        rep = optimised[name][0]
        p, g = preset_params(name), rep.grid
        for pair in (ControlPair.zeros(g), ControlPair(rep.u_star, rep.u0_star)):
            sol = solve_state_characteristics(p, g, pair.u, pair.u0)
            res = boundary_identity_residual(p, g, sol.boundary, sol.G, pair.u, pair.u0)
            worst = max(worst, float(np.max(res / (3.0 * g.da * (1.0 + np.max(np.abs(sol.G)))))))
    ok = worst <= 1.0
    record_criterion("7 boundary identity residual", ok, f"max residual / bound {worst:.3f}")
    assert ok


def test_concavity_and_uniqueness(optimised):
    rng = np.random.default_rng(8)
    g = Grid(50, 50)
    worst_gap = -np.inf
    worst_diff = 0.0
    for name in NAMES:
        p = preset_params(name)

        def J(v, v0):
            return objective.evaluate(p, g, mol.forward_state(p, g, v, v0).G, v, v0).total

        for _ in range(100):
            u1, u2 = rng.uniform(0.0, 2.0, (2,) + g.shape)
            v1, v2 = rng.uniform(0.0, 2.0, (2, g.n_time + 1))
            gap = 0.5 * (J(u1, v1) + J(u2, v2)) - J(0.5 * (u1 + u2), 0.5 * (v1 + v2))
            worst_gap = max(worst_gap, gap)
        first = optimised[name][0]
        coarse = Grid(10, 10)
        other = solve(p, SweepConfig(tol_control=TOL), initial_guess=ControlPair.constant(coarse, 0.5),
                      initial_grid=coarse)
        worst_diff = max(worst_diff, control_norm(first.grid, first.u_star - other.u_star,
                                                  first.u0_star - other.u0_star))
    ok = worst_gap <= 1e-9 and worst_diff < 10 * TOL
    record_criterion("8 concavity and uniqueness", ok,
                     f"max concavity defect {worst_gap:.2e}, guess spread {worst_diff:.2e}")
    assert ok


def test_stability_gate():
    ok_flag, value = stability_check(preset_params("lq_rho1_eps1"), 1000)
    try:
        renewal_multiplier(make_params(recommendation=2.0))
        rejected = False
    except StabilityViolation:
        rejected = True
    ok = ok_flag and abs(value - 0.42) <= 0.01 and rejected
    record_criterion("9 stability gate", ok, f"integral {value:.4f}, unstable rejected: {rejected}")
    assert ok
