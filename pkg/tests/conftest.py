import numpy as np
import pytest

from goodwill import Grid, ModelParams, preset_params

# int_0^1 R D da for the low-quality profiles, 10^4-node Simpson on the analytic D.
STABILITY_GOLDEN = 0.4178133


def make_params(**kw):
    base = dict(delta=0.0, recommendation=0.0, rho=1.0, gamma=1.0, discount_rate=0.028,
                beta=0.16, revenue_coeff=0.34, initial_goodwill=1.5)
    base.update(kw)
    return ModelParams(**base)


@pytest.fixture
def lq():
    return preset_params("lq_rho1_eps1")


@pytest.fixture
def grid50():
    return Grid(50, 50)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def record_criterion(label, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
