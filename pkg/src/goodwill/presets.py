"""Built-in low-quality-product scenarios: (rho, eps_g) in {0.5, 1} x {0.1, 1}."""

import math

from .model import ModelParams

SHARED = {
    "delta": "paper_lowquality",
    "recommendation": "paper_lowquality",
    "initial_goodwill": 1.5,
    "discount_rate": 0.028,
    "horizon": 1.0,
    "beta": 0.16,
    "revenue_coeff": 0.34,
    "fixed_cost": 0.0,
    "max_intensity": math.inf,
}

# The demand elasticity eps_g is the goodwill exponent gamma of the revenue term.
PRESETS = {
    "lq_rho05_eps01": {"rho": 0.5, "gamma": 0.1},
    "lq_rho05_eps1": {"rho": 0.5, "gamma": 1.0},
    "lq_rho1_eps01": {"rho": 1.0, "gamma": 0.1},
    "lq_rho1_eps1": {"rho": 1.0, "gamma": 1.0},
}


def preset_values(name):
    try:
        return {**SHARED, **PRESETS[name]}
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


def preset_params(name, **overrides):
    return ModelParams(**{**preset_values(name), **overrides})


def describe():
    lines = ["shared parameters:",
             "  R(a) = 3/5 - (3/21) sqrt(a)        [paper_lowquality]",
             "  delta(a) = 1 - 0.5/(1 - e^-1) e^-a  [paper_lowquality]"]
    for key in ("discount_rate", "horizon", "beta", "revenue_coeff", "initial_goodwill",
                "fixed_cost", "max_intensity"):
        lines.append(f"  {key} = {SHARED[key]}")
    lines.append("presets:")
    for name, vals in PRESETS.items():
        lines.append(f"  {name:<16} rho={vals['rho']:<4} gamma(eps_g)={vals['gamma']}")
    return "\n".join(lines)
