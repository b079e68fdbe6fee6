"""Segment profiles: delta(a), R(a) and G0(a) as vectorised callables on [0, 1].

A profile can be given by preset name, by a number (constant profile) or by a
list of samples on uniform nodes of [0, 1] (linear interpolation between them).
"""

import math

import numpy as np

from .errors import ConfigError

_DEPRECIATION_SCALE = 0.5 / (1.0 - math.exp(-1.0))


def lowquality_depreciation(a):
    """Increasing depreciation rate 1 - c*exp(-a) whose integral over [0, 1] is 0.5."""
    return 1.0 - _DEPRECIATION_SCALE * np.exp(-np.asarray(a, dtype=float))


def lowquality_recommendation(a):
    """Recommendation rate decreasing in usage experience: 3/5 - (3/21)*sqrt(a)."""
    return 0.6 - (3.0 / 21.0) * np.sqrt(np.asarray(a, dtype=float))


class Constant:
    def __init__(self, value):
        self.value = float(value)

    def __call__(self, a):
        return np.full(np.shape(a), self.value)

    def __repr__(self):
        return f"Constant({self.value!r})"


class Sampled:
    """Piecewise-linear profile through samples on uniform nodes of [0, 1]."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ConfigError("sampled profile needs at least two node values")
        if not np.all(np.isfinite(values)):
            raise ConfigError("sampled profile has non-finite values")
        self.values = values
        self.nodes = np.linspace(0.0, 1.0, values.size)

    def __call__(self, a):
        return np.interp(np.asarray(a, dtype=float), self.nodes, self.values)

    def __repr__(self):
        return f"Sampled({self.values.tolist()!r})"


PRESETS = {
    "delta": {
        "paper_lowquality": lowquality_depreciation,
        "zero": Constant(0.0),
    },
    "recommendation": {
        "paper_lowquality": lowquality_recommendation,
        "zero": Constant(0.0),
    },
    "initial_goodwill": {
        "lowquality": Constant(1.5),
    },
}


def resolve(kind, spec):
    """Turn a config value (name, number, list of samples or callable) into a profile."""
    if callable(spec):
        return spec
    if isinstance(spec, str):
        try:
            return PRESETS[kind][spec]
        except KeyError:
            known = ", ".join(sorted(PRESETS[kind]))
            raise ConfigError(f"unknown {kind} preset {spec!r} (known: {known})") from None
    if isinstance(spec, bool):
        raise ConfigError(f"invalid {kind} profile {spec!r}")
    if isinstance(spec, (int, float)):
        return Constant(spec)
    if isinstance(spec, (list, tuple, np.ndarray)):
        return Sampled(spec)
    raise ConfigError(f"invalid {kind} profile {spec!r}")
