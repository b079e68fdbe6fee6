"""Optimal advertising for an age-structured goodwill model with consumer recommendations."""

from .errors import (CflViolation, ConfigError, GoodwillError, InadmissibleControl,
                     NegativeControl, NegativeState, NoConvergence, SingularState,
                     SingularStep, StabilityViolation)
from .model import (Grid, ModelParams, aggregate_boundary_control, discount_factor,
                    discount_profile, lifted_boundary, renewal_multiplier, stability_check)
from .presets import preset_params
from .sweep import ControlPair, SolveReport, SweepConfig, control_from_costate, solve, sweep_once

__version__ = "0.1.0"
