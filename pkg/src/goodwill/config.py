"""Scenario configuration files (TOML).

Example::

    preset = "lq_rho1_eps1"        # optional base scenario
    mode = "optimize"              # or "forward"

    [model]                        # overrides of the preset, or a full model
    gamma = 1.0
    delta = "paper_lowquality"     # preset name, number, or node samples on [0, 1]

    [grid]
    levels = [10, 25, 50]          # space intervals per level; M = ceil(N*T)

    [sweep]
    relaxation = 0.5
    tol = 1e-6
    max_iters = 500

    [forward]                      # used in forward mode only
    u = 0.0
    u0 = 0.0
    solver = "mol"                 # or "characteristics"
"""

from dataclasses import dataclass, replace
import math
from pathlib import Path
import sys
from typing import Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import presets
from .errors import CflViolation, ConfigError
from .model import Grid, ModelParams
from .sweep import SweepConfig

MODEL_KEYS = {"delta", "recommendation", "initial_goodwill", "rho", "gamma", "discount_rate",
              "beta", "revenue_coeff", "fixed_cost", "horizon", "max_intensity"}
TOP_KEYS = {"name", "preset", "mode", "output", "model", "grid", "sweep", "forward"}
GRID_KEYS = {"levels", "n_space", "n_time"}
SWEEP_KEYS = {"relaxation", "tol", "max_iters"}
FORWARD_KEYS = {"u", "u0", "solver"}
MODES = ("optimize", "forward")
SOLVERS = ("mol", "characteristics")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    params: ModelParams
    levels: Tuple[Grid, ...]
    mode: str = "optimize"
    relaxation: float = 0.5
    tol: float = 1e-6
    max_iters: int = 500
    forward_u: float = 0.0
    forward_u0: float = 0.0
    forward_solver: str = "mol"
    output: Optional[str] = None

    def sweep_config(self):
        return SweepConfig(relaxation=self.relaxation, tol_control=self.tol,
                           max_iters=self.max_iters, refinement_levels=list(self.levels))


def _reject_unknown(section, allowed, where):
    extra = set(section) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(extra))}")


def _intensity(value):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"max_intensity must be a number or 'inf', got {value!r}")
    return float(value)


def build_params(model_section, preset=None):
    values = dict(presets.preset_values(preset)) if preset else {}
    values.update(model_section)
    missing = {"rho", "gamma", "discount_rate", "beta", "revenue_coeff"} - set(values)
    if missing:
        raise ConfigError(f"model is missing {', '.join(sorted(missing))}")
    if "max_intensity" in values:
        values["max_intensity"] = _intensity(values["max_intensity"])
    try:
        return ModelParams(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def build_levels(grid_section, horizon):
    _reject_unknown(grid_section, GRID_KEYS, "[grid]")
    try:
        if "n_space" in grid_section:
            if "levels" in grid_section:
                raise ConfigError("[grid] takes either 'levels' or 'n_space', not both")
            n = int(grid_section["n_space"])
            m = int(grid_section.get("n_time", math.ceil(round(n * horizon, 9))))
            return (Grid(n, m, horizon),)
        sizes = grid_section.get("levels", [10, 25, 50])
        return tuple(Grid.matching(int(n), horizon) for n in sizes)
    except ConfigError:
        raise
    except (TypeError, ValueError, CflViolation) as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc


def from_dict(raw, default_name=None):
    _reject_unknown(raw, TOP_KEYS, "scenario")
    for key in ("model", "grid", "sweep", "forward"):
        if not isinstance(raw.get(key, {}), dict):
            raise ConfigError(f"[{key}] must be a table")
    preset = raw.get("preset")
    if preset is not None and preset not in presets.PRESETS:
        raise ConfigError(f"unknown preset {preset!r}")
    model = raw.get("model", {})
    _reject_unknown(model, MODEL_KEYS, "[model]")
    params = build_params(model, preset)
    levels = build_levels(raw.get("grid", {}), params.horizon)

    sweep = raw.get("sweep", {})
    _reject_unknown(sweep, SWEEP_KEYS, "[sweep]")
    forward = raw.get("forward", {})
    _reject_unknown(forward, FORWARD_KEYS, "[forward]")
    mode = raw.get("mode", "optimize")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    solver = forward.get("solver", "mol")
    if solver not in SOLVERS:
        raise ConfigError(f"forward solver must be one of {SOLVERS}, got {solver!r}")
    try:
        cfg = ScenarioConfig(
            name=str(raw.get("name") or default_name or preset or "scenario"),
            params=params,
            levels=levels,
            mode=mode,
            relaxation=float(sweep.get("relaxation", 0.5)),
            tol=float(sweep.get("tol", 1e-6)),
            max_iters=int(sweep.get("max_iters", 500)),
            forward_u=float(forward.get("u", 0.0)),
            forward_u0=float(forward.get("u0", 0.0)),
            forward_solver=solver,
            output=raw.get("output"),
        )
        cfg.sweep_config()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc
    return cfg


def load(path):
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(raw, default_name=path.stem)


def with_overrides(cfg, mode=None, grid=None, tol=None, max_iters=None):
    """Apply command-line overrides; ``grid`` is an (N, M) pair."""
    changes = {}
    if mode is not None:
        changes["mode"] = mode
    if grid is not None:
        try:
            changes["levels"] = (Grid(grid[0], grid[1], cfg.params.horizon),)
        except (ValueError, CflViolation) as exc:
            raise ConfigError(f"invalid --grid: {exc}") from exc
    if tol is not None:
        changes["tol"] = tol
    if max_iters is not None:
        changes["max_iters"] = max_iters
    cfg = replace(cfg, **changes)
    try:
        cfg.sweep_config()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg
