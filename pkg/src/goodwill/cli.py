"""``goodwill-opt``: run scenarios and write CSV results.

Exit codes: 0 success, 2 ConfigError, 3 StabilityViolation, 4 NoConvergence,
1 anything else raised by the solvers.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import logging
import os
from pathlib import Path
import sys

import numpy as np

from . import characteristics, config, mol, objective, presets
from .errors import ConfigError, GoodwillError, NoConvergence
from .model import renewal_multiplier
from .sweep import ControlPair, solve

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["rho", "gamma", "J0", "J", "dJ_over_J0", "max_u", "max_u0", "max_G",
                   "iterations", "final_residual"]


def fmt(x):
    return f"{float(x):.12g}"


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_field(path, grid, values):
    tt, aa = np.meshgrid(grid.t, grid.a, indexing="ij")
    rows = zip(map(fmt, tt.ravel()), map(fmt, aa.ravel()), map(fmt, values.ravel()))
    _write_rows(path, ["t", "a", "value"], rows)


def write_series(path, grid, values):
    _write_rows(path, ["t", "value"], zip(map(fmt, grid.t), map(fmt, values)))


def write_outputs(out_dir, params, grid, G, u, u0, J0, J, iterations, residual):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gain = (J - J0) / J0 if J0 != 0.0 else float("nan")
    row = [params.rho, params.gamma, J0, J, gain, u.max(), u0.max(), G.max()]
    _write_rows(out_dir / "summary.csv", SUMMARY_COLUMNS,
                [[fmt(v) for v in row] + [str(int(iterations)), fmt(residual)]])
    write_field(out_dir / "g_field.csv", grid, G)
    write_field(out_dir / "u_field.csv", grid, u)
    write_series(out_dir / "u0_series.csv", grid, u0)


def read_field(path):
    """Load a long-format ``t,a,value`` CSV back into ``(t, a, values)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = np.unique(data[:, 0])
    a = np.unique(data[:, 1])
    return t, a, data[:, 2].reshape(t.size, a.size)


def read_series(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def _forward(cfg, grid, pair):
    if cfg.forward_solver == "characteristics":
        sol = characteristics.solve_state_characteristics(cfg.params, grid, pair.u, pair.u0)
        return sol.G, sol.boundary
    state = mol.forward_state(cfg.params, grid, pair.u, pair.u0)
    return state.G, state.boundary


def run_scenario(cfg, out_dir):
    params = cfg.params
    renewal_multiplier(params)  # stability gate before any solve
    if cfg.mode == "forward":
        grid = cfg.levels[-1]
        pair = ControlPair.constant(grid, cfg.forward_u, cfg.forward_u0)
        zero = ControlPair.zeros(grid)
        G, boundary = _forward(cfg, grid, pair)
        G_zero, _ = _forward(cfg, grid, zero)
        J = objective.evaluate(params, grid, G, pair.u, pair.u0).total
        J0 = objective.evaluate(params, grid, G_zero, zero.u, zero.u0).total
        residual = characteristics.boundary_identity_residual(
            params, grid, boundary, G, pair.u, pair.u0).max()
        write_outputs(out_dir, params, grid, G, pair.u, pair.u0, J0, J, 0, residual)
        return
    try:
        report = solve(params, cfg.sweep_config())
    except NoConvergence as exc:
        rep = exc.report
        if rep is not None:
            write_outputs(out_dir, params, rep.grid, rep.G_star, rep.u_star, rep.u0_star,
                          rep.J_zero, rep.J_star, sum(rep.iterations_per_level),
                          rep.final_control_change)
        raise
    write_outputs(out_dir, params, report.grid, report.G_star, report.u_star, report.u0_star,
                  report.J_zero, report.J_star, sum(report.iterations_per_level),
                  report.final_control_change)


def _parse_grid(text):
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected N,M") from None
    return n, m


def build_parser():
    ap = argparse.ArgumentParser(prog="goodwill-opt", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run scenario configs or a built-in preset")
    run.add_argument("configs", nargs="*", metavar="config")
    run.add_argument("--preset", choices=sorted(presets.PRESETS))
    run.add_argument("--mode", choices=config.MODES)
    run.add_argument("--out", default=".", help="output directory (default: current)")
    run.add_argument("--grid", type=_parse_grid, help="single level N,M")
    run.add_argument("--tol", type=float)
    run.add_argument("--max-iters", type=int)
    sub.add_parser("list-presets", help="print the built-in scenarios")
    return ap


def _load_all(args):
    scenarios = [config.load(path) for path in args.configs]
    if args.preset:
        scenarios.append(config.from_dict({"preset": args.preset}))
    if not scenarios:
        raise ConfigError("nothing to run: pass config files or --preset")
    return [config.with_overrides(s, mode=args.mode, grid=args.grid, tol=args.tol,
                                  max_iters=args.max_iters) for s in scenarios]


def _thread_cap():
    raw = os.environ.get("GOODWILL_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"GOODWILL_THREADS must be an integer, got {raw!r}") from None


def _report(exc):
    print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
    return exc.exit_code if isinstance(exc, GoodwillError) else 1


def run(args):
    try:
        scenarios = _load_all(args)
        workers = min(len(scenarios), _thread_cap())
    except ConfigError as exc:
        return _report(exc)
    out = Path(args.out)

    def job(cfg):
        target = out / (cfg.output or cfg.name)
        try:
            run_scenario(cfg, target)
        except Exception as exc:  # reported per scenario, first failure sets the exit code
            return exc
        log.info("%s -> %s", cfg.name, target)
        return None

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(job, scenarios))
    codes = [_report(exc) for exc in results if exc is not None]
    return codes[0] if codes else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list-presets":
        print(presets.describe())
        return 0
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
