"""Batch driver: validated INI configs in, deterministic CSV + manifest out.

Subcommands:

* ``evolve``            decomposition solve + diagnostics CSV
* ``oracle``            direct split-step run + diagnostics CSV
* ``compare``           both routes + per-node difference CSV
* ``sweep-eps``         smallness sweep with exponent fits
* ``verify-dispersive`` growth-ratio table over (t, p)
* ``check-gronwall``    evolve + exponential-growth verdict

Exit codes are stable API: 0 success, 1 config error, 2 usage error,
3 solver failure (a manifest recording the failure mode is still written).
Identical configs produce byte-identical artifacts; ``--seedless`` makes the
driver recompute everything a second time and verify that claim.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

import nls1d
from nls1d import diagnostics, families, io, kernels
from nls1d.errors import (
    BlowupDetectedError,
    ContractionFailureError,
    NumericalBlowupError,
    RescaleFailureError,
)
from nls1d.grid import Grid, GridFunction, SobolevSpec, sobolev_norm
from nls1d.picard import (
    SolverConfig,
    TimeGrid,
    Trajectory,
    normalize_to_smallness,
    rescale_to_smallness,
    s0_norm,
    solve_nls,
)
from nls1d.propagator import KERNEL_T_MIN, PropagatorBackend, dispersive_ratio
from nls1d.reference import OracleConfig, compare, integrate_direct

SOLVER_ERRORS = (ContractionFailureError, NumericalBlowupError,
                 BlowupDetectedError, RescaleFailureError)

COMMANDS = ("evolve", "oracle", "compare", "sweep-eps", "verify-dispersive",
            "check-gronwall")


class ConfigError(Exception):
    def __init__(self, problems):
        super().__init__("invalid configuration")
        self.problems = list(problems)


# ---------------------------------------------------------------------------
# config schema

def _parse_bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text):
    return float(text)


def _parse_int(text):
    v = float(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _parse_str(text):
    return text.strip()


def _parse_float_list(text):
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_exponent_list(text):
    out = []
    for tok in text.replace(",", " ").split():
        out.append(math.inf if tok.lower() in ("inf", "infinity") else float(tok))
    return out


_SCHEMA = {
    "grid": {
        "n_points": _parse_int,
        "x_min": _parse_float,
        "dx": _parse_float,
        "length": _parse_float,
        "topology": _parse_str,
    },
    "initial_data": {
        "family": _parse_str,
        "amplitude": _parse_float,
        "sigma": _parse_float,
        "k": _parse_float,
        "alpha": _parse_float,
        "trig": _parse_bool,
        "center": _parse_float,
        "path": _parse_str,
    },
    "time": {
        "t_start": _parse_float,
        "dt": _parse_float,
        "n_steps": _parse_int,
        "t_end": _parse_float,
    },
    "picard": {
        "depth": _parse_int,
        "eps": _parse_float,
        "smallness_order": _parse_int,
        "smallness_p": _parse_float,
        "tol": _parse_float,
        "max_iter": _parse_int,
        "blowup_factor": _parse_float,
    },
    "backend": {
        "kind": _parse_str,
        "nodes_per_oscillation": _parse_int,
        "cutoff_radius": _parse_float,
    },
    "oracle": {
        "dt": _parse_float,
        "scheme": _parse_str,
        "dealias": _parse_bool,
    },
    "sweep": {
        "eps_values": _parse_float_list,
        "family_mode": _parse_str,
    },
    "dispersive": {
        "times": _parse_float_list,
        "exponents": _parse_exponent_list,
        "grid_doubling": _parse_bool,
    },
    "output": {
        "directory": _parse_str,
        "dump_trajectories": _parse_bool,
    },
}

_REQUIRED = {
    "evolve": ("grid", "initial_data", "time", "picard"),
    "oracle": ("grid", "initial_data", "time", "oracle"),
    "compare": ("grid", "initial_data", "time", "picard", "oracle"),
    "sweep-eps": ("grid", "initial_data", "time", "picard"),
    "verify-dispersive": ("grid", "initial_data", "dispersive"),
    "check-gronwall": ("grid", "initial_data", "time", "picard"),
}


def load_config(path: Path) -> tuple[dict, str]:
    """Parse and type-check the INI file; collect every offending field."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(strict=True, interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"unparseable config: {exc}"]) from exc
    problems = []
    resolved: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            problems.append(f"[{section}]: unknown section")
            continue
        resolved[section] = {}
        for key, raw in parser.items(section):
            parse = _SCHEMA[section].get(key)
            if parse is None:
                problems.append(f"[{section}] {key}: unknown key")
                continue
            try:
                resolved[section][key] = parse(raw)
            except ValueError as exc:
                problems.append(f"[{section}] {key}: {exc}")
    if problems:
        raise ConfigError(problems)
    return resolved, text


def _build_grid(cfg: dict, problems: list) -> Grid | None:
    sec = cfg.get("grid", {})
    n = sec.get("n_points")
    x_min = sec.get("x_min")
    topology = sec.get("topology", "periodic")
    dx = sec.get("dx")
    if dx is None and "length" in sec and n:
        dx = sec["length"] / n
    if n is None or x_min is None or dx is None:
        problems.append("[grid]: need n_points, x_min, and dx (or length)")
        return None
    try:
        return Grid(x_min, dx, n, topology)
    except ValueError as exc:
        problems.append(f"[grid]: {exc}")
        return None


def _build_time_grid(cfg: dict, problems: list) -> TimeGrid | None:
    sec = cfg.get("time", {})
    t_start = sec.get("t_start", 0.0)
    dt = sec.get("dt")
    n_steps = sec.get("n_steps")
    if n_steps is None and "t_end" in sec and dt:
        n_steps = int(round((sec["t_end"] - t_start) / dt))
    if dt is None or n_steps is None:
        problems.append("[time]: need dt and n_steps (or t_end)")
        return None
    try:
        return TimeGrid(t_start, dt, n_steps)
    except ValueError as exc:
        problems.append(f"[time]: {exc}")
        return None


def _build_initial_data(cfg: dict, grid: Grid, problems: list) -> GridFunction | None:
    sec = cfg.get("initial_data", {})
    family = sec.get("family")
    try:
        if family == "gaussian":
            return families.gaussian(grid, sec.get("amplitude", 1.0),
                                     sec.get("sigma", 1.0), sec.get("center"))
        if family == "windowed-gaussian":
            return families.windowed_gaussian(grid, sec.get("amplitude", 1.0),
                                              sec.get("sigma", 1.0), sec.get("center"))
        if family == "plane-wave":
            return families.plane_wave(grid, sec.get("amplitude", 1.0), sec.get("k", 0.0))
        if family == "windowed-power":
            return families.windowed_power(grid, sec.get("alpha", 1.0),
                                           sec.get("trig", True))
        if family == "file":
            if "path" not in sec:
                problems.append("[initial_data] path: required for family=file")
                return None
            return io.read_grid_function(sec["path"])
    except (ValueError, OSError) as exc:
        problems.append(f"[initial_data]: {exc}")
        return None
    problems.append(f"[initial_data] family: unknown family {family!r}")
    return None


def _build_backend(cfg: dict, problems: list, override: str | None) -> PropagatorBackend:
    sec = dict(cfg.get("backend", {}))
    if override:
        sec["kind"] = override
    try:
        return PropagatorBackend(sec.get("kind", "fourier"),
                                 sec.get("cutoff_radius"),
                                 sec.get("nodes_per_oscillation", 8))
    except ValueError as exc:
        problems.append(f"[backend]: {exc}")
        return PropagatorBackend()


def _build_oracle(cfg: dict, problems: list) -> OracleConfig:
    sec = cfg.get("oracle", {})
    try:
        return OracleConfig(sec.get("dt", 1e-3), sec.get("scheme", "strang"),
                            sec.get("dealias", True))
    except ValueError as exc:
        problems.append(f"[oracle]: {exc}")
        return OracleConfig()


@dataclass
class RunPlan:
    """Everything a subcommand needs, resolved and validated."""

    command: str
    grid: Grid | None = None
    time_grid: TimeGrid | None = None
    data: GridFunction | None = None
    backend: PropagatorBackend = PropagatorBackend()
    oracle: OracleConfig = OracleConfig()
    depth: int = 1
    eps: float | None = None
    smallness: SobolevSpec | None = None
    solver: SolverConfig = SolverConfig()
    eps_values: list = field(default_factory=lambda: [0.05, 0.1, 0.2])
    family_mode: str = "amplitude"
    disp_times: list = field(default_factory=list)
    disp_exponents: list = field(default_factory=list)
    grid_doubling: bool = True
    dump_trajectories: bool = False
    raw_cfg: dict = field(default_factory=dict)


def build_plan(command: str, cfg: dict, args) -> RunPlan:
    problems: list[str] = []
    for section in _REQUIRED[command]:
        if section not in cfg:
            problems.append(f"[{section}]: required section missing")
    if problems:
        raise ConfigError(problems)

    plan = RunPlan(command)
    plan.grid = _build_grid(cfg, problems)
    if command != "verify-dispersive":
        plan.time_grid = _build_time_grid(cfg, problems)
    if plan.grid is not None:
        plan.data = _build_initial_data(cfg, plan.grid, problems)
    plan.backend = _build_backend(cfg, problems, args.backend)
    if "oracle" in cfg or command in ("oracle", "compare"):
        plan.oracle = _build_oracle(cfg, problems)

    pic = cfg.get("picard", {})
    plan.depth = args.depth if args.depth is not None else pic.get("depth", 1)
    if plan.depth < 1:
        problems.append("[picard] depth: must be >= 1")
    plan.eps = args.eps if args.eps is not None else pic.get("eps")
    order = pic.get("smallness_order", 2 * plan.depth + 1)
    lebesgue = pic.get("smallness_p", 4.0 * plan.depth + 2.0)
    try:
        plan.smallness = SobolevSpec(order, lebesgue)
    except ValueError as exc:
        problems.append(f"[picard]: {exc}")
    plan.solver = SolverConfig(backend=plan.backend,
                               tol=pic.get("tol", 1e-8),
                               max_iter=pic.get("max_iter", 50),
                               blowup_factor=pic.get("blowup_factor", 1e6))

    sweep = cfg.get("sweep", {})
    plan.eps_values = sweep.get("eps_values", [0.05, 0.1, 0.2])
    plan.family_mode = sweep.get("family_mode", "amplitude")
    if plan.family_mode not in ("amplitude", "symmetry"):
        problems.append(f"[sweep] family_mode: unknown mode {plan.family_mode!r}")

    disp = cfg.get("dispersive", {})
    plan.disp_times = disp.get("times", list(np.linspace(0.0, 1.0, 11)))
    plan.disp_exponents = disp.get("exponents", [2.0, 6.0, math.inf])
    plan.grid_doubling = disp.get("grid_doubling", True)
    if plan.backend.kind == "kernel":
        bad = [t for t in plan.disp_times if abs(t) < KERNEL_T_MIN]
        if command == "verify-dispersive" and bad:
            problems.append(f"[dispersive] times: kernel backend needs |t| >= {KERNEL_T_MIN}")

    out = cfg.get("output", {})
    plan.dump_trajectories = out.get("dump_trajectories", False)
    plan.raw_cfg = cfg  # family rebuilds for grid-doubling checks

    if problems:
        raise ConfigError(problems)
    return plan


# ---------------------------------------------------------------------------
# artifact construction (pure: bytes out, no filesystem side effects)

def _csv_bytes(header: str, rows) -> bytes:
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{x:.17g}" if isinstance(x, float) else str(x)
                              for x in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def _series_rows(series: diagnostics.DiagnosticsSeries):
    for row in zip(series.times, series.mass, series.energy, series.f_interaction,
                   series.modified_energy, series.v_l2):
        yield [float(x) for x in row]


def _prepare_data(plan: RunPlan, manifest: dict):
    data = plan.data
    lam = 1.0
    if plan.eps is not None:
        data, lam = rescale_to_smallness(data, plan.smallness, plan.eps)
        manifest["eps_target"] = plan.eps
        manifest["eps_measured"] = sobolev_norm(data, plan.smallness)
    manifest["lambda"] = lam
    manifest["smallness_order"] = plan.smallness.order
    manifest["smallness_p"] = plan.smallness.p
    return data


def _solve(plan: RunPlan, manifest: dict):
    data = _prepare_data(plan, manifest)
    u, dec = solve_nls(data, plan.depth, plan.time_grid, plan.solver)
    info = dec.solve_info
    manifest["iterations"] = info.iterations
    manifest["residual"] = info.residual
    manifest["final_diff"] = info.final_diff
    manifest["remainder_s0"] = s0_norm(dec.remainder)
    return data, u, dec


def _zero_linear_part(traj: Trajectory) -> Trajectory:
    return Trajectory(traj.grid, traj.time_grid, np.zeros_like(traj.values))


def run_evolve(plan: RunPlan, manifest: dict) -> dict:
    _, u, dec = _solve(plan, manifest)
    series = diagnostics.series_for(dec)
    artifacts = {"diagnostics.csv": _csv_bytes(diagnostics.CSV_HEADER, _series_rows(series))}
    if plan.dump_trajectories:
        artifacts["solution.traj"] = io.trajectory_to_bytes(u)
        artifacts["remainder.traj"] = io.trajectory_to_bytes(dec.remainder)
    return artifacts


def run_oracle(plan: RunPlan, manifest: dict) -> dict:
    data = _prepare_data(plan, manifest)
    horizon = plan.time_grid.t_end - plan.time_grid.t_start
    traj = integrate_direct(data, horizon, plan.oracle)
    series = diagnostics.build_series(traj, _zero_linear_part(traj))
    manifest["oracle_scheme"] = plan.oracle.scheme
    manifest["oracle_dt"] = plan.oracle.dt
    return {"oracle.csv": _csv_bytes(diagnostics.CSV_HEADER, _series_rows(series))}


def run_compare(plan: RunPlan, manifest: dict) -> dict:
    data, u, dec = _solve(plan, manifest)
    horizon = plan.time_grid.t_end - plan.time_grid.t_start
    if abs(plan.oracle.dt - plan.time_grid.dt) > 1e-12 * plan.time_grid.dt:
        oracle_cfg = OracleConfig(plan.time_grid.dt, plan.oracle.scheme, plan.oracle.dealias)
    else:
        oracle_cfg = plan.oracle
    ref = integrate_direct(data, horizon, oracle_cfg)
    report = compare(u, ref)
    manifest["linf"] = report.linf
    manifest["l2"] = report.l2
    rows = ([float(t), float(a), float(b)]
            for t, a, b in zip(report.times, report.linf_series, report.l2_series))
    return {"compare.csv": _csv_bytes("t,linf,l2", rows)}


def _fit_slope(log_eps, log_norms) -> float:
    slope, _ = np.polyfit(log_eps, log_norms, 1)
    return float(slope)


def run_sweep(plan: RunPlan, manifest: dict) -> dict:
    rows = []
    log_eps = []
    s0_logs = []
    level_logs: dict[int, list] = {j: [] for j in range(plan.depth)}
    for eps in plan.eps_values:
        if plan.family_mode == "amplitude":
            data = normalize_to_smallness(plan.data, plan.smallness, eps)
            lam = 1.0
        else:
            data, lam = rescale_to_smallness(plan.data, plan.smallness, eps)
        measured = sobolev_norm(data, plan.smallness)
        _, dec = solve_nls(data, plan.depth, plan.time_grid, plan.solver)
        s0_v = s0_norm(dec.remainder)
        rows.append([float(eps), float(measured), float(lam), float(s0_v)]
                    + [float(x) for x in dec.level_norms])
        log_eps.append(math.log(measured))
        s0_logs.append(math.log(s0_v))
        for j in range(plan.depth):
            level_logs[j].append(math.log(dec.level_norms[j]))
    manifest["family_mode"] = plan.family_mode
    manifest["eps_values"] = [float(e) for e in plan.eps_values]
    manifest["remainder_slope"] = _fit_slope(log_eps, s0_logs)
    manifest["remainder_slope_target"] = 2 * plan.depth + 1
    manifest["level_slopes"] = [_fit_slope(log_eps, level_logs[j])
                                for j in range(plan.depth)]
    manifest["level_slope_targets"] = [2 * j + 1 for j in range(plan.depth)]
    header = "eps,eps_measured,lambda,s0_v" + "".join(
        f",level_norm_{j}" for j in range(plan.depth))
    return {"sweep.csv": _csv_bytes(header, rows)}


def run_dispersive(plan: RunPlan, manifest: dict) -> dict:
    def table(grid: Grid):
        data = _rebuild_on(plan, grid)
        out = {}
        for p in plan.disp_exponents:
            out[p] = [dispersive_ratio(data, t, p, plan.backend) for t in plan.disp_times]
        return out

    base = table(plan.grid)
    rows = []
    for p, ratios in base.items():
        for t, r in zip(plan.disp_times, ratios):
            rows.append([float(t), float(p), float(r)])
    manifest["sup_ratios"] = {str(p): float(max(r)) for p, r in base.items()}
    if plan.grid_doubling:
        doubled = Grid(plan.grid.x_min, plan.grid.dx / 2, plan.grid.n_points * 2,
                       plan.grid.topology)
        fine = table(doubled)
        manifest["sup_ratios_doubled"] = {str(p): float(max(r)) for p, r in fine.items()}
        manifest["sup_change_fraction"] = {
            str(p): abs(max(fine[p]) - max(base[p])) / max(base[p])
            for p in base}
    return {"dispersive.csv": _csv_bytes("t,p,ratio", rows)}


def _rebuild_on(plan: RunPlan, grid: Grid) -> GridFunction:
    """Re-evaluate the configured family on another grid (for refinement)."""
    if grid is plan.grid:
        return plan.data
    problems: list[str] = []
    data = _build_initial_data(plan.raw_cfg, grid, problems)
    if problems or data is None:
        raise ConfigError(problems or ["[initial_data]: rebuild failed"])
    return data


def run_gronwall(plan: RunPlan, manifest: dict) -> dict:
    _, u, dec = _solve(plan, manifest)
    series = diagnostics.series_for(dec)
    c_fit, passed = diagnostics.gronwall_verdict(series)
    manifest["gronwall_c"] = c_fit
    manifest["gronwall_pass"] = passed
    me = 0.5 * series.mass + series.energy
    median = float(np.median(me))
    mask = me > median
    if np.any(mask):
        manifest["interaction_ratio_max"] = float(
            np.max(np.abs(series.f_interaction[mask]) / me[mask]))
    manifest["me_median"] = median
    return {"diagnostics.csv": _csv_bytes(diagnostics.CSV_HEADER, _series_rows(series))}


_RUNNERS = {
    "evolve": run_evolve,
    "oracle": run_oracle,
    "compare": run_compare,
    "sweep-eps": run_sweep,
    "verify-dispersive": run_dispersive,
    "check-gronwall": run_gronwall,
}


# ---------------------------------------------------------------------------
# entry point

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nls1d",
                                     description="1D cubic Schrodinger verification driver")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--backend", choices=["fourier", "kernel"], default=None)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--seedless", action="store_true",
                       help="recompute and verify artifacts are byte-identical")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg, text = load_config(args.config)
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1

    out_dir = args.out or Path(cfg.get("output", {}).get("directory", "out"))
    manifest: dict = {
        "command": args.command,
        "tool_version": nls1d.__version__,
        "config_sha256": io.config_sha256(text),
        "kernels_compiled": kernels.USING_COMPILED,
    }

    try:
        plan = build_plan(args.command, cfg, args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1

    manifest["depth"] = plan.depth
    manifest["tolerances"] = {"tol": plan.solver.tol,
                              "max_iter": plan.solver.max_iter,
                              "blowup_factor": plan.solver.blowup_factor}
    manifest["backend"] = {"kind": plan.backend.kind,
                           "nodes_per_oscillation": plan.backend.nodes_per_oscillation,
                           "cutoff_radius": plan.backend.cutoff_radius}

    runner = _RUNNERS[args.command]
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        artifacts = runner(plan, manifest)
        if args.seedless:
            shadow: dict = {}
            if runner(plan, shadow) != artifacts:
                print("determinism check failed: artifacts differ on recompute",
                      file=sys.stderr)
                return 3
            manifest["seedless_verified"] = True
    except SOLVER_ERRORS as exc:
        manifest["failure_mode"] = type(exc).__name__
        manifest["failure_message"] = str(exc)
        io.write_manifest(manifest, out_dir / "manifest.json")
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3

    for name, payload in artifacts.items():
        (out_dir / name).write_bytes(payload)
    manifest["artifacts"] = sorted(artifacts)
    io.write_manifest(manifest, out_dir / "manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
