"""Command-line front end.

Subcommands: simulate, bounds, optimize, sweep, maxfreq.  Every command
reads one config file (--config or the WIRETAIL_CONFIG environment
variable), prints a JSON summary to stdout and, with --out PREFIX, writes
PREFIX.csv / PREFIX.json plus PREFIX.manifest.json describing the run.

Output files are deterministic: identical inputs give identical bytes,
independent of --jobs.  Exit codes: 0 success, 1 computation error,
2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from ._backend import backend_name
from .config import Config, ConfigError, load_config, rotational_stiffness
from .drivetrain import cycle_summary
from .dynamics import IntegrationError, SimTrace, SteadyStateError, simulate
from .optimizer import (
    InfeasibleBoundsError,
    StiffnessOptResult,
    SweepCell,
    max_frequency,
    optimize_k1,
    stiffness_bounds,
    sweep,
)

ENV_CONFIG = "WIRETAIL_CONFIG"

# Documented trace CSV schema: column name, unit, channel key.
TRACE_COLUMNS = [
    ("t", "s", "t"),
    ("theta1", "rad", "theta1"),
    ("theta2", "rad", "theta2"),
    ("theta_s", "rad", "theta_s"),
    ("tau_J1", "N*m", "tau_J1"),
    ("T_e1", "N*m", "T_e1"),
    ("E_aes", "J", "E_aes"),
    ("F_wire", "N", "F_wire"),
    ("T_m", "N*m", "T_m"),
    ("P_m", "W", "P_m"),
    ("thrust", "N", "thrust"),
    ("F_cr", "N", "F_cr"),
]

SWEEP_COLUMNS = [
    ("f", "Hz"), ("k2", "N*m"), ("k1_min", "N*m"), ("k1_max", "N*m"),
    ("k1_opt", "N*m"), ("d_T1_opt", "mm"), ("var_Pm", "W^2"),
    ("var_Pm_rigid", "W^2"), ("eta_r", "%"), ("eta_a", "W^2"),
    ("mean_Pm", "W"), ("peak_tau_J1", "N*m"), ("max_Pm", "W"),
    ("warning", "-"), ("error", "-"),
]

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    """Shortest round-trip decimal form; deterministic across runs."""
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_trace_csv(path: Path, trace: SimTrace) -> None:
    header = ",".join(f"{name} [{unit}]" for name, unit, _ in TRACE_COLUMNS)
    cols = [trace.t if key == "t" else trace[key] for _, _, key in TRACE_COLUMNS]
    lines = [header]
    for row in zip(*cols):
        lines.append(",".join(_fmt(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _sweep_row(cell: SweepCell) -> dict:
    row: dict = {"f": cell.f, "k2": cell.k2}
    if cell.result is not None:
        r = cell.result
        row.update(
            k1_min=r.bounds.k1_min, k1_max=r.bounds.k1_max, k1_opt=r.k1_opt,
            d_T1_opt=r.d_T1_opt * 1e3, var_Pm=r.var_Pm, var_Pm_rigid=r.var_Pm_rigid,
            eta_r=r.eta_r_pct, eta_a=r.eta_a, mean_Pm=r.mean_power,
            peak_tau_J1=r.peak_tau_J1, max_Pm=r.max_Pm,
            warning=r.warning, error=None,
        )
    else:
        row.update({name: None for name, _ in SWEEP_COLUMNS[2:]})
        row["error"] = cell.error
    return row


def write_sweep_csv(path: Path, rows: list[dict]) -> None:
    header = ",".join(f"{name} [{unit}]" if unit != "-" else name
                      for name, unit in SWEEP_COLUMNS)
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(row.get(name)) for name, _ in SWEEP_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def _manifest(cfg: Config, subcommand: str, flags: dict, outputs: list[Path],
              started: float) -> dict:
    return {
        "tool": "wiretail",
        "version": __version__,
        "backend": backend_name(),
        "subcommand": subcommand,
        "flags": flags,
        "config": cfg.snapshot(),
        "config_source": cfg.source,
        "duration_s": time.monotonic() - started,
        "outputs": [str(p) for p in outputs],
    }


def _emit(cfg: Config, args, summary: dict, csv_writer=None) -> None:
    """Print the summary and write PREFIX.{csv,json,manifest.json} if requested."""
    started = getattr(args, "_started", time.monotonic())
    outputs: list[Path] = []
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        if csv_writer is not None:
            csv_path = Path(str(prefix) + ".csv")
            csv_writer(csv_path)
            outputs.append(csv_path)
        json_path = Path(str(prefix) + ".json")
        json_path.write_text(_json_dump(summary))
        outputs.append(json_path)
        flags = {k: v for k, v in vars(args).items()
                 if not k.startswith("_") and k != "func"}
        manifest_path = Path(str(prefix) + ".manifest.json")
        manifest_path.write_text(_json_dump(_manifest(cfg, args.command, flags,
                                                      outputs, started)))
    sys.stdout.write(_json_dump(summary))


def _load(args) -> Config:
    path = args.config or os.environ.get(ENV_CONFIG)
    if not path:
        raise UsageError(f"--config is required (or set {ENV_CONFIG})")
    return load_config(path)


def _resolve_k(cfg: Config, args, which: int) -> float:
    """Stiffness from --k<i> [N*m] or --dt<i> [mm], defaulting to the config."""
    spec = cfg.aes if which == 1 else cfg.pes
    k_flag = getattr(args, f"k{which}")
    dt_flag = getattr(args, f"dt{which}")
    if k_flag is not None and dt_flag is not None:
        raise UsageError(f"give either --k{which} or --dt{which}, not both")
    if k_flag is not None:
        if k_flag <= 0:
            raise UsageError(f"--k{which} must be > 0")
        return float(k_flag)
    if dt_flag is not None:
        if dt_flag <= 0:
            raise UsageError(f"--dt{which} must be > 0")
        return rotational_stiffness(spec.with_thickness(dt_flag * 1e-3))
    return rotational_stiffness(spec)


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """Parse 'lo:step:hi' (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid '{text}' must be lo:step:hi")
        lo, step, hi = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise UsageError(f"grid '{text}' must have step > 0 and hi >= lo")
        out = []
        k = 0
        while True:
            v = lo + k * step
            if v > hi + 1e-9 * step:
                break
            out.append(v)
            k += 1
        return out
    return [float(p) for p in text.split(",") if p.strip()]


def cmd_simulate(args) -> None:
    cfg = _load(args)
    k1 = None if args.rigid else _resolve_k(cfg, args, 1)
    k2 = _resolve_k(cfg, args, 2)
    trace = simulate(cfg, f=args.freq, k1=k1, k2=k2, rigid=args.rigid)
    summary = cycle_summary(trace)
    _emit(cfg, args, summary, csv_writer=lambda p: write_trace_csv(p, trace))


def cmd_bounds(args) -> None:
    cfg = _load(args)
    k2 = _resolve_k(cfg, args, 2)
    b = stiffness_bounds(cfg, f=args.freq, k2=k2)
    summary = dataclasses.asdict(b)
    summary.update(f_hz=args.freq or cfg.sim.freq, k2_Nm=k2, feasible=b.feasible)
    _emit(cfg, args, summary)


def _opt_summary(r: StiffnessOptResult) -> dict:
    out = dataclasses.asdict(r)
    out["bounds"] = dataclasses.asdict(r.bounds)
    return out


def cmd_optimize(args) -> None:
    cfg = _load(args)
    k2 = _resolve_k(cfg, args, 2)
    result = optimize_k1(cfg, f=args.freq, k2=k2, mode=args.mode, var_max=args.var_max)
    _emit(cfg, args, _opt_summary(result))


def cmd_sweep(args) -> None:
    cfg = _load(args)
    f_grid = parse_grid(args.freq_grid)
    if args.k2_grid is not None and args.dt2_grid is not None:
        raise UsageError("give either --k2-grid or --dt2-grid, not both")
    if args.k2_grid is not None:
        k2_grid = parse_grid(args.k2_grid)
    elif args.dt2_grid is not None:
        k2_grid = [rotational_stiffness(cfg.pes.with_thickness(d * 1e-3))
                   for d in parse_grid(args.dt2_grid)]
    else:
        raise UsageError("--k2-grid or --dt2-grid is required")
    cells = sweep(cfg, f_grid, k2_grid, mode=args.mode, var_max=args.var_max,
                  jobs=args.jobs)
    rows = [_sweep_row(c) for c in cells]
    summary = {"schema_version": SCHEMA_VERSION, "rows": rows}
    _emit(cfg, args, summary, csv_writer=lambda p: write_sweep_csv(p, rows))


def cmd_maxfreq(args) -> None:
    cfg = _load(args)
    k2 = _resolve_k(cfg, args, 2)
    result = max_frequency(cfg, k2=k2, variant=args.variant, f_lo=args.f_lo,
                           f_hi=args.f_hi, tol=args.tol, mode=args.mode)
    _emit(cfg, args, dataclasses.asdict(result))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiretail",
        description="Wire-driven elastic fishtail: simulation, drivetrain power "
                    "analysis and spine stiffness optimization.",
    )
    parser.add_argument("--version", action="version", version=f"wiretail {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, freq=True):
        p.add_argument("--config", help=f"config file (default: ${ENV_CONFIG})")
        p.add_argument("--out", help="output prefix: writes PREFIX.csv/.json/.manifest.json")
        if freq:
            p.add_argument("--freq", type=float, help="swing frequency [Hz] "
                           "(default: config value)")

    def k_flags(p, which: int, label: str):
        p.add_argument(f"--k{which}", type=float,
                       help=f"{label} stiffness [N*m]")
        p.add_argument(f"--dt{which}", type=float,
                       help=f"{label} spring thickness [mm]")

    p = sub.add_parser("simulate", help="steady-state trace and cycle summary")
    common(p)
    k_flags(p, 1, "active segment")
    k_flags(p, 2, "caudal joint")
    p.add_argument("--rigid", action="store_true",
                   help="rigid active segment (zero bend moment)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="feasible stiffness interval at (f, k2)")
    common(p)
    k_flags(p, 2, "caudal joint")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("optimize", help="minimize motor power variance over k1")
    common(p)
    k_flags(p, 2, "caudal joint")
    p.add_argument("--mode", choices=["continuous", "grid-0.1mm"], default="continuous")
    p.add_argument("--var-max", type=float, help="optional power-variance cap [W^2]")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="optimize over an (f, k2) grid")
    common(p, freq=False)
    p.add_argument("--freq-grid", required=True, help="frequencies, lo:step:hi or list")
    p.add_argument("--k2-grid", help="caudal stiffness grid [N*m], lo:step:hi or list")
    p.add_argument("--dt2-grid", help="caudal thickness grid [mm], e.g. 0.2:0.1:0.8")
    p.add_argument("--mode", choices=["continuous", "grid-0.1mm"], default="continuous")
    p.add_argument("--var-max", type=float)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; does not change output bytes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("maxfreq", help="largest frequency under the motor power cap")
    common(p, freq=False)
    k_flags(p, 2, "caudal joint")
    p.add_argument("--variant", choices=["aes", "rigid"], default="aes")
    p.add_argument("--f-lo", type=float, default=0.5)
    p.add_argument("--f-hi", type=float, default=20.0)
    p.add_argument("--tol", type=float, default=0.01, help="bisection tolerance [Hz]")
    p.add_argument("--mode", choices=["continuous", "grid-0.1mm"], default="continuous")
    p.set_defaults(func=cmd_maxfreq)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._started = time.monotonic()
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except (ConfigError, IntegrationError, SteadyStateError,
            InfeasibleBoundsError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
