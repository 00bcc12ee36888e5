"""Feasible stiffness interval and power-variance optimization of the spine.

The swing kinematics do not depend on the active-segment stiffness k1, so
one steady-state base simulation per (frequency, caudal stiffness) cell is
enough: motor power is affine in k1 per sample,

    P_m(t; k1) = P0(t) + k1 * P1(t),

which makes the power variance an exact quadratic in k1 and every candidate
evaluation O(1) after two covariances.  The optimum is still located the
robust way (lattice scan plus golden-section refinement inside the best
bracket) so that a non-unimodal objective is detected rather than assumed
away.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import Config, rotational_stiffness, thickness_for_stiffness
from .drivetrain import statics_gain
from .dynamics import SimTrace, simulate_base

COLUMN_LENGTH_FACTOR = 2.0   # free-standing column end condition
THICKNESS_RESOLUTION = 1e-4  # manufacturable spring-steel lattice [m]
TIE_REL_TOL = 1e-9           # variance ties resolve to the smaller k1
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class InfeasibleBoundsError(ValueError):
    """Stiffness bounds exclude every candidate (k1_min > k1_max or empty grid)."""


@dataclass(frozen=True)
class StiffnessBounds:
    """Feasible stiffness interval with the constraint values that bind it."""

    k1_min: float         # buckling lower bound [N*m]
    k1_max: float         # statics torque upper bound [N*m]
    f_cr: float           # binding axial fin load (cycle peak magnitude) [N]
    statics_torque: float # peak static motor torque at k1_max [N*m]

    @property
    def feasible(self) -> bool:
        return self.k1_min <= self.k1_max


def buckling_k1_min(f_cr: float, aes_length: float,
                    length_factor: float = COLUMN_LENGTH_FACTOR) -> float:
    """Smallest stiffness whose Euler critical load carries the axial load f_cr.

    pi^2 E I / (mu l)^2 >= F_cr with k1 = E I / l gives
    k1 >= mu^2 l F_cr / pi^2.
    """
    return length_factor * length_factor * aes_length * f_cr / (math.pi * math.pi)


def stiffness_bounds(cfg: Config, f: float | None = None, k2: float | None = None,
                     base: SimTrace | None = None) -> StiffnessBounds:
    """Feasible k1 interval at one (f, k2) cell.

    The lower bound needs the steady-state peak axial fin force from a base
    simulation (stiffness-independent kinematics); the upper bound is closed
    form from the statics gain.  An infeasible interval is returned as data,
    not raised.
    """
    if base is None:
        base = simulate_base(cfg, f=f, k2=k2)
    f_cr = float(np.abs(base["F_cr"]).max())
    k1_min = buckling_k1_min(f_cr, cfg.aes.l_T)
    gain = statics_gain(cfg.transmission)
    k1_max = cfg.transmission.T_m_max / gain
    return StiffnessBounds(k1_min=k1_min, k1_max=k1_max, f_cr=f_cr,
                           statics_torque=k1_max * gain)


def variance_objective(trace_or_power) -> float:
    """Population variance of motor power over the measurement window [W^2]."""
    p = trace_or_power["P_m"] if isinstance(trace_or_power, SimTrace) else trace_or_power
    return float(np.var(np.asarray(p, dtype=float)))


def peak_to_peak_objective(trace_or_power) -> float:
    """Peak-to-peak motor power over the measurement window [W]."""
    p = trace_or_power["P_m"] if isinstance(trace_or_power, SimTrace) else trace_or_power
    p = np.asarray(p, dtype=float)
    return float(p.max() - p.min())


class PowerModel:
    """Affine per-sample power model P_m(t; k1) = P0(t) + k1 * P1(t).

    P0 is the rigid-segment power (zero bend moment); the variance in k1 is
    the exact quadratic  var0 + 2*k1*cov01 + k1^2*var1.
    """

    def __init__(self, base: SimTrace, cfg: Config):
        tr = cfg.transmission
        omega = 2.0 * math.pi * base.f
        ratio = tr.d1 * np.cos(base["phi_m"]) / (tr.d2 * np.cos(base["phi_D"]))
        reel = tr.R_D / tr.r_w
        self.p0 = (base["tau_J1"] * reel - tr.J_total * base["ddphi_D"]) * ratio * omega
        self.p1 = base["beta"] * reel * ratio * omega
        self.var0 = float(np.var(self.p0))
        self.var1 = float(np.var(self.p1))
        p0c = self.p0 - self.p0.mean()
        p1c = self.p1 - self.p1.mean()
        self.cov01 = float((p0c * p1c).mean())

    def power(self, k1: float | None) -> np.ndarray:
        return self.p0 if k1 is None else self.p0 + k1 * self.p1

    def variance(self, k1: float | None) -> float:
        if k1 is None:
            return self.var0
        return self.var0 + 2.0 * k1 * self.cov01 + k1 * k1 * self.var1

    def max_power(self, k1: float | None) -> float:
        return float(self.power(k1).max())


@dataclass(frozen=True)
class StiffnessOptResult:
    """Optimal stiffness with the rigid-segment comparison metrics."""

    f: float
    k2: float
    k1_opt: float
    d_T1_opt: float        # spring thickness realizing k1_opt [m]
    var_Pm: float          # minimized power variance [W^2]
    var_Pm_rigid: float    # rigid-segment power variance [W^2]
    eta_r_pct: float       # relative variance reduction [%]
    eta_a: float           # absolute variance reduction [W^2]
    mean_power: float      # cycle-mean motor power (k1-independent) [W]
    peak_tau_J1: float     # peak equivalent joint torque [N*m]
    max_Pm: float          # peak motor power at k1_opt [W]
    bounds: StiffnessBounds
    mode: str
    warning: str | None = None
    var_max_ok: bool | None = None  # set when a variance cap was requested


def _lattice_candidates(cfg: Config, bounds: StiffnessBounds,
                        resolution: float = THICKNESS_RESOLUTION) -> list[float]:
    """Stiffness values on the manufacturable thickness lattice inside bounds."""
    aes = cfg.aes
    d_hi = thickness_for_stiffness(aes, bounds.k1_max)
    hi_idx = int(math.floor(d_hi / resolution + 1e-9))
    if bounds.k1_min <= 0.0:
        lo_idx = 1
    else:
        d_lo = thickness_for_stiffness(aes, bounds.k1_min)
        lo_idx = max(1, int(math.ceil(d_lo / resolution - 1e-9)))
    out = []
    for idx in range(lo_idx, hi_idx + 1):
        k1 = rotational_stiffness(aes.with_thickness(idx * resolution))
        if bounds.k1_min <= k1 <= bounds.k1_max:
            out.append(k1)
    return out


def _scan_min(model: PowerModel, candidates: list[float]) -> tuple[int, list[float]]:
    values = [model.variance(k) for k in candidates]
    best = min(values)
    tol = TIE_REL_TOL * max(abs(best), 1e-300)
    for i, v in enumerate(values):  # first hit = smallest k1 within the tie band
        if v <= best + tol:
            return i, values
    raise AssertionError("unreachable")


def _is_unimodal(values: list[float]) -> bool:
    minima = 0
    n = len(values)
    for i in range(n):
        left = values[i - 1] if i > 0 else math.inf
        right = values[i + 1] if i < n - 1 else math.inf
        if values[i] < left and values[i] < right:
            minima += 1
    return minima <= 1


def _golden_section(fun, lo: float, hi: float, rel_tol: float = 1e-9) -> float:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > rel_tol * max(1.0, abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def optimize_k1(cfg: Config, f: float | None = None, k2: float | None = None,
                mode: str = "continuous", var_max: float | None = None,
                base: SimTrace | None = None,
                bounds: StiffnessBounds | None = None) -> StiffnessOptResult:
    """Minimize the motor-power variance over the feasible stiffness interval.

    ``mode='grid-0.1mm'`` scans the manufacturable thickness lattice only;
    ``mode='continuous'`` refines by golden-section inside the best lattice
    bracket.  Variance ties resolve to the smaller stiffness.  The rigid
    baseline is the same trace with zero bend moment.
    """
    if mode not in ("continuous", "grid-0.1mm"):
        raise ValueError(f"unknown mode '{mode}'")
    if base is None:
        base = simulate_base(cfg, f=f, k2=k2)
    if bounds is None:
        bounds = stiffness_bounds(cfg, base=base)
    if not bounds.feasible:
        raise InfeasibleBoundsError(
            f"infeasible stiffness interval: k1_min = {bounds.k1_min:.4g} "
            f"> k1_max = {bounds.k1_max:.4g} N*m"
        )
    model = PowerModel(base, cfg)
    warning = None

    lattice = _lattice_candidates(cfg, bounds)
    if mode == "grid-0.1mm":
        if not lattice:
            raise InfeasibleBoundsError(
                "no manufacturable thickness lies inside the stiffness bounds"
            )
        i, values = _scan_min(model, lattice)
        if not _is_unimodal(values):
            warning = "non-unimodal-lattice-scan"
        k1_opt = lattice[i]
        d_opt = round(thickness_for_stiffness(cfg.aes, k1_opt) / THICKNESS_RESOLUTION) \
            * THICKNESS_RESOLUTION
    else:
        floor = max(bounds.k1_min, 1e-12)  # a physical spring needs k1 > 0
        candidates = sorted({floor, *lattice, bounds.k1_max})
        i, values = _scan_min(model, candidates)
        lo = candidates[i - 1] if i > 0 else candidates[0]
        hi = candidates[i + 1] if i < len(candidates) - 1 else candidates[-1]
        if _is_unimodal(values):
            k1_opt = _golden_section(model.variance, lo, hi)
        else:
            warning = "non-unimodal-lattice-scan"
            fine = _lattice_candidates(cfg, bounds, THICKNESS_RESOLUTION / 10.0)
            j, _ = _scan_min(model, fine or candidates)
            k1_opt = (fine or candidates)[j]
        k1_opt = min(max(k1_opt, floor), bounds.k1_max)
        # tie rule over the refined point and every scanned candidate
        pool = candidates + [k1_opt]
        vals = [model.variance(k) for k in pool]
        vmin = min(vals)
        tie = TIE_REL_TOL * max(abs(vmin), 1e-300)
        k1_opt = min(k for k, v in zip(pool, vals) if v <= vmin + tie)
        d_opt = thickness_for_stiffness(cfg.aes, k1_opt)

    var_opt = float(np.var(model.power(k1_opt)))
    var_rigid = float(np.var(model.p0))
    eta_a = var_rigid - var_opt
    eta_r = 100.0 * eta_a / var_rigid if var_rigid > 0.0 else 0.0
    return StiffnessOptResult(
        f=base.f, k2=base.meta["k2"], k1_opt=k1_opt, d_T1_opt=d_opt,
        var_Pm=var_opt, var_Pm_rigid=var_rigid, eta_r_pct=eta_r, eta_a=eta_a,
        mean_power=float(model.power(k1_opt).mean()),
        peak_tau_J1=float(np.abs(base["tau_J1"]).max()),
        max_Pm=model.max_power(k1_opt),
        bounds=bounds, mode=mode, warning=warning,
        var_max_ok=None if var_max is None else bool(var_opt <= var_max),
    )


def variance_feasible_interval(cfg: Config, var_max: float,
                               f: float | None = None, k2: float | None = None,
                               base: SimTrace | None = None) -> tuple[float, float] | None:
    """Stiffness sub-interval keeping the power variance at or below var_max.

    The variance is quadratic in k1, so the set is an interval; it is
    intersected with the feasible stiffness bounds.  Returns None when the
    cap is unattainable.
    """
    if base is None:
        base = simulate_base(cfg, f=f, k2=k2)
    bounds = stiffness_bounds(cfg, base=base)
    model = PowerModel(base, cfg)
    a, b, c = model.var1, 2.0 * model.cov01, model.var0 - var_max
    if a <= 0.0:
        return (bounds.k1_min, bounds.k1_max) if c <= 0.0 and bounds.feasible else None
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    lo = max((-b - root) / (2.0 * a), bounds.k1_min)
    hi = min((-b + root) / (2.0 * a), bounds.k1_max)
    if lo > hi:
        return None
    return lo, hi


@dataclass(frozen=True)
class SweepCell:
    """One (f, k2) cell of a stiffness sweep; error is set when a cell failed."""

    f: float
    k2: float
    result: StiffnessOptResult | None
    error: str | None = None


def _sweep_cell(args) -> SweepCell:
    cfg, f, k2, mode, var_max = args
    try:
        result = optimize_k1(cfg, f=f, k2=k2, mode=mode, var_max=var_max)
        return SweepCell(f=f, k2=k2, result=result)
    except Exception as exc:
        return SweepCell(f=f, k2=k2, result=None, error=f"{type(exc).__name__}: {exc}")


def sweep(cfg: Config, f_grid, k2_grid, mode: str = "continuous",
          var_max: float | None = None, jobs: int = 1) -> list[SweepCell]:
    """Optimize every (f, k2) cell; rows come back f-major and deterministic.

    Cells are independent; ``jobs`` only fans them out over processes and
    never changes the results.  Per-cell failures are recorded in the cell,
    the sweep continues.
    """
    f_grid = [float(x) for x in f_grid]
    k2_grid = [float(x) for x in k2_grid]
    if not f_grid or not k2_grid:
        raise ValueError("sweep grids must be non-empty")
    tasks = [(cfg, f, k2, mode, var_max) for f in f_grid for k2 in k2_grid]
    if jobs <= 1:
        return [_sweep_cell(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_cell, tasks))


@dataclass(frozen=True)
class MaxFreqResult:
    """Largest motor frequency keeping peak power under the allowable cap."""

    variant: str           # 'aes' (re-optimized stiffness) or 'rigid'
    k2: float
    f_max: float
    max_power: float       # peak motor power at f_max [W]
    p_allow: float
    k1_opt: float | None   # stiffness used at f_max (None for rigid)
    boundary: str | None   # set when the cap was never crossed in the range
    trials: int


def _trial_max_power(cfg: Config, f: float, k2: float, variant: str,
                     mode: str) -> tuple[float, float | None]:
    base = simulate_base(cfg, f=f, k2=k2)
    model = PowerModel(base, cfg)
    if variant == "rigid":
        return model.max_power(None), None
    result = optimize_k1(cfg, base=base, mode=mode)
    return model.max_power(result.k1_opt), result.k1_opt


def max_frequency(cfg: Config, k2: float | None = None, variant: str = "aes",
                  f_lo: float = 0.5, f_hi: float = 20.0, tol: float = 0.01,
                  mode: str = "continuous") -> MaxFreqResult:
    """Bisect for the largest frequency with steady-state max P_m <= P_allow.

    The 'aes' variant re-optimizes the spine stiffness at every trial
    frequency; 'rigid' uses the zero-bend-moment baseline.  If the cap is
    never reached (or already exceeded at f_lo) the boundary is flagged
    instead of bisected.
    """
    if variant not in ("aes", "rigid"):
        raise ValueError(f"unknown variant '{variant}'")
    k2 = rotational_stiffness(cfg.pes) if k2 is None else float(k2)
    p_allow = cfg.transmission.P_allow
    trials = 0

    p_hi, _ = _trial_max_power(cfg, f_hi, k2, variant, mode)
    trials += 1
    if p_hi <= p_allow:
        return MaxFreqResult(variant=variant, k2=k2, f_max=f_hi, max_power=p_hi,
                             p_allow=p_allow, k1_opt=None, boundary="cap-not-reached",
                             trials=trials)
    p_lo, k1_lo = _trial_max_power(cfg, f_lo, k2, variant, mode)
    trials += 1
    if p_lo > p_allow:
        return MaxFreqResult(variant=variant, k2=k2, f_max=f_lo, max_power=p_lo,
                             p_allow=p_allow, k1_opt=k1_lo, boundary="cap-below-range",
                             trials=trials)

    lo, hi = f_lo, f_hi
    p_best, k1_best = p_lo, k1_lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        p_mid, k1_mid = _trial_max_power(cfg, mid, k2, variant, mode)
        trials += 1
        if p_mid <= p_allow:
            lo, p_best, k1_best = mid, p_mid, k1_mid
        else:
            hi = mid
    return MaxFreqResult(variant=variant, k2=k2, f_max=lo, max_power=p_best,
                         p_allow=p_allow, k1_opt=k1_best, boundary=None, trials=trials)
