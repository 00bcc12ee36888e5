"""Tail dynamics: equations of motion, time stepping and steady-state traces.

The chord angle q1 = beta/2 is prescribed by the transmission (the wire
drive makes it a pure function of motor angle), so the model has a single
free coordinate, the passive joint angle q2 = phi2.  Row 2 of the
Lagrangian equations is integrated forward for q2; row 1 is evaluated as
inverse dynamics for the equivalent joint torque tau_J1 that the wire must
deliver to link 1.

Added mass is folded into the generalized mass matrix (it enters exactly
like structural mass in the translational kinetic energy), which keeps the
forward ODE explicit; the drag torques remain on the right-hand side.  The
chord length l1(t) is rheonomic and its rate terms are retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernel
from .config import Config, ConfigError, SimSettings, rotational_stiffness
from .hydro import link_velocities
from .transmission import DriveState, drive_state

MAX_CYCLES = 50          # give up on steady state after this many cycles
RMS_CONVERGENCE = 1e-3   # relative cycle-RMS change declaring steady state


class IntegrationError(RuntimeError):
    """Non-finite state during time stepping."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class SteadyStateError(RuntimeError):
    """No steady state within MAX_CYCLES; carries the last simulated trace."""

    def __init__(self, message: str, trace: "SimTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class TailState:
    """Instantaneous tail state: free coordinate plus prescribed drive."""

    t: float
    phi2: float
    dphi2: float
    ddphi2: float
    phi1: float
    dphi1: float
    ddphi1: float
    tau_J1: float


@dataclass
class SimTrace:
    """Uniformly sampled steady-state time series of one simulation run.

    ``channels`` maps channel name to an array of length
    steps_per_cycle * measurement_cycles; the grid spacing is constant.
    """

    f: float
    dt: float
    steps_per_cycle: int
    cycles: int
    t: np.ndarray
    channels: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def __contains__(self, name: str) -> bool:
        return name in self.channels

    @property
    def n_samples(self) -> int:
        return self.t.size

    def amplitude(self, name: str) -> float:
        """Half peak-to-peak value of a channel over the trace."""
        x = self.channels[name]
        return 0.5 * float(x.max() - x.min())

    def cycle_mean(self, name: str) -> float:
        return float(self.channels[name].mean())


def build_params(cfg: Config, f: float, k2: float) -> np.ndarray:
    """Kernel parameter vector for a run at frequency f and PES stiffness k2."""
    tr, body = cfg.transmission, cfg.body
    par = np.empty(kernel.N_PARAMS)
    par[kernel.P_OMEGA] = 2.0 * math.pi * f
    par[kernel.P_CRANK] = tr.crank_ratio
    par[kernel.P_REEL] = tr.reel_ratio
    par[kernel.P_LT1] = cfg.aes.l_T
    par[kernel.P_LC1] = body.lc1
    par[kernel.P_LC2] = body.lc2
    par[kernel.P_MU1] = body.m1 + body.ma1
    par[kernel.P_MU2] = body.m2 + body.ma2
    par[kernel.P_I1] = body.I1
    par[kernel.P_I2] = body.I2
    par[kernel.P_K2] = k2
    par[kernel.P_RHO] = body.rho
    par[kernel.P_CF1] = body.cf1
    par[kernel.P_CD1] = body.cd1
    par[kernel.P_CF2] = body.cf2
    par[kernel.P_CD2] = body.cd2
    par[kernel.P_SX1] = body.Sx1
    par[kernel.P_SY1] = body.Sy1
    par[kernel.P_SX2] = body.Sx2
    par[kernel.P_SY2] = body.Sy2
    par[kernel.P_MA1] = body.ma1
    par[kernel.P_MA2] = body.ma2
    par[kernel.P_M1] = body.m1
    par[kernel.P_M2] = body.m2
    return par


def eom_terms(q, dq, ds: DriveState, k2: float, body) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mass matrix, velocity/rheonomic bias and spring torque of the EOM.

    The three parts satisfy  M @ ddq + bias + spring = generalized forces,
    with the added mass folded into M and bias and only the drag torques on
    the force side.  Raises ConfigError if M is not positive definite.
    """
    q1, q2 = float(q[0]), float(q[1])
    dq1, dq2 = float(dq[0]), float(dq[1])
    mu1 = body.m1 + body.ma1
    mu2 = body.m2 + body.ma2
    lc1, lc2 = body.lc1, body.lc2
    l1, dl1, ddl1 = ds.l1, ds.dl1, ds.ddl1
    s2, c2 = math.sin(q2), math.cos(q2)

    amu = mu2 * l1 * lc2
    m11 = mu1 * lc1 * lc1 + body.I1 + mu2 * (l1 * l1 + lc2 * lc2) + 2.0 * amu * c2 + body.I2
    m12 = mu2 * lc2 * lc2 + amu * c2 + body.I2
    m22 = mu2 * lc2 * lc2 + body.I2
    M = np.array([[m11, m12], [m12, m22]])
    if m11 <= 0.0 or m11 * m22 - m12 * m12 <= 0.0:
        raise ConfigError("mass matrix is not positive definite; check masses and inertias")

    adot = mu2 * dl1 * lc2
    h1 = (-2.0 * amu * s2 * dq1 * dq2 - amu * s2 * dq2 * dq2
          + 2.0 * mu2 * l1 * dl1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2)
    h2 = amu * s2 * dq1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2
    bias = np.array([h1, h2])

    ths = q2 - q1
    spring = np.array([-k2 * ths, k2 * ths])
    return M, bias, spring


def kinetic_energy(q, dq, ds: DriveState, body, effective: bool = False) -> float:
    """Kinetic energy of the two links; ``effective=True`` adds the added mass."""
    v1, v2 = link_velocities(q, dq, ds, body)
    m1 = body.m1 + (body.ma1 if effective else 0.0)
    m2 = body.m2 + (body.ma2 if effective else 0.0)
    dq1, dq2 = float(dq[0]), float(dq[1])
    return 0.5 * (m1 * float(v1 @ v1) + body.I1 * dq1 * dq1
                  + m2 * float(v2 @ v2) + body.I2 * (dq1 + dq2) ** 2)


def pes_energy(k2: float, q) -> float:
    """Elastic energy of the passive caudal joint, 0.5*k2*(q2 - q1)^2."""
    ths = float(q[1]) - float(q[0])
    return 0.5 * k2 * ths * ths


def tail_state(cfg: Config, f: float, k2: float, t: float, phi2: float, dphi2: float) -> TailState:
    """Evaluate the full tail state (accelerations, tau_J1) at given (t, phi2, dphi2)."""
    par = build_params(cfg, f, k2)
    ddq2, tau_j1, *_ = kernel.eval_full(par, t, phi2, dphi2)
    ds = drive_state(t, 2.0 * math.pi * f, cfg.transmission, cfg.aes)
    return TailState(
        t=t, phi2=phi2, dphi2=dphi2, ddphi2=ddq2,
        phi1=0.5 * ds.beta, dphi1=0.5 * ds.dbeta, ddphi1=0.5 * ds.ddbeta,
        tau_J1=tau_j1,
    )


def step(cfg: Config, state: TailState, dt: float, f: float, k2: float) -> TailState:
    """One classical fourth-order step of the passive coordinate.

    tau_J1 and the accelerations of the returned state are re-evaluated at
    the new time.  Raises IntegrationError on a non-finite result.
    """
    par = build_params(cfg, f, k2)
    q2, dq2 = kernel.step_once(par, state.t, dt, state.phi2, state.dphi2)
    if not (math.isfinite(q2) and math.isfinite(dq2)):
        raise IntegrationError(f"non-finite state after step at t = {state.t}")
    return tail_state(cfg, f, k2, state.t + dt, q2, dq2)


def _kinematic_channels(t: np.ndarray, cfg: Config, f: float) -> dict[str, np.ndarray]:
    ds = drive_state(t, 2.0 * math.pi * f, cfg.transmission, cfg.aes)
    return {
        "phi_m": np.asarray(ds.phi_m), "phi_D": np.asarray(ds.phi_D),
        "dphi_D": np.asarray(ds.dphi_D), "ddphi_D": np.asarray(ds.ddphi_D),
        "beta": np.asarray(ds.beta), "dbeta": np.asarray(ds.dbeta),
        "ddbeta": np.asarray(ds.ddbeta),
        "l1": np.asarray(ds.l1), "dl1": np.asarray(ds.dl1),
        "theta1": 0.5 * np.asarray(ds.beta),
        "dtheta1": 0.5 * np.asarray(ds.dbeta),
        "ddtheta1": 0.5 * np.asarray(ds.ddbeta),
    }


def simulate_base(cfg: Config, f: float | None = None, k2: float | None = None,
                  settings: SimSettings | None = None) -> SimTrace:
    """Integrate to steady state and record the kinematic/dynamic channels.

    The result is independent of the active-segment stiffness (that enters
    only the drivetrain back-calculation, see drivetrain.attach_drivetrain).
    Steady state is declared once the cycle-RMS of phi2 changes by less
    than 0.1% between consecutive cycles, after at least ``warmup_cycles``
    cycles; the measurement window then covers ``measurement_cycles`` full
    cycles.
    """
    sim = settings or cfg.sim
    sim.validate()
    if sim.warmup_cycles < 6:
        raise ConfigError("warmup_cycles must be >= 6 for steady-state traces",
                          key="warmup_cycles")
    f = cfg.sim.freq if f is None else float(f)
    if f <= 0:
        raise ConfigError("frequency must be > 0", key="freq")
    k2 = rotational_stiffness(cfg.pes) if k2 is None else float(k2)

    par = build_params(cfg, f, k2)
    spc = sim.steps_per_cycle
    dt = 1.0 / (f * spc)

    q2 = 0.0
    dq2 = 0.0
    n0 = 0
    prev_rms = None
    cycles = 0
    converged = False
    while cycles < MAX_CYCLES:
        q2, dq2, rms = kernel.run_cycle(par, n0, dt, spc, q2, dq2)
        cycles += 1
        n0 += spc
        if not (math.isfinite(q2) and math.isfinite(dq2)):
            raise IntegrationError(f"non-finite state during cycle {cycles}", step_index=n0)
        if prev_rms is not None and cycles >= sim.warmup_cycles:
            if abs(rms - prev_rms) < RMS_CONVERGENCE * max(prev_rms, 1e-12):
                converged = True
                break
        prev_rms = rms

    trace = _record(cfg, f, k2, par, n0, dt, spc, sim.measurement_cycles, q2, dq2, cycles)
    if not converged:
        raise SteadyStateError(
            f"no steady state within {MAX_CYCLES} cycles at f = {f} Hz, k2 = {k2} N*m",
            trace=trace,
        )
    return trace


def _record(cfg, f, k2, par, n0, dt, spc, n_cycles, q2, dq2, warmup_used) -> SimTrace:
    n = spc * n_cycles
    out = np.empty((kernel.N_RECORD, n))
    q2, dq2 = kernel.run_recorded(par, n0, dt, spc, n_cycles, q2, dq2, out)
    if not (math.isfinite(q2) and math.isfinite(dq2)):
        raise IntegrationError("non-finite state during measurement window", step_index=n0 + n)
    t = (n0 + np.arange(n, dtype=float)) * dt

    channels = _kinematic_channels(t, cfg, f)
    channels["phi2"] = out[kernel.R_Q2].copy()
    channels["dphi2"] = out[kernel.R_DQ2].copy()
    channels["ddphi2"] = out[kernel.R_DDQ2].copy()
    channels["tau_J1"] = out[kernel.R_TAU_J1].copy()
    channels["thrust"] = out[kernel.R_THRUST].copy()
    channels["F_cr"] = out[kernel.R_FCR].copy()
    channels["P_drag"] = out[kernel.R_PDRAG].copy()
    channels["E_kin"] = out[kernel.R_EKIN].copy()
    channels["E_pes"] = out[kernel.R_EPES].copy()
    channels["theta2"] = channels["theta1"] + channels["phi2"]
    channels["theta_s"] = channels["phi2"] - channels["theta1"]

    meta = {
        "f": f, "k2": k2,
        "warmup_cycles_used": warmup_used,
        "backend": kernel.BACKEND,
        "config_source": cfg.source,
        # statistic fed to the buckling bound; the cycle peak is conservative
        "f_cr_statistic": "cycle-peak-abs",
    }
    return SimTrace(f=f, dt=dt, steps_per_cycle=spc, cycles=n_cycles,
                    t=t, channels=channels, meta=meta)


def simulate(cfg: Config, f: float | None = None, k1: float | None = None,
             k2: float | None = None, rigid: bool = False,
             settings: SimSettings | None = None) -> SimTrace:
    """Full simulation: steady-state trace with drivetrain channels attached.

    k1/k2 are stiffnesses in N*m (defaults derived from the configured
    spring thicknesses).  ``rigid=True`` models the rigid active segment:
    identical kinematics, zero elastic moment.
    """
    from .drivetrain import attach_drivetrain  # local import to avoid a cycle

    trace = simulate_base(cfg, f=f, k2=k2, settings=settings)
    k1 = rotational_stiffness(cfg.aes) if k1 is None else float(k1)
    attach_drivetrain(trace, cfg, None if rigid else k1)
    return trace


class PhaseUndefinedError(ValueError):
    """Raised when a phase is requested of a zero-amplitude channel."""


def phase_difference(trace: SimTrace, lead: str = "theta1", lag: str = "theta2") -> float:
    """Phase of the lag channel's fundamental behind the lead channel's, in [0, 2pi).

    Both channels are reduced to their fundamental (one oscillation per
    swing cycle); the cross-correlation peak of two sinusoids at the same
    frequency is their phase offset, which is read directly from the
    fundamental Fourier coefficients.
    """
    if trace.cycles < 2:
        raise ValueError("phase difference needs at least 2 recorded cycles")
    x = trace[lead] - trace[lead].mean()
    y = trace[lag] - trace[lag].mean()
    m = trace.cycles  # fundamental bin: one oscillation per cycle
    cx = np.fft.rfft(x)[m]
    cy = np.fft.rfft(y)[m]
    scale = trace.n_samples * 0.5
    if abs(cx) < 1e-12 * scale or abs(cy) < 1e-12 * scale:
        raise PhaseUndefinedError("fundamental amplitude too small for a defined phase")
    return float((np.angle(cx) - np.angle(cy)) % (2.0 * math.pi))
