"""Force chain from the tail back to the motor.

Per sample of a steady-state trace: the bend moment of the active spine
segment adds to the equivalent joint torque; the sum maps through the wire
(offset r_w) onto the reel (radius R_D); the rotation law of the lumped
transmission inertia then yields motor torque and power:

    T_e1      = k1 * beta
    T_wire_eq = tau_J1 + T_e1
    F_wire    = T_wire_eq / r_w      (sign selects the pulling wire side)
    T_wire_r  = F_wire * R_D
    T_m       = (T_wire_r - (J_R+J_S+J_P) * ddphi_D) * d1 cos(phi_m) / (d2 cos(phi_D))
    P_m       = T_m * omega

The rigid active segment (no energy storage) uses T_e1 = 0 with identical
kinematics.  Negative power samples are genuine regeneration and are kept.
"""

from __future__ import annotations

import math

import numpy as np

from .config import Config, TransmissionSpec
from .dynamics import SimTrace
from .transmission import DriveState


def aes_moment_energy(k1: float, beta):
    """Bend moment k1*beta and stored elastic energy 0.5*k1*beta^2."""
    beta = np.asarray(beta, dtype=float)
    t_e1 = k1 * beta
    e_aes = 0.5 * k1 * beta * beta
    if beta.ndim == 0:
        return float(t_e1), float(e_aes)
    return t_e1, e_aes


def motor_torque(tau_J1, t_e1, ds: DriveState, tr: TransmissionSpec):
    """Motor torque and power for given joint torque and spine bend moment.

    Accepts scalars or arrays; ds must hold the matching drive state.  The
    reel angular acceleration is the analytic transmission derivative, never
    a finite difference of the trace.
    """
    t_wire_eq = np.asarray(tau_J1, dtype=float) + np.asarray(t_e1, dtype=float)
    f_wire = t_wire_eq / tr.r_w
    t_wire_r = f_wire * tr.R_D
    ratio = tr.d1 * np.cos(ds.phi_m) / (tr.d2 * np.cos(ds.phi_D))
    t_m = (t_wire_r - tr.J_total * np.asarray(ds.ddphi_D)) * ratio
    p_m = t_m * np.asarray(ds.dphi_m)
    if np.ndim(t_m) == 0:
        return float(t_m), float(p_m)
    return t_m, p_m


def attach_drivetrain(trace: SimTrace, cfg: Config, k1: float | None) -> SimTrace:
    """Append the drivetrain channels for stiffness k1 (None = rigid segment).

    Kinematic and joint-torque channels are untouched; re-attaching with a
    different stiffness is cheap and leaves them bit-identical.
    """
    tr = cfg.transmission
    beta = trace["beta"]
    if k1 is None:
        t_e1 = np.zeros_like(beta)
        e_aes = np.zeros_like(beta)
    else:
        if k1 <= 0.0:
            raise ValueError("k1 must be > 0 (use None for the rigid segment)")
        t_e1, e_aes = aes_moment_energy(k1, beta)
    t_wire_eq = trace["tau_J1"] + t_e1
    f_wire = t_wire_eq / tr.r_w
    t_wire_r = f_wire * tr.R_D
    ratio = tr.d1 * np.cos(trace["phi_m"]) / (tr.d2 * np.cos(trace["phi_D"]))
    omega = 2.0 * math.pi * trace.f
    t_m = (t_wire_r - tr.J_total * trace["ddphi_D"]) * ratio
    p_m = t_m * omega

    trace.channels.update(
        T_e1=t_e1, E_aes=e_aes, T_wire_eq=t_wire_eq, F_wire=f_wire,
        T_wire_r=t_wire_r, T_m=t_m, P_m=p_m,
    )
    trace.meta["k1"] = k1
    trace.meta["rigid"] = k1 is None
    return trace


def statics_gain(tr: TransmissionSpec, n_grid: int = 8192) -> float:
    """max |T_m^s| per unit spine stiffness over one motor revolution.

    In statics (tau_J1 = 0, no reel acceleration) the motor torque is
    linear in the spine stiffness, so the cap T_m^s <= T_m_max inverts in
    closed form through this gain.
    """
    phi_m = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    u = tr.crank_ratio * np.sin(phi_m)
    phi_d = np.arcsin(u)
    beta = tr.reel_ratio * phi_d
    val = beta * tr.reel_ratio * tr.crank_ratio * np.cos(phi_m) / np.cos(phi_d)
    return float(np.abs(val).max())


def statics_motor_torque(k1: float, tr: TransmissionSpec, n_grid: int = 8192) -> float:
    """Peak static motor torque needed to hold the bend against stiffness k1."""
    return k1 * statics_gain(tr, n_grid)


def cycle_summary(trace: SimTrace) -> dict:
    """Cycle statistics of a trace with drivetrain channels attached."""
    from .dynamics import phase_difference

    p_m = trace["P_m"]
    out = {
        "f_hz": trace.f,
        "k1_Nm": trace.meta.get("k1"),
        "k2_Nm": trace.meta.get("k2"),
        "rigid": trace.meta.get("rigid", False),
        "mean_T_m_Nm": trace.cycle_mean("T_m"),
        "mean_P_m_W": trace.cycle_mean("P_m"),
        "var_P_m_W2": float(np.var(p_m)),
        "max_P_m_W": float(p_m.max()),
        "min_P_m_W": float(p_m.min()),
        "mean_thrust_N": trace.cycle_mean("thrust"),
        "amp_theta1_rad": trace.amplitude("theta1"),
        "amp_theta2_rad": trace.amplitude("theta2"),
        "amp_theta_s_rad": trace.amplitude("theta_s"),
        "peak_E_aes_J": float(trace["E_aes"].max()),
        "peak_tau_J1_Nm": float(np.abs(trace["tau_J1"]).max()),
        "peak_F_cr_N": float(np.abs(trace["F_cr"]).max()),
        "phase_lag_rad": phase_difference(trace),
        "warmup_cycles_used": trace.meta.get("warmup_cycles_used"),
        "backend": trace.meta.get("backend"),
    }
    return out
