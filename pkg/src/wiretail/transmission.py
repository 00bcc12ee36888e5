"""Transmission kinematics: motor angle to spine bend, with analytic derivatives.

The chain is
    motor        phi_m = omega * t
    reel         phi_D = arcsin(d1 * sin(phi_m) / d2)
    spine bend   beta  = (R_D / r_w) * phi_D
    chord        l_1   = 2 * l_T1 * sin(beta/2) / beta
and every derivative below is the exact chain-rule derivative, never a
finite difference.  All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SpringSpec, TailBodyParams, TransmissionSpec

# Below this bend angle the chord expressions switch to their series form;
# the leading dropped term is O(beta^4/1920).
CHORD_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class DriveState:
    """Kinematic state of the drive chain at one instant (or array of instants)."""

    phi_m: float | np.ndarray
    dphi_m: float | np.ndarray
    ddphi_m: float | np.ndarray
    phi_D: float | np.ndarray
    dphi_D: float | np.ndarray
    ddphi_D: float | np.ndarray
    beta: float | np.ndarray
    dbeta: float | np.ndarray
    ddbeta: float | np.ndarray
    l1: float | np.ndarray
    dl1: float | np.ndarray
    ddl1: float | np.ndarray
    chord_scale: float | np.ndarray  # l1 / l_T1 = g(beta), scales link-1 areas


def chord_factors(beta):
    """Chord scale g(beta) = 2 sin(beta/2)/beta and its first two derivatives.

    g maps the undeformed spine length to the instantaneous chord length,
    l1 = l_T1 * g(beta).  The removable singularity at beta = 0 is handled
    with the series branch.
    """
    beta = np.asarray(beta, dtype=float)
    b2 = beta * beta
    g_series = 1.0 - b2 / 24.0 + b2 * b2 / 1920.0
    gp_series = -beta / 12.0 + beta * b2 / 480.0
    gpp_series = -1.0 / 12.0 + b2 / 160.0
    # Guard the exact branch against division by zero where the series is used.
    safe = np.where(np.abs(beta) < CHORD_SERIES_CUTOFF, 1.0, beta)
    sb = np.sin(0.5 * safe)
    cb = np.cos(0.5 * safe)
    g_exact = 2.0 * sb / safe
    gp_exact = cb / safe - 2.0 * sb / (safe * safe)
    gpp_exact = -sb / (2.0 * safe) - 2.0 * cb / (safe * safe) + 4.0 * sb / (safe**3)
    use_series = np.abs(beta) < CHORD_SERIES_CUTOFF
    g = np.where(use_series, g_series, g_exact)
    gp = np.where(use_series, gp_series, gp_exact)
    gpp = np.where(use_series, gpp_series, gpp_exact)
    if g.ndim == 0:
        return float(g), float(gp), float(gpp)
    return g, gp, gpp


def drive_state(t, omega: float, tr: TransmissionSpec, aes: SpringSpec) -> DriveState:
    """Drive chain state at time(s) t for a motor turning at constant omega."""
    t = np.asarray(t, dtype=float)
    a = tr.crank_ratio
    gr = tr.reel_ratio
    phi_m = omega * t
    sm = np.sin(phi_m)
    cm = np.cos(phi_m)
    u = a * sm
    w2 = 1.0 - u * u
    w = np.sqrt(w2)
    phi_D = np.arcsin(u)
    dphi_D = a * omega * cm / w
    ddphi_D = -a * omega**2 * sm / w + a * a * omega**2 * cm * cm * u / (w2 * w)
    beta = gr * phi_D
    dbeta = gr * dphi_D
    ddbeta = gr * ddphi_D
    g, gp, gpp = chord_factors(beta)
    l1 = aes.l_T * g
    dl1 = aes.l_T * gp * dbeta
    ddl1 = aes.l_T * (gpp * dbeta * dbeta + gp * ddbeta)

    def _maybe_scalar(x):
        return float(x) if np.ndim(x) == 0 else x

    return DriveState(
        phi_m=_maybe_scalar(phi_m), dphi_m=omega if t.ndim == 0 else np.full_like(t, omega),
        ddphi_m=0.0 if t.ndim == 0 else np.zeros_like(t),
        phi_D=_maybe_scalar(phi_D), dphi_D=_maybe_scalar(dphi_D), ddphi_D=_maybe_scalar(ddphi_D),
        beta=_maybe_scalar(beta), dbeta=_maybe_scalar(dbeta), ddbeta=_maybe_scalar(ddbeta),
        l1=_maybe_scalar(l1), dl1=_maybe_scalar(dl1), ddl1=_maybe_scalar(ddl1),
        chord_scale=_maybe_scalar(g),
    )


def joint_angles(ds: DriveState, phi2):
    """Absolute link angles and passive joint bend from a drive state.

    Returns (theta1, theta2, theta_s) with theta1 = beta/2 the chord angle,
    theta2 = theta1 + phi2 the fin angle, theta_s = phi2 - beta/2 the bend
    of the passive caudal joint.
    """
    theta1 = 0.5 * ds.beta
    theta2 = theta1 + phi2
    theta_s = phi2 - theta1
    return theta1, theta2, theta_s


def jacobians(q, ds: DriveState, body: TailBodyParams):
    """Center-of-mass Jacobians of both links at configuration q = (q1, q2).

    Returns (J_v1, J_v2, J_w1, J_w2), each 3x2, mapping generalized rates to
    world-frame linear/angular center-of-mass velocities.  These are partial
    derivatives at fixed chord length; the chord-rate contribution to link-2
    velocity is exposed separately (see hydro.link_velocities).
    """
    q1, q2 = float(q[0]), float(q[1])
    s1, c1 = np.sin(q1), np.cos(q1)
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    l1 = ds.l1
    lc1, lc2 = body.lc1, body.lc2
    J_v1 = np.array([
        [-lc1 * s1, 0.0],
        [lc1 * c1, 0.0],
        [0.0, 0.0],
    ])
    J_v2 = np.array([
        [-l1 * s1 - lc2 * s12, -lc2 * s12],
        [l1 * c1 + lc2 * c12, lc2 * c12],
        [0.0, 0.0],
    ])
    J_w1 = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    J_w2 = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
    return J_v1, J_v2, J_w1, J_w2
