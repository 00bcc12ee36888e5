"""Pure-Python integration kernel (fallback twin of the compiled kernel).

This module and ``_kernel.pyx`` implement the same arithmetic in the same
operation order; with the extension compiled without FP contraction the two
produce bit-identical trajectories.  Any change here must be mirrored there.

State per step: the passive joint coordinate q2 and its rate; the chord
angle q1 = beta/2 is prescribed by the transmission and evaluated
analytically inside the right-hand side.
"""

from __future__ import annotations

import math

BACKEND = "python"

# Parameter vector layout (shared with the compiled kernel).
P_OMEGA = 0    # motor angular velocity [rad/s]
P_CRANK = 1    # d1/d2
P_REEL = 2     # R_D/r_w
P_LT1 = 3      # spine free length [m]
P_LC1 = 4
P_LC2 = 5
P_MU1 = 6      # m1*(1+cm1), translational mass incl. added mass
P_MU2 = 7
P_I1 = 8
P_I2 = 9
P_K2 = 10      # passive joint stiffness [N*m]
P_RHO = 11
P_CF1 = 12
P_CD1 = 13
P_CF2 = 14
P_CD2 = 15
P_SX1 = 16     # link-1 reference areas (undeformed chord)
P_SY1 = 17
P_SX2 = 18
P_SY2 = 19
P_MA1 = 20     # added masses cm_i * m_i
P_MA2 = 21
P_M1 = 22      # structural masses
P_M2 = 23
N_PARAMS = 24

# Record row layout of run_recorded output.
R_Q2 = 0
R_DQ2 = 1
R_DDQ2 = 2
R_TAU_J1 = 3
R_THRUST = 4
R_FCR = 5
R_PDRAG = 6
R_EKIN = 7
R_EPES = 8
N_RECORD = 9

_CHORD_CUTOFF = 1e-4


def _rhs(par, t, q2, dq2):
    """Forward dynamics: passive joint acceleration at state (t, q2, dq2)."""
    omega = par[P_OMEGA]
    a = par[P_CRANK]
    gr = par[P_REEL]
    lt1 = par[P_LT1]
    lc2 = par[P_LC2]
    mu2 = par[P_MU2]
    i2 = par[P_I2]

    phim = omega * t
    sm = math.sin(phim)
    cm = math.cos(phim)
    u = a * sm
    w2 = 1.0 - u * u
    w = math.sqrt(w2)
    dphid = a * omega * cm / w
    ddphid = -a * omega * omega * sm / w + a * a * omega * omega * cm * cm * u / (w2 * w)
    beta = gr * math.asin(u)
    dbeta = gr * dphid
    ddbeta = gr * ddphid
    q1 = 0.5 * beta
    dq1 = 0.5 * dbeta
    ddq1 = 0.5 * ddbeta

    if beta < _CHORD_CUTOFF and beta > -_CHORD_CUTOFF:
        b2 = beta * beta
        g = 1.0 - b2 / 24.0 + b2 * b2 / 1920.0
        gp = -beta / 12.0 + beta * b2 / 480.0
        gpp = -1.0 / 12.0 + b2 / 160.0
    else:
        sb = math.sin(0.5 * beta)
        cb = math.cos(0.5 * beta)
        g = 2.0 * sb / beta
        gp = cb / beta - 2.0 * sb / (beta * beta)
        gpp = -sb / (2.0 * beta) - 2.0 * cb / (beta * beta) + 4.0 * sb / (beta * beta * beta)
    l1 = lt1 * g
    dl1 = lt1 * gp * dbeta
    ddl1 = lt1 * (gpp * dbeta * dbeta + gp * ddbeta)

    s1 = math.sin(q1)
    c1 = math.cos(q1)
    th2 = q1 + q2
    s12 = math.sin(th2)
    c12 = math.cos(th2)
    s2 = math.sin(q2)
    c2 = math.cos(q2)
    dth2 = dq1 + dq2

    amu = mu2 * l1 * lc2
    m12 = mu2 * lc2 * lc2 + amu * c2 + i2
    m22 = mu2 * lc2 * lc2 + i2

    v2x = -l1 * s1 * dq1 - lc2 * s12 * dth2 + dl1 * c1
    v2y = l1 * c1 * dq1 + lc2 * c12 * dth2 + dl1 * s1

    u2x = c12 * v2x + s12 * v2y
    u2y = -s12 * v2x + c12 * v2y

    rho = par[P_RHO]
    f2xl = -0.5 * rho * par[P_CF2] * par[P_SX2] * u2x * abs(u2x)
    f2yl = -0.5 * rho * par[P_CD2] * par[P_SY2] * u2y * abs(u2y)

    fd2x = c12 * f2xl - s12 * f2yl
    fd2y = s12 * f2xl + c12 * f2yl

    ox = l1 * c1
    oy = l1 * s1
    r2x = ox + lc2 * c12
    r2y = oy + lc2 * s12
    taud2 = (r2x - ox) * fd2y - (r2y - oy) * fd2x

    adot = mu2 * dl1 * lc2
    h2 = amu * s2 * dq1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2
    ths = q2 - q1
    return (taud2 - par[P_K2] * ths - h2 - m12 * ddq1) / m22


def eval_full(par, t, q2, dq2):
    """Full state evaluation: forward dynamics plus every recorded channel.

    Returns (ddq2, tau_J1, thrust, F_cr, P_drag, E_kin, E_pes).  The prefix
    repeats _rhs so both stay in lockstep with the compiled twin.
    """
    omega = par[P_OMEGA]
    a = par[P_CRANK]
    gr = par[P_REEL]
    lt1 = par[P_LT1]
    lc1 = par[P_LC1]
    lc2 = par[P_LC2]
    mu1 = par[P_MU1]
    mu2 = par[P_MU2]
    i1 = par[P_I1]
    i2 = par[P_I2]

    phim = omega * t
    sm = math.sin(phim)
    cm = math.cos(phim)
    u = a * sm
    w2 = 1.0 - u * u
    w = math.sqrt(w2)
    dphid = a * omega * cm / w
    ddphid = -a * omega * omega * sm / w + a * a * omega * omega * cm * cm * u / (w2 * w)
    beta = gr * math.asin(u)
    dbeta = gr * dphid
    ddbeta = gr * ddphid
    q1 = 0.5 * beta
    dq1 = 0.5 * dbeta
    ddq1 = 0.5 * ddbeta

    if beta < _CHORD_CUTOFF and beta > -_CHORD_CUTOFF:
        b2 = beta * beta
        g = 1.0 - b2 / 24.0 + b2 * b2 / 1920.0
        gp = -beta / 12.0 + beta * b2 / 480.0
        gpp = -1.0 / 12.0 + b2 / 160.0
    else:
        sb = math.sin(0.5 * beta)
        cb = math.cos(0.5 * beta)
        g = 2.0 * sb / beta
        gp = cb / beta - 2.0 * sb / (beta * beta)
        gpp = -sb / (2.0 * beta) - 2.0 * cb / (beta * beta) + 4.0 * sb / (beta * beta * beta)
    l1 = lt1 * g
    dl1 = lt1 * gp * dbeta
    ddl1 = lt1 * (gpp * dbeta * dbeta + gp * ddbeta)

    s1 = math.sin(q1)
    c1 = math.cos(q1)
    th2 = q1 + q2
    s12 = math.sin(th2)
    c12 = math.cos(th2)
    s2 = math.sin(q2)
    c2 = math.cos(q2)
    dth2 = dq1 + dq2

    amu = mu2 * l1 * lc2
    m11 = mu1 * lc1 * lc1 + i1 + mu2 * (l1 * l1 + lc2 * lc2) + 2.0 * amu * c2 + i2
    m12 = mu2 * lc2 * lc2 + amu * c2 + i2
    m22 = mu2 * lc2 * lc2 + i2

    v1x = -lc1 * s1 * dq1
    v1y = lc1 * c1 * dq1
    v2x = -l1 * s1 * dq1 - lc2 * s12 * dth2 + dl1 * c1
    v2y = l1 * c1 * dq1 + lc2 * c12 * dth2 + dl1 * s1

    u1x = c1 * v1x + s1 * v1y
    u1y = -s1 * v1x + c1 * v1y
    u2x = c12 * v2x + s12 * v2y
    u2y = -s12 * v2x + c12 * v2y

    rho = par[P_RHO]
    f1xl = -0.5 * rho * par[P_CF1] * (par[P_SX1] * g) * u1x * abs(u1x)
    f1yl = -0.5 * rho * par[P_CD1] * (par[P_SY1] * g) * u1y * abs(u1y)
    f2xl = -0.5 * rho * par[P_CF2] * par[P_SX2] * u2x * abs(u2x)
    f2yl = -0.5 * rho * par[P_CD2] * par[P_SY2] * u2y * abs(u2y)

    fd1x = c1 * f1xl - s1 * f1yl
    fd1y = s1 * f1xl + c1 * f1yl
    fd2x = c12 * f2xl - s12 * f2yl
    fd2y = s12 * f2xl + c12 * f2yl

    r1x = lc1 * c1
    r1y = lc1 * s1
    ox = l1 * c1
    oy = l1 * s1
    r2x = ox + lc2 * c12
    r2y = oy + lc2 * s12
    taud1 = r1x * fd1y - r1y * fd1x + r2x * fd2y - r2y * fd2x
    taud2 = (r2x - ox) * fd2y - (r2y - oy) * fd2x

    adot = mu2 * dl1 * lc2
    h1 = (-2.0 * amu * s2 * dq1 * dq2 - amu * s2 * dq2 * dq2
          + 2.0 * mu2 * l1 * dl1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2)
    h2 = amu * s2 * dq1 * dq1 + 2.0 * adot * c2 * dq1 - mu2 * lc2 * ddl1 * s2
    ths = q2 - q1
    spring = par[P_K2] * ths

    ddq2 = (taud2 - spring - h2 - m12 * ddq1) / m22
    tau_j1 = m11 * ddq1 + m12 * ddq2 + h1 - spring - taud1

    ddth2 = ddq1 + ddq2
    a1x = -lc1 * (c1 * dq1 * dq1 + s1 * ddq1)
    a1y = lc1 * (c1 * ddq1 - s1 * dq1 * dq1)
    a2x = (-l1 * s1 * ddq1 - l1 * c1 * dq1 * dq1 - lc2 * (s12 * ddth2 + c12 * dth2 * dth2)
           + ddl1 * c1 - 2.0 * dl1 * s1 * dq1)
    a2y = (l1 * c1 * ddq1 - l1 * s1 * dq1 * dq1 + lc2 * (c12 * ddth2 - s12 * dth2 * dth2)
           + ddl1 * s1 + 2.0 * dl1 * c1 * dq1)

    fa1x = -par[P_MA1] * a1x
    fa1y = -par[P_MA1] * a1y
    fa2x = -par[P_MA2] * a2x
    fa2y = -par[P_MA2] * a2y

    thrust = fa1x + fd1x + fa2x + fd2x
    f_cr = c1 * (fa2x + fd2x) + s1 * (fa2y + fd2y)
    p_drag = fd1x * v1x + fd1y * v1y + fd2x * v2x + fd2y * v2y
    e_kin = 0.5 * (par[P_M1] * (v1x * v1x + v1y * v1y) + i1 * dq1 * dq1
                   + par[P_M2] * (v2x * v2x + v2y * v2y) + i2 * dth2 * dth2)
    e_pes = 0.5 * par[P_K2] * ths * ths
    return ddq2, tau_j1, thrust, f_cr, p_drag, e_kin, e_pes


def _step(par, t, dt, q2, dq2):
    """One classical fourth-order step of (q2, dq2)."""
    k1v = _rhs(par, t, q2, dq2)
    half = 0.5 * dt
    th = t + half
    k2q = dq2 + half * k1v
    k2v = _rhs(par, th, q2 + half * dq2, k2q)
    k3q = dq2 + half * k2v
    k3v = _rhs(par, th, q2 + half * k2q, k3q)
    te = t + dt
    k4q = dq2 + dt * k3v
    k4v = _rhs(par, te, q2 + dt * k3q, k4q)
    q2n = q2 + dt * (dq2 + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
    dq2n = dq2 + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
    return q2n, dq2n


def step_once(par, t, dt, q2, dq2):
    """Public single step; used by the step operation and integrator tests."""
    return _step(tuple(map(float, par)), t, dt, q2, dq2)


def run_cycle(par, n0, dt, spc, q2, dq2):
    """Integrate one swing cycle (spc steps starting at step index n0).

    Returns (q2, dq2, rms) where rms is the root mean square of q2 over the
    step-start samples of the cycle, used for steady-state detection.
    """
    par = tuple(map(float, par))  # plain-float access is much faster here
    acc = 0.0
    for k in range(spc):
        t = (n0 + k) * dt
        acc += q2 * q2
        q2, dq2 = _step(par, t, dt, q2, dq2)
    return q2, dq2, math.sqrt(acc / spc)


def run_recorded(par, n0, dt, spc, n_cycles, q2, dq2, out):
    """Integrate n_cycles cycles, recording every channel at step starts.

    ``out`` is a (N_RECORD, spc*n_cycles) float array filled in place.
    Returns the advanced (q2, dq2).
    """
    par = tuple(map(float, par))
    n = spc * n_cycles
    row_q2, row_dq2, row_ddq2 = out[R_Q2], out[R_DQ2], out[R_DDQ2]
    row_tau, row_thr, row_fcr = out[R_TAU_J1], out[R_THRUST], out[R_FCR]
    row_pd, row_ek, row_ep = out[R_PDRAG], out[R_EKIN], out[R_EPES]
    for k in range(n):
        t = (n0 + k) * dt
        ddq2, tau_j1, thrust, f_cr, p_drag, e_kin, e_pes = eval_full(par, t, q2, dq2)
        row_q2[k] = q2
        row_dq2[k] = dq2
        row_ddq2[k] = ddq2
        row_tau[k] = tau_j1
        row_thr[k] = thrust
        row_fcr[k] = f_cr
        row_pd[k] = p_drag
        row_ek[k] = e_kin
        row_ep[k] = e_pes
        q2, dq2 = _step(par, t, dt, q2, dq2)
    return q2, dq2
