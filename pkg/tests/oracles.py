"""Independent numerical oracles used by the test suite.

Everything here recomputes physics from first principles (position maps,
energies, finite differences) without touching the production EOM assembly,
so agreement is meaningful.
"""

import math

import numpy as np

from wiretail.transmission import drive_state


def make_lagrangian(cfg, k2: float, omega: float):
    """L(q, dq, t) assembled from the position map: effective-mass kinetic
    energy (structural plus added mass) minus the caudal joint energy."""
    b = cfg.body
    mu1, mu2 = b.m1 + b.ma1, b.m2 + b.ma2

    def lagrangian(q, dq, t):
        ds = drive_state(t, omega, cfg.transmission, cfg.aes)
        q1, q2 = q
        dq1, dq2 = dq
        v1 = np.array([-b.lc1 * math.sin(q1) * dq1, b.lc1 * math.cos(q1) * dq1])
        v2 = np.array([
            -ds.l1 * math.sin(q1) * dq1
            - b.lc2 * math.sin(q1 + q2) * (dq1 + dq2) + ds.dl1 * math.cos(q1),
            ds.l1 * math.cos(q1) * dq1
            + b.lc2 * math.cos(q1 + q2) * (dq1 + dq2) + ds.dl1 * math.sin(q1),
        ])
        e_k = 0.5 * (mu1 * v1 @ v1 + b.I1 * dq1 ** 2
                     + mu2 * v2 @ v2 + b.I2 * (dq1 + dq2) ** 2)
        e_p = 0.5 * k2 * (q2 - q1) ** 2
        return e_k - e_p

    return lagrangian


def euler_lagrange_fd(lagrangian, q, dq, ddq, t,
                      d_dq: float = 1e-5, d_q: float = 1e-6, h: float = 3e-4):
    """Euler-Lagrange left side d/dt(dL/ddq) - dL/dq by central differences.

    The total time derivative follows the trajectory implied by (dq, ddq).
    """
    q = np.asarray(q, float)
    dq = np.asarray(dq, float)
    ddq = np.asarray(ddq, float)

    def momentum(qv, dqv, tv, i):
        e = np.zeros(2)
        e[i] = d_dq
        return (lagrangian(qv, dqv + e, tv) - lagrangian(qv, dqv - e, tv)) / (2 * d_dq)

    out = np.empty(2)
    qp = q + dq * h + 0.5 * ddq * h * h
    qm = q - dq * h + 0.5 * ddq * h * h
    dp = dq + ddq * h
    dm = dq - ddq * h
    for i in range(2):
        dpdt = (momentum(qp, dp, t + h, i) - momentum(qm, dm, t - h, i)) / (2 * h)
        e = np.zeros(2)
        e[i] = d_q
        dLdq = (lagrangian(q + e, dq, t) - lagrangian(q - e, dq, t)) / (2 * d_q)
        out[i] = dpdt - dLdq
    return out


def dominant_bin(x: np.ndarray) -> int:
    """Index of the strongest nonzero FFT bin of a real signal."""
    spec = np.abs(np.fft.rfft(np.asarray(x) - np.asarray(x).mean()))
    return int(np.argmax(spec[1:])) + 1
