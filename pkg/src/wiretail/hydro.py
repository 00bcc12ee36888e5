"""Morison-type hydrodynamics of the two tail links.

Forces per link split into an added-mass part, -ma * a_cm, and quadratic
drag evaluated componentwise in the link frame and rotated to the world
frame.  Link-1 characteristic areas scale with the instantaneous chord
length (area proportional to length); link-2 areas are fixed.

All velocities and accelerations here are the true center-of-mass values,
including the contribution of the time-varying chord length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TailBodyParams
from .transmission import DriveState

K_HAT = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class LinkForce:
    """Hydrodynamic load on one link, world frame, applied at its center of mass."""

    added_mass: np.ndarray  # -ma * a_cm [N]
    drag: np.ndarray        # quadratic drag [N]
    point: np.ndarray       # center of mass position [m]

    @property
    def total(self) -> np.ndarray:
        return self.added_mass + self.drag


def rotation_matrix(theta: float) -> np.ndarray:
    """World rotation of a link frame at absolute angle theta (about Z)."""
    s, c = np.sin(theta), np.cos(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def link_positions(q, ds: DriveState, body: TailBodyParams):
    """World positions (3-vectors) of both link centers of mass and of O2."""
    q1, q2 = float(q[0]), float(q[1])
    s1, c1 = np.sin(q1), np.cos(q1)
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    r1 = np.array([body.lc1 * c1, body.lc1 * s1, 0.0])
    r_o2 = np.array([ds.l1 * c1, ds.l1 * s1, 0.0])
    r2 = r_o2 + np.array([body.lc2 * c12, body.lc2 * s12, 0.0])
    return r1, r2, r_o2


def link_velocities(q, dq, ds: DriveState, body: TailBodyParams):
    """True world center-of-mass velocities of both links.

    Link 2 picks up the chord-rate term dl1 along the link-1 axis on top of
    the Jacobian part.
    """
    q1, q2 = float(q[0]), float(q[1])
    dq1, dq2 = float(dq[0]), float(dq[1])
    s1, c1 = np.sin(q1), np.cos(q1)
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    dth2 = dq1 + dq2
    v1 = np.array([-body.lc1 * s1 * dq1, body.lc1 * c1 * dq1, 0.0])
    v2 = np.array([
        -ds.l1 * s1 * dq1 - body.lc2 * s12 * dth2 + ds.dl1 * c1,
        ds.l1 * c1 * dq1 + body.lc2 * c12 * dth2 + ds.dl1 * s1,
        0.0,
    ])
    return v1, v2


def link_accelerations(q, dq, ddq, ds: DriveState, body: TailBodyParams):
    """True world center-of-mass accelerations of both links."""
    q1, q2 = float(q[0]), float(q[1])
    dq1, dq2 = float(dq[0]), float(dq[1])
    ddq1, ddq2 = float(ddq[0]), float(ddq[1])
    s1, c1 = np.sin(q1), np.cos(q1)
    s12, c12 = np.sin(q1 + q2), np.cos(q1 + q2)
    dth2 = dq1 + dq2
    ddth2 = ddq1 + ddq2
    lc1, lc2 = body.lc1, body.lc2
    l1, dl1, ddl1 = ds.l1, ds.dl1, ds.ddl1
    a1 = np.array([
        -lc1 * (c1 * dq1 * dq1 + s1 * ddq1),
        lc1 * (c1 * ddq1 - s1 * dq1 * dq1),
        0.0,
    ])
    a2 = np.array([
        -l1 * s1 * ddq1 - l1 * c1 * dq1 * dq1 - lc2 * (s12 * ddth2 + c12 * dth2 * dth2)
        + ddl1 * c1 - 2.0 * dl1 * s1 * dq1,
        l1 * c1 * ddq1 - l1 * s1 * dq1 * dq1 + lc2 * (c12 * ddth2 - s12 * dth2 * dth2)
        + ddl1 * s1 + 2.0 * dl1 * c1 * dq1,
        0.0,
    ])
    return a1, a2


def _areas(link: int, ds: DriveState, body: TailBodyParams):
    """Characteristic areas (S_x, S_y) of a link; link 1 scales with chord."""
    if link == 1:
        return body.Sx1 * ds.chord_scale, body.Sy1 * ds.chord_scale
    return body.Sx2, body.Sy2


def drag_force(link: int, q, dq, ds: DriveState, body: TailBodyParams) -> np.ndarray:
    """World-frame quadratic drag on one link (3-vector, zero Z component).

    Each link-frame component is -rho/2 * c * S * v * |v|; the axial (X_i)
    component uses the friction coefficient, the lateral (Y_i) the drag
    coefficient.
    """
    v1, v2 = link_velocities(q, dq, ds, body)
    theta = float(q[0]) if link == 1 else float(q[0]) + float(q[1])
    v = v1 if link == 1 else v2
    R = rotation_matrix(theta)
    v_local = R.T @ v
    sx, sy = _areas(link, ds, body)
    cf = body.cf1 if link == 1 else body.cf2
    cd = body.cd1 if link == 1 else body.cd2
    f_local = np.array([
        -0.5 * body.rho * cf * sx * v_local[0] * abs(v_local[0]),
        -0.5 * body.rho * cd * sy * v_local[1] * abs(v_local[1]),
        0.0,
    ])
    return R @ f_local


def added_mass_force(link: int, q, dq, ddq, ds: DriveState, body: TailBodyParams) -> np.ndarray:
    """World-frame added-mass force -ma * a_cm on one link."""
    a1, a2 = link_accelerations(q, dq, ddq, ds, body)
    ma = body.ma1 if link == 1 else body.ma2
    return -ma * (a1 if link == 1 else a2)


def link_force(link: int, q, dq, ddq, ds: DriveState, body: TailBodyParams) -> LinkForce:
    """Full hydrodynamic load record of one link."""
    r1, r2, _ = link_positions(q, ds, body)
    return LinkForce(
        added_mass=added_mass_force(link, q, dq, ddq, ds, body),
        drag=drag_force(link, q, dq, ds, body),
        point=r1 if link == 1 else r2,
    )


def total_hydro_force(link: int, q, dq, ddq, ds, body) -> np.ndarray:
    return (added_mass_force(link, q, dq, ddq, ds, body)
            + drag_force(link, q, dq, ds, body))


def generalized_hydro_torques(q, dq, ddq, ds: DriveState, body: TailBodyParams):
    """Generalized torques of the total hydro forces about O1 and O2.

    tau_1 takes the moment of both link forces about the tail root, tau_2
    only the moment of the fin force about the caudal joint.
    """
    r1, r2, r_o2 = link_positions(q, ds, body)
    f1 = total_hydro_force(1, q, dq, ddq, ds, body)
    f2 = total_hydro_force(2, q, dq, ddq, ds, body)
    tau1 = float(K_HAT @ (np.cross(r1, f1) + np.cross(r2, f2)))
    tau2 = float(K_HAT @ np.cross(r2 - r_o2, f2))
    return tau1, tau2


def generalized_drag_torques(q, dq, ds: DriveState, body: TailBodyParams):
    """Generalized torques of the drag forces alone (added mass excluded).

    This is the right-hand side of the equations of motion once added mass
    has been folded into the mass matrix.
    """
    r1, r2, r_o2 = link_positions(q, ds, body)
    f1 = drag_force(1, q, dq, ds, body)
    f2 = drag_force(2, q, dq, ds, body)
    tau1 = float(K_HAT @ (np.cross(r1, f1) + np.cross(r2, f2)))
    tau2 = float(K_HAT @ np.cross(r2 - r_o2, f2))
    return tau1, tau2


def axial_fin_force(q, dq, ddq, ds: DriveState, body: TailBodyParams) -> float:
    """Axial (X_1) component of the caudal-fin hydro force.

    This is the column load on the bent spine segment; its steady-state
    cycle peak feeds the buckling lower bound on the spine stiffness.
    """
    f2 = total_hydro_force(2, q, dq, ddq, ds, body)
    R1 = rotation_matrix(float(q[0]))
    return float((R1.T @ f2)[0])


def thrust(q, dq, ddq, ds: DriveState, body: TailBodyParams) -> float:
    """World-X component of the total hydro force on both links.

    Negative values push the body forward (toward -X).
    """
    f1 = total_hydro_force(1, q, dq, ddq, ds, body)
    f2 = total_hydro_force(2, q, dq, ddq, ds, body)
    return float(f1[0] + f2[0])
