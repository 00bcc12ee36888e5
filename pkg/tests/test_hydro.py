import math

import numpy as np
import pytest

from wiretail.hydro import (
    axial_fin_force,
    drag_force,
    generalized_hydro_torques,
    link_accelerations,
    link_positions,
    link_velocities,
    rotation_matrix,
    thrust,
    total_hydro_force,
)
from wiretail.transmission import drive_state

OMEGA = 2.0 * math.pi * 4.0


def random_state(cfg, rng):
    t = rng.uniform(0.0, 0.25)
    ds = drive_state(t, OMEGA, cfg.transmission, cfg.aes)
    q = np.array([0.5 * ds.beta, rng.uniform(-0.6, 0.6)])
    dq = np.array([0.5 * ds.dbeta, rng.uniform(-15.0, 15.0)])
    ddq = np.array([0.5 * ds.ddbeta, rng.uniform(-400.0, 400.0)])
    return q, dq, ddq, ds


def test_rotation_matrices_orthonormal(rng):
    for theta in rng.uniform(-math.pi, math.pi, size=50):
        R = rotation_matrix(theta)
        np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)


def test_zero_velocity_gives_zero_drag(cfg):
    ds = drive_state(0.0, OMEGA, cfg.transmission, cfg.aes)
    ds_still = type(ds)(**{**ds.__dict__, "dbeta": 0.0, "dl1": 0.0})
    for link in (1, 2):
        f = drag_force(link, (0.0, 0.0), (0.0, 0.0), ds_still, cfg.body)
        np.testing.assert_allclose(f, 0.0, atol=1e-15)


def test_pure_axial_motion_drag(cfg):
    # straight tail moving axially: force anti-parallel, magnitude rho/2*cf*Sx*v^2
    ds = drive_state(0.0, OMEGA, cfg.transmission, cfg.aes)
    v_ax = 0.7
    ds_mov = type(ds)(**{**ds.__dict__, "dl1": v_ax, "dbeta": 0.0})
    f = drag_force(2, (0.0, 0.0), (0.0, 0.0), ds_mov, cfg.body)
    expect = -0.5 * cfg.body.rho * cfg.body.cf2 * cfg.body.Sx2 * v_ax * v_ax
    np.testing.assert_allclose(f, [expect, 0.0, 0.0], atol=1e-14)


def test_drag_against_stepwise_matrix_oracle(cfg, rng):
    """Brute-force oracle: Jacobian velocity + chord-rate term, explicit 3x3
    rotations, componentwise law in the link frame, rotate back."""
    for _ in range(40):
        q, dq, ddq, ds = random_state(cfg, rng)
        for link in (1, 2):
            theta = q[0] if link == 1 else q[0] + q[1]
            c, s = math.cos(theta), math.sin(theta)
            R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
            if link == 1:
                J = np.array([[-cfg.body.lc1 * math.sin(q[0]), 0.0],
                              [cfg.body.lc1 * math.cos(q[0]), 0.0],
                              [0.0, 0.0]])
                v = J @ dq
                sx = cfg.body.Sx1 * ds.chord_scale
                sy = cfg.body.Sy1 * ds.chord_scale
                cf, cd = cfg.body.cf1, cfg.body.cd1
            else:
                s1, c1 = math.sin(q[0]), math.cos(q[0])
                s12, c12 = math.sin(q[0] + q[1]), math.cos(q[0] + q[1])
                J = np.array([
                    [-ds.l1 * s1 - cfg.body.lc2 * s12, -cfg.body.lc2 * s12],
                    [ds.l1 * c1 + cfg.body.lc2 * c12, cfg.body.lc2 * c12],
                    [0.0, 0.0]])
                v = J @ dq + ds.dl1 * np.array([c1, s1, 0.0])
                sx, sy = cfg.body.Sx2, cfg.body.Sy2
                cf, cd = cfg.body.cf2, cfg.body.cd2
            vl = R.T @ v
            f_local = np.array([
                -0.5 * cfg.body.rho * cf * sx * vl[0] * abs(vl[0]),
                -0.5 * cfg.body.rho * cd * sy * vl[1] * abs(vl[1]),
                0.0])
            expected = R @ f_local
            np.testing.assert_allclose(
                drag_force(link, q, dq, ds, cfg.body), expected, rtol=1e-12, atol=1e-14)


def test_drag_power_non_positive(cfg, rng):
    for _ in range(100):
        q, dq, ddq, ds = random_state(cfg, rng)
        v1, v2 = link_velocities(q, dq, ds, cfg.body)
        p = (drag_force(1, q, dq, ds, cfg.body) @ v1
             + drag_force(2, q, dq, ds, cfg.body) @ v2)
        assert p <= 1e-12


def test_generalized_torques_vanish_at_rest(cfg):
    ds = drive_state(0.0, OMEGA, cfg.transmission, cfg.aes)
    ds_still = type(ds)(**{**ds.__dict__, "dbeta": 0.0, "ddbeta": 0.0,
                           "dl1": 0.0, "ddl1": 0.0})
    t1, t2 = generalized_hydro_torques((0.1, -0.2), (0.0, 0.0), (0.0, 0.0),
                                       ds_still, cfg.body)
    assert t1 == pytest.approx(0.0, abs=1e-12)
    assert t2 == pytest.approx(0.0, abs=1e-12)


def test_torques_against_planar_moment_oracle(cfg, rng):
    # scalar 2-D moment x*Fy - y*Fx instead of the 3-vector cross product
    for _ in range(40):
        q, dq, ddq, ds = random_state(cfg, rng)
        r1, r2, r_o2 = link_positions(q, ds, cfg.body)
        f1 = total_hydro_force(1, q, dq, ddq, ds, cfg.body)
        f2 = total_hydro_force(2, q, dq, ddq, ds, cfg.body)
        m1 = r1[0] * f1[1] - r1[1] * f1[0] + r2[0] * f2[1] - r2[1] * f2[0]
        m2 = (r2[0] - r_o2[0]) * f2[1] - (r2[1] - r_o2[1]) * f2[0]
        t1, t2 = generalized_hydro_torques(q, dq, ddq, ds, cfg.body)
        assert t1 == pytest.approx(m1, rel=1e-12, abs=1e-14)
        assert t2 == pytest.approx(m2, rel=1e-12, abs=1e-14)


def test_fin_force_at_joint_gives_zero_joint_torque(cfg, rng):
    # moment arm vanishes when the fin center of mass sits at the joint
    q, dq, ddq, ds = random_state(cfg, rng)
    body = type(cfg.body)(**{**cfg.body.__dict__, "lc2": 1e-12})
    _, t2 = generalized_hydro_torques(q, dq, ddq, ds, body)
    assert t2 == pytest.approx(0.0, abs=1e-9)


def test_axial_fin_force_zero_motion(cfg):
    ds = drive_state(0.0, OMEGA, cfg.transmission, cfg.aes)
    ds_still = type(ds)(**{**ds.__dict__, "dbeta": 0.0, "ddbeta": 0.0,
                           "dl1": 0.0, "ddl1": 0.0})
    assert axial_fin_force((0.0, 0.0), (0.0, 0.0), (0.0, 0.0), ds_still,
                           cfg.body) == pytest.approx(0.0, abs=1e-14)


def test_axial_fin_force_is_link1_axial_projection(cfg, rng):
    for _ in range(20):
        q, dq, ddq, ds = random_state(cfg, rng)
        f2 = total_hydro_force(2, q, dq, ddq, ds, cfg.body)
        expected = math.cos(q[0]) * f2[0] + math.sin(q[0]) * f2[1]
        assert axial_fin_force(q, dq, ddq, ds, cfg.body) == pytest.approx(
            expected, rel=1e-12, abs=1e-12)


def test_lateral_force_projects_to_zero_axial_load(cfg):
    # a force along the link-1 lateral axis carries no axial column load
    theta1 = 0.27
    f_lateral = 3.7 * np.array([-math.sin(theta1), math.cos(theta1), 0.0])
    R1 = rotation_matrix(theta1)
    assert (R1.T @ f_lateral)[0] == pytest.approx(0.0, abs=1e-15)


def test_thrust_equals_sum_of_world_x(cfg, rng):
    q, dq, ddq, ds = random_state(cfg, rng)
    f1 = total_hydro_force(1, q, dq, ddq, ds, cfg.body)
    f2 = total_hydro_force(2, q, dq, ddq, ds, cfg.body)
    assert thrust(q, dq, ddq, ds, cfg.body) == pytest.approx(f1[0] + f2[0], rel=1e-12)


def test_thrust_mirror_symmetry(cfg, rng):
    # half-period mirror state: all angles, rates and accelerations negated,
    # drive state taken half a period later; thrust is unchanged.
    T = 2.0 * math.pi / OMEGA
    for k in range(12):
        t = (k + 0.37) * T / 12.0
        ds_a = drive_state(t, OMEGA, cfg.transmission, cfg.aes)
        ds_b = drive_state(t + T / 2.0, OMEGA, cfg.transmission, cfg.aes)
        q2, dq2, ddq2 = 0.31, -4.2, 120.0
        qa = (0.5 * ds_a.beta, q2)
        qb = (0.5 * ds_b.beta, -q2)
        dqa = (0.5 * ds_a.dbeta, dq2)
        dqb = (0.5 * ds_b.dbeta, -dq2)
        dda = (0.5 * ds_a.ddbeta, ddq2)
        ddb = (0.5 * ds_b.ddbeta, -ddq2)
        ta = thrust(qa, dqa, dda, ds_a, cfg.body)
        tb = thrust(qb, dqb, ddb, ds_b, cfg.body)
        assert tb == pytest.approx(ta, rel=1e-9, abs=1e-12)


def test_added_mass_force_matches_acceleration(cfg, rng):
    q, dq, ddq, ds = random_state(cfg, rng)
    a1, a2 = link_accelerations(q, dq, ddq, ds, cfg.body)
    from wiretail.hydro import added_mass_force
    np.testing.assert_allclose(added_mass_force(1, q, dq, ddq, ds, cfg.body),
                               -cfg.body.ma1 * a1, rtol=1e-14)
    np.testing.assert_allclose(added_mass_force(2, q, dq, ddq, ds, cfg.body),
                               -cfg.body.ma2 * a2, rtol=1e-14)


def test_link_acceleration_against_velocity_differences(cfg, rng):
    for _ in range(10):
        t0 = rng.uniform(0.01, 0.2)
        q2, dq2, ddq2 = rng.uniform(-0.4, 0.4), rng.uniform(-8, 8), rng.uniform(-200, 200)
        h = 1e-6

        def vel(dt_):
            ds = drive_state(t0 + dt_, OMEGA, cfg.transmission, cfg.aes)
            q = (0.5 * ds.beta, q2 + dq2 * dt_ + 0.5 * ddq2 * dt_ * dt_)
            dq = (0.5 * ds.dbeta, dq2 + ddq2 * dt_)
            return link_velocities(q, dq, ds, cfg.body)

        ds0 = drive_state(t0, OMEGA, cfg.transmission, cfg.aes)
        a1, a2 = link_accelerations((0.5 * ds0.beta, q2), (0.5 * ds0.dbeta, dq2),
                                    (0.5 * ds0.ddbeta, ddq2), ds0, cfg.body)
        v1p, v2p = vel(h)
        v1m, v2m = vel(-h)
        np.testing.assert_allclose(a1, (v1p - v1m) / (2 * h), rtol=1e-5, atol=1e-5)
        np.testing.assert_allclose(a2, (v2p - v2m) / (2 * h), rtol=1e-5, atol=1e-5)


def test_link_force_record(cfg, rng):
    from wiretail.hydro import link_force

    q, dq, ddq, ds = random_state(cfg, rng)
    rec = link_force(2, q, dq, ddq, ds, cfg.body)
    np.testing.assert_allclose(rec.total, rec.added_mass + rec.drag, rtol=1e-15)
    np.testing.assert_allclose(rec.total, total_hydro_force(2, q, dq, ddq, ds, cfg.body),
                               rtol=1e-14)
    r1, r2, _ = link_positions(q, ds, cfg.body)
    np.testing.assert_allclose(rec.point, r2, rtol=1e-15)
    assert rec.added_mass[2] == 0.0
