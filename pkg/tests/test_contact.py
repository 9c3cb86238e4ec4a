import math

import numpy as np
import pytest

from toolbench.contact import contact_force, grinding_vibration, removal_step
from toolbench.engine import RigidPoint
from toolbench.geometry import BeadField, Plane, Workpiece, vec3


def make_workpiece(**kw):
    beads = BeadField(-0.05, 0.05, -0.05, 0.05, 0.001)
    return Workpiece(Plane(vec3(0, 0, 0), vec3(0, 0, 1)), beads, **kw)


def tool(pos, vel=(0, 0, 0), mass=2.0):
    return RigidPoint(vec3(*pos), vec3(*vel), mass)


class TestContactForce:
    def test_separation_no_force(self):
        wp = make_workpiece()
        c = contact_force(wp, tool((0, 0, 0.001)))
        assert not c.in_contact
        assert c.penetration == 0.0
        assert np.allclose(c.force_env, 0.0)

    def test_static_penetration_spring_force(self):
        # delta = 1 mm, k = 2e4, static, mu = 0 -> 20 N (scalar k*delta)
        wp = make_workpiece(friction_mu=0.0)
        c = contact_force(wp, tool((0, 0, -0.001)))
        assert c.in_contact
        assert c.penetration == pytest.approx(0.001)
        assert c.normal_force == pytest.approx(20.0)
        assert np.allclose(c.force_env, [0, 0, 20.0])

    def test_fast_retreat_clamps_to_zero(self):
        # k*delta - b*v < 0 while separating -> exactly 0 (surface never pulls)
        wp = make_workpiece(friction_mu=0.0)
        c = contact_force(wp, tool((0, 0, -0.001), vel=(0, 0, 1.0)))
        assert c.in_contact  # geometric overlap remains
        assert c.normal_force == 0.0
        assert np.allclose(c.force_env, 0.0)

    def test_friction_opposes_sliding(self):
        wp = make_workpiece(friction_mu=0.3)
        c = contact_force(wp, tool((0, 0, -0.001), vel=(0.02, 0, 0)))
        fn = c.normal_force
        tang = c.force_env - fn * c.normal
        assert tang[0] == pytest.approx(-0.3 * fn)
        assert abs(tang[1]) < 1e-12 and abs(tang[2]) < 1e-12

    def test_friction_deadband(self):
        wp = make_workpiece(friction_mu=0.3, tangential_deadband=1e-4)
        c = contact_force(wp, tool((0, 0, -0.001), vel=(5e-5, 0, 0)))
        tang = c.force_env - c.normal_force * c.normal
        assert np.allclose(tang, 0.0)

    def test_unilaterality_over_random_states(self):
        wp = make_workpiece()
        rng = np.random.default_rng(11)
        for _ in range(500):
            pos = rng.uniform([-0.02, -0.02, -0.003], [0.02, 0.02, 0.003])
            vel = rng.uniform(-0.5, 0.5, size=3)
            c = contact_force(wp, tool(pos, vel))
            assert c.normal_force >= 0.0
            if c.penetration == 0.0:
                assert not c.in_contact
                assert np.allclose(c.force_env, 0.0)
            else:
                assert c.in_contact


class TestRemovalStep:
    def test_zero_force_no_removal(self):
        wp = make_workpiece()
        wp.beads.heights[:] = 0.002
        c = contact_force(wp, tool((0, 0, 0.003)))   # 1 mm above the beaded surface
        assert removal_step(wp, c, vec3(0.02, 0, 0), 1e-3) == 0.0

    def test_zero_speed_no_removal(self):
        wp = make_workpiece(friction_mu=0.0)
        c = contact_force(wp, tool((0, 0, -0.001)))
        assert removal_step(wp, c, vec3(0, 0, 0), 1e-3) == 0.0

    def test_preston_law_single_cell_oracle(self):
        # scalar oracle of dh = preston_k * (f_n / A_tool) * v_t * dt on a
        # one-cell footprint
        preston, radius = 1e-9, 0.0004
        wp = make_workpiece(friction_mu=0.0, preston_k=preston, tool_radius=radius)
        wp.beads.heights[:] = 0.002
        before = wp.beads.heights.copy()
        slave = tool((0, 0, -0.0005 - 0.002))  # 0.5 mm into the beaded surface
        c = contact_force(wp, slave)
        fn = c.normal_force
        v = 0.02
        dt = 1e-3
        area = math.pi * radius * radius
        dh_expected = preston * (fn / area) * v * dt
        removed = removal_step(wp, c, vec3(v, 0, 0), dt)
        diff = before - wp.beads.heights
        changed = np.nonzero(diff)
        assert len(changed[0]) == 1  # exactly one cell in the footprint
        assert diff[changed][0] == pytest.approx(dh_expected, rel=1e-12)
        assert removed == pytest.approx(dh_expected * wp.beads.pitch**2, rel=1e-12)

    def test_example_magnitude(self):
        # f_n = 10 N, v = 0.02 m/s, preston 1e-9, dt 1 ms:
        # dh = 1e-9 * (10/A) * 0.02 * 1e-3 = 2e-13 / A
        preston, radius = 1e-9, 0.0004
        area = math.pi * radius * radius
        assert preston * (10.0 / area) * 0.02 * 1e-3 == pytest.approx(2e-13 / area)

    def test_removal_floors_at_zero(self):
        wp = make_workpiece(friction_mu=0.0, preston_k=1.0, tool_radius=0.002)
        wp.beads.heights[:] = 0.0001
        slave = tool((0, 0, -0.001))
        c = contact_force(wp, slave)
        removal_step(wp, c, vec3(0.02, 0, 0), 1e-3)
        assert np.all(wp.beads.heights >= 0.0)

    def test_cumulative_volume_non_decreasing(self):
        wp = make_workpiece(friction_mu=0.0, preston_k=1e-4)
        wp.beads.heights[:] = 0.002
        slave = tool((0, 0, -0.001))
        total = 0.0
        for _ in range(50):
            c = contact_force(wp, slave)
            r = removal_step(wp, c, vec3(0.02, 0, 0), 1e-3)
            assert r >= 0.0
            total += r
        assert total > 0.0

    def test_rejects_bad_dt(self):
        wp = make_workpiece()
        c = contact_force(wp, tool((0, 0, -0.001)))
        with pytest.raises(ValueError):
            removal_step(wp, c, vec3(0.02, 0, 0), 0.0)


class TestGrindingVibration:
    def test_zero_without_grinding(self):
        wp = make_workpiece(grind_vibration=0.15, preston_k=0.0)
        c = contact_force(wp, tool((0, 0, -0.001), vel=(0.02, 0, 0)))
        assert np.allclose(grinding_vibration(wp, c, tool((0, 0, -0.001), vel=(0.02, 0, 0)), 0.3), 0.0)

    def test_zero_when_static(self):
        wp = make_workpiece(grind_vibration=0.15, preston_k=1e-4)
        slave = tool((0, 0, -0.001))
        c = contact_force(wp, slave)
        assert np.allclose(grinding_vibration(wp, c, slave, 0.3), 0.0)

    def test_amplitude_saturates(self):
        wp = make_workpiece(friction_mu=0.0, grind_vibration=0.1, preston_k=1e-4,
                            grind_vibration_sat=10.0, grind_vibration_hz=15.0)
        slave = tool((0, 0, -0.005), vel=(0.02, 0, 0))  # 100 N engagement
        c = contact_force(wp, slave)
        t = 1.0 / 60.0  # sin(2*pi*15*t) = 1
        f = grinding_vibration(wp, c, slave, t)
        assert f[2] == pytest.approx(0.1 * 10.0 * math.sin(2 * math.pi * 15.0 * t))
