import numpy as np
import pytest

from toolbench.assist import SharedControlParams, VirtualFixture, fixture_wrench, shared_command
from toolbench.controllers import HybridGains
from toolbench.engine import RigidPoint
from toolbench.geometry import Plane, vec3


def flat_fixture(**kw):
    return VirtualFixture(Plane(vec3(0, 0, 0), vec3(0, 0, 1)), **kw)


def master_at(pos, vel=(0, 0, 0)):
    return RigidPoint(vec3(*pos), vec3(*vel), 0.5)


class TestFixtureWrench:
    def test_allowed_side_zero(self):
        vf = flat_fixture()
        assert np.allclose(fixture_wrench(vf, master_at((0.2, -0.1, 0.005))), 0.0)

    def test_restoring_spring(self):
        # 2 mm penetration, k = 5000, at rest -> 10 N push-back
        vf = flat_fixture(k=5000.0, b=0.0)
        f = fixture_wrench(vf, master_at((0, 0, -0.002)))
        assert np.allclose(f, [0, 0, 10.0])

    def test_damping_only_while_penetrating(self):
        vf = flat_fixture(k=5000.0, b=100.0)
        # approaching fast but still outside: no force at all
        assert np.allclose(fixture_wrench(vf, master_at((0, 0, 0.001), vel=(0, 0, -1.0))), 0.0)
        # inside and moving in: spring + damping both push back
        f = fixture_wrench(vf, master_at((0, 0, -0.002), vel=(0, 0, -0.1)))
        assert f[2] == pytest.approx(10.0 + 100.0 * 0.1)

    def test_keep_below_side(self):
        vf = flat_fixture(side="keep_below")
        f = fixture_wrench(vf, master_at((0, 0, 0.003)))
        assert f[2] < 0.0
        assert np.allclose(fixture_wrench(vf, master_at((0, 0, -0.003))), 0.0)

    def test_offset_shifts_wall(self):
        vf = flat_fixture(k=5000.0, offset=-0.001)
        # wall moved 1 mm below the surface: z = -0.5 mm is still allowed
        assert np.allclose(fixture_wrench(vf, master_at((0, 0, -0.0005))), 0.0)
        f = fixture_wrench(vf, master_at((0, 0, -0.002)))
        assert f[2] == pytest.approx(5000.0 * 0.001)

    def test_passive_over_closed_loop(self):
        # net work injected by the fixture over any closed master trajectory
        # is <= 0 (spring is conservative, damping only dissipates)
        vf = flat_fixture(k=5000.0, b=50.0)
        rng = np.random.default_rng(17)
        dt = 1e-3
        for _ in range(10):
            # closed smooth loop dipping in and out of the wall
            tt = np.linspace(0, 2 * np.pi, 2001)
            amp_z = rng.uniform(0.001, 0.004)
            amp_x = rng.uniform(0.0, 0.01)
            z = -amp_z * np.sin(tt)
            x = amp_x * np.sin(2 * tt)
            work = 0.0
            for i in range(len(tt) - 1):
                pos = vec3(x[i], 0, z[i])
                vel = vec3((x[i + 1] - x[i]) / dt, 0, (z[i + 1] - z[i]) / dt)
                f = fixture_wrench(vf, RigidPoint(pos, vel, 0.5))
                dx = vec3(x[i + 1] - x[i], 0, z[i + 1] - z[i])
                work += float(np.dot(f, dx))
            assert work <= 1e-9


class TestSharedCommand:
    def setup_method(self):
        self.params = SharedControlParams(
            press_dir=vec3(0, 0, -1), f_d=10.0, gains=HybridGains(kfp=2e-3, kfi=4e-3)
        )

    def test_dual_setpoint_equilibrium(self):
        # measured tool force exactly at the setpoint, no lateral command
        f_meas = 10.0 * vec3(0, 0, -1)
        v = shared_command(self.params, vec3(0, 0, 0), f_meas, vec3(0, 0, 0))
        assert np.allclose(v, 0.0, atol=1e-15)

    def test_lateral_transparency_exact(self):
        rng = np.random.default_rng(23)
        s = self.params.selection
        for _ in range(200):
            v_teleop = rng.normal(size=3) * 0.05
            f_meas = rng.normal(size=3) * 20.0
            integ = rng.normal(size=3)
            v = shared_command(self.params, v_teleop, f_meas, integ)
            lateral_cmd = s.project_complement(v)
            lateral_in = s.project_complement(v_teleop)
            assert np.max(np.abs(lateral_cmd - lateral_in)) < 1e-12

    def test_normal_autonomy_independent_of_teleop(self):
        rng = np.random.default_rng(24)
        s = self.params.selection
        f_meas = vec3(0.3, -0.2, -6.0)
        integ = vec3(0.1, 0.0, -2.0)
        ref = s.project(shared_command(self.params, vec3(0, 0, 0), f_meas, integ))
        for _ in range(100):
            v = shared_command(self.params, rng.normal(size=3), f_meas, integ)
            assert np.array_equal(s.project(v), ref)

    def test_underpressing_commands_into_surface(self):
        v = shared_command(self.params, vec3(0, 0, 0), vec3(0, 0, 0), vec3(0, 0, 0))
        assert v[2] < 0.0  # presses toward the surface when force is short

    def test_lateral_example(self):
        v = shared_command(self.params, vec3(0.01, 0, 0), vec3(0, 0, -3.0), vec3(0, 0, 0))
        assert v[0] == pytest.approx(0.01, abs=1e-15)
        assert v[1] == 0.0
