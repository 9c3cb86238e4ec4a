"""Acceptance suite: one test per release criterion, each at its pinned
tolerance, printing a PASS line when it holds.

Scenario-level criteria reuse the session-cached standard runs (each
scenario simulated once, wall-clock timed at creation).
"""

import asyncio
import json
import math

import numpy as np

import toolbench as tb
from toolbench.assist import SharedControlParams, shared_command
from toolbench.contact import contact_force
from toolbench.controllers import (
    AdmittanceParams,
    AdmittanceState,
    HybridGains,
    SelectionMatrix,
    admittance_step,
    hybrid_command,
)
from toolbench.engine import RigidPoint, SimState, integrate_step
from toolbench.geometry import BeadField, Plane, Workpiece, vec3
from toolbench.runner import replay_session, run_scenario
from toolbench.scenarios import golden_hashes
from toolbench.sigproc import band_energy, smooth_arma


def ok(line):
    print(f"[PASS] {line}")


def force_series(res):
    f = np.array([r.f_normal for r in res.records])
    t = np.array([r.t for r in res.records])
    return f, t


class TestHybridControlAccuracy:
    def test_force_regulation_and_path(self, hybrid_timed):
        res, seconds = hybrid_timed.result, hybrid_timed.seconds
        assert not res.fault
        f, t = force_series(res)
        settled = t >= 2.0
        worst = float(np.max(np.abs(f[settled] - 10.0)))
        assert worst < 0.1, f"|F_n - 10 N| reached {worst:.3f} N after settling"
        tan_rms = res.metrics.path_rms_inplane
        assert tan_rms < 1e-3, f"tangential path RMS {tan_rms * 1e3:.3f} mm"
        assert seconds < 5.0, f"hybrid scenario took {seconds:.2f} s"
        ok(f"hybrid accuracy: |F-10N| < {worst:.4f} N, tangential RMS "
           f"{tan_rms * 1e3:.3f} mm, runtime {seconds:.2f} s")


class TestProjectorAlgebra:
    def test_thousand_random_normals(self):
        rng = np.random.default_rng(2024)
        gains = HybridGains(kfp=3e-3, kfi=6e-3)
        for _ in range(1000):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            s = SelectionMatrix.from_normal(n)
            m = s.m
            assert np.max(np.abs(m - m.T)) <= 1e-12
            assert np.max(np.abs(m @ m - m)) <= 1e-12
            assert np.max(np.abs(m @ (np.eye(3) - m))) <= 1e-12
            v_d, f_e, integ = rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
            motion = s.project_complement(v_d)
            force = s.project(gains.kfp * f_e + gains.kfi * integ)
            assert abs(np.dot(motion, force)) <= 1e-12
            total = hybrid_command(s, v_d, f_e, integ, gains)
            assert np.max(np.abs(total - motion - force)) <= 1e-12
        ok("projector algebra: 1000 random normals, symmetry/idempotence/"
           "orthogonality within 1e-12")


class TestConfigurationOrdering:
    def test_force_and_bandwidth_orderings(self, standard_timed):
        m = {k: tr.result.metrics for k, tr in standard_timed.items()}
        res = {k: tr.result for k, tr in standard_timed.items()}

        assert m["C"].peak_normal_force > m["A"].peak_normal_force
        assert m["C"].peak_normal_force > m["B"].peak_normal_force
        assert m["A"].hf_band_energy > m["D"].hf_band_energy
        assert m["B"].hf_band_energy > m["D"].hf_band_energy

        for mode in ("A", "B", "D"):
            assert not res[mode].fault, f"mode {mode} must complete the pass"
            assert m[mode].contact_loss_max_s < 0.050, (
                f"mode {mode} lost contact for {m[mode].contact_loss_max_s * 1e3:.0f} ms"
            )
        c_fails = res["C"].fault or (
            m["C"].peak_normal_force > 3.0 * m["A"].peak_normal_force
        )
        assert c_fails, "stiff direct-reflection mode must fault or exceed 3x the compliant peak"

        total = sum(standard_timed[k].seconds for k in ("A", "B", "C", "D"))
        assert total < 30.0, f"four-mode comparison took {total:.1f} s"
        ok(f"configuration ordering: peak C({m['C'].peak_normal_force:.0f} N) > "
           f"A({m['A'].peak_normal_force:.0f}) and B({m['B'].peak_normal_force:.0f}); "
           f"HF A({m['A'].hf_band_energy:.2e}) and B({m['B'].hf_band_energy:.2e}) > "
           f"D({m['D'].hf_band_energy:.2e}); A/B/D loss < 50 ms; runtime {total:.1f} s")


class TestVirtualFixturePrecision:
    def test_z_rms_ratio(self, standard_runs):
        z_vf = standard_runs["VF"].metrics.path_rms_normal
        z_b = standard_runs["B"].metrics.path_rms_normal
        assert tb.flat_scenario("VF").operator.tremor_amplitude == 5e-4
        assert z_vf <= z_b / 5.0, f"VF z-RMS {z_vf * 1e3:.3f} mm vs B {z_b * 1e3:.3f} mm"
        ok(f"virtual fixture precision: z-RMS {z_vf * 1e3:.3f} mm <= "
           f"B/5 ({z_b * 1e3:.3f}/5 mm)")


class TestSharedControlForceQuality:
    def test_force_band_after_settling(self, standard_runs):
        res = standard_runs["SC"]
        f_d = res.config.shared.f_d
        f, t = force_series(res)
        window = (t >= 2.0) & (f >= 0.5)
        worst = float(np.max(np.abs(f[window] - f_d))) / f_d
        assert worst <= 0.05, f"normal force deviated {worst * 100:.2f}% from the setpoint"
        ok(f"shared control force quality: within {worst * 100:.2f}% of {f_d} N")

    def test_lateral_transparency_identity(self):
        params = SharedControlParams(press_dir=vec3(0, 0, -1), f_d=10.0,
                                     gains=HybridGains(8e-3, 4e-2))
        s = params.selection
        rng = np.random.default_rng(77)
        for _ in range(500):
            v_teleop = rng.normal(size=3) * 0.05
            f_meas = rng.normal(size=3) * 15.0
            integ = rng.normal(size=3)
            v = shared_command(params, v_teleop, f_meas, integ)
            lateral = s.project_complement(v) - s.project_complement(v_teleop)
            assert np.max(np.abs(lateral)) <= 1e-12
        ok("shared control lateral transparency: (I-S) command == (I-S) input "
           "within 1e-12 over 500 samples")


class TestAdmittanceDiscretization:
    def test_step_response_matches_analytic(self):
        m, b, k = 4.0, 120.0, 500.0
        params = AdmittanceParams(mass=m, damping=b, stiffness=k)
        step_to, dt, n = 0.01, 1e-3, 2000

        disc = math.sqrt(b * b - 4 * m * k)
        r1, r2 = (-b + disc) / (2 * m), (-b - disc) / (2 * m)
        c1 = step_to * r2 / (r1 - r2)
        c2 = -step_to * r1 / (r1 - r2)

        st = AdmittanceState(vec3(0, 0, 0), vec3(0, 0, 0))
        err2 = 0.0
        for i in range(1, n + 1):
            st = admittance_step(params, vec3(step_to, 0, 0), st, vec3(0, 0, 0), dt)
            analytic = step_to + c1 * math.exp(r1 * i * dt) + c2 * math.exp(r2 * i * dt)
            err2 += (st.x[0] - analytic) ** 2
        rms = math.sqrt(err2 / n) / step_to
        assert rms < 0.02, f"discretization RMS error {rms * 100:.2f}%"
        ok(f"admittance discretization: {rms * 100:.3f}% RMS vs analytic over 2 s")


class TestEnvironmentPassivity:
    def test_bounce_energy_never_increases(self):
        beads = BeadField(-0.1, 0.1, -0.1, 0.1, 0.01)
        wp = Workpiece(Plane(vec3(0, 0, 0), vec3(0, 0, 1)), beads,
                       friction_mu=0.0, preston_k=0.0)
        slave = RigidPoint(vec3(0, 0, 0.001), vec3(0, 0, -0.05), 2.0)
        master = RigidPoint(vec3(0, 0, 1.0), vec3(0, 0, 0), 0.5)
        st = SimState(slave=slave, master=master, mode="A", dt=1e-3)
        st.contact = contact_force(wp, slave)

        def energy():
            v2 = float(np.dot(st.slave.vel, st.slave.vel))
            return 0.5 * 2.0 * v2 + 0.5 * wp.stiffness * st.contact.penetration**2

        zero = vec3(0, 0, 0)
        e_prev, in_contact_prev = energy(), st.contact.in_contact
        worst = -np.inf
        for _ in range(3000):
            integrate_step(st, wp, zero, zero, 1e-3)
            e = energy()
            if st.contact.in_contact == in_contact_prev:
                worst = max(worst, e - e_prev)
                assert e - e_prev <= 1e-6
            e_prev, in_contact_prev = e, st.contact.in_contact
        ok(f"environment passivity: worst per-step energy change {worst:.2e} J <= 1e-6 J")


class TestDeterminismAndReplay:
    def test_standard_scenarios_rerun_identical(self, standard_runs):
        stored = golden_hashes()
        for mode, first in standard_runs.items():
            name = f"flat_{mode.lower()}"
            second = run_scenario(tb.flat_scenario(mode))
            assert first.trace_hash == second.trace_hash, f"{name} is not deterministic"
            assert first.trace_hash == stored[name], f"{name} diverged from the golden hash"
        ok("determinism: six standard scenarios re-run bit-identically and match goldens")

    def test_served_session_replays_identically(self, tmp_path):
        from aiohttp.test_utils import TestClient, TestServer

        from toolbench.service import PROTOCOL, create_app

        cfg = tb.flat_scenario("B").with_overrides(duration=1.0)

        async def drive():
            server = TestServer(create_app(turbo=True, record_dir=str(tmp_path)))
            client = TestClient(server)
            await client.start_server()
            try:
                ws = await client.ws_connect("/session")
                await ws.send_json({"type": "hello", "protocol": PROTOCOL,
                                    "scenario": cfg.to_dict()})
                seq = 0
                while True:
                    frame = json.loads((await ws.receive()).data)
                    if frame["type"] != "state":
                        continue
                    if frame["step"] >= 300 and seq == 0:
                        seq = 1
                        await ws.send_json({"type": "intent", "seq": 1,
                                            "intent_pos": [0.02, 0.0, 0.0],
                                            "press_bias": 12.0})
                    if frame["step"] >= cfg.steps:
                        break
                await ws.send_json({"type": "bye"})
                await asyncio.sleep(0.05)
            finally:
                await client.close()

        asyncio.run(drive())
        doc = json.loads(sorted(tmp_path.glob("session-*.json"))[0].read_text())
        _, served = tb.read_trace(sorted(tmp_path.glob("session-*.trace.jsonl"))[0])
        replayed = replay_session(doc)
        n = len(served)
        assert n >= cfg.steps
        assert tb.trace_hash(replayed.records[:n]) == tb.trace_hash(served)
        ok("replay fidelity: served session (config + intent log) replays to the "
           "identical trace hash")


class TestFilterIdentities:
    def test_constant_invariance_exact(self):
        x = np.full(2000, 7.25)
        worst = float(np.max(np.abs(smooth_arma(x, 50) - 7.25)))
        assert worst <= 1e-12
        ok(f"filter constant invariance: max deviation {worst:.1e} <= 1e-12")

    def test_impulse_plateau_exact(self):
        x = np.zeros(501)
        x[250] = 1.0
        y = smooth_arma(x, 50)
        covered = np.nonzero(y)[0]
        assert len(covered) == 50
        worst = float(np.max(np.abs(y[covered] - 1.0 / 50.0)))
        assert worst <= 1e-12
        ok(f"filter impulse plateau: 50-sample plateau at 1/50, error {worst:.1e}")

    def test_parseval_partition(self):
        rng = np.random.default_rng(123)
        x = rng.normal(size=8192)
        dt = 1e-3
        band = band_energy(x, dt, 10.0)
        spec = np.fft.fft(x)
        freqs = np.abs(np.fft.fftfreq(len(x), d=dt))
        low = float(np.sum(np.abs(spec[(freqs > 0) & (freqs <= 10.0)]) ** 2) / len(x) ** 2)
        ac = float(np.mean((x - x.mean()) ** 2))
        rel = abs(band + low - ac) / ac
        assert rel <= 1e-9
        ok(f"Parseval partition: relative closure error {rel:.1e} <= 1e-9")


class TestDownholeDemo:
    def test_removal_and_duality(self, downhole_run):
        res = downhole_run
        assert not res.fault, "downhole run must finish without simulation faults"
        frac = res.metrics.removed_volume_fraction
        assert frac >= 0.80, f"removed only {frac * 100:.1f}% of the bead volume"

        # plane vs large-radius bore under the same commanded trajectory
        def variant(kind):
            data = tb.hybrid_flat_scenario().to_dict()
            data["duration"] = 6.0
            data["workpiece"]["beads"] = []
            if kind == "cylinder":
                data["workpiece"]["geometry"] = {
                    "kind": "inner_cylinder",
                    "axis_point": [0.0, 0.0, 100.0],
                    "axis_dir": [0.0, 1.0, 0.0],
                    "radius": 100.0,
                }
                u0 = 100.0 * math.pi / 2.0  # wall point closest to the origin
                data["workpiece"]["grid"] = {
                    "u_min": u0 - 0.06, "u_max": u0 + 0.41,
                    "v_min": -0.03, "v_max": 0.03,
                    "pitch": 0.001, "wrap_u": False,
                }
                data["operator"]["path"] = {
                    "u0": u0, "v0": 0.0, "u1": u0 + 0.3, "v1": 0.0,
                    "t_start": 1.0, "t_end": 19.0,
                }
            return run_scenario(tb.ScenarioConfig.from_dict(data))

        plane = variant("plane")
        cyl = variant("cylinder")
        fp, t = force_series(plane)
        fc, _ = force_series(cyl)
        settled = t >= 2.0
        worst = float(np.max(np.abs(fp[settled] - fc[settled]))) / 10.0
        assert worst <= 0.01, f"plane/bore force disagreement {worst * 100:.2f}%"
        ok(f"downhole demo: {frac * 100:.1f}% bead removal, zero faults; "
           f"plane vs 100 m bore force agreement {worst * 100:.3f}%")
