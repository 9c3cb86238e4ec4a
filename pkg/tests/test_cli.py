import json

import toolbench as tb
from toolbench.cli import main


def write_config(tmp_path, cfg):
    path = tmp_path / "scenario.json"
    path.write_text(cfg.to_json())
    return str(path)


class TestRun:
    def test_run_writes_trace_and_metrics(self, tmp_path, capsys):
        cfg = tb.flat_scenario("B").with_overrides(duration=0.5)
        cfg_path = write_config(tmp_path, cfg)
        trace_path = tmp_path / "out.jsonl"
        metrics_path = tmp_path / "metrics.json"
        code = main(["run", cfg_path, "--trace", str(trace_path), "--metrics", str(metrics_path)])
        assert code == 0
        header, records = tb.read_trace(trace_path)
        assert header["scenario"] == cfg.name
        assert len(records) == cfg.steps
        metrics = json.loads(metrics_path.read_text())
        assert metrics["schema"] == "toolbench/1"
        assert metrics["kind"] == "metrics"

    def test_bad_config_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        data = tb.flat_scenario("A").to_dict()
        data["workpiece"]["stiffness"] = -5.0
        path.write_text(json.dumps(data))
        assert main(["run", str(path)]) == 2
        err = capsys.readouterr().err
        assert "workpiece.stiffness" in err

    def test_missing_file_exits_2(self):
        assert main(["run", "/no/such/file.json"]) == 2

    def test_fault_exits_3(self, tmp_path):
        data = tb.flat_scenario("D").with_overrides(duration=5.0).to_dict()
        data["controllers"]["position"] = {"kp": 1e18, "kd": 0.0}
        data["slave"]["f_max"] = 1e300
        data["coupling"]["f_m_max"] = 1e300
        path = tmp_path / "unstable.json"
        path.write_text(json.dumps(data))
        assert main(["run", str(path)]) == 3


class TestCompare:
    def test_compare_prints_table_and_assertions(self, tmp_path, capsys):
        cfg = tb.flat_scenario("A").with_overrides(duration=3.0)
        code = main(["compare", write_config(tmp_path, cfg), "--modes", "A,C",
                     "--out", str(tmp_path / "cmp.json")])
        assert code == 0
        out = capsys.readouterr().out
        assert "peak N" in out
        assert "peak_normal_force: C > A" in out
        doc = json.loads((tmp_path / "cmp.json").read_text())
        assert set(doc["modes"]) == {"A", "C"}

    def test_single_mode_rejected(self, tmp_path):
        cfg = tb.flat_scenario("A").with_overrides(duration=1.0)
        assert main(["compare", write_config(tmp_path, cfg), "--modes", "A"]) == 2


class TestReplay:
    def test_replay_trace_prints_metrics(self, tmp_path, capsys):
        cfg = tb.flat_scenario("B").with_overrides(duration=0.5)
        data = cfg.to_dict()
        data["name"] = "flat_b"  # library name so replay can rebuild context
        path = write_config(tmp_path, tb.ScenarioConfig.from_dict(data))
        trace_path = tmp_path / "t.jsonl"
        assert main(["run", path, "--trace", str(trace_path)]) == 0
        capsys.readouterr()
        assert main(["replay", str(trace_path), "--metrics"]) == 0
        out = capsys.readouterr().out
        assert json.loads(out)["kind"] == "metrics"

    def test_replay_session_reproduces_hash(self, tmp_path, capsys):
        cfg = tb.flat_scenario("B").with_overrides(duration=0.8)
        events = [{"step": 100, "type": "intent", "intent_pos": [0.01, 0, 0.001],
                   "press_bias": 6.0, "buttons": 0}]
        live = tb.run_scenario(cfg, events)
        doc = {"schema": "toolbench/1", "kind": "session", "config": cfg.to_dict(),
               "events": events}
        spath = tmp_path / "session.json"
        spath.write_text(json.dumps(doc))
        out_trace = tmp_path / "replay.jsonl"
        assert main(["replay", str(spath), "--trace", str(out_trace)]) == 0
        _, records = tb.read_trace(out_trace)
        assert tb.trace_hash(records) == live.trace_hash


class TestScenarios:
    def test_list(self, capsys):
        assert main(["scenarios", "list"]) == 0
        out = capsys.readouterr().out.split()
        assert "flat_a" in out and "downhole" in out and "hybrid_flat" in out

    def test_emit_round_trips(self, capsys):
        assert main(["scenarios", "emit", "downhole"]) == 0
        out = capsys.readouterr().out
        cfg = tb.ScenarioConfig.from_json(out)
        assert cfg == tb.downhole_scenario()

    def test_emit_unknown_exits_2(self, capsys):
        assert main(["scenarios", "emit", "nope"]) == 2
