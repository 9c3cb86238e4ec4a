"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 simulation fault.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .build import metrics_context
from .metrics import compute_metrics
from .runner import compare_modes, replay_session, run_scenario
from .scenario import ConfigError, ScenarioConfig
from .scenarios import make_scenario, scenario_names
from .trace import read_trace, trace_hash, write_trace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAULT = 3


def _load_config(path: str) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(path, f"cannot read config: {exc}")
    return ScenarioConfig.from_json(text)


def _write_metrics(res, out: str | None) -> None:
    if res.metrics is None:
        return
    doc = res.metrics.to_json()
    if out:
        Path(out).write_text(doc + "\n")
    else:
        print(doc)


def cmd_run(args) -> int:
    config = _load_config(args.config)
    res = run_scenario(config)
    if args.trace:
        write_trace(args.trace, res.records,
                    {"scenario": config.name, "dt": config.dt, "hash": res.trace_hash})
    _write_metrics(res, args.metrics)
    print(f"{config.name}: {len(res.records)} steps, hash {res.trace_hash[:16]}"
          f"{', FAULT' if res.fault else ''}", file=sys.stderr)
    return EXIT_FAULT if res.fault else EXIT_OK


def cmd_compare(args) -> int:
    config = _load_config(args.config)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    try:
        report = compare_modes(config, modes)
    except ValueError as exc:
        raise ConfigError("modes", str(exc))
    doc = report.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    header = f"{'mode':<6}{'peak N':>10}{'HF energy':>14}{'z-RMS mm':>12}{'loss ms':>10}{'fault':>8}"
    print(header)
    for mode in modes:
        m = report.results[mode].metrics
        fault = report.results[mode].fault
        print(f"{mode:<6}{m.peak_normal_force:>10.2f}{m.hf_band_energy:>14.3e}"
              f"{m.path_rms_normal * 1e3:>12.3f}{m.contact_loss_max_s * 1e3:>10.1f}"
              f"{'yes' if fault else 'no':>8}")
    for a in doc["assertions"]:
        verdict = "ok" if a["holds"] else "VIOLATED"
        print(f"  {a['metric']}: {a['left']} {a['op']} {a['right']}  [{verdict}]")
    return EXIT_OK


def cmd_replay(args) -> int:
    path = Path(args.input)
    if not path.exists():
        raise ConfigError(args.input, "no such file")
    first = path.open().readline()
    kind = json.loads(first).get("kind") if first.startswith("{") else None
    if kind == "trace":
        header, records = read_trace(path)
        if not records:
            raise ConfigError(args.input, "trace has no steps")
        scenario = header.get("scenario")
        try:
            config = make_scenario(scenario)
        except KeyError:
            raise ConfigError(args.input, f"trace references unknown scenario {scenario!r}")
        res_metrics = compute_metrics(records, metrics_context(config))
        doc = res_metrics.to_json()
        if args.metrics_out:
            Path(args.metrics_out).write_text(doc + "\n")
        else:
            print(doc)
        print(f"replayed trace: {len(records)} steps, hash {trace_hash(records)[:16]}",
              file=sys.stderr)
        return EXIT_OK
    # session document: re-simulate
    doc = json.loads(path.read_text())
    res = replay_session(doc)
    if args.trace:
        write_trace(args.trace, res.records,
                    {"scenario": res.config.name, "dt": res.config.dt, "hash": res.trace_hash})
    if args.metrics_out:
        _write_metrics(res, args.metrics_out)
    elif args.metrics:
        _write_metrics(res, None)
    print(f"replayed session: {len(res.records)} steps, hash {res.trace_hash[:16]}",
          file=sys.stderr)
    return EXIT_FAULT if res.fault else EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    static_dir = args.static
    if static_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "cockpit"
        static_dir = str(bundled) if (bundled / "dist").is_dir() else None
    serve(
        port=args.port,
        turbo=args.turbo,
        default_scenario=args.scenario,
        record_dir=args.record,
        static_dir=static_dir,
    )
    return EXIT_OK


def cmd_scenarios(args) -> int:
    if args.action == "list":
        for name in scenario_names():
            print(name)
        return EXIT_OK
    if not args.name:
        raise ConfigError("name", "scenarios emit requires a scenario name")
    try:
        config = make_scenario(args.name)
    except KeyError as exc:
        raise ConfigError("name", str(exc))
    print(config.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toolbench",
                                description="contact-tooling teleoperation simulator")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config file")
    run.add_argument("config")
    run.add_argument("--trace", help="write the step trace (JSONL)")
    run.add_argument("--metrics", help="write the metrics report (JSON)")
    run.set_defaults(fn=cmd_run)

    cmp_ = sub.add_parser("compare", help="run one scenario under several modes")
    cmp_.add_argument("config")
    cmp_.add_argument("--modes", required=True, help="comma-separated, e.g. A,B,C,D")
    cmp_.add_argument("--out", help="write the comparison report (JSON)")
    cmp_.set_defaults(fn=cmd_compare)

    rep = sub.add_parser("replay", help="recompute metrics from a trace, or re-simulate a session")
    rep.add_argument("input")
    rep.add_argument("--metrics", action="store_true", help="print the metrics report")
    rep.add_argument("--metrics-out", help="write the metrics report to a file")
    rep.add_argument("--trace", help="write the replayed trace (sessions only)")
    rep.set_defaults(fn=cmd_replay)

    srv = sub.add_parser("serve", help="start the live session server")
    srv.add_argument("--port", type=int, default=8787)
    srv.add_argument("--turbo", action="store_true", help="run unpaced (testing)")
    srv.add_argument("--scenario", default="flat_b", help="default scenario for sessions")
    srv.add_argument("--record", help="directory for recorded sessions")
    srv.add_argument("--static", help="directory of cockpit static files to serve at /ui/")
    srv.set_defaults(fn=cmd_serve)

    sc = sub.add_parser("scenarios", help="list or emit library scenarios")
    sc.add_argument("action", choices=["list", "emit"])
    sc.add_argument("name", nargs="?")
    sc.set_defaults(fn=cmd_scenarios)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
