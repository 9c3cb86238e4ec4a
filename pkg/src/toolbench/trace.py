"""Trace records and persistence.

A trace is newline-delimited JSON: one header object carrying the schema
tag and run metadata, then one object per simulation step with a fixed key
order.  The trace hash covers the step rows only, so identical runs hash
identically regardless of where the file was written.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

__all__ = ["SCHEMA", "TraceRecord", "trace_rows", "trace_hash", "write_trace", "read_trace"]

SCHEMA = "toolbench/1"


@dataclass
class TraceRecord:
    step: int
    t: float
    master_pos: tuple
    master_vel: tuple
    slave_pos: tuple
    slave_vel: tuple
    slave_setpoint: tuple
    f_normal: float             # N, contact normal force magnitude
    f_env: tuple                # N, environment force on the tool
    master_feedback: tuple      # N, feedback applied to the master
    mode: str
    removed_volume: float       # m^3, cumulative
    fault: bool = False

    def to_row(self) -> dict:
        return {
            "step": self.step,
            "t": self.t,
            "master_pos": list(self.master_pos),
            "master_vel": list(self.master_vel),
            "slave_pos": list(self.slave_pos),
            "slave_vel": list(self.slave_vel),
            "slave_setpoint": list(self.slave_setpoint),
            "f_normal": self.f_normal,
            "f_env": list(self.f_env),
            "master_feedback": list(self.master_feedback),
            "mode": self.mode,
            "removed_volume": self.removed_volume,
            "fault": self.fault,
        }

    @classmethod
    def from_row(cls, row: dict) -> "TraceRecord":
        return cls(
            step=int(row["step"]),
            t=float(row["t"]),
            master_pos=tuple(row["master_pos"]),
            master_vel=tuple(row["master_vel"]),
            slave_pos=tuple(row["slave_pos"]),
            slave_vel=tuple(row["slave_vel"]),
            slave_setpoint=tuple(row["slave_setpoint"]),
            f_normal=float(row["f_normal"]),
            f_env=tuple(row["f_env"]),
            master_feedback=tuple(row["master_feedback"]),
            mode=str(row["mode"]),
            removed_volume=float(row["removed_volume"]),
            fault=bool(row["fault"]),
        )


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def trace_rows(records) -> list[str]:
    return [_dump(r.to_row()) for r in records]


def trace_hash(records) -> str:
    """sha256 over the canonical step rows."""
    h = hashlib.sha256()
    for line in trace_rows(records):
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


def write_trace(path, records, header: dict) -> None:
    head = {"schema": SCHEMA, "kind": "trace"}
    head.update(header)
    with open(path, "w") as f:
        f.write(_dump(head) + "\n")
        for line in trace_rows(records):
            f.write(line + "\n")


def read_trace(path) -> tuple[dict, list[TraceRecord]]:
    with open(path) as f:
        lines = [ln for ln in (line.strip() for line in f) if ln]
    if not lines:
        raise ValueError(f"empty trace file: {path}")
    header = json.loads(lines[0])
    if header.get("schema") != SCHEMA:
        raise ValueError(f"unsupported trace schema: {header.get('schema')!r}")
    records = [TraceRecord.from_row(json.loads(ln)) for ln in lines[1:]]
    return header, records


def series(records, getter) -> np.ndarray:
    """Column extraction helper: series(trace, lambda r: r.f_normal)."""
    return np.array([getter(r) for r in records])
