"""Trace metrics quantifying tooling performance: force peaks and settling
quality, path deviation, high-frequency motion energy, contact continuity,
and removed bead volume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sigproc import band_energy
from .trace import SCHEMA

__all__ = ["MetricsContext", "MetricsReport", "compute_metrics"]


@dataclass
class MetricsContext:
    """Everything compute_metrics needs beyond the raw rows.

    ref_path maps t to the commanded surface point (None disables path
    deviation); normal_clearance maps a position to its signed height above
    the nominal surface; force_ref is the force setpoint when the scenario
    has one (hybrid / shared control), else the settled mean is used.
    """

    dt: float
    settle_time: float = 2.0
    hf_cutoff: float = 10.0             # Hz
    contact_threshold: float = 0.5      # N
    force_ref: float | None = None
    initial_bead_volume: float = 0.0
    ref_path: Callable | None = None            # t -> np.ndarray(3)
    normal_clearance: Callable | None = None    # pos -> float
    surface_normal: Callable | None = None      # pos -> np.ndarray(3)


@dataclass
class MetricsReport:
    peak_normal_force: float
    settled_force_error_pct: float
    path_rms_axis: tuple                # m, world x/y/z about the reference path
    path_rms_inplane: float             # m, tangential deviation magnitude
    path_rms_normal: float              # m, about the nominal surface
    hf_band_energy: float               # (m/s)^2, slave velocity above the cutoff
    contact_loss_count: int
    contact_loss_max_s: float
    removed_volume: float               # m^3
    removed_volume_fraction: float
    partial: bool = False               # trace ended in a fault
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "metrics",
            "peak_normal_force": self.peak_normal_force,
            "settled_force_error_pct": self.settled_force_error_pct,
            "path_rms_axis": list(self.path_rms_axis),
            "path_rms_inplane": self.path_rms_inplane,
            "path_rms_normal": self.path_rms_normal,
            "hf_band_energy": self.hf_band_energy,
            "contact_loss_count": self.contact_loss_count,
            "contact_loss_max_s": self.contact_loss_max_s,
            "removed_volume": self.removed_volume,
            "removed_volume_fraction": self.removed_volume_fraction,
            "partial": self.partial,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _contact_losses(f_n: np.ndarray, threshold: float, dt: float) -> tuple[int, float]:
    """Maximal sub-threshold intervals strictly between first and last contact."""
    in_contact = f_n >= threshold
    idx = np.nonzero(in_contact)[0]
    if idx.size < 2:
        return 0, 0.0
    first, last = idx[0], idx[-1]
    gaps = []
    run = 0
    for i in range(first, last + 1):
        if in_contact[i]:
            if run:
                gaps.append(run)
            run = 0
        else:
            run += 1
    if run:
        gaps.append(run)
    if not gaps:
        return 0, 0.0
    return len(gaps), max(gaps) * dt


def compute_metrics(records, ctx: MetricsContext) -> MetricsReport:
    """Reduce a trace to a MetricsReport.  Pure: same trace, same report."""
    if not records:
        raise ValueError("cannot compute metrics on an empty trace")

    partial = bool(records[-1].fault)
    f_n = np.array([r.f_normal for r in records])
    slave_pos = np.array([r.slave_pos for r in records])
    slave_vel = np.array([r.slave_vel for r in records])
    t = np.array([r.t for r in records])

    settled = t >= ctx.settle_time
    if not np.any(settled):
        settled = np.ones_like(t, dtype=bool)

    peak = float(np.max(f_n))

    # settled force error: against the setpoint when there is one, else the
    # relative fluctuation about the settled in-contact mean
    in_contact = f_n >= ctx.contact_threshold
    window = settled & in_contact
    if not np.any(window):
        force_err_pct = 0.0 if ctx.force_ref is None else 100.0
    elif ctx.force_ref is not None and ctx.force_ref > 0.0:
        force_err_pct = float(np.mean(np.abs(f_n[window] - ctx.force_ref)) / ctx.force_ref * 100.0)
    else:
        mean = float(np.mean(f_n[window]))
        force_err_pct = float(np.std(f_n[window]) / mean * 100.0) if mean > 0.0 else 0.0

    # path deviation over the settled window
    rms_axis = (0.0, 0.0, 0.0)
    rms_inplane = 0.0
    rms_normal = 0.0
    sp = slave_pos[settled]
    if ctx.normal_clearance is not None and sp.size:
        dn = np.array([ctx.normal_clearance(p) for p in sp])
        rms_normal = float(np.sqrt(np.mean(dn * dn)))
    if ctx.ref_path is not None and sp.size:
        ref = np.array([ctx.ref_path(tt) for tt in t[settled]])
        dev = sp - ref
        rms_axis = tuple(float(v) for v in np.sqrt(np.mean(dev * dev, axis=0)))
        if ctx.surface_normal is not None:
            n = np.array([ctx.surface_normal(p) for p in ref])
            dev_t = dev - (np.sum(dev * n, axis=1)[:, None]) * n
            rms_inplane = float(np.sqrt(np.mean(np.sum(dev_t * dev_t, axis=1))))
        else:
            rms_inplane = float(np.sqrt(np.mean(np.sum(dev * dev, axis=1))))

    # high-frequency band energy of the slave velocity, summed over axes
    sv = slave_vel[settled]
    hf = 0.0
    if sv.shape[0] >= 8:
        for ax in range(3):
            hf += band_energy(sv[:, ax], ctx.dt, ctx.hf_cutoff)

    loss_count, loss_max = _contact_losses(f_n, ctx.contact_threshold, ctx.dt)

    removed = float(records[-1].removed_volume)
    frac = removed / ctx.initial_bead_volume if ctx.initial_bead_volume > 0.0 else 0.0
    frac = min(max(frac, 0.0), 1.0)

    return MetricsReport(
        peak_normal_force=peak,
        settled_force_error_pct=force_err_pct,
        path_rms_axis=rms_axis,
        path_rms_inplane=rms_inplane,
        path_rms_normal=rms_normal,
        hf_band_energy=float(hf),
        contact_loss_count=loss_count,
        contact_loss_max_s=float(loss_max),
        removed_volume=removed,
        removed_volume_fraction=float(frac),
        partial=partial,
    )
