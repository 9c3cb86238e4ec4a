"""Workpiece geometry: parametric surfaces carrying a grindable bead field.

Two surface kinds: an infinite plane and the inner wall of a cylinder (bore).
Surface coordinates (u, v) are arc lengths in meters; the bead field is a
regular (u, v) grid of extra material height read through bilinear
interpolation and lowered by grinding.  The surface normal always points
away from the material (plane: the given normal; bore wall: toward the axis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Plane",
    "InnerCylinder",
    "BeadField",
    "GaussianRidge",
    "Workpiece",
    "SurfacePoint",
    "surface_eval",
    "vec3",
    "unit",
    "require_finite",
    "tangent_basis",
]


def vec3(x, y, z) -> np.ndarray:
    return np.array([float(x), float(y), float(z)])


def require_finite(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite components: {v}")
    return v


def unit(v, name: str = "vector") -> np.ndarray:
    v = require_finite(v, name)
    n = float(np.linalg.norm(v))
    if n < 1e-12:
        raise ValueError(f"{name} is degenerate (zero length)")
    return v / n


def tangent_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal (t1, t2) spanning the plane normal to n."""
    ref = vec3(1.0, 0.0, 0.0) if abs(n[0]) < 0.9 else vec3(0.0, 1.0, 0.0)
    t1 = ref - np.dot(ref, n) * n
    t1 = t1 / np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return t1, t2


@dataclass(frozen=True)
class Plane:
    """Infinite plane through `origin` with outward unit `normal`.

    Surface coords: u along t1, v along t2 (tangent_basis of the normal).
    """

    origin: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", require_finite(self.origin, "plane origin"))
        object.__setattr__(self, "normal", unit(self.normal, "plane normal"))
        object.__setattr__(self, "axes", tangent_basis(self.normal))

    def surface_coords(self, point: np.ndarray) -> tuple[float, float]:
        t1, t2 = self.axes
        d = point - self.origin
        return float(np.dot(d, t1)), float(np.dot(d, t2))

    def clearance(self, point: np.ndarray) -> float:
        """Signed height of `point` above the nominal surface along the normal."""
        return float(np.dot(point - self.origin, self.normal))

    def normal_at(self, point: np.ndarray) -> np.ndarray:
        return self.normal

    def embed(self, u: float, v: float, height: float = 0.0) -> np.ndarray:
        t1, t2 = self.axes
        return self.origin + u * t1 + v * t2 + height * self.normal

    def eval_point(self, point: np.ndarray):
        """(u, v, normal, clearance) in a single pass."""
        t1, t2 = self.axes
        d = point - self.origin
        return (
            float(np.dot(d, t1)),
            float(np.dot(d, t2)),
            self.normal,
            float(np.dot(d, self.normal)),
        )


@dataclass(frozen=True)
class InnerCylinder:
    """Inner wall of a cylinder (bore) of `radius` about the given axis.

    Surface coords: u = circumferential arc length (wraps at 2*pi*radius),
    v = axial coordinate along axis_dir.  The material is the wall, so the
    outward-from-material normal points from the wall toward the axis.
    """

    axis_point: np.ndarray
    axis_dir: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "axis_point", require_finite(self.axis_point, "cylinder axis point"))
        object.__setattr__(self, "axis_dir", unit(self.axis_dir, "cylinder axis dir"))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"cylinder radius must be > 0, got {self.radius}")
        object.__setattr__(self, "axes", tangent_basis(self.axis_dir))

    @property
    def circumference(self) -> float:
        return 2.0 * math.pi * self.radius

    def _radial(self, point: np.ndarray) -> tuple[np.ndarray, float, float]:
        d = point - self.axis_point
        ax = float(np.dot(d, self.axis_dir))
        perp = d - ax * self.axis_dir
        r = float(np.linalg.norm(perp))
        if r < 1e-12:
            raise ValueError("point lies on the cylinder axis; wall direction undefined")
        return perp / r, r, ax

    def surface_coords(self, point: np.ndarray) -> tuple[float, float]:
        e1, e2 = self.axes
        perp_hat, _, ax = self._radial(point)
        theta = math.atan2(float(np.dot(perp_hat, e2)), float(np.dot(perp_hat, e1)))
        if theta < 0.0:
            theta += 2.0 * math.pi
        return theta * self.radius, ax

    def clearance(self, point: np.ndarray) -> float:
        _, r, _ = self._radial(point)
        return self.radius - r

    def normal_at(self, point: np.ndarray) -> np.ndarray:
        perp_hat, _, _ = self._radial(point)
        return -perp_hat

    def embed(self, u: float, v: float, height: float = 0.0) -> np.ndarray:
        e1, e2 = self.axes
        theta = u / self.radius
        r = self.radius - height
        return (
            self.axis_point
            + r * (math.cos(theta) * e1 + math.sin(theta) * e2)
            + v * self.axis_dir
        )

    def eval_point(self, point: np.ndarray):
        """(u, v, normal, clearance) in a single pass."""
        e1, e2 = self.axes
        perp_hat, r, ax = self._radial(point)
        theta = math.atan2(float(np.dot(perp_hat, e2)), float(np.dot(perp_hat, e1)))
        if theta < 0.0:
            theta += 2.0 * math.pi
        return theta * self.radius, ax, -perp_hat, self.radius - r


@dataclass(frozen=True)
class GaussianRidge:
    """Gaussian bead ridge on the (u, v) grid.

    axis="u": ridge runs along v, height varies with u (crosses a u-directed
    tool path); axis="v": ridge runs along u at fixed v (circumferential bead
    on a bore when u wraps).
    """

    axis: str
    center: float
    height: float
    sigma: float

    def __post_init__(self):
        if self.axis not in ("u", "v"):
            raise ValueError(f"ridge axis must be 'u' or 'v', got {self.axis!r}")
        if self.height < 0.0:
            raise ValueError("ridge height must be >= 0")
        if self.sigma <= 0.0:
            raise ValueError("ridge sigma must be > 0")


class BeadField:
    """Regular (u, v) grid of bead heights in meters, bilinear interpolation.

    Heights never go negative; `lower` floors at zero and reports the removed
    material volume.  When wrap_u is set the u axis is periodic (bore wall).
    """

    def __init__(self, u_min, u_max, v_min, v_max, pitch, wrap_u=False):
        if pitch <= 0.0:
            raise ValueError("grid pitch must be > 0")
        if not (u_max > u_min and v_max > v_min):
            raise ValueError("grid extents must satisfy u_max > u_min, v_max > v_min")
        self.u_min = float(u_min)
        self.v_min = float(v_min)
        self.pitch = float(pitch)
        self.wrap_u = bool(wrap_u)
        self.nu = int(round((u_max - u_min) / pitch)) + (0 if wrap_u else 1)
        self.nv = int(round((v_max - v_min) / pitch)) + 1
        if self.nu < 2 or self.nv < 2:
            raise ValueError("grid must have at least 2 nodes per axis")
        self.u_span = self.nu * self.pitch if wrap_u else (self.nu - 1) * self.pitch
        self.heights = np.zeros((self.nu, self.nv))
        self.dirty: set[tuple[int, int]] = set()

    def copy(self) -> "BeadField":
        out = BeadField.__new__(BeadField)
        out.__dict__.update(self.__dict__)
        out.heights = self.heights.copy()
        out.dirty = set()
        return out

    def add_ridge(self, ridge: GaussianRidge) -> None:
        us = self.u_min + self.pitch * np.arange(self.nu)
        vs = self.v_min + self.pitch * np.arange(self.nv)
        if ridge.axis == "u":
            du = us - ridge.center
            if self.wrap_u:
                du = (du + self.u_span / 2.0) % self.u_span - self.u_span / 2.0
            bump = ridge.height * np.exp(-0.5 * (du / ridge.sigma) ** 2)
            self.heights += bump[:, None]
        else:
            dv = vs - ridge.center
            bump = ridge.height * np.exp(-0.5 * (dv / ridge.sigma) ** 2)
            self.heights += bump[None, :]

    def _u_index(self, u: float) -> tuple[int, int, float]:
        gu = (u - self.u_min) / self.pitch
        if self.wrap_u:
            gu = gu % self.nu
            i0 = int(gu) % self.nu
            return i0, (i0 + 1) % self.nu, gu - int(gu)
        gu = min(max(gu, 0.0), self.nu - 1.0)
        i0 = min(int(gu), self.nu - 2)
        return i0, i0 + 1, gu - i0

    def _v_index(self, v: float) -> tuple[int, int, float]:
        gv = (v - self.v_min) / self.pitch
        gv = min(max(gv, 0.0), self.nv - 1.0)
        j0 = min(int(gv), self.nv - 2)
        return j0, j0 + 1, gv - j0

    def height_at(self, u: float, v: float) -> float:
        """Bilinear bead height; zero outside the grid (clamped edges wrap_u aside)."""
        if not self.wrap_u:
            gu = (u - self.u_min) / self.pitch
            if gu < 0.0 or gu > self.nu - 1:
                return 0.0
        gv = (v - self.v_min) / self.pitch
        if gv < 0.0 or gv > self.nv - 1:
            return 0.0
        i0, i1, fu = self._u_index(u)
        j0, j1, fv = self._v_index(v)
        h = self.heights
        return float(
            h[i0, j0] * (1 - fu) * (1 - fv)
            + h[i1, j0] * fu * (1 - fv)
            + h[i0, j1] * (1 - fu) * fv
            + h[i1, j1] * fu * fv
        )

    _EMPTY = (np.empty(0, dtype=int), np.empty(0, dtype=int))

    def _footprint_indices(self, u: float, v: float, radius: float):
        """Index arrays (ii, jj) of grid nodes within `radius` of (u, v)."""
        gu = (u - self.u_min) / self.pitch
        gv = (v - self.v_min) / self.pitch
        if not (math.isfinite(gu) and math.isfinite(gv)):
            return self._EMPTY
        ri = int(math.ceil(radius / self.pitch))
        # footprint entirely off the grid (possible on a diverging run)
        if gv + ri < 0 or gv - ri > self.nv - 1:
            return self._EMPTY
        if not self.wrap_u and (gu + ri < 0 or gu - ri > self.nu - 1):
            return self._EMPTY
        ci, cj = int(round(gu)), int(round(gv))
        di = np.arange(ci - ri, ci + ri + 1)
        dj = np.arange(cj - ri, cj + ri + 1)
        r2 = (radius / self.pitch) ** 2
        # distances measured before any wrapping
        mask = ((di - gu) ** 2)[:, None] + ((dj - gv) ** 2)[None, :] <= r2
        ii, jj = np.nonzero(mask)
        ii = di[ii]
        jj = dj[jj]
        if self.wrap_u:
            ii = ii % self.nu
        else:
            keep = (ii >= 0) & (ii < self.nu)
            ii, jj = ii[keep], jj[keep]
        keep = (jj >= 0) & (jj < self.nv)
        return ii[keep], jj[keep]

    def footprint(self, u: float, v: float, radius: float) -> list[tuple[int, int]]:
        """Grid nodes whose center lies within `radius` of (u, v), wrap-aware."""
        ii, jj = self._footprint_indices(u, v, radius)
        return sorted(zip(ii.tolist(), jj.tolist()))

    def lower(self, cells, dh: float) -> float:
        """Lower each cell by dh (floored at 0); returns removed volume in m^3."""
        if dh <= 0.0 or len(cells) == 0:
            return 0.0
        if isinstance(cells, tuple) and len(cells) == 2 and isinstance(cells[0], np.ndarray):
            ii, jj = cells
        else:
            arr = np.asarray(cells, dtype=int)
            ii, jj = arr[:, 0], arr[:, 1]
        h = self.heights
        current = h[ii, jj]
        take = np.minimum(current, dh)
        changed = take > 0.0
        if not np.any(changed):
            return 0.0
        ci, cj, ct = ii[changed], jj[changed], take[changed]
        h[ci, cj] = h[ci, cj] - ct
        self.dirty.update(zip(ci.tolist(), cj.tolist()))
        return float(ct.sum()) * self.pitch * self.pitch

    def grind(self, u: float, v: float, radius: float, dh: float) -> float:
        """Lower the footprint disk around (u, v) by dh; returns removed volume."""
        if dh <= 0.0:
            return 0.0
        return self.lower(self._footprint_indices(u, v, radius), dh)

    def total_volume(self) -> float:
        return float(self.heights.sum()) * self.pitch * self.pitch

    def nonzero_cells(self) -> list[tuple[int, int, float]]:
        ii, jj = np.nonzero(self.heights)
        return [(int(i), int(j), float(self.heights[i, j])) for i, j in zip(ii, jj)]

    def drain_dirty(self) -> list[tuple[int, int, float]]:
        out = [(i, j, float(self.heights[i, j])) for i, j in sorted(self.dirty)]
        self.dirty.clear()
        return out


@dataclass
class Workpiece:
    """Surface + bead field + contact/grinding material parameters.

    grind_vibration models tool/process vibration while material is being
    removed: a normal-direction force ripple proportional to the normal
    force (saturating at grind_vibration_sat engagement) at
    grind_vibration_hz.  Zero when not grinding (preston_k = 0, no contact,
    or tangential speed below the deadband).
    """

    geometry: Plane | InnerCylinder
    beads: BeadField
    stiffness: float = 2.0e4        # N/m penalty stiffness
    damping: float = 50.0           # N*s/m normal damping
    friction_mu: float = 0.3        # Coulomb friction coefficient
    tangential_deadband: float = 1e-4  # m/s below which friction is zero
    preston_k: float = 5.0e-5       # m^2/N removal gain
    tool_radius: float = 0.01       # m grinding footprint radius
    grind_vibration: float = 0.0    # force ripple as a fraction of f_n
    grind_vibration_hz: float = 15.0
    grind_vibration_sat: float = 10.0  # N engagement where the ripple saturates
    initial_bead_volume: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.stiffness <= 0.0:
            raise ValueError("workpiece stiffness must be > 0")
        if self.damping < 0.0:
            raise ValueError("workpiece damping must be >= 0")
        if self.friction_mu < 0.0:
            raise ValueError("friction coefficient must be >= 0")
        if self.preston_k < 0.0:
            raise ValueError("preston_k must be >= 0")
        if self.tool_radius <= 0.0:
            raise ValueError("tool_radius must be > 0")
        if self.grind_vibration < 0.0 or self.grind_vibration_hz <= 0.0:
            raise ValueError("grind vibration ratio must be >= 0 and frequency > 0")
        if np.any(self.beads.heights < 0.0):
            raise ValueError("bead heights must be >= 0")
        self.initial_bead_volume = self.beads.total_volume()

    @property
    def tool_area(self) -> float:
        return math.pi * self.tool_radius * self.tool_radius


@dataclass(frozen=True)
class SurfacePoint:
    """surface_eval result: nearest-surface parameters for a query point."""

    u: float
    v: float
    bead_height: float      # interpolated bead height above the nominal surface
    normal: np.ndarray      # outward-from-material unit direction
    clearance: float        # signed height of the point above surface+bead


def surface_eval(workpiece: Workpiece, point: np.ndarray) -> SurfacePoint:
    """Project `point` onto the workpiece surface.

    Returns surface coordinates, the interpolated bead height there, the
    outward-from-material normal, and the point's clearance above the beaded
    surface (negative means penetration).  Degenerate queries (point on a
    cylinder axis) are rejected.
    """
    point = require_finite(point, "query point")
    u, v, normal, nominal_clearance = workpiece.geometry.eval_point(point)
    bead = workpiece.beads.height_at(u, v)
    return SurfacePoint(u=u, v=v, bead_height=bead, normal=normal, clearance=nominal_clearance - bead)
