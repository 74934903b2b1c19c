"""Offset 1D grids, embedded-boundary 2D Cartesian grids, and point classification.

Grid points never coincide with the physical boundary unless the offset
fractions make them; all coordinates come from index formulas, not running
sums, so spacing is exact in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnderResolvedGeometry

NGHOST = 2  # halo depth required by the five-point Hermite stencil


# ---------------------------------------------------------------------------
# 1D grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid1D:
    """Uniform grid x_i = x_left + (c_a + i - 1) dx, i = 1..n, with
    x_n = x_right - c_b dx.  Storage arrays carry two ghost points per side;
    storage index s maps to logical index i = s - 1."""

    n: int
    dx: float
    c_a: float
    c_b: float
    x_left: float
    x_right: float

    @property
    def n_tot(self) -> int:
        return self.n + 2 * NGHOST

    @property
    def interior(self) -> slice:
        return slice(NGHOST, NGHOST + self.n)

    def x(self, s=None) -> np.ndarray:
        """Coordinates of storage indices (all, including ghosts)."""
        if s is None:
            s = np.arange(self.n_tot)
        return self.x_left + (self.c_a + (np.asarray(s, dtype=float) - NGHOST)) * self.dx

    @property
    def x_interior(self) -> np.ndarray:
        return self.x(np.arange(NGHOST, NGHOST + self.n))


def build_grid_1d(x_left, x_right, n, c_a, c_b) -> Grid1D:
    if n < 7:
        raise ConfigError(f"need n >= 7 grid points, got {n}")
    if not (0.0 <= c_a < 1.0 and 0.0 <= c_b < 1.0):
        raise ConfigError(f"offset fractions must lie in [0,1): c_a={c_a}, c_b={c_b}")
    if x_right <= x_left:
        raise ConfigError("empty interval")
    dx = (x_right - x_left) / (n - 1 + c_a + c_b)
    return Grid1D(n=n, dx=dx, c_a=c_a, c_b=c_b, x_left=x_left, x_right=x_right)


# ---------------------------------------------------------------------------
# Geometries (analytic signed distance + closest boundary point)
# ---------------------------------------------------------------------------

class Geometry:
    """Analytic shape: signed distance is negative strictly inside the fluid,
    positive outside; closest_boundary returns (foot, outward normal, distance)
    for points on or outside the fluid region."""

    def signed_distance(self, x, y):
        raise NotImplementedError

    def closest_boundary(self, x, y):
        raise NotImplementedError

    def min_feature_size(self) -> float:
        return np.inf


class Interval(Geometry):
    """1D fluid region [a, b]; y is ignored."""

    def __init__(self, a, b):
        self.a, self.b = float(a), float(b)

    def signed_distance(self, x, y=None):
        x = np.asarray(x, dtype=float)
        return np.maximum(self.a - x, x - self.b)

    def closest_boundary(self, x, y=None):
        x = np.asarray(x, dtype=float)
        to_a = np.abs(x - self.a) <= np.abs(x - self.b)
        foot = np.where(to_a, self.a, self.b)
        normal = np.where(to_a, -1.0, 1.0)
        return foot, normal, np.abs(x - foot)

    def min_feature_size(self):
        return self.b - self.a


class Rectangle(Geometry):
    """Axis-aligned fluid box [xl, xr] x [yb, yt]."""

    def __init__(self, xl, xr, yb, yt):
        self.xl, self.xr, self.yb, self.yt = map(float, (xl, xr, yb, yt))

    def signed_distance(self, x, y):
        return np.maximum.reduce([self.xl - x, x - self.xr, self.yb - y, y - self.yt])

    def closest_boundary(self, x, y):
        # nearest of the four edge planes; exterior corners project to corners
        cx = np.clip(x, self.xl, self.xr)
        cy = np.clip(y, self.yb, self.yt)
        d = np.stack([x - self.xl, self.xr - x, y - self.yb, self.yt - y])
        k = np.argmin(d, axis=0)
        fx = np.where(k == 0, self.xl, np.where(k == 1, self.xr, cx))
        fy = np.where(k == 2, self.yb, np.where(k == 3, self.yt, cy))
        # points strictly outside project onto the clipped coordinates instead
        outside = self.signed_distance(x, y) > 0
        fx = np.where(outside & ((x < self.xl) | (x > self.xr)), np.clip(x, self.xl, self.xr), fx)
        fy = np.where(outside & ((y < self.yb) | (y > self.yt)), np.clip(y, self.yb, self.yt), fy)
        dx, dy = x - fx, y - fy
        dist = np.hypot(dx, dy)
        with np.errstate(invalid="ignore", divide="ignore"):
            nx = np.where(dist > 0, dx / np.maximum(dist, 1e-300), 0.0)
            ny = np.where(dist > 0, dy / np.maximum(dist, 1e-300), 0.0)
        # on-edge points: outward unit normal of the nearest edge
        on_edge = dist == 0
        nx = np.where(on_edge, np.where(k == 0, -1.0, np.where(k == 1, 1.0, 0.0)), nx)
        ny = np.where(on_edge, np.where(k == 2, -1.0, np.where(k == 3, 1.0, 0.0)), ny)
        return np.stack([fx, fy]), np.stack([nx, ny]), dist

    def min_feature_size(self):
        return min(self.xr - self.xl, self.yt - self.yb)


class Disk(Geometry):
    """Fluid inside the circle of given center and radius."""

    def __init__(self, cx, cy, radius):
        self.cx, self.cy, self.r = float(cx), float(cy), float(radius)

    def signed_distance(self, x, y):
        return np.hypot(x - self.cx, y - self.cy) - self.r

    def closest_boundary(self, x, y):
        dx, dy = x - self.cx, y - self.cy
        rr = np.hypot(dx, dy)
        # center itself has no unique foot; tie-break to angle 0
        safe = np.maximum(rr, 1e-300)
        nx = np.where(rr > 0, dx / safe, 1.0)
        ny = np.where(rr > 0, dy / safe, 0.0)
        foot = np.stack([self.cx + self.r * nx, self.cy + self.r * ny])
        return foot, np.stack([nx, ny]), np.abs(rr - self.r)

    def min_feature_size(self):
        return self.r


class DiskCutout(Geometry):
    """Fluid outside the circle (flow past a cylinder)."""

    def __init__(self, cx, cy, radius):
        self.cx, self.cy, self.r = float(cx), float(cy), float(radius)

    def signed_distance(self, x, y):
        return self.r - np.hypot(x - self.cx, y - self.cy)

    def closest_boundary(self, x, y):
        dx, dy = x - self.cx, y - self.cy
        rr = np.hypot(dx, dy)
        safe = np.maximum(rr, 1e-300)
        ux = np.where(rr > 0, dx / safe, 1.0)
        uy = np.where(rr > 0, dy / safe, 0.0)
        foot = np.stack([self.cx + self.r * ux, self.cy + self.r * uy])
        # outward from the fluid = toward the cylinder center
        return foot, np.stack([-ux, -uy]), np.abs(self.r - rr)

    def min_feature_size(self):
        return self.r


class HalfPlaneCylinderCutout(Geometry):
    """Fluid in {y >= y0} minus a disk centered on the symmetry line."""

    def __init__(self, cx, cy, radius, y0=0.0):
        self.disk = DiskCutout(cx, cy, radius)
        self.y0 = float(y0)

    def signed_distance(self, x, y):
        return np.maximum(self.disk.signed_distance(x, y), self.y0 - y)

    def closest_boundary(self, x, y):
        f1, n1, d1 = self.disk.closest_boundary(x, y)
        f2 = np.stack([np.asarray(x, dtype=float), np.full_like(np.asarray(x, dtype=float), self.y0)])
        n2 = np.stack([np.zeros_like(f2[0]), -np.ones_like(f2[0])])
        d2 = np.abs(np.asarray(y, dtype=float) - self.y0)
        in_disk = self.disk.signed_distance(x, y) > 0
        below = np.asarray(y) < self.y0
        # pick the violated constraint; if both, the nearer boundary wins
        use_disk = np.where(in_disk & below, d1 <= d2, in_disk)
        foot = np.where(use_disk, f1, f2)
        normal = np.where(use_disk, n1, n2)
        dist = np.where(use_disk, d1, d2)
        return foot, normal, dist

    def min_feature_size(self):
        return self.disk.r


class RampWedge(Geometry):
    """Fluid above the full wall line through (x_start, 0) at the given angle.

    The corner at x_start is handled by extending the wall line analytically,
    so signed distance and feet are those of the infinite line."""

    def __init__(self, x_start, angle_rad):
        self.x0 = float(x_start)
        self.angle = float(angle_rad)
        self._tx, self._ty = np.cos(self.angle), np.sin(self.angle)  # along-wall
        # inward (into fluid) normal is (-sin, cos); outward is (sin, -cos)
        self._nx, self._ny = self._ty, -self._tx

    def signed_distance(self, x, y):
        return (x - self.x0) * self._nx + y * self._ny

    def closest_boundary(self, x, y):
        s = (x - self.x0) * self._tx + y * self._ty
        foot = np.stack([self.x0 + s * self._tx, s * self._ty])
        nx = np.broadcast_to(self._nx, foot[0].shape).copy()
        ny = np.broadcast_to(self._ny, foot[0].shape).copy()
        return foot, np.stack([nx, ny]), np.abs(self.signed_distance(x, y))


def geometry_from_name(kind: str, params: dict) -> Geometry:
    kinds = {
        "interval": lambda p: Interval(p["a"], p["b"]),
        "rectangle": lambda p: Rectangle(p["xl"], p["xr"], p["yb"], p["yt"]),
        "disk": lambda p: Disk(p.get("cx", 0.0), p.get("cy", 0.0), p["radius"]),
        "half-plane-with-cylinder-cutout": lambda p: HalfPlaneCylinderCutout(
            p.get("cx", 0.0), p.get("cy", 0.0), p["radius"], p.get("y0", 0.0)),
        "ramp-wedge": lambda p: RampWedge(p["x_start"], p["angle_rad"]),
    }
    if kind not in kinds:
        raise ConfigError(f"unknown geometry kind {kind!r}")
    return kinds[kind](params)


# ---------------------------------------------------------------------------
# 2D grid and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid2D:
    """Uniform Cartesian grid over the padded index box; point (i, j) sits at
    (x0 + i dx, y0 + j dy).  Includes whatever halo the builder allotted."""

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float

    def __post_init__(self):
        if self.dx <= 0 or self.dy <= 0:
            raise ConfigError("grid spacings must be positive")

    @property
    def h(self) -> float:
        return float(np.hypot(self.dx, self.dy))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny) * self.dy

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")


INTERIOR, GHOST, UNUSED = 0, 1, 2


@dataclass
class GhostPointMap:
    """Classification of every grid point plus per-ghost boundary data."""

    status: np.ndarray          # (nx, ny) int8, one of INTERIOR/GHOST/UNUSED
    ghost_ij: np.ndarray        # (K, 2) indices of ghost points
    foot: np.ndarray            # (K, 2) closest boundary points
    normal: np.ndarray          # (K, 2) outward unit normals
    distance: np.ndarray        # (K,)
    interior_mask: np.ndarray = field(init=False)
    ghost_mask: np.ndarray = field(init=False)

    def __post_init__(self):
        self.interior_mask = self.status == INTERIOR
        self.ghost_mask = self.status == GHOST


def _stencil_reach(interior: np.ndarray) -> np.ndarray:
    """Points within two cells of an interior point along a grid line."""
    reach = np.zeros_like(interior)
    for shift in (1, 2):
        reach[shift:, :] |= interior[:-shift, :]
        reach[:-shift, :] |= interior[shift:, :]
        reach[:, shift:] |= interior[:, :-shift]
        reach[:, :-shift] |= interior[:, shift:]
    return reach


def classify_points(grid: Grid2D, geom: Geometry, boundary_tol: float = 1e-12) -> GhostPointMap:
    """Split grid points into interior / ghost / unused and attach foot points.

    Interior means signed distance <= tol (points exactly on the boundary
    count as interior).  Ghosts are exterior points within the two-cell
    stencil reach of some interior point along a grid line."""
    feature = geom.min_feature_size()
    if feature < 5.0 * max(grid.dx, grid.dy):
        raise UnderResolvedGeometry(
            f"geometry feature size {feature:g} under-resolved by grid spacing "
            f"({grid.dx:g}, {grid.dy:g}); need >= 5 cells across")
    X, Y = grid.mesh()
    sd = geom.signed_distance(X, Y)
    tol = boundary_tol * grid.h
    interior = sd <= tol
    ghost = _stencil_reach(interior) & ~interior
    status = np.full((grid.nx, grid.ny), UNUSED, dtype=np.int8)
    status[interior] = INTERIOR
    status[ghost] = GHOST

    gi, gj = np.nonzero(ghost)
    gx, gy = X[gi, gj], Y[gi, gj]
    foot, normal, dist = geom.closest_boundary(gx, gy)
    return GhostPointMap(
        status=status,
        ghost_ij=np.stack([gi, gj], axis=1),
        foot=np.asarray(foot).T.reshape(-1, 2),
        normal=np.asarray(normal).T.reshape(-1, 2),
        distance=np.asarray(dist).reshape(-1),
    )


def foot_point(p, geom: Geometry):
    """Closest boundary point, outward normal, and distance for one point."""
    foot, normal, dist = geom.closest_boundary(np.asarray([p[0]]), np.asarray([p[1]]))
    return np.asarray(foot).reshape(2), np.asarray(normal).reshape(2), float(np.asarray(dist).reshape(()))
