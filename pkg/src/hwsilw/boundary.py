"""Ghost-point construction in one dimension: ILW boundary derivatives, the
least-squares SILW procedure, WENO-type boundary/outflow extrapolations, and
the boundary-condition objects the time integrator drives.

All polynomial work happens in an outward-oriented local frame: the boundary
sits at s = 0, the fluid at s < 0, ghosts at s > 0, with s scaled by the
artificial-point spacing unit.  Left boundaries map to it with ct = -1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInflowSpeed, NonPhysicalState
from .grid import NGHOST

EPS_BOUNDARY = 1e-6


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SilwParams:
    """Least-squares SILW configuration.

    k: interior points in the least-squares fit (1D); kd: how many derivative
    orders the ILW recursion supplies; alpha: artificial-point spacing in
    units of dx (1D) or h (2D); weno_ghost / weno_artificial select the
    shock-robust WENO-type variants of the two polynomial constructions."""

    k: int = 3
    kd: int = 2
    alpha: float = 1.0
    eps: float = EPS_BOUNDARY
    weno_ghost: bool = False
    weno_artificial: bool = False

    def validate(self, ndim=1):
        kmin = 3 if ndim == 1 else 4
        if self.k < kmin:
            raise ConfigError(f"k >= {kmin} required in {ndim}D, got {self.k}")
        if not 1 <= self.kd <= 3:
            raise ConfigError(f"kd must be 1, 2, or 3, got {self.kd}")
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.weno_ghost and self.kd != 2:
            raise ConfigError("the WENO-type ghost polynomial needs kd = 2")
        return self


# stability-admissible alpha interval for the 2D default (k, kd) = (4, 2),
# before the min(dx,dy)/h rescaling of its upper end
ALPHA_BOUNDS_2D = (0.84, 1.74)


def check_alpha_2d(alpha, dx, dy):
    lo, hi = ALPHA_BOUNDS_2D
    hi = hi * min(dx, dy) / float(np.hypot(dx, dy))
    if not lo <= alpha <= hi:
        raise ConfigError(
            f"2D artificial-point spacing alpha={alpha} outside the "
            f"stability-admissible interval [{lo:.2f}, {hi:.2f}]")


# ---------------------------------------------------------------------------
# polynomial helpers (scaled coordinates)
# ---------------------------------------------------------------------------

def poly_row(z, deg, der=0):
    """Row of monomial values/derivatives: d^der/dz^der of z^m, m = 0..deg."""
    row = np.zeros(deg + 1)
    for m in range(der, deg + 1):
        c = 1.0
        for t in range(der):
            c *= m - t
        row[m] = c * z ** (m - der)
    return row


def poly_eval(coeffs, z, der=0):
    """Evaluate stacked polynomials (..., deg+1) at per-row points z (...)."""
    deg = coeffs.shape[-1] - 1
    out = np.zeros(np.broadcast(coeffs[..., 0], z).shape)
    for m in range(der, deg + 1):
        c = 1.0
        for t in range(der):
            c *= m - t
        out = out + c * coeffs[..., m] * z ** (m - der)
    return out


def beta_form_from_map(C, deg, half=0.5):
    """Quadratic form M with beta = d^T M d, where coefficients a = C d and
    beta = sum_{j=1}^{deg} integral over [-half, half] of (a^T z^m)^(j) squared."""
    C = np.asarray(C, dtype=float)
    M = np.zeros((deg + 1, deg + 1))
    for a in range(1, deg + 1):
        for m in range(a, deg + 1):
            cm = np.prod(np.arange(m, m - a, -1, dtype=float))
            for n in range(a, deg + 1):
                cn = np.prod(np.arange(n, n - a, -1, dtype=float))
                p = (m - a) + (n - a)
                M[m, n] += cm * cn * (half ** (p + 1) - (-half) ** (p + 1)) / (p + 1)
    return C.T @ M @ C


def _quad(M, D):
    """Batched quadratic form: D has the data axis last."""
    return np.einsum("...m,mn,...n->...", D, M, D)


# ---------------------------------------------------------------------------
# ILW boundary derivatives, scalar conservation law
# ---------------------------------------------------------------------------

def ilw_derivatives_scalar(model, g, gdot, gddot=0.0, order_max=2,
                           sonic_tol=1e-8):
    """Spatial derivatives of u at an inflow boundary from the time data.

    Returns [u, u_x, u_xx][: order_max + 1] in the physical frame.  The
    recursion divides by f'(g); speeds below sonic_tol (relative to the data
    scale) mean the boundary is characteristic and are rejected."""
    if order_max > 2:
        raise ConfigError("ILW recursion implemented through second order")
    g = float(g)
    fp = float(model.df(np.asarray(g)))
    scale = max(1.0, abs(g))
    if abs(fp) < sonic_tol * scale:
        raise DegenerateInflowSpeed(
            f"inflow speed f'(g) = {fp:.3e} is degenerate at the boundary")
    out = [g]
    if order_max >= 1:
        out.append(-float(gdot) / fp)
    if order_max >= 2:
        fpp = float(model.d2f(np.asarray(g)))
        out.append((fp * float(gddot) - 2.0 * fpp * float(gdot) ** 2) / fp ** 3)
    return out


# ---------------------------------------------------------------------------
# least-squares Hermite quartic fit
# ---------------------------------------------------------------------------

def hermite_lsq_matrix(zeta):
    """(5 x 2k) map from (u_1..u_k, vbar_1..vbar_k) to quartic coefficients,
    minimizing sum |p(z_i) - u_i|^2 + |p'(z_i) - vbar_i|^2 in scaled coords."""
    zeta = np.asarray(zeta, dtype=float)
    k = len(zeta)
    if k < 3:
        raise ConfigError("least-squares quartic needs at least 3 Hermite points")
    A = np.zeros((2 * k, 5))
    for i, z in enumerate(zeta):
        A[i] = poly_row(z, 4)
        A[k + i] = poly_row(z, 4, der=1)
    return np.linalg.pinv(A)


def least_squares_hermite_fit_1d(x, u, v, dx, x_origin=0.0):
    """Quartic p(x) minimizing sum (p(x_i)-u_i)^2 + dx^2 (p'(x_i)-v_i)^2.

    Returns coefficients of p in the scaled coordinate (x - x_origin)/dx,
    stacked over any leading axes of u, v."""
    zeta = (np.asarray(x, dtype=float) - x_origin) / dx
    S = hermite_lsq_matrix(zeta)
    data = np.concatenate([np.asarray(u, dtype=float),
                           dx * np.asarray(v, dtype=float)], axis=-1)
    return np.einsum("cm,...m->...c", S, data)


# ---------------------------------------------------------------------------
# WENO-type boundary extrapolation (value + slope at 0, three inner values)
# ---------------------------------------------------------------------------

class _GhostWenoTables:
    """Candidate solve/beta tables for the boundary extrapolation at fixed
    artificial spacing alpha (nodes 0, -alpha, -2 alpha, -3 alpha)."""

    def __init__(self, alpha):
        self.alpha = float(alpha)
        self.maps = []    # (deg+1, ndata) coefficient maps, data = (u0,s0,u1,u2,u3)
        self.betas = []   # quadratic forms over the same data
        nodes = [-alpha, -2 * alpha, -3 * alpha]
        for deg in range(5):
            rows = [poly_row(0.0, deg)]
            if deg >= 1:
                rows.append(poly_row(0.0, deg, der=1))
            for z in nodes[:max(0, deg - 1)]:
                rows.append(poly_row(z, deg))
            C = np.linalg.inv(np.array(rows))
            # embed into the full data vector (u0, s0, u*1, u*2, u*3)
            ndata = 1 + (1 if deg >= 1 else 0) + max(0, deg - 1)
            full = np.zeros((deg + 1, 5))
            cols = [0] + ([1] if deg >= 1 else []) + list(range(2, 2 + max(0, deg - 1)))
            full[:, cols] = C[:, :ndata]
            self.maps.append(full)
            self.betas.append(beta_form_from_map(full, deg) if deg >= 1 else None)


_ghost_tables: dict[float, _GhostWenoTables] = {}


def _ghost_weno_tables(alpha):
    key = round(float(alpha), 12)
    if key not in _ghost_tables:
        _ghost_tables[key] = _GhostWenoTables(alpha)
    return _ghost_tables[key]


def hweno_extrapolate_boundary(u0, slope0, ustars, alpha, delta, eps=EPS_BOUNDARY):
    """WENO-weighted extrapolation polynomial from the boundary value, the
    boundary slope, and three artificial inner values.

    Inputs are in the scaled outward frame (slope0 = delta * du/ds, artificial
    values at s = -m alpha delta); returns quartic coefficients (..., 5) in
    zeta = s/delta.  Degenerates toward low-order candidates near shocks."""
    tabs = _ghost_weno_tables(alpha)
    u0 = np.asarray(u0, dtype=float)
    D = np.stack([u0, np.broadcast_to(slope0, u0.shape),
                  *(np.broadcast_to(ustars[..., m], u0.shape) for m in range(3))],
                 axis=-1)
    d_lin = np.array([delta ** 4, delta ** 3, delta ** 2, delta,
                      1.0 - delta ** 4 - delta ** 3 - delta ** 2 - delta])
    betas = [np.full(u0.shape, delta ** 2)]
    for i in range(1, 5):
        betas.append(_quad(tabs.betas[i], D))
    gam = [d_lin[i] / (eps + betas[i]) ** 2 for i in range(5)]
    gsum = sum(gam)
    coeffs = np.zeros(u0.shape + (5,))
    for i in range(5):
        w = gam[i] / gsum
        c = np.einsum("cm,...m->...c", tabs.maps[i], D)
        coeffs[..., :c.shape[-1]] += w[..., None] * c
    return coeffs


def plain_ghost_poly(bc_derivs_scaled, ustars, alpha, kd):
    """Quartic with kd derivative conditions at 0 and 5-kd artificial values
    at s = -m alpha (scaled frame); coefficients (..., 5)."""
    nart = 5 - kd
    rows = [poly_row(0.0, 4, der=j) for j in range(kd)]
    rows += [poly_row(-m * alpha, 4) for m in range(1, nart + 1)]
    Minv = np.linalg.inv(np.array(rows))
    D = np.concatenate([np.stack(bc_derivs_scaled, axis=-1), ustars], axis=-1)
    return np.einsum("cm,...m->...c", Minv, D)


# ---------------------------------------------------------------------------
# WENO-type outflow extrapolation (Hermite data at the last three points)
# ---------------------------------------------------------------------------

class _OutflowTables:
    def __init__(self):
        self.maps = []
        self.betas = []
        # data vector (u0, vb0, u1, vb1, u2, vb2) at nodes 0, -1, -2
        for deg, npts in ((1, 1), (3, 2), (5, 3)):
            rows = []
            cols = []
            for i in range(npts):
                rows.append(poly_row(-float(i), deg))
                rows.append(poly_row(-float(i), deg, der=1))
                cols += [2 * i, 2 * i + 1]
            C = np.linalg.inv(np.array(rows))
            full = np.zeros((deg + 1, 6))
            full[:, cols] = C
            self.maps.append(full)
            self.betas.append(beta_form_from_map(full, deg))


_outflow_tables = _OutflowTables()


def hweno_extrapolate_outflow(u_in, vbar_in, delta, eps=EPS_BOUNDARY):
    """Extrapolation polynomial from Hermite data at the last three interior
    points (scaled outward frame: nodes 0, -1, -2; vbar = delta * du/ds).

    u_in, vbar_in: (..., 3) ordered from the boundary-adjacent point inward.
    Returns quintic coefficients (..., 6)."""
    u_in = np.asarray(u_in, dtype=float)
    vbar_in = np.asarray(vbar_in, dtype=float)
    D = np.stack([u_in[..., 0], vbar_in[..., 0], u_in[..., 1], vbar_in[..., 1],
                  u_in[..., 2], vbar_in[..., 2]], axis=-1)
    d_lin = np.array([delta ** 4, delta ** 2, 1.0 - delta ** 2 - delta ** 4])
    gsum = 0.0
    gam = []
    for i in range(3):
        beta = _quad(_outflow_tables.betas[i], D)
        g = d_lin[i] / (eps + beta) ** 2
        gam.append(g)
        gsum = gsum + g
    coeffs = np.zeros(D.shape[:-1] + (6,))
    for i in range(3):
        w = gam[i] / gsum
        c = np.einsum("cm,...m->...c", _outflow_tables.maps[i], D)
        coeffs[..., :c.shape[-1]] += w[..., None] * c
    return coeffs


class _ValueExtrapTables:
    def __init__(self):
        self.maps = []
        self.betas = []
        for deg in range(4):
            rows = [poly_row(-float(i), deg) for i in range(deg + 1)]
            C = np.linalg.inv(np.array(rows))
            full = np.zeros((deg + 1, 4))
            full[:, :deg + 1] = C
            self.maps.append(full)
            self.betas.append(beta_form_from_map(full, deg) if deg >= 1 else None)


_value_tables = _ValueExtrapTables()


def weno_extrapolate_values(vals, delta, eps=EPS_BOUNDARY):
    """Value-only WENO extrapolation from four points at nodes 0,-1,-2,-3;
    used for transverse-derivative ghosts at outflow edges.  Returns cubic
    coefficients (..., 4)."""
    D = np.asarray(vals, dtype=float)
    d_lin = np.array([delta ** 3, delta ** 2, delta,
                      1.0 - delta ** 3 - delta ** 2 - delta])
    betas = [np.full(D.shape[:-1], delta ** 2)]
    for i in range(1, 4):
        betas.append(_quad(_value_tables.betas[i], D))
    gam = [d_lin[i] / (eps + betas[i]) ** 2 for i in range(4)]
    gsum = sum(gam)
    coeffs = np.zeros(D.shape[:-1] + (4,))
    for i in range(4):
        w = gam[i] / gsum
        c = np.einsum("cm,...m->...c", _value_tables.maps[i], D)
        coeffs[..., :c.shape[-1]] += w[..., None] * c
    return coeffs


# ---------------------------------------------------------------------------
# least-squares WENO variant for the artificial values
# ---------------------------------------------------------------------------

class _LsqWenoTables:
    """Candidates of degree 0/2/4 least-squares fitted to Hermite data at the
    first 1/2/3 interior points; tables depend on the interior abscissae."""

    def __init__(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        self.maps = []
        self.betas = []
        # data vector: (u1, vb1, u2, vb2, u3, vb3)
        for deg, npts in ((0, 1), (2, 2), (4, 3)):
            A = np.zeros((2 * npts, deg + 1))
            for i in range(npts):
                A[2 * i] = poly_row(zeta[i], deg)
                A[2 * i + 1] = poly_row(zeta[i], deg, der=1)
            if deg == 0:
                C = np.array([[1.0, 0.0]])  # constant candidate from u1 alone
            else:
                C = np.linalg.pinv(A)
            full = np.zeros((deg + 1, 6))
            cols = []
            for i in range(npts):
                cols += [2 * i, 2 * i + 1]
            full[:, cols] = C
            self.maps.append(full)
            self.betas.append(beta_form_from_map(full, deg) if deg >= 1 else None)


def lsq_weno_fit(zeta, u, vbar, delta, eps=EPS_BOUNDARY):
    """Shock-robust replacement for the plain least-squares quartic: WENO
    combination of degree-0/2/4 least-squares candidates on the first three
    interior Hermite pairs.  Returns quartic coefficients (..., 5)."""
    tabs = _LsqWenoTables(zeta[:3])
    u = np.asarray(u, dtype=float)
    D = np.stack([u[..., 0], vbar[..., 0], u[..., 1], vbar[..., 1],
                  u[..., 2], vbar[..., 2]], axis=-1)
    d_lin = np.array([delta ** 4, delta ** 2, 1.0 - delta ** 2 - delta ** 4])
    betas = [np.full(D.shape[:-1], delta ** 2)]
    for i in (1, 2):
        betas.append(_quad(tabs.betas[i], D))
    gam = [d_lin[i] / (eps + betas[i]) ** 2 for i in range(3)]
    gsum = sum(gam)
    coeffs = np.zeros(D.shape[:-1] + (5,))
    for i in range(3):
        w = gam[i] / gsum
        c = np.einsum("cm,...m->...c", tabs.maps[i], D)
        coeffs[..., :c.shape[-1]] += w[..., None] * c
    return coeffs


# ---------------------------------------------------------------------------
# single-side SILW driver in the scaled outward frame
# ---------------------------------------------------------------------------

def silw_ghost_line(zeta_in, u_in, vbar_in, bc_derivs_scaled, params: SilwParams,
                    delta, zeta_ghosts):
    """Values and scaled slopes at ghost abscissae from interior Hermite data
    plus ILW boundary derivatives.

    zeta_in: (k,) interior abscissae (negative, scaled by delta); u_in,
    vbar_in: (..., k); bc_derivs_scaled: list of kd arrays, the j-th being
    delta^j d^j u/ds^j at the boundary; zeta_ghosts: (m,) positive."""
    u_in = np.asarray(u_in, dtype=float)
    lead = u_in.shape[:-1]
    bc_derivs_scaled = [np.broadcast_to(np.asarray(d, dtype=float), lead)
                        for d in bc_derivs_scaled]
    if params.weno_artificial:
        fit = lsq_weno_fit(zeta_in, u_in, vbar_in, delta, params.eps)
    else:
        S = hermite_lsq_matrix(zeta_in)
        D = np.concatenate([u_in, vbar_in], axis=-1)
        fit = np.einsum("cm,...m->...c", S, D)
    nart = 5 - params.kd
    zart = -params.alpha * np.arange(1, nart + 1)
    ustars = poly_eval(fit[..., None, :], zart)
    if params.weno_ghost:
        coeffs = hweno_extrapolate_boundary(bc_derivs_scaled[0],
                                            bc_derivs_scaled[1], ustars,
                                            params.alpha, delta, params.eps)
    else:
        coeffs = plain_ghost_poly(bc_derivs_scaled, ustars, params.alpha, params.kd)
    ug = poly_eval(coeffs[..., None, :], zeta_ghosts)
    sg = poly_eval(coeffs[..., None, :], zeta_ghosts, der=1)
    return ug, sg


def silw_ghost_1d(x_interior, u, v, bc_derivs, params: SilwParams, dx,
                  x_boundary, x_ghosts, orientation):
    """SILW ghost values for one boundary of a 1D scalar problem.

    bc_derivs: physical-frame [u, u_x, ...] at the boundary (kd entries);
    orientation: -1 for a left boundary (outward = -x), +1 for a right one.
    Returns (u_ghost, v_ghost) in the physical frame."""
    params.validate(ndim=1)
    ct = float(orientation)
    zeta_in = ct * (np.asarray(x_interior, dtype=float) - x_boundary) / dx
    vbar = ct * dx * np.asarray(v, dtype=float)
    derivs = [np.asarray(d, dtype=float) * (ct * dx) ** j
              for j, d in enumerate(bc_derivs[:params.kd])]
    zg = ct * (np.asarray(x_ghosts, dtype=float) - x_boundary) / dx
    ug, sg = silw_ghost_line(zeta_in, np.asarray(u, dtype=float), vbar,
                             derivs, params, dx, zg)
    return ug, ct * sg / dx


# ---------------------------------------------------------------------------
# time signals and RK stage corrections
# ---------------------------------------------------------------------------

class TimeSignal:
    """Boundary data g(t) with first and second time derivatives.

    Analytic derivatives are used when supplied; otherwise fourth-order
    central differences of g with step dt_hint/4 stand in (the route for data
    only available through an implicit solve)."""

    def __init__(self, g, gdot=None, gddot=None):
        self.g = g
        self.gdot = gdot
        self.gddot = gddot

    def eval(self, t, dt_hint):
        h = max(dt_hint, 1e-12) / 4.0
        g0 = self.g(t)
        if self.gdot is not None:
            d1 = self.gdot(t)
        else:
            d1 = (self.g(t - 2 * h) - 8 * self.g(t - h)
                  + 8 * self.g(t + h) - self.g(t + 2 * h)) / (12 * h)
        if self.gddot is not None:
            d2 = self.gddot(t)
        elif self.gdot is not None:
            d2 = (self.gdot(t - 2 * h) - 8 * self.gdot(t - h)
                  + 8 * self.gdot(t + h) - self.gdot(t + 2 * h)) / (12 * h)
        else:
            d2 = (-self.g(t - 2 * h) + 16 * self.g(t - h) - 30 * g0
                  + 16 * self.g(t + h) - self.g(t + 2 * h)) / (12 * h * h)
        return g0, d1, d2

    @staticmethod
    def constant(value):
        return TimeSignal(lambda t: value, lambda t: 0.0, lambda t: 0.0)


def stage_shift(g, gdot, gddot, dt, stage):
    """Boundary value and slope corrected for the RK stage being built."""
    if stage == 0:
        return g, gdot
    if stage == 1:
        return g + dt * gdot, gdot + dt * gddot
    if stage == 2:
        return g + 0.5 * dt * gdot + 0.25 * dt * dt * gddot, gdot + 0.5 * dt * gddot
    raise ConfigError(f"unknown RK stage {stage}")


# ---------------------------------------------------------------------------
# 1D boundary conditions
# ---------------------------------------------------------------------------

class BoundarySide1D:
    """Fills the two ghost points of one side; orientation -1 = left."""

    needs_stage_data = True

    def fill(self, model, grid, U, V, t, dt, stage, params):
        raise NotImplementedError


def _side_layout(grid, orientation):
    """Storage indices of (interior-from-boundary, ghosts) plus geometry."""
    n = grid.n
    if orientation < 0:
        inner = np.arange(NGHOST, grid.n_tot)
        ghosts = np.array([NGHOST - 1, NGHOST - 2])
        xb = grid.x_left
    else:
        inner = np.arange(NGHOST + n - 1, -1, -1)
        ghosts = np.array([NGHOST + n, NGHOST + n + 1])
        xb = grid.x_right
    return inner, ghosts, xb


class ScalarDirichlet1D(BoundarySide1D):
    """Inflow Dirichlet u = g(t) for scalar laws, via the SILW procedure."""

    def __init__(self, signal: TimeSignal, orientation):
        self.signal = signal
        self.orientation = orientation

    def fill(self, model, grid, U, V, t, dt, stage, params):
        g, d1, d2 = self.signal.eval(t, dt)
        gs, gs_dot = stage_shift(g, d1, d2, dt, stage)
        derivs = ilw_derivatives_scalar(model, gs, gs_dot, d2,
                                        order_max=params.kd - 1)
        inner, ghosts, xb = _side_layout(grid, self.orientation)
        sel = inner[:params.k]
        ug, vg = silw_ghost_1d(grid.x(sel), U[:, sel], V[:, sel], derivs,
                               params, grid.dx, xb, grid.x(ghosts),
                               self.orientation)
        U[:, ghosts] = ug
        V[:, ghosts] = vg


class SystemDirichlet1D(BoundarySide1D):
    """Characteristic ILW for 1D systems with prescribed boundary data.

    prescribe lists (kind, signal) pairs in the order they are consumed as
    ingoing-characteristic conditions; kinds: "component:<m>" fixes conserved
    component m, "rho"/"velocity" fix Euler primitives (rho must accompany
    velocity so the momentum row stays linear), "wall" fixes the outward
    momentum to zero."""

    def __init__(self, prescribe, orientation):
        self.prescribe = prescribe
        self.orientation = orientation

    def _rows(self, model, n_bc, t, dt, stage):
        ct = float(self.orientation)
        nv = model.nvar
        rows = np.zeros((n_bc, nv))
        vals = np.zeros(n_bc)
        dvals = np.zeros(n_bc)
        sig_cache = {}

        def sig_eval(key, signal):
            if key not in sig_cache:
                g, d1, d2 = signal.eval(t, dt)
                sig_cache[key] = stage_shift(g, d1, d2, dt, stage)
            return sig_cache[key]

        if n_bc > len(self.prescribe):
            raise ConfigError(
                f"boundary needs {n_bc} conditions but only "
                f"{len(self.prescribe)} are prescribed")
        names = [kind for kind, _ in self.prescribe]
        for r, (kind, signal) in enumerate(self.prescribe[:n_bc]):
            if kind.startswith("component:"):
                m = int(kind.split(":")[1])
                rows[r, m] = 1.0
                vals[r], dvals[r] = sig_eval(kind, signal)
            elif kind == "rho":
                rows[r, 0] = 1.0
                vals[r], dvals[r] = sig_eval(kind, signal)
            elif kind == "velocity":
                if "rho" not in names[:n_bc]:
                    raise ConfigError("velocity data needs rho prescribed too")
                rho, rho_dot = sig_eval("rho", dict(self.prescribe)["rho"])
                uu, uu_dot = sig_eval(kind, signal)
                rows[r, 1] = 1.0
                vals[r] = rho * ct * uu
                dvals[r] = ct * (rho_dot * uu + rho * uu_dot)
            elif kind == "wall":
                rows[r, 1] = 1.0
            else:
                raise ConfigError(f"unknown prescription kind {kind!r}")
        return rows, vals, dvals

    def fill(self, model, grid, U, V, t, dt, stage, params):
        if params.kd > 2:
            raise ConfigError("system ILW path supports kd <= 2")
        ct = float(self.orientation)
        inner, ghosts, xb = _side_layout(grid, self.orientation)
        sel = inner[:params.k]
        zeta = ct * (grid.x(sel) - xb) / grid.dx
        Uh = model.to_hat(U[:, sel], ct)
        Vh_bar = ct * grid.dx * model.to_hat(V[:, sel], ct)

        S = hermite_lsq_matrix(zeta)
        fit = np.einsum("cm,vm->vc", S, np.concatenate([Uh, Vh_bar], axis=-1))
        U_ext = poly_eval(fit, 0.0)
        dUext = poly_eval(fit, 0.0, der=1) / grid.dx  # d/ds, physical

        lam, L, R = model.hat_eigen_x(U_ext[:, None], ct)
        lam, L = lam[0], L[0]
        n_bc = int(np.sum(lam < 0.0))
        rows, vals, dvals = self._rows(model, n_bc, t, dt, stage)
        nv = model.nvar

        A_sys = np.zeros((nv, nv))
        rhs = np.zeros(nv)
        A_sys[:n_bc] = rows
        rhs[:n_bc] = vals
        A_sys[n_bc:] = L[n_bc:]
        rhs[n_bc:] = L[n_bc:] @ U_ext
        Ustar = np.linalg.solve(A_sys, rhs)

        Ajac = model.hat_jac_x(Ustar[:, None], ct)[0]
        A2 = np.zeros((nv, nv))
        r2 = np.zeros(nv)
        A2[:n_bc] = rows @ Ajac
        r2[:n_bc] = -dvals
        A2[n_bc:] = L[n_bc:]
        r2[n_bc:] = L[n_bc:] @ dUext
        dUstar = np.linalg.solve(A2, r2)

        nart = 5 - params.kd
        zart = -params.alpha * np.arange(1, nart + 1)
        if params.weno_artificial:
            arts = poly_eval(lsq_weno_fit(zeta, Uh, Vh_bar, grid.dx,
                                          params.eps)[..., None, :], zart)
        else:
            arts = poly_eval(fit[..., None, :], zart)

        derivs = [Ustar, grid.dx * dUstar]
        if params.kd == 1:
            derivs = derivs[:1]
        zg = ct * (grid.x(ghosts) - xb) / grid.dx
        if params.weno_ghost:
            coeffs = hweno_extrapolate_boundary(derivs[0], derivs[1], arts,
                                                params.alpha, grid.dx, params.eps)
        else:
            coeffs = plain_ghost_poly(derivs, arts, params.alpha, params.kd)
        ug = poly_eval(coeffs[..., None, :], zg)
        sg = poly_eval(coeffs[..., None, :], zg, der=1)
        U[:, ghosts] = model.from_hat(ug, ct)
        V[:, ghosts] = model.from_hat(ct * sg / grid.dx, ct)


class Wall1D(SystemDirichlet1D):
    """Solid reflective wall: no penetration through the ILW path."""

    def __init__(self, orientation):
        super().__init__([("wall", None)], orientation)
        self.signature = None

    def fill(self, model, grid, U, V, t, dt, stage, params):
        # the wall fixes the case-2 row structure regardless of transient
        # eigenvalue signatures; a fully supersonic approach (all ingoing)
        # leaves nothing to extrapolate and is rejected
        if params.kd > 2:
            raise ConfigError("system ILW path supports kd <= 2")
        ct = float(self.orientation)
        inner, _, xb = _side_layout(grid, self.orientation)
        sel = inner[:params.k]
        zeta = ct * (grid.x(sel) - xb) / grid.dx
        Uh = model.to_hat(U[:, sel], ct)
        Vh_bar = ct * grid.dx * model.to_hat(V[:, sel], ct)
        S = hermite_lsq_matrix(zeta)
        fit = np.einsum("cm,vm->vc", S, np.concatenate([Uh, Vh_bar], axis=-1))
        U_ext = poly_eval(fit, 0.0)
        lam, _, _ = model.hat_eigen_x(U_ext[:, None], ct)
        self.signature = int(np.sum(lam[0] < 0.0))
        if self.signature == model.nvar:
            raise NonPhysicalState(
                "all characteristics enter the wall (u_n + c < 0)", state=U_ext)
        self._fill_fixed(model, grid, U, V, params, fit, U_ext)

    def _fill_fixed(self, model, grid, U, V, params, fit, U_ext):
        ct = float(self.orientation)
        inner, ghosts, xb = _side_layout(grid, self.orientation)
        dUext = poly_eval(fit, 0.0, der=1) / grid.dx
        lam, L, R = model.hat_eigen_x(U_ext[:, None], ct)
        L = L[0]
        nv = model.nvar
        A_sys = np.zeros((nv, nv))
        rhs = np.zeros(nv)
        A_sys[0, 1] = 1.0
        A_sys[1:] = L[1:]
        rhs[1:] = L[1:] @ U_ext
        Ustar = np.linalg.solve(A_sys, rhs)
        Ajac = model.hat_jac_x(Ustar[:, None], ct)[0]
        A2 = np.zeros((nv, nv))
        r2 = np.zeros(nv)
        A2[0] = Ajac[1]
        A2[1:] = L[1:]
        r2[1:] = L[1:] @ dUext
        dUstar = np.linalg.solve(A2, r2)

        nart = 5 - params.kd
        zart = -params.alpha * np.arange(1, nart + 1)
        zeta = ct * (grid.x(inner[:params.k]) - xb) / grid.dx
        Uh = model.to_hat(U[:, inner[:params.k]], ct)
        Vh_bar = ct * grid.dx * model.to_hat(V[:, inner[:params.k]], ct)
        if params.weno_artificial:
            arts = poly_eval(lsq_weno_fit(zeta, Uh, Vh_bar, grid.dx,
                                          params.eps)[..., None, :], zart)
        else:
            arts = poly_eval(fit[..., None, :], zart)
        derivs = [Ustar, grid.dx * dUstar][:max(1, params.kd)]
        zg = ct * (grid.x(ghosts) - xb) / grid.dx
        if params.weno_ghost:
            coeffs = hweno_extrapolate_boundary(derivs[0], derivs[1], arts,
                                                params.alpha, grid.dx, params.eps)
        else:
            coeffs = plain_ghost_poly(derivs, arts, params.alpha, params.kd)
        ug = poly_eval(coeffs[..., None, :], zg)
        sg = poly_eval(coeffs[..., None, :], zg, der=1)
        U[:, ghosts] = model.from_hat(ug, ct)
        V[:, ghosts] = model.from_hat(ct * sg / grid.dx, ct)


class Outflow1D(BoundarySide1D):
    """WENO-type Hermite extrapolation; no boundary data consumed."""

    needs_stage_data = False

    def __init__(self, orientation):
        self.orientation = orientation

    def fill(self, model, grid, U, V, t, dt, stage, params):
        ct = float(self.orientation)
        inner, ghosts, xb = _side_layout(grid, self.orientation)
        sel = inner[:3]
        u_in = U[:, sel]
        vbar_in = ct * grid.dx * V[:, sel]
        coeffs = hweno_extrapolate_outflow(u_in, vbar_in, grid.dx, params.eps)
        zg = np.array([1.0, 2.0])
        U[:, ghosts] = poly_eval(coeffs[..., None, :], zg)
        V[:, ghosts] = ct * poly_eval(coeffs[..., None, :], zg, der=1) / grid.dx


class Reflective1D(BoundarySide1D):
    """Mirror-image ghost population (velocity flips sign); requires the grid
    to be symmetric about the boundary (offset fraction 0 or 1/2)."""

    needs_stage_data = False

    def __init__(self, orientation):
        self.orientation = orientation

    def fill(self, model, grid, U, V, t, dt, stage, params):
        inner, ghosts, xb = _side_layout(grid, self.orientation)
        off = grid.c_a if self.orientation < 0 else grid.c_b
        start = 1 if abs(off) < 1e-12 else 0
        if not (abs(off) < 1e-12 or abs(off - 0.5) < 1e-12):
            raise ConfigError("reflective wall needs offset fraction 0 or 1/2")
        mirror = inner[start:start + 2]
        if model.nvar >= 3:
            # density/energy even, momentum odd; x-derivatives flip parity
            U[:, ghosts] = U[:, mirror]
            U[1, ghosts] = -U[1, mirror]
            V[:, ghosts] = -V[:, mirror]
            V[1, ghosts] = V[1, mirror]
        else:
            U[:, ghosts] = U[:, mirror]
            V[:, ghosts] = -V[:, mirror]


class Periodic1D:
    """Joint wrap-around fill of both halos."""

    needs_stage_data = False

    def fill_both(self, grid, U, V):
        n = grid.n
        U[:, :NGHOST] = U[:, n:n + NGHOST]
        V[:, :NGHOST] = V[:, n:n + NGHOST]
        U[:, n + NGHOST:] = U[:, NGHOST:2 * NGHOST]
        V[:, n + NGHOST:] = V[:, NGHOST:2 * NGHOST]
