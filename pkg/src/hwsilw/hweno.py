"""Interior spatial discretization: flux splitting, fifth-order Hermite WENO
flux reconstruction, the linear fourth-order mixed-derivative fluxes, the
derivative limiter, and characteristic transforms.

All kernels are elementwise over numpy arrays; callers pass pre-shifted
stencil views.  Smoothness indicators are evaluated in the scaled coordinate
zeta = (x - x_i)/dx, where they are independent of dx.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigError

GAMMA_REC = (0.99, 0.005, 0.005)   # linear weights of the flux reconstruction
D_MOD = (0.9, 0.05, 0.05)          # linear weights of the derivative limiter
EPS_INTERIOR = 1e-10

# coefficients of the quartic candidate at the right half point,
# data order (f_{i-1}, f_i, f_{i+1}, dx h_{i-1}, dx h_{i+1})
_P0_HALF = np.array([-23 / 120, 19 / 30, 67 / 120, -3 / 40, -7 / 40])
_DP0_HALF = np.array([3 / 8, -2.0, 13 / 8, 1 / 8, -3 / 8])  # times 1/dx on f part

# 4th-order central interpolation to the half point (mixed-derivative fluxes)
_C4 = np.array([-1 / 12, 7 / 12, 7 / 12, -1 / 12])


def _poly_indef_integrals(deg: int):
    """Exact scaled-monomial machinery for the beta quadratic forms."""
    def cellavg_row(l, der=0):
        row = np.zeros(deg + 1)
        for m in range(deg + 1):
            c = 1.0
            for t in range(der):
                c *= m - t
            p = m - der
            if p < 0:
                continue
            row[m] = c * ((l + 0.5) ** (p + 1) - (l - 0.5) ** (p + 1)) / (p + 1)
        return row

    def point_row(z, der=0):
        row = np.zeros(deg + 1)
        for m in range(der, deg + 1):
            c = 1.0
            for t in range(der):
                c *= m - t
            row[m] = c * z ** (m - der)
        return row

    return cellavg_row, point_row


def _beta_form(constraints, deg: int, half=0.5) -> np.ndarray:
    """Quadratic form M with beta = d^T M d for a degree-`deg` polynomial
    determined by the linear `constraints` (rows in monomial basis), with the
    smoothness integral taken over [-half, half] in scaled coordinates."""
    A = np.asarray(constraints, dtype=float)
    C = np.linalg.inv(A)
    M = np.zeros((deg + 1, deg + 1))
    for a in range(1, deg + 1):
        for m in range(a, deg + 1):
            cm = np.prod(np.arange(m, m - a, -1, dtype=float))
            for n in range(a, deg + 1):
                cn = np.prod(np.arange(n, n - a, -1, dtype=float))
                p = (m - a) + (n - a)
                M[m, n] += cm * cn * (half ** (p + 1) - (-half) ** (p + 1)) / (p + 1)
    return C.T @ M @ C


def _build_quartic_forms():
    cellavg_row, point_row = _poly_indef_integrals(4)
    # flux reconstruction quartic: cell averages of p on I_{i-1},I_i,I_{i+1},
    # cell averages of p' on I_{i-1},I_{i+1}
    rec = [cellavg_row(-1), cellavg_row(0), cellavg_row(1),
           cellavg_row(-1, der=1), cellavg_row(1, der=1)]
    # derivative limiter quartic: point values at -1,0,1, derivatives at -1,1
    mod = [point_row(-1), point_row(0), point_row(1),
           point_row(-1, der=1), point_row(1, der=1)]
    return _beta_form(rec, 4), _beta_form(mod, 4)


_B0_REC, _B0_MOD = _build_quartic_forms()


def _quadform(M, data):
    """d^T M d for stacked data vectors; data is a tuple of arrays."""
    D = np.stack(np.broadcast_arrays(*data))
    flat = D.reshape(len(data), -1)
    return np.einsum("ij,ij->j", flat, M @ flat).reshape(D.shape[1:])


# ---------------------------------------------------------------------------
# flux splitting
# ---------------------------------------------------------------------------

def flux_split(f, u, alpha):
    """Lax-Friedrichs splitting f_pm = (f +- alpha u)/2.

    The minus part is computed as f - f_plus so the two parts recombine to f
    without round-off."""
    if alpha <= 0:
        raise ConfigError(f"splitting speed must be positive, got {alpha}")
    fp = 0.5 * (f + alpha * u)
    fm = f - fp
    return fp, fm


# ---------------------------------------------------------------------------
# fifth-order HWENO flux reconstruction at x_{i+1/2}
# ---------------------------------------------------------------------------

_REC_ROWS = np.vstack([_P0_HALF, _DP0_HALF])


def hweno_flux_plus(fm1, f0, fp1, hm1, hp1, dx, nonlinear=True,
                    gamma=GAMMA_REC, eps=EPS_INTERIOR):
    """Upwind-biased reconstruction of (fhat+, hhat+) at the right half point
    from split-flux values at i-1,i,i+1 and derivative-flux values at i-1,i+1.

    The value flux carries the nonlinear weights; the derivative flux always
    uses the quartic candidate."""
    D = np.stack(np.broadcast_arrays(fm1, f0, fp1, dx * hm1, dx * hp1))
    shape = D.shape[1:]
    flat = D.reshape(5, -1)
    vals = _REC_ROWS @ flat
    p0 = vals[0].reshape(shape)
    hq = vals[1].reshape(shape) / dx
    if not nonlinear:
        return p0, hq

    p1 = -0.5 * fm1 + 1.5 * f0
    p2 = 0.5 * (f0 + fp1)
    b0 = np.einsum("ij,ij->j", flat, _B0_REC @ flat).reshape(shape)
    b1 = (f0 - fm1) ** 2
    b2 = (fp1 - f0) ** 2
    tau = 0.25 * (np.abs(b0 - b1) + np.abs(b0 - b2)) ** 2
    g0, g1, g2 = gamma
    w0 = g0 * (1.0 + tau / (b0 + eps))
    w1 = g1 * (1.0 + tau / (b1 + eps))
    w2 = g2 * (1.0 + tau / (b2 + eps))
    ws = w0 + w1 + w2
    w0, w1, w2 = w0 / ws, w1 / ws, w2 / ws
    fhat = w0 * (p0 / g0 - (g1 / g0) * p1 - (g2 / g0) * p2) + w1 * p1 + w2 * p2
    return fhat, hq


def hweno_flux_minus(f0, fp1, fp2, h0, hp2, dx, nonlinear=True,
                     gamma=GAMMA_REC, eps=EPS_INTERIOR):
    """Mirror-symmetric counterpart using values at i,i+1,i+2."""
    fhat, hq = hweno_flux_plus(fp2, fp1, f0, -hp2, -h0, dx, nonlinear, gamma, eps)
    return fhat, -hq


def linear_flux_4(fm1, f0, fp1, fp2):
    """Fourth-order central interpolation to the half point (no upwinding)."""
    return _C4[0] * fm1 + _C4[1] * f0 + _C4[2] * fp1 + _C4[3] * fp2


# ---------------------------------------------------------------------------
# derivative limiter (HWENO modification of v)
# ---------------------------------------------------------------------------

def modify_derivative(um1, u0, up1, vm1, vp1, dx, d=D_MOD, eps=EPS_INTERIOR):
    """Nonlinearly limited replacement for the first derivative at x_i."""
    D = np.stack(np.broadcast_arrays(um1, u0, up1, dx * vm1, dx * vp1))
    shape = D.shape[1:]
    flat = D.reshape(5, -1)
    q0 = (0.75 * (up1 - um1) - 0.25 * (flat[3] + flat[4]).reshape(shape)) / dx
    q1 = (u0 - um1) / dx
    q2 = (up1 - u0) / dx
    b0 = np.einsum("ij,ij->j", flat, _B0_MOD @ flat).reshape(shape)
    b1 = (u0 - um1) ** 2
    b2 = (up1 - u0) ** 2
    tau = 0.25 * (np.abs(b0 - b1) + np.abs(b0 - b2)) ** 2
    d0, d1, d2 = d
    l0 = d0 * (1.0 + tau / (b0 + eps))
    l1 = d1 * (1.0 + tau / (b1 + eps))
    l2 = d2 * (1.0 + tau / (b2 + eps))
    ls = l0 + l1 + l2
    l0, l1, l2 = l0 / ls, l1 / ls, l2 / ls
    return l0 * (q0 / d0 - (d1 / d0) * q1 - (d2 / d0) * q2) + l1 * q1 + l2 * q2


def modify_field_1d(u, v, dx):
    """Apply the limiter to all points that have both neighbours available."""
    vt = v.copy()
    vt[..., 1:-1] = modify_derivative(u[..., :-2], u[..., 1:-1], u[..., 2:],
                                      v[..., :-2], v[..., 2:], dx)
    return vt


# ---------------------------------------------------------------------------
# semi-discrete RHS, 1D
# ---------------------------------------------------------------------------

def _project(L, data):
    """Characteristic projection: (n, nv, nv) x (nv, n) -> (nv, n)."""
    return np.einsum("qab,bq->aq", L, data)


def _interface_fluxes_1d(model, U, V, dx, alpha, nonlinear=True):
    """HWENO fluxes at every interior interface.

    U, V have shape (nv, ns); interface q sits between storage points q+1 and
    q+2, so q runs over ns-3 interfaces using the full two-point halo."""
    nv, ns = U.shape
    nq = ns - 3
    F = model.flux(U)
    H = model.hflux(U, V)
    Fp, Fm = flux_split(F, U, alpha)
    Hp, Hm = flux_split(H, V, alpha)

    if model.nvar > 1:
        Uavg = 0.5 * (U[:, 1:ns - 2] + U[:, 2:ns - 1])
        L, R = model.char_x(Uavg)

        def at(data, off):
            return _project(L, data[:, 1 + off:1 + off + nq])
    else:
        L = R = None

        def at(data, off):
            return data[:, 1 + off:1 + off + nq]

    fhat_p, hhat_p = hweno_flux_plus(at(Fp, -1), at(Fp, 0), at(Fp, 1),
                                     at(Hp, -1), at(Hp, 1), dx, nonlinear)
    fhat_m, hhat_m = hweno_flux_minus(at(Fm, 0), at(Fm, 1), at(Fm, 2),
                                      at(Hm, 0), at(Hm, 2), dx, nonlinear)
    fhat = fhat_p + fhat_m
    hhat = hhat_p + hhat_m
    if model.nvar > 1:
        fhat = np.einsum("qab,bq->aq", R, fhat)
        hhat = np.einsum("qab,bq->aq", R, hhat)
    return fhat, hhat


def semi_discrete_rhs_1d(model, grid, U, V, alpha=None, nonlinear=True,
                         return_fluxes=False):
    """Conservative flux-difference RHS for the interior points.

    Ghost layers of U, V (two per side) must already be populated."""
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(V))):
        raise ConfigError("unpopulated or non-finite ghost data in RHS evaluation")
    if alpha is None:
        alpha = model.max_speed(U)
    fhat, hhat = _interface_fluxes_1d(model, U, V, grid.dx, alpha, nonlinear)
    n = grid.n
    dU = -(fhat[:, 1:n + 1] - fhat[:, 0:n]) / grid.dx
    dV = -(hhat[:, 1:n + 1] - hhat[:, 0:n]) / grid.dx
    if return_fluxes:
        return dU, dV, fhat, hhat
    return dU, dV


# ---------------------------------------------------------------------------
# semi-discrete RHS, 2D (dimension-by-dimension)
# ---------------------------------------------------------------------------

def _sweep_2d(model, U, Vn, Vt, dx, alpha, axis, nonlinear=True):
    """One-dimensional HWENO sweep along `axis` for all lines at once.

    Vn is the derivative along the sweep axis, Vt the transverse one.  Returns
    (fhat, fnhat, fthat): the value flux, the sweep-derivative flux, and the
    fourth-order linear flux of the transverse-derivative equation."""
    if axis == 1:
        flux, jvp, char = model.flux, model.hflux, model.char_x
    else:
        flux, jvp, char = model.flux_y, model.hflux_y, model.char_y

    def sh(data, off):
        # slice the sweep axis to interface-stencil positions
        ns = data.shape[axis]
        sl = [slice(None)] * data.ndim
        sl[axis] = slice(1 + off, ns - 2 + off)
        return data[tuple(sl)]

    F = flux(U)
    Fn = jvp(U, Vn)
    Ft = jvp(U, Vt)
    Fp, Fm = flux_split(F, U, alpha)
    Fnp, Fnm = flux_split(Fn, Vn, alpha)

    if model.nvar > 1:
        Uavg = 0.5 * (sh(U, 0) + sh(U, 1))
        L, R = char(Uavg)

        def at(data, off):
            return np.einsum("...ab,b...->a...", L, sh(data, off))

        def back(data):
            return np.einsum("...ab,b...->a...", R, data)
    else:
        def at(data, off):
            return sh(data, off)

        def back(data):
            return data

    fhat_p, fnhat_p = hweno_flux_plus(at(Fp, -1), at(Fp, 0), at(Fp, 1),
                                      at(Fnp, -1), at(Fnp, 1), dx, nonlinear)
    fhat_m, fnhat_m = hweno_flux_minus(at(Fm, 0), at(Fm, 1), at(Fm, 2),
                                       at(Fnm, 0), at(Fnm, 2), dx, nonlinear)
    fthat = linear_flux_4(at(Ft, -1), at(Ft, 0), at(Ft, 1), at(Ft, 2))
    return back(fhat_p + fhat_m), back(fnhat_p + fnhat_m), back(fthat)


def semi_discrete_rhs_2d(model, grid, U, V, W, interior_mask,
                         alpha_x=None, alpha_y=None, nonlinear=True):
    """Dimension-by-dimension RHS on the padded 2D arrays.

    Returns (dU, dV, dW) valid on interior points (zero elsewhere)."""
    for name, arr in (("U", U), ("V", V), ("W", W)):
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"non-finite data in field {name}")
    if alpha_x is None:
        alpha_x = model.max_speed_x(U)
    if alpha_y is None:
        alpha_y = model.max_speed_y(U)

    fhat, fxhat, fyhat = _sweep_2d(model, U, V, W, grid.dx, alpha_x, axis=1,
                                   nonlinear=nonlinear)
    ghat, gyhat, gxhat = _sweep_2d(model, U, W, V, grid.dy, alpha_y, axis=2,
                                   nonlinear=nonlinear)

    nv, nx, ny = U.shape
    dU = np.zeros_like(U)
    dV = np.zeros_like(U)
    dW = np.zeros_like(U)
    ix = slice(2, nx - 2)
    iy = slice(2, ny - 2)
    # x interfaces q..q+1 bracket storage column q+1; interior column s uses
    # interfaces s-2 and s-1 in interface numbering
    dU[:, ix, :] = -(fhat[:, 1:nx - 3, :] - fhat[:, 0:nx - 4, :]) / grid.dx
    dV[:, ix, :] = -(fxhat[:, 1:nx - 3, :] - fxhat[:, 0:nx - 4, :]) / grid.dx
    dW[:, ix, :] = -(fyhat[:, 1:nx - 3, :] - fyhat[:, 0:nx - 4, :]) / grid.dx
    dU[:, :, iy] -= (ghat[:, :, 1:ny - 3] - ghat[:, :, 0:ny - 4]) / grid.dy
    dV[:, :, iy] -= (gxhat[:, :, 1:ny - 3] - gxhat[:, :, 0:ny - 4]) / grid.dy
    dW[:, :, iy] -= (gyhat[:, :, 1:ny - 3] - gyhat[:, :, 0:ny - 4]) / grid.dy
    keep = interior_mask[None, :, :]
    dU *= keep
    dV *= keep
    dW *= keep
    return dU, dV, dW


def modify_field_2d(U, V, W, dx, dy, interior_mask):
    """Dimension-by-dimension derivative limiting of V = U_x and W = U_y."""
    Vt = V.copy()
    Wt = W.copy()
    Vt[:, 1:-1, :] = modify_derivative(U[:, :-2, :], U[:, 1:-1, :], U[:, 2:, :],
                                       V[:, :-2, :], V[:, 2:, :], dx)
    Wt[:, :, 1:-1] = modify_derivative(U[:, :, :-2], U[:, :, 1:-1], U[:, :, 2:],
                                       W[:, :, :-2], W[:, :, 2:], dy)
    keep = interior_mask[None, :, :]
    Vt = np.where(keep, Vt, V)
    Wt = np.where(keep, Wt, W)
    return Vt, Wt
