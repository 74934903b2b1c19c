"""Fully discrete linear stability analysis of the scheme with the SILW
boundary treatment: periodic Fourier symbols, boundary-augmented matrices in
scaled variables (u_i, dx v_i), spectral scans, and the admissible-alpha
search over the boundary-offset fraction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import poly_row
from .errors import ConfigError

# interior scheme row coefficients for du/dt and d(dx v)/dt, offsets -2..+1,
# in the scaled variables; multiply by -c/dx
_CU = np.array([23 / 120, -33 / 40, 3 / 40, 67 / 120])
_CUV = np.array([3 / 40, -3 / 40, 7 / 40, -7 / 40])
_CV = np.array([-3 / 8, 19 / 8, -29 / 8, 13 / 8])
_CVV = np.array([-1 / 8, 1 / 8, 3 / 8, -3 / 8])


# ---------------------------------------------------------------------------
# periodic Fourier symbol
# ---------------------------------------------------------------------------

def periodic_symbol(xi, dx=1.0):
    """2x2 symbols (Q1, Q2) of the linear scheme and the derivative limiter.

    xi may be an array; returns arrays shaped xi.shape + (2, 2).  The dx
    factors sit on the off-diagonal entries and cancel in the eigenvalues."""
    xi = np.asarray(xi, dtype=float)
    c1, s1 = np.cos(xi), np.sin(xi)
    c2, s2 = np.cos(2 * xi), np.sin(2 * xi)
    q1 = (-23 / 120 * c2 + 4 / 15 * c1 - 3 / 40) + 1j * (23 / 120 * s2 - 83 / 60 * s1)
    q2 = dx * ((-3 / 40 * c2 + 1 / 4 * c1 - 7 / 40) + 1j * (3 / 40 * s2 + 1 / 10 * s1))
    q3 = (1 / dx) * ((3 / 8 * c2 - 4 * c1 + 29 / 8) + 1j * (-3 / 8 * s2 + 3 / 4 * s1))
    q4 = (1 / 8 * c2 + 1 / 4 * c1 - 3 / 8) + 1j * (-1 / 8 * s2 + 1 / 2 * s1)
    Q1 = np.empty(xi.shape + (2, 2), dtype=complex)
    Q1[..., 0, 0], Q1[..., 0, 1] = q1, q2
    Q1[..., 1, 0], Q1[..., 1, 1] = q3, q4
    Q2 = np.zeros(xi.shape + (2, 2), dtype=complex)
    Q2[..., 0, 0] = 1.0
    Q2[..., 1, 0] = 1.5 / dx * 1j * s1
    Q2[..., 1, 1] = -0.5 * c1
    return Q1, Q2


def rk3_amplification(Q1, Q2, lam):
    """G = Q2/3 + 2/3 (Q2 + lam Q1)(3/4 Q2 + 1/4 (Q2 + lam Q1)^2)."""
    E = Q2 + lam * Q1
    return Q2 / 3.0 + 2.0 / 3.0 * (E @ (0.75 * Q2 + 0.25 * (E @ E)))


def periodic_max_amplification(lam, n_xi=20001, dx=1.0):
    """max over the sampled phases of the spectral radius of G."""
    xi = np.linspace(0.0, 2 * np.pi, n_xi)
    Q1, Q2 = periodic_symbol(xi, dx)
    G = rk3_amplification(Q1, Q2, lam)
    return float(np.abs(np.linalg.eigvals(G)).max())


def periodic_cfl_bound(n_xi=20001, lo=0.5, hi=2.0, tol=1e-3, slack=1e-10):
    """Largest CFL number with all symbol eigenvalues inside the unit circle,
    by bisection over [lo, hi] to the given tolerance."""
    if periodic_max_amplification(hi, n_xi) <= 1 + slack:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if periodic_max_amplification(mid, n_xi) <= 1 + slack:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# boundary-augmented matrices
# ---------------------------------------------------------------------------

def silw_ghost_rows(k, kd, alpha, c_a):
    """(4 x 2k) linear map from interior (u_1..u_k, vb_1..vb_k) to the ghost
    data (u_0, u_-1, vb_0, vb_-1) for homogeneous Dirichlet inflow.

    Implements the least-squares SILW construction with every boundary
    derivative zero, in the scaled inward coordinate zeta = x/dx."""
    zi = c_a + np.arange(k, dtype=float)
    A = np.zeros((2 * k, 5))
    for i, z in enumerate(zi):
        A[i] = poly_row(z, 4)
        A[k + i] = poly_row(z, 4, der=1)
    S = np.linalg.pinv(A)
    nart = 5 - kd
    art = np.array([poly_row(m * alpha, 4) for m in range(1, nart + 1)]) @ S
    M = np.array([[(m * alpha) ** p for p in range(kd, 5)]
                  for m in range(1, nart + 1)])
    qc = np.linalg.solve(M, art)       # coefficients a_kd..a_4
    rows = [poly_row(zg, 4)[kd:] @ qc for zg in (c_a - 1.0, c_a - 2.0)]
    rows += [poly_row(zg, 4, der=1)[kd:] @ qc for zg in (c_a - 1.0, c_a - 2.0)]
    return np.vstack(rows)


def outflow_ghost_rows():
    """(4 x 6) map from (u_N, u_N-1, u_N-2, vb_N, vb_N-1, vb_N-2) to
    (u_N+1, u_N+2, vb_N+1, vb_N+2): quintic Hermite extrapolation, the
    smooth-data limit of the WENO-type outflow construction."""
    A = np.zeros((6, 6))
    for i, z in enumerate((0.0, -1.0, -2.0)):
        A[i] = poly_row(z, 5)
        A[3 + i] = poly_row(z, 5, der=1)
    Ai = np.linalg.inv(A)
    return np.vstack([poly_row(1.0, 5) @ Ai, poly_row(2.0, 5) @ Ai,
                      poly_row(1.0, 5, der=1) @ Ai, poly_row(2.0, 5, der=1) @ Ai])


@dataclass
class AmplificationOperator:
    """Fully discrete one-step operator for the Dirichlet/outflow line."""

    G: np.ndarray
    lambda_cfl: float
    c_a: float
    k: int
    kd: int
    alpha: float

    def spectral_radius(self):
        return float(np.abs(np.linalg.eigvals(self.G)).max())


_base_cache: dict[int, tuple] = {}


def _q_base(N):
    """Interior + outflow part of (Q1, Q2); the left-ghost references are the
    only (alpha, c_a)-dependent pieces and are patched in afterwards."""
    if N in _base_cache:
        return _base_cache[N]
    if N < 20:
        raise ConfigError("boundary blocks overlap below N = 20")
    gr = outflow_ghost_rows()
    nu = 2 * N

    def urow(j):
        row = np.zeros(nu)
        if 1 <= j <= N:
            row[j - 1] = 1.0
        elif j > N:
            g = gr[j - N - 1]
            row[N - 1:N - 4:-1] = g[:3]
            row[nu - 1:nu - 4:-1] = g[3:]
        return row

    def vrow(j):
        row = np.zeros(nu)
        if 1 <= j <= N:
            row[N + j - 1] = 1.0
        elif j > N:
            g = gr[j - N + 1]
            row[N - 1:N - 4:-1] = g[:3]
            row[nu - 1:nu - 4:-1] = g[3:]
        return row

    Q1 = np.zeros((nu, nu))
    Q2 = np.zeros((nu, nu))
    for i in range(1, N + 1):
        au = np.zeros(nu)
        av = np.zeros(nu)
        for off, cu, cuv, cv, cvv in zip((-2, -1, 0, 1), _CU, _CUV, _CV, _CVV):
            ur, vr = urow(i + off), vrow(i + off)
            au -= cu * ur + cuv * vr
            av -= cv * ur + cvv * vr
        Q1[i - 1] = au
        Q1[N + i - 1] = av
        Q2[i - 1] = urow(i)
        Q2[N + i - 1] = 0.75 * (urow(i + 1) - urow(i - 1)) \
            - 0.25 * (vrow(i - 1) + vrow(i + 1))
    _base_cache[N] = (Q1, Q2)
    return Q1, Q2


def _q_matrices(N, k, kd, alpha, c_a):
    """(Q1, Q2) on the interior unknowns with both ghost layers eliminated."""
    if k < 3:
        raise ConfigError("least-squares fit needs k >= 3")
    Q1, Q2 = (m.copy() for m in _q_base(N))
    gl = silw_ghost_rows(k, kd, alpha, c_a)
    nu = 2 * N
    ghost = {}
    for name, idx in (("u0", 0), ("um1", 1), ("vb0", 2), ("vbm1", 3)):
        row = np.zeros(nu)
        row[:k] = gl[idx, :k]
        row[N:N + k] = gl[idx, k:]
        ghost[name] = row
    # Q1 rows i = 1, 2 reference the left ghosts through stencil offsets -2, -1
    Q1[0] -= (_CU[0] * ghost["um1"] + _CUV[0] * ghost["vbm1"]
              + _CU[1] * ghost["u0"] + _CUV[1] * ghost["vb0"])
    Q1[N] -= (_CV[0] * ghost["um1"] + _CVV[0] * ghost["vbm1"]
              + _CV[1] * ghost["u0"] + _CVV[1] * ghost["vb0"])
    Q1[1] -= _CU[0] * ghost["u0"] + _CUV[0] * ghost["vb0"]
    Q1[N + 1] -= _CV[0] * ghost["u0"] + _CVV[0] * ghost["vb0"]
    # Q2 limiter row at i = 1 references u_0 and vb_0
    Q2[N] += -0.75 * ghost["u0"] - 0.25 * ghost["vb0"]
    return Q1, Q2


def boundary_matrix(N, c_a, lambda_cfl, k=3, kd=2, alpha=1.0) -> AmplificationOperator:
    """Assemble G for the homogeneous Dirichlet inflow / extrapolated outflow
    advection problem at the given offset fraction and CFL number."""
    Q1, Q2 = _q_matrices(N, k, kd, alpha, c_a)
    G = rk3_amplification(Q1, Q2, lambda_cfl)
    return AmplificationOperator(G=G, lambda_cfl=lambda_cfl, c_a=c_a,
                                 k=k, kd=kd, alpha=alpha)


def periodic_matrix(N, lambda_cfl):
    """Periodic assembly of the same scheme (cross-check against the symbol)."""
    nu = 2 * N
    Q1 = np.zeros((nu, nu))
    Q2 = np.zeros((nu, nu))

    def u_(j):
        row = np.zeros(nu)
        row[(j - 1) % N] = 1.0
        return row

    def v_(j):
        row = np.zeros(nu)
        row[N + (j - 1) % N] = 1.0
        return row

    for i in range(1, N + 1):
        au = np.zeros(nu)
        av = np.zeros(nu)
        for off, cu, cuv, cv, cvv in zip((-2, -1, 0, 1), _CU, _CUV, _CV, _CVV):
            au -= cu * u_(i + off) + cuv * v_(i + off)
            av -= cv * u_(i + off) + cvv * v_(i + off)
        Q1[i - 1] = au
        Q1[N + i - 1] = av
        Q2[i - 1] = u_(i)
        Q2[N + i - 1] = 0.75 * (u_(i + 1) - u_(i - 1)) - 0.25 * (v_(i - 1) + v_(i + 1))
    return Q1, Q2


# ---------------------------------------------------------------------------
# admissible-alpha search (Table-style sweeps)
# ---------------------------------------------------------------------------

def stability_scan(k, kd, alphas, c_as, lambdas, N=40, tol=1e-8):
    """max spectral radius over (c_a, lambda) for each alpha; also returns the
    full table of radii, shape (len(alphas), len(c_as), len(lambdas))."""
    alphas = np.asarray(alphas, dtype=float)
    c_as = np.asarray(c_as, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    table = np.empty((len(alphas), len(c_as), len(lambdas)))
    for ia, al in enumerate(alphas):
        mats = np.empty((len(c_as), len(lambdas), 2 * N, 2 * N))
        for ic, ca in enumerate(c_as):
            Q1, Q2 = _q_matrices(N, k, kd, al, ca)
            for il, lam in enumerate(lambdas):
                mats[ic, il] = rk3_amplification(Q1, Q2, lam)
            # reuse Q1, Q2 across lambda
        rad = np.abs(np.linalg.eigvals(mats.reshape(-1, 2 * N, 2 * N)))
        table[ia] = rad.max(axis=-1).reshape(len(c_as), len(lambdas))
    return table


def alpha_range_search(k, kd, lambda_max=1.07, alphas=None, c_as=None,
                       lambdas=None, N=40, tol=1e-8):
    """Maximal alpha sub-intervals that keep the spectral radius within
    1 + tol for every sampled offset fraction and CFL number up to lambda_max.

    Returns (intervals, alphas, stable_mask); an empty interval list is a
    valid outcome."""
    if alphas is None:
        alphas = np.round(np.arange(0.50, 2.0001, 0.01), 10)
    if c_as is None:
        c_as = np.round(np.arange(0.0, 0.9999, 0.01), 10)
    if lambdas is None:
        lambdas = np.array([0.25, 0.55, 0.85, lambda_max])
    lambdas = np.asarray(lambdas, dtype=float)
    lambdas = lambdas[lambdas <= lambda_max + 1e-12]
    table = stability_scan(k, kd, alphas, c_as, lambdas, N=N)
    stable = table.max(axis=(1, 2)) <= 1.0 + tol
    intervals = []
    start = None
    for i, ok in enumerate(stable):
        if ok and start is None:
            start = alphas[i]
        if not ok and start is not None:
            intervals.append((start, alphas[i - 1]))
            start = None
    if start is not None:
        intervals.append((start, alphas[-1]))
    return intervals, np.asarray(alphas), stable


def fixed_boundary_eigenvalues(c_a, lambda_cfl, k=3, kd=2, alpha=1.0,
                               sizes=(40, 80), match_tol=1e-6, floor=0.5):
    """Eigenvalues of G that persist as N changes (the boundary-induced ones).

    Returns the eigenvalues of the smallest-N operator (with modulus above
    `floor`) that reappear at every other size within match_tol."""
    spectra = []
    for N in sizes:
        op = boundary_matrix(N, c_a, lambda_cfl, k, kd, alpha)
        spectra.append(np.linalg.eigvals(op.G))
    base = spectra[0]
    keep = []
    for z in base[np.abs(base) > floor]:
        if all(np.abs(sp - z).min() < match_tol for sp in spectra[1:]):
            keep.append(z)
    return np.array(keep)
