"""PDE model definitions (fluxes, Jacobians, characteristic transforms),
exact solutions, and the experiment presets used by the CLI.

Conserved fields are arrays shaped (nvar, ...); scalar models use nvar = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, NonPhysicalState

GAMMA = 1.4


# ---------------------------------------------------------------------------
# base interface
# ---------------------------------------------------------------------------

class Model:
    nvar = 1
    ndim = 1

    # --- interior scheme hooks -------------------------------------------
    def flux(self, U):
        raise NotImplementedError

    def hflux(self, U, V):
        """Jacobian-vector product F'(U) V (the derivative-equation flux)."""
        raise NotImplementedError

    def speed_x(self, U):
        """Pointwise spectral radius of the x-flux Jacobian."""
        raise NotImplementedError

    def max_speed(self, U):
        return float(self.speed_x(U).max())

    max_speed_x = max_speed

    def char_x(self, Uavg):
        """(L, R) with rows of L the left eigenvectors; identity for scalars."""
        raise NotImplementedError

    # --- boundary hooks (rotated frame) ----------------------------------
    def to_hat(self, U, ct, st=0.0):
        """State components in the frame whose x axis is (ct, st)."""
        return U

    def from_hat(self, Uh, ct, st=0.0):
        return Uh

    def hat_jac_x(self, Uh, ct, st=0.0):
        """Full Jacobian of the normal flux in the rotated frame, (..., nv, nv)."""
        raise NotImplementedError

    def hat_jac_y(self, Uh, ct, st=0.0):
        raise NotImplementedError

    def hat_eigen_x(self, Uh, ct, st=0.0):
        """(lam, L, R) of the rotated normal-flux Jacobian, lam ascending."""
        raise NotImplementedError

    def admissible(self, U):
        return np.ones(U.shape[1:], dtype=bool)


# ---------------------------------------------------------------------------
# scalar 1D models
# ---------------------------------------------------------------------------

class Scalar1D(Model):
    """u_t + f(u)_x = 0 with analytic f, f', f''."""

    nvar = 1
    ndim = 1

    def f(self, u):
        raise NotImplementedError

    def df(self, u):
        raise NotImplementedError

    def d2f(self, u):
        raise NotImplementedError

    def flux(self, U):
        return self.f(U)

    def hflux(self, U, V):
        return self.df(U) * V

    def speed_x(self, U):
        return np.abs(self.df(U[0]))

    def char_x(self, Uavg):
        raise ConfigError("scalar models have no characteristic transform")

    def hat_jac_x(self, Uh, ct, st=0.0):
        return self.df(Uh[0])[..., None, None]

    def hat_eigen_x(self, Uh, ct, st=0.0):
        lam = self.df(Uh[0])[..., None]
        one = np.ones_like(lam)[..., None]
        return lam, one, one


class Advection1D(Scalar1D):
    def __init__(self, speed=1.0):
        self.c = float(speed)

    def f(self, u):
        return self.c * u

    def df(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.c)

    def d2f(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))


class Burgers1D(Scalar1D):
    def f(self, u):
        return 0.5 * u * u

    def df(self, u):
        return np.asarray(u, dtype=float)

    def d2f(self, u):
        return np.ones_like(np.asarray(u, dtype=float))


class LinearSystem1D(Model):
    """u_t + w_x = 0, w_t + u_x = 0; characteristic speeds +-1."""

    nvar = 2
    ndim = 1
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    # rows: left eigenvectors for eigenvalues (-1, +1)
    _L = np.array([[0.5, -0.5], [0.5, 0.5]])
    _R = np.array([[1.0, 1.0], [-1.0, 1.0]])
    _lam = np.array([-1.0, 1.0])

    def flux(self, U):
        return np.einsum("ab,b...->a...", self.A, U)

    def hflux(self, U, V):
        return np.einsum("ab,b...->a...", self.A, V)

    def speed_x(self, U):
        return np.ones(U.shape[1:], dtype=float)

    def char_x(self, Uavg):
        shp = Uavg.shape[1:]
        L = np.broadcast_to(self._L, shp + (2, 2))
        R = np.broadcast_to(self._R, shp + (2, 2))
        return L, R

    def hat_jac_x(self, Uh, ct, st=0.0):
        return np.broadcast_to(float(ct) * self.A, Uh.shape[1:] + (2, 2))

    def hat_eigen_x(self, Uh, ct, st=0.0):
        shp = Uh.shape[1:]
        if ct >= 0:
            lam, L, R = self._lam, self._L, self._R
        else:
            lam = -self._lam[::-1]
            L, R = self._L[::-1], self._R[:, ::-1]
        return (np.broadcast_to(lam * abs(ct), shp + (2,)),
                np.broadcast_to(L, shp + (2, 2)),
                np.broadcast_to(R, shp + (2, 2)))


# ---------------------------------------------------------------------------
# Euler equations
# ---------------------------------------------------------------------------

def euler_primitive(U, gamma=GAMMA):
    """(rho, u[, v], p) from conserved variables; raises off nonphysical states."""
    rho = U[0]
    if np.any(rho <= 0) or not np.all(np.isfinite(rho)):
        raise NonPhysicalState("non-positive density", state=U)
    if U.shape[0] == 3:
        u = U[1] / rho
        p = (gamma - 1.0) * (U[2] - 0.5 * rho * u * u)
        out = np.stack([rho, u, p])
    else:
        u = U[1] / rho
        v = U[2] / rho
        p = (gamma - 1.0) * (U[3] - 0.5 * rho * (u * u + v * v))
        out = np.stack([rho, u, v, p])
    if np.any(out[-1] <= 0) or not np.all(np.isfinite(out[-1])):
        raise NonPhysicalState("non-positive pressure", state=U)
    return out


def euler_conserved(prim, gamma=GAMMA):
    """Inverse of euler_primitive."""
    if prim.shape[0] == 3:
        rho, u, p = prim
        E = p / (gamma - 1.0) + 0.5 * rho * u * u
        return np.stack([rho, rho * u, E])
    rho, u, v, p = prim
    E = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return np.stack([rho, rho * u, rho * v, E])


def _eigen_euler_1d(rho, u, p, gamma):
    gm = gamma - 1.0
    c2 = gamma * p / rho
    c = np.sqrt(c2)
    H = c2 / gm + 0.5 * u * u
    phi2 = 0.5 * gm * u * u
    shp = np.shape(rho)
    L = np.empty(shp + (3, 3))
    R = np.empty(shp + (3, 3))
    inv2c2 = 0.5 / c2
    L[..., 0, 0] = (phi2 + u * c) * inv2c2
    L[..., 0, 1] = (-gm * u - c) * inv2c2
    L[..., 0, 2] = gm * inv2c2
    L[..., 1, 0] = (2 * c2 - 2 * phi2) * inv2c2
    L[..., 1, 1] = 2 * gm * u * inv2c2
    L[..., 1, 2] = -2 * gm * inv2c2
    L[..., 2, 0] = (phi2 - u * c) * inv2c2
    L[..., 2, 1] = (-gm * u + c) * inv2c2
    L[..., 2, 2] = gm * inv2c2
    R[..., 0, 0] = 1.0
    R[..., 0, 1] = 1.0
    R[..., 0, 2] = 1.0
    R[..., 1, 0] = u - c
    R[..., 1, 1] = u
    R[..., 1, 2] = u + c
    R[..., 2, 0] = H - u * c
    R[..., 2, 1] = 0.5 * u * u
    R[..., 2, 2] = H + u * c
    lam = np.stack([u - c, u, u + c], axis=-1)
    return lam, L, R


class Euler1D(Model):
    nvar = 3
    ndim = 1

    def __init__(self, gamma=GAMMA):
        self.gamma = float(gamma)

    def primitive(self, U):
        return euler_primitive(U, self.gamma)

    def conserved(self, prim):
        return euler_conserved(prim, self.gamma)

    def flux(self, U):
        rho, u, p = self.primitive(U)
        return np.stack([U[1], U[1] * u + p, u * (U[2] + p)])

    def hflux(self, U, V):
        gm = self.gamma - 1.0
        rho, u, p = self.primitive(U)
        du = (V[1] - u * V[0]) / rho
        dp = gm * (V[2] - u * V[1] + 0.5 * u * u * V[0])
        dF0 = V[1]
        dF1 = 2 * u * V[1] - u * u * V[0] + dp
        dF2 = du * (U[2] + p) + u * (V[2] + dp)
        return np.stack([dF0, dF1, dF2])

    def speed_x(self, U):
        rho, u, p = self.primitive(U)
        return np.abs(u) + np.sqrt(self.gamma * p / rho)

    def char_x(self, Uavg):
        rho, u, p = self.primitive(Uavg)
        _, L, R = _eigen_euler_1d(rho, u, p, self.gamma)
        return L, R

    # boundary hooks: "rotation" in 1D flips the velocity sign with ct = +-1
    def to_hat(self, U, ct, st=0.0):
        Uh = U.copy()
        Uh[1] = ct * U[1]
        return Uh

    from_hat = to_hat

    def hat_jac_x(self, Uh, ct, st=0.0):
        rho, u, p = self.primitive(Uh)
        gm = self.gamma - 1.0
        shp = np.shape(rho)
        A = np.empty(shp + (3, 3))
        H = (Uh[2] + p) / rho
        A[..., 0, 0] = 0.0
        A[..., 0, 1] = 1.0
        A[..., 0, 2] = 0.0
        A[..., 1, 0] = 0.5 * (gm - 2.0) * u * u + 0.0
        A[..., 1, 1] = (3.0 - self.gamma) * u
        A[..., 1, 2] = gm
        A[..., 2, 0] = u * (0.5 * gm * u * u - H)
        A[..., 2, 1] = H - gm * u * u
        A[..., 2, 2] = self.gamma * u
        return A

    def hat_eigen_x(self, Uh, ct, st=0.0):
        rho, u, p = self.primitive(Uh)
        return _eigen_euler_1d(rho, u, p, self.gamma)

    def admissible(self, U):
        gm = self.gamma - 1.0
        ok = U[0] > 0
        p = gm * (U[2] - 0.5 * U[1] ** 2 / np.where(ok, U[0], 1.0))
        return ok & (p > 0) & np.all(np.isfinite(U), axis=0)


def _eigen_euler_2d_x(rho, u, v, p, gamma):
    gm = gamma - 1.0
    c2 = gamma * p / rho
    c = np.sqrt(c2)
    q2 = u * u + v * v
    H = c2 / gm + 0.5 * q2
    phi2 = 0.5 * gm * q2
    shp = np.shape(rho)
    L = np.empty(shp + (4, 4))
    R = np.empty(shp + (4, 4))
    inv2c2 = 0.5 / c2
    L[..., 0, 0] = (phi2 + u * c) * inv2c2
    L[..., 0, 1] = (-gm * u - c) * inv2c2
    L[..., 0, 2] = -gm * v * inv2c2
    L[..., 0, 3] = gm * inv2c2
    L[..., 1, 0] = (2 * c2 - 2 * phi2) * inv2c2
    L[..., 1, 1] = 2 * gm * u * inv2c2
    L[..., 1, 2] = 2 * gm * v * inv2c2
    L[..., 1, 3] = -2 * gm * inv2c2
    L[..., 2, 0] = -v
    L[..., 2, 1] = 0.0
    L[..., 2, 2] = 1.0
    L[..., 2, 3] = 0.0
    L[..., 3, 0] = (phi2 - u * c) * inv2c2
    L[..., 3, 1] = (-gm * u + c) * inv2c2
    L[..., 3, 2] = -gm * v * inv2c2
    L[..., 3, 3] = gm * inv2c2
    R[..., 0, 0] = 1.0
    R[..., 0, 1] = 1.0
    R[..., 0, 2] = 0.0
    R[..., 0, 3] = 1.0
    R[..., 1, 0] = u - c
    R[..., 1, 1] = u
    R[..., 1, 2] = 0.0
    R[..., 1, 3] = u + c
    R[..., 2, 0] = v
    R[..., 2, 1] = v
    R[..., 2, 2] = 1.0
    R[..., 2, 3] = v
    R[..., 3, 0] = H - u * c
    R[..., 3, 1] = 0.5 * q2
    R[..., 3, 2] = v
    R[..., 3, 3] = H + u * c
    lam = np.stack([u - c, u, u, u + c], axis=-1)
    return lam, L, R


class Euler2D(Model):
    nvar = 4
    ndim = 2

    def __init__(self, gamma=GAMMA):
        self.gamma = float(gamma)

    def primitive(self, U):
        return euler_primitive(U, self.gamma)

    def conserved(self, prim):
        return euler_conserved(prim, self.gamma)

    def _prim_raw(self, U):
        rho = U[0]
        u = U[1] / rho
        v = U[2] / rho
        p = (self.gamma - 1.0) * (U[3] - 0.5 * rho * (u * u + v * v))
        return rho, u, v, p

    def flux(self, U):
        rho, u, v, p = self._prim_raw(U)
        return np.stack([U[1], U[1] * u + p, U[2] * u, u * (U[3] + p)])

    def flux_y(self, U):
        rho, u, v, p = self._prim_raw(U)
        return np.stack([U[2], U[1] * v, U[2] * v + p, v * (U[3] + p)])

    def _dp(self, U, D):
        rho, u, v, p = self._prim_raw(U)
        return (self.gamma - 1.0) * (D[3] - u * D[1] - v * D[2]
                                     + 0.5 * (u * u + v * v) * D[0])

    def hflux(self, U, V):
        rho, u, v, p = self._prim_raw(U)
        du = (V[1] - u * V[0]) / rho
        dv = (V[2] - v * V[0]) / rho
        dp = self._dp(U, V)
        return np.stack([
            V[1],
            2 * u * V[1] - u * u * V[0] + dp,
            u * V[2] + U[2] * du,
            du * (U[3] + p) + u * (V[3] + dp),
        ])

    def hflux_y(self, U, W):
        rho, u, v, p = self._prim_raw(U)
        du = (W[1] - u * W[0]) / rho
        dv = (W[2] - v * W[0]) / rho
        dp = self._dp(U, W)
        return np.stack([
            W[2],
            v * W[1] + U[1] * dv,
            2 * v * W[2] - v * v * W[0] + dp,
            dv * (U[3] + p) + v * (W[3] + dp),
        ])

    def speed_x(self, U):
        rho, u, v, p = self._prim_raw(U)
        return np.abs(u) + np.sqrt(self.gamma * p / rho)

    def speed_y(self, U):
        rho, u, v, p = self._prim_raw(U)
        return np.abs(v) + np.sqrt(self.gamma * p / rho)

    def max_speed_x(self, U):
        return float(self.speed_x(U).max())

    def max_speed_y(self, U):
        return float(self.speed_y(U).max())

    def char_x(self, Uavg):
        rho, u, v, p = self._prim_raw(Uavg)
        _, L, R = _eigen_euler_2d_x(rho, u, v, p, self.gamma)
        return L, R

    def char_y(self, Uavg):
        # swap the roles of u and v, then swap the momentum slots back
        rho, u, v, p = self._prim_raw(Uavg)
        _, L, R = _eigen_euler_2d_x(rho, v, u, p, self.gamma)
        Ls = L.copy()
        Ls[..., :, 1], Ls[..., :, 2] = L[..., :, 2].copy(), L[..., :, 1].copy()
        Rs = R.copy()
        Rs[..., 1, :], Rs[..., 2, :] = R[..., 2, :].copy(), R[..., 1, :].copy()
        return Ls, Rs

    # --- rotated-frame boundary hooks ------------------------------------
    def to_hat(self, U, ct, st):
        Uh = U.copy()
        Uh[1] = ct * U[1] + st * U[2]
        Uh[2] = -st * U[1] + ct * U[2]
        return Uh

    def from_hat(self, Uh, ct, st):
        U = Uh.copy()
        U[1] = ct * Uh[1] - st * Uh[2]
        U[2] = st * Uh[1] + ct * Uh[2]
        return U

    def hat_jac_x(self, Uh, ct=1.0, st=0.0):
        rho, u, v, p = self._prim_raw(Uh)
        g = self.gamma
        gm = g - 1.0
        q2 = u * u + v * v
        H = (Uh[3] + p) / rho
        shp = np.shape(rho)
        A = np.zeros(shp + (4, 4))
        A[..., 0, 1] = 1.0
        A[..., 1, 0] = 0.5 * gm * q2 - u * u
        A[..., 1, 1] = (3.0 - g) * u
        A[..., 1, 2] = -gm * v
        A[..., 1, 3] = gm
        A[..., 2, 0] = -u * v
        A[..., 2, 1] = v
        A[..., 2, 2] = u
        A[..., 3, 0] = u * (0.5 * gm * q2 - H)
        A[..., 3, 1] = H - gm * u * u
        A[..., 3, 2] = -gm * u * v
        A[..., 3, 3] = g * u
        return A

    def hat_jac_y(self, Uh, ct=1.0, st=0.0):
        rho, u, v, p = self._prim_raw(Uh)
        g = self.gamma
        gm = g - 1.0
        q2 = u * u + v * v
        H = (Uh[3] + p) / rho
        shp = np.shape(rho)
        B = np.zeros(shp + (4, 4))
        B[..., 0, 2] = 1.0
        B[..., 1, 0] = -u * v
        B[..., 1, 1] = v
        B[..., 1, 2] = u
        B[..., 2, 0] = 0.5 * gm * q2 - v * v
        B[..., 2, 1] = -gm * u
        B[..., 2, 2] = (3.0 - g) * v
        B[..., 2, 3] = gm
        B[..., 3, 0] = v * (0.5 * gm * q2 - H)
        B[..., 3, 1] = -gm * u * v
        B[..., 3, 2] = H - gm * v * v
        B[..., 3, 3] = g * v
        return B

    def hat_eigen_x(self, Uh, ct=1.0, st=0.0):
        rho, u, v, p = self.primitive(Uh)
        return _eigen_euler_2d_x(rho, u, v, p, self.gamma)

    def admissible(self, U):
        gm = self.gamma - 1.0
        ok = U[0] > 0
        rho = np.where(ok, U[0], 1.0)
        p = gm * (U[3] - 0.5 * (U[1] ** 2 + U[2] ** 2) / rho)
        return ok & (p > 0) & np.all(np.isfinite(U), axis=0)


class Burgers2D(Model):
    """u_t + (u^2/2)_x + (u^2/2)_y = 0."""

    nvar = 1
    ndim = 2

    def f(self, u):
        return 0.5 * u * u

    def df(self, u):
        return np.asarray(u, dtype=float)

    def flux(self, U):
        return 0.5 * U * U

    flux_y = flux

    def hflux(self, U, V):
        return U * V

    hflux_y = hflux

    def speed_x(self, U):
        return np.abs(U[0])

    speed_y = speed_x

    def max_speed_x(self, U):
        return float(self.speed_x(U).max())

    max_speed_y = max_speed_x

    def char_x(self, Uavg):
        raise ConfigError("scalar models have no characteristic transform")

    char_y = char_x

    def hat_jac_x(self, Uh, ct, st=0.0):
        return ((ct + st) * Uh[0])[..., None, None]

    def hat_jac_y(self, Uh, ct, st=0.0):
        return ((ct - st) * Uh[0])[..., None, None]

    def hat_eigen_x(self, Uh, ct, st=0.0):
        lam = ((ct + st) * Uh[0])[..., None]
        one = np.ones_like(lam)[..., None]
        return lam, one, one


# ---------------------------------------------------------------------------
# characteristic systems at boundary states (diagnostic/object form)
# ---------------------------------------------------------------------------

@dataclass
class CharSystem:
    """Eigen-structure of the rotated normal-flux Jacobian at one state,
    with unit-normalized left rows."""

    lam: np.ndarray
    left: np.ndarray
    right: np.ndarray
    jac_x: np.ndarray
    jac_y: np.ndarray | None = None


def char_system(model, state, direction):
    """Eigen-decomposition of the directional Jacobian at one conserved state."""
    ct, st = float(direction[0]), float(direction[1] if len(direction) > 1 else 0.0)
    nrm = np.hypot(ct, st)
    ct, st = ct / nrm, st / nrm
    Uh = model.to_hat(np.asarray(state, dtype=float)[:, None], ct, st)
    lam, L, R = model.hat_eigen_x(Uh, ct, st)
    lam, L, R = lam[0], L[0], R[0]
    scale = np.linalg.norm(L, axis=1, keepdims=True)
    Ln = L / scale
    Rn = R * scale.T
    A = model.hat_jac_x(Uh, ct, st)[0]
    B = model.hat_jac_y(Uh, ct, st)[0] if model.ndim == 2 else None
    return CharSystem(lam=lam, left=Ln, right=Rn, jac_x=A, jac_y=B)


# ---------------------------------------------------------------------------
# exact solutions
# ---------------------------------------------------------------------------

def _newton_scalar(residual, dresidual, u0, tol=1e-13, maxit=50):
    u = np.array(u0, dtype=float)
    for _ in range(maxit):
        r = residual(u)
        if np.all(np.abs(r) < tol):
            return u, True
        u = u - r / dresidual(u)
    return u, bool(np.all(np.abs(residual(u)) < 1e-9))


class BurgersWave1D:
    """Entropy solution of Burgers' equation with u0 = a + b sin(k x).

    Pre-shock values come from Newton on the characteristic equation; after
    breaking, a Lax-Oleinik minimization picks the entropy branch (used only
    for boundary data, not as an accuracy reference)."""

    def __init__(self, a=1.0, b=1.0, k=np.pi):
        self.a, self.b, self.k = float(a), float(b), float(k)

    @property
    def t_break(self):
        return 1.0 / (self.b * self.k)

    def u0(self, x):
        return self.a + self.b * np.sin(self.k * np.asarray(x, dtype=float))

    def du0(self, x):
        return self.b * self.k * np.cos(self.k * np.asarray(x, dtype=float))

    def _U0(self, y):
        # antiderivative of u0
        return self.a * y - (self.b / self.k) * np.cos(self.k * y)

    def __call__(self, x, t, guess=None):
        x = np.asarray(x, dtype=float)
        t = float(t)
        if t == 0.0:
            return self.u0(x)
        if t < 0.995 * self.t_break:
            u = self.u0(x) if guess is None else np.array(guess, dtype=float)
            u, ok = _newton_scalar(lambda w: w - self.u0(x - w * t),
                                   lambda w: 1.0 + t * self.du0(x - w * t), u)
            if ok:
                return u
        return self._lax_oleinik(x, t)

    def _lax_oleinik(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo = x - (self.a + self.b) * t - 0.25
        hi = x - (self.a - self.b) * t + 0.25
        ys = lo[..., None] + (hi - lo)[..., None] * np.linspace(0, 1, 401)
        G = self._U0(ys) + (x[..., None] - ys) ** 2 / (2 * t)
        j = np.argmin(G, axis=-1)
        ybest = np.take_along_axis(ys, j[..., None], axis=-1)[..., 0]
        span = (hi - lo) / 400
        # golden-section refinement around the sampled minimizer
        a_, b_ = ybest - span, ybest + span
        invphi = (np.sqrt(5.0) - 1) / 2
        c_ = b_ - invphi * (b_ - a_)
        d_ = a_ + invphi * (b_ - a_)
        for _ in range(60):
            fc = self._U0(c_) + (x - c_) ** 2 / (2 * t)
            fd = self._U0(d_) + (x - d_) ** 2 / (2 * t)
            take_c = fc < fd
            b_ = np.where(take_c, d_, b_)
            a_ = np.where(take_c, a_, c_)
            c_ = b_ - invphi * (b_ - a_)
            d_ = a_ + invphi * (b_ - a_)
        y = 0.5 * (a_ + b_)
        return (x - y) / t


def burgers_exact(x, t, wave: BurgersWave1D | None = None):
    """Entropy solution of Example-style 1D Burgers data."""
    return (wave or BurgersWave1D())(x, t)


class BurgersWave2D:
    """Characteristic solution of the 2D Burgers preset, smooth for t < 2/pi."""

    def __init__(self, mean=0.75, amp=0.5):
        self.mean, self.amp = float(mean), float(amp)

    def u0_of_s(self, s):
        return self.mean + self.amp * np.sin(np.pi * s)

    def __call__(self, x, y, t):
        s = 0.5 * (np.asarray(x, dtype=float) + np.asarray(y, dtype=float))
        t = float(t)
        if t == 0.0:
            return self.u0_of_s(s)
        u = self.u0_of_s(s)
        u, ok = _newton_scalar(
            lambda w: w - self.u0_of_s(s - w * t),
            lambda w: 1.0 + t * self.amp * np.pi * np.cos(np.pi * (s - w * t)), u)
        if not ok:
            raise ConfigError("2D Burgers characteristic solve did not converge")
        return u


def euler1d_density_wave(x, t):
    """rho = 1 + 0.2 sin(x - t), u = 1, p = 2 (primitive)."""
    x = np.asarray(x, dtype=float)
    rho = 1.0 + 0.2 * np.sin(x - t)
    return np.stack([rho, np.ones_like(rho), 2.0 * np.ones_like(rho)])


def linear_system_exact(x, t):
    """u = sin(x+t), w = -sin(x+t)."""
    x = np.asarray(x, dtype=float)
    s = np.sin(x + t)
    return np.stack([s, -s])


# ---------------------------------------------------------------------------
# Rankine-Hugoniot states used by the shocked presets
# ---------------------------------------------------------------------------

# Mach-10 normal shock into (rho, u, p) = (1.4, 0, 1), gamma = 1.4:
# density ratio 40/7, p2 = 116.5, piston speed 8.25.
DMR_PRE = np.array([1.4, 0.0, 0.0, 1.0])
_DMR_SPEED = 8.25
_DMR_DEG30 = np.pi / 6
DMR_POST = np.array([
    8.0,
    _DMR_SPEED * np.cos(_DMR_DEG30),
    -_DMR_SPEED * np.sin(_DMR_DEG30),
    116.5,
])
DMR_WALL_START = 1.0 / 6.0
DMR_SHOCK_SPEED_X = 10.0 / np.cos(_DMR_DEG30)  # along any horizontal line

# Mach-3 free stream normalized to unit sound speed
CYLINDER_INFLOW = np.array([1.4, 3.0, 0.0, 1.0])


def dmr_shock_x(y, t):
    """x-position of the incident 60-degree shock along height y at time t."""
    return DMR_WALL_START + y / np.sqrt(3.0) + DMR_SHOCK_SPEED_X * t


def dmr_initial(x, y):
    """Primitive state: post-shock left of the 60-degree shock line, else quiescent."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    behind = x < DMR_WALL_START + y / np.sqrt(3.0)
    shape = (4,) + behind.shape
    prim = np.where(behind[None], DMR_POST.reshape((4,) + (1,) * behind.ndim),
                    DMR_PRE.reshape((4,) + (1,) * behind.ndim)) * np.ones(shape)
    return prim


# ---------------------------------------------------------------------------
# experiment presets
# ---------------------------------------------------------------------------

@dataclass
class ExperimentPreset:
    name: str
    ndim: int
    model: Model
    t_final: float
    k_t: float                      # time-step exponent
    cfl: float = 0.6
    description: str = ""
    options: dict = field(default_factory=dict)


def preset(name: str) -> ExperimentPreset:
    presets: dict[str, Callable[[], ExperimentPreset]] = {
        "burgers-sine": lambda: ExperimentPreset(
            "burgers-sine", 1, Burgers1D(), 0.5 / np.pi, 5.0 / 3.0,
            description="1D Burgers, inflow from the periodic exact solution"),
        "linear-system": lambda: ExperimentPreset(
            "linear-system", 1, LinearSystem1D(), 1.0, 5.0 / 3.0,
            description="1D 2x2 linear system with Dirichlet data on u"),
        "euler-density-wave": lambda: ExperimentPreset(
            "euler-density-wave", 1, Euler1D(), 1.0, 5.0 / 3.0,
            description="1D Euler advected density wave"),
        "blast-waves": lambda: ExperimentPreset(
            "blast-waves", 1, Euler1D(), 0.038, 1.0,
            description="two interacting blast waves between solid walls"),
        "burgers-2d-rect": lambda: ExperimentPreset(
            "burgers-2d-rect", 2, Burgers2D(), 1.0 / np.pi, 5.0 / 3.0,
            description="2D Burgers on [0,4]^2, inflow left/bottom"),
        "burgers-2d-disk": lambda: ExperimentPreset(
            "burgers-2d-disk", 2, Burgers2D(), 1.0 / np.pi, 5.0 / 3.0,
            description="2D Burgers on a radius-2 disk"),
        "cylinder": lambda: ExperimentPreset(
            "cylinder", 2, Euler2D(), 3.0, 1.0,
            description="Mach-3 flow past a unit cylinder, upper half plane"),
        "double-mach": lambda: ExperimentPreset(
            "double-mach", 2, Euler2D(), 0.2, 1.0,
            description="double Mach reflection of a Mach-10 shock"),
    }
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; options: {sorted(presets)}")
    return presets[name]()


def blast_initial(x):
    """Primitive (rho, u, p) on [0, 1] split at 0.1 and 0.9."""
    x = np.asarray(x, dtype=float)
    rho = np.ones_like(x)
    u = np.zeros_like(x)
    p = np.where(x < 0.1, 1000.0, np.where(x < 0.9, 0.01, 100.0))
    return np.stack([rho, u, p])
