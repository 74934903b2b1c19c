"""Third-order TVD Runge-Kutta time stepping with the derivative limiter and
stage-corrected boundary data, plus CFL time-step control and 1D/2D drivers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hweno
from .boundary import Periodic1D, SilwParams
from .errors import ConfigError, SolverAbort

RK_WEIGHTS = ((1.0, 0.0, 1.0), (0.75, 0.25, 0.25), (1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0))


@dataclass
class TimeControls:
    cfl: float = 0.6
    k_t: float = 1.0          # time-step exponent: 1 or 5/3
    t_final: float = 1.0
    max_steps: int = 10 ** 7
    lambda_log: list = field(default_factory=list)

    def validate(self):
        if self.cfl <= 0:
            raise ConfigError("cfl must be positive")
        if self.k_t not in (1.0, 5.0 / 3.0):
            raise ConfigError("time-step exponent must be 1 or 5/3")
        return self


def compute_dt(speeds, spacings, controls: TimeControls, t=0.0):
    """dt = cfl / sum_d a_d / dx_d^k, truncated to land on t_final."""
    denom = 0.0
    for a, dx in zip(np.atleast_1d(speeds), np.atleast_1d(spacings)):
        if not np.isfinite(a) or a <= 0:
            raise ConfigError(f"nonpositive wave speed {a} in time-step control")
        denom += a / dx ** controls.k_t
    dt = controls.cfl / denom
    if t + dt > controls.t_final:
        dt = controls.t_final - t
    return dt


# ---------------------------------------------------------------------------
# 1D stepping
# ---------------------------------------------------------------------------

class Solver1D:
    """Owns the Hermite state (U, V) on one offset grid with two BC sides."""

    def __init__(self, model, grid, left, right, params: SilwParams | None = None,
                 controls: TimeControls | None = None, nonlinear=True):
        self.model = model
        self.grid = grid
        self.left = left
        self.right = right
        self.params = (params or SilwParams()).validate(ndim=1)
        self.controls = (controls or TimeControls()).validate()
        self.nonlinear = nonlinear
        self.U = np.zeros((model.nvar, grid.n_tot))
        self.V = np.zeros((model.nvar, grid.n_tot))
        self.t = 0.0
        self.step_count = 0

    def set_initial(self, u_fn, v_fn=None, fd_eps=1e-6):
        x = self.grid.x_interior
        it = self.grid.interior
        self.U[:, it] = u_fn(x)
        if v_fn is not None:
            self.V[:, it] = v_fn(x)
        else:
            self.V[:, it] = (np.asarray(u_fn(x + fd_eps), dtype=float)
                             - u_fn(x - fd_eps)) / (2 * fd_eps)

    def fill_ghosts(self, t, dt, stage):
        if isinstance(self.left, Periodic1D):
            self.left.fill_both(self.grid, self.U, self.V)
            return
        for side in (self.left, self.right):
            side.fill(self.model, self.grid, self.U, self.V, t, dt, stage,
                      self.params)

    def _modify(self):
        it = self.grid.interior
        vt = hweno.modify_field_1d(self.U, self.V, self.grid.dx)
        self.V[:, it] = vt[:, it]

    def _rhs(self, alpha):
        return hweno.semi_discrete_rhs_1d(self.model, self.grid, self.U, self.V,
                                          alpha=alpha, nonlinear=self.nonlinear)

    def rk3_step(self, dt):
        """One SSP-RK3 step: each stage refreshes ghosts with stage-corrected
        data, limits the derivative field, then evaluates the RHS."""
        grid, it = self.grid, self.grid.interior
        U0 = self.U[:, it].copy()
        V0 = None
        for stage, (c0, c1, cdt) in enumerate(RK_WEIGHTS):
            self.fill_ghosts(self.t, dt, stage)
            self._modify()
            if stage == 0:
                V0 = self.V[:, it].copy()
            alpha = self.model.max_speed(self.U)
            dU, dV = self._rhs(alpha)
            self.U[:, it] = c0 * U0 + c1 * self.U[:, it] + cdt * dt * dU
            self.V[:, it] = c0 * V0 + c1 * self.V[:, it] + cdt * dt * dV
            self._check(stage)
            self.controls.lambda_log.append(alpha * dt / grid.dx)
        self.t += dt
        self.step_count += 1

    def _check(self, stage):
        it = self.grid.interior
        if not (np.all(np.isfinite(self.U[:, it])) and np.all(np.isfinite(self.V[:, it]))):
            raise SolverAbort(f"non-finite state after RK stage {stage} at t={self.t:g}")
        if not np.all(self.model.admissible(self.U[:, it])):
            raise SolverAbort(f"nonphysical state after RK stage {stage} at t={self.t:g}")

    def run(self, t_final=None):
        if t_final is not None:
            self.controls.t_final = t_final
        while self.t < self.controls.t_final - 1e-14:
            a = self.model.max_speed(self.U[:, self.grid.interior])
            dt = compute_dt([a], [self.grid.dx], self.controls, self.t)
            self.rk3_step(dt)
            if self.step_count > self.controls.max_steps:
                raise SolverAbort("step budget exhausted")
        return self


# ---------------------------------------------------------------------------
# 2D stepping
# ---------------------------------------------------------------------------

class Solver2D:
    """Hermite state (U, V, W) on a classified 2D domain."""

    def __init__(self, model, domain, params: SilwParams | None = None,
                 controls: TimeControls | None = None, nonlinear=True,
                 safe_state=None):
        self.model = model
        self.domain = domain
        self.params = (params or SilwParams(k=4)).validate(ndim=2)
        self.controls = (controls or TimeControls()).validate()
        self.nonlinear = nonlinear
        g = domain.grid
        nv = model.nvar
        self.U = np.zeros((nv, g.nx, g.ny))
        self.V = np.zeros((nv, g.nx, g.ny))
        self.W = np.zeros((nv, g.nx, g.ny))
        self.t = 0.0
        self.step_count = 0
        self.safe_state = safe_state

    def set_initial(self, u_fn, fd_eps=None):
        g = self.domain.grid
        X, Y = g.mesh()
        fd = fd_eps or 1e-6 * g.h
        self.U[:] = u_fn(X, Y)
        self.V[:] = (np.asarray(u_fn(X + fd, Y), dtype=float) - u_fn(X - fd, Y)) / (2 * fd)
        self.W[:] = (np.asarray(u_fn(X, Y + fd), dtype=float) - u_fn(X, Y - fd)) / (2 * fd)
        self._freeze_unused()

    def _freeze_unused(self):
        if self.safe_state is None:
            return
        dead = ~(self.domain.valid_mask)
        self.U[:, dead] = np.asarray(self.safe_state)[:, None]
        self.V[:, dead] = 0.0
        self.W[:, dead] = 0.0

    def fill_ghosts(self, t, dt, stage):
        self.domain.fill_ghosts(self.model, self.U, self.V, self.W, t, dt,
                                stage, self.params)

    def _speeds(self):
        m = self.domain.valid_mask
        with np.errstate(divide="ignore", invalid="ignore"):
            ax = float(self.model.speed_x(self.U)[m].max())
            ay = float(self.model.speed_y(self.U)[m].max())
        if not (np.isfinite(ax) and np.isfinite(ay)):
            raise SolverAbort("non-finite wave speed over interior/ghost points")
        return ax, ay

    def rk3_step(self, dt):
        dom, model = self.domain, self.model
        it = dom.interior_mask
        U0 = self.U[:, it].copy()
        V0 = W0 = None
        for stage, (c0, c1, cdt) in enumerate(RK_WEIGHTS):
            self.fill_ghosts(self.t, dt, stage)
            Vt, Wt = hweno.modify_field_2d(self.U, self.V, self.W,
                                           dom.grid.dx, dom.grid.dy, it)
            self.V, self.W = Vt, Wt
            if stage == 0:
                V0 = self.V[:, it].copy()
                W0 = self.W[:, it].copy()
            ax, ay = self._speeds()
            dU, dV, dW = hweno.semi_discrete_rhs_2d(
                model, dom.grid, self.U, self.V, self.W, it,
                alpha_x=ax, alpha_y=ay, nonlinear=self.nonlinear)
            self.U[:, it] = c0 * U0 + c1 * self.U[:, it] + cdt * dt * dU[:, it]
            self.V[:, it] = c0 * V0 + c1 * self.V[:, it] + cdt * dt * dV[:, it]
            self.W[:, it] = c0 * W0 + c1 * self.W[:, it] + cdt * dt * dW[:, it]
            self._check(stage)
        self.t += dt
        self.step_count += 1

    def _check(self, stage):
        it = self.domain.interior_mask
        for arr in (self.U, self.V, self.W):
            if not np.all(np.isfinite(arr[:, it])):
                raise SolverAbort(
                    f"non-finite state after RK stage {stage} at t={self.t:g}")
        if not np.all(self.model.admissible(self.U[:, it])):
            raise SolverAbort(
                f"nonphysical state after RK stage {stage} at t={self.t:g}")

    def run(self, t_final=None, report=None):
        if t_final is not None:
            self.controls.t_final = t_final
        g = self.domain.grid
        while self.t < self.controls.t_final - 1e-14:
            ax, ay = self._speeds()
            dt = compute_dt([ax, ay], [g.dx, g.dy], self.controls, self.t)
            self.rk3_step(dt)
            if report and self.step_count % report == 0:
                print(f"  step {self.step_count}: t = {self.t:.5f}")
            if self.step_count > self.controls.max_steps:
                raise SolverAbort("step budget exhausted")
        return self
