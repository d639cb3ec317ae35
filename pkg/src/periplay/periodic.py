"""Time-periodic solutions by fixed-point iteration.

Two constructive routes to a state with z(0) = z(T):

* :func:`find_periodic` iterates the period map z -> z(T) directly (Picard,
  optionally Anderson-accelerated).  Under the structural hypothesis
  L_star < kappa/C_P the v-component contracts at rate ~ exp(-c0 T); the
  u-component has no comparable guarantee, so non-convergence is a
  first-class outcome carried by :class:`NotConvergedError`.

* :func:`outer_fixed_point` runs the two-level construction: freeze the
  nonlinear load f, solve the *linear* periodic problem z' + A z = f by
  period-map iteration of the affine map (:func:`linear_periodic_solve`,
  a strict contraction), then refresh f from the solution and repeat until
  the load is a fixed point of that composition.

Both report per-iteration residuals and an empirical contraction factor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .dynamics import ModelConfig, SystemState, Trajectory, _advance_period
from .spatial import Field

__all__ = [
    "PeriodicReport",
    "PeriodicForcing",
    "NotConvergedError",
    "period_map",
    "find_periodic",
    "linear_periodic_solve",
    "outer_fixed_point",
    "forcing_from_trajectory",
    "forcing_distance",
    "forcing_sup",
    "forcing_bound",
    "state_distance",
]


@dataclass(eq=False)
class PeriodicReport:
    """Record of one fixed-point run.

    ``residual_history`` holds the per-iteration periodicity defect
    |z(T) - z(0)|_H (or the load increment for the outer iteration);
    ``contraction_estimate`` is the geometric mean of successive residual
    ratios; ``c0`` the structural decay rate kappa/C_P - L_star.
    """

    iterations: int
    residual_history: list[float]
    contraction_estimate: float
    c0: float
    converged: bool
    final_state: SystemState
    method: str = "period_map"
    sup_forcing: float | None = None
    forcing_bound: float | None = None

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "iterations": self.iterations,
            "residual_history": [float(r) for r in self.residual_history],
            "contraction_estimate": self.contraction_estimate,
            "c0": self.c0,
            "converged": self.converged,
        }
        if self.sup_forcing is not None:
            out["sup_forcing"] = self.sup_forcing
            out["forcing_bound"] = self.forcing_bound
        return out


class NotConvergedError(RuntimeError):
    """Fixed-point iteration hit its cap; the partial report is attached."""

    def __init__(self, message: str, report: PeriodicReport):
        super().__init__(message)
        self.report = report


def state_distance(cfg: ModelConfig, a: SystemState, b: SystemState) -> float:
    """Product-space H distance sqrt(|u_a-u_b|_H^2 + |v_a-v_b|_H^2)."""
    ua, va = a.u.on(cfg.grid), a.v.on(cfg.grid)
    ub, vb = b.u.on(cfg.grid), b.v.on(cfg.grid)
    return _hdist(cfg.grid.spacing_h, ua, va, ub, vb)


def _hdist(h: float, u1, v1, u2, v2) -> float:
    return float(np.sqrt(h * (np.sum((u1 - u2) ** 2) + np.sum((v1 - v2) ** 2))))


def _geomean_ratio(history: list[float]) -> float:
    ratios = [
        history[i + 1] / history[i]
        for i in range(len(history) - 1)
        if history[i] > 0 and history[i + 1] > 0
    ]
    if not ratios:
        return math.nan
    return float(np.exp(np.mean(np.log(ratios))))


def period_map(z0: SystemState, cfg: ModelConfig) -> SystemState:
    """Advance one period and reset the clock: fixed points are periodic states."""
    if abs(z0.t) > 1e-12:
        raise ValueError("period map expects a state at t = 0")
    u, v = _advance_period(z0.u.on(cfg.grid), z0.v.on(cfg.grid), cfg)
    return SystemState(0.0, Field(u), Field(v))


class _Anderson:
    """Windowed Anderson mixing of a fixed-point sequence (damping 1)."""

    def __init__(self, window: int):
        self.window = window
        self.xs: list[np.ndarray] = []
        self.gs: list[np.ndarray] = []

    def push(self, x: np.ndarray, gx: np.ndarray) -> np.ndarray:
        self.xs.append(x)
        self.gs.append(gx)
        if len(self.xs) > self.window + 1:
            self.xs.pop(0)
            self.gs.pop(0)
        if len(self.xs) == 1:
            return gx
        F = [g - x for x, g in zip(self.xs, self.gs)]
        dF = np.column_stack([F[i + 1] - F[i] for i in range(len(F) - 1)])
        dG = np.column_stack([self.gs[i + 1] - self.gs[i] for i in range(len(F) - 1)])
        gamma, *_ = np.linalg.lstsq(dF, F[-1], rcond=None)
        return gx - dG @ gamma


def find_periodic(
    cfg: ModelConfig,
    z_init: SystemState | None = None,
    tol: float = 1e-8,
    max_iter: int = 100,
    anderson_window: int = 0,
) -> PeriodicReport:
    """Iterate the period map until |z(T) - z(0)|_H <= tol.

    Returns the report on success; raises :class:`NotConvergedError` (with the
    report attached) when the iteration cap is reached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = cfg.grid
    if z_init is None:
        z_init = SystemState.zero(grid)
    u = z_init.u.on(grid).copy()
    v = z_init.v.on(grid).copy()
    h = grid.spacing_h
    accel = _Anderson(anderson_window) if anderson_window > 0 else None
    history: list[float] = []
    converged = False
    for _ in range(max_iter):
        u_new, v_new = _advance_period(u, v, cfg)
        history.append(_hdist(h, u, v, u_new, v_new))
        if history[-1] <= tol:
            u, v = u_new, v_new
            converged = True
            break
        if accel is not None:
            x = np.concatenate([u, v])
            gx = np.concatenate([u_new, v_new])
            mixed = accel.push(x, gx)
            u, v = mixed[: u.size], mixed[u.size :]
        else:
            u, v = u_new, v_new
    report = PeriodicReport(
        iterations=len(history),
        residual_history=history,
        contraction_estimate=_geomean_ratio(history),
        c0=cfg.c0(),
        converged=converged,
        final_state=SystemState(0.0, Field(u), Field(v)),
    )
    if converged and cfg.c0() > 0 and any(b > a for a, b in zip(history[1:], history[2:])):
        warnings.warn("periodicity residual was not monotone despite c0 > 0", stacklevel=2)
    if not converged:
        raise NotConvergedError(
            f"period-map iteration did not reach tol={tol} in {max_iter} iterations "
            f"(last residual {history[-1]:.3e})",
            report,
        )
    return report


# ---------------------------------------------------------------------------
# linear periodic problem and the outer (load) fixed point
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class PeriodicForcing:
    """Load sampled at the step times t_k = k dt, k = 0..n (rows of fu, fv)."""

    fu: np.ndarray
    fv: np.ndarray

    def __post_init__(self):
        self.fu = np.asarray(self.fu, dtype=float)
        self.fv = np.asarray(self.fv, dtype=float)
        if self.fu.shape != self.fv.shape or self.fu.ndim != 2:
            raise ValueError("fu and fv must be equal-shape (n_times, n_interior) arrays")

    @classmethod
    def zeros(cls, cfg: ModelConfig) -> "PeriodicForcing":
        shape = (cfg.n_steps + 1, cfg.grid.n_interior)
        return cls(np.zeros(shape), np.zeros(shape))

    @classmethod
    def constant(cls, cfg: ModelConfig, cu: float, cv: float) -> "PeriodicForcing":
        shape = (cfg.n_steps + 1, cfg.grid.n_interior)
        return cls(np.full(shape, float(cu)), np.full(shape, float(cv)))

    def check(self, cfg: ModelConfig):
        if self.fu.shape != (cfg.n_steps + 1, cfg.grid.n_interior):
            raise ValueError(
                f"forcing shape {self.fu.shape} does not match "
                f"({cfg.n_steps + 1}, {cfg.grid.n_interior})"
            )


def _linear_period(u0, v0, forcing: PeriodicForcing, cfg: ModelConfig, record: bool):
    """March the linear problem z' + A z = f over one period."""
    ctx = cfg._context()
    dt = cfg.dt
    n = cfg.n_steps
    u, v = u0, v0
    if record:
        U = np.empty((n + 1, u0.size))
        V = np.empty((n + 1, v0.size))
        U[0], V[0] = u0, v0
    for k in range(n):
        rhs_u = u + dt * forcing.fu[k]
        rhs_v = v + dt * forcing.fv[k]
        u = solve_banded((1, 1), ctx.ab_u, rhs_u, check_finite=False)
        v = solve_banded((1, 1), ctx.ab_v, rhs_v, check_finite=False)
        if record:
            U[k + 1], V[k + 1] = u, v
    if record:
        return Trajectory(times=dt * np.arange(n + 1), u=U, v=V, config_digest=cfg.digest)
    return u, v


def linear_periodic_solve(
    forcing: PeriodicForcing,
    cfg: ModelConfig,
    tol: float = 1e-10,
    max_iter: int = 1000,
    z_init: SystemState | None = None,
) -> Trajectory:
    """Discrete periodic solution of the linear problem z' + A z = f.

    A is the implicit operator of the stepper (the Laplacians plus v/lam); the
    period map of the forced linear problem is affine with a strictly
    contractive linear part, so plain Picard iteration converges from any
    start.  The periodicity residual of the returned trajectory is <= tol.
    """
    forcing.check(cfg)
    grid = cfg.grid
    if z_init is None:
        u = np.zeros(grid.n_interior)
        v = np.zeros(grid.n_interior)
    else:
        u = z_init.u.on(grid).copy()
        v = z_init.v.on(grid).copy()
    h = grid.spacing_h
    last = math.inf
    for _ in range(max_iter):
        u_new, v_new = _linear_period(u, v, forcing, cfg, record=False)
        last = _hdist(h, u, v, u_new, v_new)
        u, v = u_new, v_new
        if last <= tol:
            return _linear_period(u, v, forcing, cfg, record=True)
    report = PeriodicReport(
        iterations=max_iter,
        residual_history=[last],
        contraction_estimate=math.nan,
        c0=cfg.c0(),
        converged=False,
        final_state=SystemState(0.0, Field(u), Field(v)),
        method="linear",
    )
    raise NotConvergedError(f"linear periodic solve stalled at residual {last:.3e}", report)


def forcing_from_trajectory(cfg: ModelConfig, traj: Trajectory) -> PeriodicForcing:
    """Evaluate the nonlinear load (h, g + P v / lam) along a trajectory."""
    shape = traj.u.shape
    t_col = traj.times[:, None]
    fu = np.broadcast_to(np.asarray(cfg.eval_h(t_col, traj.u, traj.v), dtype=float), shape).copy()
    gv = np.broadcast_to(np.asarray(cfg.eval_g(t_col, traj.u, traj.v), dtype=float), shape).copy()
    if cfg.lam is not None:
        gv += cfg.project_v(traj.u, traj.v) / cfg.lam
    return PeriodicForcing(fu, gv)


def forcing_distance(cfg: ModelConfig, a: PeriodicForcing, b: PeriodicForcing) -> float:
    """Step-weighted L2(0,T;H x H) distance between two sampled loads."""
    h = cfg.grid.spacing_h
    du = a.fu[:-1] - b.fu[:-1]
    dv = a.fv[:-1] - b.fv[:-1]
    return float(np.sqrt(cfg.dt * h * (np.sum(du**2) + np.sum(dv**2))))


def forcing_sup(cfg: ModelConfig, f: PeriodicForcing) -> float:
    """sup over step times of the instantaneous load norm |f(t)|_{H x H}."""
    h = cfg.grid.spacing_h
    mags = h * (np.sum(f.fu**2, axis=1) + np.sum(f.fv**2, axis=1))
    return float(np.sqrt(np.max(mags)))


def forcing_bound(cfg: ModelConfig) -> float:
    """A priori bound R on |F(z)|_{H x H} from the data bounds.

    |h| <= h_sup and |g + P v/lam| <= g_sup + sup_bound/lam pointwise, so the
    product-space norm is at most sqrt(L) * sqrt(h_sup^2 + (...)^2).
    """
    h_sup, g_sup = cfg.data_bounds()
    v_part = g_sup if cfg.lam is None else g_sup + cfg.curves_eps.sup_bound / cfg.lam
    return float(np.sqrt(cfg.grid.length_L) * np.hypot(h_sup, v_part))


def outer_fixed_point(
    cfg: ModelConfig,
    tol: float = 1e-6,
    max_iter: int = 600,
    inner_tol: float = 1e-10,
) -> PeriodicReport:
    """Two-level construction: load -> linear periodic solve -> refreshed load.

    Stops when the load increment |f_{k+1} - f_k|_{L2(0,T;HxH)} drops below
    ``tol``; the inner linear solves are warm-started with the previous
    periodic state.  Reports the running sup of the load norm against the a
    priori bound R.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f = PeriodicForcing.zeros(cfg)
    warm: SystemState | None = None
    history: list[float] = []
    sup_f = 0.0
    bound = forcing_bound(cfg)
    converged = False
    traj = None
    for _ in range(max_iter):
        traj = linear_periodic_solve(f, cfg, tol=inner_tol, z_init=warm)
        warm = traj.initial_state()
        f_new = forcing_from_trajectory(cfg, traj)
        sup_f = max(sup_f, forcing_sup(cfg, f_new))
        history.append(forcing_distance(cfg, f_new, f))
        f = f_new
        if history[-1] <= tol:
            converged = True
            break
    report = PeriodicReport(
        iterations=len(history),
        residual_history=history,
        contraction_estimate=_geomean_ratio(history),
        c0=cfg.c0(),
        converged=converged,
        final_state=traj.initial_state(),
        method="outer",
        sup_forcing=sup_f,
        forcing_bound=bound,
    )
    if not converged:
        raise NotConvergedError(
            f"outer load iteration did not reach tol={tol} in {max_iter} iterations "
            f"(last increment {history[-1]:.3e})",
            report,
        )
    return report
