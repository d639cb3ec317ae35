"""Time integration of the regularized phase-field system.

One step advances the pair z = (u, v) by semi-implicit (IMEX) Euler:

    (I - dt*Lap) u^{n+1}                      = u^n + dt * h(t^n, u^n, v^n)
    ((1 + dt/lam) I - dt*kappa*Lap) v^{n+1}   = v^n + dt * (g(t^n, u^n, v^n)
                                                 + (1/lam) * P_{u^n} v^n)

where P_u v is the projection of v onto the admissible band at u.  The
implicit side is exactly the linear coercive part (the Laplacians plus the
v/lam term); everything bounded and Lipschitz (h, g, the projection) is
explicit, so each step costs two tridiagonal solves.  With ``lam=None`` the
constraint terms are absent and the system is an ordinary reaction-diffusion
pair.

States are clamped to the truncation box before the nonlinearities are
evaluated, matching the reduction to bounded data under which the model's
structural constants are defined.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np
from scipy.linalg import solve_banded

from . import exprlang
from .curves import CurvePair, Mollifier, mollified_pair
from .spatial import Field, Grid1D, poincare_constant

__all__ = [
    "ModelConfig",
    "SystemState",
    "Trajectory",
    "InstabilityError",
    "step",
    "integrate",
]


class InstabilityError(ArithmeticError):
    """Non-finite values appeared during a step; reduce dt."""


def _as_callable(source) -> tuple[str, Callable]:
    """Normalize str | Expr | callable to (description, f(t, u, v))."""
    if callable(source) and not isinstance(source, exprlang.Expr):
        return getattr(source, "__name__", "<callable>"), source
    tree, fn = exprlang.compile_expr(source)
    return exprlang.to_string(tree), fn


@dataclass(eq=False)
class ModelConfig:
    """All model parameters for one run.

    ``lam`` is the constraint regularization parameter (None switches the
    constraint machinery off entirely); ``epsilon`` the curve-smoothing
    parameter (0 means the raw curves are used); ``h_expr``/``g_expr`` the
    source terms, given as expression strings in (t, u, v), parsed trees, or
    plain callables.  ``L_g`` and ``L_star`` are the Lipschitz constants of g
    in u and v; the structural requirement L_star < kappa/C_P is checked on
    construction and reported as a warning, never an error.
    """

    kappa: float
    lam: float | None
    epsilon: float
    period_T: float
    dt: float
    grid: Grid1D
    curves: CurvePair
    h_expr: object = "0"
    g_expr: object = "0"
    L_g: float = 0.0
    L_star: float = 0.0
    truncation_B: float = 10.0
    quadrature_order: int = 64
    digest: str = ""

    n_steps: int = field(init=False)
    curves_eps: CurvePair = field(init=False)

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if isinstance(self.lam, str):
            if self.lam != "off":
                raise ValueError("lam must be a positive number, None, or 'off'")
            self.lam = None
        if self.lam is not None and self.lam <= 0:
            raise ValueError("lam must be positive (or None for off)")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.period_T <= 0 or self.dt <= 0:
            raise ValueError("period_T and dt must be positive")
        if self.truncation_B <= 0:
            raise ValueError("truncation_B must be positive")
        n = round(self.period_T / self.dt)
        if n < 1 or abs(n * self.dt - self.period_T) > 1e-12 * max(1.0, self.period_T):
            raise ValueError("dt must divide period_T to an integer number of steps")
        self.n_steps = n
        self._h_desc, self._h = _as_callable(self.h_expr)
        self._g_desc, self._g = _as_callable(self.g_expr)
        if self.epsilon > 0:
            self.curves_eps = mollified_pair(self.curves, Mollifier(self.epsilon, self.quadrature_order))
        else:
            self.curves_eps = self.curves
        if self.hypothesis_margin() <= 0:
            warnings.warn(
                f"contraction hypothesis violated: L_star={self.L_star} >= "
                f"kappa/C_P={self.kappa / poincare_constant(self.grid):.6g}; "
                "periodic iteration may not contract",
                stacklevel=2,
            )
        self._bounds_cache: tuple[float, float] | None = None

    # -- structural constants ------------------------------------------------

    def c0(self) -> float:
        """Decay rate kappa/C_P - L_star of the v-contraction argument."""
        return self.kappa / poincare_constant(self.grid) - self.L_star

    def hypothesis_margin(self) -> float:
        return self.c0()

    def data_bounds(self, samples: int = 20_000, seed: int = 0) -> tuple[float, float]:
        """Sampled sup of |h| and |g| over one period times the truncation box."""
        if self._bounds_cache is None:
            rng = np.random.default_rng(seed)
            t = rng.uniform(0.0, self.period_T, samples)
            B = self.truncation_B
            u = rng.uniform(-B, B, samples)
            v = rng.uniform(-B, B, samples)
            h_sup = float(np.max(np.abs(self._h(t, u, v))))
            g_sup = float(np.max(np.abs(self._g(t, u, v))))
            self._bounds_cache = (h_sup, g_sup)
        return self._bounds_cache

    # -- clamped data evaluation ----------------------------------------------

    def eval_h(self, t, u, v):
        B = self.truncation_B
        return self._h(t, np.clip(u, -B, B), np.clip(v, -B, B))

    def eval_g(self, t, u, v):
        B = self.truncation_B
        return self._g(t, np.clip(u, -B, B), np.clip(v, -B, B))

    def band(self, u):
        """(lower, upper) of the effective (possibly smoothed) band at clamped u."""
        uc = np.clip(u, -self.truncation_B, self.truncation_B)
        return self.curves_eps.lower(uc), self.curves_eps.upper(uc)

    def project_v(self, u, v):
        lo, hi = self.band(u)
        return np.maximum(np.minimum(v, hi), lo)

    # -- stepping machinery ----------------------------------------------------

    def _context(self) -> "_StepContext":
        ctx = self.__dict__.get("_ctx")
        if ctx is None:
            ctx = _StepContext(self)
            self.__dict__["_ctx"] = ctx
        return ctx


class _StepContext:
    """Banded matrices for the two implicit solves of one configuration."""

    def __init__(self, cfg: ModelConfig):
        n = cfg.grid.n_interior
        h2 = cfg.grid.spacing_h**2
        self.ab_u = self._banded(1.0, cfg.dt / h2, n)
        alpha_v = 1.0 if cfg.lam is None else 1.0 + cfg.dt / cfg.lam
        self.ab_v = self._banded(alpha_v, cfg.dt * cfg.kappa / h2, n)

    @staticmethod
    def _banded(alpha: float, r: float, n: int) -> np.ndarray:
        ab = np.empty((3, n))
        ab[0, :] = -r
        ab[1, :] = alpha + 2.0 * r
        ab[2, :] = -r
        return ab


@dataclass(eq=False)
class SystemState:
    """The pair z = (u, v) at time t."""

    t: float
    u: Field
    v: Field

    def copy(self) -> "SystemState":
        return SystemState(self.t, self.u.copy(), self.v.copy())

    @classmethod
    def zero(cls, grid: Grid1D, t: float = 0.0) -> "SystemState":
        return cls(t, Field.zeros(grid), Field.zeros(grid))


@dataclass(eq=False)
class Trajectory:
    """Sampled history of one run: state at t = 0, dt, ..., T."""

    times: np.ndarray
    u: np.ndarray  # (n_states, n_interior)
    v: np.ndarray
    config_digest: str = ""

    @property
    def n_states(self) -> int:
        return self.times.size

    def state(self, k: int) -> SystemState:
        return SystemState(float(self.times[k]), Field(self.u[k].copy()), Field(self.v[k].copy()))

    def initial_state(self) -> SystemState:
        return self.state(0)

    def final_state(self) -> SystemState:
        return self.state(self.n_states - 1)

    def states(self) -> Iterator[SystemState]:
        for k in range(self.n_states):
            yield self.state(k)


def _step_arrays(tn: float, u: np.ndarray, v: np.ndarray, cfg: ModelConfig, ctx: _StepContext):
    dt = cfg.dt
    rhs_u = u + dt * cfg.eval_h(tn, u, v)
    if cfg.lam is None:
        rhs_v = v + dt * cfg.eval_g(tn, u, v)
    else:
        rhs_v = v + dt * (cfg.eval_g(tn, u, v) + cfg.project_v(u, v) / cfg.lam)
    u_next = solve_banded((1, 1), ctx.ab_u, rhs_u, check_finite=False)
    v_next = solve_banded((1, 1), ctx.ab_v, rhs_v, check_finite=False)
    if not (np.all(np.isfinite(u_next)) and np.all(np.isfinite(v_next))):
        raise InstabilityError(f"non-finite state after step at t={tn}; reduce dt")
    return u_next, v_next


def step(state: SystemState, cfg: ModelConfig) -> SystemState:
    """One IMEX Euler step from ``state``; time advances by dt."""
    u = state.u.on(cfg.grid)
    v = state.v.on(cfg.grid)
    u2, v2 = _step_arrays(state.t, u, v, cfg, cfg._context())
    return SystemState(state.t + cfg.dt, Field(u2), Field(v2))


def integrate(z0: SystemState, cfg: ModelConfig) -> Trajectory:
    """Integrate over one period [0, T], recording every step.

    The initial state must sit at t = 0; the result has n_steps + 1 states at
    the uniform step times.
    """
    if abs(z0.t) > 1e-12:
        raise ValueError("initial state must have t = 0")
    n = cfg.n_steps
    N = cfg.grid.n_interior
    U = np.empty((n + 1, N))
    V = np.empty((n + 1, N))
    U[0] = z0.u.on(cfg.grid)
    V[0] = z0.v.on(cfg.grid)
    ctx = cfg._context()
    dt = cfg.dt
    for k in range(n):
        U[k + 1], V[k + 1] = _step_arrays(k * dt, U[k], V[k], cfg, ctx)
    times = dt * np.arange(n + 1)
    return Trajectory(times=times, u=U, v=V, config_digest=cfg.digest)


def _advance_period(u0: np.ndarray, v0: np.ndarray, cfg: ModelConfig):
    """Endpoint arrays after one period, without recording the history."""
    ctx = cfg._context()
    dt = cfg.dt
    u, v = u0, v0
    for k in range(cfg.n_steps):
        u, v = _step_arrays(k * dt, u, v, cfg, ctx)
    return u, v


def config_fingerprint(payload: str) -> str:
    """Short sha256 hex digest used to stamp outputs with their configuration."""
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
