"""Post-processing checks of the model's defining conditions on computed runs.

Everything here consumes finished trajectories: how badly the band constraint
is violated (and that the violation is exactly lam times the regularization
magnitude), the variational-inequality residual of the constrained phase
equation, the a-priori norm bundle used by the parameter sweeps, the discrete
energy-derivative inequality of the regularized indicator, and the
monotonicity-defect bound between runs at two regularization parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import CurvePair
from .dynamics import ModelConfig, Trajectory
from .hysteresis import yosida
from .spatial import Grid1D

__all__ = [
    "NormBundle",
    "ConstraintReport",
    "constraint_violation",
    "vi_residual",
    "norm_bundle",
    "energy_inequality_check",
    "defect_field_check",
]


@dataclass
class NormBundle:
    """Measured a-priori quantities of one run (time-integrated norms).

    Time derivatives use forward differences; L2-in-time norms are
    step-weighted left sums; L-infinity-in-time norms are maxima over steps.
    """

    u_dt_l2: float
    u_lap_l2: float
    u_grad_linf: float
    v_dt_l2: float
    v_lap_l2: float
    v_grad_linf: float
    yosida_l2: float

    def __post_init__(self):
        for name, val in self.to_dict().items():
            if not (math.isfinite(val) and val >= 0):
                raise ValueError(f"norm bundle entry {name} must be finite and nonnegative")

    def to_dict(self) -> dict:
        return {
            "u_dt_l2": self.u_dt_l2,
            "u_lap_l2": self.u_lap_l2,
            "u_grad_linf": self.u_grad_linf,
            "v_dt_l2": self.v_dt_l2,
            "v_lap_l2": self.v_lap_l2,
            "v_grad_linf": self.v_grad_linf,
            "yosida_l2": self.yosida_l2,
        }


@dataclass
class ConstraintReport:
    """Sup of the band violations, plus the variational-inequality residual."""

    sup_upper_violation: float
    sup_lower_violation: float
    vi_max_positive: float = math.nan

    def to_dict(self) -> dict:
        return {
            "sup_upper_violation": self.sup_upper_violation,
            "sup_lower_violation": self.sup_lower_violation,
            "vi_max_positive": self.vi_max_positive,
        }


def _lap_rows(grid: Grid1D, W: np.ndarray) -> np.ndarray:
    """3-point stencil along axis 1 with zero ghost values, all rows at once."""
    h2 = grid.spacing_h**2
    out = -2.0 * W
    out[:, :-1] += W[:, 1:]
    out[:, 1:] += W[:, :-1]
    return out / h2


def _grad_l2_rows(grid: Grid1D, W: np.ndarray) -> np.ndarray:
    """|grad w|_H per row, boundary differences included."""
    n_rows = W.shape[0]
    padded = np.zeros((n_rows, W.shape[1] + 2))
    padded[:, 1:-1] = W
    diffs = np.diff(padded, axis=1)
    return np.sqrt(np.sum(diffs**2, axis=1) / grid.spacing_h)


def constraint_violation(traj: Trajectory, curves: CurvePair) -> ConstraintReport:
    """Sup over all nodes and times of [v - upper(u)]^+ and [lower(u) - v]^+."""
    lo = curves.lower(traj.u)
    hi = curves.upper(traj.u)
    return ConstraintReport(
        sup_upper_violation=float(np.max(np.maximum(traj.v - hi, 0.0))),
        sup_lower_violation=float(np.max(np.maximum(lo - traj.v, 0.0))),
    )


def vi_residual(traj: Trajectory, curves: CurvePair, cfg: ModelConfig) -> float:
    """Max positive part of <v' - kappa lap v - g(t,u,v), v - z>_H over admissible z.

    The pairing is affine in z, so its maximum over the band-valued test set
    is attained by choosing, at every node, the endpoint of
    [lower(u), upper(u)] opposite to the sign of the residual; that exact
    nodewise-endpoint maximization is what is computed.  v' is a centered
    difference, so the first and last step times are not sampled.
    """
    if traj.n_states < 3:
        raise ValueError("need at least three states for centered differences")
    dt = float(traj.times[1] - traj.times[0])
    V, U = traj.v, traj.u
    vdot = (V[2:] - V[:-2]) / (2.0 * dt)
    lap_v = _lap_rows(cfg.grid, V[1:-1])
    g = np.broadcast_to(
        np.asarray(cfg.eval_g(traj.times[1:-1, None], U[1:-1], V[1:-1]), dtype=float),
        vdot.shape,
    )
    r = vdot - cfg.kappa * lap_v - g
    lo = curves.lower(U[1:-1])
    hi = curves.upper(U[1:-1])
    best = np.maximum(r * (V[1:-1] - lo), r * (V[1:-1] - hi))
    pairing = cfg.grid.spacing_h * np.sum(best, axis=1)
    return float(max(np.max(pairing), 0.0))


def norm_bundle(traj: Trajectory, cfg: ModelConfig) -> NormBundle:
    """Time-integrated norms of one run; see :class:`NormBundle`."""
    dt = float(traj.times[1] - traj.times[0])
    h = cfg.grid.spacing_h

    def dt_l2(W):
        d = (W[1:] - W[:-1]) / dt
        return float(np.sqrt(dt * h * np.sum(d**2)))

    def lap_l2(W):
        lap = _lap_rows(cfg.grid, W[:-1])
        return float(np.sqrt(dt * h * np.sum(lap**2)))

    def grad_linf(W):
        return float(np.max(_grad_l2_rows(cfg.grid, W)))

    if cfg.lam is None:
        yos_l2 = 0.0
    else:
        lo, hi = cfg.band(traj.u[:-1])
        over = np.maximum(traj.v[:-1] - hi, 0.0)
        under = np.maximum(lo - traj.v[:-1], 0.0)
        yos = (over - under) / cfg.lam
        yos_l2 = float(np.sqrt(dt * h * np.sum(yos**2)))

    return NormBundle(
        u_dt_l2=dt_l2(traj.u),
        u_lap_l2=lap_l2(traj.u),
        u_grad_linf=grad_linf(traj.u),
        v_dt_l2=dt_l2(traj.v),
        v_lap_l2=lap_l2(traj.v),
        v_grad_linf=grad_linf(traj.v),
        yosida_l2=yos_l2,
    )


def energy_inequality_check(traj: Trajectory, curves_eps: CurvePair, cfg: ModelConfig) -> float:
    """Max positive defect of the discrete energy-derivative inequality.

    Checks, step by step, that the increment of the regularized indicator
    energy is dominated by <dI, v'>_H + L0 |u'|_H |dI|_H with dI evaluated at
    the end of the step.  The v-part is exact by convexity; the u-shift part
    is first order, so the positive defect is O(dt).
    """
    if cfg.lam is None:
        raise ValueError("energy inequality requires a finite lam")
    lam = cfg.lam
    dt = float(traj.times[1] - traj.times[0])
    h = cfg.grid.spacing_h
    L0 = curves_eps.lipschitz_L0

    lo = curves_eps.lower(traj.u)
    hi = curves_eps.upper(traj.u)
    over = np.maximum(traj.v - hi, 0.0)
    under = np.maximum(lo - traj.v, 0.0)
    energy = (h / (2.0 * lam)) * np.sum(over**2 + under**2, axis=1)
    yos = (over - under) / lam

    dI = (energy[1:] - energy[:-1]) / dt
    v_rate = (traj.v[1:] - traj.v[:-1]) / dt
    pair = h * np.sum(yos[1:] * v_rate, axis=1)
    u_rate_norm = np.sqrt(h * np.sum(((traj.u[1:] - traj.u[:-1]) / dt) ** 2, axis=1))
    yos_norm = np.sqrt(h * np.sum(yos[1:] ** 2, axis=1))
    defect = dI - pair - L0 * u_rate_norm * yos_norm
    return float(max(np.max(defect), 0.0))


def defect_field_check(
    traj_i: Trajectory,
    lam_i: float,
    traj_j: Trajectory,
    lam_j: float,
    curves: CurvePair,
) -> float:
    """Max positive part of (-S - delta) over shared times; nonpositive up to rounding.

    S pairs the difference of the two regularizations against the difference
    of the states in H; delta is the closed-form lower-bound magnitude built
    from the regularization norms and the curve shifts.
    """
    if traj_i.u.shape != traj_j.u.shape:
        raise ValueError("trajectories must share the grid and step count")
    if not np.allclose(traj_i.times, traj_j.times, atol=1e-9, rtol=0.0):
        raise ValueError("trajectories must be sampled at the same times")
    n_nodes = traj_i.u.shape[1]
    yos_i = yosida(curves, lam_i, traj_i.u, traj_i.v)
    yos_j = yosida(curves, lam_j, traj_j.u, traj_j.v)
    lo_i, hi_i = curves.lower(traj_i.u), curves.upper(traj_i.u)
    lo_j, hi_j = curves.lower(traj_j.u), curves.upper(traj_j.u)
    # the common scale h multiplies every H-quantity; S and delta are 1-homogeneous
    # in it jointly, so the sign of (-S - delta) does not depend on h (use h = 1/n).
    h = 1.0 / (n_nodes + 1)
    S = h * np.sum((yos_j - yos_i) * (traj_j.v - traj_i.v), axis=1)
    norm_i = np.sqrt(h * np.sum(yos_i**2, axis=1))
    norm_j = np.sqrt(h * np.sum(yos_j**2, axis=1))
    shift = np.sqrt(h * np.sum((hi_j - hi_i) ** 2, axis=1)) + np.sqrt(
        h * np.sum((lo_j - lo_i) ** 2, axis=1)
    )
    delta = (lam_i + lam_j) * norm_i * norm_j + (norm_i + norm_j) * shift
    return float(max(np.max(-S - delta), 0.0))
