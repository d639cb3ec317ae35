import math

import numpy as np
import pytest

from conftest import canonical_model
from periplay.curves import coincident, truncated_play
from periplay.diagnostics import (
    constraint_violation,
    defect_field_check,
    energy_inequality_check,
    norm_bundle,
    vi_residual,
)
from periplay.dynamics import ModelConfig, Trajectory, integrate
from periplay.periodic import find_periodic
from periplay.spatial import Grid1D


def small_run(**overrides):
    params = dict(
        kappa=1.0,
        lam=1e-3,
        epsilon=0.1,
        period_T=0.25,
        dt=1e-3,
        grid=Grid1D(1.0, 24),
        curves=truncated_play(),
        h_expr="sin(8*pi*t)",
        g_expr="12 - 0.5*v",
        L_star=0.5,
    )
    params.update(overrides)
    cfg = ModelConfig(**params)
    report = find_periodic(cfg, tol=1e-9, max_iter=300)
    return cfg, integrate(report.final_state, cfg)


def synthetic_trajectory(grid: Grid1D, n_steps: int, T: float, fn_u, fn_v) -> Trajectory:
    times = np.linspace(0.0, T, n_steps + 1)
    x = grid.nodes()
    U = np.stack([fn_u(t, x) for t in times])
    V = np.stack([fn_v(t, x) for t in times])
    return Trajectory(times=times, u=U, v=V)


# --- constraint violation -------------------------------------------------------


def test_violation_zero_inside_band():
    grid = Grid1D(1.0, 16)
    pair = truncated_play()
    traj = synthetic_trajectory(grid, 4, 1.0, lambda t, x: 0.0 * x, lambda t, x: 0.0 * x)
    rep = constraint_violation(traj, pair)
    assert rep.sup_upper_violation == 0.0
    assert rep.sup_lower_violation == 0.0


def test_violation_single_node_construction():
    grid = Grid1D(1.0, 16)
    pair = truncated_play()
    traj = synthetic_trajectory(grid, 4, 1.0, lambda t, x: 0.0 * x, lambda t, x: 0.0 * x)
    traj.v[2, 7] = float(pair.upper(0.0)) + 0.01
    rep = constraint_violation(traj, pair)
    assert rep.sup_upper_violation == pytest.approx(0.01)
    assert rep.sup_lower_violation == 0.0


def test_violation_equals_lam_times_max_yosida():
    cfg, traj = small_run()
    rep = constraint_violation(traj, cfg.curves_eps)
    lo, hi = cfg.band(traj.u)
    yos = (np.maximum(traj.v - hi, 0.0) - np.maximum(lo - traj.v, 0.0)) / cfg.lam
    assert max(rep.sup_upper_violation, rep.sup_lower_violation) == pytest.approx(
        cfg.lam * float(np.max(np.abs(yos))), abs=1e-12
    )


# --- variational inequality -----------------------------------------------------


def test_vi_pairing_zero_for_projected_test_point():
    """Choosing z = P v makes the pairing vanish wherever v is admissible."""
    cfg, traj = small_run()
    jv = cfg.project_v(traj.u, traj.v)
    inside = np.abs(jv - traj.v) < 1e-14
    assert np.all((traj.v - jv)[inside] == 0.0)


def test_vi_residual_zero_for_degenerate_linear_case():
    cfg, traj = small_run(
        curves=coincident("0", lipschitz_L0=0.0), h_expr="0", g_expr="0", L_star=0.0, epsilon=0.0
    )
    assert np.max(np.abs(traj.v)) <= 1e-12
    assert vi_residual(traj, cfg.curves_eps, cfg) <= 1e-9


def test_vi_residual_shrinks_with_dt():
    """On a coarse run the splitting lag shows up as a positive residual of
    magnitude O(lam + dt); halving dt roughly halves it."""
    cfg1, traj1 = small_run(dt=1e-3)
    cfg2, traj2 = small_run(dt=2.5e-4)
    r1 = vi_residual(traj1, cfg1.curves_eps, cfg1)
    r2 = vi_residual(traj2, cfg2.curves_eps, cfg2)
    assert r1 >= 0.0 and r2 >= 0.0
    assert r2 <= 0.6 * r1


def test_vi_needs_three_states():
    grid = Grid1D(1.0, 4)
    traj = synthetic_trajectory(grid, 1, 1.0, lambda t, x: 0 * x, lambda t, x: 0 * x)
    with pytest.raises(ValueError):
        vi_residual(traj, truncated_play(), canonical_model(n=4))


# --- norm bundle -----------------------------------------------------------------


def test_bundle_zero_trajectory():
    cfg = canonical_model(n=16, dt=0.25)
    traj = synthetic_trajectory(cfg.grid, 4, 1.0, lambda t, x: 0 * x, lambda t, x: 0 * x)
    bundle = norm_bundle(traj, cfg)
    assert all(v == 0.0 for v in bundle.to_dict().values())


def test_bundle_synthetic_decay_closed_forms():
    """u(t,x) = exp(-t) sin(pi x): compare against the analytic integrals."""
    grid = Grid1D(1.0, 128)
    T = 1.0
    n_steps = 800
    cfg = ModelConfig(
        kappa=1.0, lam=None, epsilon=0.0, period_T=T, dt=T / n_steps,
        grid=grid, curves=truncated_play(), h_expr="0", g_expr="0",
    )
    traj = synthetic_trajectory(
        grid, n_steps, T,
        lambda t, x: math.exp(-t) * np.sin(np.pi * x),
        lambda t, x: 0.0 * x,
    )
    bundle = norm_bundle(traj, cfg)
    # |u'|^2 = int_0^T e^{-2t} dt * int_0^1 sin^2 = (1 - e^{-2})/2 * 1/2
    expected_dt = math.sqrt((1 - math.exp(-2.0)) / 2.0 * 0.5)
    assert bundle.u_dt_l2 == pytest.approx(expected_dt, rel=2e-3)
    # |lap u| = pi^2 |u|
    expected_lap = np.pi**2 * expected_dt
    assert bundle.u_lap_l2 == pytest.approx(expected_lap, rel=2e-3)
    # |grad u|_{Linf(0,T;H)} at t = 0: pi * sqrt(1/2)
    assert bundle.u_grad_linf == pytest.approx(np.pi * math.sqrt(0.5), rel=2e-3)
    assert bundle.v_dt_l2 == 0.0


def test_bundle_canonical_finite(canonical_traj, canonical_cfg):
    bundle = norm_bundle(canonical_traj, canonical_cfg)
    for name, val in bundle.to_dict().items():
        assert math.isfinite(val), name
    assert bundle.yosida_l2 > 0  # constraint is active on the canonical run


# --- energy-derivative inequality ---------------------------------------------------


def test_energy_inequality_inactive_constraint():
    cfg, traj = small_run(g_expr="0", h_expr="0", L_star=0.0, lam=0.05)
    assert np.max(np.abs(traj.v)) == 0.0
    assert energy_inequality_check(traj, cfg.curves_eps, cfg) == 0.0


def test_energy_inequality_frozen_u_exact_convexity():
    """With u frozen at 0 the u-shift term drops and convexity makes the
    discrete inequality exact."""
    cfg = ModelConfig(
        kappa=1.0, lam=0.02, epsilon=0.05, period_T=0.25, dt=1e-3,
        grid=Grid1D(1.0, 24), curves=truncated_play(),
        h_expr="0", g_expr="12*sin(8*pi*t) - 0.5*v", L_star=0.5,
    )
    report = find_periodic(cfg, tol=1e-9, max_iter=300)
    traj = integrate(report.final_state, cfg)
    assert np.max(np.abs(traj.u)) == 0.0
    assert energy_inequality_check(traj, cfg.curves_eps, cfg) <= 1e-8


def test_energy_inequality_requires_lam():
    cfg = canonical_model(n=8, lam=None, epsilon=0.0)
    traj = synthetic_trajectory(cfg.grid, 4, 1.0, lambda t, x: 0 * x, lambda t, x: 0 * x)
    with pytest.raises(ValueError):
        energy_inequality_check(traj, cfg.curves_eps, cfg)


# --- two-parameter defect bound -------------------------------------------------------


def test_defect_field_identical_trajectories():
    cfg, traj = small_run()
    assert defect_field_check(traj, cfg.lam, traj, cfg.lam, cfg.curves) == 0.0


def test_defect_field_two_lambda_runs():
    cfg_i, traj_i = small_run(lam=1e-2)
    cfg_j, traj_j = small_run(lam=1e-3)
    res = defect_field_check(traj_i, 1e-2, traj_j, 1e-3, cfg_i.curves)
    assert res <= 1e-10


def test_defect_field_randomized_synthetic_pairs(rng):
    pair = truncated_play()
    worst = 0.0
    for _ in range(1000):
        times = np.linspace(0, 1, 4)
        shape = (4, 12)
        ti = Trajectory(times=times, u=rng.uniform(-3, 3, shape), v=rng.uniform(-3, 3, shape))
        tj = Trajectory(times=times, u=rng.uniform(-3, 3, shape), v=rng.uniform(-3, 3, shape))
        lam_i = float(10.0 ** rng.uniform(-3, 0))
        lam_j = float(10.0 ** rng.uniform(-3, 0))
        worst = max(worst, defect_field_check(ti, lam_i, tj, lam_j, pair))
    assert worst <= 1e-10


def test_v_l2_uniform_across_lambda_sweep():
    """|v|_{L2(0,T;H)} stays in a factor-2 band as the regularization tightens."""
    norms_v = []
    for lam in (1e-2, 1e-3, 1e-4):
        cfg, traj = small_run(lam=lam, dt=min(1e-3, lam))
        dt = float(traj.times[1] - traj.times[0])
        h = cfg.grid.spacing_h
        norms_v.append(float(np.sqrt(dt * h * np.sum(traj.v[:-1] ** 2))))
    assert max(norms_v) <= 2.0 * min(norms_v)


def test_defect_field_shape_mismatch():
    pair = truncated_play()
    times = np.linspace(0, 1, 3)
    t1 = Trajectory(times=times, u=np.zeros((3, 8)), v=np.zeros((3, 8)))
    t2 = Trajectory(times=times, u=np.zeros((3, 9)), v=np.zeros((3, 9)))
    with pytest.raises(ValueError):
        defect_field_check(t1, 0.1, t2, 0.1, pair)
