#!/usr/bin/env python3
# Computing a time-periodic solution two ways
# ===========================================
#
# A periodic solution is a fixed point of the period map z(0) -> z(T).  The
# direct route iterates that map (Picard); under the structural hypothesis
# L_star < kappa/C_P the order-parameter component contracts geometrically.
# The second route fixes the nonlinear load f, solves the *linear* periodic
# problem z' + A z = f (itself a strictly contractive affine period map),
# refreshes f from the solution, and repeats.  Both must land on the same
# state; the second also certifies an a priori bound on the load.

import numpy as np

from periplay import (
    Grid1D,
    ModelConfig,
    find_periodic,
    period_map,
    outer_fixed_point,
    state_distance,
    truncated_play,
)

cfg = ModelConfig(
    kappa=1.0,
    lam=0.05,
    epsilon=0.1,
    period_T=0.25,
    dt=1e-3,
    grid=Grid1D(1.0, 48),
    curves=truncated_play(),
    h_expr="sin(8*pi*t)",
    g_expr="12 - 0.5*v",
    L_g=0.0,
    L_star=0.5,
)

print("route 1: period-map iteration")
direct = find_periodic(cfg, tol=1e-10, max_iter=200)
print(f"  converged in {direct.iterations} iterations")
print(f"  residual history: {['%.2e' % r for r in direct.residual_history]}")
print(f"  empirical contraction factor per period: {direct.contraction_estimate:.3e}")
print(f"  structural rate c0 = {direct.c0:.2f}  (exp(-c0 T) = {np.exp(-direct.c0 * cfg.period_T):.3e})")

print("\nroute 2: alternate linear periodic solves with load refreshes")
outer = outer_fixed_point(cfg, tol=1e-8, max_iter=400)
print(f"  converged in {outer.iterations} load refreshes")
print(f"  load increment history (last 4): {['%.2e' % r for r in outer.residual_history[-4:]]}")
print(f"  sup_t |load| = {outer.sup_forcing:.2f} <= a priori bound R = {outer.forcing_bound:.2f}")

gap = state_distance(cfg, direct.final_state, outer.final_state)
print(f"\nagreement between the two periodic states: |dz|_H = {gap:.2e}")

z = direct.final_state
re_res = state_distance(cfg, period_map(z, cfg), z)
print(f"re-integrating one period from the fixed point: residual {re_res:.2e}")
