#!/usr/bin/env python3
# Constraint curves and their smoothing
# =====================================
#
# The admissible band for the order parameter is the region between two
# Lipschitz curves that coincide outside a finite interval.  The canonical
# example is the truncated-play band
#
#     lower(u) = clamp(u - 1, -1, 1),   upper(u) = clamp(u + 1, -1, 1),
#
# which agree for |u| >= 2.  Both curves have corners, so the regularized
# problems smooth them by convolution with a compactly supported bump kernel.
# This script shows the band, the effect of smoothing, and the structural
# properties the smoothing preserves.

import numpy as np

from periplay import Mollifier, eval_pair, mollify, truncated_play

pair = truncated_play(half_width=1.0, saturation=1.0)

print("canonical truncated-play band")
print(f"  Lipschitz constant L0 = {pair.lipschitz_L0}")
print(f"  coincidence outside   ({pair.coincide_a}, {pair.coincide_b})")
print(f"  sup bound             {pair.sup_bound}")
print()

# A few sampled values.  Outside (-2, 2) the band degenerates to a point.
print(f"{'u':>6} {'lower':>8} {'upper':>8}")
for u in (-3.0, -1.0, 0.0, 1.0, 3.0):
    lo, hi = eval_pair(pair, u)
    print(f"{u:6.1f} {lo:8.3f} {hi:8.3f}")
print()

# Smoothing rounds the corners but never crosses the original sup bound,
# never increases the Lipschitz constant, and converges at rate L0*eps.
for eps in (0.5, 0.1, 0.02):
    m = Mollifier(eps)
    lo0, hi0 = mollify(pair, m, 0.0)
    u = np.linspace(-5, 5, 4001)
    lo, hi = mollify(pair, m, u)
    drift = max(np.max(np.abs(lo - pair.lower(u))), np.max(np.abs(hi - pair.upper(u))))
    print(
        f"eps = {eps:5.2f}: upper_eps(0) = {hi0:.6f} (corner value 1 shaved by {1 - hi0:.6f}), "
        f"sup|f_eps - f| = {drift:.4f} <= L0*eps = {pair.lipschitz_L0 * eps:.4f}"
    )
print()

# The kernel itself: even, nonnegative, supported in [-1, 1], unit mass under
# the quadrature rule that evaluates the convolution.
m = Mollifier(0.1)
print(f"kernel quadrature mass = {m.quadrature_mass():.15f}")
print(f"kernel at s = 0        = {m.kernel(0.0):.6f}")
print(f"kernel at |s| >= 1     = {m.kernel(1.0):.1f}, {m.kernel(-1.2):.1f}")
