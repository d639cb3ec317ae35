"""Constraint boundary curves and their mollification.

A :class:`CurvePair` holds the lower/upper curves that bound the admissible
band for the order parameter: both Lipschitz with a common constant, lower
below upper everywhere, and coinciding outside a finite interval (a, b).
Curves are always clamped outside a truncation box so they are globally
Lipschitz and bounded.

:class:`Mollifier` smooths a curve by convolution with the standard bump
kernel, evaluated with a fixed-order Gauss-Legendre rule.  The discrete
kernel mass is normalized to exactly one, so the smoothed curve inherits the
Lipschitz constant and sup bound of the original without quadrature slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import exprlang

__all__ = [
    "CurvePair",
    "Mollifier",
    "bump_kernel_raw",
    "eval_pair",
    "mollify",
    "mollified_pair",
    "truncated_play",
    "coincident",
    "from_expressions",
    "estimate_sup_bound",
]


def bump_kernel_raw(s):
    """Unnormalized bump exp(-1/(1-s^2)) on (-1, 1), zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(eq=False)
class CurvePair:
    """Lower/upper constraint curves with their structural constants.

    ``lower`` and ``upper`` are vectorized callables of the input variable;
    ``lipschitz_L0`` is a common Lipschitz constant, ``(coincide_a,
    coincide_b)`` the interval outside which the curves agree, and
    ``sup_bound`` a bound on both curves' absolute values (after truncation).
    """

    lower: Callable
    upper: Callable
    lipschitz_L0: float
    coincide_a: float
    coincide_b: float
    sup_bound: float

    def __post_init__(self):
        if self.lipschitz_L0 < 0 or self.sup_bound < 0:
            raise ValueError("lipschitz_L0 and sup_bound must be nonnegative")
        if not self.coincide_a < self.coincide_b:
            raise ValueError("coincidence interval requires a < b")


def eval_pair(curves: CurvePair, u):
    """Evaluate (lower(u), upper(u)); scalar in, pair of floats out."""
    lo = curves.lower(u)
    hi = curves.upper(u)
    if np.isscalar(u) or np.ndim(u) == 0:
        return float(lo), float(hi)
    return lo, hi


@dataclass(eq=False)
class Mollifier:
    """Convolution against the scaled bump kernel, by Gauss-Legendre quadrature.

    The normalization constant is computed with the same quadrature rule used
    for evaluation, making the discrete kernel mass exactly one.
    """

    epsilon: float
    quadrature_order: int = 64
    _nodes: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)
    _normalization: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.quadrature_order < 1:
            raise ValueError("quadrature_order must be positive")
        nodes, gl_weights = np.polynomial.legendre.leggauss(self.quadrature_order)
        raw = gl_weights * bump_kernel_raw(nodes)
        self._normalization = 1.0 / float(raw.sum())
        self._nodes = nodes
        self._weights = raw * self._normalization  # sums to 1 exactly

    def kernel(self, s):
        """Normalized kernel values (even, nonnegative, supported in [-1, 1])."""
        return self._normalization * bump_kernel_raw(s)

    def quadrature_mass(self) -> float:
        """Kernel integral under this rule; equals 1 by construction."""
        return float(self._weights.sum())

    def convolve(self, f: Callable, u):
        """Smoothed value  sum_k w_k f(u - eps*s_k)  at scalar or array ``u``."""
        u_arr = np.asarray(u, dtype=float)
        scalar = u_arr.ndim == 0
        flat = np.atleast_1d(u_arr).ravel()
        out = np.empty_like(flat)
        # chunk so the (order, chunk) scratch stays small for big fields
        chunk = max(1, (1 << 20) // self._nodes.size)
        for i in range(0, flat.size, chunk):
            blk = flat[i : i + chunk]
            out[i : i + chunk] = self._weights @ f(blk[None, :] - self.epsilon * self._nodes[:, None])
        if scalar:
            return float(out[0])
        return out.reshape(u_arr.shape)


def mollify(curves: CurvePair, m: Mollifier, u):
    """Evaluate the smoothed pair (lower_eps(u), upper_eps(u))."""
    lo = m.convolve(curves.lower, u)
    hi = m.convolve(curves.upper, u)
    return lo, hi


def mollified_pair(curves: CurvePair, m: Mollifier) -> CurvePair:
    """Smoothed copy of ``curves``.

    The Lipschitz constant and sup bound carry over; the coincidence interval
    widens by epsilon on each side.
    """

    def lower_eps(u, _c=curves, _m=m):
        return _m.convolve(_c.lower, u)

    def upper_eps(u, _c=curves, _m=m):
        return _m.convolve(_c.upper, u)

    return CurvePair(
        lower=lower_eps,
        upper=upper_eps,
        lipschitz_L0=curves.lipschitz_L0,
        coincide_a=curves.coincide_a - m.epsilon,
        coincide_b=curves.coincide_b + m.epsilon,
        sup_bound=curves.sup_bound,
    )


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------


def _truncate(f: Callable, box: float) -> Callable:
    def g(u, _f=f, _b=box):
        return _f(np.clip(u, -_b, _b))

    return g


def truncated_play(half_width: float = 1.0, saturation: float = 1.0, truncation: float = 10.0) -> CurvePair:
    """Piecewise-linear play band: clamp(u -/+ half_width, -saturation, saturation).

    The canonical pair used throughout the tests is ``truncated_play(1, 1)``:
    lower(u) = min(max(u-1, -1), 1), upper(u) = min(max(u+1, -1), 1), which
    coincide outside (-2, 2) and share Lipschitz constant 1.
    """
    if half_width < 0 or saturation <= 0:
        raise ValueError("need half_width >= 0 and saturation > 0")
    w, s = float(half_width), float(saturation)

    def lower(u):
        return np.clip(np.asarray(u, dtype=float) - w, -s, s)

    def upper(u):
        return np.clip(np.asarray(u, dtype=float) + w, -s, s)

    return CurvePair(
        lower=_truncate(lower, truncation),
        upper=_truncate(upper, truncation),
        lipschitz_L0=1.0,
        coincide_a=-(w + s),
        coincide_b=w + s,
        sup_bound=s,
    )


def coincident(source="0", lipschitz_L0: float | None = None, truncation: float = 10.0) -> CurvePair:
    """Degenerate band: lower == upper == the given curve (expression or callable)."""
    if callable(source):
        fn = source
        if lipschitz_L0 is None:
            raise ValueError("lipschitz_L0 required for callable curves")
        L0 = float(lipschitz_L0)
    else:
        tree, raw = exprlang.compile_expr(source)

        def fn(x, _raw=raw):
            return _raw(0.0, x, 0.0)

        if lipschitz_L0 is None:
            L0 = exprlang.estimate_lipschitz(tree, "u", ((-truncation, truncation), (-1, 1)))
        else:
            L0 = float(lipschitz_L0)
    f = _truncate(fn, truncation)
    return CurvePair(
        lower=f,
        upper=f,
        lipschitz_L0=L0,
        coincide_a=-1.0,
        coincide_b=1.0,
        sup_bound=estimate_sup_bound(f, truncation),
    )


def from_expressions(
    lower_src: str,
    upper_src: str,
    coincide_a: float,
    coincide_b: float,
    lipschitz_L0: float | None = None,
    sup_bound: float | None = None,
    truncation: float = 10.0,
) -> CurvePair:
    """Build a pair from expression strings in ``u``.

    Omitted constants are estimated by dense sampling (difference quotients
    with a 5% safety factor for the Lipschitz constant; a fine grid for the
    sup bound) and should be treated as estimates, not certificates.
    """
    lo_tree, lo_raw = exprlang.compile_expr(lower_src)
    hi_tree, hi_raw = exprlang.compile_expr(upper_src)

    def lower(x, _raw=lo_raw):
        return _raw(0.0, x, 0.0)

    def upper(x, _raw=hi_raw):
        return _raw(0.0, x, 0.0)

    lower = _truncate(lower, truncation)
    upper = _truncate(upper, truncation)
    if lipschitz_L0 is None:
        box = ((-truncation, truncation), (-1.0, 1.0))
        lipschitz_L0 = max(
            exprlang.estimate_lipschitz(lo_tree, "u", box),
            exprlang.estimate_lipschitz(hi_tree, "u", box),
        )
    if sup_bound is None:
        sup_bound = max(estimate_sup_bound(lower, truncation), estimate_sup_bound(upper, truncation))
    return CurvePair(
        lower=lower,
        upper=upper,
        lipschitz_L0=float(lipschitz_L0),
        coincide_a=float(coincide_a),
        coincide_b=float(coincide_b),
        sup_bound=float(sup_bound),
    )


def estimate_sup_bound(f: Callable, truncation: float, n: int = 200_001) -> float:
    """Max of |f| on a fine grid over the truncation box."""
    grid = np.linspace(-truncation, truncation, n)
    return float(np.max(np.abs(f(grid))))
