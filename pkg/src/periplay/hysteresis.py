"""Scalar and field-level hysteresis calculus for the constrained phase equation.

The admissible band for the order parameter v is [lower(u), upper(u)].  This
module provides the normal-cone branch classification of the band's indicator
function, its single-valued Lipschitz (Yosida) regularization at parameter
``lam``, the projection onto the band, the regularized field energy, and the
monotonicity-defect quantities used to compare regularizations at two
different parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .curves import CurvePair
from .spatial import Field, Grid1D

__all__ = [
    "SubdiffBranch",
    "DefectPair",
    "subdiff_branch",
    "yosida",
    "project",
    "yosida_energy",
    "monotonicity_defect",
]


class SubdiffBranch(enum.Enum):
    """Branch of the indicator subdifferential at (u, v).

    Empty outside the band; UpperRay/LowerRay on a nondegenerate boundary;
    Zero strictly inside; FullLine where the band degenerates to a point.
    """

    EMPTY = "empty"
    UPPER_RAY = "upper_ray"
    ZERO = "zero"
    LOWER_RAY = "lower_ray"
    FULL_LINE = "full_line"


@dataclass
class DefectPair:
    """Pairing value S and lower-bound magnitude delta with S >= -delta."""

    s_value: float
    delta: float


def subdiff_branch(curves: CurvePair, u: float, v: float) -> SubdiffBranch:
    """Classify (u, v) into the five normal-cone branches; ties at a degenerate
    band return FULL_LINE."""
    lo = float(curves.lower(u))
    hi = float(curves.upper(u))
    if v < lo or v > hi:
        return SubdiffBranch.EMPTY
    if lo == hi:
        return SubdiffBranch.FULL_LINE
    if v == hi:
        return SubdiffBranch.UPPER_RAY
    if v == lo:
        return SubdiffBranch.LOWER_RAY
    return SubdiffBranch.ZERO


def yosida(curves_eps: CurvePair, lam: float, u, v):
    """Yosida value (1/lam)[v - upper(u)]^+ - (1/lam)[lower(u) - v]^+.

    Zero exactly when v lies in the band; works nodewise on arrays.
    """
    if np.any(np.asarray(lam) <= 0):
        raise ValueError("lam must be positive")
    lo = curves_eps.lower(u)
    hi = curves_eps.upper(u)
    out = (np.maximum(np.asarray(v) - hi, 0.0) - np.maximum(lo - np.asarray(v), 0.0)) / lam
    if np.ndim(out) == 0:
        return float(out)
    return out


def project(curves_eps: CurvePair, u, v):
    """Projection of v onto [lower(u), upper(u)]: max(min(v, upper), lower)."""
    lo = curves_eps.lower(u)
    hi = curves_eps.upper(u)
    out = np.maximum(np.minimum(v, hi), lo)
    if np.ndim(out) == 0:
        return float(out)
    return out


def yosida_energy(curves_eps: CurvePair, lam: float, grid: Grid1D, u: Field, v: Field) -> float:
    """Regularized indicator energy (1/2 lam)(|[v-upper(u)]^+|_H^2 + |[lower(u)-v]^+|_H^2).

    Discrete H norm is h * sum of squares; zero exactly when the constraint
    holds at every node.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    uu = u.on(grid)
    vv = v.on(grid)
    lo = curves_eps.lower(uu)
    hi = curves_eps.upper(uu)
    over = np.maximum(vv - hi, 0.0)
    under = np.maximum(lo - vv, 0.0)
    h = grid.spacing_h
    return float((h * np.sum(over**2) + h * np.sum(under**2)) / (2.0 * lam))


def monotonicity_defect(
    curves: CurvePair,
    lam_i: float,
    lam_j: float,
    u_i,
    v_i,
    u_j,
    v_j,
) -> DefectPair:
    """Pointwise defect bound for two Yosida regularizations.

    s_value = (Y_j - Y_i)(v_j - v_i) with Y_k the Yosida value at parameter
    lam_k; delta collects the cross term (lam_i + lam_j)|Y_j||Y_i| plus the
    curve-shift terms (|Y_j| + |Y_i|)(|upper(u_j)-upper(u_i)| +
    |lower(u_j)-lower(u_i)|).  The guarantee s_value >= -delta holds in every
    sign configuration of (v - band) on the two sides.
    """
    if np.any(np.asarray(lam_i) <= 0) or np.any(np.asarray(lam_j) <= 0):
        raise ValueError("regularization parameters must be positive")
    y_i = yosida(curves, lam_i, u_i, v_i)
    y_j = yosida(curves, lam_j, u_j, v_j)
    lo_i, hi_i = curves.lower(u_i), curves.upper(u_i)
    lo_j, hi_j = curves.lower(u_j), curves.upper(u_j)
    s = (np.asarray(y_j) - np.asarray(y_i)) * (np.asarray(v_j) - np.asarray(v_i))
    delta = (lam_j + lam_i) * np.abs(y_j) * np.abs(y_i) + (np.abs(y_j) + np.abs(y_i)) * (
        np.abs(np.asarray(hi_j) - np.asarray(hi_i)) + np.abs(np.asarray(lo_j) - np.asarray(lo_i))
    )
    if np.ndim(s) == 0:
        return DefectPair(float(s), float(delta))
    return DefectPair(s, delta)
