"""1-D spatial discretization: grid, Dirichlet Laplacian, norms, Poincare constant.

The domain is the interval (0, L) with homogeneous Dirichlet boundary values;
fields store the n interior node values only.  The Laplacian is the standard
3-point stencil, whose eigenpairs are known in closed form:

    mu_k = (4/h^2) sin^2(k pi h / (2 L)),   w_k(x_i) = sin(k pi x_i / L).

The discrete Poincare constant is taken in the squared-norm convention
|w|_H^2 <= C_P |grad w|_H^2, i.e. C_P = 1/mu_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "Grid1D",
    "Field",
    "FieldNorms",
    "laplacian",
    "apply_helmholtz",
    "solve_helmholtz",
    "norms",
    "h_norm",
    "h_inner",
    "poincare_constant",
    "dirichlet_eigenvalue",
    "dirichlet_eigenvector",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on (0, L) with n interior nodes, spacing h = L/(n+1)."""

    length_L: float
    n_interior: int

    def __post_init__(self):
        if self.length_L <= 0:
            raise ValueError("length_L must be positive")
        if self.n_interior < 1:
            raise ValueError("n_interior must be positive")

    @property
    def spacing_h(self) -> float:
        return self.length_L / (self.n_interior + 1)

    def nodes(self) -> np.ndarray:
        """Interior node coordinates x_i = i*h, i = 1..n."""
        return self.spacing_h * np.arange(1, self.n_interior + 1)


@dataclass(eq=False)
class Field:
    """Interior node values of a grid function (boundary values are 0)."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("field values must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        self.values = vals

    @classmethod
    def zeros(cls, grid: Grid1D) -> "Field":
        return cls(np.zeros(grid.n_interior))

    @classmethod
    def sample(cls, grid: Grid1D, fn: Callable) -> "Field":
        """Field with values fn(x_i) at the interior nodes."""
        return cls(np.asarray(fn(grid.nodes()), dtype=float))

    def on(self, grid: Grid1D) -> np.ndarray:
        """Values, after checking the length matches ``grid``."""
        if self.values.size != grid.n_interior:
            raise ValueError(
                f"field of size {self.values.size} does not live on a grid with "
                f"{grid.n_interior} interior nodes"
            )
        return self.values

    def copy(self) -> "Field":
        return Field(self.values.copy())


class FieldNorms(NamedTuple):
    l2_H: float
    h1_semi: float
    linf: float


def laplacian(grid: Grid1D, w: Field) -> Field:
    """3-point stencil (w_{i-1} - 2 w_i + w_{i+1})/h^2 with zero ghost values."""
    vals = w.on(grid)
    h2 = grid.spacing_h**2
    out = -2.0 * vals
    out[:-1] += vals[1:]
    out[1:] += vals[:-1]
    return Field(out / h2)


def apply_helmholtz(grid: Grid1D, alpha: float, beta: float, w: Field) -> Field:
    """(alpha*I - beta*Lap) w, the operator inverted by :func:`solve_helmholtz`."""
    return Field(alpha * w.on(grid) - beta * laplacian(grid, w).values)


def solve_helmholtz(grid: Grid1D, alpha: float, beta: float, rhs: Field) -> Field:
    """Solve the tridiagonal system (alpha*I - beta*Lap) w = rhs.

    The matrix is strictly diagonally dominant for alpha > 0, beta >= 0, so
    the banded solve is unconditionally well posed.
    """
    if alpha <= 0 or beta < 0:
        raise ValueError("need alpha > 0 and beta >= 0")
    b = rhs.on(grid)
    if beta == 0.0:
        return Field(b / alpha)
    n = grid.n_interior
    r = beta / grid.spacing_h**2
    ab = np.empty((3, n))
    ab[0, :] = -r
    ab[1, :] = alpha + 2.0 * r
    ab[2, :] = -r
    return Field(solve_banded((1, 1), ab, b, check_finite=False))


def h_inner(grid: Grid1D, w: Field, z: Field) -> float:
    """Discrete L2 pairing h * sum w_i z_i."""
    return float(grid.spacing_h * np.dot(w.on(grid), z.on(grid)))


def h_norm(grid: Grid1D, w: Field) -> float:
    return float(np.sqrt(grid.spacing_h) * np.linalg.norm(w.on(grid)))


def norms(grid: Grid1D, w: Field) -> FieldNorms:
    """(|w|_H, |grad w|_H, |w|_inf) with boundary differences included."""
    vals = w.on(grid)
    h = grid.spacing_h
    diffs = np.diff(vals, prepend=0.0, append=0.0)
    return FieldNorms(
        l2_H=float(np.sqrt(h * np.sum(vals**2))),
        h1_semi=float(np.sqrt(np.sum(diffs**2) / h)),
        linf=float(np.max(np.abs(vals))) if vals.size else 0.0,
    )


def dirichlet_eigenvalue(grid: Grid1D, k: int = 1) -> float:
    """k-th eigenvalue of -Lap: (4/h^2) sin^2(k pi h / (2 L))."""
    h = grid.spacing_h
    return (4.0 / h**2) * np.sin(k * np.pi * h / (2.0 * grid.length_L)) ** 2


def dirichlet_eigenvector(grid: Grid1D, k: int = 1) -> Field:
    """k-th eigenvector sin(k pi x / L) sampled at the interior nodes."""
    return Field(np.sin(k * np.pi * grid.nodes() / grid.length_L))


def poincare_constant(grid: Grid1D) -> float:
    """Best constant in |w|_H^2 <= C_P |grad w|_H^2 on the discrete space.

    Equality holds at the first stencil eigenvector, so C_P = 1/mu_1.
    """
    return 1.0 / dirichlet_eigenvalue(grid, 1)
