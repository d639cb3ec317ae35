import numpy as np
import pytest

from periplay import (
    Field,
    Grid1D,
    ModelConfig,
    SystemState,
    find_periodic,
    integrate,
    truncated_play,
)

CANONICAL = dict(
    kappa=1.0,
    lam=1e-2,
    epsilon=0.05,
    period_T=1.0,
    dt=1e-3,
    h_expr="sin(2*pi*t)",
    g_expr="30 - 0.5*v",
    L_g=0.0,
    L_star=0.5,
)


def canonical_model(n=128, **overrides) -> ModelConfig:
    """The canonical run configuration used across the acceptance suite."""
    params = dict(CANONICAL)
    params.update(overrides)
    return ModelConfig(grid=Grid1D(1.0, n), curves=truncated_play(), **params)


@pytest.fixture(scope="session")
def canonical_cfg():
    return canonical_model()


@pytest.fixture(scope="session")
def canonical_report(canonical_cfg):
    return find_periodic(canonical_cfg, tol=1e-8, max_iter=100)


@pytest.fixture(scope="session")
def canonical_traj(canonical_cfg, canonical_report):
    return integrate(canonical_report.final_state, canonical_cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def eigen_state(grid: Grid1D, k: int = 1, which: str = "u") -> SystemState:
    from periplay import dirichlet_eigenvector

    w = dirichlet_eigenvector(grid, k)
    if which == "u":
        return SystemState(0.0, w, Field.zeros(grid))
    return SystemState(0.0, Field.zeros(grid), w)
