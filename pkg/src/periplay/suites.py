"""Seeded property-check suites shared by the test suite and the CLI.

Each suite runs a batch of randomized or closed-form checks for one module
and returns a machine-readable result; any failing check carries a serialized
counterexample.  All randomness is driven by the given seed, so failures are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hysteresis, periodic, spatial
from .curves import Mollifier, coincident, truncated_play
from .dynamics import ModelConfig, SystemState, integrate, step
from .spatial import Field, Grid1D

__all__ = ["CheckResult", "SuiteResult", "SUITE_NAMES", "run_suite", "run_all"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteResult:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed, detail: str = "", counterexample: dict | None = None):
        self.checks.append(CheckResult(name, bool(passed), detail, counterexample))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _canonical_pair():
    return truncated_play(1.0, 1.0)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


def run_curves_suite(seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("curves")
    pair = _canonical_pair()
    L0 = pair.lipschitz_L0

    u = rng.uniform(-5.0, 5.0, 10_000)
    lo, hi = pair.lower(u), pair.upper(u)
    res.add("band_order", np.all(lo <= hi), "lower <= upper on samples")
    outside = (u <= pair.coincide_a) | (u >= pair.coincide_b)
    res.add(
        "coincide_outside_interval",
        np.all(lo[outside] == hi[outside]),
        "curves agree outside (a, b)",
    )

    for eps in (0.1, 0.01):
        m = Mollifier(eps)
        tag = f"eps={eps}"
        mass = m.quadrature_mass()
        res.add(f"kernel_mass[{tag}]", abs(mass - 1.0) <= 1e-10, f"quadrature mass {mass!r}")
        s = rng.uniform(-1.5, 1.5, 2000)
        k = m.kernel(s)
        res.add(
            f"kernel_shape[{tag}]",
            np.all(k >= 0) and np.all(k[np.abs(s) >= 1.0] == 0.0) and np.allclose(k, m.kernel(-s)),
            "nonnegative, supported in [-1,1], even",
        )
        u1 = rng.uniform(-5.0, 5.0, 10_000)
        u2 = rng.uniform(-5.0, 5.0, 10_000)
        worst = 0.0
        bad = None
        for f in (pair.lower, pair.upper):
            fe1 = m.convolve(f, u1)
            fe2 = m.convolve(f, u2)
            gap = np.abs(u1 - u2)
            excess = np.abs(fe1 - fe2) - L0 * gap
            i = int(np.argmax(excess))
            if excess[i] > worst:
                worst = float(excess[i])
                bad = {"u1": float(u1[i]), "u2": float(u2[i])}
        res.add(
            f"lipschitz_preserved[{tag}]",
            worst <= 1e-9,
            f"max quotient excess {worst:.3e}",
            None if worst <= 1e-9 else bad,
        )
        fe_lo = m.convolve(pair.lower, u1)
        fe_hi = m.convolve(pair.upper, u1)
        drift = max(
            float(np.max(np.abs(fe_lo - pair.lower(u1)))),
            float(np.max(np.abs(fe_hi - pair.upper(u1)))),
        )
        res.add(f"uniform_convergence[{tag}]", drift <= L0 * eps, f"sup|f_eps - f| = {drift:.3e}")
        sup = max(float(np.max(np.abs(fe_lo))), float(np.max(np.abs(fe_hi))))
        res.add(f"sup_bound[{tag}]", sup <= pair.sup_bound + 1e-12, f"sup |f_eps| = {sup!r}")
        res.add(f"order_preserved[{tag}]", np.all(fe_lo <= fe_hi + 1e-15), "lower_eps <= upper_eps")
    return res


# ---------------------------------------------------------------------------
# hysteresis
# ---------------------------------------------------------------------------


def _classify(pair, u, v):
    """0 above the band, 1 inside, 2 below (upper boundary counts as above)."""
    lo, hi = pair.lower(u), pair.upper(u)
    return np.where(v >= hi, 0, np.where(v >= lo, 1, 2))


def stratified_defect_samples(seed: int, total: int = 100_000):
    """(lam_i, lam_j, u_i, v_i, u_j, v_j) hitting all nine sign configurations."""
    rng = np.random.default_rng(seed)
    pair = _canonical_pair()
    per = total // 9 + 1
    us, vs = [], []
    for cls_j in range(3):
        for cls_i in range(3):
            for cls, bucket_u, bucket_v in ((cls_j, us, vs), (cls_i, us, vs)):
                if cls == 1:
                    u = rng.uniform(-1.8, 1.8, per)  # nondegenerate band
                else:
                    u = rng.uniform(-3.0, 3.0, per)
                lo, hi = pair.lower(u), pair.upper(u)
                if cls == 0:
                    v = hi + rng.uniform(0.0, 2.5, per)
                elif cls == 1:
                    v = lo + rng.uniform(0.0, 1.0, per) * (hi - lo)
                else:
                    v = lo - rng.uniform(1e-12, 2.5, per)
                bucket_u.append(u)
                bucket_v.append(v)
    u_j = np.concatenate(us[0::2])
    v_j = np.concatenate(vs[0::2])
    u_i = np.concatenate(us[1::2])
    v_i = np.concatenate(vs[1::2])
    n = u_j.size
    lam_i = 10.0 ** rng.uniform(-3, 0, n)
    lam_j = 10.0 ** rng.uniform(-3, 0, n)
    return pair, lam_i, lam_j, u_i, v_i, u_j, v_j


def run_hysteresis_suite(seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed + 1)
    res = SuiteResult("hysteresis")
    pair, lam_i, lam_j, u_i, v_i, u_j, v_j = stratified_defect_samples(seed)

    counts = np.zeros((3, 3), dtype=int)
    cj = _classify(pair, u_j, v_j)
    ci = _classify(pair, u_i, v_i)
    for a in range(3):
        for b in range(3):
            counts[a, b] = int(np.sum((cj == a) & (ci == b)))
    res.add(
        "nine_cases_covered",
        np.all(counts >= 1000),
        f"min stratum count {counts.min()} over {counts.sum()} tuples",
    )

    dp = hysteresis.monotonicity_defect(pair, lam_i, lam_j, u_i, v_i, u_j, v_j)
    margin = dp.s_value + dp.delta
    i = int(np.argmin(margin))
    res.add(
        "defect_lower_bound",
        np.all(margin >= -1e-12),
        f"min(S + delta) = {float(margin[i]):.3e}",
        None
        if margin[i] >= -1e-12
        else {
            "lam_i": float(lam_i[i]),
            "lam_j": float(lam_j[i]),
            "u_i": float(u_i[i]),
            "v_i": float(v_i[i]),
            "u_j": float(u_j[i]),
            "v_j": float(v_j[i]),
        },
    )

    n = 10_000
    u = rng.uniform(-3, 3, n)
    v = rng.uniform(-3, 3, n)
    lam = 10.0 ** rng.uniform(-3, 0, n)
    lo, hi = pair.lower(u), pair.upper(u)
    yos = (np.maximum(v - hi, 0.0) - np.maximum(lo - v, 0.0)) / lam
    proj = np.maximum(np.minimum(v, hi), lo)
    gap = np.abs(lam * yos - (v - proj))
    res.add("resolvent_identity", np.max(gap) <= 1e-12, f"max |lam*Y - (v - Pv)| = {np.max(gap):.3e}")
    dist = np.maximum(np.maximum(lo - v, 0.0), np.maximum(v - hi, 0.0))
    res.add(
        "distance_equality",
        np.max(np.abs(np.abs(yos) * lam - dist)) <= 1e-12,
        "|Y| = dist(v, band)/lam",
    )

    v2 = v + rng.uniform(0.0, 2.0, n)
    y1 = hysteresis.yosida(pair, 0.5, u, v)
    y2 = hysteresis.yosida(pair, 0.5, u, v2)
    res.add("yosida_monotone_in_v", np.all(y2 >= y1 - 1e-12), "nondecreasing in v")

    branches = {hysteresis.subdiff_branch(pair, float(a), float(b)) for a, b in zip(u[:500], v[:500])}
    res.add("branch_total", len(branches) >= 2, f"branches seen: {sorted(b.value for b in branches)}")
    return res


# ---------------------------------------------------------------------------
# spatial
# ---------------------------------------------------------------------------


def run_spatial_suite(seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed + 2)
    res = SuiteResult("spatial")
    grid = Grid1D(1.0, 64)

    for k in (1, 2, 5):
        w = spatial.dirichlet_eigenvector(grid, k)
        lap = spatial.laplacian(grid, w).values
        mu = spatial.dirichlet_eigenvalue(grid, k)
        err = float(np.max(np.abs(lap + mu * w.values)))
        res.add(f"eigenpair[k={k}]", err <= 1e-10 * mu, f"stencil defect {err:.3e}")

    worst = 0.0
    for _ in range(200):
        w = Field(rng.standard_normal(grid.n_interior))
        lhs = -spatial.h_inner(grid, spatial.laplacian(grid, w), w)
        rhs = spatial.norms(grid, w).h1_semi ** 2
        worst = max(worst, abs(lhs - rhs) / max(1.0, rhs))
    res.add("summation_by_parts", worst <= 1e-10, f"max relative defect {worst:.3e}")

    cp = spatial.poincare_constant(grid)
    holds = True
    for _ in range(1000):
        w = Field(rng.standard_normal(grid.n_interior))
        nm = spatial.norms(grid, w)
        if nm.l2_H**2 > cp * nm.h1_semi**2 + 1e-12:
            holds = False
            break
    res.add("poincare_inequality", holds, "|w|^2 <= C_P |grad w|^2 on random fields")
    w1 = spatial.dirichlet_eigenvector(grid, 1)
    nm = spatial.norms(grid, w1)
    res.add(
        "poincare_sharp",
        abs(nm.l2_H**2 - cp * nm.h1_semi**2) <= 1e-8,
        "equality at the first eigenvector",
    )

    # dense-matrix cross-check of C_P
    n = grid.n_interior
    h2 = grid.spacing_h**2
    A = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h2
    mu1 = float(np.min(np.linalg.eigvalsh(A)))
    res.add("poincare_dense_oracle", abs(1.0 / mu1 - cp) <= 1e-10, f"dense 1/mu1 = {1.0 / mu1!r}")

    ok = True
    for _ in range(50):
        alpha = float(10.0 ** rng.uniform(-1, 1))
        beta = float(10.0 ** rng.uniform(-3, 1))
        w = Field(rng.standard_normal(grid.n_interior))
        rhs = spatial.apply_helmholtz(grid, alpha, beta, w)
        back = spatial.solve_helmholtz(grid, alpha, beta, rhs)
        if np.max(np.abs(back.values - w.values)) > 1e-10 * max(1.0, float(np.max(np.abs(w.values)))):
            ok = False
            break
    res.add("solve_roundtrip", ok, "solve(apply(w)) = w to solver tolerance")
    return res


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------


def _small_config(**overrides) -> ModelConfig:
    base = dict(
        kappa=1.0,
        lam=0.05,
        epsilon=0.1,
        period_T=0.1,
        dt=1e-3,
        grid=Grid1D(1.0, 24),
        curves=_canonical_pair(),
        h_expr="sin(20*pi*t)",
        g_expr="1 - 0.5*v",
        L_star=0.5,
    )
    base.update(overrides)
    return ModelConfig(**base)


def run_dynamics_suite(seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed + 3)
    res = SuiteResult("dynamics")
    cfg = _small_config()
    grid = cfg.grid

    z = SystemState(0.0, Field(rng.uniform(-0.5, 0.5, grid.n_interior)), Field(rng.uniform(-0.5, 0.5, grid.n_interior)))
    worst = 0.0
    state = z
    for _ in range(40):
        new = step(state, cfg)
        # discrete form of the constrained phase equation at this step
        jv = cfg.project_v(state.u.values, state.v.values)
        residual = (
            (new.v.values - state.v.values) / cfg.dt
            - cfg.kappa * spatial.laplacian(grid, new.v).values
            + (new.v.values - jv) / cfg.lam
            - cfg.eval_g(state.t, state.u.values, state.v.values)
        )
        worst = max(worst, float(np.max(np.abs(residual))))
        state = new
    res.add("splitting_fidelity", worst <= 1e-9, f"max discrete-equation residual {worst:.3e}")

    u = rng.uniform(-2, 2, 1000)
    v = rng.uniform(-2, 2, 1000)
    lo, hi = cfg.band(u)
    jv = np.maximum(np.minimum(v, hi), lo)
    yos = hysteresis.yosida(cfg.curves_eps, cfg.lam, u, v)
    gap = np.max(np.abs((v - jv) / cfg.lam - yos))
    res.add("projection_matches_yosida", gap <= 1e-12, f"max gap {gap:.3e}")

    decay_cfg = _small_config(lam=None, epsilon=0.0, h_expr="0", g_expr="0", L_star=0.0)
    z0 = SystemState(0.0, spatial.dirichlet_eigenvector(decay_cfg.grid, 1), Field.zeros(decay_cfg.grid))
    traj = integrate(z0, decay_cfg)
    norms_seq = [spatial.norms(decay_cfg.grid, Field(traj.u[k])).l2_H for k in range(traj.n_states)]
    res.add("pure_decay_monotone", np.all(np.diff(norms_seq) <= 1e-15), "implicit Euler dissipates")

    mu1 = spatial.dirichlet_eigenvalue(decay_cfg.grid, 1)
    expected = z0.u.values / (1.0 + decay_cfg.dt * mu1)
    got = step(z0, decay_cfg).u.values
    res.add(
        "eigenvector_step_decay",
        np.max(np.abs(got - expected)) <= 1e-13,
        "one implicit step divides by 1 + dt*mu1",
    )

    zz = SystemState.zero(decay_cfg.grid)
    after = step(zz, decay_cfg)
    res.add("zero_fixed_point", np.all(after.u.values == 0) and np.all(after.v.values == 0), "0 -> 0")
    return res


# ---------------------------------------------------------------------------
# periodic
# ---------------------------------------------------------------------------


def run_periodic_suite(seed: int = 0) -> SuiteResult:
    res = SuiteResult("periodic")

    zero_cfg = _small_config(h_expr="0", g_expr="0", L_star=0.0)
    report = periodic.find_periodic(zero_cfg, tol=1e-12, max_iter=5)
    res.add(
        "zero_data_immediate",
        report.converged and report.iterations == 1,
        f"converged in {report.iterations} iteration(s)",
    )

    # decoupled linear test: v-contraction factor has a closed form
    lin = _small_config(lam=None, epsilon=0.0, h_expr="0", g_expr="0.5*v", L_star=0.5, period_T=0.5)
    grid = lin.grid
    mu1 = spatial.dirichlet_eigenvalue(grid, 1)
    z1 = SystemState(0.0, Field.zeros(grid), spatial.dirichlet_eigenvector(grid, 1))
    z2 = SystemState.zero(grid)
    d0 = periodic.state_distance(lin, z1, z2)
    d1 = periodic.state_distance(lin, periodic.period_map(z1, lin), periodic.period_map(z2, lin))
    measured = d1 / d0
    exact = ((1.0 + 0.5 * lin.dt) / (1.0 + lin.kappa * mu1 * lin.dt)) ** lin.n_steps
    res.add(
        "linear_contraction_factor",
        abs(measured - exact) <= 1e-8 * exact,
        f"measured {measured:.6e} vs exact modal factor {exact:.6e}",
    )

    # time-independent data: the periodic solution is the steady state
    steady = _small_config(
        lam=1e-3,
        epsilon=0.0,
        h_expr="1",
        g_expr="0",
        L_star=0.0,
        curves=coincident("0", lipschitz_L0=0.0),
        period_T=0.5,
    )
    rep = periodic.find_periodic(steady, tol=1e-10, max_iter=400)
    lap_sol = _poisson_solve(steady.grid, np.ones(steady.grid.n_interior))
    err_u = float(np.max(np.abs(rep.final_state.u.values - lap_sol)))
    err_v = float(np.max(np.abs(rep.final_state.v.values)))
    res.add("steady_state_poisson", err_u <= 1e-6 and err_v <= 1e-6, f"|u - u*|_inf = {err_u:.2e}, |v|_inf = {err_v:.2e}")

    f0 = periodic.PeriodicForcing.zeros(lin)
    traj = periodic.linear_periodic_solve(f0, lin)
    res.add(
        "linear_zero_forcing",
        float(np.max(np.abs(traj.u))) == 0.0 and float(np.max(np.abs(traj.v))) == 0.0,
        "f = 0 gives z = 0",
    )

    fc = periodic.PeriodicForcing.constant(lin, 1.0, 0.0)
    traj = periodic.linear_periodic_solve(fc, lin)
    err = float(np.max(np.abs(traj.u[-1] - _poisson_solve(lin.grid, np.ones(lin.grid.n_interior)))))
    res.add("linear_constant_forcing_steady", err <= 1e-8, f"|u(T) - poisson|_inf = {err:.2e}")
    return res


def _poisson_solve(grid: Grid1D, rhs: np.ndarray) -> np.ndarray:
    """Direct tridiagonal solve of -lap u = rhs (independent reference)."""
    n = grid.n_interior
    h2 = grid.spacing_h**2
    A = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h2
    return np.linalg.solve(A, rhs)


SUITES = {
    "curves": run_curves_suite,
    "hysteresis": run_hysteresis_suite,
    "spatial": run_spatial_suite,
    "dynamics": run_dynamics_suite,
    "periodic": run_periodic_suite,
}

SUITE_NAMES = tuple(SUITES) + ("all",)


def run_suite(name: str, seed: int = 0) -> list[SuiteResult]:
    if name == "all":
        return [fn(seed) for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return [SUITES[name](seed)]


def run_all(seed: int = 0) -> list[SuiteResult]:
    return run_suite("all", seed)
