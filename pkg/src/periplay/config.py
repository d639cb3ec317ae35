"""Run-configuration files: parsing, validation, digests.

A run is described by a single JSON document (see ``docs/config-schema.md``).
Validation errors always name the offending key.  The configuration digest is
the sha256 of the canonical serialization (sorted keys, no whitespace) and is
stamped into every output artifact, so artifacts from different
configurations cannot be mixed up silently.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import curves as curves_mod
from . import exprlang
from .dynamics import ModelConfig, SystemState, config_fingerprint
from .spatial import Field, Grid1D, dirichlet_eigenvector

__all__ = ["ConfigError", "RunConfig", "SolverParams", "SweepParams", "OutputParams",
           "load_run_config", "parse_run_config", "build_model_config", "canonical_json"]


class ConfigError(ValueError):
    """Invalid configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config error at {key!r}: {message}")
        self.key = key


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _require(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required key")
    return d[key]


def _number(d: dict, key: str, path: str, default=None, positive=False, nonnegative=False):
    if key not in d:
        if default is None:
            raise ConfigError(f"{path}.{key}", "missing required number")
        return default
    val = d[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {val!r}")
    val = float(val)
    if positive and val <= 0:
        raise ConfigError(f"{path}.{key}", "must be positive")
    if nonnegative and val < 0:
        raise ConfigError(f"{path}.{key}", "must be nonnegative")
    return val


def _reject_unknown(d: dict, known: set, path: str):
    for key in d:
        if key not in known:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")


def _build_curves(spec, path: str):
    if not isinstance(spec, dict):
        raise ConfigError(path, "expected an object describing the curves")
    kind = _require(spec, "kind", path)
    trunc = _number(spec, "truncation", path, default=10.0, positive=True)
    try:
        if kind == "truncated_play":
            _reject_unknown(spec, {"kind", "half_width", "saturation", "truncation"}, path)
            return curves_mod.truncated_play(
                half_width=_number(spec, "half_width", path, default=1.0, nonnegative=True),
                saturation=_number(spec, "saturation", path, default=1.0, positive=True),
                truncation=trunc,
            )
        if kind == "coincident":
            _reject_unknown(spec, {"kind", "curve", "lipschitz_L0", "truncation"}, path)
            return curves_mod.coincident(
                spec.get("curve", "0"),
                lipschitz_L0=spec.get("lipschitz_L0"),
                truncation=trunc,
            )
        if kind == "expressions":
            _reject_unknown(
                spec,
                {"kind", "lower", "upper", "coincide_a", "coincide_b", "lipschitz_L0", "sup_bound", "truncation"},
                path,
            )
            return curves_mod.from_expressions(
                _require(spec, "lower", path),
                _require(spec, "upper", path),
                coincide_a=_number(spec, "coincide_a", path),
                coincide_b=_number(spec, "coincide_b", path),
                lipschitz_L0=spec.get("lipschitz_L0"),
                sup_bound=spec.get("sup_bound"),
                truncation=trunc,
            )
    except exprlang.ExprSyntaxError as exc:
        raise ConfigError(path, f"bad curve expression: {exc}") from exc
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.kind", f"unknown curve kind {kind!r}")


_MODEL_KEYS = {
    "kappa", "lambda", "epsilon", "period_T", "dt", "grid", "curves",
    "h", "g", "L_g", "L_star", "truncation_B", "quadrature_order",
}


def build_model_config(model: dict, digest: str = "") -> ModelConfig:
    """Validate the ``model`` block and construct a :class:`ModelConfig`."""
    if not isinstance(model, dict):
        raise ConfigError("model", "expected an object")
    _reject_unknown(model, _MODEL_KEYS, "model")

    lam = model.get("lambda", "off")
    if lam == "off" or lam is None:
        lam = None
    elif not isinstance(lam, (int, float)) or isinstance(lam, bool) or lam <= 0:
        raise ConfigError("model.lambda", "must be a positive number or 'off'")

    grid_spec = _require(model, "grid", "model")
    if not isinstance(grid_spec, dict):
        raise ConfigError("model.grid", "expected an object")
    _reject_unknown(grid_spec, {"length_L", "n_interior"}, "model.grid")
    n_int = grid_spec.get("n_interior")
    if not isinstance(n_int, int) or isinstance(n_int, bool) or n_int < 1:
        raise ConfigError("model.grid.n_interior", "must be a positive integer")
    grid = Grid1D(_number(grid_spec, "length_L", "model.grid", positive=True), n_int)

    curves = _build_curves(_require(model, "curves", "model"), "model.curves")

    h_src = model.get("h", "0")
    g_src = model.get("g", "0")
    for key, src in (("h", h_src), ("g", g_src)):
        if not isinstance(src, str):
            raise ConfigError(f"model.{key}", "expected an expression string")
        try:
            exprlang.parse(src)
        except exprlang.ExprSyntaxError as exc:
            raise ConfigError(f"model.{key}", f"bad expression: {exc}") from exc

    trunc_B = _number(model, "truncation_B", "model", default=10.0, positive=True)
    period_T = _number(model, "period_T", "model", positive=True)
    L_g = model.get("L_g")
    L_star = model.get("L_star")
    if L_g is None or L_star is None:
        box = ((-trunc_B, trunc_B), (-trunc_B, trunc_B))
        tree = exprlang.parse(g_src)
        if L_g is None:
            L_g = exprlang.estimate_lipschitz(tree, "u", box, t_range=(0.0, period_T))
            warnings.warn(f"model.L_g not supplied; sampled estimate {L_g:.4g} in use", stacklevel=2)
        if L_star is None:
            L_star = exprlang.estimate_lipschitz(tree, "v", box, t_range=(0.0, period_T))
            warnings.warn(f"model.L_star not supplied; sampled estimate {L_star:.4g} in use", stacklevel=2)

    quad = model.get("quadrature_order", 64)
    if not isinstance(quad, int) or isinstance(quad, bool) or quad < 1:
        raise ConfigError("model.quadrature_order", "must be a positive integer")

    try:
        return ModelConfig(
            kappa=_number(model, "kappa", "model", positive=True),
            lam=lam,
            epsilon=_number(model, "epsilon", "model", default=0.0, nonnegative=True),
            period_T=period_T,
            dt=_number(model, "dt", "model", positive=True),
            grid=grid,
            curves=curves,
            h_expr=h_src,
            g_expr=g_src,
            L_g=float(L_g),
            L_star=float(L_star),
            truncation_B=trunc_B,
            quadrature_order=quad,
            digest=digest,
        )
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from exc


@dataclass
class SolverParams:
    tol: float = 1e-8
    max_iter: int = 200
    anderson_window: int = 0
    cross_check: bool = False


@dataclass
class SweepParams:
    parameter: str
    values: list[float]
    dt_values: list[float] | None = None


@dataclass
class OutputParams:
    directory: str = "out"
    csv: bool = True
    json: bool = True
    csv_stride: int = 1


@dataclass(eq=False)
class RunConfig:
    """Parsed configuration plus the built model and runner parameters."""

    raw: dict
    digest: str
    model: ModelConfig
    solver: SolverParams
    output: OutputParams
    seed: int = 0
    sweep: SweepParams | None = None
    initial: dict = dc_field(default_factory=dict)

    def initial_state(self) -> SystemState:
        return SystemState(
            0.0,
            _build_initial(self.initial.get("u", "zero"), self.model.grid, "initial.u"),
            _build_initial(self.initial.get("v", "zero"), self.model.grid, "initial.v"),
        )

    def point_model(self, parameter: str, value: float, dt_value: float | None = None) -> ModelConfig:
        """Model for one sweep point: override one parameter (and optionally dt)."""
        model = dict(self.raw["model"])
        key = {"lambda": "lambda", "epsilon": "epsilon", "dt": "dt"}[parameter]
        model[key] = value
        if dt_value is not None:
            model["dt"] = dt_value
        digest = config_fingerprint(canonical_json({**self.raw, "model": model}))
        return build_model_config(model, digest)


def _build_initial(spec, grid: Grid1D, path: str) -> Field:
    if spec == "zero":
        return Field.zeros(grid)
    if isinstance(spec, dict):
        _reject_unknown(spec, {"eigenvector", "amplitude"}, path)
        k = spec.get("eigenvector")
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ConfigError(f"{path}.eigenvector", "must be a positive integer")
        amp = _number(spec, "amplitude", path, default=1.0)
        return Field(amp * dirichlet_eigenvector(grid, k).values)
    if isinstance(spec, list):
        vals = np.asarray(spec, dtype=float)
        if vals.size != grid.n_interior:
            raise ConfigError(path, f"expected {grid.n_interior} node values, got {vals.size}")
        return Field(vals)
    raise ConfigError(path, "expected 'zero', an eigenvector object, or a list of node values")


def parse_run_config(raw: dict, seed_override: int | None = None) -> RunConfig:
    """Validate a loaded JSON document and build every runner object."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "top-level document must be an object")
    _reject_unknown(raw, {"model", "solver", "sweep", "output", "seed", "initial"}, "")

    raw = json.loads(canonical_json(raw))  # deep copy, JSON-clean
    if seed_override is not None:
        raw["seed"] = seed_override
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed", "must be an integer")

    digest = config_fingerprint(canonical_json(raw))
    model = build_model_config(_require(raw, "model", ""), digest)

    solver_spec = raw.get("solver", {})
    if not isinstance(solver_spec, dict):
        raise ConfigError("solver", "expected an object")
    _reject_unknown(solver_spec, {"tol", "max_iter", "anderson_window", "cross_check"}, "solver")
    max_iter = solver_spec.get("max_iter", 200)
    if not isinstance(max_iter, int) or isinstance(max_iter, bool) or max_iter < 1:
        raise ConfigError("solver.max_iter", "must be a positive integer")
    window = solver_spec.get("anderson_window", 0)
    if not isinstance(window, int) or isinstance(window, bool) or window < 0:
        raise ConfigError("solver.anderson_window", "must be a nonnegative integer")
    cross = solver_spec.get("cross_check", False)
    if not isinstance(cross, bool):
        raise ConfigError("solver.cross_check", "must be a boolean")
    solver = SolverParams(
        tol=_number(solver_spec, "tol", "solver", default=1e-8, positive=True),
        max_iter=max_iter,
        anderson_window=window,
        cross_check=cross,
    )

    sweep = None
    if "sweep" in raw:
        sweep_spec = raw["sweep"]
        if not isinstance(sweep_spec, dict):
            raise ConfigError("sweep", "expected an object")
        _reject_unknown(sweep_spec, {"parameter", "values", "dt_values"}, "sweep")
        parameter = _require(sweep_spec, "parameter", "sweep")
        if parameter not in ("lambda", "epsilon", "dt"):
            raise ConfigError("sweep.parameter", "must be one of 'lambda', 'epsilon', 'dt'")
        values = _require(sweep_spec, "values", "sweep")
        if (
            not isinstance(values, list)
            or not values
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in values)
        ):
            raise ConfigError("sweep.values", "must be a nonempty list of numbers")
        values = [float(x) for x in values]
        if any(x <= 0 for x in values) or any(b >= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep.values", "must be positive and strictly decreasing")
        dt_values = sweep_spec.get("dt_values")
        if dt_values is not None:
            if not isinstance(dt_values, list) or len(dt_values) != len(values):
                raise ConfigError("sweep.dt_values", "must be a list matching sweep.values")
            dt_values = [float(x) for x in dt_values]
            if any(x <= 0 for x in dt_values):
                raise ConfigError("sweep.dt_values", "entries must be positive")
        sweep = SweepParams(parameter=parameter, values=values, dt_values=dt_values)

    out_spec = raw.get("output", {})
    if not isinstance(out_spec, dict):
        raise ConfigError("output", "expected an object")
    _reject_unknown(out_spec, {"directory", "csv", "json", "csv_stride"}, "output")
    stride = out_spec.get("csv_stride", 1)
    if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
        raise ConfigError("output.csv_stride", "must be a positive integer")
    output = OutputParams(
        directory=out_spec.get("directory", "out"),
        csv=bool(out_spec.get("csv", True)),
        json=bool(out_spec.get("json", True)),
        csv_stride=stride,
    )

    initial = raw.get("initial", {})
    if not isinstance(initial, dict):
        raise ConfigError("initial", "expected an object")
    _reject_unknown(initial, {"u", "v"}, "initial")

    cfg = RunConfig(
        raw=raw,
        digest=digest,
        model=model,
        solver=solver,
        output=output,
        seed=seed,
        sweep=sweep,
        initial=initial,
    )
    cfg.initial_state()  # validate eagerly so errors surface as ConfigError
    return cfg


def load_run_config(path: str | Path, seed_override: int | None = None) -> RunConfig:
    """Read and validate a JSON run configuration from disk."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_run_config(raw, seed_override=seed_override)
