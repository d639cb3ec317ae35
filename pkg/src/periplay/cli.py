"""Command-line entry point.

Subcommands::

    periplay simulate      --config cfg.json [--out DIR] [--seed N]
    periplay find-periodic --config cfg.json [--out DIR] [--seed N]
    periplay sweep         --config cfg.json [--out DIR] [--seed N] [--workers N]
    periplay check         --suite NAME [--seed N] [--out DIR]

Exit codes: 0 success, 1 property-check failure, 2 configuration error,
3 numerical failure, 4 fixed-point iteration did not converge (the report is
still written).
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import diagnostics, periodic, suites
from .artifacts import write_json_doc, write_sweep_csv, write_trajectory_csv
from .config import ConfigError, RunConfig, load_run_config
from .dynamics import InstabilityError, integrate
from .exprlang import EvalError
from .spatial import norms

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_NOT_CONVERGED = 4


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    directory = Path(override) if override else Path(cfg.output.directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output.directory", f"cannot create {directory}: {exc}") from exc
    return directory


def _state_summary(cfg: RunConfig, state) -> dict:
    nu = norms(cfg.model.grid, state.u)
    nv = norms(cfg.model.grid, state.v)
    return {
        "u_l2": nu.l2_H,
        "u_linf": nu.linf,
        "v_l2": nv.l2_H,
        "v_linf": nv.linf,
    }


def cmd_simulate(args) -> int:
    cfg = load_run_config(args.config, seed_override=args.seed)
    traj = integrate(cfg.initial_state(), cfg.model)
    out = _out_dir(cfg, args.out)
    written = []
    if cfg.output.csv:
        written.append(write_trajectory_csv(out / "trajectory.csv", traj, cfg.model.grid, cfg.output.csv_stride).name)
    manifest = {
        "command": "simulate",
        "config": cfg.raw,
        "n_states": traj.n_states,
        "final": _state_summary(cfg, traj.final_state()),
        "outputs": written,
    }
    write_json_doc(out / "manifest.json", manifest, cfg.digest)
    print(f"simulate: {traj.n_states} states written to {out} (digest {cfg.digest})")
    return EXIT_OK


def cmd_find_periodic(args) -> int:
    cfg = load_run_config(args.config, seed_override=args.seed)
    out = _out_dir(cfg, args.out)
    exit_code = EXIT_OK
    try:
        report = periodic.find_periodic(
            cfg.model,
            z_init=cfg.initial_state(),
            tol=cfg.solver.tol,
            max_iter=cfg.solver.max_iter,
            anderson_window=cfg.solver.anderson_window,
        )
    except periodic.NotConvergedError as exc:
        report = exc.report
        exit_code = EXIT_NOT_CONVERGED
    payload = {"command": "find-periodic", "report": report.to_dict(), "final": _state_summary(cfg, report.final_state)}
    if report.converged and cfg.solver.cross_check:
        outer = periodic.outer_fixed_point(cfg.model, tol=cfg.solver.tol * 100)
        gap_u = float(np.max(np.abs(outer.final_state.u.values - report.final_state.u.values)))
        gap_v = float(np.max(np.abs(outer.final_state.v.values - report.final_state.v.values)))
        payload["cross_check"] = {
            "report": outer.to_dict(),
            "state_gap_linf": max(gap_u, gap_v),
        }
    write_json_doc(out / "periodic_report.json", payload, cfg.digest)
    if report.converged and cfg.output.csv:
        traj = integrate(report.final_state, cfg.model)
        write_trajectory_csv(out / "periodic_trajectory.csv", traj, cfg.model.grid, cfg.output.csv_stride)
    status = "converged" if report.converged else "NOT converged"
    residual = report.residual_history[-1] if report.residual_history else math.nan
    print(
        f"find-periodic: {status} after {report.iterations} iteration(s), "
        f"residual {residual:.3e}, c0={report.c0:.4g} (digest {cfg.digest})"
    )
    return exit_code


def _sweep_point(payload: dict) -> tuple[dict, dict | None]:
    """Run one sweep point; standalone so process pools can pickle it.

    Returns the table row plus, for converged points, the order-parameter
    history (times and v values) used for the cross-point diffs table.
    """
    from .config import parse_run_config  # re-import inside worker processes

    cfg = parse_run_config(payload["raw"])
    parameter = payload["parameter"]
    value = payload["value"]
    model = cfg.point_model(parameter, value, payload.get("dt_value"))
    row = {"parameter": parameter, "value": value, "dt": model.dt}
    try:
        report = periodic.find_periodic(
            model, z_init=None, tol=cfg.solver.tol, max_iter=cfg.solver.max_iter,
            anderson_window=cfg.solver.anderson_window,
        )
        converged = True
    except periodic.NotConvergedError as exc:
        report = exc.report
        converged = False
    except (InstabilityError, EvalError) as exc:
        row.update({"converged": False, "error": type(exc).__name__})
        return row, None
    row.update(
        {
            "converged": converged,
            "iterations": report.iterations,
            "residual": report.residual_history[-1] if report.residual_history else math.nan,
            "error": "" if converged else "NotConverged",
        }
    )
    if not converged:
        return row, None
    traj = integrate(report.final_state, model)
    violation = diagnostics.constraint_violation(traj, model.curves_eps)
    violation.vi_max_positive = diagnostics.vi_residual(traj, model.curves_eps, model)
    bundle = diagnostics.norm_bundle(traj, model)
    row.update(violation.to_dict())
    row.update(bundle.to_dict())
    history = {"times": traj.times, "v": traj.v, "spacing_h": model.grid.spacing_h}
    return row, history


def _v_diff_rows(values, histories) -> list[dict]:
    """sup-in-time H distances of v between consecutive converged sweep points.

    Reported, never asserted: for a lambda sweep this tabulates the Cauchy
    behavior of the order parameter as the regularization tightens.  Points
    with different step counts are compared on their common sample times.
    """
    rows = []
    for (val_a, hist_a), (val_b, hist_b) in zip(
        zip(values, histories), zip(values[1:], histories[1:])
    ):
        if hist_a is None or hist_b is None:
            continue
        ta, tb = hist_a["times"], hist_b["times"]
        ia = np.isin(np.round(ta, 12), np.round(tb, 12))
        ib = np.isin(np.round(tb, 12), np.round(ta, 12))
        if not np.any(ia):
            continue
        va, vb = hist_a["v"][ia], hist_b["v"][ib]
        if va.shape != vb.shape:
            continue
        h = hist_a["spacing_h"]
        dist = float(np.max(np.sqrt(h * np.sum((va - vb) ** 2, axis=1))))
        rows.append({"value_coarse": val_a, "value_fine": val_b, "sup_t_v_dist_H": dist})
    return rows


def cmd_sweep(args) -> int:
    cfg = load_run_config(args.config, seed_override=args.seed)
    if cfg.sweep is None:
        raise ConfigError("sweep", "missing sweep block")
    out = _out_dir(cfg, args.out)
    payloads = []
    for k, value in enumerate(cfg.sweep.values):
        payloads.append(
            {
                "raw": cfg.raw,
                "parameter": cfg.sweep.parameter,
                "value": value,
                "dt_value": cfg.sweep.dt_values[k] if cfg.sweep.dt_values else None,
            }
        )
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_point, payloads))
    else:
        results = [_sweep_point(p) for p in payloads]
    rows = [row for row, _ in results]
    write_sweep_csv(out / "sweep.csv", rows, cfg.digest)
    diff_rows = _v_diff_rows(cfg.sweep.values, [hist for _, hist in results])
    manifest = {"command": "sweep", "config": cfg.raw, "rows": rows, "v_diffs": diff_rows}
    write_json_doc(out / "sweep_manifest.json", manifest, cfg.digest)
    if diff_rows:
        lines = [f"# config_digest={cfg.digest}", "value_coarse,value_fine,sup_t_v_dist_H"]
        from .artifacts import fmt

        for r in diff_rows:
            lines.append(f"{fmt(r['value_coarse'])},{fmt(r['value_fine'])},{fmt(r['sup_t_v_dist_H'])}")
        (out / "sweep_vdiffs.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    n_failed = sum(1 for r in rows if not r.get("converged"))
    print(f"sweep: {len(rows)} point(s), {n_failed} failed, table in {out / 'sweep.csv'} (digest {cfg.digest})")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        results = suites.run_suite(args.suite, seed=args.seed if args.seed is not None else 0)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    all_passed = True
    for suite in results:
        for check in suite.checks:
            mark = "pass" if check.passed else "FAIL"
            print(f"[{mark}] {suite.suite}.{check.name}: {check.detail}")
            if not check.passed and check.counterexample is not None:
                print(f"       counterexample: {check.counterexample}")
        all_passed &= suite.passed
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        doc = {"suites": [s.to_dict() for s in results], "passed": all_passed}
        write_json_doc(out / "check_results.json", doc, digest=f"suite-{args.suite}-seed-{args.seed or 0}")
    return EXIT_OK if all_passed else EXIT_PROPERTY_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="periplay", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, default=None, help="seed override for randomized pieces")

    p_sim = sub.add_parser("simulate", help="integrate one period from the configured initial state")
    add_common(p_sim)
    p_sim.set_defaults(fn=cmd_simulate)

    p_fp = sub.add_parser("find-periodic", help="compute a time-periodic solution by fixed-point iteration")
    add_common(p_fp)
    p_fp.set_defaults(fn=cmd_find_periodic)

    p_sw = sub.add_parser("sweep", help="run the configured parameter sweep")
    add_common(p_sw)
    p_sw.add_argument("--workers", type=int, default=1, help="concurrent sweep points (default 1)")
    p_sw.set_defaults(fn=cmd_sweep)

    p_ck = sub.add_parser("check", help="run a module property suite")
    p_ck.add_argument("--suite", required=True, help=f"one of: {', '.join(suites.SUITE_NAMES)}")
    p_ck.add_argument("--seed", type=int, default=None)
    p_ck.add_argument("--out", default=None)
    p_ck.set_defaults(fn=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except periodic.NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (InstabilityError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
