"""Configuration-driven batch runner.

Subcommands: ode-verify, torus-run, euclid-run, scaling-study, testfn-check.
Every run takes a JSON config (schema_version 1), an output directory, a seed
for parameter sampling, and a worker count for independent jobs.  Outputs are
flat CSV/JSON files written with 17 significant digits; identical config and
seed reproduce them byte for byte.

Exit codes: 0 all checks pass, 1 verification failure, 2 config error,
3 runtime/overflow error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import euclid, ode_core, ratefit, testfn, torus
from .errors import IntegrationError, ValidationError
from .sampling import sample_coupled_specs
from .serialize import write_csv, write_json
from .system import SystemParams

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing

def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"config schema_version must be {SCHEMA_VERSION}, "
            f"got {cfg.get('schema_version')!r}"
        )
    return cfg


def _require(cfg, key, kind=None):
    if key not in cfg:
        raise ConfigError(f"config key {key!r} is required")
    val = cfg[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"config key {key!r} has wrong type")
    return val


def _as_complex(value, key):
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{key} must be a number or [re, im] pair")


def _parse_params(cfg) -> SystemParams:
    block = _require(cfg, "params", dict)
    try:
        return SystemParams(
            n=int(_require(block, "n", int)),
            p=float(_require(block, "p", (int, float))),
            q=float(_require(block, "q", (int, float))),
            alpha1=_as_complex(_require(block, "alpha1"), "alpha1"),
            alpha2=_as_complex(_require(block, "alpha2"), "alpha2"),
            beta1=_as_complex(_require(block, "beta1"), "beta1"),
            beta2=_as_complex(_require(block, "beta2"), "beta2"),
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid params: {exc}")


def _pmap(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _build_info():
    from . import __version__

    return {"package": "cgl-blowup", "version": __version__}


# ---------------------------------------------------------------------------
# ode-verify

def _ode_case(args):
    spec, tol, threshold, t_end = args
    traj = ode_core.integrate_coupled(
        spec, t_end=t_end, tol=tol, blowup_threshold=threshold
    )
    if spec.omega > 0:
        report = ode_core.damped_bounds(spec)
    else:
        report = ode_core.undamped_bounds(spec)
    row = {
        "p": spec.p, "q": spec.q, "C_p": spec.C_p, "C_q": spec.C_q,
        "omega": spec.omega, "f0": spec.f0, "g0": spec.g0,
        "status": traj.status,
        "escape_time": traj.escape_time(),
        "hypothesis_satisfied": report.hypothesis_satisfied,
        "lifespan_bound": report.lifespan_bound,
        "residual_literal": ode_core.conserved_residual(traj, spec),
        "residual_scaled": ode_core.conserved_residual_scaled(traj, spec),
        "monotone": bool(
            spec.omega > 0
            or (np.all(np.diff(traj.f) >= 0) and np.all(np.diff(traj.g) >= 0))
        ),
        "bound_respected": True,
        "curve_dominated": True,
    }
    if report.hypothesis_satisfied:
        # step collapse near blow-up still certifies the time ordering
        if traj.status in (ode_core.BLOWUP, ode_core.STEP_COLLAPSE):
            row["bound_respected"] = bool(traj.times[-1] <= report.lifespan_bound)
        curve = np.array([report.lower_bound_curve(t) for t in traj.times])
        row["curve_dominated"] = bool(
            np.all(traj.g >= curve - 1e-9 * (1 + traj.g))
        )
    return row


def cmd_ode_verify(cfg, out_dir, seed, workers):
    n_specs = int(cfg.get("n_specs", 50))
    tol = float(cfg.get("tol", 1e-10))
    threshold = float(cfg.get("blowup_threshold", 1e6))
    t_end = float(cfg.get("t_end", 4.0))
    n_pairs = int(cfg.get("n_comparison_pairs", 20))
    residual_tolerance = float(cfg.get("residual_tolerance", 1e-7))

    specs = sample_coupled_specs(seed, n_specs)
    rows = _pmap(_ode_case, [(s, tol, threshold, t_end) for s in specs], workers)

    # worked symmetric case: exact blow-up 1/3 against bound 2^(4/3)/3
    worked_spec = ode_core.CoupledODESpec(
        p=2, q=2, C_p=1, C_q=1, omega=0, f0=1, g0=1
    )
    worked_traj = ode_core.integrate_coupled(
        worked_spec, t_end=4.0, tol=tol, blowup_threshold=threshold
    )
    worked_lifespan = ode_core.tail_corrected_lifespan(worked_traj, worked_spec)
    worked_bound = ode_core.undamped_bounds(worked_spec).lifespan_bound
    worked = {
        "lifespan": worked_lifespan,
        "bound": worked_bound,
        "exact": 1.0 / 3.0,
        "within_tolerance": bool(abs(worked_lifespan - 1.0 / 3.0) <= 1e-4),
        "bound_respected": bool(worked_lifespan <= worked_bound),
    }

    # ordered-data comparison pairs
    comparison_failures = []
    rng = np.random.default_rng(seed + 1)
    pair_specs = sample_coupled_specs(seed + 1, n_pairs)
    for i, spec in enumerate(pair_specs):
        shrink = float(rng.uniform(0.9, 0.99))
        sub_spec = ode_core.CoupledODESpec(
            p=spec.p, q=spec.q, C_p=spec.C_p, C_q=spec.C_q,
            omega=spec.omega, f0=spec.f0 * shrink, g0=spec.g0 * shrink,
        )
        sup = ode_core.integrate_coupled(spec, t_end=t_end, tol=tol,
                                         blowup_threshold=1e5)
        sub = ode_core.integrate_coupled(sub_spec, t_end=t_end, tol=tol,
                                         blowup_threshold=1e5)
        verdict = ode_core.check_comparison(sub, sup)
        if not verdict.passed:
            comparison_failures.append(
                {"index": i, "time": verdict.first_violation_time,
                 "component": verdict.component}
            )

    checks = [
        {
            "name": "conserved_identity_literal",
            "passed": bool(all(r["residual_literal"] < residual_tolerance
                               for r in rows)),
            "max_value": max(r["residual_literal"] for r in rows),
            "tolerance": residual_tolerance,
        },
        {
            "name": "conserved_identity_scaled",
            "passed": bool(all(r["residual_scaled"] < residual_tolerance
                               for r in rows)),
            "max_value": max(r["residual_scaled"] for r in rows),
            "tolerance": residual_tolerance,
        },
        {
            "name": "worked_symmetric_case",
            "passed": bool(worked["within_tolerance"] and worked["bound_respected"]),
        },
        {
            "name": "lifespan_bounds_dominate",
            "passed": bool(all(r["bound_respected"] for r in rows)),
        },
        {
            "name": "lower_bound_curves_dominated",
            "passed": bool(all(r["curve_dominated"] for r in rows)),
        },
        {
            "name": "undamped_monotonicity",
            "passed": bool(all(r["monotone"] for r in rows)),
        },
        {
            "name": "ordered_data_comparison",
            "passed": not comparison_failures,
            "failures": comparison_failures,
        },
    ]
    all_passed = all(c["passed"] for c in checks)

    failing = [
        {k: r[k] for k in ("p", "q", "C_p", "C_q", "omega", "f0", "g0",
                           "residual_literal", "residual_scaled",
                           "bound_respected", "curve_dominated", "monotone")}
        for r in rows
        if (r["residual_literal"] >= residual_tolerance
            or not r["bound_respected"] or not r["curve_dominated"]
            or not r["monotone"])
    ]
    report = {
        "schema_version": SCHEMA_VERSION,
        "build_info": _build_info(),
        "seed": seed,
        "n_specs": n_specs,
        "checks": checks,
        "worked_case": worked,
        "failing_cases": failing[:10],
        "all_passed": bool(all_passed),
    }
    write_json(os.path.join(out_dir, "report.json"), report)

    cols = ["p", "q", "C_p", "C_q", "omega", "f0", "g0", "escape_time",
            "lifespan_bound", "residual_literal", "residual_scaled"]
    data = [[(r[c] if r[c] is not None else math.nan) for r in rows] for c in cols]
    write_csv(os.path.join(out_dir, "specs.csv"), ",".join(cols), data)
    return EXIT_OK if all_passed else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# torus-run

def _torus_state_from_config(cfg, grid, params):
    block = _require(cfg, "data", dict)
    kind = _require(block, "kind", str)
    if kind == "constant":
        cu = _as_complex(_require(block, "u"), "data.u")
        cv = _as_complex(_require(block, "v"), "data.v")
        return torus.constant_state(grid, cu, cv)
    if kind == "fourier_mode":
        amp = _as_complex(_require(block, "amplitude"), "data.amplitude")
        mode = int(block.get("mode", 1))
        x = grid.axes()[0]
        if grid.n == 1:
            field = amp * np.exp(1j * mode * x)
        else:
            xx, yy = np.meshgrid(x, x, indexing="ij")
            field = amp * np.exp(1j * mode * xx)
        return torus.state_from_arrays(grid, field, field.copy())
    if kind == "constant_plus_mode":
        cu = _as_complex(_require(block, "u"), "data.u")
        cv = _as_complex(_require(block, "v"), "data.v")
        amp = _as_complex(block.get("perturbation", 0.0), "data.perturbation")
        x = grid.axes()[0]
        if grid.n == 1:
            bump = amp * np.cos(x)
        else:
            xx, _ = np.meshgrid(x, x, indexing="ij")
            bump = amp * np.cos(xx)
        return torus.state_from_arrays(grid, cu + bump, cv + bump)
    raise ConfigError(f"unknown torus data kind {kind!r}")


def cmd_torus_run(cfg, out_dir, seed, workers):
    params = _parse_params(cfg)
    grid_cfg = cfg.get("grid", {})
    grid = torus.make_grid(params.n, grid_cfg.get("modes"))
    state = _torus_state_from_config(cfg, grid, params)
    dt_cfg = cfg.get("dt", {})
    run = torus.run_torus(
        params, state,
        t_end=float(_require(cfg, "t_end", (int, float))),
        dt_max=float(dt_cfg.get("dt_max", 1e-3)),
        field_threshold=float(cfg.get("field_threshold", 1e6)),
        dt_safety=float(dt_cfg.get("safety", 0.05)),
        pad=bool(cfg.get("pad", False)),
    )
    series = run.series
    series.to_csv(os.path.join(out_dir, "functionals.csv"))

    odi = torus.check_growth_inequality(series, params)
    bounds = torus.blowup_bounds(params, float(series.U[0]), float(series.V[0]))
    bound_samples = _bound_sample_times(bounds)
    fit_block = None
    if run.status == ode_core.BLOWUP and series.U[-1] > 0:
        try:
            window = ratefit.trailing_decade_window(series.times, series.U)
            fit_block = ratefit.fit_power_law(series.times, series.U,
                                              window=window).to_json_dict()
        except ValidationError:
            fit_block = None

    escape = run.escape_time()
    bound_ok = True
    if bounds.hypothesis_satisfied and escape is not None:
        bound_ok = bool(escape <= bounds.lifespan_bound)
    zero_mode_ok = bool(run.lap_zero_mode_max < 1e-12)

    report = {
        "schema_version": SCHEMA_VERSION,
        "build_info": _build_info(),
        "status": run.status,
        "escape_time": escape,
        "lap_zero_mode_max": run.lap_zero_mode_max,
        "bounds": bounds.to_json_dict(bound_samples),
        "odi": odi.to_json_dict(),
        "fit_U": fit_block,
        "exponent_caveat": bool(params.exponent_caveat),
        "checks": {
            "odi_clean": odi.passed,
            "bound_respected": bound_ok,
            "zero_mode_exact": zero_mode_ok,
        },
    }
    write_json(os.path.join(out_dir, "report.json"), report)
    write_json(os.path.join(out_dir, "plots.json"), {
        "schema_version": SCHEMA_VERSION,
        "plots": [{
            "csv": "functionals.csv",
            "x": "t",
            "series": ["U", "V"],
            "yscale": "log",
            "reference_slopes": [
                {"gamma": (params.p + 1) / (params.p * params.q - 1),
                 "label": "U rate"},
                {"gamma": (params.q + 1) / (params.p * params.q - 1),
                 "label": "V rate"},
            ],
        }],
    })
    if bool(cfg.get("snapshots", False)):
        _write_snapshot(out_dir, "final_state", run.final_state.u,
                        run.final_state.v, run.final_state.t)
    ok = odi.passed and bound_ok and zero_mode_ok
    return EXIT_OK if ok else EXIT_VERIFICATION


def _bound_sample_times(bounds, count: int = 33):
    """Sample grid for the lower-bound curve, stopping short of its pole."""
    if not bounds.hypothesis_satisfied or bounds.lifespan_bound is None:
        return None
    if not math.isfinite(bounds.lifespan_bound):
        return None
    return np.linspace(0.0, 0.99 * bounds.lifespan_bound, count)


def _write_snapshot(out_dir, name, u, v, t):
    path_u = os.path.join(out_dir, f"{name}_u.bin")
    path_v = os.path.join(out_dir, f"{name}_v.bin")
    np.ascontiguousarray(u).tofile(path_u)
    np.ascontiguousarray(v).tofile(path_v)
    write_json(os.path.join(out_dir, f"{name}.json"), {
        "schema_version": SCHEMA_VERSION,
        "time": float(t),
        "dtype": "complex128",
        "layout": "C",
        "shape": list(u.shape),
        "files": {"u": f"{name}_u.bin", "v": f"{name}_v.bin"},
    })


# ---------------------------------------------------------------------------
# euclid-run

def _parse_euclid_spec(cfg) -> euclid.EuclidRunSpec:
    params = _parse_params(cfg)
    data_cfg = _require(cfg, "data", dict)
    try:
        data = euclid.DataSpec(
            epsilon=float(_require(data_cfg, "epsilon", (int, float))),
            r_data=float(_require(data_cfg, "r_data", (int, float))),
            amp_u=float(data_cfg.get("amp_u", 1.0)),
            amp_v=float(data_cfg.get("amp_v", 1.0)),
            shape=data_cfg.get("shape", "weight"),
        )
        R = float(_require(cfg, "R", (int, float)))
        h = cfg.get("h")
        if h is None:
            h = R / float(cfg.get("points_per_R", 128))
        return euclid.EuclidRunSpec(
            params=params,
            R=R,
            box_half_width=float(_require(cfg, "box_half_width", (int, float))),
            h=float(h),
            data=data,
            scheme=cfg.get("scheme", "imex"),
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid euclid spec: {exc}")


def cmd_euclid_run(cfg, out_dir, seed, workers):
    spec = _parse_euclid_spec(cfg)
    tf = testfn.build_test_function(spec.params.n)
    state = euclid.make_initial_state(spec, tf)
    U0, V0 = euclid.weighted_functionals(state, spec, tf)
    dt_cfg = cfg.get("dt", {})
    odi_cap = float(cfg.get("odi_cap", 1e5))
    run = euclid.run_euclid(
        spec, tf,
        t_end=float(_require(cfg, "t_end", (int, float))),
        dt_max=float(dt_cfg.get("dt_max", 2e-3)),
        functional_threshold=cfg.get("functional_threshold", 1e5),
        field_threshold=float(cfg.get("field_threshold", 1e7)),
        dt_safety=float(dt_cfg.get("safety", 0.05)),
        state=state,
    )
    series = run.series
    series.to_csv(os.path.join(out_dir, "functionals.csv"))

    bounds = euclid.blowup_bounds(spec, tf, U0, V0)
    write_json(os.path.join(out_dir, "thresholds.json"), {
        "schema_version": SCHEMA_VERSION,
        **bounds.thresholds.to_json_dict(),
        "T1": bounds.T1,
    })

    cap_mask = (series.U <= odi_cap) & (series.V <= odi_cap)
    capped = _mask_series(series, cap_mask)
    odi = euclid.check_weighted_growth_inequality(capped, spec, tf)

    gamma_u = (spec.params.p + 1) / (spec.params.p * spec.params.q - 1)
    gamma_v = (spec.params.q + 1) / (spec.params.p * spec.params.q - 1)
    escape, escape_corrected = _functional_escape(series, odi_cap, gamma_u, gamma_v)
    bound_ok = True
    if bounds.hypothesis_satisfied and escape_corrected is not None:
        bound_ok = bool(escape_corrected <= bounds.lifespan_bound)

    fits = {}
    for label, column, target in (
        ("U", series.U, gamma_u),
        ("V", series.V, (spec.params.q + 1) / (spec.params.p * spec.params.q - 1)),
    ):
        try:
            window = ratefit.trailing_decade_window(series.times, column,
                                                    top=float(column[-1]))
            fit = ratefit.fit_power_law(series.times, column, window=window)
            fits[label] = {**fit.to_json_dict(), "target_gamma": target}
        except ValidationError:
            fits[label] = None

    report = {
        "schema_version": SCHEMA_VERSION,
        "build_info": _build_info(),
        "status": run.status,
        "U0": U0,
        "V0": V0,
        "escape_time": escape,
        "escape_time_tail_corrected": escape_corrected,
        "bounds": bounds.to_json_dict(_bound_sample_times(bounds)),
        "odi": odi.to_json_dict(),
        "odi_cap": odi_cap,
        "fits": fits,
        "exponent_caveat": bool(spec.params.exponent_caveat),
        "checks": {
            "odi_clean": odi.passed,
            "bound_respected": bound_ok,
        },
    }
    write_json(os.path.join(out_dir, "report.json"), report)
    write_json(os.path.join(out_dir, "plots.json"), {
        "schema_version": SCHEMA_VERSION,
        "plots": [{
            "csv": "functionals.csv",
            "x": "t",
            "series": ["U", "V"],
            "yscale": "log",
            "reference_slopes": [
                {"gamma": gamma_u, "label": "U rate"},
            ],
        }],
    })
    ok = odi.passed and bound_ok
    return EXIT_OK if ok else EXIT_VERIFICATION


def _mask_series(series, mask):
    from .system import FunctionalSeries

    if mask.all():
        return series
    idx = np.nonzero(~mask)[0]
    cut = idx[0] if idx.size else mask.size
    return FunctionalSeries(
        times=series.times[:cut], U=series.U[:cut], V=series.V[:cut],
        dU=series.dU[:cut], dV=series.dV[:cut],
    )


def _functional_escape(series, threshold, gamma_u, gamma_v):
    """First crossing of the threshold by max(U, V), plus the power-law tail
    correction gamma * w / w' of the crossing functional, making the estimate
    threshold-insensitive."""
    above = np.nonzero(np.maximum(series.U, series.V) >= threshold)[0]
    if above.size == 0:
        return None, None
    i = int(above[0])
    t = float(series.times[i])
    if series.U[i] >= series.V[i]:
        w, dw, gamma = float(series.U[i]), float(series.dU[i]), gamma_u
    else:
        w, dw, gamma = float(series.V[i]), float(series.dV[i]), gamma_v
    corrected = t + gamma * w / dw if dw > 0 else t
    return t, corrected


# ---------------------------------------------------------------------------
# scaling-study

def _scaling_epsilons(cfg):
    block = _require(cfg, "epsilon", dict)
    start = float(_require(block, "start", (int, float)))
    factor = float(_require(block, "factor", (int, float)))
    count = int(_require(block, "count", int))
    if count < 5:
        raise ConfigError("epsilon ladder needs at least 5 points")
    if not (0 < factor != 1.0):
        raise ConfigError("epsilon factor must be positive and != 1")
    return [start * factor ** k for k in range(count)]


def _euclid_scaling_case(args):
    cfg, eps = args
    params_cfg = dict(cfg["params"])
    params = SystemParams(
        n=int(params_cfg["n"]), p=float(params_cfg["p"]), q=float(params_cfg["q"]),
        alpha1=_as_complex(params_cfg["alpha1"], "alpha1"),
        alpha2=_as_complex(params_cfg["alpha2"], "alpha2"),
        beta1=_as_complex(params_cfg["beta1"], "beta1"),
        beta2=_as_complex(params_cfg["beta2"], "beta2"),
    )
    tf = testfn.build_test_function(params.n)
    spec = euclid.EuclidRunSpec(
        params=params,
        R=float(cfg["R"]),
        box_half_width=float(cfg["box_half_width"]),
        h=float(cfg["h"]),
        data=euclid.DataSpec(
            epsilon=eps,
            r_data=float(cfg.get("r_data", 1.0)),
            amp_u=float(cfg.get("amp_u", 1.0)),
            amp_v=float(cfg.get("amp_v", 1.0)),
        ),
    )
    run = euclid.run_euclid(
        spec, tf,
        t_end=float(cfg.get("time_budget", 200.0)),
        dt_max=float(cfg.get("dt_max", 2e-3)),
        functional_threshold=float(cfg.get("functional_threshold", 1e6)),
        field_threshold=float(cfg.get("field_threshold", 1e10)),
    )
    if run.status != ode_core.BLOWUP:
        return {"epsilon": eps, "complete": False, "T": math.nan}
    s = run.series
    try:
        window = ratefit.trailing_decade_window(s.times, s.U)
        t_star = ratefit.fit_power_law(s.times, s.U, window=window).t_star
    except ValidationError:
        t_star = float(s.times[-1])
    return {"epsilon": eps, "complete": True, "T": float(t_star)}


def _torus_scaling_case(args):
    cfg, eps = args
    params_cfg = dict(cfg["params"])
    params = SystemParams(
        n=int(params_cfg["n"]), p=float(params_cfg["p"]), q=float(params_cfg["q"]),
        alpha1=_as_complex(params_cfg["alpha1"], "alpha1"),
        alpha2=_as_complex(params_cfg["alpha2"], "alpha2"),
        beta1=_as_complex(params_cfg["beta1"], "beta1"),
        beta2=_as_complex(params_cfg["beta2"], "beta2"),
    )
    grid = torus.make_grid(params.n, int(cfg.get("modes", 32)))
    state = torus.constant_state(grid, eps, eps)
    run = torus.run_torus(
        params, state,
        t_end=float(cfg.get("time_budget", 200.0)),
        dt_max=float(cfg.get("dt_max", 1e-3)),
        field_threshold=float(cfg.get("field_threshold", 1e6)),
        check_zero_mode=False,
    )
    if run.status != ode_core.BLOWUP:
        return {"epsilon": eps, "complete": False, "T": math.nan}
    s = run.series
    try:
        window = ratefit.trailing_decade_window(s.times, s.U)
        t_star = ratefit.fit_power_law(s.times, s.U, window=window).t_star
    except ValidationError:
        t_star = float(s.times[-1])
    return {"epsilon": eps, "complete": True, "T": float(t_star)}


def cmd_scaling_study(cfg, out_dir, seed, workers):
    mode = _require(cfg, "mode", str)
    if mode not in ("euclid", "torus_homogeneous"):
        raise ConfigError(f"unknown scaling mode {mode!r}")
    params = _parse_params(cfg)
    if params.alpha1.real >= 0 or params.alpha2.real >= 0:
        raise ConfigError("scaling study requires dissipative alpha")
    n, p, q = params.n, params.p, params.q
    gap = (p + 1.0) / (p * q - 1.0) - n / 2.0
    if mode == "euclid":
        if gap <= 0:
            raise ConfigError(
                "critical or supercritical exponents: (p+1)/(pq-1) must exceed n/2"
            )
        predicted = -1.0 / gap
        tolerance = float(cfg.get("slope_tolerance", 0.15))
        case = _euclid_scaling_case
        if "R" not in cfg or "box_half_width" not in cfg or "h" not in cfg:
            raise ConfigError("euclid scaling requires R, box_half_width and h")
    else:
        predicted = -(p * q - 1.0) / (p + 1.0)
        tolerance = float(cfg.get("slope_tolerance", 0.10))
        case = _torus_scaling_case

    epsilons = _scaling_epsilons(cfg)
    results = _pmap(case, [(cfg, eps) for eps in epsilons], workers)

    complete = [r for r in results if r["complete"]]
    write_csv(
        os.path.join(out_dir, "runs.csv"),
        "epsilon,T,complete",
        [
            [r["epsilon"] for r in results],
            [r["T"] for r in results],
            [1.0 if r["complete"] else 0.0 for r in results],
        ],
    )
    if len(complete) < 4:
        write_json(os.path.join(out_dir, "report.json"), {
            "schema_version": SCHEMA_VERSION,
            "build_info": _build_info(),
            "mode": mode,
            "error": "fewer than 4 complete runs",
            "n_complete": len(complete),
        })
        return EXIT_VERIFICATION

    log_eps = np.log([r["epsilon"] for r in complete])
    log_t = np.log([r["T"] for r in complete])
    x = log_eps - log_eps.mean()
    slope = float(x @ (log_t - log_t.mean()) / (x @ x))
    resid = log_t - log_t.mean() - slope * x
    dof = max(len(complete) - 2, 1)
    stderr = float(np.sqrt((resid @ resid) / dof / (x @ x)))
    rel_err = abs(slope - predicted) / abs(predicted)
    matches = bool(rel_err <= tolerance)

    report = {
        "schema_version": SCHEMA_VERSION,
        "build_info": _build_info(),
        "mode": mode,
        "n_complete": len(complete),
        "slope": slope,
        "slope_stderr": stderr,
        "slope_ci95": [slope - 1.96 * stderr, slope + 1.96 * stderr],
        "predicted_slope": predicted,
        "relative_error": rel_err,
        "tolerance": tolerance,
        "matches_prediction": matches,
    }
    write_json(os.path.join(out_dir, "report.json"), report)
    write_json(os.path.join(out_dir, "plots.json"), {
        "schema_version": SCHEMA_VERSION,
        "plots": [{
            "csv": "runs.csv",
            "x": "epsilon",
            "series": ["T"],
            "xscale": "log",
            "yscale": "log",
            "reference_slopes": [{"slope": predicted, "label": "predicted"}],
        }],
    })
    return EXIT_OK if matches else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# testfn-check

def cmd_testfn_check(cfg, out_dir, seed, workers):
    dims = cfg.get("dimensions", [1, 2])
    if not (isinstance(dims, list) and dims
            and all(isinstance(d, int) for d in dims)):
        raise ConfigError("dimensions must be a non-empty list of integers")
    resolution = int(cfg.get("resolution", 4096))
    entries = []
    ok = True
    for n in dims:
        try:
            tf = testfn.build_test_function(n)
        except ValidationError as exc:
            raise ConfigError(str(exc))
        violation = testfn.verify_phi_inequality(tf, resolution)
        tol = 1e-10 if n == 1 else 1e-8
        passed = bool(violation <= tol)
        ok = ok and passed
        entries.append({
            "n": n,
            "lambda": tf.lam,
            "lambda_eff": tf.lambda_eff,
            "l1_norm": tf.l1_norm,
            "bessel_zero": tf.bessel_zero,
            "max_violation": violation,
            "tolerance": tol,
            "passed": passed,
        })
        if cfg.get("profile_csv", True):
            tf.to_csv(os.path.join(out_dir, f"profile_n{n}.csv"),
                      resolution=min(resolution, 4096))
    write_json(os.path.join(out_dir, "report.json"), {
        "schema_version": SCHEMA_VERSION,
        "build_info": _build_info(),
        "dimensions": entries,
        "all_passed": bool(ok),
    })
    return EXIT_OK if ok else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# entry point

_COMMANDS = {
    "ode-verify": cmd_ode_verify,
    "torus-run": cmd_torus_run,
    "euclid-run": cmd_euclid_run,
    "scaling-study": cmd_scaling_study,
    "testfn-check": cmd_testfn_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cgl-blowup",
        description="Blow-up verification runs for weakly coupled systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        code = _COMMANDS[args.command](cfg, args.out, args.seed, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return code


if __name__ == "__main__":
    sys.exit(main())
