"""Scenario and sweep execution with deterministic CSV/JSON outputs.

A scenario config is JSON with exactly these top-level keys (unknown keys are
rejected)::

    {
      "scenario_id": "soliton-free",
      "output_dir": "out/soliton-free",
      "grid": {"box_length": 80, "n": 512},
      "initial_data": {"kind": "soliton", "c": 1.0, "x0": 0.0},
      "damping": {"kind": "none"},
      "solver": {"dt": 0.001, "t_end": 1.0, "record_stride": 10},
      "analyses": [{"decay_fit": {"windows": [[0, 1]]}}]
    }

Each run writes ``energy.csv``, ``analysis.json``, ``config_echo.json`` and one
``snapshot_XXX.csv`` per requested snapshot time into ``output_dir``.
"""

import copy
import csv
import io
import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import energy, mild, well
from .airy import verify_linear_estimates
from .grid import Field, GridSpec, h1_norm
from .integrator import BlowUpError, SolverConfig, evolve, simulate
from .profiles import initial_data, make_damping, zero_damping

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_PRECONDITION = 0, 2, 3, 4

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class PreconditionError(RuntimeError):
    pass


_TOP_KEYS = {"scenario_id", "output_dir", "grid", "initial_data", "damping", "solver", "analyses"}
_GRID_KEYS = {"box_length", "n"}
_INITIAL_KEYS = {
    "soliton": {"kind", "c", "x0"},
    "gaussian": {"kind", "amplitude", "sigma", "x0"},
    "random_h1": {"kind", "seed", "target_h1", "band"},
}
_DAMPING_KEYS = {"kind", "alpha0", "r1", "width"}
_SOLVER_KEYS = {"dt", "t_end", "record_stride", "dealias_on", "snapshot_times"}
_ANALYSIS_KEYS = {
    "decay_fit": {"windows"},
    "observability": {"r1", "T", "T0"},
    "vitillaro": {"mu", "construct", "margin", "restarts"},
    "picard": {"T", "tol", "c1", "n_t", "max_iter"},
}
_SWEEP_KEYS = {"base", "axes", "parallelism", "max_runs"}
_AXIS_ALIASES = {
    "mu": ("damping", "alpha0"),
    "alpha0": ("damping", "alpha0"),
    "seed": ("initial_data", "seed"),
    "target_h1": ("initial_data", "target_h1"),
    "c": ("initial_data", "c"),
    "amplitude": ("initial_data", "amplitude"),
}


def _check_keys(section, got, allowed):
    if not isinstance(got, dict):
        raise ConfigError(f"{section}: expected an object, got {type(got).__name__}")
    unknown = set(got) - set(allowed)
    if unknown:
        raise ConfigError(f"{section}: unknown keys {sorted(unknown)}")


def _number(section, value, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{section}: expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{section}: must be positive, got {value!r}")
    return value


def normalize_scenario(cfg):
    """Validate a scenario dict and fill defaults; raises ``ConfigError``."""
    _check_keys("scenario", cfg, _TOP_KEYS)
    missing = {"grid", "initial_data", "solver"} - set(cfg)
    if missing:
        raise ConfigError(f"scenario: missing keys {sorted(missing)}")
    out = {"scenario_id": str(cfg.get("scenario_id", "scenario")),
           "output_dir": str(cfg.get("output_dir", "out"))}

    grid = cfg["grid"]
    _check_keys("grid", grid, _GRID_KEYS)
    out["grid"] = {"box_length": _number("grid.box_length", grid.get("box_length", 80.0), True),
                   "n": grid.get("n", 512)}
    if not isinstance(out["grid"]["n"], int) or isinstance(out["grid"]["n"], bool):
        raise ConfigError("grid.n must be an integer")

    init = cfg["initial_data"]
    kind = init.get("kind") if isinstance(init, dict) else None
    if kind not in _INITIAL_KEYS:
        raise ConfigError(f"initial_data.kind must be one of {sorted(_INITIAL_KEYS)}, got {kind!r}")
    _check_keys("initial_data", init, _INITIAL_KEYS[kind])
    out["initial_data"] = dict(init)

    damp = cfg.get("damping", {"kind": "none"})
    _check_keys("damping", damp, _DAMPING_KEYS)
    dkind = damp.get("kind", "none")
    if dkind not in ("none", "constant", "right_step", "left_step", "sponge"):
        raise ConfigError(f"damping.kind {dkind!r} not recognised")
    out["damping"] = dict(damp, kind=dkind)

    solver = cfg["solver"]
    _check_keys("solver", solver, _SOLVER_KEYS)
    if "dt" not in solver or "t_end" not in solver:
        raise ConfigError("solver: dt and t_end are required")
    out["solver"] = {
        "dt": _number("solver.dt", solver["dt"], True),
        "t_end": _number("solver.t_end", solver["t_end"]),
        "record_stride": solver.get("record_stride", 1),
        "dealias_on": bool(solver.get("dealias_on", True)),
        "snapshot_times": [_number("solver.snapshot_times", s) for s in solver.get("snapshot_times", [])],
    }

    analyses = cfg.get("analyses", [])
    if not isinstance(analyses, list):
        raise ConfigError("analyses must be a list")
    norm_an = []
    for item in analyses:
        if not isinstance(item, dict) or len(item) != 1:
            raise ConfigError(f"each analysis must be a single-key object, got {item!r}")
        (name, params), = item.items()
        if name not in _ANALYSIS_KEYS:
            raise ConfigError(f"unknown analysis {name!r}")
        params = params or {}
        _check_keys(f"analyses.{name}", params, _ANALYSIS_KEYS[name])
        norm_an.append({name: dict(params)})
    out["analyses"] = norm_an

    # let the modules validate values
    try:
        build_inputs(out)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return out


def build_inputs(cfg):
    g = GridSpec(cfg["grid"]["box_length"], cfg["grid"]["n"])
    u0 = initial_data(g, cfg["initial_data"])
    d = cfg["damping"]
    if d["kind"] == "none":
        a = zero_damping(g)
    else:
        a = make_damping(g, d["kind"], d.get("alpha0", 0.0), d.get("r1", 0.0), d.get("width", 1.0))
    s = cfg["solver"]
    solver = SolverConfig(dt=s["dt"], t_end=s["t_end"], record_stride=s["record_stride"],
                          dealias_on=s["dealias_on"], snapshot_times=list(s["snapshot_times"]))
    return g, u0, a, solver


def load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def fmt(x):
    """17 significant digits: round-trip exact for doubles."""
    return format(float(x), ".17g")


def _clean(obj):
    """Make analysis payloads JSON-safe (numpy scalars, non-finite floats, tuples)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Field):
        return {"time": obj.time}
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def energy_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(energy.ENERGY_COLUMNS)
    for r in records:
        w.writerow([fmt(v) for v in r.row()])
    return buf.getvalue()


def snapshot_csv(f):
    g = f.grid
    lines = [f"# time={fmt(f.time)} box_length={fmt(g.box_length)} n={g.n} columns=x,u"]
    lines += [f"{fmt(x)},{fmt(u)}" for x, u in zip(g.x, f.samples)]
    return "\n".join(lines) + "\n"


def read_snapshot(path):
    """Inverse of the snapshot writer: returns a Field."""
    with open(path) as fh:
        header = fh.readline()
    meta = dict(tok.split("=", 1) for tok in header.lstrip("# ").split())
    data = np.loadtxt(path, delimiter=",", comments="#")
    g = GridSpec(float(meta["box_length"]), int(meta["n"]))
    return Field(g, data[:, 1], float(meta["time"]))


def _run_analyses(cfg, g, u0, a, solver, series):
    out = {"dissipation_residual": energy.dissipation_residual(series),
           "hamiltonian_residual": energy.hamiltonian_residual(series, a)}
    unmet = []
    recs = series.records
    windows = [(recs[0].t, recs[-1].t)] if recs[-1].t > recs[0].t else []
    for item in cfg["analyses"]:
        if "decay_fit" in item and item["decay_fit"].get("windows"):
            windows = [tuple(w) for w in item["decay_fit"]["windows"]]
    fits = []
    for w in windows:
        try:
            fits.append(asdict(energy.fit_decay(series, w)))
        except ValueError as exc:
            unmet.append(f"decay_fit {w}: {exc}")
    if fits:
        out["decay_fit"] = fits[0]
        out["decay_fits"] = fits

    for item in cfg["analyses"]:
        (name, p), = item.items()
        try:
            if name == "observability":
                r1 = p.get("r1", a.params.get("r1", 0.0))
                T = p.get("T", recs[-1].t)
                out["observability"] = {
                    "r1": r1, "T": T, "T0": p.get("T0", 1.0),
                    "ratio": energy.observability_ratio(series, a, r1, T, p.get("T0", 1.0))}
            elif name == "vitillaro":
                out["vitillaro"] = _vitillaro(g, u0, solver, p)
                if out["vitillaro"]["verdict"] == "no_verdict":
                    unmet.append("vitillaro: initial data fail the potential-well gate")
            elif name == "picard":
                out["picard"] = _picard(u0, a, solver, p)
        except (ValueError, mild.PicardDivergenceError, well.NoSupercriticalDataError) as exc:
            unmet.append(f"{name}: {exc}")
    out["preconditions_unmet"] = unmet
    return out, unmet


def _vitillaro(g, u0, solver, p):
    consts = well.estimate_k0(g, restarts=p.get("restarts", 1))
    if p.get("construct", True):
        u0 = well.construct_supercritical(g, consts, p.get("margin", 0.05))
    rep = well.vitillaro_experiment(u0, p.get("mu", 0.01), solver, consts)
    return dict(asdict(rep), k0=consts.k0, xi1=consts.xi1, d=consts.d)


def _picard(u0, a, solver, p):
    T = p.get("T", 0.05)
    c1 = p.get("c1", 2.0)
    res = mild.picard_solve(u0, a, T, p.get("tol", 1e-8), p.get("max_iter", 200), p.get("n_t", 64),
                            solver.dealias_on)
    ref = evolve(u0, a, T, min(solver.dt, T / 50.0), solver.dealias_on)
    last = res.trajectory.slices[-1]
    disagreement = h1_norm(last - Field(ref.grid, ref.samples, last.time))
    report = mild.t_kappa(h1_norm(u0), a.w2inf_norm, c1)
    return {"iterations": res.iterations, "distances": res.distances,
            "h1_disagreement_vs_integrator": disagreement,
            "kpv_norms": asdict(mild.kpv_norms(res.trajectory)),
            "contraction": asdict(report)}


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def run_scenario(cfg, out_dir=None):
    """Run one scenario; returns ``(exit_status, analysis_dict)``.

    Raises ``ConfigError`` before anything is written if the config is invalid.
    """
    cfg = normalize_scenario(cfg)
    if out_dir is not None:
        cfg["output_dir"] = str(out_dir)
    g, u0, a, solver = build_inputs(cfg)
    solver.keep_fields = any("observability" in item for item in cfg["analyses"])
    target = cfg["output_dir"]
    os.makedirs(target, exist_ok=True)
    _write(os.path.join(target, "config_echo.json"), dumps(cfg))

    status = EXIT_OK
    try:
        series = simulate(u0, a, solver)
    except BlowUpError as exc:
        series = exc.series
        status = EXIT_BLOWUP
        analysis = {"status": "blow_up", "last_good_time": exc.last_good_time}
    if status == EXIT_OK:
        analysis, unmet = _run_analyses(cfg, g, u0, a, solver, series)
        analysis["status"] = "ok" if not unmet else "precondition_unmet"
        if unmet:
            status = EXIT_PRECONDITION
    analysis["scenario_id"] = cfg["scenario_id"]
    if series is not None:
        _write(os.path.join(target, "energy.csv"), energy_csv(series.records))
        for i, f in enumerate(series.snapshots):
            _write(os.path.join(target, f"snapshot_{i:03d}.csv"), snapshot_csv(f))
    _write(os.path.join(target, "analysis.json"), dumps(analysis))
    return status, analysis


def _set_path(cfg, key, value):
    section, field_ = _AXIS_ALIASES.get(key, tuple(key.split(".", 1)) if "." in key else (None, key))
    if section is None or section not in cfg or not isinstance(cfg[section], dict):
        raise ConfigError(f"sweep axis {key!r} does not name a config field")
    cfg[section][field_] = value
    if key == "mu":
        cfg["damping"]["kind"] = "constant"


def expand_sweep(sweep):
    """Scenario configs of the cartesian product, in deterministic order."""
    _check_keys("sweep", sweep, _SWEEP_KEYS)
    if "base" not in sweep:
        raise ConfigError("sweep: missing base scenario")
    base = sweep["base"]
    axes = sweep.get("axes", {}) or {}
    if not isinstance(axes, dict):
        raise ConfigError("sweep.axes must be an object of name -> list")
    names = list(axes)
    for name in names:
        if not isinstance(axes[name], list) or not axes[name]:
            raise ConfigError(f"sweep axis {name!r} must be a nonempty list")
    combos = list(itertools.product(*(axes[n] for n in names)))
    cap = sweep.get("max_runs", 1000)
    if len(combos) > cap:
        raise ConfigError(f"sweep has {len(combos)} scenarios, above max_runs={cap}")
    root = base.get("output_dir", "out")
    base_id = base.get("scenario_id", "scenario")
    scenarios = []
    for i, combo in enumerate(combos):
        cfg = copy.deepcopy(base)
        for name, value in zip(names, combo):
            _set_path(cfg, name, value)
        cfg["scenario_id"] = f"{base_id}_{i:04d}" if names else base_id
        cfg["output_dir"] = os.path.join(root, cfg["scenario_id"])
        scenarios.append((dict(zip(names, combo)), cfg))
    return names, scenarios


def _run_one(cfg):
    try:
        status, analysis = run_scenario(cfg)
    except ConfigError as exc:
        return EXIT_CONFIG, {"status": "config_error", "error": str(exc)}
    return status, analysis


def run_sweep(sweep, out_dir=None):
    """Run every scenario of a sweep and write ``summary.csv``; returns its path and rows."""
    sweep = copy.deepcopy(sweep)
    if out_dir is not None and isinstance(sweep.get("base"), dict):
        sweep["base"]["output_dir"] = str(out_dir)
    names, scenarios = expand_sweep(sweep)
    parallelism = sweep.get("parallelism", 1)
    if isinstance(parallelism, bool) or not isinstance(parallelism, int) or parallelism < 1:
        raise ConfigError(f"sweep.parallelism must be a positive integer, got {parallelism!r}")
    log.info("sweep: %d scenarios over axes %s", len(scenarios), names)
    cfgs = [cfg for _, cfg in scenarios]
    if parallelism > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_one, cfgs))
    else:
        results = [_run_one(cfg) for cfg in cfgs]

    header = ["scenario_id", *names, "status", "exit_code", "omega", "rms_residual",
              "dissipation_residual", "hamiltonian_residual", "observability_ratio",
              "vitillaro_verdict"]
    rows = []
    for (axis_vals, cfg), (code, analysis) in zip(scenarios, results):
        fit = analysis.get("decay_fit") or {}
        row = [cfg["scenario_id"], *[axis_vals[n] for n in names], analysis.get("status", ""), code,
               fit.get("omega"), fit.get("rms_residual"), analysis.get("dissipation_residual"),
               analysis.get("hamiltonian_residual"),
               (analysis.get("observability") or {}).get("ratio"),
               (analysis.get("vitillaro") or {}).get("verdict", "")]
        rows.append([fmt(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    root = sweep["base"].get("output_dir", "out")
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, "summary.csv")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _write(path, buf.getvalue())
    return path, rows


def estimate_c1(T, battery, box_length=80.0, n=512, n_time_samples=256):
    """Measure the linear-estimate constant over a battery of initial-data specs."""
    g = GridSpec(box_length, n)
    try:
        rep = verify_linear_estimates(g, T, battery, n_time_samples)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return asdict(rep)
