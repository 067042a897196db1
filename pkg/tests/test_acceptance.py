"""Acceptance criteria, one test each.

Every test emits a single ``PASS``/``FAIL`` line with the measured numbers;
the lines are collected into an "acceptance criteria" section at the end of
the pytest report.  ``python3 tests/test_acceptance.py`` runs just these.
"""

import math
import sys
import tempfile
import time

import numpy as np
import pytest

from dampedkdv.airy import airy_propagate
from dampedkdv.energy import dissipation_residual, fit_decay, hamiltonian_residual
from dampedkdv.grid import Field, make_grid, norms, spectral_derivative
from dampedkdv.integrator import SolverConfig, evolve, simulate
from dampedkdv.mild import kpv_norms, picard_solve, t_kappa
from dampedkdv.profiles import gaussian, make_damping, random_h1, soliton, zero_damping
from dampedkdv.scenario import run_sweep
from dampedkdv.well import (construct_supercritical, default_vitillaro_config, estimate_k0,
                            f_eval, sech2_family_ratio, solve_xi2, vitillaro_experiment)


def _report(log, number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
    log.append(line)
    print(line)
    assert ok, line


def _h1_diff(f, g):
    return math.sqrt(norms(Field(f.grid, f.samples - g.samples))["h1_sq"])


def test_1_soliton_fidelity(acceptance_log):
    g = make_grid(80.0, 512)
    start = time.perf_counter()
    out = evolve(soliton(g, 1.0), zero_damping(g), 1.0, 1e-3)
    elapsed = time.perf_counter() - start
    err = float(np.max(np.abs(out.samples - soliton(g, 1.0, 1.0).samples)))
    _report(acceptance_log, 1, "soliton fidelity", err < 1e-6 and elapsed < 30.0,
            f"sup error {err:.3e} (< 1e-6), runtime {elapsed:.2f} s (< 30 s)")


def test_2_exact_dissipation_rate(acceptance_log):
    g = make_grid(80.0, 512)
    data = {"gaussian": gaussian(g, 1.0, 1.0), "random": random_h1(g, 0, 1.5, 24)}
    worst = 0.0
    details = []
    for mu in (0.01, 0.05, 0.1, 0.5):
        for name, u0 in data.items():
            s = simulate(u0, make_damping(g, "constant", mu),
                         SolverConfig(dt=2e-3, t_end=5.0, record_stride=25))
            rel = abs(fit_decay(s).omega - 2 * mu) / (2 * mu)
            worst = max(worst, rel)
        details.append(f"mu={mu}")
    _report(acceptance_log, 2, "exact dissipation rate", worst < 1e-3,
            f"max |omega - 2 mu| / 2 mu = {worst:.3e} (< 1e-3) over {', '.join(details)}, 2 data each")


def test_3_identity_residuals(acceptance_log):
    g = make_grid(80.0, 512)
    dampings = {"none": zero_damping(g), "constant": make_damping(g, "constant", 0.1),
                "right_step": make_damping(g, "right_step", 1.0, 10.0, 4.0),
                "sponge": make_damping(g, "sponge", 1.0, 30.0, 6.0)}
    data = {"soliton": soliton(g, 1.0, -10.0), "gaussian": gaussian(g, 1.0, 1.0),
            "random": random_h1(g, 2, 2.0, 24)}
    worst_d = worst_h = 0.0
    where = ("", "")
    for dname, a in dampings.items():
        for uname, u0 in data.items():
            # the running damping integral is a trapezoid over records, so record every step
            s = simulate(u0, a, SolverConfig(dt=1e-3, t_end=2.0))
            rd, rh = dissipation_residual(s), hamiltonian_residual(s)
            if rh > worst_h:
                where = (dname, uname)
            worst_d, worst_h = max(worst_d, rd), max(worst_h, rh)
    _report(acceptance_log, 3, "identity residuals", worst_d < 1e-6 and worst_h < 1e-4,
            f"max dissipation {worst_d:.2e} (< 1e-6), max hamiltonian {worst_h:.2e} (< 1e-4, "
            f"worst {where[0]}/{where[1]}) over 12 runs to t=2")


def test_4_localized_damping_decay(acceptance_log):
    g = make_grid(80.0, 512)
    a = make_damping(g, "sponge", 1.0, 30.0, 6.0)
    s = simulate(gaussian(g, 1.0, 1.0), a, SolverConfig(dt=0.005, t_end=40.0))
    fit = fit_decay(s, window=(10.0, 40.0))
    rise = float(np.max(np.diff(s.column("e0"))))
    ok = fit.omega > 0 and fit.rms_residual < 0.05 and rise <= 1e-10
    _report(acceptance_log, 4, "localized damping decay", ok,
            f"omega {fit.omega:.4e} (> 0), rms {fit.rms_residual:.3e} (< 0.05), "
            f"largest per-step E0 increase {rise:.2e} (<= 1e-10)")


def test_5_mild_classical_equivalence(acceptance_log):
    g = make_grid(80.0, 512)
    u0 = soliton(g, 1.0)
    a = make_damping(g, "right_step", 1.0, 10.0, 4.0)
    T = 0.05
    ref = evolve(u0, a, T, 1e-5)
    diffs = {}
    for n_t in (64, 128, 256):
        res = picard_solve(u0, a, T, tol=1e-8, n_t=n_t)
        diffs[n_t] = _h1_diff(res.trajectory.slices[-1], ref)
    ratios = [diffs[64] / diffs[128], diffs[128] / diffs[256]]
    ok = diffs[64] < 1e-5 and all(3.0 < r < 5.0 for r in ratios)
    _report(acceptance_log, 5, "mild/classical equivalence", ok,
            f"H1 gap {diffs[64]:.3e} at n_t=64 (< 1e-5); doubling ratios "
            f"{ratios[0]:.2f}, {ratios[1]:.2f} (trapezoid order: about 4)")


def test_6_contraction_window(acceptance_log):
    rep = t_kappa(0.0, 1.0, 2.0)
    exact = 1 / (8 * math.sqrt(2))
    ok = abs(rep.t_kappa - exact) < 1e-6 and 1 - 1e-5 <= rep.lhs_at_t < 1
    _report(acceptance_log, 6, "contraction window", ok,
            f"t_kappa {rep.t_kappa:.10f} vs 1/(8 sqrt 2) = {exact:.10f}, LHS {rep.lhs_at_t:.8f} in [1-1e-5, 1)")


def test_7_potential_well(acceptance_log):
    c512 = estimate_k0(make_grid(80.0, 512))
    c1024 = estimate_k0(make_grid(80.0, 1024))
    scan = sech2_family_ratio(2.0)
    upper, _ = solve_xi2(0.0, c512.k0)
    checks = {
        "grid stability": abs(c512.k0 - c1024.k0) < 1e-4,
        "above sech2 scan": all(c.k0 >= c.method_log["stage1_ratio"] for c in (c512, c1024))
        and min(c512.k0, c1024.k0) >= scan * (1 - 4 * np.finfo(float).eps),
        "d = xi1^2/6": abs(c512.d - c512.xi1 ** 2 / 6) < 1e-12,
        "f(xi1) = d": abs(f_eval(c512.xi1, c512.k0) - c512.d) < 1e-12,
        "solve_xi2(0) = 1.5 xi1": abs(upper - 1.5 * c512.xi1) < 1e-10,
    }
    failed = [k for k, v in checks.items() if not v]
    _report(acceptance_log, 7, "potential well", not failed,
            f"k0 {c512.k0:.17g} (n=512), {c1024.k0:.17g} (n=1024), sech2 closed form {scan:.17g}, "
            f"xi1 {c512.xi1:.6f}, d {c512.d:.6f}" + (f"; failed {failed}" if failed else ""))


def test_8_vitillaro_consistency(acceptance_log):
    consts = estimate_k0(make_grid(80.0, 512))
    u0 = construct_supercritical(consts.maximizer.grid, consts)
    rep = vitillaro_experiment(u0, 0.01, default_vitillaro_config(t_end=5.0), consts)
    bounds = (f"min H1 {rep.min_h1_over_run:.4f} vs 0.98 xi2 = {0.98 * rep.xi2:.4f}, "
              f"min L3 {rep.min_l3_over_run:.4f} vs 0.98 k0^(1/3) xi2 = {0.98 * rep.l3_floor:.4f}")
    if rep.verdict == "out_of_hypothesis":
        ok = all(rep.preconditions_met.values())
        detail = (f"out of hypothesis (K < 0 from t={rep.first_k_negative_time:.3g}, "
                  f"{100 * rep.k_negative_fraction:.0f}% of records); reported, not a failure; {bounds}")
    else:
        ok = rep.verdict == "pass"
        detail = f"verdict {rep.verdict}; {bounds}"
    _report(acceptance_log, 8, "Vitillaro consistency", ok, detail)


def _property_suite():
    g = make_grid(80.0, 256)
    rng = np.random.default_rng(12345)
    failures = []
    for _ in range(20):
        f = random_h1(g, int(rng.integers(2 ** 31)), 1.5, 40)
        uh = np.fft.fft(f.samples)
        if abs(g.dx * np.sum(f.samples ** 2) - g.box_length / g.n ** 2 * np.sum(abs(uh) ** 2)) > 1e-12 * norms(f)["l2_sq"]:
            failures.append("parseval")
        if np.max(np.abs(np.fft.ifft(uh).real - f.samples)) > 1e-14:
            failures.append("round-trip")
        s, t = rng.uniform(-10, 10, 2)
        if np.max(np.abs(airy_propagate(airy_propagate(f, s), t).samples - airy_propagate(f, s + t).samples)) > 1e-11:
            failures.append("group law")
        if abs(norms(airy_propagate(f, t))["h1_sq"] / norms(f)["h1_sq"] - 1) > 1e-12:
            failures.append("unitarity")
        d1 = airy_propagate(spectral_derivative(f, 1), t).samples
        d2 = spectral_derivative(airy_propagate(f, t), 1).samples
        if np.max(np.abs(d1 - d2)) > 1e-11:
            failures.append("commutation")
        traj = picard_solve(f * 0.1, zero_damping(g), 0.02, n_t=16).trajectory
        plain, scaled = kpv_norms(traj), kpv_norms(3.0 * traj)
        if abs(scaled.big_gamma - 3 * plain.big_gamma) > 1e-12 * scaled.big_gamma:
            failures.append("kpv homogeneity")
        if not np.array_equal(random_h1(g, 77, 1.0, 30).samples, random_h1(g, 77, 1.0, 30).samples):
            failures.append("seeded data")

    u0 = gaussian(g, 2.0, 1.5)
    a = make_damping(g, "constant", 0.5)
    ref = evolve(u0, a, 1.0, 2.5e-4).samples
    errs = [np.max(np.abs(evolve(u0, a, 1.0, dt).samples - ref)) for dt in (0.02, 0.01, 0.005)]
    order = float(np.log2(errs[1] / errs[2]))
    if not order > 3.7:
        failures.append(f"convergence order {order:.2f}")

    with tempfile.TemporaryDirectory() as tmp:
        base = {"scenario_id": "p", "output_dir": tmp,
                "grid": {"box_length": 80, "n": 256},
                "initial_data": {"kind": "random_h1", "seed": 3, "target_h1": 1.0, "band": 20},
                "damping": {"kind": "constant", "alpha0": 0.1},
                "solver": {"dt": 0.01, "t_end": 0.5, "record_stride": 10}}
        sweep = {"base": base, "axes": {"seed": [1, 2], "mu": [0.05, 0.1]}}
        path, _ = run_sweep(sweep)
        first = open(path, "rb").read()
        path, _ = run_sweep(sweep)
        if open(path, "rb").read() != first:
            failures.append("sweep determinism")
    return failures, order


def test_9_property_suites(acceptance_log):
    start = time.perf_counter()
    failures, order = _property_suite()
    elapsed = time.perf_counter() - start
    _report(acceptance_log, 9, "property suites", not failures and elapsed < 300,
            f"Parseval, round-trip, group law, unitarity, commutation, kpv homogeneity, seeded data "
            f"over 20 draws; IF-RK4 order {order:.2f}; sweep determinism; {elapsed:.1f} s (< 300 s)"
            + (f"; failed {sorted(set(failures))}" if failures else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
