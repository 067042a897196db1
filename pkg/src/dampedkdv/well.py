"""Potential-well thresholds for the fully damped equation u_t + u u_x + u_xxx + mu u = 0.

The sharp constant ``k0 = sup (||u||_L3^3 / 3) / ||u||_H1^3`` fixes the well
function ``f(xi) = xi^2/2 - k0 xi^3``, its maximiser ``xi1 = 1/(3 k0)`` and the
depth ``d = f(xi1) = xi1^2/6``.  Data starting outside the well with energy
below ``d`` keep their H^1 norm above ``xi2 > xi1`` as long as the energy
``E = ||u||_H1^2 - int u^3 / 3`` does not increase.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .grid import Field, derivative_samples, norms
from .integrator import SolverConfig, simulate
from .profiles import make_damping, zero_damping

log = logging.getLogger(__name__)


def cubic_ratio(f):
    """``(||u||_L3^3 / 3) / ||u||_H1^3``; invariant under ``u -> lambda u``."""
    nrm = norms(f)
    if nrm["h1_sq"] == 0:
        raise ValueError("ratio undefined for the zero field")
    return nrm["l3_cubed"] / 3.0 / nrm["h1_sq"] ** 1.5


def sech2_family_ratio(width):
    """Closed form of the ratio for ``sech^2(x/width)`` on the real line.

    Uses int sech^6 = 16 w/15, int sech^4 = 4 w/3 and int (d/dx sech^2)^2 = 16/(15 w).
    """
    w = float(width)
    return (16.0 * w / 45.0) / (4.0 * w / 3.0 + 16.0 / (15.0 * w)) ** 1.5


def sech2_ratio_on_grid(grid, width):
    return cubic_ratio(Field(grid, 1.0 / np.cosh(grid.x / width) ** 2))


@dataclass
class PotentialWellConstants:
    k0: float
    xi1: float
    d: float
    maximizer: Field = field(repr=False)
    method_log: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_k0(cls, k0, maximizer=None, method_log=None):
        if not k0 > 0:
            raise ValueError("k0 must be positive")
        xi1 = 1.0 / (3.0 * k0)
        return cls(k0, xi1, xi1 * xi1 / 6.0, maximizer, method_log or {})

    @property
    def sobolev_l3_lower(self):
        """Lower bound ``(3 k0)^(1/3)`` for the sharp H^1 -> L^3 embedding constant."""
        return (3.0 * self.k0) ** (1.0 / 3.0)


class _RatioObjective:
    """``-log`` of the cubic ratio over band-limited fields, H^1-preconditioned.

    Variables ``w`` are samples; the field is ``u = P (1 - d_xx)^(-1/2) w`` with
    ``P`` the two-thirds band projection, so gradients are projected onto the band.
    """

    def __init__(self, grid):
        self.grid = grid
        k = grid.rk
        self.filter = grid.dealias_mask() / np.sqrt(1.0 + k * k)

    def field_samples(self, w):
        return np.fft.irfft(self.filter * np.fft.rfft(w), n=self.grid.n)

    def __call__(self, w):
        g = self.grid
        u = self.field_samples(w)
        ux = derivative_samples(g, u, 1)
        l3 = g.dx * np.sum(np.abs(u) ** 3)
        h1 = g.dx * np.sum(u * u + ux * ux)
        if l3 <= 0 or h1 <= 0:
            return np.inf, np.zeros_like(w)
        value = -math.log(l3 / 3.0) + 1.5 * math.log(h1)
        grad_l3 = 3.0 * g.dx * np.abs(u) * u
        grad_h1 = 2.0 * g.dx * (u - derivative_samples(g, ux, 1))
        grad_u = -grad_l3 / l3 + 1.5 * grad_h1 / h1
        return value, np.fft.irfft(self.filter * np.fft.rfft(grad_u), n=g.n)

    def initial_w(self, u):
        """Preimage of band-limited samples ``u`` under ``field_samples``."""
        uh = np.fft.rfft(u)
        inv = np.zeros_like(self.filter)
        band = self.filter > 0
        inv[band] = 1.0 / self.filter[band]
        return np.fft.irfft(inv * uh * band, n=self.grid.n)


def _ascend(objective, w0, tol, max_iter):
    res = minimize(objective, w0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "gtol": tol, "ftol": 1e-15, "maxcor": 30})
    u = objective.field_samples(res.x)
    return u, res


def _normalize_maximizer(grid, u):
    """Sign-normalize to positive ``int u^3``, centre the peak, scale to unit H^1 norm."""
    f = Field(grid, u)
    if norms(f)["int_u3"] < 0:
        u = -u
    u = np.roll(u, grid.n // 2 - int(np.argmax(u)))
    f = Field(grid, u)
    return f * (1.0 / math.sqrt(norms(f)["h1_sq"]))


def estimate_k0(grid, restarts=2, tol=1e-10, max_iter=2000, workers=1):
    """Estimate the sharp constant k0 on ``grid``.

    Stage one scans the dilated family ``sech^2(x/s)`` and refines the best
    width.  Stage two runs L-BFGS ascent of the ratio over band-limited fields,
    from the stage-one optimum and from ``restarts`` seeded random fields.  The
    best value wins; ties go to the earliest start.
    """
    if grid.n < 256 or grid.box_length < 40:
        raise ValueError("grid must resolve sech^2 profiles (n >= 256, box_length >= 40)")
    widths = np.geomspace(0.25, grid.box_length / 10.0, 41)
    scan = [sech2_ratio_on_grid(grid, s) for s in widths]
    i = int(np.argmax(scan))
    lo, hi = widths[max(i - 1, 0)], widths[min(i + 1, len(widths) - 1)]
    best_s = minimize_scalar(lambda s: -sech2_ratio_on_grid(grid, s), bounds=(lo, hi),
                             method="bounded", options={"xatol": 1e-10}).x
    stage1 = sech2_ratio_on_grid(grid, best_s)

    objective = _RatioObjective(grid)
    starts = [("sech2", objective.initial_w(1.0 / np.cosh(grid.x / best_s) ** 2))]
    for seed in range(restarts):
        rng = np.random.default_rng(seed)
        band = min(grid.n // 3, 24)
        coeffs = np.zeros(grid.n // 2 + 1, dtype=complex)
        coeffs[:band + 1] = rng.standard_normal(band + 1) + 1j * rng.standard_normal(band + 1)
        coeffs[0] = coeffs[0].real
        starts.append((f"seed{seed}", np.fft.irfft(coeffs, n=grid.n)))

    def run(start):
        name, w0 = start
        u, res = _ascend(objective, w0, tol, max_iter)
        return name, u, float(np.exp(-res.fun)), res

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]

    trace = {name: {"ratio": value, "iterations": int(res.nit), "success": bool(res.success),
                    "message": str(res.message)} for name, _, value, res in results}
    best_name, best_u, best_val, _ = max(results, key=lambda r: r[2])
    if best_val >= stage1:
        k0, maximizer = best_val, _normalize_maximizer(grid, best_u)
    else:
        k0 = stage1
        maximizer = _normalize_maximizer(grid, 1.0 / np.cosh(grid.x / best_s) ** 2)
        best_name = "sech2-scan"

    edge = float(max(abs(maximizer.samples[0]), abs(maximizer.samples[-1])))
    tail = edge / float(np.max(np.abs(maximizer.samples)))
    if tail > 1e-10:
        log.warning("maximizer tail %.2e at the box edge exceeds 1e-10; enlarge the box", tail)
    method_log = {"stage1_width": float(best_s), "stage1_ratio": stage1, "stage2": trace,
                  "best_start": best_name, "edge_tail": tail,
                  "grid": {"box_length": grid.box_length, "n": grid.n}}
    if not any(r[3].success for r in results):
        log.warning("no optimizer start reported convergence: %s", trace)
    return PotentialWellConstants.from_k0(k0, maximizer, method_log)


def f_eval(xi, k0):
    """Well function ``xi^2/2 - k0 xi^3``."""
    if np.any(np.asarray(xi) < 0):
        raise ValueError("xi must be nonnegative")
    return 0.5 * xi * xi - k0 * xi ** 3


def solve_xi2(e_initial, k0):
    """Roots ``xi2' < xi1 < xi2`` of ``f(xi) = e_initial``; returns ``(xi2, xi2_lower)``."""
    xi1 = 1.0 / (3.0 * k0)
    d = xi1 * xi1 / 6.0
    if e_initial < 0:
        raise ValueError("e_initial must be nonnegative")
    if e_initial > d:
        raise ValueError(f"e_initial={e_initial} exceeds the well depth d={d}: no crossing")
    if e_initial == d:
        return xi1, xi1
    g = lambda xi: 0.5 * xi * xi - k0 * xi ** 3 - e_initial  # noqa: E731
    upper = brentq(g, xi1, 1.0 / (2.0 * k0) + 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    lower = 0.0 if e_initial == 0 else brentq(g, 0.0, xi1, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return upper, lower


class NoSupercriticalDataError(ValueError):
    pass


def construct_supercritical(grid, consts, margin=0.05):
    """Scale the stored maximiser so that ``||u0||_H1 > xi1`` and ``E(0) < d (1 - margin)``.

    Along the ray ``lambda u*`` (unit H^1 norm) the energy is
    ``E(lambda) = lambda^2 - q lambda^3`` with ``q = int u*^3 / 3``; the smallest
    admissible ``lambda`` lies past the peak of ``E``.
    """
    if consts.maximizer is None:
        raise ValueError("constants carry no maximiser")
    if not 0 <= margin < 1:
        raise ValueError("margin must lie in [0, 1)")
    unit = consts.maximizer.with_samples(consts.maximizer.samples)
    unit = unit * (1.0 / math.sqrt(norms(unit)["h1_sq"]))
    q = norms(unit)["int_u3"] / 3.0
    target = consts.d * (1.0 - margin)
    if q <= 0:
        raise NoSupercriticalDataError("maximiser has nonpositive int u^3; energy never drops below d")
    energy = lambda lam: lam * lam - q * lam ** 3  # noqa: E731
    lam_peak = 2.0 / (3.0 * q)
    start = max(consts.xi1, lam_peak)
    if energy(start) < target:
        lam = start * (1.0 + 1e-9)
    else:
        hi = start
        while energy(hi) >= target:
            hi *= 2.0
        lam = brentq(lambda s: energy(s) - target, start, hi, xtol=1e-14)
        lam *= 1.0 + 1e-9
    u0 = unit * lam
    nrm = norms(u0)
    e0 = nrm["h1_sq"] - nrm["int_u3"] / 3.0
    if not (math.sqrt(nrm["h1_sq"]) > consts.xi1 and e0 < consts.d):
        raise NoSupercriticalDataError(
            f"ray search failed: ||u0||_H1={math.sqrt(nrm['h1_sq']):.6g}, E(0)={e0:.6g}, "
            f"xi1={consts.xi1:.6g}, d={consts.d:.6g}")
    return u0


@dataclass
class VitillaroReport:
    preconditions_met: dict
    xi2: float = float("nan")
    min_h1_over_run: float = float("nan")
    l3_floor: float = float("nan")
    min_l3_over_run: float = float("nan")
    k_nonnegative_throughout: bool = False
    first_k_negative_time: float = float("nan")
    k_negative_fraction: float = 0.0
    energy_nonincreasing_while_k_nonneg: bool = True
    h1_bound_holds: bool = False
    l3_bound_holds: bool = False
    verdict: str = "no_verdict"
    e_initial: float = float("nan")


def vitillaro_experiment(u0, mu, cfg, consts, slack=0.02, energy_tol=1e-8):
    """Run the fully damped equation and check the non-decay conclusions.

    ``verdict`` is ``"pass"``/``"fail"`` when the hypotheses (including
    ``K(t) >= 0`` throughout) hold, ``"out_of_hypothesis"`` when ``K`` turns
    negative, and ``"no_verdict"`` when the initial data fail the gate.
    """
    nrm = norms(u0)
    e_init = nrm["h1_sq"] - nrm["int_u3"] / 3.0
    pre = {"h1_above_xi1": math.sqrt(nrm["h1_sq"]) > consts.xi1, "energy_below_d": e_init < consts.d}
    report = VitillaroReport(preconditions_met=pre, e_initial=e_init)
    if not all(pre.values()):
        return report

    a = make_damping(u0.grid, "constant", mu) if mu > 0 else zero_damping(u0.grid)
    series = simulate(u0, a, cfg, echo={"experiment": "vitillaro", "mu": mu})
    xi2, _ = solve_xi2(max(e_init, 0.0), consts.k0)
    h1 = np.sqrt(series.column("h1_sq"))
    l3 = np.cbrt(series.column("l3_cubed"))
    k = series.column("k_sec3")
    e = series.column("e_sec3")
    t = series.times

    report.xi2 = xi2
    report.min_h1_over_run = float(h1.min())
    report.l3_floor = consts.k0 ** (1.0 / 3.0) * xi2
    report.min_l3_over_run = float(l3.min())
    negative = k < 0
    report.k_nonnegative_throughout = not bool(negative.any())
    if negative.any():
        report.first_k_negative_time = float(t[negative][0])
        report.k_negative_fraction = float(negative.mean())
    ok = k[:-1] >= 0
    report.energy_nonincreasing_while_k_nonneg = bool(np.all(np.diff(e)[ok] <= energy_tol))
    report.h1_bound_holds = report.min_h1_over_run >= (1.0 - slack) * xi2
    report.l3_bound_holds = report.min_l3_over_run >= (1.0 - slack) * report.l3_floor
    if not report.k_nonnegative_throughout:
        report.verdict = "out_of_hypothesis"
    elif report.h1_bound_holds and report.l3_bound_holds and report.energy_nonincreasing_while_k_nonneg:
        report.verdict = "pass"
    else:
        report.verdict = "fail"
    return report


def default_vitillaro_config(t_end=5.0, dt=1e-3):
    return SolverConfig(dt=dt, t_end=t_end, record_stride=10)
