"""Energy functionals, identity residuals, decay fits and observability ratios.

Conventions (all integrals over the periodic box):

* ``l2_sq = int u^2`` and ``e0 = l2_sq / 2``.
* ``e_sec3 = ||u||_H1^2 - int u^3 / 3`` and ``k_sec3 = 2 ||u||_H1^2 - int u^3``;
  for constant damping mu these obey ``d e_sec3/dt = -mu k_sec3``.
* ``e1 = ||u||_H1^2 / 2 - int u^3 / 3`` and ``j_val = ||u||_H1^2 / 2 - ||u||_L3^3 / 3``.
* ``diss_cum`` is the running trapezoid of ``int a u^2`` (no factor 2), so that
  ``l2_sq(t) - l2_sq(0) + 2 diss_cum(t) = 0`` in the continuum.
* ``hamiltonian_lhs = H(t) - int int a u^3 - int int a_xx u^2 + 2 int int a u_x^2``
  with ``H = int (u_x^2 - u^3/3)``; it stays equal to ``H(0)``.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import derivative_samples, integrate

ENERGY_COLUMNS = ("t", "l2_sq", "e0", "h1_sq", "int_u3", "l3_cubed", "e_sec3", "k_sec3",
                  "e1", "j_val", "diss_cum", "res_dissipation", "res_hamiltonian")


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    l2_sq: float
    e0: float
    h1_sq: float
    int_u3: float
    l3_cubed: float
    e_sec3: float
    k_sec3: float
    e1: float
    j_val: float
    diss_cum: float
    hamiltonian_lhs: float
    res_dissipation: float
    res_hamiltonian: float
    # instantaneous damping integrals and their running time integrals
    a_u2: float = 0.0
    a_u3: float = 0.0
    axx_u2: float = 0.0
    a_ux2: float = 0.0
    cum_a_u3: float = 0.0
    cum_axx_u2: float = 0.0
    cum_a_ux2: float = 0.0
    # initial values the residuals refer to
    l2_sq_init: float = 0.0
    hamiltonian_init: float = 0.0

    @property
    def hamiltonian(self):
        return self.h1_sq - self.l2_sq - self.int_u3 / 3.0

    def row(self):
        return [getattr(self, c) for c in ENERGY_COLUMNS]

    def as_dict(self):
        return asdict(self)


def record(f, a, prev=None):
    """Evaluate every functional of ``f``; running integrals continue from ``prev``."""
    if a.grid != f.grid:
        raise ValueError("field and damping live on different grids")
    g, u = f.grid, f.samples
    ux = derivative_samples(g, u, 1)
    u2, ux2 = u * u, ux * ux
    u3 = u2 * u
    l2_sq = integrate(g, u2)
    h1_sq = l2_sq + integrate(g, ux2)
    int_u3 = integrate(g, u3)
    l3_cubed = integrate(g, np.abs(u3))
    a_u2 = integrate(g, a.a * u2)
    a_u3 = integrate(g, a.a * u3)
    # band-limited a_xx: consistent with the coefficient the solver integrates
    axx_u2 = integrate(g, a.a_xx_spectral * u2)
    a_ux2 = integrate(g, a.a * ux2)
    ham = h1_sq - l2_sq - int_u3 / 3.0

    if prev is None:
        diss = cum3 = cumxx = cumx2 = 0.0
        l2_init, ham_init = l2_sq, ham
    else:
        h = f.time - prev.t
        if not h > 0:
            raise ValueError("records must be strictly increasing in time")
        diss = prev.diss_cum + 0.5 * h * (prev.a_u2 + a_u2)
        cum3 = prev.cum_a_u3 + 0.5 * h * (prev.a_u3 + a_u3)
        cumxx = prev.cum_axx_u2 + 0.5 * h * (prev.axx_u2 + axx_u2)
        cumx2 = prev.cum_a_ux2 + 0.5 * h * (prev.a_ux2 + a_ux2)
        l2_init, ham_init = prev.l2_sq_init, prev.hamiltonian_init

    ham_lhs = ham - cum3 - cumxx + 2.0 * cumx2
    res_d = (l2_sq - l2_init + 2.0 * diss) / l2_init if l2_init > 0 else l2_sq + 2.0 * diss
    res_h = (ham_lhs - ham_init) / max(1.0, abs(ham_init))
    return EnergyRecord(
        t=float(f.time), l2_sq=l2_sq, e0=0.5 * l2_sq, h1_sq=h1_sq, int_u3=int_u3,
        l3_cubed=l3_cubed, e_sec3=h1_sq - int_u3 / 3.0, k_sec3=2.0 * h1_sq - int_u3,
        e1=0.5 * h1_sq - int_u3 / 3.0, j_val=0.5 * h1_sq - l3_cubed / 3.0,
        diss_cum=diss, hamiltonian_lhs=ham_lhs, res_dissipation=res_d, res_hamiltonian=res_h,
        a_u2=a_u2, a_u3=a_u3, axx_u2=axx_u2, a_ux2=a_ux2,
        cum_a_u3=cum3, cum_axx_u2=cumxx, cum_a_ux2=cumx2,
        l2_sq_init=l2_init, hamiltonian_init=ham_init,
    )


def _records(series):
    recs = getattr(series, "records", series)
    if not recs:
        raise ValueError("empty series")
    return recs


def dissipation_residual(series):
    """Max relative defect of ``int u^2 = ||u0||^2 - 2 int_0^t int a u^2``."""
    return max(abs(r.res_dissipation) for r in _records(series))


def hamiltonian_residual(series, a=None):
    """Max relative defect of the damped Hamiltonian balance, normalized by max(1, |H(0)|).

    ``a`` is accepted for symmetry with the other diagnostics; the damping
    integrals it enters are already accumulated in each record.
    """
    return max(abs(r.res_hamiltonian) for r in _records(series))


@dataclass
class DecayFit:
    omega: float
    c_pref: float
    window: tuple
    rms_residual: float
    n_points: int


def fit_decay(series, window=None, quantity="e0"):
    """Least-squares fit ``log e0 = log c - omega t`` over records in ``window``."""
    recs = _records(series)
    t = np.array([r.t for r in recs])
    y = np.array([getattr(r, quantity) for r in recs])
    if window is None:
        window = (t[0], t[-1])
    t_a, t_b = float(window[0]), float(window[1])
    if not t_a < t_b:
        raise ValueError(f"window must satisfy t_a < t_b, got {window}")
    sel = (t >= t_a - 1e-12) & (t <= t_b + 1e-12)
    if sel.sum() < 2:
        raise ValueError("fewer than two records inside the fit window")
    if np.any(y[sel] <= 0):
        raise ValueError(f"{quantity} must be positive throughout the fit window")
    ts, ly = t[sel], np.log(y[sel])
    slope, intercept = np.polyfit(ts, ly, 1)
    resid = ly - (slope * ts + intercept)
    return DecayFit(
        omega=float(-slope),
        c_pref=float(math.exp(intercept)),
        window=(t_a, t_b),
        rms_residual=float(np.sqrt(np.mean(resid ** 2))),
        n_points=int(sel.sum()),
    )


def observability_ratio(series, a, r1, T, t0=1.0):
    """Empirical observability constant.

    ``int_0^T int_{x <= r1} u^2 dx dt`` divided by ``int_0^T int a u^2 dx dt``;
    needs the series to keep one field per record (``SolverConfig.keep_fields``).
    """
    if not T > t0:
        raise ValueError(f"observation time T={T} must exceed T0={t0}")
    fields_ = getattr(series, "fields", None)
    if not fields_:
        raise ValueError("series carries no per-record fields; rerun with keep_fields=True")
    if fields_[-1].time < T - 1e-9:
        raise ValueError(f"series ends at t={fields_[-1].time}, before T={T}")
    g = a.grid
    inside = g.x <= r1
    ts, num, den = [], [], []
    for f in fields_:
        if f.time > T + 1e-9:
            break
        u2 = f.samples ** 2
        ts.append(f.time)
        num.append(integrate(g, u2 * inside))
        den.append(integrate(g, a.a * u2))
    numerator = np.trapezoid(num, ts)
    denominator = np.trapezoid(den, ts)
    if denominator <= 0:
        raise ValueError("solution never reaches the damped region (zero denominator)")
    return float(numerator / denominator)
