"""Integrating-factor RK4 for u_t + u u_x + u_xxx + a(x) u = 0 on a periodic box.

Dispersion is integrated exactly through the Airy multiplier; the conservative
nonlinearity ``-(u^2)_x / 2`` (two-thirds dealiased) and the damping ``-a u``
are advanced by classical RK4 in the twisted variable.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .airy import airy_multiplier
from .energy import record
from .grid import Field


class BlowUpError(RuntimeError):
    """Non-finite values appeared; carries the last good time and the partial series."""

    def __init__(self, message, last_good_time, series=None):
        super().__init__(message)
        self.last_good_time = last_good_time
        self.series = series


@dataclass
class SolverConfig:
    dt: float
    t_end: float
    record_stride: int = 1
    dealias_on: bool = True
    snapshot_times: list = field(default_factory=list)
    nonlinear: bool = True
    keep_fields: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer, got {self.record_stride}")
        self.record_stride = int(self.record_stride)

    def n_steps(self):
        return int(math.ceil(self.t_end / self.dt - 1e-9)) if self.t_end > 0 else 0

    def as_dict(self):
        return asdict(self)


@dataclass
class TimeSeries:
    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    @property
    def times(self):
        return np.array([r.t for r in self.records])

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


class _Rhs:
    """Nonstiff right-hand side in Fourier space, with cached symbols."""

    def __init__(self, a, dealias_on=True, nonlinear=True):
        g = a.grid
        self.n = g.n
        self.a = a.a
        self.has_damping = bool(np.any(a.a != 0.0))
        sym = -0.5 * g.odd_symbol(1)
        if dealias_on:
            sym = sym * g.dealias_mask()
        self.flux_symbol = sym
        self.nonlinear = nonlinear

    def __call__(self, uh):
        u = np.fft.irfft(uh, n=self.n)
        out = np.zeros_like(uh)
        if self.nonlinear:
            out += self.flux_symbol * np.fft.rfft(u * u)
        if self.has_damping:
            out -= np.fft.rfft(self.a * u)
        return out


def rhs_nonstiff(f, a, dealias_on=True):
    """``-dealias((u^2)_x / 2) - a u`` as a Field."""
    if f.grid != a.grid:
        raise ValueError("field and damping live on different grids")
    rhs = _Rhs(a, dealias_on)
    return f.with_samples(np.fft.irfft(rhs(np.fft.rfft(f.samples)), n=f.grid.n))


class _Stepper:
    def __init__(self, a, dt, dealias_on=True, nonlinear=True):
        self.rhs = _Rhs(a, dealias_on, nonlinear)
        self.dt = dt
        self.e_half = airy_multiplier(a.grid, 0.5 * dt)
        self.e_full = airy_multiplier(a.grid, dt)

    def __call__(self, uh):
        dt, e2, e1, N = self.dt, self.e_half, self.e_full, self.rhs
        k1 = N(uh)
        k2 = N(e2 * (uh + 0.5 * dt * k1))
        k3 = N(e2 * uh + 0.5 * dt * k2)
        k4 = N(e1 * uh + dt * e2 * k3)
        return e1 * uh + (dt / 6.0) * (e1 * k1 + 2.0 * e2 * (k2 + k3) + k4)


def step(f, a, dt, dealias_on=True, nonlinear=True):
    """One integrating-factor RK4 step of size ``dt``."""
    if f.grid != a.grid:
        raise ValueError("field and damping live on different grids")
    uh = _Stepper(a, dt, dealias_on, nonlinear)(np.fft.rfft(f.samples))
    u = np.fft.irfft(uh, n=f.grid.n)
    if not np.all(np.isfinite(u)):
        raise BlowUpError(f"non-finite values after step from t={f.time}", f.time)
    return Field(f.grid, u, f.time + dt)


def cfl_suggest(grid, u0=None, safety=0.5, u_floor=1.0):
    """Advective step bound ``safety * dx / max(max|u0|, u_floor)``.

    Dispersion is exact under the integrating factor, so only the transport
    speed of the nonlinearity limits the step.
    """
    umax = u_floor if u0 is None else max(float(np.max(np.abs(u0.samples))), u_floor)
    return safety * grid.dx / umax


def simulate(u0, a, cfg, echo=None):
    """March ``u0`` to ``cfg.t_end``.

    The step is shrunk to ``t_end / ceil(t_end / dt)`` so the run lands on
    ``t_end`` exactly.  A record is taken at t=0, every ``record_stride``
    steps and at the final step.  Raises ``BlowUpError`` (with the partial
    series attached) if the solution stops being finite.
    """
    if u0.grid != a.grid:
        raise ValueError("initial data and damping live on different grids")
    n_steps = cfg.n_steps()
    dt = cfg.t_end / n_steps if n_steps else cfg.dt
    series = TimeSeries(config_echo=dict(echo or {}, solver=cfg.as_dict(), dt_used=dt))
    g = u0.grid
    f = Field(g, u0.samples, 0.0)
    rec = record(f, a)
    series.records.append(rec)
    if cfg.keep_fields:
        series.fields.append(f)
    snap_steps = {}
    for ts in cfg.snapshot_times:
        snap_steps.setdefault(min(n_steps, max(0, int(round(ts / dt)))), ts)
    if 0 in snap_steps:
        series.snapshots.append(f)

    stepper = _Stepper(a, dt, cfg.dealias_on, cfg.nonlinear)
    uh = np.fft.rfft(f.samples)
    last_time = 0.0
    for i in range(1, n_steps + 1):
        uh = stepper(uh)
        t = i * dt
        want_record = i % cfg.record_stride == 0 or i == n_steps
        if not (want_record or i in snap_steps):
            continue
        u = np.fft.irfft(uh, n=g.n)
        if not np.all(np.isfinite(u)):
            raise BlowUpError(f"non-finite values at t={t}", last_time, series)
        f = Field(g, u, t)
        if want_record:
            rec = record(f, a, rec)
            series.records.append(rec)
            if cfg.keep_fields:
                series.fields.append(f)
        if i in snap_steps:
            series.snapshots.append(f)
        last_time = t
    return series


def final_field(series):
    """Last stored field of a run kept with ``keep_fields`` or a final snapshot."""
    if series.fields:
        return series.fields[-1]
    if series.snapshots:
        return series.snapshots[-1]
    raise ValueError("series stores no fields")


def evolve(u0, a, t_end, dt, dealias_on=True, nonlinear=True):
    """Return the field at ``t_end`` without diagnostics."""
    n_steps = SolverConfig(dt=dt, t_end=t_end).n_steps()
    if n_steps == 0:
        return Field(u0.grid, u0.samples, 0.0)
    stepper = _Stepper(a, t_end / n_steps, dealias_on, nonlinear)
    uh = np.fft.rfft(u0.samples)
    for i in range(n_steps):
        uh = stepper(uh)
        if i % 64 == 0 and not np.all(np.isfinite(uh)):
            raise BlowUpError("non-finite values", i * t_end / n_steps)
    u = np.fft.irfft(uh, n=u0.grid.n)
    if not np.all(np.isfinite(u)):
        raise BlowUpError("non-finite values", t_end)
    return Field(u0.grid, u, t_end)
