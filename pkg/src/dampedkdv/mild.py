"""Mild solutions: space-time norms, the Duhamel integral and Picard iteration.

A mild solution is a fixed point of

    Psi(u)(t) = S(t) u0 - int_0^t S(t - tau) (a u(tau) + (u(tau)^2)_x / 2) dtau

on a uniform time grid over ``[0, T]``.  Time integrals use the trapezoid rule.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .airy import airy_multipliers
from .grid import Field


class PicardDivergenceError(RuntimeError):
    def __init__(self, message, log):
        super().__init__(message)
        self.log = log


@dataclass
class Trajectory:
    """Samples of ``u(x, t)`` on uniform times ``0 = t_0 < ... < t_{n_t-1} = T``."""

    grid: object
    times: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ValueError("trajectory needs at least one time sample")
        if self.times[0] != 0.0:
            raise ValueError("trajectory times must start at 0")
        if len(self.times) > 1 and not np.allclose(np.diff(self.times), self.times[1] - self.times[0],
                                                   rtol=1e-10, atol=1e-14):
            raise ValueError("trajectory times must be uniform")
        if self.values.shape != (len(self.times), self.grid.n):
            raise ValueError(f"values must have shape {(len(self.times), self.grid.n)}, "
                             f"got {self.values.shape}")

    @classmethod
    def constant(cls, f, T, n_t):
        times = np.linspace(0.0, T, n_t)
        return cls(f.grid, times, np.tile(f.samples, (n_t, 1)))

    @property
    def T(self):
        return float(self.times[-1])

    @property
    def slices(self):
        return [Field(self.grid, v, t) for t, v in zip(self.times, self.values)]

    def __len__(self):
        return len(self.times)

    def _check(self, other):
        if other.grid != self.grid or not np.array_equal(other.times, self.times):
            raise ValueError("trajectories live on different grids or time samples")

    def __add__(self, other):
        self._check(other)
        return Trajectory(self.grid, self.times, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Trajectory(self.grid, self.times, self.values - other.values)

    def __mul__(self, scalar):
        return Trajectory(self.grid, self.times, float(scalar) * self.values)

    __rmul__ = __mul__


def _spectral(traj):
    return np.fft.rfft(traj.values, axis=-1)


def _physical(traj, vh):
    return np.fft.irfft(vh, n=traj.grid.n, axis=-1)


def _time_integral(values, times):
    if len(times) < 2:
        return 0.0
    return float(np.trapezoid(values, times))


@dataclass
class KpvNorms:
    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    big_gamma: float
    T: float


def kpv_norms(traj):
    """Discrete gamma_1..gamma_4 and their maximum over the window ``[0, T]``.

    gamma_4 is read as ``(1/(1+T)) (int_x sup_t |u(x,t)|^2 dx)^(1/2)``.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    g, t = traj.grid, traj.times
    vh = _spectral(traj)
    ux = _physical(traj, g.odd_symbol(1) * vh)
    uxx = _physical(traj, g.odd_symbol(2) * vh)
    u = traj.values
    h1_sq = g.dx * np.sum(u * u + ux * ux, axis=1)
    gamma1 = math.sqrt(float(np.max(h1_sq)))
    gamma2 = math.sqrt(_time_integral(np.max(np.abs(uxx), axis=1) ** 2, t))
    gamma3 = _time_integral(np.max(np.abs(ux), axis=1) ** 6, t) ** (1.0 / 6.0)
    gamma4 = math.sqrt(g.dx * float(np.sum(np.max(u * u, axis=0)))) / (1.0 + traj.T)
    return KpvNorms(gamma1, gamma2, gamma3, gamma4, max(gamma1, gamma2, gamma3, gamma4), traj.T)


def sup_h1_distance(u, w):
    """``sup_t ||u(t) - w(t)||_{H^1}``."""
    d = u - w
    g = d.grid
    dx_ = _physical(d, g.odd_symbol(1) * _spectral(d))
    return math.sqrt(float(np.max(g.dx * np.sum(d.values ** 2 + dx_ ** 2, axis=1))))


def duhamel(g_traj, T=None):
    """``phi(t_i) = int_0^{t_i} S(t_i - tau) g(tau) dtau`` by the trapezoid rule.

    Uses ``S(t - tau) = S(t) S(-tau)``: the untwisted integrand is accumulated
    once and twisted back at each output time.
    """
    if T is not None and not math.isclose(T, g_traj.T, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError(f"trajectory covers [0, {g_traj.T}], not [0, {T}]")
    t = g_traj.times
    if len(t) == 1:
        return Trajectory(g_traj.grid, t, np.zeros_like(g_traj.values))
    grid = g_traj.grid
    untwisted = airy_multipliers(grid, -t) * _spectral(g_traj)
    dt = np.diff(t)[:, None]
    cum = np.zeros_like(untwisted)
    cum[1:] = np.cumsum(0.5 * dt * (untwisted[1:] + untwisted[:-1]), axis=0)
    return Trajectory(grid, t, _physical(g_traj, airy_multipliers(grid, t) * cum))


def free_evolution(u0, times):
    """Trajectory ``t -> S(t) u0``."""
    vh = airy_multipliers(u0.grid, times) * np.fft.rfft(u0.samples)
    return Trajectory(u0.grid, times, np.fft.irfft(vh, n=u0.grid.n, axis=-1))


def forcing(u, a, dealias_on=True):
    """``a u + (u^2)_x / 2`` evaluated slice by slice."""
    if u.grid != a.grid:
        raise ValueError("trajectory and damping live on different grids")
    g = u.grid
    sym = 0.5 * g.odd_symbol(1)
    if dealias_on:
        sym = sym * g.dealias_mask()
    flux = _physical(u, sym * np.fft.rfft(u.values ** 2, axis=-1))
    return Trajectory(g, u.times, a.a * u.values + flux)


def picard_map(u, u0, a, dealias_on=True):
    """One application of the mild-solution map Psi."""
    if u0.grid != u.grid:
        raise ValueError("initial data and trajectory live on different grids")
    return free_evolution(u0, u.times) - duhamel(forcing(u, a, dealias_on))


@dataclass
class PicardResult:
    trajectory: Trajectory
    distances: list
    iterations: int
    converged: bool


def picard_solve(u0, a, T, tol=1e-8, max_iter=200, n_t=64, dealias_on=True):
    """Iterate Psi from ``u(t) = u0`` until successive iterates differ by < ``tol``
    in ``sup_t H^1``.  Raises ``PicardDivergenceError`` (log attached) otherwise."""
    u = Trajectory.constant(u0, T, n_t)
    distances = []
    for k in range(1, max_iter + 1):
        nxt = picard_map(u, u0, a, dealias_on)
        dist = sup_h1_distance(nxt, u)
        distances.append(dist)
        u = nxt
        if not math.isfinite(dist):
            break
        if dist < tol:
            return PicardResult(u, distances, k, True)
    raise PicardDivergenceError(
        f"Picard iteration did not reach tol={tol} in {len(distances)} iterations "
        f"(last distance {distances[-1]:.3e})", distances)


@dataclass
class ContractionReport:
    c1: float
    c2: float
    kappa: float
    t_kappa: float
    lhs_at_t: float
    u0_h1: float
    a_w2inf: float


def contraction_lhs(T, u0_h1, a_w2inf, c1):
    """``4 sqrt2 c1 ||a|| T + 2 c1 c2 T^(1/2) (1 + T) ||u0||_H1`` with ``c2 = 4 (1 + sqrt2) c1``."""
    c2 = 4.0 * (1.0 + math.sqrt(2.0)) * c1
    return 4.0 * math.sqrt(2.0) * c1 * a_w2inf * T + 2.0 * c1 * c2 * math.sqrt(T) * (1.0 + T) * u0_h1


def t_kappa(u0_h1, a_w2inf, c1=2.0, target_margin=1e-6):
    """Largest ``T`` in (0, 1) whose contraction expression equals ``1 - target_margin``."""
    if not c1 > 1:
        raise ValueError(f"c1 must exceed 1, got {c1}")
    if u0_h1 < 0 or a_w2inf < 0:
        raise ValueError("norms must be nonnegative")
    c2 = 4.0 * (1.0 + math.sqrt(2.0)) * c1
    target = 1.0 - target_margin
    lhs = lambda T: contraction_lhs(T, u0_h1, a_w2inf, c1)  # noqa: E731
    upper = math.nextafter(1.0, 0.0)
    if lhs(upper) <= target:
        T = upper
    else:
        T = brentq(lambda s: lhs(s) - target, 0.0, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        while lhs(T) >= 1.0:
            T = math.nextafter(T, 0.0)
    return ContractionReport(c1=c1, c2=c2, kappa=2.0 * c1 * u0_h1, t_kappa=T, lhs_at_t=lhs(T),
                             u0_h1=u0_h1, a_w2inf=a_w2inf)
