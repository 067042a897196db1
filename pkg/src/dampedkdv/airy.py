"""The Airy group S(t) solving v_t + v_xxx = 0, and empirical linear estimates."""

from dataclasses import dataclass

import numpy as np

from .grid import Field, norms


def airy_multiplier(grid, t):
    """Fourier multiplier ``exp(i k^3 t)`` on rfft modes.

    The Nyquist mode of an odd-order symbol is taken as zero, so it is left
    untouched; this keeps real fields real and the map unitary.
    """
    k = grid.rk
    phase = k ** 3 * t
    phase[-1] = 0.0
    return np.exp(1j * phase)


def airy_multipliers(grid, times):
    """Stack of multipliers, shape ``(len(times), n//2 + 1)``."""
    k3 = grid.rk ** 3
    k3[-1] = 0.0
    return np.exp(1j * np.outer(np.asarray(times, dtype=float), k3))


def airy_propagate(f, t):
    """Apply S(t); ``cos(kx)`` is mapped to ``cos(kx + k^3 t)``."""
    uh = np.fft.rfft(f.samples) * airy_multiplier(f.grid, t)
    return Field(f.grid, np.fft.irfft(uh, n=f.grid.n), f.time + t)


def propagate_many(f, times):
    """Samples of ``S(t) f`` for every ``t`` in ``times``, shape ``(len(times), n)``."""
    uh = np.fft.rfft(f.samples)
    return np.fft.irfft(airy_multipliers(f.grid, times) * uh, n=f.grid.n, axis=-1)


@dataclass
class LinearEstimateReport:
    t_horizon: float
    gamma_ratios: dict
    c1_empirical: float
    battery_size: int
    per_member: list


def _trapezoid(values, t, axis=0):
    return np.trapezoid(values, t, axis=axis)


def linear_estimate_ratios(f, T, n_time_samples=256):
    """Ratios of the three discrete left-hand sides to their right-hand norms.

    ``strichartz``: (int ||S(t)v||_inf^6 dt)^(1/6) / ||v||_L2
    ``maximal``:    (int_x sup_t |S(t)v|^2 dx)^(1/2) / ((1+T) ||v||_H1)
    ``smoothing``:  (sup_x int |d_x S(t)v|^2 dt)^(1/2) / ||v||_L2
    ``energy``:     sup_t ||S(t)v||_H1 / ||v||_H1, which is 1 up to rounding
    Time runs over ``[-T, T]``.
    """
    nrm = norms(f)
    if nrm["l2_sq"] == 0.0:
        raise ValueError("battery member has zero norm")
    g = f.grid
    t = np.linspace(-T, T, n_time_samples)
    v = propagate_many(f, t)
    vx = np.fft.irfft(g.odd_symbol(1) * np.fft.rfft(v, axis=-1), n=g.n, axis=-1)

    lhs1 = _trapezoid(np.max(np.abs(v), axis=1) ** 6, t) ** (1.0 / 6.0)
    lhs2 = np.sqrt(g.dx * np.sum(np.max(v * v, axis=0)))
    lhs3 = np.sqrt(np.max(_trapezoid(vx * vx, t, axis=0)))
    lhs0 = np.sqrt(g.dx * np.max(np.sum(v * v + vx * vx, axis=1)))
    l2 = np.sqrt(nrm["l2_sq"])
    h1 = np.sqrt(nrm["h1_sq"])
    return {
        "strichartz": lhs1 / l2,
        "maximal": lhs2 / ((1.0 + T) * h1),
        "smoothing": lhs3 / l2,
        "energy": lhs0 / h1,
    }


def verify_linear_estimates(grid, T, battery, n_time_samples=256):
    """Measure the linear estimate ratios over a battery of initial data.

    ``battery`` holds Fields or initial-data dicts (see ``profiles.initial_data``).
    """
    from .profiles import initial_data

    if not battery:
        raise ValueError("battery must be nonempty")
    if n_time_samples < 64:
        raise ValueError("n_time_samples must be at least 64")
    members = [b if isinstance(b, Field) else initial_data(grid, b) for b in battery]
    per_member = [linear_estimate_ratios(f, T, n_time_samples) for f in members]
    worst = {key: max(r[key] for r in per_member) for key in per_member[0]}
    return LinearEstimateReport(
        t_horizon=float(T),
        gamma_ratios=worst,
        c1_empirical=float(max(worst.values())),
        battery_size=len(members),
        per_member=per_member,
    )
