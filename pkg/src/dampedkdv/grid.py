"""Periodic grid, Fourier transforms, derivatives and quadrature.

The real line is modelled by a periodic box ``[-L/2, L/2)`` sampled at ``n``
equispaced nodes.  Fields are stored as real samples; the spectral view uses
the real FFT (``numpy.fft.rfft``) with modes ``m = 0 .. n/2``.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid of ``n`` nodes on a box of length ``box_length``."""

    box_length: float
    n: int

    def __post_init__(self):
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        if int(self.n) != self.n or self.n < 16 or self.n % 2:
            raise ValueError(f"n must be an even integer >= 16, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "box_length", float(self.box_length))

    @property
    def dx(self):
        return self.box_length / self.n

    @property
    def x(self):
        return -0.5 * self.box_length + self.dx * np.arange(self.n)

    @property
    def mode_index(self):
        """Signed integer mode indices ``-n/2 .. n/2-1`` (FFT order)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)

    @property
    def wavenumbers(self):
        """Signed wavenumbers ``2 pi m / L`` for ``m`` in ``[-n/2, n/2)``, ascending."""
        m = np.arange(-self.n // 2, self.n // 2)
        return 2.0 * np.pi * m / self.box_length

    @property
    def rk(self):
        """Non-negative wavenumbers of the real FFT, modes ``0 .. n/2``."""
        return 2.0 * np.pi * np.arange(self.n // 2 + 1) / self.box_length

    def odd_symbol(self, power):
        """``(ik)**power`` on rfft modes with the Nyquist entry zeroed for odd powers."""
        k = self.rk
        sym = (1j * k) ** power
        if power % 2:
            sym[-1] = 0.0
        return sym

    def dealias_mask(self):
        """Boolean mask on rfft modes keeping ``|m| <= n/3``."""
        return np.arange(self.n // 2 + 1) <= self.n / 3.0


def make_grid(box_length, n):
    return GridSpec(box_length, n)


@dataclass(frozen=True)
class Field:
    """One time slice ``u(., t)`` sampled on ``grid``."""

    grid: GridSpec
    samples: np.ndarray = field(repr=False)
    time: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.samples, dtype=float)
        if u.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("field samples must be finite")
        u.setflags(write=False)
        object.__setattr__(self, "samples", u)

    @property
    def coefficients(self):
        """Full complex DFT coefficients in FFT order (Hermitian for real samples)."""
        return np.fft.fft(self.samples)

    @property
    def rfft(self):
        return np.fft.rfft(self.samples)

    def with_samples(self, samples, time=None):
        return Field(self.grid, samples, self.time if time is None else time)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar):
        return self.with_samples(float(scalar) * self.samples)

    __rmul__ = __mul__


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def from_function(grid, func, time=0.0):
    return Field(grid, func(grid.x), time)


def derivative_samples(grid, u, order):
    """Spectral derivative of real samples ``u`` (orders 1-3)."""
    if order not in (1, 2, 3):
        raise ValueError(f"unsupported derivative order {order}")
    return np.fft.irfft(grid.odd_symbol(order) * np.fft.rfft(u), n=grid.n)


def spectral_derivative(f, order):
    return f.with_samples(derivative_samples(f.grid, f.samples, order))


def dealias_samples(grid, u):
    uh = np.fft.rfft(u)
    uh[~grid.dealias_mask()] = 0.0
    return np.fft.irfft(uh, n=grid.n)


def dealias(f):
    """Two-thirds rule: zero every mode with ``|m| > n/3``."""
    return f.with_samples(dealias_samples(f.grid, f.samples))


def integrate(grid, values):
    """Riemann sum ``dx * sum(values)``; spectrally exact for band-limited data."""
    return grid.dx * float(np.sum(values))


def norms(f):
    """Quadratures used throughout: L2^2, H1^2, int u^3, int |u|^3 and sup norm."""
    g, u = f.grid, f.samples
    ux = derivative_samples(g, u, 1)
    l2_sq = integrate(g, u * u)
    return {
        "l2_sq": l2_sq,
        "h1_sq": l2_sq + integrate(g, ux * ux),
        "int_u3": integrate(g, u ** 3),
        "l3_cubed": integrate(g, np.abs(u) ** 3),
        "linf": float(np.max(np.abs(u))),
    }


def h1_norm(f):
    return float(np.sqrt(norms(f)["h1_sq"]))
