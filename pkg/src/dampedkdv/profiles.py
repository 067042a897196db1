"""Initial data and damping coefficients.

Damping profiles are nonnegative, C^2 and carry their analytic first and
second derivatives, so that ``||a||_{W^{2,inf}}`` is available in closed form.
They also carry ``a_xx_spectral``, the second derivative of the band-limited
interpolant of the samples.  That is the coefficient the solver actually sees;
it differs from the analytic one near the ramp ends, where the third
derivative of the smoothstep jumps.
Steps are built from the quintic smoothstep ``Q(y) = 6y^5 - 15y^4 + 10y^3``.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, GridSpec, derivative_samples, norms

DAMPING_KINDS = ("constant", "right_step", "left_step", "sponge")

# max |Q'| and max |Q''| on [0, 1]
SMOOTHSTEP_D1_MAX = 15.0 / 8.0
SMOOTHSTEP_D2_MAX = 10.0 / np.sqrt(3.0)


def smoothstep(y):
    """Quintic smoothstep and its first two derivatives, clamped outside [0, 1]."""
    y = np.asarray(y, dtype=float)
    inside = (y > 0.0) & (y < 1.0)
    yc = np.clip(y, 0.0, 1.0)
    q = yc ** 3 * (10.0 - 15.0 * yc + 6.0 * yc * yc)
    dq = np.where(inside, 30.0 * yc ** 2 * (1.0 - yc) ** 2, 0.0)
    d2q = np.where(inside, 60.0 * yc * (1.0 - yc) * (1.0 - 2.0 * yc), 0.0)
    return q, dq, d2q


@dataclass(frozen=True)
class DampingProfile:
    grid: GridSpec
    a: np.ndarray = field(repr=False)
    a_x: np.ndarray = field(repr=False)
    a_xx: np.ndarray = field(repr=False)
    kind: str
    params: dict
    a_xx_spectral: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("a", "a_x", "a_xx"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.a < 0):
            raise ValueError("damping coefficient must be nonnegative")
        spectral = derivative_samples(self.grid, self.a, 2)
        spectral.setflags(write=False)
        object.__setattr__(self, "a_xx_spectral", spectral)

    @property
    def w2inf_norm(self):
        """``max(||a||, ||a_x||, ||a_xx||)`` in sup norm, exact for the built-in kinds."""
        alpha0 = self.params.get("alpha0")
        if self.kind == "constant":
            return alpha0
        if self.kind in ("right_step", "left_step", "sponge"):
            w = self.params["width"]
            return alpha0 * max(1.0, SMOOTHSTEP_D1_MAX / w, SMOOTHSTEP_D2_MAX / w ** 2)
        return float(max(np.max(np.abs(self.a)), np.max(np.abs(self.a_x)),
                         np.max(np.abs(self.a_xx))))

    @property
    def is_constant(self):
        return self.kind == "constant"


def _rising(x, alpha0, r1, width):
    q, dq, d2q = smoothstep((x - (r1 - width)) / width)
    return alpha0 * q, alpha0 * dq / width, alpha0 * d2q / width ** 2


def make_damping(grid, kind, alpha0, r1=0.0, width=1.0):
    """Build a damping coefficient a(x) on ``grid``.

    ``constant``
        ``a = alpha0`` everywhere (the fully damped case, alpha0 acting as mu).
    ``right_step``
        rises from 0 at ``r1 - width`` to ``alpha0`` at ``r1`` and stays there up
        to the right edge.  On the periodic box the plateau is closed by a
        mirrored ramp over ``[-L/2, -L/2 + width]`` so the profile is C^2 on the
        torus; ``a = alpha0`` holds exactly for every node with ``x >= r1``.
    ``left_step``
        mirror image of ``right_step`` (``a = alpha0`` for ``x <= -r1``).
    ``sponge``
        ``a = alpha0`` for ``|x| >= r1``, zero for ``|x| <= r1 - width``.
    """
    if kind not in DAMPING_KINDS:
        raise ValueError(f"unknown damping kind {kind!r}; expected one of {DAMPING_KINDS}")
    if not alpha0 > 0:
        raise ValueError(f"alpha0 must be positive, got {alpha0}")
    x = grid.x
    half = 0.5 * grid.box_length
    params = {"alpha0": float(alpha0), "r1": float(r1), "width": float(width)}
    if kind == "constant":
        ones = np.full(grid.n, float(alpha0))
        zeros = np.zeros(grid.n)
        return DampingProfile(grid, ones, zeros, zeros.copy(), kind, params)
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")

    if kind in ("right_step", "left_step"):
        # ramp-up [r1 - w, r1] and the periodic closure [-L/2, -L/2 + w] must not overlap
        if not (-half + width < r1 - width and r1 < half):
            raise ValueError(
                f"{kind}: active region [r1 - width, L/2) = [{r1 - width}, {half}) "
                f"and its closure ramp must fit inside the box")
        s = 1.0 if kind == "right_step" else -1.0
        xs = s * x
        up, up_x, up_xx = _rising(xs, alpha0, r1, width)
        # closure: 1 - Q((xs + L/2)/w), equal to alpha0 at the seam
        q, dq, d2q = smoothstep((xs + half) / width)
        down = alpha0 * (1.0 - q)
        down_x = -alpha0 * dq / width
        down_xx = -alpha0 * d2q / width ** 2
        closure = xs < -half + width
        a = np.where(closure, down, up)
        a_x = s * np.where(closure, down_x, up_x)
        a_xx = np.where(closure, down_xx, up_xx)
        return DampingProfile(grid, a, a_x, a_xx, kind, params)

    # sponge
    if not (0.0 < r1 - width and r1 < half):
        raise ValueError(f"sponge: need 0 < r1 - width and r1 < L/2, got r1={r1}, width={width}")
    ar, ar_x, ar_xx = _rising(x, alpha0, r1, width)
    al, al_x, al_xx = _rising(-x, alpha0, r1, width)
    return DampingProfile(grid, ar + al, ar_x - al_x, ar_xx + al_xx, kind, params)


def damping_from_samples(grid, a):
    """Wrap user-supplied nonnegative samples; derivatives by spectral differentiation."""
    a = np.asarray(a, dtype=float)
    return DampingProfile(grid, a, derivative_samples(grid, a, 1),
                          derivative_samples(grid, a, 2), "custom", {})


def zero_damping(grid):
    z = np.zeros(grid.n)
    return DampingProfile(grid, z, z, z, "none", {"alpha0": 0.0})


def soliton_profile(x, c, x0=0.0):
    """Classical KdV solitary wave ``3c sech^2(sqrt(c)(x - x0)/2)``."""
    return 3.0 * c / np.cosh(0.5 * np.sqrt(c) * (x - x0)) ** 2


def soliton(grid, c, x0=0.0, time=0.0):
    if not c > 0:
        raise ValueError(f"soliton speed must be positive, got {c}")
    return Field(grid, soliton_profile(grid.x, c, x0), time)


def gaussian(grid, amplitude, sigma, x0=0.0):
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return Field(grid, amplitude * np.exp(-((grid.x - x0) ** 2) / (2.0 * sigma ** 2)))


def random_h1(grid, seed, target_h1, band):
    """Seeded random real field on modes ``1..band`` with ``||u||_{H^1} = target_h1``."""
    if not target_h1 > 0:
        raise ValueError("target_h1 must be positive")
    if not 1 <= band <= grid.n / 3.0:
        raise ValueError(f"band must lie in [1, n/3] = [1, {grid.n // 3}], got {band}")
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(grid.n // 2 + 1, dtype=complex)
    k = grid.rk[1:band + 1]
    coeffs[1:band + 1] = (rng.standard_normal(band) + 1j * rng.standard_normal(band)) / (1.0 + k * k)
    u = np.fft.irfft(coeffs, n=grid.n)
    f = Field(grid, u)
    return f * (target_h1 / np.sqrt(norms(f)["h1_sq"]))


INITIAL_KINDS = ("soliton", "gaussian", "random_h1")


def initial_data(grid, spec):
    """Build a field from a dict ``{"kind": ..., **params}``."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "soliton":
        return soliton(grid, spec.get("c", 1.0), spec.get("x0", 0.0))
    if kind == "gaussian":
        return gaussian(grid, spec.get("amplitude", 1.0), spec.get("sigma", 1.0), spec.get("x0", 0.0))
    if kind == "random_h1":
        return random_h1(grid, spec.get("seed", 0), spec.get("target_h1", 1.0), spec.get("band", 16))
    raise ValueError(f"unknown initial data kind {kind!r}; expected one of {INITIAL_KINDS}")
