import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from dampedkdv.grid import (Field, dealias, derivative_samples, make_grid, norms,
                            spectral_derivative)
from dampedkdv.profiles import soliton, soliton_profile


def test_make_grid_small_box():
    g = make_grid(2 * np.pi, 16)
    assert g.dx == pytest.approx(2 * np.pi / 16)
    np.testing.assert_allclose(g.wavenumbers, np.arange(-8, 8))
    assert g.x[0] == pytest.approx(-np.pi)


def test_make_grid_spacing():
    assert make_grid(80, 512).dx == 0.15625


@pytest.mark.parametrize("length,n", [(80, 15), (80, 8), (80, 17), (0.0, 64), (-1.0, 64)])
def test_make_grid_rejects(length, n):
    with pytest.raises(ValueError):
        make_grid(length, n)


def test_wavenumbers_symmetric():
    g = make_grid(80, 64)
    k = g.wavenumbers
    m0 = g.n // 2
    np.testing.assert_allclose(k[m0 + 1:], -k[m0 - 1:0:-1])
    assert k[m0] == 0.0


def test_field_rejects_nonfinite(grid80):
    u = np.zeros(grid80.n)
    u[3] = np.nan
    with pytest.raises(ValueError):
        Field(grid80, u)


def test_derivatives_of_sine(grid2pi):
    g = grid2pi
    f = Field(g, np.sin(g.x))
    np.testing.assert_allclose(spectral_derivative(f, 1).samples, np.cos(g.x), atol=1e-12)
    # the higher orders amplify round-off by the FFT size
    np.testing.assert_allclose(spectral_derivative(f, 2).samples, -np.sin(g.x), atol=1e-11)
    np.testing.assert_allclose(spectral_derivative(f, 3).samples, -np.cos(g.x), atol=1e-11)


def test_derivative_of_constant_is_zero(grid80):
    f = Field(grid80, np.full(grid80.n, 2.5))
    for order in (1, 2, 3):
        assert np.max(np.abs(spectral_derivative(f, order).samples)) < 1e-13


def test_derivative_rejects_order(grid80):
    with pytest.raises(ValueError):
        spectral_derivative(Field(grid80, np.zeros(grid80.n)), 4)


def test_nyquist_zeroed_for_odd_order():
    g = make_grid(2 * np.pi, 16)
    f = Field(g, np.cos(8 * g.x))  # pure Nyquist mode
    assert np.max(np.abs(spectral_derivative(f, 1).samples)) < 1e-12
    np.testing.assert_allclose(spectral_derivative(f, 2).samples, -64 * f.samples, atol=1e-10)


def test_dealias_keeps_band_and_kills_high_modes():
    g = make_grid(2 * np.pi, 64)
    low = Field(g, np.cos(3 * g.x) + 0.5 * np.sin(21 * g.x))
    np.testing.assert_allclose(dealias(low).samples, low.samples, atol=1e-13)
    high = Field(g, np.cos(31 * g.x))
    assert np.max(np.abs(dealias(high).samples)) < 1e-13


def test_dealias_idempotent(grid80):
    rng = np.random.default_rng(3)
    f = Field(grid80, rng.standard_normal(grid80.n))
    once = dealias(f)
    np.testing.assert_allclose(dealias(once).samples, once.samples, atol=1e-13)


def test_norms_zero(grid80):
    nrm = norms(Field(grid80, np.zeros(grid80.n)))
    assert all(v == 0.0 for v in nrm.values())


def test_norms_sine(grid2pi):
    nrm = norms(Field(grid2pi, np.sin(grid2pi.x)))
    assert nrm["l2_sq"] == pytest.approx(np.pi, rel=1e-13)
    assert nrm["h1_sq"] == pytest.approx(2 * np.pi, rel=1e-13)
    assert abs(nrm["int_u3"]) < 1e-13


def _soliton_oracle():
    """Soliton integrals by adaptive quadrature on the real line."""
    phi = lambda x: soliton_profile(x, 1.0)  # noqa: E731
    dphi = lambda x: -3.0 * np.tanh(x / 2) / np.cosh(x / 2) ** 2  # noqa: E731
    l2 = quad(lambda x: phi(x) ** 2, -80, 80, epsabs=1e-13)[0]
    dx2 = quad(lambda x: dphi(x) ** 2, -80, 80, epsabs=1e-13)[0]
    u3 = quad(lambda x: phi(x) ** 3, -80, 80, epsabs=1e-13)[0]
    return l2, l2 + dx2, u3


def test_soliton_closed_form_matches_quadrature_oracle():
    l2, h1, u3 = _soliton_oracle()
    assert l2 == pytest.approx(24.0, abs=1e-9)
    assert h1 == pytest.approx(28.8, abs=1e-9)
    assert u3 == pytest.approx(57.6, abs=1e-9)


def test_soliton_norms(grid80):
    nrm = norms(soliton(grid80, 1.0))
    assert abs(nrm["l2_sq"] - 24.0) < 1e-8
    assert abs(nrm["h1_sq"] - 28.8) < 1e-8
    assert abs(nrm["int_u3"] - 57.6) < 1e-8
    assert nrm["l3_cubed"] == pytest.approx(nrm["int_u3"])


fields = st.integers(min_value=0, max_value=2 ** 32 - 1)


@settings(max_examples=25, deadline=None)
@given(seed=fields)
def test_parseval_and_roundtrip(seed):
    g = make_grid(80, 256)
    u = np.random.default_rng(seed).standard_normal(g.n)
    f = Field(g, u)
    c = f.coefficients
    assert np.sum(np.abs(c) ** 2) / g.n * g.dx == pytest.approx(g.dx * np.sum(u * u), rel=1e-12)
    back = np.fft.ifft(c)
    assert np.max(np.abs(back.imag)) < 1e-12 * np.max(np.abs(u))
    assert np.max(np.abs(back.real - u)) < 1e-12 * np.max(np.abs(u))
    # Hermitian symmetry of the spectral view
    np.testing.assert_allclose(c[1:], np.conj(c[1:][::-1]), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=fields, shift=st.integers(min_value=1, max_value=255))
def test_norms_shift_invariant(seed, shift):
    g = make_grid(80, 256)
    rng = np.random.default_rng(seed)
    h = np.zeros(g.n // 2 + 1, complex)
    h[1:40] = rng.standard_normal(39) + 1j * rng.standard_normal(39)
    u = np.fft.irfft(h, n=g.n)
    a, b = norms(Field(g, u)), norms(Field(g, np.roll(u, shift)))
    for key in ("l2_sq", "h1_sq", "l3_cubed"):
        assert b[key] == pytest.approx(a[key], rel=1e-12)
    assert b["int_u3"] == pytest.approx(a["int_u3"], rel=1e-12, abs=1e-12 * a["l3_cubed"])


@settings(max_examples=25, deadline=None)
@given(seed=fields)
def test_triple_first_derivative_equals_third(seed):
    g = make_grid(80, 256)
    rng = np.random.default_rng(seed)
    h = np.zeros(g.n // 2 + 1, complex)
    h[1:60] = rng.standard_normal(59) + 1j * rng.standard_normal(59)
    u = np.fft.irfft(h, n=g.n)
    d1 = derivative_samples(g, derivative_samples(g, derivative_samples(g, u, 1), 1), 1)
    d3 = derivative_samples(g, u, 3)
    assert np.max(np.abs(d1 - d3)) < 1e-10 * max(1.0, np.max(np.abs(d3)))
