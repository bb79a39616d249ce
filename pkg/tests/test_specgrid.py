import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from quasigen.errors import BandExceedsGrid, BandOverflow, OrderTooHigh
from quasigen.specgrid import (
    Grid,
    convolve,
    derivative,
    evaluate,
    forward,
    from_samples,
    from_spectrum,
    inverse,
    log_sup_derivatives,
    multiply,
    sup_norm,
    zero,
)

PERIODIC = Grid(4 * math.pi, 256)  # integer frequencies sit on the lattice


def test_grid_invariants():
    g = Grid()
    assert g.dx * g.xi_max == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        Grid(8.0, 1000)


@pytest.mark.parametrize("N", [64, 256, 4096])
@given(seed=st.integers(0, 2**32 - 1))
def test_round_trip(N, seed):
    g = Grid(8.0, N)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    back = inverse(g, forward(g, v))
    assert np.abs(back - v).max() <= 1e-12 * np.abs(v).max()


@given(seed=st.integers(0, 2**32 - 1))
def test_parseval(seed):
    g = Grid(8.0, 512)
    v = np.random.default_rng(seed).normal(size=512)
    lhs = g.dx * np.sum(np.abs(v) ** 2)
    rhs = np.sum(np.abs(forward(g, v)) ** 2) * (math.pi / g.X) / (2 * math.pi)
    assert lhs == pytest.approx(rhs, rel=1e-10)


@given(seed=st.integers(0, 2**32 - 1))
def test_hermitian_spectrum_gives_real_values(seed):
    g = Grid(8.0, 256)
    v = np.random.default_rng(seed).normal(size=256)
    f = from_samples(g, v)
    assert np.abs(f.values().imag).max() <= 1e-12


def test_constant_spectrum():
    g = Grid(8.0, 128)
    f = from_spectrum(g, lambda xi: np.where(xi == 0, 2 * g.X * 3.0, 0.0), band=0.0)
    assert np.allclose(f.values(), 3.0, atol=1e-14)
    assert np.abs(derivative(f, 1).values()).max() < 1e-14


def test_smoothed_indicator_against_quadrature():
    # (1/2π) ∫_{|ξ|<=16} 2 sinc(ξ) cos(ξx) dξ by scipy quad; the lattice sum
    # differs by an O(1/X) Riemann bias, which halves when X doubles
    oracle = np.array([1.0385192786887874, 0.9959679240574181, 0.004073824667630968])
    pts = np.array([0.0, 0.5, 1.5])
    errs = []
    for X in (8.0, 16.0):
        f = from_spectrum(Grid(X, 4096), lambda xi: 2 * np.sinc(xi / np.pi), band=16)
        errs.append(np.abs(evaluate(f, pts).real - oracle).max())
    assert errs[0] < 2e-3
    assert errs[1] < 0.6 * errs[0]


def test_derivative_of_sine():
    g = Grid(4 * math.pi, 256)
    f = from_samples(g, np.sin(5 * g.x), band=10)
    assert np.abs(derivative(f, 1).values() - 5 * np.cos(5 * g.x)).max() <= 1e-10
    d10 = derivative(f, 10).values()
    assert np.abs(d10 + 5**10 * np.sin(5 * g.x)).max() <= 1e-8 * 5**10


def test_derivative_order_limit():
    f = from_samples(PERIODIC, np.sin(PERIODIC.x), band=1)
    with pytest.raises(OrderTooHigh):
        derivative(f, 21)


def test_derivative_keeps_band():
    f = from_samples(PERIODIC, np.cos(3 * PERIODIC.x), band=3)
    assert derivative(f, 4).band == f.band


def _gauss(g, a):
    return from_spectrum(g, lambda xi: math.sqrt(math.pi / a) * np.exp(-xi**2 / (4 * a)), band=g.xi_max / 2)


def test_convolution_against_quadrature():
    g = Grid(16.0, 1024)
    h = convolve(_gauss(g, 1.0), _gauss(g, 2.0))
    # ∫ e^{-t²} e^{-2(x-t)²} dt at x = 0 and 0.7, scipy quad
    got = evaluate(h, np.array([0.0, 0.7])).real
    assert np.allclose(got, [1.0233267079464885, 0.7381502619886869], atol=1e-10)
    pts = np.linspace(-3, 3, 32)
    ref = [quad(lambda t, x=x: math.exp(-t * t - 2 * (x - t) ** 2), -12, 12)[0] for x in pts]
    assert np.allclose(evaluate(h, pts).real, ref, atol=1e-10)


def test_convolution_identity_and_zero():
    g = Grid(8.0, 512)
    f = _gauss(g, 1.0)
    one = from_spectrum(g, lambda xi: np.ones_like(xi), band=f.band)
    assert np.allclose(convolve(f, one).spectrum, f.spectrum)
    assert np.abs(convolve(f, zero(g)).spectrum).max() == 0.0


@given(k=st.integers(0, 6))
def test_derivative_commutes_with_convolution(k):
    g = Grid(8.0, 256)
    f, h = _gauss(g, 1.0), _gauss(g, 3.0)
    a = derivative(convolve(f, h), k).spectrum
    b = convolve(derivative(f, k), h).spectrum
    # same multipliers, different rounding order: one ulp apart at most
    assert np.allclose(a, b, rtol=1e-15, atol=0)


def test_multiply_band_budget():
    g = Grid(8.0, 256)
    f = from_spectrum(g, lambda xi: np.exp(-xi**2), band=12)
    assert multiply(f, f).band == 24
    big = from_samples(g, np.exp(-g.x**2))
    with pytest.raises(BandOverflow):
        multiply(big, f)


def test_band_limit_enforced():
    g = Grid(8.0, 256)
    with pytest.raises(BandExceedsGrid):
        from_spectrum(g, lambda xi: np.exp(-xi**2), band=0.9 * g.xi_max)


def test_sup_examples():
    f = from_samples(PERIODIC, np.sin(PERIODIC.x), band=1)
    assert sup_norm(f, (0.0, math.pi / 2)) == pytest.approx(1.0, abs=1e-9)
    g = Grid(8.0, 256)
    sq = from_spectrum(g, lambda xi: np.exp(-xi**2 / 4), band=g.xi_max / 2)
    assert sup_norm(sq, (-1, 2)) == pytest.approx(evaluate(sq, np.array([0.0])).real[0], abs=1e-9)


def test_sup_of_parabola():
    # x² times a wide Gaussian window; on [-1, 2] the maximum sits at 2
    g = Grid(16.0, 1024)
    v = g.x**2 * np.exp(-((g.x / 8) ** 8))
    f = from_samples(g, v)
    assert sup_norm(f, (-1.0, 2.0)) == pytest.approx(4.0 * math.exp(-(0.25**8)), rel=1e-9)


def test_log_sup_derivatives_scaling():
    f = from_samples(PERIODIC, np.sin(7 * PERIODIC.x), band=7)
    L = log_sup_derivatives(PERIODIC, f.spectrum, (-1.0, 1.0), 20)
    # grid maxima without refinement: within 1e-3 of the true sup
    assert np.allclose(L, np.arange(21) * math.log(7), atol=1e-3)
