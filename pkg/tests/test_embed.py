import math

import numpy as np
import pytest

from quasigen import embed as E
from quasigen.errors import CutoffGeometry, ResolutionTooFine, SupportOutsideGrid
from quasigen.genfunc import GeneralizedFunctionRep, apply_op, classify, d_op, operator_from_coefficients
from quasigen.mollifier import CutoffFamily, build_mollifier
from quasigen.specgrid import Grid, convolve, from_samples, inverse

KAPPA = CutoffFamily(1.5, 2.5, analytic=False)
PERIODIC = Grid(4 * math.pi, 256)
PHIS = {"1": np.ones_like, "x": lambda x: x, "x2": lambda x: x**2, "sin": np.sin}


@pytest.fixture(scope="module")
def delta0(moll):
    return E.embed(E.CompactFunctional.delta(0.0), moll)


# -- functionals ---------------------------------------------------------------


def test_from_json_roundtrip():
    spec = {"terms": [{"dirac": {"a": 0, "k": 1, "c": 2}}, {"pv": {}},
                      {"density": {"kind": "indicator", "a": -1, "b": 1}}]}
    f = E.CompactFunctional.from_json(spec)
    assert isinstance(f.terms[0], E.Dirac) and f.terms[0].k == 1
    assert isinstance(f.terms[1], E.PrincipalValue)
    assert f.terms[2].b == 1.0


def test_unwindowed_heaviside_rejected():
    with pytest.raises(ValueError):
        E.CompactFunctional.from_json({"terms": [{"density": {"kind": "heaviside", "a": 0}}]})
    with pytest.raises(ValueError):
        E.Density("heaviside", 0.0, None)


def test_windowed_heaviside_is_indicator(moll):
    h = E.embed(E.CompactFunctional((E.Density("heaviside", 0.0, 3.0),)), moll)
    i = E.embed(E.CompactFunctional((E.Density("indicator", 0.0, 3.0),)), moll)
    assert np.array_equal(h.spectra, i.spectra)


def test_support_margin(moll):
    with pytest.raises(SupportOutsideGrid):
        E.embed(E.CompactFunctional.delta(6.5), moll)


# -- embedding -----------------------------------------------------------------


def test_delta_gives_mollifier(delta0, moll):
    assert np.array_equal(delta0.spectra, moll.spectra)


def test_indicator_spectrum(moll):
    rep = E.embed(E.CompactFunctional((E.Density("indicator", -1.0, 1.0),)), moll)
    xi = moll.grid.xi
    k = int(np.argmin(np.abs(xi - 3.0)))
    assert xi[k] == 3.0 or abs(xi[k] - 3.0) < 0.2
    # ∫_{-1}^{1} cos(3t) dt by quadrature
    if xi[k] == 3.0:
        assert rep.spectra[-1, k].real == pytest.approx(0.09408000537324485, abs=1e-14)
    assert np.allclose(rep.spectra[-1], 2 * np.sinc(xi / np.pi) * moll.spectra[-1], atol=1e-15)


def test_pv_spectrum(moll):
    rep = E.embed(E.CompactFunctional((E.PrincipalValue(),)), moll)
    xi = moll.grid.xi
    assert np.allclose(rep.spectra[9], -1j * math.pi * np.sign(xi) * moll.spectra[9])


def test_derivative_of_delta(delta0, moll):
    d1 = E.embed(E.CompactFunctional.delta(0.0, 1), moll)
    # D = -i d/dx, so d/dx θ_n = i D θ_n
    assert np.allclose(d1.spectra, 1j * apply_op(d_op(), delta0).spectra, atol=1e-13)


@pytest.mark.parametrize("coeffs", [[0, 1], [1, 0, -2], [0.5, 1j, 0, 3]])
def test_commutation_with_operators(moll, coeffs):
    P = operator_from_coefficients("P", coeffs)
    f = E.CompactFunctional.delta(0.5, 1, 2.0) + E.CompactFunctional.delta(-1.0)
    lhs = E.embed(f.apply(P), moll).spectra
    rhs = apply_op(P, E.embed(f, moll)).spectra
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())


@pytest.mark.parametrize(
    "f",
    [
        E.CompactFunctional.delta(0.0),
        E.CompactFunctional.delta(0.5, 2),
        E.CompactFunctional((E.Density("indicator", -1.0, 1.0),)),
        E.CompactFunctional((E.PrincipalValue(),)),
    ],
    ids=["delta", "delta''", "indicator", "pv"],
)
def test_embeddings_are_moderate(moll, f):
    assert classify(E.embed(f, moll), (-1, 1), "moderate").verdict


def test_constant_embedding(grid):
    one = from_samples(grid, np.ones(grid.N), band=0)
    s = from_samples(PERIODIC, np.sin(PERIODIC.x), band=1)
    ns = range(1, 17)
    u = E.constant_embed(one, ns)
    assert np.all(u.values() == 1.0)
    a = E.constant_embed(s, ns)
    prod = a.multiply(E.constant_embed(s, ns))
    direct = E.constant_embed(from_samples(PERIODIC, np.sin(PERIODIC.x) ** 2, band=2), ns)
    assert np.allclose(prod.spectra, direct.spectra, atol=1e-10)



def test_plateau_reproduces_band_limited(moll):
    g = moll.grid
    phi = from_samples(g, np.exp(-(g.x**2)), band=2.5)
    for n in (3, 10):
        out = convolve(phi, moll.theta(n))
        assert np.array_equal(out.spectrum, phi.spectrum)


# -- support -------------------------------------------------------------------


def test_support_of_delta(delta0):
    est = E.support(delta0, 0.25, region=(-4, 4))
    assert est.intervals == [(-0.25, 0.25)]


def test_support_of_pair(moll):
    f = E.CompactFunctional.delta(1.0) + E.CompactFunctional.delta(-1.0)
    est = E.support(E.embed(f, moll), 0.25, region=(-4, 4))
    assert est.components == 2
    assert all(a < p < b for p, (a, b) in zip((-1.0, 1.0), est.intervals))


def test_support_of_zero(grid):
    z = GeneralizedFunctionRep(grid, np.arange(1, 33), np.zeros((32, grid.N), complex), np.zeros(32))
    assert E.support(z, 0.5, region=(-4, 4)).intervals == []


def test_support_resolution(delta0):
    with pytest.raises(ResolutionTooFine):
        E.support(delta0, delta0.grid.dx)


@pytest.mark.parametrize("points", [(0.0,), (-1.0, 1.0), (0.6,), (-2.2, 0.3)])
def test_support_inclusions(moll, points):
    f = E.CompactFunctional.delta(points[0])
    for p in points[1:]:
        f = f + E.CompactFunctional.delta(p)
    est = E.support(E.embed(f, moll), 0.25, region=(-4, 4))
    rho = 0.25
    for t in est.tiles:  # outer: every failing cell meets the ρ-neighbourhood
        if not t["negligible"]:
            a, b = t["cell"]
            assert any(a <= p + rho and b >= p - rho for p in points), t
    for a, b in est.intervals:  # so the estimate sits in the 2ρ fattening
        assert any(p - 2 * rho <= a and b <= p + 2 * rho for p in points)
    for p in points:  # inner: every support point is covered
        assert any(a <= p <= b for a, b in est.intervals)


def test_support_nested_in_n(grid):
    f = E.CompactFunctional.delta(0.3)
    small = E.support(E.embed(f, build_mollifier(range(1, 33), grid)), 0.25, region=(-4, 4))
    big = E.support(E.embed(f, build_mollifier(range(1, 65), grid)), 0.25, region=(-4, 4))
    for a, b in big.intervals:
        assert any(c <= a and b <= d for c, d in small.intervals)


# -- consistency ---------------------------------------------------------------


@pytest.mark.parametrize("name", list(PHIS))
def test_consistency_defect(moll, name):
    r = E.consistency_defect(PHIS[name], KAPPA, (-1, 1), moll)
    assert r.confirmed and r.n0 is not None and r.n0 <= 16


def test_consistency_geometry(moll):
    with pytest.raises(CutoffGeometry):
        E.consistency_defect(np.sin, CutoffFamily(1.0, 2.0, analytic=False), (-1, 1), moll)


def test_ratio_test():
    ns = [1, 2, 4, 8, 16]
    assert E.ratio_test(ns, [1, 0.4, 0.3, 0.1, 0.04], 1e-13) == (4, True)
    assert E.ratio_test(ns, [1, 0.4, 0.3, 0.2, 0.15], 1e-13) == (None, False)
    assert E.ratio_test(ns, [1, 0.9, 1e-14, 1e-14, 2e-14], 1e-13)[0] == 2


def test_product_preservation(moll):
    pd = E.product_defect(lambda x: x, np.sin, KAPPA, moll)
    assert classify(pd, (-1, 1), "negligible").verdict
    pd2 = E.product_defect(lambda x: x, lambda x: x, KAPPA, moll)
    assert classify(pd2, (-1, 1), "negligible").verdict


# -- soft extension ------------------------------------------------------------


@pytest.fixture(scope="module")
def bump_rep(grid):
    return GeneralizedFunctionRep.from_samples(grid, range(1, 65), lambda n, x: n * np.exp(-(x**2)))


def test_soft_extension(bump_rep):
    ext = E.soft_extend(bump_rep, (-2, 2), (-1, 1))
    assert ext.H == 2.0 and ext.a == ext.H**2 * ext.h
    assert ext.p_values[0] == 4  # m(2) + 2
    assert ext.defect.confirmed
    assert classify(ext.rep, (-8, 8), "moderate").verdict


def test_soft_extension_of_one(grid):
    rep = GeneralizedFunctionRep.from_samples(grid, range(1, 33), lambda n, x: np.ones_like(x))
    ext = E.soft_extend(rep, (-2, 2), (-1, 1), h=16.0)
    assert ext.defect.confirmed
    assert max(ext.defect.defects[8:]) < 1e-10


def test_soft_extension_identity(grid):
    inner = CutoffFamily(0.3, 0.6, analytic=False).samples(grid)
    rep = GeneralizedFunctionRep.from_samples(grid, range(1, 33), lambda n, x: n * inner)
    ext = E.soft_extend(rep, (-2, 2), (-1, 1), h=16.0)
    for i, off in enumerate(ext.lowpass_inactive):
        if off:
            assert np.abs(ext.rep.spectra[i] - rep.spectra[i]).max() <= 1e-12 * (i + 1)


def test_soft_extension_geometry(bump_rep):
    with pytest.raises(CutoffGeometry):
        E.soft_extend(bump_rep, (-1, 1), (-2, 2), h=16.0)


# -- impossibility demo --------------------------------------------------------


def test_impossibility_demo(moll):
    r = E.impossibility_demo(moll, range(8, 65))
    assert r.lower > 0.3 and r.upper < 0.32
    assert r.pairing_below_tol
    assert r.spectrum_identity_error < 1e-5
    assert "Illustration only" in r.banner


def test_even_window_pairs_to_zero(moll):
    # the shifted window is needed: an even one gives 0 by symmetry alone
    g = moll.grid
    vals = inverse(g, E.x_theta_spectrum(moll, 16))
    even = abs(g.dx * np.sum(vals[1:] * np.exp(-g.x[1:] ** 2)))
    assert even < 1e-15
