import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from quasigen.errors import BandExceedsGrid, EmptyRegion, GeometryInfeasible, SupportOutsideGrid
from quasigen.mollifier import (
    CutoffFamily,
    band_partition,
    bspline_transform,
    build_cutoff,
    build_mollifier,
    bump,
    verify_decay,
)
from quasigen.specgrid import Grid, evaluate, sup_norm

FAM = CutoffFamily()


def _box_transform(n, xi):
    # transform of (n/2)·1_[-1/n, 1/n] by quadrature
    return quad(lambda x: (n / 2) * math.cos(xi * x), -1 / n, 1 / n, epsabs=1e-15)[0]


def test_bspline_examples():
    assert bspline_transform(1, np.array([0.0]))[0] == 1.0
    assert abs(bspline_transform(2, np.array([2 * math.pi]))[0]) < 1e-15
    assert bspline_transform(4, np.array([1.0]))[0] == pytest.approx(0.9591058658127634, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 7))
def test_bspline_matches_convolution(n):
    xi = np.linspace(-40, 40, 100)
    oracle = np.array([_box_transform(n, x) ** n for x in xi])
    assert np.abs(bspline_transform(n, xi) - oracle).max() <= 1e-9


def test_bump_unit_mass():
    assert quad(lambda t: bump(np.array([t]))[0], -1, 1, epsabs=1e-14)[0] == pytest.approx(1.0, abs=1e-10)


def test_first_member_against_convolution_quadrature():
    # 1_[-w,w] * ρ_εκ * H_1^εH integrated directly with scipy quad
    xs = np.array([0.0, 1.0, 1.1, 1.3, 1.5, 1.7, 1.9, 2.0, -1.6])
    oracle = np.array([1.0, 1.0, 9.99995265e-01, 9.39793501e-01, 0.5, 6.02064985e-02,
                       4.73454724e-06, 0.0, 2.33246343e-01])
    assert np.allclose(FAM.evaluate(1, xs), oracle, atol=1e-9)


@given(n=st.integers(1, 64), eta=st.floats(-3, 3))
def test_range_and_plateau(n, eta):
    v = FAM.evaluate(n, np.array([eta]), exact_regions=False)[0]
    assert -1e-10 <= v <= 1 + 1e-10
    if abs(eta) <= 1:
        assert v >= 1 - 1e-10
    if abs(eta) >= 2:
        assert abs(v) <= 1e-10


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_properties_a_to_d(n):
    rpt = FAM.member(n).verify()
    assert rpt["holds"], rpt


def test_even_and_center_values():
    eta = np.linspace(0, 2.5, 50)
    for n in (3, 30):
        assert np.allclose(FAM.evaluate(n, eta), FAM.evaluate(n, -eta), atol=1e-14)
        assert FAM.evaluate(n, np.array([0.0]))[0] == 1.0


def test_build_cutoff_geometry():
    assert build_cutoff(3, (-1.2, 1.2), 2.5).plateau == (-1.2, 1.2)
    with pytest.raises(GeometryInfeasible):
        build_cutoff(3, 0.8, 2.0)
    with pytest.raises(GeometryInfeasible):
        build_cutoff(3, 1.5, 1.5)


def test_samples_require_room():
    with pytest.raises(SupportOutsideGrid):
        CutoffFamily(1.0, 2.0, center=7.0).samples(Grid(), 1)


def test_samples_match_series():
    g = Grid()
    fam = CutoffFamily(1.25, 1.95, analytic=True)
    v = fam.samples(g, 5)
    assert np.abs(v - fam.evaluate(5, g.x)).max() < 1e-12


def test_mollifier_transform_plateau(moll):
    xi = np.abs(moll.grid.xi)
    for i, n in enumerate(moll.n_values):
        s = moll.spectra[i]
        assert np.abs(s[xi <= n] - 1).max() <= 1e-10
        assert np.abs(s[xi >= 2 * n]).max() <= 1e-10


def test_mollifier_mass_and_centre(moll):
    for n in moll.n_values:
        th = moll.theta(int(n))
        assert abs(th.integral() - 1) <= 1e-8
        c = evaluate(th, np.array([0.0])).real[0]
        assert n / math.pi <= c <= 2 * n / math.pi


def test_mollifier_real_even(moll):
    v = moll.theta(17).values()
    assert np.abs(v.imag).max() < 1e-13
    assert np.abs(v[1:] - v[1:][::-1]).max() < 1e-12


def test_band_budget():
    with pytest.raises(BandExceedsGrid):
        build_mollifier([450])


def test_band_partition():
    xi = np.linspace(-20, 20, 801)
    psi = band_partition(FAM, range(1, 9), xi)
    assert np.abs(psi.sum(axis=0) - FAM.evaluate(8, xi / 8)).max() <= 1e-12
    for n in range(2, 9):
        assert np.abs(psi[n - 1][np.abs(xi) <= n - 1]).max() == 0.0
    assert np.abs(psi).max() <= 1 + 1e-12


def test_decay_certificate(moll):
    c1 = verify_decay(moll, 1.0)
    assert c1.confirmed and c1.slope < 0 and c1.r2 >= 0.95
    c2 = verify_decay(moll, 2.0)
    assert c2.slope < c1.slope
    assert c2.delta >= c1.delta - 1e-12


def test_decay_with_derivatives(moll):
    cert = verify_decay(moll, 1.0, max_order=4)
    assert cert.confirmed


def test_decay_empty_region(moll):
    with pytest.raises(EmptyRegion):
        verify_decay(moll, 8.0)


def test_tail_sup_decreases(moll):
    s = [sup_norm(moll.theta(n), (1.0, 7.0)) for n in (8, 16, 32, 64)]
    assert all(b < a for a, b in zip(s, s[1:]))
