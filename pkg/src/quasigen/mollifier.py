"""Analytic cut-off sequences and the mollifier sequence θ_n.

The cut-offs are built in three layers,

    χ_n = 1_[-w, w] * ρ_ε * H_n,

where ``ρ_ε`` is the fixed smooth bump ``exp(-a / (1 - t²))`` rescaled to
``[-ε, ε]`` and ``H_n`` is the ``n``-fold convolution of uniform densities on
``[-ε_H/n, ε_H/n]`` (a cardinal B-spline). Every layer is a probability
density, so ``0 <= χ_n <= 1`` and ``χ_n = 1`` on ``|x| <= w - ε - ε_H``. All
derivatives of order ``k <= n`` can be put on ``H_n``, whose derivatives
have total variation ``n / ε_H`` per order, giving
``‖χ_n^(k)‖ <= (n/ε_H)^k`` and hence the certificate ``L = max(1, 1/ε_H)``.

The transform is closed form,

    χ̂_n(x) = 2 sin(w x)/x · ρ̂(ε x) · sinc(ε_H x / n)^n,

and space values come from the Poisson-exact trapezoid series
``χ_n(η) = (h/2π) Σ_j χ̂_n(jh) exp(iηjh)`` with ``h = π/(2r)``, which has
no discretization error on ``|η| <= 3r`` because ``χ_n`` vanishes beyond
``r``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import BandExceedsGrid, EmptyRegion, FitFailed, GeometryInfeasible, SupportOutsideGrid
from .specgrid import BandLimitedFunction, Grid, from_samples, from_spectrum, log_sup_derivatives
from .weights import WeightSequence, assoc, make_weight_sequence

SHARPNESS = 4.0
ANALYTIC_SHARE = 0.1
_S_MAX_SERIES = 2000.0  # bump transform is below 1e-50 here
_S_MAX_VALUES = 400.0  # below 1e-16: enough for plain values
_BUMP_NODES = 4096


# ---------------------------------------------------------------------------
# the fixed smooth bump


@lru_cache(maxsize=8)
def _bump_nodes(sharpness: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Half-line trapezoid nodes, weighted normalized values and the normalization constant."""
    t = np.arange(_BUMP_NODES + 1) / _BUMP_NODES
    vals = _raw_bump(t, sharpness)
    w = np.full_like(t, 2.0 / _BUMP_NODES)
    w[0] = 1.0 / _BUMP_NODES
    mass = float(np.dot(w, vals))
    return t, w * vals / mass, 1.0 / mass


def _raw_bump(t: np.ndarray, sharpness: float) -> np.ndarray:
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-sharpness / (1 - t[inside] ** 2))
    return out


def bump(t: Any, sharpness: float = SHARPNESS) -> np.ndarray:
    """Unit-mass bump ``c·exp(-a/(1-t²))`` on ``(-1, 1)``."""
    t = np.asarray(t, dtype=float)
    return _bump_nodes(sharpness)[2] * _raw_bump(t, sharpness)


def bump_transform(s: Any, sharpness: float = SHARPNESS) -> np.ndarray:
    """``ρ̂(s)`` by the trapezoid rule, spectrally accurate for a flat compact integrand."""
    s = np.asarray(s, dtype=float)
    t, wv, _ = _bump_nodes(sharpness)
    flat = s.reshape(-1)
    out = np.empty_like(flat)
    for start in range(0, flat.size, 512):
        block = flat[start : start + 512]
        out[start : start + 512] = np.cos(np.outer(block, t)) @ wv
    return out.reshape(s.shape)


def bspline_transform(n: int, xi: Any) -> np.ndarray:
    """``sinc(ξ/n)^n``, the transform of the ``n``-fold uniform convolution on ``[-1/n, 1/n]``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    z = np.asarray(xi, dtype=float) / n
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    base = np.where(small, 1 - z * z / 6 + z**4 / 120, np.sin(zs) / zs)
    return base**n


# ---------------------------------------------------------------------------
# cut-off families


@dataclass(frozen=True, eq=False)
class CutoffFamily:
    """Cut-offs equal to 1 on ``|x - c| <= plateau`` and 0 for ``|x - c| >= support``.

    With ``analytic=True`` a share of the margin goes to the B-spline layer
    ``H_n`` and members are indexed by ``n``; otherwise the family has a single
    smooth member (``n=None``).
    """

    plateau: float = 1.0
    support: float = 2.0
    center: float = 0.0
    analytic: bool = True
    sharpness: float = SHARPNESS
    analytic_share: float = ANALYTIC_SHARE
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self.support > self.plateau > 0:
            raise GeometryInfeasible(
                f"need 0 < plateau < support, got {self.plateau}, {self.support}"
            )

    @property
    def margin(self) -> float:
        return (self.support - self.plateau) / 2.0

    @property
    def eps_h(self) -> float:
        return self.analytic_share * self.margin if self.analytic else 0.0

    @property
    def eps_k(self) -> float:
        return self.margin - self.eps_h

    @property
    def width(self) -> float:
        return (self.plateau + self.support) / 2.0

    @property
    def L(self) -> float:
        """Certificate for ``‖χ_n^(k)‖ <= L (L n)^k``, ``k <= n``."""
        if not self.analytic:
            raise GeometryInfeasible("smooth family carries no analytic certificate")
        return max(1.0, 1.0 / self.eps_h)

    def _check_n(self, n: int | None) -> None:
        if self.analytic and (n is None or n < 1):
            raise ValueError("analytic family needs an index n >= 1")

    def _smooth_transform(self, x: np.ndarray) -> np.ndarray:
        w = self.width
        small = np.abs(x) < 1e-8
        xs = np.where(small, 1.0, x)
        ind = np.where(small, 2 * w, 2 * np.sin(w * xs) / xs)
        return ind * bump_transform(self.eps_k * x, self.sharpness)

    def _analytic_factor(self, n: int | None, x: np.ndarray) -> np.ndarray | float:
        if self.analytic and self.eps_h > 0:
            return bspline_transform(n, self.eps_h * x)
        return 1.0

    def transform(self, n: int | None, x: Any) -> np.ndarray:
        """Closed-form transform of the centred member (real and even)."""
        self._check_n(n)
        x = np.asarray(x, dtype=float)
        return self._smooth_transform(x) * self._analytic_factor(n, x)

    def _series(self, n: int | None, s_max: float) -> tuple[float, np.ndarray, np.ndarray]:
        key = (n, s_max)
        if key not in self._cache:
            base_key = ("base", s_max)
            if base_key not in self._cache:
                h = math.pi / (2 * self.support)
                J = int(math.ceil(s_max / (self.eps_k * h)))
                xs = h * np.arange(J + 1)
                base = self._smooth_transform(xs)
                base[1:] *= 2.0
                self._cache[base_key] = (h, xs, base * h / (2 * math.pi))
            h, xs, base = self._cache[base_key]
            self._cache[key] = (h, xs, base * self._analytic_factor(n, xs))
        return self._cache[key]

    def evaluate(self, n: int | None, eta: Any, deriv: int = 0, exact_regions: bool = True) -> np.ndarray:
        """``χ_n^(deriv)(η)`` for the member centred at ``center``.

        With ``exact_regions`` the plateau and the exterior are filled in
        exactly and the series runs only over the transition band.
        """
        self._check_n(n)
        eta = np.asarray(eta, dtype=float)
        y = np.abs(eta - self.center)
        sign = np.sign(eta - self.center)
        out = np.zeros_like(y)
        if exact_regions:
            if deriv == 0:
                out[y <= self.plateau] = 1.0
            todo = (y > self.plateau) & (y < self.support)
        else:
            todo = np.ones(y.shape, dtype=bool)
        if not todo.any():
            return out
        s_max = _S_MAX_SERIES if deriv else _S_MAX_VALUES
        _, xs, coef = self._series(n, s_max)
        yy = y[todo]
        res = np.empty_like(yy)
        # even function: cosine series; odd derivatives pick up sin and the sign of η - c
        powk = xs**deriv
        phase = (-1) ** (deriv // 2)
        for start in range(0, yy.size, 128):
            arg = np.outer(yy[start : start + 128], xs)
            trig = np.cos(arg) if deriv % 2 == 0 else -np.sin(arg)
            res[start : start + 128] = phase * (trig @ (coef * powk))
        if deriv % 2 == 1:
            res = res * sign[todo]
        out[todo] = res
        return out

    def member(self, n: int | None) -> "CutoffFunction":
        self._check_n(n)
        return CutoffFunction(self, n)

    def samples(self, grid: Grid, n: int | None = None) -> np.ndarray:
        """Values on the grid nodes (1-D) through an oversampled inverse FFT.

        The lattice is extended until ``ρ̂`` is negligible, then every
        ``m``-th fine sample is kept, so the nodes coincide with the grid.
        """
        self._check_n(n)
        if grid.d != 1:
            raise ValueError("spatial cut-offs are one-dimensional; use tensor products")
        if abs(self.center) + self.support > grid.X:
            raise SupportOutsideGrid("cut-off support leaves the grid box")
        m = max(1, int(math.ceil(_S_MAX_VALUES / (self.eps_k * grid.xi_max))))
        m = 1 << (m - 1).bit_length()
        fine = Grid(grid.X, grid.N * m)
        xi = fine.xi
        key = ("lattice", fine.X, fine.N)
        if key not in self._cache:
            self._cache[key] = self._smooth_transform(xi) * np.exp(-1j * self.center * xi)
        spec = self._cache[key] * self._analytic_factor(n, xi)
        from .specgrid import inverse

        vals = inverse(fine, spec).real[::m]
        y = np.abs(grid.x - self.center)
        vals[y <= self.plateau] = 1.0
        vals[y >= self.support] = 0.0
        return vals

    def function(self, grid: Grid, n: int | None = None, band: float | None = None) -> BandLimitedFunction:
        """Member placed on the grid.

        With ``band`` the closed-form spectrum is truncated there (useful for
        windows that must enter products); otherwise the sampled values
        define a full-band function.
        """
        if band is None:
            return from_samples(grid, self.samples(grid, n))
        xi = grid.xi
        spec = self.transform(n, xi) * np.exp(-1j * self.center * xi)
        return from_spectrum(grid, spec, band=band, full_band=True)


@dataclass(frozen=True)
class CutoffFunction:
    """One member ``χ_n`` of a cut-off family."""

    family: CutoffFamily
    n: int | None

    @property
    def L(self) -> float:
        return self.family.L

    @property
    def plateau(self) -> tuple[float, float]:
        c = self.family.center
        return (c - self.family.plateau, c + self.family.plateau)

    @property
    def r(self) -> float:
        return self.family.support

    def __call__(self, eta: Any, deriv: int = 0) -> np.ndarray:
        return self.family.evaluate(self.n, eta, deriv)

    def transform(self, x: Any) -> np.ndarray:
        return self.family.transform(self.n, x)

    def verify(self, points: int = 801, max_order: int = 8) -> dict[str, Any]:
        """Numerical check of properties (a)-(d) on a fine evaluation grid."""
        fam = self.family
        c = fam.center
        eta = np.linspace(c - 1.25 * fam.support, c + 1.25 * fam.support, points)
        raw = fam.evaluate(self.n, eta, exact_regions=False)
        y = np.abs(eta - c)
        a_ok = bool(raw.min() >= -1e-10 and raw.max() <= 1 + 1e-10)
        plateau_err = float(np.abs(raw[y <= fam.plateau] - 1).max(initial=0.0))
        outside_err = float(np.abs(raw[y >= fam.support]).max(initial=0.0))
        even_err = float(np.abs(raw - raw[::-1]).max()) if c == 0 else 0.0
        orders = []
        c_ok = True
        if fam.analytic:
            L = fam.L
            band = eta[(y > fam.plateau) & (y < fam.support)]
            for k in range(1, min(self.n, max_order) + 1):
                sup = float(np.abs(fam.evaluate(self.n, band, deriv=k)).max())
                bound = L * (L * self.n) ** k
                orders.append({"order": k, "sup": sup, "bound": bound})
                c_ok &= sup <= bound
        return {
            "n": self.n,
            "range_ok": a_ok,
            "derivative_bounds_ok": bool(c_ok),
            "derivatives": orders,
            "plateau_error": plateau_err,
            "outside_error": outside_err,
            "even_error": even_err,
            "holds": bool(a_ok and c_ok and plateau_err <= 1e-10 and outside_err <= 1e-10 and even_err <= 1e-12),
        }


def build_cutoff(n: int, plateau: float | tuple[float, float] = 1.0, support: float | tuple[float, float] = 2.0,
                 **kwargs: Any) -> CutoffFunction:
    """Analytic cut-off ``χ_n`` that equals 1 on ``plateau`` and vanishes outside ``support``.

    Intervals are accepted as symmetric pairs or as half-widths. The plateau
    must contain ``[-1, 1]``.
    """
    a = _half_width(plateau)
    r = _half_width(support)
    if a < 1:
        raise GeometryInfeasible("plateau must contain [-1, 1]")
    if r <= a:
        raise GeometryInfeasible(f"plateau {a} does not fit inside support {r}")
    return CutoffFamily(a, r, **kwargs).member(n)


def _half_width(v: float | Sequence[float]) -> float:
    if np.ndim(v) == 0:
        return float(v)
    lo, hi = v
    if abs(lo + hi) > 1e-12:
        raise GeometryInfeasible("intervals must be symmetric about 0")
    return float(hi)


# ---------------------------------------------------------------------------
# mollifier sequence


@dataclass
class DecayCertificate:
    c: float
    max_order: int
    n_values: list[int]
    log_sups: list[list[float]]
    gamma: float
    delta: float
    S: float
    slope: float
    intercept: float
    r2: float
    residuals: list[float]
    confirmed: bool
    note: str = "fitted from finite data, not a proof"


@dataclass(eq=False)
class MollifierSequence:
    """The family ``θ_n`` with ``θ̂_n(ξ) = χ_n(ξ/n)`` on a grid (tensor product in 2-D)."""

    grid: Grid
    family: CutoffFamily
    n_values: np.ndarray
    spectra: np.ndarray
    certificates: dict[float, DecayCertificate] = field(default_factory=dict)

    def index(self, n: int) -> int:
        hits = np.nonzero(self.n_values == n)[0]
        if not hits.size:
            raise KeyError(f"n={n} not in the built range")
        return int(hits[0])

    def theta(self, n: int) -> BandLimitedFunction:
        return BandLimitedFunction(self.grid, self.spectra[self.index(n)], self.family.support * n, "even")

    def cutoff(self, n: int) -> CutoffFunction:
        return self.family.member(n)

    @property
    def r(self) -> float:
        return self.family.support


def mollifier_spectrum_1d(family: CutoffFamily, grid_xi: np.ndarray, n: int) -> np.ndarray:
    return family.evaluate(n, grid_xi / n)


def build_mollifier(
    n_range: Iterable[int],
    grid: Grid | None = None,
    family: CutoffFamily | None = None,
    jobs: int | None = None,
) -> MollifierSequence:
    """Spectra ``χ_n(ξ/n)`` for every ``n`` in ``n_range``."""
    grid = grid or Grid()
    family = family or CutoffFamily()
    n_values = np.array(sorted(set(int(n) for n in n_range)))
    if n_values.size == 0 or n_values[0] < 1:
        raise ValueError("n_range must contain positive integers")
    if family.support * n_values[-1] > grid.xi_max / 2 * (1 + 1e-12):
        raise BandExceedsGrid(
            f"band r*n_max = {family.support * n_values[-1]:.6g} exceeds Ξ/2 = {grid.xi_max / 2:.6g}"
        )
    xi = grid.xi
    family._series(int(n_values[0]), _S_MAX_VALUES)  # warm the shared bump cache

    def one(n: int) -> np.ndarray:
        s = family.evaluate(int(n), xi / n).astype(complex)
        return s if grid.d == 1 else np.multiply.outer(s, s)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        spectra = np.stack(list(pool.map(one, n_values)))
    return MollifierSequence(grid, family, n_values, spectra)


def band_partition(family: CutoffFamily, n_values: Iterable[int], xi: Any) -> np.ndarray:
    """``ψ_1 = χ_1``, ``ψ_n = χ_n(·/n) - χ_{n-1}(·/(n-1))`` evaluated at ``xi``."""
    xi = np.asarray(xi, dtype=float)
    n_values = list(n_values)
    cache: dict[int, np.ndarray] = {}

    def chi(n: int) -> np.ndarray:
        if n not in cache:
            cache[n] = family.evaluate(n, xi / n)
        return cache[n]

    rows = [chi(n) - (chi(n - 1) if n > 1 else 0.0) for n in n_values]
    return np.stack(rows)


def verify_decay(
    M: MollifierSequence,
    c: float,
    max_order: int = 0,
    weight: WeightSequence | None = None,
    n_min: int = 1,
) -> DecayCertificate:
    """Fit ``sup_{|x|>=c} |θ_n^(α)| <= S exp(-M(δn)) γ^|α| M_α`` from grid data.

    ``γ`` is the smallest power of two for which the maximum over ``α`` is not
    attained at ``max_order``. Decay is confirmed when the straight-line fit
    of the resulting per-``n`` value against ``n`` has negative slope and
    ``R² >= 0.95``. ``δ`` is the largest grid value for which
    ``t_n + M(δn)`` stays bounded.
    """
    W = weight or make_weight_sequence("factorial")
    grid = M.grid
    hi = grid.X - grid.dx
    if c >= hi:
        raise EmptyRegion(f"no points with |x| >= {c} inside the box")
    sel = M.n_values >= n_min
    ns = M.n_values[sel]
    K = (c, hi) if grid.d == 1 else ((c, hi), (-grid.X, hi))
    logs = log_sup_derivatives(grid, M.spectra[sel], K, max_order)
    logM = W.extended(max_order + 1).logM[: max_order + 1]
    orders = np.arange(max_order + 1)
    gamma = 1.0
    for e in range(-2, 11):
        gamma = 2.0**e
        t = logs - orders * math.log(gamma) - logM
        if max_order == 0 or np.all(np.argmax(t, axis=1) < max_order):
            break
    t = np.max(logs - orders * math.log(gamma) - logM, axis=1)
    if not np.all(np.isfinite(t)):
        raise FitFailed("zero suprema in the decay region")
    A = np.vstack([ns, np.ones_like(ns)]).T.astype(float)
    (slope, intercept), *_ = np.linalg.lstsq(A, t, rcond=None)
    fitted = slope * ns + intercept
    ss_res = float(np.sum((t - fitted) ** 2))
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    delta, logS = 0.0, float(t.max())
    for e in range(-10, 3):
        dl = 2.0**e
        g = t + assoc(W, dl * ns)
        half = g.size // 2 + 1
        if g[half:].max() <= g[:half].max() + 0.25:
            delta, logS = dl, float(g.max())
    return DecayCertificate(
        c=float(c),
        max_order=max_order,
        n_values=[int(n) for n in ns],
        log_sups=logs.tolist(),
        gamma=gamma,
        delta=delta,
        S=math.exp(logS),
        slope=float(slope),
        intercept=float(intercept),
        r2=float(r2),
        residuals=(t - fitted).tolist(),
        confirmed=bool(slope < 0 and r2 >= 0.95),
    )
