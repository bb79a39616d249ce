"""Band-limited functions on uniform periodic grids.

Conventions: on the box ``[-X, X)^d`` with ``N`` points per axis the nodes
are ``x_j = -X + j*Δ``, ``Δ = 2X/N``. Spectra are stored in FFT order on the
lattice ``ξ_k = 2π k / (2X)`` and approximate the continuous transform
``ĝ(ξ) = ∫ g(x) exp(-i x ξ) dx`` through

    ĝ(ξ_k) = Δ^d · exp(i X ξ_k) · fft(g)[k].

For a function whose transform vanishes beyond ``Ξ = π/Δ`` and whose
support fits the box this is exact, which is why every object in the
package is represented through its spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BandExceedsGrid, BandOverflow, EmptyRegion, GridMismatch, OrderTooHigh

MAX_ORDER = 20
_ZERO_REL = 1e-14


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-X, X)^d`` with ``N`` samples per axis."""

    X: float = 8.0
    N: int = 4096
    d: int = 1

    def __post_init__(self) -> None:
        if self.d not in (1, 2):
            raise ValueError("only d = 1 or 2 is supported")
        if self.N < 4 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if self.X <= 0:
            raise ValueError("X must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.X / self.N

    @property
    def xi_max(self) -> float:
        """Spectral cutoff Ξ = π/Δ."""
        return math.pi / self.dx

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def x(self) -> np.ndarray:
        return -self.X + self.dx * np.arange(self.N)

    @property
    def xi(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.N, self.dx)

    def mesh(self) -> tuple[np.ndarray, ...]:
        if self.d == 1:
            return (self.x,)
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    def xi_mesh(self) -> tuple[np.ndarray, ...]:
        if self.d == 1:
            return (self.xi,)
        return tuple(np.meshgrid(self.xi, self.xi, indexing="ij"))

    def xi_norm(self) -> np.ndarray:
        """Per-point ℓ∞ norm of the frequency (the band is an ℓ∞ ball)."""
        mesh = self.xi_mesh()
        out = np.abs(mesh[0])
        for m in mesh[1:]:
            out = np.maximum(out, np.abs(m))
        return out

    def phase(self) -> np.ndarray:
        ph = np.exp(1j * self.X * self.xi)
        if self.d == 1:
            return ph
        return np.multiply.outer(ph, ph)

    @classmethod
    def for_band(cls, band: float, X: float = 8.0, d: int = 1) -> "Grid":
        """Smallest grid on ``[-X, X)`` whose Nyquist margin covers ``band`` twice."""
        N = 4
        while math.pi * N / (2 * X) < 2 * band:
            N *= 2
        return cls(X=X, N=N, d=d)

    def to_spec(self) -> dict[str, Any]:
        return {"X": self.X, "N": self.N, "d": self.d}


def forward(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Samples to spectrum (last ``d`` axes)."""
    axes = tuple(range(-grid.d, 0))
    return grid.dx**grid.d * grid.phase() * np.fft.fftn(values, axes=axes)


def inverse(grid: Grid, spectrum: np.ndarray) -> np.ndarray:
    """Spectrum to samples (last ``d`` axes)."""
    axes = tuple(range(-grid.d, 0))
    return np.fft.ifftn(spectrum * np.conj(grid.phase()), axes=axes) / grid.dx**grid.d


@dataclass(frozen=True, eq=False)
class BandLimitedFunction:
    """A function given by its spectrum on the grid lattice.

    ``band`` is an ℓ∞ radius; coefficients beyond it are zero. Functions
    built by :func:`from_spectrum` obey ``band <= Ξ/2``; sampled functions
    may use the full grid band ``Ξ``.
    """

    grid: Grid
    spectrum: np.ndarray
    band: float
    parity: str = "none"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- sample side -----------------------------------------------------
    def values(self) -> np.ndarray:
        if "values" not in self._cache:
            self._cache["values"] = inverse(self.grid, self.spectrum)
        return self._cache["values"]

    def real_values(self) -> np.ndarray:
        return self.values().real

    def is_real(self, tol: float = 1e-12) -> bool:
        v = self.values()
        scale = max(float(np.abs(v).max()), 1e-300)
        return bool(np.abs(v.imag).max() <= tol * scale)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "BandLimitedFunction") -> None:
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")

    def __add__(self, other: "BandLimitedFunction") -> "BandLimitedFunction":
        self._check(other)
        parity = self.parity if self.parity == other.parity else "none"
        return BandLimitedFunction(
            self.grid, self.spectrum + other.spectrum, max(self.band, other.band), parity
        )

    def __sub__(self, other: "BandLimitedFunction") -> "BandLimitedFunction":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "BandLimitedFunction":
        return BandLimitedFunction(self.grid, c * self.spectrum, self.band, self.parity)

    def __rmul__(self, c: complex) -> "BandLimitedFunction":
        return self.scaled(c)

    def integral(self) -> complex | float:
        """``∫ f``, the spectrum at ξ = 0."""
        v = complex(self.spectrum.reshape(-1)[0])
        return v.real if abs(v.imag) <= 1e-14 * max(abs(v), 1.0) else v


def _infer_band(grid: Grid, spectrum: np.ndarray) -> float:
    mag = np.abs(spectrum)
    top = mag.max()
    if top == 0:
        return 0.0
    return float(grid.xi_norm()[mag > _ZERO_REL * top].max())


def _truncate(grid: Grid, spectrum: np.ndarray, band: float) -> np.ndarray:
    out = np.array(spectrum, dtype=complex)
    out[..., grid.xi_norm() > band * (1 + 1e-12)] = 0.0
    return out


def from_spectrum(
    grid: Grid,
    assignment: np.ndarray | Callable[..., np.ndarray],
    band: float | None = None,
    parity: str = "none",
    full_band: bool = False,
) -> BandLimitedFunction:
    """Place a spectrum on the grid.

    ``assignment`` is either an array in FFT order or a callable evaluated
    on the lattice (one argument per axis). Coefficients beyond ``band`` are
    set to zero. Without ``full_band`` the band must not exceed ``Ξ/2``.
    """
    if callable(assignment):
        spec = np.asarray(assignment(*grid.xi_mesh()), dtype=complex)
    else:
        spec = np.asarray(assignment, dtype=complex)
    if spec.shape != grid.shape:
        raise GridMismatch(f"spectrum shape {spec.shape} does not match grid {grid.shape}")
    if band is None:
        band = _infer_band(grid, spec)
    limit = grid.xi_max if full_band else grid.xi_max / 2
    if band > limit * (1 + 1e-12):
        raise BandExceedsGrid(f"band {band:.6g} exceeds {limit:.6g}")
    return BandLimitedFunction(grid, _truncate(grid, spec, band), float(band), parity)


def from_samples(grid: Grid, values: np.ndarray, band: float | None = None) -> BandLimitedFunction:
    """Spectrum of sampled data. Without ``band`` the full grid band ``Ξ`` is declared."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise GridMismatch(f"samples shape {values.shape} does not match grid {grid.shape}")
    spec = forward(grid, values)
    return from_spectrum(grid, spec, band=grid.xi_max if band is None else band, full_band=True)


def zero(grid: Grid) -> BandLimitedFunction:
    return BandLimitedFunction(grid, np.zeros(grid.shape, dtype=complex), 0.0, "even")


def _as_multi(order: int | Sequence[int], d: int) -> tuple[int, ...]:
    if isinstance(order, (int, np.integer)):
        if d != 1:
            raise ValueError("use a multi-index for d > 1")
        return (int(order),)
    alpha = tuple(int(a) for a in order)
    if len(alpha) != d or min(alpha) < 0:
        raise ValueError(f"bad multi-index {alpha}")
    return alpha


def derivative_multiplier(grid: Grid, order: int | Sequence[int], scale: float = 1.0) -> np.ndarray:
    """``(iξ/scale)^α`` on the lattice."""
    alpha = _as_multi(order, grid.d)
    mesh = grid.xi_mesh()
    mult = np.ones(grid.shape, dtype=complex)
    for a, xi in zip(alpha, mesh):
        if a:
            mult = mult * (1j * xi / scale) ** a
    return mult


def derivative(
    f: BandLimitedFunction, order: int | Sequence[int], max_order: int = MAX_ORDER
) -> BandLimitedFunction:
    """``∂^α f``; the spectrum is multiplied by ``(iξ)^α`` and the band kept."""
    alpha = _as_multi(order, f.grid.d)
    if sum(alpha) > max_order:
        raise OrderTooHigh(f"order {sum(alpha)} > {max_order}")
    parity = f.parity if f.parity == "none" or sum(alpha) % 2 == 0 else "odd"
    return BandLimitedFunction(
        f.grid, f.spectrum * derivative_multiplier(f.grid, alpha), f.band, parity
    )


def convolve(f: BandLimitedFunction, g: BandLimitedFunction) -> BandLimitedFunction:
    f._check(g)
    parity = "even" if f.parity == g.parity == "even" else "none"
    return BandLimitedFunction(f.grid, f.spectrum * g.spectrum, min(f.band, g.band), parity)


def multiply(f: BandLimitedFunction, g: BandLimitedFunction) -> BandLimitedFunction:
    """Pointwise product; its band is ``B1 + B2`` and must fit the grid."""
    f._check(g)
    band = f.band + g.band
    if band > f.grid.xi_max * (1 + 1e-12):
        raise BandOverflow(f"product band {band:.6g} exceeds grid band {f.grid.xi_max:.6g}")
    spec = forward(f.grid, f.values() * g.values())
    return BandLimitedFunction(f.grid, _truncate(f.grid, spec, band), band)


# ---------------------------------------------------------------------------
# norms


def _region_mask(coords: Sequence[np.ndarray], K: Any) -> np.ndarray:
    boxes = [K] if np.ndim(K[0]) == 0 else list(K)
    if len(boxes) != len(coords):
        raise ValueError("region dimension does not match grid")
    mask = np.ones(coords[0].shape, dtype=bool)
    for c, (a, b) in zip(coords, boxes):
        mask &= (c >= a - 1e-12) & (c <= b + 1e-12)
    return mask


def oversampled_values(grid: Grid, spectrum: np.ndarray, factor: int) -> tuple[np.ndarray, tuple]:
    """Exact trigonometric interpolation on a grid ``factor`` times finer.

    ``spectrum`` may carry leading batch axes.
    """
    N = grid.N
    M = N * factor
    fine = Grid(grid.X, M, grid.d)
    padded = np.zeros(spectrum.shape[: spectrum.ndim - grid.d] + fine.shape, dtype=complex)
    k = np.fft.fftfreq(N, 1.0 / N).astype(int)
    idx = np.where(k >= 0, k, k + M)
    if grid.d == 1:
        padded[..., idx] = spectrum
    else:
        padded[..., idx[:, None], idx[None, :]] = spectrum
    return inverse(fine, padded), fine.mesh()


def default_oversample(grid: Grid) -> int:
    return 4 if grid.d == 1 else 2


def evaluate(f: BandLimitedFunction, points: Any) -> np.ndarray:
    """Exact trigonometric interpolant at arbitrary points.

    ``points`` has shape ``(..., d)`` (or ``(...)`` in 1-D).
    """
    grid = f.grid
    pts = np.asarray(points, dtype=float)
    if grid.d == 1:
        pts = pts[..., None]
    flat = pts.reshape(-1, grid.d)
    nz = np.nonzero(f.spectrum)
    coef = f.spectrum[nz]
    freqs = np.stack([grid.xi[i] for i in nz], axis=-1)
    out = np.empty(flat.shape[0], dtype=complex)
    for start in range(0, flat.shape[0], 256):
        block = flat[start : start + 256]
        out[start : start + 256] = np.exp(1j * block @ freqs.T) @ coef
    return (out / (2 * grid.X) ** grid.d).reshape(pts.shape[:-1])


def sup_norm(
    f: BandLimitedFunction, K: Any, oversample: int | None = None, refine: bool = True
) -> float:
    """``sup_K |f|``.

    The maximum is located on a grid ``oversample`` times finer (exact
    interpolation); in 1-D it is then polished by a bounded scalar search
    on the interpolant.
    """
    grid = f.grid
    factor = oversample or default_oversample(grid)
    vals, coords = oversampled_values(grid, f.spectrum, factor)
    mask = _region_mask(coords, K)
    if not mask.any():
        raise EmptyRegion(f"no grid points in {K}")
    mags = np.abs(vals[mask])
    best = float(mags.max())
    if not refine or grid.d != 1 or best == 0.0:
        return best
    x0 = float(coords[0][mask][int(mags.argmax())])
    h = grid.dx / factor
    a, b = (K if np.ndim(K[0]) == 0 else K[0])
    lo, hi = max(a, x0 - h), min(b, x0 + h)
    if hi <= lo:
        return best
    res = minimize_scalar(
        lambda t: -abs(evaluate(f, t)), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12 * max(1.0, abs(x0))},
    )
    ends = np.abs(evaluate(f, np.array([lo, hi]))).max()
    return max(best, float(-res.fun), float(ends))


def batch_sup(grid: Grid, spectra: np.ndarray, K: Any, oversample: int | None = None) -> np.ndarray:
    """``sup_K |·|`` for a stack of spectra (leading axes are batch axes)."""
    factor = oversample or default_oversample(grid)
    vals, coords = oversampled_values(grid, spectra, factor)
    mask = _region_mask(coords, K)
    if not mask.any():
        raise EmptyRegion(f"no grid points in {K}")
    return np.abs(vals[..., mask]).max(axis=-1)


def log_sup_derivatives(
    grid: Grid,
    spectra: np.ndarray,
    K: Any,
    max_order: int,
    oversample: int | None = None,
) -> np.ndarray:
    """``log sup_K |∂^α f|`` for every ``|α| <= max_order``, maximized over ``|α| = k``.

    Returns shape ``batch + (max_order + 1,)``. Each order is computed as
    ``(iξ/s)^α ĝ`` with ``s`` the top lattice frequency so large powers never
    overflow; ``k log s`` is added back in the log domain. Zero suprema map
    to ``-inf``.
    """
    if max_order > MAX_ORDER:
        raise OrderTooHigh(f"order {max_order} > {MAX_ORDER}")
    live = np.abs(spectra).reshape((-1,) + grid.shape).max(axis=0) > 0
    s = float(grid.xi_norm()[live].max()) if live.any() else 1.0
    s = max(s, 1.0)
    batch = spectra.shape[: spectra.ndim - grid.d]
    out = np.full(batch + (max_order + 1,), -np.inf)
    for k in range(max_order + 1):
        best = np.full(batch, -np.inf)
        for alpha in _multi_indices(k, grid.d):
            mult = derivative_multiplier(grid, alpha, scale=s)
            sup = batch_sup(grid, spectra * mult, K, oversample)
            with np.errstate(divide="ignore"):
                best = np.maximum(best, np.log(sup) + k * math.log(s))
        out[..., k] = best
    return out


def _multi_indices(k: int, d: int):
    if d == 1:
        yield (k,)
    else:
        for a in range(k + 1):
            yield (a, k - a)
