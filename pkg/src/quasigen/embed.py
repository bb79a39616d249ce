"""Embedding of compactly supported functionals and the constructions built on it.

``embed`` realizes ``f ↦ (f * θ_n)_n`` term by term in the spectrum:

* ``c·δ_a^(k)``  →  ``c (iξ)^k e^{-iaξ} χ_n(ξ/n)``
* density ``1_[a,b]``  →  ``(e^{-iaξ} - e^{-ibξ})/(iξ) · χ_n(ξ/n)``
* density samples ``g``  →  ``ĝ · χ_n(ξ/n)``
* ``p.v. 1/x``  →  ``-iπ sgn(ξ) · χ_n(ξ/n)``

The module also estimates supports by tiling, measures the consistency of
the embedding with smooth functions, builds the soft extension of a
representative and runs the demonstration that multiplication by ``x``
does not commute with the embedding of ``δ``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import (
    CertificateMissing,
    CutoffGeometry,
    ResolutionTooFine,
    SupportOutsideGrid,
)
from .genfunc import (
    GeneralizedFunctionRep,
    UltradiffOperator,
    bounded_sequence,
    classify,
    _negligible,
)
from .mollifier import CutoffFamily, MollifierSequence, build_mollifier
from .specgrid import (
    BandLimitedFunction,
    Grid,
    forward,
    inverse,
    oversampled_values,
    _region_mask,
)
from .weights import WeightSequence, assoc, check_conditions, counting_function, make_weight_sequence

SUPPORT_MARGIN = 2.0
NOISE_FLOOR = 1e-13


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Dirac:
    """``c · ∂^k δ_a``."""

    a: float | tuple[float, ...] = 0.0
    k: int | tuple[int, ...] = 0
    c: complex = 1.0


@dataclass(frozen=True)
class PrincipalValue:
    """``c · p.v. 1/x`` (one-dimensional)."""

    c: complex = 1.0


@dataclass(frozen=True, eq=False)
class Density:
    """An integrable density.

    ``kind="indicator"`` uses the closed-form transform of ``1_[a,b]``;
    ``kind="samples"`` takes grid samples from ``func(x)``;
    ``kind="heaviside"`` is ``H(x - a)`` and must be windowed by ``b``
    (it then equals the indicator of ``[a, b]``).
    """

    kind: str = "indicator"
    a: float = -1.0
    b: float | None = 1.0
    func: Callable[[np.ndarray], np.ndarray] | None = None
    c: complex = 1.0

    def __post_init__(self) -> None:
        if self.kind == "heaviside" and self.b is None:
            raise ValueError("an unwindowed Heaviside function is not compactly supported")
        if self.kind == "samples" and self.func is None:
            raise ValueError("sampled density needs func")
        if self.kind not in ("indicator", "samples", "heaviside"):
            raise ValueError(f"unknown density kind {self.kind!r}")


Term = Dirac | PrincipalValue | Density


@dataclass(frozen=True)
class CompactFunctional:
    """A finite sum of terms with a declared support (list of intervals or boxes)."""

    terms: tuple[Term, ...]
    support: tuple[Any, ...] | None = None

    @classmethod
    def delta(cls, a: float = 0.0, k: int = 0, c: complex = 1.0) -> "CompactFunctional":
        return cls((Dirac(a, k, c),), ((a, a),))

    @classmethod
    def from_json(cls, spec: dict[str, Any]) -> "CompactFunctional":
        terms: list[Term] = []
        support: list[Any] = []
        for t in spec["terms"]:
            if "dirac" in t:
                d = t["dirac"]
                a = d.get("a", 0.0)
                a = tuple(a) if isinstance(a, list) else float(a)
                k = d.get("k", 0)
                k = tuple(k) if isinstance(k, list) else int(k)
                terms.append(Dirac(a, k, complex(d.get("c", 1.0))))
                support.append((a, a) if np.ndim(a) == 0 else tuple((v, v) for v in a))
            elif "pv" in t:
                terms.append(PrincipalValue(complex(t["pv"].get("c", 1.0))))
            elif "density" in t:
                d = t["density"]
                kind = d.get("kind", "indicator")
                if kind == "heaviside" and "b" not in d:
                    raise ValueError("an unwindowed Heaviside function is not compactly supported")
                dens = Density(kind, float(d.get("a", -1.0)), float(d["b"]) if "b" in d else None,
                               c=complex(d.get("c", 1.0)))
                terms.append(dens)
                support.append((dens.a, dens.b))
            else:
                raise ValueError(f"unknown term {t}")
        if "support" in spec:
            raw = spec["support"]
            if len(raw) == 2 and all(np.ndim(v) == 0 for v in raw):
                raw = [raw]  # a single interval
            support = [tuple(s) for s in raw]
        return cls(tuple(terms), tuple(support) if support else None)

    def __add__(self, other: "CompactFunctional") -> "CompactFunctional":
        sup = None
        if self.support is not None and other.support is not None:
            sup = self.support + other.support
        return CompactFunctional(self.terms + other.terms, sup)

    def apply(self, P: UltradiffOperator) -> "CompactFunctional":
        """``P(D) f`` for a polynomial operator acting on Dirac terms (1-D)."""
        a = np.exp(P.log_abs) * P.phases
        live = np.nonzero(np.isfinite(P.log_abs))[0]
        if P.series:
            raise ValueError("only polynomial operators act on functionals here")
        out: list[Term] = []
        for t in self.terms:
            if not isinstance(t, Dirac) or np.ndim(t.k):
                raise ValueError("operator application is implemented for 1-D Dirac terms")
            for p in live:
                # D^p = (-i)^p ∂^p
                out.append(Dirac(t.a, int(t.k) + int(p), t.c * a[p] * (-1j) ** int(p)))
        return CompactFunctional(tuple(out), self.support)


def _term_spectrum(term: Term, grid: Grid) -> np.ndarray:
    mesh = grid.xi_mesh()
    if isinstance(term, Dirac):
        a = (term.a,) * 1 if np.ndim(term.a) == 0 else tuple(term.a)
        k = (term.k,) if np.ndim(term.k) == 0 else tuple(term.k)
        if len(a) != grid.d or len(k) != grid.d:
            raise ValueError("Dirac term dimension does not match the grid")
        out = np.full(grid.shape, complex(term.c))
        for ai, ki, xi in zip(a, k, mesh):
            out = out * (1j * xi) ** ki * np.exp(-1j * ai * xi)
        return out
    if grid.d != 1:
        raise ValueError("principal values and densities are one-dimensional")
    xi = mesh[0]
    if isinstance(term, PrincipalValue):
        return term.c * (-1j * math.pi) * np.sign(xi)
    if term.kind in ("indicator", "heaviside"):
        a, b = term.a, term.b
        small = np.abs(xi) < 1e-12
        xs = np.where(small, 1.0, xi)
        val = (np.exp(-1j * a * xs) - np.exp(-1j * b * xs)) / (1j * xs)
        return term.c * np.where(small, b - a, val)
    return term.c * forward(grid, np.asarray(term.func(grid.x), dtype=complex))


def _check_support(f: CompactFunctional, grid: Grid) -> None:
    lim = grid.X - SUPPORT_MARGIN
    pts: list[float] = []
    for t in f.terms:
        if isinstance(t, Dirac):
            pts.extend(np.atleast_1d(t.a).tolist())
        elif isinstance(t, Density) and t.kind != "samples":
            pts.extend([t.a, t.b])
    if f.support is not None:
        for s in f.support:
            pts.extend(np.ravel(s).tolist())
    if pts and max(abs(p) for p in pts) > lim:
        raise SupportOutsideGrid(f"support reaches {max(abs(p) for p in pts)}; limit is {lim}")


def embed(f: CompactFunctional, M: MollifierSequence, weight: WeightSequence | None = None,
          jobs: int | None = None) -> GeneralizedFunctionRep:
    """``(f * θ_n)_n`` computed in the spectrum."""
    grid = M.grid
    _check_support(f, grid)
    base = np.zeros(grid.shape, dtype=complex)
    for t in f.terms:
        base = base + _term_spectrum(t, grid)
    spectra = M.spectra * base[None, ...]
    bands = M.family.support * M.n_values.astype(float)
    return GeneralizedFunctionRep(grid, M.n_values, spectra, bands, weight=weight)


def constant_embed(phi: BandLimitedFunction, n_values: Iterable[int], domain: Any = None,
                   weight: WeightSequence | None = None) -> GeneralizedFunctionRep:
    """``σ(φ) = (φ)_n``."""
    ns = np.asarray(list(n_values))
    spectra = np.broadcast_to(phi.spectrum, (ns.size,) + phi.grid.shape).copy()
    return GeneralizedFunctionRep(phi.grid, ns, spectra, np.full(ns.size, phi.band), domain, weight)


# ---------------------------------------------------------------------------
# support


@dataclass
class SupportEstimate:
    intervals: list[tuple[float, float]]
    resolution: float
    tiles: list[dict[str, Any]]
    components: int
    finite_evidence: bool = True

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def support(rep: GeneralizedFunctionRep, rho: float, region: tuple[float, float] | None = None,
            oversample: int = 2) -> SupportEstimate:
    """Closure of the tiles of size ``rho`` on which the zeroth-order negligibility test fails.

    Tiles are anchored at multiples of ``rho``; each is tested on the cell
    widened by ``rho/8`` per side, so neighbours overlap by a quarter cell.
    """
    grid = rep.grid
    if grid.d != 1:
        raise ValueError("support estimation is implemented in 1-D")
    if rho < 2 * grid.dx:
        raise ResolutionTooFine(f"ρ = {rho} < 2Δ = {2 * grid.dx}")
    lo, hi = region or rep.domain
    pad = rho / 8
    j0 = math.ceil((lo + pad) / rho - 1e-9)
    j1 = math.floor((hi - pad) / rho + 1e-9)
    vals, coords = oversampled_values(grid, rep.spectra, oversample)
    mags = np.abs(vals)
    x = coords[0]
    tiles = []
    failing = []
    for j in range(j0, j1):
        cell = (j * rho, (j + 1) * rho)
        test = (cell[0] - pad, cell[1] + pad)
        mask = _region_mask((x,), test)
        with np.errstate(divide="ignore"):
            L = np.log(mags[:, mask].max(axis=1))[:, None]
        if rep.noise is not None:
            L = np.where(L <= np.log(rep.noise)[:, None], -np.inf, L)
        r = _negligible(rep, test, "negligible-zeroth", L, None, 0.25)
        tiles.append({"cell": cell, "tested": test, "negligible": r.verdict, "lam": r.lam})
        if not r.verdict:
            failing.append(cell)
    merged: list[tuple[float, float]] = []
    for a, b in failing:
        if merged and a <= merged[-1][1] + 1e-12:
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return SupportEstimate(merged, rho, tiles, len(merged))


# ---------------------------------------------------------------------------
# decay bookkeeping


@dataclass
class DecayReport:
    n_values: list[int]
    defects: list[float]
    n0: int | None
    floor: float
    slope: float
    confirmed: bool
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def ratio_test(ns: Sequence[int], e: Sequence[float], floor: float) -> tuple[int | None, bool]:
    """Smallest ``n0`` with ``e_{2n} <= e_n/2`` (or ``e_{2n} <= floor``) for every tested ``n >= n0``."""
    table = dict(zip((int(n) for n in ns), e))
    pairs = sorted(n for n in table if 2 * n in table)
    ok = [table[2 * n] <= table[n] / 2 or table[2 * n] <= floor for n in pairs]
    n0 = None
    for i in range(len(pairs) - 1, -1, -1):
        if not ok[i]:
            break
        n0 = pairs[i]
    return n0, n0 is not None


def _decay_report(ns: np.ndarray, e: np.ndarray, floor: float, n0_max: int = 16) -> DecayReport:
    n0, _ = ratio_test(ns, e, floor)
    pos = e > floor
    slope = float(np.polyfit(ns[pos], np.log(e[pos]), 1)[0]) if pos.sum() >= 2 else -math.inf
    at_floor = bool(np.all(e[ns >= n0_max] <= floor)) if np.any(ns >= n0_max) else False
    confirmed = (n0 is not None and n0 <= n0_max) or at_floor
    detail = "noise floor reached" if at_floor else ("ratio test" if confirmed else "no decay confirmed")
    return DecayReport(ns.tolist(), e.tolist(), n0, floor, slope, bool(confirmed), detail)


def _grid_sup(grid: Grid, vals: np.ndarray, K: tuple[float, float]) -> np.ndarray:
    mask = _region_mask((grid.x,), K)
    return np.abs(vals[..., mask]).max(axis=-1)


# ---------------------------------------------------------------------------
# consistency with smooth functions


def consistency_defect(
    phi: Callable[[np.ndarray], np.ndarray],
    kappa: CutoffFamily,
    omega_prime: tuple[float, float],
    M: MollifierSequence,
) -> DecayReport:
    """``e_n = sup_{Ω'} |(κφ) * θ_n - φ|`` with the ratio-test verdict.

    ``κ`` must equal 1 on a neighbourhood of the closure of ``Ω'``.
    """
    grid = M.grid
    a, b = omega_prime
    lo, hi = kappa.center - kappa.plateau, kappa.center + kappa.plateau
    if not (lo < a and b < hi):
        raise CutoffGeometry(f"plateau [{lo}, {hi}] does not cover a neighbourhood of [{a}, {b}]")
    x = grid.x
    target = np.asarray(phi(x), dtype=complex)
    spec = forward(grid, kappa.samples(grid) * target)
    conv = inverse(grid, M.spectra * spec[None, :])
    e = _grid_sup(grid, conv - target[None, :], omega_prime)
    scale = max(1.0, float(np.abs(target[_region_mask((x,), omega_prime)]).max()))
    return _decay_report(M.n_values, e, NOISE_FLOOR * scale)


def kappa_density(phi: Callable[[np.ndarray], np.ndarray], kappa: CutoffFamily, grid: Grid) -> CompactFunctional:
    """The compactly supported density ``κφ`` as a functional."""
    samples = kappa.samples(grid)
    dens = Density("samples", func=lambda x: samples * phi(x))
    return CompactFunctional((dens,), ((kappa.center - kappa.support, kappa.center + kappa.support),))


def product_defect(
    phi: Callable[[np.ndarray], np.ndarray],
    psi: Callable[[np.ndarray], np.ndarray],
    kappa: CutoffFamily,
    M: MollifierSequence,
) -> GeneralizedFunctionRep:
    """``embed(κφψ) - embed(κφ)·embed(κψ)``."""
    grid = M.grid
    both = embed(kappa_density(lambda x: phi(x) * psi(x), kappa, grid), M)
    one = embed(kappa_density(phi, kappa, grid), M)
    two = embed(kappa_density(psi, kappa, grid), M)
    return both.sub(one.multiply(two))


# ---------------------------------------------------------------------------
# soft extension


@dataclass
class SoftExtension:
    rep: GeneralizedFunctionRep
    a: float
    h: float
    H: float
    p_values: list[int]
    lowpass_inactive: list[bool]
    defect: DecayReport


def fit_cutfourier_h(rep: GeneralizedFunctionRep, kappa: CutoffFamily, P: int = 16,
                     n_sample: Sequence[int] | None = None) -> tuple[float, float]:
    """Smallest ``h = 2^e`` with ``|ξ|^p |(κ_p f_n)^| <= C e^{M(n)} h^p M_p`` on the sample.

    Returns ``(h, C)``; boundedness in ``p`` is judged as for sequences.
    """
    W = rep.weight.extended(P + 1)
    grid = rep.grid
    xi = np.abs(grid.xi)
    ns = n_sample or [int(n) for n in rep.n_values[:: max(1, rep.n_values.size // 8)]]
    vals = rep.values()
    ps = np.arange(1, P + 1)
    Q = np.full((len(ns), P), -np.inf)
    for j, p in enumerate(ps):
        kp = kappa.samples(grid, int(p))
        for i, n in enumerate(ns):
            idx = int(np.nonzero(rep.n_values == n)[0][0])
            spec = np.abs(forward(grid, kp * vals[idx]))
            with np.errstate(divide="ignore"):
                Q[i, j] = np.max(np.log(spec) + p * np.log(xi)) - assoc(W, n) - W.logM[p]
    for e in range(-6, 16):
        h = 2.0**e
        res = Q - ps[None, :] * math.log(h)
        if all(bounded_sequence(ps.astype(float), row, 1e-9) for row in res):
            return h, float(math.exp(res.max()))
    raise CertificateMissing("no h up to 2^15 bounds the cut-off transforms")


def soft_extend(
    rep: GeneralizedFunctionRep,
    omega: tuple[float, float],
    omega_prime: tuple[float, float],
    K: tuple[float, float] | None = None,
    h: float | None = None,
    H: float | None = None,
    jobs: int | None = None,
) -> SoftExtension:
    """``g_n = (κ_{p_n} f_n) * F^{-1}ψ(·/(a n))`` with ``p_n = m(Hn) + d + 1`` and ``a = H² h``.

    ``κ_p`` is the analytic cut-off family equal to 1 on the closure of
    ``Ω'`` and supported inside ``Ω``. Where ``2an`` exceeds the grid band
    the low-pass acts as the identity on the lattice; this is recorded per
    member in ``lowpass_inactive``.
    """
    grid = rep.grid
    W = rep.weight
    if H is None:
        rpt = check_conditions(W, min(128, W.P_max - 1))
        if not rpt.m2.holds:
            raise CertificateMissing("(M.2) constant H unavailable")
        H = rpt.m2.constants["H"]
    (o0, o1), (q0, q1) = omega, omega_prime
    center = (q0 + q1) / 2
    if abs((o0 + o1) / 2 - center) > 1e-12:
        raise CutoffGeometry("Ω and Ω' must share a centre")
    gap = (o1 - o0) / 2 - (q1 - q0) / 2
    if gap <= 0:
        raise CutoffGeometry("Ω' must sit inside Ω")
    kappa = CutoffFamily((q1 - q0) / 2, (o1 - o0) / 2 - 0.05 * gap, center)
    if h is None:
        h, _ = fit_cutfourier_h(rep, kappa)
    a = H * H * h
    ps = counting_function(W, H * rep.n_values.astype(float)) + grid.d + 1
    psi = CutoffFamily(1.0, 2.0, analytic=False)
    xi = np.abs(grid.xi)
    vals = rep.values()

    def one(i: int) -> tuple[np.ndarray, float, bool]:
        n = int(rep.n_values[i])
        kp = kappa.samples(grid, int(ps[i]))
        spec = forward(grid, kp * vals[i])
        inactive = a * n >= grid.xi_max
        if not inactive:
            spec = spec * psi.evaluate(None, xi / (a * n))
        return spec, min(2 * a * n, grid.xi_max), inactive

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        out = list(pool.map(one, range(rep.n_values.size)))
    spectra = np.stack([o[0] for o in out])
    bands = np.array([o[1] for o in out])
    g = GeneralizedFunctionRep(grid, rep.n_values, spectra, bands, None, W)
    Kd = K or omega_prime
    diff = inverse(grid, spectra) - vals
    e = _grid_sup(grid, diff, Kd)
    scale = np.abs(vals[:, _region_mask((grid.x,), Kd)]).max(axis=1)
    floor = NOISE_FLOOR * max(1.0, float(scale.max()))
    report = _decay_report(rep.n_values, e, floor)
    return SoftExtension(g, a, h, H, ps.tolist(), [o[2] for o in out], report)


# ---------------------------------------------------------------------------
# impossibility demonstration

BANNER = (
    "Illustration only: the non-existence statement cannot be tested numerically. "
    "The embedded delta times x stays of size one near 0 while x*delta = 0, "
    "yet its pairings with smooth windows vanish."
)


# |<x θ_32, ψ>| by adaptive quadrature of the closed form: 3.6e-19 with
# estimated error 1.2e-15 (scripts/oracle_pairing.py); frozen one decade up.
PAIRING_TOL = 1e-14
PAIRING_N = 32


def gaussian_window(x: np.ndarray, shift: float = 0.3) -> np.ndarray:
    return np.exp(-((x - shift) ** 2))


@dataclass
class ImpossibilityReport:
    n_values: list[int]
    sups: list[float]
    lower: float
    upper: float
    pairings: list[float]
    spectrum_identity_error: float
    pairing_tol: float = PAIRING_TOL
    pairing_below_tol: bool | None = None
    banner: str = BANNER

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def x_theta_spectrum(M: MollifierSequence, n: int) -> np.ndarray:
    """Transform of ``x θ_n``: ``(i/n) χ_n'(ξ/n)``."""
    return (1j / n) * M.family.evaluate(n, M.grid.xi / n, deriv=1)


def impossibility_demo(M: MollifierSequence | None = None, n_values: Iterable[int] = range(8, 65),
                       K: tuple[float, float] = (-1.0, 1.0)) -> ImpossibilityReport:
    from .specgrid import sup_norm

    ns = list(n_values)
    if M is None:
        M = build_mollifier(ns)
    grid = M.grid
    window = gaussian_window(grid.x)
    sups, pairs = [], []
    err = 0.0
    # periodisation spoils x θ_n near the box edge for small n
    inner = np.abs(grid.x) <= grid.X / 2
    for n in ns:
        spec = x_theta_spectrum(M, n)
        u = BandLimitedFunction(grid, spec, M.family.support * n)
        sups.append(sup_norm(u, K))
        vals = u.values()
        pairs.append(float(abs(grid.dx * np.sum(vals * window))))
        direct = grid.x * M.theta(n).values()
        err = max(err, float(np.abs(direct - vals)[inner].max()))
    below = pairs[ns.index(PAIRING_N)] <= PAIRING_TOL if PAIRING_N in ns else None
    return ImpossibilityReport(ns, sups, min(sups), max(sups), pairs, err, PAIRING_TOL, below)
