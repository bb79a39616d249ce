"""Sequences of band-limited functions and their moderate/negligible classification.

A :class:`GeneralizedFunctionRep` holds one representative ``(f_n)_n`` of a
generalized function as a stack of spectra on a shared grid. The classifier
turns the asymptotic definitions into finite, reproducible checks:

* moderate: for every ``λ`` on a grid some ``h = 2^e`` keeps
  ``log ‖f_n‖_{K,h} - M(λn)`` bounded in ``n``;
* negligible: some ``λ`` (and ``h``) keeps ``log ‖f_n‖ + M(λn)`` bounded,
  either with the sup norm alone (zeroth order) or with the full seminorm.

"Bounded" means the maximum over the upper half of the ``n`` range does not
exceed the maximum over the lower half by more than ``tol``. Every report
keeps the raw per-``n`` log values so a verdict can be recomputed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import (
    BandOverflow,
    DegenerateGeometry,
    GridMismatch,
    InsufficientRange,
    SeminormInfinite,
    TailBoundViolated,
    TruncationDominates,
)
from .mollifier import CutoffFunction
from .specgrid import (
    MAX_ORDER,
    BandLimitedFunction,
    Grid,
    derivative_multiplier,
    forward,
    from_samples,
    inverse,
    log_sup_derivatives,
    sup_norm,
)
from .weights import RSequence, WeightSequence, assoc, make_weight_sequence

MODERATE_LAMBDAS = (0.25, 0.5, 1.0, 2.0, 4.0)
NEGLIGIBLE_LAMBDAS = (1 / 32, 1 / 16, 1 / 8, 0.25, 0.5, 1.0, 2.0, 4.0)
H_EXPONENTS = range(-6, 11)
SNAP_REL = 1e-13
TOL = 0.25
MIN_NMAX = 16


def _default_weight(W: WeightSequence | None) -> WeightSequence:
    return W if W is not None else make_weight_sequence("factorial")


# ---------------------------------------------------------------------------
# representatives


@dataclass(eq=False)
class GeneralizedFunctionRep:
    """Members ``f_n`` for ``n`` in ``n_values`` as spectra (``spectra[i]`` ↔ ``n_values[i]``).

    ``domain`` is a box (``(a, b)`` in 1-D). ``noise`` holds, per member,
    the absolute round-off level inherited from the operands of a
    subtraction; values below it are treated as zero when classifying.
    Freshly built representatives have no noise floor.
    """

    grid: Grid
    n_values: np.ndarray
    spectra: np.ndarray
    bands: np.ndarray
    domain: Any = None
    weight: WeightSequence | None = None
    noise: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.n_values = np.asarray(self.n_values, dtype=int)
        self.bands = np.asarray(self.bands, dtype=float)
        if self.spectra.shape != (self.n_values.size,) + self.grid.shape:
            raise GridMismatch("spectra do not match the grid and index range")
        if self.domain is None:
            box = (-self.grid.X, self.grid.X)
            self.domain = box if self.grid.d == 1 else (box, box)
        self.weight = _default_weight(self.weight)
        if self.noise is not None:
            self.noise = np.broadcast_to(np.asarray(self.noise, dtype=float), self.n_values.shape).copy()

    # -- construction ------------------------------------------------------
    @classmethod
    def from_members(
        cls,
        members: Sequence[BandLimitedFunction],
        n_values: Iterable[int],
        domain: Any = None,
        weight: WeightSequence | None = None,
    ) -> "GeneralizedFunctionRep":
        members = list(members)
        grid = members[0].grid
        for f in members:
            if f.grid != grid:
                raise GridMismatch("members live on different grids")
        return cls(
            grid,
            np.asarray(list(n_values)),
            np.stack([f.spectrum for f in members]),
            np.array([f.band for f in members]),
            domain,
            weight,
        )

    @classmethod
    def from_samples(
        cls,
        grid: Grid,
        n_values: Iterable[int],
        make: Callable[[int, np.ndarray], np.ndarray],
        domain: Any = None,
        weight: WeightSequence | None = None,
    ) -> "GeneralizedFunctionRep":
        """Members from sampled values ``make(n, x)`` (full grid band)."""
        ns = np.asarray(list(n_values))
        mesh = grid.mesh()
        x = mesh[0] if grid.d == 1 else mesh
        spectra = np.stack([forward(grid, np.asarray(make(int(n), x), dtype=complex)) for n in ns])
        return cls(grid, ns, spectra, np.full(ns.size, grid.xi_max), domain, weight)

    # -- access ------------------------------------------------------------
    @property
    def n_max(self) -> int:
        return int(self.n_values.max())

    def member(self, n: int) -> BandLimitedFunction:
        i = int(np.nonzero(self.n_values == n)[0][0])
        return BandLimitedFunction(self.grid, self.spectra[i], float(self.bands[i]))

    def values(self) -> np.ndarray:
        return inverse(self.grid, self.spectra)

    def magnitudes(self) -> np.ndarray:
        """``max |f_n|`` over the grid, per member."""
        vals = self.values()
        return np.abs(vals.reshape(vals.shape[0], -1)).max(axis=1)

    def _noise(self) -> np.ndarray:
        return self.noise if self.noise is not None else np.zeros(self.n_values.size)

    def _like(self, spectra, bands, noise, domain=None) -> "GeneralizedFunctionRep":
        return GeneralizedFunctionRep(
            self.grid, self.n_values, spectra, bands,
            self.domain if domain is None else domain, self.weight, noise,
        )

    def _check(self, other: "GeneralizedFunctionRep") -> None:
        if other.grid != self.grid or not np.array_equal(other.n_values, self.n_values):
            raise GridMismatch("representatives differ in grid or index range")

    # -- algebra -----------------------------------------------------------
    def add(self, other: "GeneralizedFunctionRep") -> "GeneralizedFunctionRep":
        self._check(other)
        floor = SNAP_REL * np.maximum(self.magnitudes(), other.magnitudes())
        noise = np.maximum(np.maximum(self._noise(), other._noise()), floor)
        return self._like(
            self.spectra + other.spectra, np.maximum(self.bands, other.bands), noise
        )

    def sub(self, other: "GeneralizedFunctionRep") -> "GeneralizedFunctionRep":
        return self.add(other.scaled(-1.0))

    def scaled(self, c: complex) -> "GeneralizedFunctionRep":
        return self._like(c * self.spectra, self.bands, None if self.noise is None else abs(c) * self.noise)

    def multiply(self, other: "GeneralizedFunctionRep") -> "GeneralizedFunctionRep":
        """Pointwise product per index; bands add and must fit the grid."""
        self._check(other)
        bands = self.bands + other.bands
        if np.any(bands > self.grid.xi_max * (1 + 1e-12)):
            raise BandOverflow(f"product band {bands.max():.6g} exceeds {self.grid.xi_max:.6g}")
        prod = forward(self.grid, self.values() * other.values())
        noise = None
        if self.noise is not None or other.noise is not None:
            noise = self._noise() * other.magnitudes() + other._noise() * self.magnitudes()
        return self._like(prod, bands, noise)

    def restrict(self, domain: Any) -> "GeneralizedFunctionRep":
        if not _box_inside(domain, self.domain):
            raise ValueError(f"{domain} is not inside {self.domain}")
        return self._like(self.spectra, self.bands, self.noise, domain)

    __add__ = add
    __sub__ = sub
    __mul__ = multiply


def _boxes(K: Any) -> list[tuple[float, float]]:
    return [tuple(K)] if np.ndim(K[0]) == 0 else [tuple(k) for k in K]


def _box_inside(inner: Any, outer: Any) -> bool:
    return all(
        lo2 - 1e-12 <= lo1 and hi1 <= hi2 + 1e-12
        for (lo1, hi1), (lo2, hi2) in zip(_boxes(inner), _boxes(outer))
    )


# ---------------------------------------------------------------------------
# seminorms


@dataclass
class SeminormReport:
    log_value: float
    argmax_order: int
    at_truncation: bool
    max_order: int


def _log_seminorm(logsup: np.ndarray, h: float, denom: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(logsup.shape[-1])
    terms = logsup - k * math.log(h) - denom[: logsup.shape[-1]]
    return terms.max(axis=-1), terms.argmax(axis=-1)


def _single_logsup(f: BandLimitedFunction, K: Any, max_order: int) -> np.ndarray:
    return log_sup_derivatives(f.grid, f.spectrum, K, max_order)


def seminorm_h(
    f: BandLimitedFunction,
    K: Any,
    h: float,
    max_order: int = MAX_ORDER,
    weight: WeightSequence | None = None,
    strict: bool = True,
) -> SeminormReport:
    """``log ‖f‖_{K,h} = log max_{|α|<=max_order} sup_K |f^(α)| / (h^|α| M_α)``.

    Raises :class:`TruncationDominates` if the maximum sits at ``max_order``
    (unless ``strict`` is off).
    """
    W = _default_weight(weight).extended(max_order + 1)
    val, arg = _log_seminorm(_single_logsup(f, K, max_order), h, W.logM)
    rep = SeminormReport(float(val), int(arg), bool(arg == max_order and max_order > 0), max_order)
    if strict and rep.at_truncation:
        raise TruncationDominates(f"maximum attained at order {max_order}")
    return rep


def seminorm_rj(
    f: BandLimitedFunction,
    K: Any,
    r: RSequence,
    max_order: int = MAX_ORDER,
    weight: WeightSequence | None = None,
    strict: bool = True,
) -> SeminormReport:
    """``log ‖f‖_{K,r_j}`` with denominators ``M_α ∏_{j<=|α|} r_j``."""
    if not isinstance(r, RSequence):
        r = RSequence(np.asarray(r, dtype=float))
    W = _default_weight(weight).extended(max_order + 1)
    denom = W.logM[: max_order + 1] + r.log_cumprod(max_order)
    val, arg = _log_seminorm(_single_logsup(f, K, max_order), 1.0, denom)
    rep = SeminormReport(float(val), int(arg), bool(arg == max_order and max_order > 0), max_order)
    if strict and rep.at_truncation:
        raise TruncationDominates(f"maximum attained at order {max_order}")
    return rep


# ---------------------------------------------------------------------------
# classification


@dataclass
class LambdaResult:
    lam: float
    h: float | None
    bounded: bool
    informative: bool = True
    sup_log: float | None = None


@dataclass
class ClassificationReport:
    K: Any
    mode: str
    max_order: int
    n_values: list[int]
    log_sups: list[list[float]]
    lambdas: list[LambdaResult]
    verdict: bool
    lam: float | None = None
    h: float | None = None
    zeroth: bool | None = None
    full: bool | None = None
    coherent: bool | None = None
    tol: float = TOL
    confidence: str = "finite evidence"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["log_sups"] = [[None if not np.isfinite(v) else float(v) for v in row] for row in self.log_sups]
        return d


def bounded_sequence(ns: np.ndarray, a: np.ndarray, tol: float = TOL) -> bool:
    """Tail maximum (``n > n_max/2``) at most the head maximum plus ``tol``."""
    head = ns <= ns.max() / 2
    hmax = a[head].max(initial=-np.inf)
    tmax = a[~head].max(initial=-np.inf)
    if tmax == -np.inf:
        return True
    return bool(tmax <= hmax + tol)


def log_sup_table(
    rep: GeneralizedFunctionRep, K: Any, max_order: int, oversample: int | None = None
) -> np.ndarray:
    """``log sup_K |f_n^(k)|``; values under the member's noise floor become ``-inf``.

    The floor at order ``k`` is ``noise_n · B_n^k`` (``B_n`` the band), the
    size round-off reaches after ``k`` spectral differentiations.
    """
    L = log_sup_derivatives(rep.grid, rep.spectra, K, max_order, oversample)
    if rep.noise is not None:
        k = np.arange(max_order + 1)
        with np.errstate(divide="ignore"):
            floor = np.log(rep.noise)[:, None] + k[None, :] * np.log(np.maximum(rep.bands, 1.0))[:, None]
        L = np.where(L <= floor, -np.inf, L)
    return L


def classify(
    rep: GeneralizedFunctionRep,
    K: Any,
    mode: str = "moderate",
    lambdas: Sequence[float] | None = None,
    max_order: int = MAX_ORDER,
    tol: float = TOL,
    oversample: int | None = None,
    table: np.ndarray | None = None,
) -> ClassificationReport:
    """Operational moderate/negligible verdicts on ``K``.

    ``mode`` is ``"moderate"``, ``"negligible-zeroth"``, ``"negligible-full"``
    or ``"negligible"`` (runs both negligibility tests and records whether
    they agree). A negligibility ``λ`` only counts when ``M`` rises by at
    least ``2·tol`` between ``λ n_max / 2`` and ``λ n_max``; smaller rises
    cannot be told apart from the boundedness tolerance.
    """
    if rep.n_max < MIN_NMAX:
        raise InsufficientRange(f"n_max = {rep.n_max} < {MIN_NMAX}")
    if not _box_inside(K, rep.domain):
        raise ValueError(f"K = {K} is not inside the domain {rep.domain}")
    W = rep.weight
    ns = rep.n_values.astype(float)
    order = 0 if mode == "negligible-zeroth" else max_order
    L = table if table is not None else log_sup_table(rep, K, order, oversample)
    L = L[:, : order + 1]
    logM = W.extended(order + 1).logM
    if mode == "moderate":
        lams = list(lambdas or MODERATE_LAMBDAS)
        results = []
        for lam in lams:
            g = assoc(W, lam * ns)
            found = None
            for e in H_EXPONENTS:
                h = 2.0**e
                semi, arg = _log_seminorm(L, h, logM)
                if order > 0 and np.any((arg == order) & np.isfinite(semi)):
                    continue
                if bounded_sequence(ns, semi - g, tol):
                    found = h
                    break
            results.append(LambdaResult(lam, found, found is not None))
        ok = all(r.bounded for r in results)
        return ClassificationReport(
            K, mode, order, rep.n_values.tolist(), L.tolist(), results, ok,
            lam=min(lams) if ok else None,
            h=max((r.h for r in results if r.h), default=None),
            tol=tol,
        )
    if mode in ("negligible-zeroth", "negligible-full"):
        return _negligible(rep, K, mode, L, lambdas, tol)
    if mode == "negligible":
        full_table = L
        z = _negligible(rep, K, "negligible-zeroth", full_table[:, :1], lambdas, tol)
        f = _negligible(rep, K, "negligible-full", full_table, lambdas, tol)
        z.mode = "negligible"
        z.zeroth, z.full = z.verdict, f.verdict
        z.coherent = z.verdict == f.verdict
        z.max_order = order
        z.log_sups = full_table.tolist()
        return z
    raise ValueError(f"unknown mode {mode!r}")


def _negligible(rep, K, mode, L, lambdas, tol) -> ClassificationReport:
    W = rep.weight
    ns = rep.n_values.astype(float)
    order = L.shape[1] - 1
    logM = W.extended(order + 1).logM
    lams = sorted(lambdas or NEGLIGIBLE_LAMBDAS)
    results = []
    best_lam, best_h = None, None
    hs = [1.0] if order == 0 else [2.0**e for e in H_EXPONENTS]
    n_top = ns.max()
    for lam in lams:
        g = assoc(W, lam * ns)
        rise = float(assoc(W, lam * n_top) - assoc(W, lam * n_top / 2))
        informative = rise >= 2 * tol
        found = None
        for h in hs:
            semi, arg = _log_seminorm(L, h, logM)
            if order > 0 and np.any((arg == order) & np.isfinite(semi)):
                continue
            if bounded_sequence(ns, semi + g, tol):
                found = h
                break
        results.append(LambdaResult(lam, found, found is not None, informative))
        if found is not None and informative:
            best_lam, best_h = lam, found
    ok = best_lam is not None
    return ClassificationReport(
        K, mode, order, rep.n_values.tolist(), L.tolist(), results, ok,
        lam=best_lam, h=best_h, zeroth=ok if order == 0 else None,
        full=ok if order > 0 else None, tol=tol,
    )


# ---------------------------------------------------------------------------
# scalar sequences


@dataclass
class ScalarSequence:
    values: np.ndarray
    n_values: np.ndarray | None = None
    weight: WeightSequence | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("scalar sequence values must be finite")
        if self.n_values is None:
            self.n_values = np.arange(1, self.values.size + 1)
        self.weight = _default_weight(self.weight)


def scalar_class(c: ScalarSequence, lam: float) -> dict[str, float]:
    """``σ_λ = sup |c_n| e^{M(λn)}`` and ``σ'_λ = sup |c_n| e^{-M(λn)}`` over the stored range."""
    if lam <= 0:
        raise ValueError("λ must be positive")
    g = assoc(c.weight, lam * np.asarray(c.n_values, dtype=float))
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(c.values))
    log_sigma = float(np.max(la + g))
    log_sigma_p = float(np.max(la - g))
    return {
        "lam": lam,
        "log_sigma": log_sigma,
        "log_sigma_prime": log_sigma_p,
        "sigma": math.exp(log_sigma) if log_sigma < 700 else math.inf,
        "sigma_prime": math.exp(log_sigma_p) if log_sigma_p < 700 else math.inf,
    }


# ---------------------------------------------------------------------------
# ultradifferential operators


@dataclass(frozen=True, eq=False)
class UltradiffOperator:
    """``P(D) = Σ a_p D^p`` with ``D = -i d/dx``; acts as the multiplier ``P(ξ) = Σ a_p ξ^p``.

    Coefficients are stored as ``log|a_p|`` and unit phases so that long
    tables never overflow. In 2-D the operator acts on the first variable.
    """

    name: str
    log_abs: np.ndarray
    phases: np.ndarray
    series: bool = False  # True when the table truncates an infinite series

    @property
    def length(self) -> int:
        return self.log_abs.size

    def _terms(self, xi: np.ndarray, upto: int) -> np.ndarray:
        p = np.arange(upto)
        ax = np.abs(xi)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = self.log_abs[:upto] + p * np.log(ax)
        logs = np.where((p == 0) & (ax == 0), self.log_abs[0], logs)
        return np.exp(logs) * self.phases[:upto] * np.sign(xi)[..., None] ** p

    def truncation(self, band: float, rel: float = 1e-12) -> int:
        """Number of terms whose neglected tail stays below ``rel`` on ``|ξ| <= band``."""
        live = np.nonzero(np.isfinite(self.log_abs))[0]
        if live.size == 0 or band <= 0:
            return 1
        last = int(live.max())
        if not self.series:
            return last + 1  # a polynomial: no tail at all
        logs = self.log_abs + np.arange(self.length) * math.log(band)
        if logs[-1] > logs.max() - 40:
            raise TailBoundViolated(f"{self.name}: coefficient table too short for band {band}")
        tails = np.logaddexp.accumulate(logs[::-1])[::-1]
        target = math.log(rel) + max(float(tails[0]), 0.0)
        return int(np.nonzero(tails <= target)[0][0])

    def multiplier(self, xi: Any, band: float | None = None) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        B = float(np.abs(xi).max()) if band is None else band
        T = self.truncation(B)
        return self._terms(xi, T).sum(axis=-1)

    def class_certificate(self, weight: WeightSequence | None = None,
                          Ls: Sequence[float] = (0.25, 0.5, 1.0, 2.0)) -> dict[float, float]:
        """``C_L = max_p |a_p| M_p / L^p`` over the table for sampled ``L``."""
        W = _default_weight(weight).extended(self.length)
        p = np.arange(self.length)
        out = {}
        for L in Ls:
            v = self.log_abs + W.logM[: self.length] - p * math.log(L)
            out[L] = float(np.exp(np.max(v[np.isfinite(v)])))
        return out


def operator_from_coefficients(name: str, coeffs: Sequence[complex]) -> UltradiffOperator:
    a = np.asarray(coeffs, dtype=complex)
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(a))
    ph = np.where(a != 0, np.exp(1j * np.angle(a)), 1.0)  # a/|a| fails for subnormal a
    return UltradiffOperator(name, la, ph)


def identity_op() -> UltradiffOperator:
    return operator_from_coefficients("identity", [1.0])


def d_op() -> UltradiffOperator:
    """``D = -i d/dx``."""
    return operator_from_coefficients("D", [0.0, 1.0])


def bessel_op(length: int = 600) -> UltradiffOperator:
    """``a_p = 1/(p!)²``; of class ``{p!}`` since ``|a_p| <= C_L L^p / p!`` for every ``L``."""
    p = np.arange(length)
    return UltradiffOperator("bessel", -2 * gammaln(p + 1.0), np.ones(length, dtype=complex), series=True)


def apply_op(P: UltradiffOperator, rep: GeneralizedFunctionRep) -> GeneralizedFunctionRep:
    """``(P(D) f_n)_n`` as a spectral multiplier; bands are kept."""
    grid = rep.grid
    band = float(rep.bands.max())
    mult = P.multiplier(grid.xi_mesh()[0], band=band)
    mag = float(np.abs(mult[np.abs(grid.xi_mesh()[0]) <= band]).max()) if band > 0 else 1.0
    noise = None if rep.noise is None else rep.noise * max(mag, 1.0)
    return rep._like(rep.spectra * mult, rep.bands, noise)


# ---------------------------------------------------------------------------
# inequalities


@dataclass
class GornyResult:
    lhs: float
    rhs: float
    holds: bool
    k: int
    m: int
    delta: float
    directional: dict[str, float] | None = None


def _box_sup(f: BandLimitedFunction, K: Any) -> float:
    return sup_norm(f, K if f.grid.d == 1 else _boxes(K))


def _order_sups(f: BandLimitedFunction, K: Any, k: int) -> float:
    from .specgrid import _multi_indices, derivative

    return max(_box_sup(derivative(f, a, max_order=max(k, MAX_ORDER)), K) for a in _multi_indices(k, f.grid.d))


def gorny_check(f: BandLimitedFunction, K: Any, Kp: Any, k: int, m: int) -> GornyResult:
    """Both sides of the multivariate Gorny inequality (the 1-D one when ``d = 1``).

    In 2-D the report also lists ``sup_{K'} |∂_u^k f|`` over sampled unit
    directions ``u``, the quantity the directional reduction bounds.
    """
    if not 0 < k < m:
        raise ValueError("need 0 < k < m")
    Kb, Kpb = _boxes(K), _boxes(Kp)
    delta = min(min(lp - l, h - hp) for (l, h), (lp, hp) in zip(Kb, Kpb))
    if delta <= 0:
        raise DegenerateGeometry(f"K' is not inside K with a positive gap (δ = {delta})")
    d = f.grid.d
    lhs = _order_sups(f, Kp, k)
    norm0 = _box_sup(f, K)
    normm = _order_sups(f, K, m)
    big = max(d**m * normm, norm0 * math.factorial(m) / delta**m)
    if norm0 == 0.0:
        rhs = 0.0
    else:
        rhs = 4 * math.exp(2 * k) * (m / k) ** k * norm0 ** (1 - k / m) * big ** (k / m)
    directional = None
    if d == 2:
        directional = {}
        xi1, xi2 = f.grid.xi_mesh()
        for j in range(16):
            t = math.pi * j / 16
            u = (math.cos(t), math.sin(t))
            spec = f.spectrum * (1j * (u[0] * xi1 + u[1] * xi2)) ** k
            g = BandLimitedFunction(f.grid, spec, f.band)
            directional[f"{t:.6f}"] = _box_sup(g, Kp)
    return GornyResult(lhs, rhs, bool(lhs <= rhs * (1 + 1e-6)), k, m, delta, directional)


@dataclass
class GornyCase:
    label: str
    f: BandLimitedFunction
    K: tuple[float, float]
    Kp: tuple[float, float]
    k: int
    m: int


def gorny_corpus(seed: int = 0, size: int = 50, m_max: int = 8) -> list[GornyCase]:
    """Random 1-D cases: trigonometric polynomials and ``exp(a cos(ω x))`` on a ``4π`` box.

    Frequencies are integers so every function is periodic on the grid.
    """
    rng = np.random.default_rng(seed)
    grid = Grid(4 * math.pi, 512)
    x = grid.x
    cases = []
    for i in range(size):
        if i % 2 == 0:
            nf = int(rng.integers(1, 5))
            freqs = rng.integers(1, 9, size=nf)
            amps = rng.normal(size=nf)
            phases = rng.uniform(0, 2 * math.pi, size=nf)
            vals = sum(a * np.cos(w * x + ph) for a, w, ph in zip(amps, freqs, phases))
            label = "trig(" + ",".join(str(int(w)) for w in freqs) + ")"
        else:
            a = float(rng.uniform(0.5, 2.0))
            w = int(rng.integers(1, 4))
            vals = np.exp(a * np.cos(w * x))
            label = f"expcos(a={a:.3f},w={w})"
        c = float(rng.uniform(-3, 3))
        R = float(rng.uniform(1, 3))
        gap = float(rng.uniform(0.1, 0.9)) * R
        m = int(rng.integers(2, m_max + 1))
        k = int(rng.integers(1, m))
        f = from_samples(grid, vals)
        cases.append(GornyCase(label, f, (c - R, c + R), (c - R + gap, c + R - gap), k, m))
    return cases


@dataclass
class FourierBoundReport:
    h: float
    log_mu: float
    orders: list[dict[str, float]]
    holds: bool


def fourier_char_bound(
    f: BandLimitedFunction, h: float, max_order: int = 12, weight: WeightSequence | None = None
) -> FourierBoundReport:
    """Check ``sup |f^(α)| <= μ_h(f) h^|α| M_α / (2π)^d`` with ``μ_h = ∫ |f̂| e^{M(ξ/h)}``.

    ``μ_h`` is the lattice sum ``(π/X)^d Σ |f̂(ξ_k)| e^{M(|ξ_k|/h)}``; the
    inequality is exact for that sum, so the check has no quadrature slack.
    """
    W = _default_weight(weight)
    grid = f.grid
    mesh = grid.xi_mesh()
    rad = np.sqrt(sum(m * m for m in mesh))
    mag = np.abs(f.spectrum)
    live = mag > 0
    if not live.any():
        orders = [{"order": k, "log_sup": -math.inf, "log_bound": -math.inf} for k in range(max_order + 1)]
        return FourierBoundReport(h, -math.inf, orders, True)
    dxi = math.pi / grid.X
    log_mu = float(logsumexp(np.log(mag[live]) + assoc(W, rad[live] / h))) + grid.d * math.log(dxi)
    logs = log_sup_derivatives(grid, f.spectrum, tuple((-grid.X, grid.X) for _ in range(grid.d)) if grid.d > 1 else (-grid.X, grid.X), max_order)
    logM = W.extended(max_order + 1).logM
    orders, ok = [], True
    for k in range(max_order + 1):
        bound = log_mu + k * math.log(h) + logM[k] - grid.d * math.log(2 * math.pi)
        ok &= bool(logs[k] <= bound + 1e-9)
        orders.append({"order": k, "log_sup": float(logs[k]), "log_bound": float(bound)})
    return FourierBoundReport(h, log_mu, orders, ok)


@dataclass
class CutFourierReport:
    n: int
    h: float
    C: float
    k: float
    L: float
    measure: float
    log_seminorm: float
    log_lhs: float
    log_rhs: float
    holds: bool


def norm_constants(W: WeightSequence) -> tuple[float, float]:
    """``C = 1`` and the least ``k`` with ``p^p <= k^p M_p`` on the table."""
    p = np.arange(1, W.P_max + 1, dtype=float)
    return 1.0, float(math.exp(np.max((p * np.log(p) - W.logM[1:]) / p)))


def cutfourier_bound(
    chi: CutoffFunction,
    phi: BandLimitedFunction,
    h: float,
    weight: WeightSequence | None = None,
    max_order: int = MAX_ORDER,
) -> CutFourierReport:
    """Compare ``sup_ξ |ξ|^n |(χ_n φ)^(ξ)|`` with ``C L |Ω| ‖φ‖_{Ω̄,h} (√d (h + L k))^n M_n``.

    ``Ω`` is the support interval of the cut-off; the left side is taken over
    the grid lattice.
    """
    W = _default_weight(weight)
    grid = phi.grid
    n = chi.n
    fam = chi.family
    Omega = (fam.center - fam.support, fam.center + fam.support)
    sem = seminorm_h(phi, Omega, h, max_order, W, strict=False)
    if sem.at_truncation:
        raise SeminormInfinite(f"seminorm at h={h} not resolved by order {max_order}")
    prod = fam.samples(grid, n) * phi.values()
    spec = forward(grid, prod)
    xi = np.abs(grid.xi)
    with np.errstate(divide="ignore"):
        lhs = np.log(np.abs(spec)) + n * np.log(xi)
    log_lhs = float(np.max(lhs[np.isfinite(lhs)], initial=-np.inf))
    C, kk = norm_constants(W)
    L = chi.L
    measure = 2 * fam.support
    log_rhs = (
        math.log(C * L * measure) + sem.log_value + n * math.log(math.sqrt(grid.d) * (h + L * kk))
        + W.extended(n + 1).logM[n]
    )
    return CutFourierReport(n, h, C, kk, L, measure, sem.log_value, log_lhs, float(log_rhs), bool(log_lhs <= log_rhs))
