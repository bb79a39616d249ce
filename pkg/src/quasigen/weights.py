"""Weight sequences in the log domain.

A weight sequence ``M_p`` is stored through ``logM[p]`` for ``p = 0..P_max``.
Everything here works with logarithms because ``p!`` overflows a double
near ``p = 170``. The associated function ``M(t) = sup_p log(t^p / M_p)``,
the counting function ``m(t) = #{p : m_p <= t}`` and finite-depth checks of
the classical growth conditions are provided, together with the inclusion
relations between two sequences.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy.special import gammaln

from .errors import NonMonotoneQuotients, RSequenceInvalid, SupAtTableEdge

DEFAULT_PMAX = 256
_EXTEND_LIMIT = 1 << 17

_R_RULES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "log": lambda j: 1.0 + np.log1p(j),
    "sqrtlog": lambda j: np.sqrt(1.0 + np.log1p(j)),
    "quarter": lambda j: (1.0 + j) ** 0.25,
}


@dataclass(frozen=True, eq=False)
class RSequence:
    """A positive nondecreasing sequence ``r_0 = 1 <= r_1 <= ...`` tending to infinity.

    Sequences created from a named ``rule`` can be extended on demand; raw
    arrays cannot.
    """

    r: np.ndarray
    rule: str | None = None

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "r", r)
        if r.ndim != 1 or r.size < 2:
            raise RSequenceInvalid("r must be a 1-D array with at least two entries")
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise RSequenceInvalid("r must be finite and positive")
        if abs(r[0] - 1.0) > 1e-12:
            raise RSequenceInvalid("r_0 must equal 1")
        if np.any(np.diff(r) < 0):
            raise RSequenceInvalid("r must be nondecreasing")
        if not r[-1] > r[0]:
            raise RSequenceInvalid("r must grow (a constant sequence does not tend to infinity)")

    @classmethod
    def from_rule(cls, rule: str, length: int) -> "RSequence":
        if rule not in _R_RULES:
            raise RSequenceInvalid(f"unknown rule {rule!r}")
        return cls(_R_RULES[rule](np.arange(length, dtype=float)), rule=rule)

    def __len__(self) -> int:
        return self.r.size

    def extended(self, length: int) -> "RSequence":
        if length <= len(self):
            return self
        if self.rule is None:
            raise SupAtTableEdge("raw r-sequence cannot be extended")
        return RSequence.from_rule(self.rule, length)

    def log_cumprod(self, P: int) -> np.ndarray:
        """``sum_{j<=p} log r_j`` for ``p = 0..P``."""
        seq = self.extended(P + 1)
        return np.cumsum(np.log(seq.r[: P + 1]))

    def to_spec(self) -> Any:
        return {"rule": self.rule} if self.rule else [float(v) for v in self.r]


def canonical_rsequences(length: int = DEFAULT_PMAX + 1) -> list[RSequence]:
    """Three slowly growing sequences used to sample the r_j-quantified statements."""
    return [RSequence.from_rule(name, length) for name in ("log", "sqrtlog", "quarter")]


def _factorial_table(P: int) -> np.ndarray:
    return gammaln(np.arange(P + 1, dtype=float) + 1.0)


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Log-domain table of a weight sequence.

    ``logm[p-1] = logM[p] - logM[p-1]`` holds the log quotients for ``p >= 1``.
    """

    logM: np.ndarray
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        logM = np.asarray(self.logM, dtype=float)
        object.__setattr__(self, "logM", logM)
        if logM.ndim != 1 or logM.size < 3:
            raise NonMonotoneQuotients("table too short")
        if not np.all(np.isfinite(logM)):
            raise NonMonotoneQuotients("table contains non-finite values")
        if abs(logM[0]) > 1e-12:
            raise NonMonotoneQuotients("logM[0] must be 0")
        logm = np.diff(logM)
        object.__setattr__(self, "logm", logm)
        tol = 1e-12 * np.maximum(1.0, np.abs(logm[1:]))
        drops = np.nonzero(logm[1:] < logm[:-1] - tol)[0]
        if drops.size and drops[-1] + 2 > logm.size // 2:
            raise NonMonotoneQuotients(
                f"quotients decrease at index {drops[-1] + 2}, late in the table"
            )
        if not logm[-1] > np.max(logm[: max(1, logm.size // 2)]):
            raise NonMonotoneQuotients("quotients do not grow within the table")

    @property
    def P_max(self) -> int:
        return self.logM.size - 1

    @property
    def extendable(self) -> bool:
        if self.kind == "product":
            return self.params["rj"].rule is not None
        return self.kind in ("factorial", "gevrey")

    def extended(self, P: int) -> "WeightSequence":
        """The same sequence with a longer table (analytic kinds only)."""
        if P <= self.P_max:
            return self
        if not self.extendable:
            raise SupAtTableEdge(f"{self.kind} table of length {self.P_max} cannot be extended")
        return make_weight_sequence(self.to_spec(), P_max=P)

    def covering(self, t: float) -> "WeightSequence":
        """A table long enough that the sup defining ``M(t)`` is interior."""
        W = self
        while True:
            p = _argmax_p(W, np.atleast_1d(float(t)))
            if int(p.max()) < W.P_max:
                return W
            if W.P_max >= _EXTEND_LIMIT:
                raise SupAtTableEdge(f"t={t} needs a table beyond {_EXTEND_LIMIT}")
            W = W.extended(2 * W.P_max)

    def to_spec(self) -> dict[str, Any]:
        if self.kind == "factorial":
            return {"kind": "factorial"}
        if self.kind == "gevrey":
            return {"kind": "gevrey", "s": float(self.params["s"])}
        if self.kind == "product":
            return {
                "kind": "product",
                "base": self.params["base"].to_spec(),
                "rj": self.params["rj"].to_spec(),
            }
        return {"kind": "table", "logM": [float(v) for v in self.logM]}


def make_weight_sequence(spec: Any, P_max: int = DEFAULT_PMAX) -> WeightSequence:
    """Build a :class:`WeightSequence` from a spec.

    Accepted specs are ``"factorial"``, ``{"kind": "gevrey", "s": 2}``,
    ``{"kind": "table", "logM": [...]}`` and
    ``{"kind": "product", "base": {...}, "rj": [...] | {"rule": "log"}}``.
    An existing :class:`WeightSequence` is returned unchanged.
    """
    if isinstance(spec, WeightSequence):
        return spec
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec["kind"]
    if kind == "factorial":
        return WeightSequence(_factorial_table(P_max), "factorial")
    if kind == "gevrey":
        s = float(spec["s"])
        if s < 1:
            raise NonMonotoneQuotients("gevrey order must be >= 1")
        return WeightSequence(s * _factorial_table(P_max), "gevrey", {"s": s})
    if kind == "table":
        return WeightSequence(np.asarray(spec["logM"], dtype=float), "table")
    if kind == "product":
        base = make_weight_sequence(spec["base"], P_max=P_max)
        rj = spec["rj"]
        if isinstance(rj, RSequence):
            rseq = rj
        elif isinstance(rj, Mapping):
            rseq = RSequence.from_rule(rj["rule"], base.P_max + 1)
        else:
            rseq = RSequence(np.asarray(rj, dtype=float))
        if rseq.rule is not None:
            rseq = rseq.extended(base.P_max + 1)
        if len(rseq) < base.P_max + 1:
            raise RSequenceInvalid("r-sequence shorter than the weight table")
        P = base.P_max
        return WeightSequence(
            base.logM + rseq.log_cumprod(P), "product", {"base": base, "rj": rseq}
        )
    raise ValueError(f"unknown sequence kind {kind!r}")


def _argmax_p(W: WeightSequence, t: np.ndarray) -> np.ndarray:
    p = np.arange(W.P_max + 1, dtype=float)
    out = np.zeros(t.shape, dtype=int)
    pos = t > 0
    if np.any(pos):
        vals = np.log(t[pos])[:, None] * p[None, :] - W.logM[None, :]
        out[pos] = np.argmax(vals, axis=1)  # first maximum, i.e. the smaller p
    return out


def associated_function(W: WeightSequence, t: Any, strict: bool = True) -> Any:
    """``M(t) = max_p (p log t - logM[p])`` with ``M(0) = 0``.

    Raises :class:`SupAtTableEdge` when the maximizer is ``P_max`` and
    ``strict`` is set.
    """
    t_arr = np.abs(np.asarray(t, dtype=float))
    flat = t_arr.reshape(-1)
    p = _argmax_p(W, flat)
    if strict and np.any(p == W.P_max):
        raise SupAtTableEdge(f"sup attained at P_max={W.P_max} for t={flat[p == W.P_max][0]}")
    vals = np.zeros_like(flat)
    pos = flat > 0
    vals[pos] = p[pos] * np.log(flat[pos]) - W.logM[p[pos]]
    vals = np.maximum(vals, 0.0).reshape(t_arr.shape)
    return float(vals) if vals.ndim == 0 else vals


def assoc(W: WeightSequence, t: Any) -> Any:
    """``M(t)`` on a table automatically extended to cover ``max(t)``."""
    t_arr = np.abs(np.asarray(t, dtype=float))
    tmax = float(t_arr.max()) if t_arr.size else 0.0
    return associated_function(W.covering(tmax) if W.extendable else W, t_arr)


def counting_function(W: WeightSequence, t: Any) -> Any:
    """``m(t) = #{1 <= p <= P_max : m_p <= t}``."""
    t_arr = np.asarray(t, dtype=float)
    flat = t_arr.reshape(-1)
    out = np.zeros(flat.shape, dtype=int)
    pos = flat > 0
    out[pos] = np.sum(W.logm[None, :] <= np.log(flat[pos])[:, None], axis=1)
    if np.any(out == W.P_max):
        raise SupAtTableEdge(f"all quotients up to P_max={W.P_max} lie below t")
    out = out.reshape(t_arr.shape)
    return int(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# growth conditions


@dataclass
class Verdict:
    holds: bool | None
    constants: dict[str, float] = field(default_factory=dict)
    detail: str = ""
    finite_evidence: bool = True


@dataclass
class ConditionReport:
    depth: int
    m1: Verdict
    m2_prime: Verdict
    m2: Verdict
    m2_star: Verdict
    ne: Verdict
    qa: Verdict

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


_TOL = 1e-9


def _bounded(res: np.ndarray, tol: float = _TOL) -> bool:
    """Tail maximum does not exceed the head maximum (finite boundedness proxy)."""
    half = res.size // 2 + 1
    return bool(res[half:].max(initial=-np.inf) <= res[:half].max() + tol)


def _doubling_search(residual: Callable[[float], np.ndarray], start: float = 1.0, steps: int = 11):
    H = start
    for _ in range(steps):
        res = residual(H)
        if _bounded(res):
            return H, res
        H *= 2.0
    return None, residual(H / 2.0)


def check_conditions(W: WeightSequence, depth: int) -> ConditionReport:
    """Finite-depth checks of (M.1), (M.2)', (M.2), (M.2)*, (NE) and (QA)."""
    if depth > W.P_max - 1:
        W = W.extended(depth + 1)
    L = W.logM[: depth + 2]
    logm = W.logm[: depth + 1]  # m_1..m_{depth+1}

    # (M.1): M_p^2 <= M_{p-1} M_{p+1}, p = 1..depth
    lhs = 2 * L[1 : depth + 1]
    rhs = L[0:depth] + L[2 : depth + 2]
    slack = rhs - lhs
    tol = 1e-12 * np.maximum(1.0, np.abs(lhs))
    worst = int(np.argmin(slack + tol))
    m1 = Verdict(
        bool(np.all(slack >= -tol)),
        {"min_log_slack": float(slack.min())},
        f"worst index p={worst + 1}",
    )

    # (M.2)': M_{p+1} <= A H^{p+1} M_p
    p_idx = np.arange(depth)
    H, res = _doubling_search(lambda H: logm[:depth] - (p_idx + 1) * math.log(H))
    m2p = _verdict_from_search(H, res, "H")

    # (M.2): M_{p+q} <= A H^{p+q} M_p M_q for p + q <= depth
    pp, qq = np.meshgrid(np.arange(depth + 1), np.arange(depth + 1), indexing="ij")
    ok = pp + qq <= depth
    s_sum = np.where(ok, pp + qq, 0)
    excess = np.where(ok, L[s_sum] - L[pp] - L[qq], -np.inf)
    by_s = np.full(depth + 1, -np.inf)
    np.maximum.at(by_s, s_sum[ok], excess[ok])
    s_idx = np.arange(depth + 1)
    H, res = _doubling_search(lambda H: by_s - s_idx * math.log(H))
    m2 = _verdict_from_search(H, res, "H")

    # (M.2)* in the form 2 m_p <= m_{pQ} eventually, with Q <= 8
    m2s = Verdict(False, {}, "no Q <= 8 found")
    for Q in range(2, 9):
        P = depth // Q
        if P < 4:
            break
        ps = np.arange(1, P + 1)
        log_ratio = math.log(2.0) + logm[ps - 1] - logm[ps * Q - 1]
        tail = log_ratio[P // 2 :]
        if tail.max() <= _TOL:
            m2s = Verdict(
                True,
                {"Q": float(Q), "C": float(math.exp(max(log_ratio.max(), 0.0))),
                 "tail_ratio": float(math.exp(tail.max()))},
                "tail ratio 2 m_p / m_{pQ} <= 1",
            )
            break

    # (NE): p! <= C h^p M_p
    fact = _factorial_table(depth)
    h, res = _doubling_search(lambda h: fact - s_idx * math.log(h) - L[: depth + 1])
    ne = _verdict_from_search(h, res, "h", key_const="C")

    # (QA): divergence of sum 1/m_p, evidence only
    inv = np.exp(-logm[:depth])
    partial = np.cumsum(inv)
    lo = max(2, depth // 8)
    ps = np.arange(lo, depth + 1)
    slope = float(np.polyfit(np.log(ps), partial[ps - 1], 1)[0])
    qa = Verdict(
        None,
        {"partial_sum": float(partial[-1]), "log_slope": slope,
         "log_depth": math.log(depth)},
        "asymptotic, finite evidence only: "
        + ("partial sums keep growing with log p" if slope > 0.25 else "partial sums level off"),
    )
    return ConditionReport(depth, m1, m2p, m2, m2s, ne, qa)


def _verdict_from_search(H, res, hname: str, key_const: str = "A") -> Verdict:
    if H is None:
        return Verdict(False, {}, "no constant up to 2^10 bounds the residual")
    const = math.exp(float(res.max()))
    if key_const == "A":
        const = max(const, 1.0)
    return Verdict(True, {key_const: const, hname: H})


# ---------------------------------------------------------------------------
# relations between sequences


@dataclass
class Comparison:
    depth: int
    rate_hat: float
    rate_table: dict[int, float]
    trend: dict[int, float]
    subset: bool
    prec: bool
    finite_evidence: bool = True

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def compare(W1: WeightSequence, W2: WeightSequence, depth: int, tol: float = 0.05) -> Comparison:
    """Evidence for ``W1 ⊂ W2`` and ``W1 ≺ W2`` up to ``depth``.

    ``rate_table[P]`` is ``max_{p<=P} M1_p/M2_p`` taken to the power ``1/p``.
    Inclusion is accepted when the rate stops growing between ``depth/2`` and
    ``depth``; strict inclusion additionally asks ``log(M1_p/M2_p)/p`` to keep
    dropping by at least ``tol`` per doubling of ``p``.
    """
    W1 = W1.extended(depth)
    W2 = W2.extended(depth)
    p = np.arange(1, depth + 1)
    diff = (W1.logM[1 : depth + 1] - W2.logM[1 : depth + 1]) / p
    running = np.maximum.accumulate(diff)
    checkpoints = []
    P = depth
    while P >= 2 and len(checkpoints) < 4:
        checkpoints.append(P)
        P //= 2
    checkpoints.reverse()
    rates = {int(P): float(math.exp(max(running[P - 1], 0.0))) for P in checkpoints}
    trend = {int(P): float(diff[P - 1]) for P in checkpoints}
    half = depth // 2
    subset = bool(running[depth - 1] - running[half - 1] <= tol)
    drops = np.diff([trend[P] for P in checkpoints])
    prec = bool(subset and drops.size > 0 and np.all(drops <= -tol))
    return Comparison(depth, rates[checkpoints[-1]], rates, trend, subset, prec)
