import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasigen.errors import NonMonotoneQuotients, RSequenceInvalid, SupAtTableEdge
from quasigen.weights import (
    RSequence,
    assoc,
    associated_function,
    canonical_rsequences,
    check_conditions,
    compare,
    counting_function,
    make_weight_sequence,
)

FACT = make_weight_sequence("factorial")
GEV2 = make_weight_sequence({"kind": "gevrey", "s": 2})
PROD = make_weight_sequence({"kind": "product", "base": "factorial", "rj": {"rule": "log"}})


def test_factorial_table():
    assert FACT.logM[3] == pytest.approx(math.log(6), abs=1e-14)


def test_gevrey_one_is_factorial():
    G1 = make_weight_sequence({"kind": "gevrey", "s": 1})
    assert np.array_equal(G1.logM, FACT.logM)


def test_product_spot_value():
    # log 2! + log(1 + log 2) + log(1 + log 3), summed by hand
    assert PROD.logM[2] == pytest.approx(1.9610125260740052, abs=1e-13)


def test_product_from_list_matches_rule():
    r = [1.0] + [1 + math.log(1 + j) for j in range(1, 257)]
    W = make_weight_sequence({"kind": "product", "base": {"kind": "factorial"}, "rj": r})
    assert np.allclose(W.logM, PROD.logM, atol=1e-12)


def test_table_rejects_nonmonotone_quotients():
    with pytest.raises(NonMonotoneQuotients):
        make_weight_sequence({"kind": "table", "logM": [0.0, 1.0, 1.5, 1.6]})


def test_rsequence_must_grow():
    with pytest.raises(RSequenceInvalid):
        RSequence(np.ones(10))


@pytest.mark.parametrize("t, expected", [(0.0, 0.0), (1.0, 0.0), (5.0, 3.2596978193884563)])
def test_assoc_factorial(t, expected):
    # the value at 5 came from a brute-force sup over p <= 1000
    assert assoc(FACT, t) == pytest.approx(expected, abs=1e-12)


def test_counting_examples():
    assert counting_function(FACT, 3.5) == 3
    assert counting_function(FACT, 0.5) == 0
    assert counting_function(GEV2, 9.0) == 3


def test_table_edge_raises():
    with pytest.raises(SupAtTableEdge):
        associated_function(FACT, 1e6)


def test_assoc_extends_analytic_tables():
    assert np.isfinite(assoc(FACT, 1e3))


@pytest.mark.parametrize("W", [FACT, GEV2, PROD], ids=["factorial", "gevrey2", "product"])
@given(t=st.floats(0.5, 60.0))
def test_counting_identity(W, t):
    m = int(counting_function(W, t))
    assert abs(assoc(W, t) - (m * math.log(t) - W.logM[m])) <= 1e-12


@given(a=st.floats(0.0, 80.0), b=st.floats(0.0, 80.0))
def test_monotone(a, b):
    lo, hi = sorted((a, b))
    assert assoc(PROD, lo) <= assoc(PROD, hi) + 1e-12
    assert counting_function(PROD, lo) <= counting_function(PROD, hi)


@given(t=st.floats(0.1, 60.0))
def test_product_assoc_below_base(t):
    assert assoc(PROD, t) <= assoc(FACT, t) + 1e-12


def test_m2_implies_assoc_doubling():
    rpt = check_conditions(FACT, 128)
    A, H = rpt.m2.constants["A"], rpt.m2.constants["H"]
    t = np.linspace(0.1, 60, 400)
    assert np.all(2 * assoc(FACT, t) <= assoc(FACT, H * t) + math.log(A) + 1e-9)


def test_factorial_conditions():
    rpt = check_conditions(FACT, 128)
    assert rpt.m1.holds
    assert rpt.m2.holds and rpt.m2.constants == {"A": 1.0, "H": 2.0}
    assert rpt.ne.holds and rpt.ne.constants == {"C": 1.0, "h": 1.0}
    assert rpt.qa.holds is None and rpt.qa.constants["log_slope"] > 0.9


def test_gevrey_conditions():
    rpt = check_conditions(make_weight_sequence({"kind": "gevrey", "s": 3}), 128)
    assert rpt.ne.holds and rpt.ne.constants == {"C": 1.0, "h": 1.0}
    assert check_conditions(GEV2, 128).qa.constants["log_slope"] < 0.1


def test_binomial_oracle_for_m2():
    # (p+q)! <= 2^(p+q) p! q!  is  C(p+q, p) <= 2^(p+q)
    for p in range(65):
        for q in range(65 - p):
            assert math.comb(p + q, p) <= 2 ** (p + q)


def test_compare_examples():
    same = compare(FACT, FACT, 128)
    assert same.subset and not same.prec and same.rate_hat == 1.0
    assert compare(FACT, GEV2, 128).prec
    bad = compare(GEV2, FACT, 128)
    assert not bad.subset
    rates = list(bad.rate_table.values())
    assert all(b > a for a, b in zip(rates, rates[1:]))


def test_canonical_rsequences_valid():
    for r in canonical_rsequences(64):
        assert r.r[0] == 1.0 and np.all(np.diff(r.r) >= 0)
