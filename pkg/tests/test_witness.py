import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilgrowth.content import FractionTriple, all_triples, content
from nilgrowth.exactnum import NEG_INF, QQ, Poly
from nilgrowth.witness import (
    WitnessFn, check_base, check_discreteness, check_growth, check_step_direct, check_step_sufficient,
    index_set, m_const, poly_content, r_value, step_bound, witness_report,
)

triples = st.sampled_from(list(all_triples(12)))


@settings(max_examples=100, deadline=None)
@given(t=triples, n=st.integers(0, 5000))
def test_witness_fn_is_content_of_n_over_d(t, n):
    assert WitnessFn(t)(n) == content(Fraction(n, t.d), t.b, t.beta)


@settings(max_examples=60, deadline=None)
@given(t=triples)
def test_values_lie_in_lattice(t):
    M = m_const(t)
    c = WitnessFn(t)
    assert all((M * v).denominator == 1 for v in c.table(600))


def test_m_constant_examples():
    # 1/5 in base 7 is 0.(1254)
    assert m_const(FractionTriple(7, 5, 5)) == 2**4 - 1
    # 1/b = 0.1 terminates: s = 1, t = 1
    assert m_const(FractionTriple(6, 6, 2)) == 4 * 3


@settings(max_examples=80, deadline=None)
@given(t=triples, m=st.integers(0, 3000), n=st.integers(0, 3000))
def test_r_identity(t, m, n):
    m, n = max(m, n), min(m, n)
    c = WitnessFn(t)
    assert c(m) - c(m - n) == c(n) - r_value(t, m, n, c)


def test_index_set():
    pairs = index_set(3, 2)
    assert (3, 3) in pairs and (2, 0) in pairs and (3, 1) in pairs
    assert (1, 0) not in pairs and (3, 2) not in pairs


def test_base_counterexample_7_5_5():
    t = FractionTriple(7, 5, 5)
    v = check_base(t)
    assert [t.c(i) for i in range(6)] == [0, 2, 3, 3, 4, 1]
    assert not v.passed
    assert v.counterexamples == [{"i": 2, "c_i": "3", "c_next": "3"}]


def test_base_counterexample_11_9_7():
    t = FractionTriple(11, 9, 7)
    v = check_base(t)
    assert t.c(4) == Fraction(334, 195) and t.c(5) == Fraction(316, 195)
    assert not v.passed
    assert v.counterexamples[0] == {"i": 4, "c_i": "334/195", "c_next": "316/195"}


def test_base_reports_strict_and_weak():
    v = check_base(FractionTriple(4, 4, 2))
    assert v.passed
    assert v.detail["c_d_minus_D_le_c_d"] and not v.detail["c_d_minus_D_lt_c_d"]


def test_step_bound_cases():
    assert step_bound(FractionTriple(8, 8, 4)) == Fraction(1)
    assert step_bound(FractionTriple(8, 7, 4)) == Fraction(4, 3)
    assert step_bound(FractionTriple(8, 4, 4)) == Fraction(4 * 5, 4 * 3)


def test_sufficient_step_records_both_routes():
    v = check_step_sufficient(FractionTriple(5, 3, 2))
    assert v.passed
    assert not v.detail["bound_route"] and v.detail["exact_R_route"]
    v = check_step_sufficient(FractionTriple(9, 9, 3))
    assert v.detail["bound_route"]


@pytest.mark.parametrize("b,d,D", [(5, 3, 2), (4, 4, 2), (3, 3, 1), (8, 6, 4), (7, 6, 3)])
def test_direct_step_agrees(b, d, D):
    assert check_step_direct(FractionTriple(b, d, D), k_max=2).passed


def test_growth_and_discreteness_small():
    t = FractionTriple(9, 9, 3)
    assert check_growth(t, 3000).passed
    assert check_discreteness(t, 500).passed


def test_report_serializes_and_fails_with_counterexample():
    rep = witness_report(FractionTriple(7, 5, 5), 200, 500, k_max=None)
    doc = json.loads(rep.to_json())
    assert doc["passed"] is False and doc["properties"]["base"]["passed"] is False
    for v in rep.verdicts():
        if not v.passed:
            assert v.counterexamples


def test_reports_pass_under_hypotheses_small_bases():
    for t in all_triples(10):
        if t.hypotheses_met():
            assert witness_report(t, 200, 1000, k_max=None).passed, t


def test_poly_content():
    f = Poly(QQ, [0, 0, 1, 0, 5])
    t = FractionTriple(4, 4, 2)
    assert poly_content(f, t) == max(t.c(2), t.c(4))
    assert poly_content(Poly.zero(QQ), t) == NEG_INF
    assert poly_content(f, lambda n: n) == 4
