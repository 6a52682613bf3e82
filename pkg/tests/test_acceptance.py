"""Acceptance criteria 1-8 at their stated tolerances; criterion 9 is a report.

Each test records one PASS/FAIL line, repeated in the terminal summary.
"""
import math
import random
import time
from fractions import Fraction

import pytest

from nilgrowth.baserep import base_stats, carry_word, carry_word_dfold, reed, render_word, rite
from nilgrowth.content import (
    FractionTriple, all_triples, carry_content_identity, closed_carries, content, content_int_table,
    growth_check, multiple_digits, unit_digits,
)
from nilgrowth.exactnum import CoeffRing, Poly
from nilgrowth.hecke import (
    hilbert_samuel_count, hilbert_samuel_summary, joint_nilpotence, kernel_check, oracle_images,
    verify_hecke_recursion,
)
from nilgrowth.recop import (
    CompanionPoly, alpha_estimate, bivariate_str, content_decrease_check, empty_middle_cofactor,
    example_gallery, shape_info,
)
from nilgrowth.witness import WitnessFn, check_base, witness_report


def test_criterion_1_golden_values(acceptance):
    t0 = time.perf_counter()
    checks = [
        content(196, 5, 3) == 58,
        content(Fraction(1, 3), 7, 5) == Fraction(1, 2),
        content(Fraction(1, 6), 8, 3) == Fraction(19, 24),
        content(71, 5, 4) == 49,
        render_word(carry_word(77, 11, 3)) == "1101_3",
        reed(carry_word(77, 11, 3), 2) == 13,
        (content(77, 3, 2), content(11, 3, 2), content(88, 3, 2)) == (28, 6, 21),
        carry_content_identity(77, 11, 3, 2) == (34, 34),
        render_word(carry_word(Fraction(53, 60), Fraction(23, 100), 5)) == "0.10(01)_5",
        (content(Fraction(53, 60), 5, 3), content(Fraction(23, 100), 5, 3),
         content(Fraction(167, 150), 5, 3)) == (Fraction(19, 12), Fraction(1, 2), Fraction(25, 18)),
        reed(carry_word(Fraction(53, 60), Fraction(23, 100), 5), 3) == Fraction(25, 72),
        render_word(carry_word(Fraction(1, 3), Fraction(2, 3), 10)) == "0.(1)_10",
    ]
    checks += [carry_content_identity(Fraction(1, 3), Fraction(2, 3), 10, beta)
               == (Fraction(9, beta - 1),) * 2 for beta in range(2, 10)]
    elapsed = time.perf_counter() - t0
    ok = all(checks) and elapsed < 1
    acceptance(1, ok, f"{sum(checks)}/{len(checks)} golden values exact in {elapsed:.3f}s (limit 1s)")
    assert ok


def _random_rational(rng):
    return Fraction(rng.randrange(0, 5000), rng.randrange(1, 501))


def test_criterion_2_property_suite(acceptance):
    rng = random.Random(20261015)
    t0 = time.perf_counter()
    failures = {}
    bad = 0
    for _ in range(10_000):
        b, beta = rng.randrange(2, 13), rng.randrange(2, 13)
        lhs, rhs = carry_content_identity(_random_rational(rng), _random_rational(rng), b, beta)
        bad += lhs != rhs
    failures["carry_identity"] = bad
    bad = 0
    for _ in range(10_000):
        q, b = _random_rational(rng), rng.randrange(2, 13)
        bad += reed(rite(q, b), b) != q
    failures["rite_reed"] = bad
    bad = 0
    for _ in range(1000):
        q = Fraction(rng.randrange(1, 5000), rng.randrange(1, 501))
        k, b = rng.randrange(1, 200), rng.randrange(2, 13)
        s1, s2 = base_stats(q, b), base_stats(k * q, b)
        bad += not (s2.s <= s1.s and s1.t % s2.t == 0)
    failures["integrality"] = bad
    bad = 0
    for b in range(2, 13):
        for d in range(2, b + 1):
            for D in range(1, d):
                k = 10
                a = unit_digits(b, d, k)
                e = multiple_digits(b, d, D, k)
                r = carry_word_dfold(d, D, b, k + 1)
                first, second = closed_carries(b, d, D, k + 1)
                ok = (r == first == second and e == rite(Fraction(D, d), b).fraction_digits(k)
                      and all(e[j - 1] == D * a[j - 1] + r[j] - b * r[j - 1] for j in range(1, k + 1)))
                bad += not ok
    failures["dmult_r3"] = bad
    bad = 0
    for b, beta in [(3, 2), (4, 2), (5, 3), (8, 3), (9, 6)]:
        table = content_int_table(100_001, b, beta)
        bad += sum(not growth_check(n, b, beta, table[n]) for n in range(1, 100_001))
    failures["growth"] = bad
    elapsed = time.perf_counter() - t0
    ok = not any(failures.values()) and elapsed < 60
    acceptance(2, ok, f"failures {failures} in {elapsed:.1f}s (limit 60s)")
    assert ok


def test_criterion_3_witness_audit(acceptance):
    t0 = time.perf_counter()
    triples = [t for t in all_triples(16) if t.hypotheses_met()]
    failed = [t.as_tuple() for t in triples if not witness_report(t, 1000, 10_000, k_max=None).passed]
    v1 = check_base(FractionTriple(7, 5, 5))
    v2 = check_base(FractionTriple(11, 9, 7))
    exact = (not v1.passed and v1.counterexamples[0] == {"i": 2, "c_i": "3", "c_next": "3"}
             and [FractionTriple(7, 5, 5).c(i) for i in range(6)] == [0, 2, 3, 3, 4, 1]
             and not v2.passed and v2.counterexamples[0] == {"i": 4, "c_i": "334/195", "c_next": "316/195"})
    elapsed = time.perf_counter() - t0
    ok = not failed and exact and elapsed < 300
    acceptance(3, ok, f"{len(triples)} triples, {len(failed)} failed; base counterexamples exact={exact}; "
                      f"{elapsed:.1f}s (limit 300s)")
    assert ok


NRO_GALLERY = ["sec10-p3", "sec10-p5", "sec10-p7", "sec10-p11", "toy-q3"]


def test_criterion_4_ngt_bound(acceptance, nil_indices):
    t0 = time.perf_counter()
    violations = {}
    decrease = {}
    for name in NRO_GALLERY:
        T = example_gallery(name)
        p = T.ring.modulus
        t = FractionTriple(p, p, 1)
        c = WitnessFn(t)
        idx = nil_indices(name, 2000)
        violations[name] = sum(1 for n, k in enumerate(idx) if k > c(n))
        decrease[name] = content_decrease_check(T, t, 2000).passed
    elapsed = time.perf_counter() - t0
    ok = not any(violations.values()) and all(decrease.values())
    acceptance(4, ok, f"N_T(y^n) <= c^d(n), n <= 2000: violations {violations}; "
                      f"content_decrease_check {decrease}; {elapsed:.1f}s")
    assert ok


def test_criterion_5_characteristic_dichotomy(acceptance):
    t0 = time.perf_counter()
    fib = example_gallery("fib-q").nilpotence_indices(100) == list(range(101))
    killed = {p: max(example_gallery(f"fib-p{p}").nilpotence_indices(500)) <= p for p in (2, 3, 5, 7)}
    family = {}
    for d in (2, 3, 5):
        T = example_gallery(f"prop10.3-d{d}")
        family[d] = all(T.nilpotence_index(Poly.monomial(T.ring, k * d + d - 1)) == k // (d - 1) + 1
                        for k in range(51))
    elapsed = time.perf_counter() - t0
    ok = fib and all(killed.values()) and all(family.values()) and elapsed < 60
    acceptance(5, ok, f"fib-q linear={fib}; T^(p+1)=0 {killed}; family {family}; {elapsed:.1f}s (limit 60s)")
    assert ok


def _random_companion(ring, d, rng):
    p = ring.modulus
    rec = [Poly(ring, [rng.randrange(p) for _ in range(i + 1)]) for i in range(1, d + 1)]
    top = list(rec[-1].coeffs) + [0] * (d + 1 - len(rec[-1].coeffs))
    top[d] = rng.randrange(1, p)
    rec[-1] = Poly(ring, top)
    return CompanionPoly(ring, tuple(rec))


def test_criterion_6_cofactor(acceptance):
    rng = random.Random(6)
    t0 = time.perf_counter()
    bad = 0
    for ring in (CoeffRing.integers_mod(2), CoeffRing.integers_mod(3)):
        for _ in range(50):
            cf = empty_middle_cofactor(_random_companion(ring, rng.randint(1, 5), rng))
            info = shape_info(cf.product)
            good = (cf.e == cf.q**cf.m * (cf.q - 1) and cf.product.order == cf.e
                    and info.empty_middle_D >= 1
                    and info.top_form == (1,) + (0,) * (cf.e - 1) + (ring(-1),))
            bad += not good
    cf5 = empty_middle_cofactor(example_gallery("hecke-p2-T5").companion)
    p5 = bivariate_str(cf5.S) == "X^2 + y^2" and cf5.e == 8
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and p5 and elapsed < 60
    acceptance(6, ok, f"100 random companions, {bad} bad; P_5 cofactor X^2+y^2, e=8: {p5}; "
                      f"{elapsed:.1f}s (limit 60s)")
    assert ok


HECKE_BOUNDS = {"hecke-p2-T3": (4, 4, 2), "hecke-p2-T5prime": (8, 8, 4),
                "hecke-p3-T2": (3, 3, 1), "hecke-p3-T7prime": (9, 9, 3)}


def test_criterion_7_hecke(acceptance, nil_indices):
    t0 = time.perf_counter()
    recursions = {}
    for name in HECKE_BOUNDS:
        T = example_gallery(name)
        p, ell = int(name[7]), int(name[10])
        oracle = oracle_images(p, ell, 200)
        recursions[(p, ell)] = (verify_hecke_recursion(p, ell, 200).holds
                                and all(oracle[n] == T.image_of_basis(n) for n in range(201)))
    kernels = {p: kernel_check(p, 200).passed for p in (2, 3)}
    violations = {}
    for name, triple in HECKE_BOUNDS.items():
        c = WitnessFn(FractionTriple(*triple))
        violations[name] = sum(1 for n, k in enumerate(nil_indices(name, 1000)) if k > c(n))
    elapsed = time.perf_counter() - t0
    ok = all(recursions.values()) and all(kernels.values()) and not any(violations.values()) and elapsed < 600
    acceptance(7, ok, f"recursion vs oracle {recursions}; kernel {kernels}; "
                      f"N_T(Delta^n) <= c^d(n) violations (n <= 1000) {violations}; {elapsed:.1f}s")
    assert ok


def test_criterion_8_hilbert_samuel(acceptance):
    t0 = time.perf_counter()
    table = joint_nilpotence(2, 1000)
    counts = {k: hilbert_samuel_count(table, k) for k in range(2, 16)}
    short = {k: c for k, c in counts.items() if c < 3 * k}
    summary = hilbert_samuel_summary(2, 1000)
    elapsed = time.perf_counter() - t0
    ok = not short
    acceptance(8, ok, f"count(k) >= 3k for k=2..15 (min margin {min(c - 3 * k for k, c in counts.items())}); "
                      f"diagnostic slope {summary['diagnostic_slope_ge']:.3f}; {elapsed:.1f}s")
    assert ok


def test_criterion_9_report_only(acceptance, nil_indices):
    parts = []
    for name in NRO_GALLERY[:4]:
        p = int(name[7:])
        _, _, a = alpha_estimate(example_gallery(name), 1000)
        parts.append(f"{name} alpha_hat={a:.3f} vs log_p(p-1)={math.log(p - 1) / math.log(p):.3f}")
    for name in ("hecke-p2-T3", "hecke-p2-T5prime"):
        _, _, a = alpha_estimate(example_gallery(name), 1000)
        parts.append(f"{name} alpha_hat={a:.3f}")
    s = hilbert_samuel_summary(2, 1000)
    # a joint growth exponent of 1/2 would make #{n : N(Delta^n) < k} grow like k^2
    parts.append(f"p=2 log-log slope of #{{N < k}} = {s['diagnostic_slope_lt']:.3f} (exponent 1/2 predicts 2)")
    acceptance(9, "REPORT", "; ".join(parts))
