import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from nilgrowth.content import FractionTriple, content
from nilgrowth.exactnum import NEG_INF, QQ, CoeffRing, Poly
from nilgrowth.recop import (
    GALLERY_NAMES, SEC10, CompanionPoly, bivariate_str, NotDegreeLoweringError, RecursionOperator, alpha_estimate,
    bivariate_divmod, bivariate_mul, content_decrease_check, empty_middle_cofactor, example_gallery,
    frobenius_power, operator_config, operator_from_config, rational_lower, refined_bound_holds, shape_info,
)
from nilgrowth.witness import WitnessFn

Z2, Z3 = CoeffRing.integers_mod(2), CoeffRing.integers_mod(3)


def mono(ring, n, c=1):
    return Poly.monomial(ring, n, c)


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_companion_conventions():
    P = CompanionPoly.parse("X^2 - y*X - y^2", QQ)
    assert P.rec == (mono(QQ, 1), mono(QQ, 2))
    assert P.to_str() == "X^2 - y*X - y^2"
    assert CompanionPoly.parse(P.to_str(), QQ) == P
    assert CompanionPoly.parse("X^4 + ΔX + Δ^4", Z2) == CompanionPoly.parse("X^4 + y*X + y^4", Z2)


def test_bivariate_division_inverts_product():
    A = CompanionPoly.parse("X^3 + y*X + y^3", Z3).bivariate()
    B = CompanionPoly.parse("X^2 + 2*y*X + y^2", Z3).bivariate()
    q, r = bivariate_divmod(bivariate_mul(A, B), B)
    assert q == A and all(not c for c in r)


def test_trivial_operator():
    T = example_gallery("trivial")
    assert T.image_of_basis(5) == mono(QQ, 4)
    assert T.apply(Poly(QQ, [0, 1, 1])) == Poly(QQ, [1, 1])
    assert T.apply(Poly.zero(QQ)) == Poly.zero(QQ)
    assert T.nilpotence_index(mono(QQ, 7)) == 7
    assert T.nilpotence_index(Poly.zero(QQ)) == NEG_INF


def test_order_one_zero_operator():
    T = RecursionOperator(CompanionPoly.parse("X", QQ), [0])
    assert all(not T.image_of_basis(n) for n in range(20))
    assert T.nilpotence_index(mono(QQ, 5)) == 0


def test_sec3_4_degree_drop():
    T = example_gallery("sec3-4")
    assert all(T.image_of_basis(n).degree == n - 1 for n in range(1, 80))


def test_fibonacci_images_and_linear_growth():
    T = example_gallery("fib-q")
    assert T.image_of_basis(6) == mono(QQ, 5, 8)
    assert all(T.image_of_basis(n) == mono(QQ, n - 1, fib(n)) for n in range(1, 60))
    assert T.nilpotence_indices(100) == list(range(101))


def test_recurrence_identity_on_memo():
    for name in ("sec10-p5", "hecke-p2-T3", "prop10.3-d3"):
        T = example_gallery(name)
        imgs = T.images(80)
        for n in range(T.order, 81):
            acc = Poly.zero(T.ring)
            for i, a in enumerate(T.companion.rec, start=1):
                acc = acc + a * imgs[n - i]
            assert acc == imgs[n]


def test_linearity():
    T = example_gallery("sec10-p7")
    rng = random.Random(1)
    for _ in range(20):
        f = Poly(T.ring, [rng.randrange(7) for _ in range(30)])
        g = Poly(T.ring, [rng.randrange(7) for _ in range(25)])
        assert T.apply(f + g) == T.apply(f) + T.apply(g)


def test_refuses_without_certificate():
    T = RecursionOperator(CompanionPoly.parse("X - 1", QQ), [1])  # T(y^n) = 1
    assert not T.degree_lowering
    with pytest.raises(NotDegreeLoweringError):
        T.nilpotence_index(mono(QQ, 3))
    assert T.nilpotence_index(mono(QQ, 3), max_steps=10) is None


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_fibonacci_char_p_is_killed(p):
    T = example_gallery(f"fib-p{p}")
    assert max(T.nilpotence_indices(500)) <= p


@pytest.mark.parametrize("d", [2, 3, 5])
def test_char_zero_family(d):
    T = example_gallery(f"prop10.3-d{d}")
    for k in range(0, 51):
        assert T.nilpotence_index(mono(QQ, k * d + d - 1)) == k // (d - 1) + 1


def test_image_matrix_columns():
    T = example_gallery("sec10-p5")
    A = T.image_matrix(120)
    for n in range(121):
        col = [int(x) for x in A[:, n]]
        want = list(T.image_of_basis(n).coeffs) + [0] * (121 - len(T.image_of_basis(n).coeffs))
        assert col == want


@pytest.mark.parametrize("name", ["sec10-p3", "sec10-p11", "hecke-p3-T2", "fib-p5"])
def test_batched_indices_match_iteration(name):
    T = example_gallery(name)
    fast = T.nilpotence_indices(150)
    slow = [T.nilpotence_index(mono(T.ring, n)) for n in range(151)]
    assert fast == slow


def test_shape_examples():
    info = shape_info(CompanionPoly.parse("X^4 + y*X + y^4", Z2))
    assert info.filtered and info.yd_coeff == 1 and info.empty_middle_D == 2 and info.is_nro
    assert shape_info(CompanionPoly.parse("X^8 + y*X^3 + y^3*X + y^8", Z2)).empty_middle_D == 4
    info = shape_info(CompanionPoly.parse("X^2 - y*X", QQ))
    assert info.filtered and info.yd_coeff == 0 and info.empty_middle_D == 0


def test_frobenius_examples():
    P = CompanionPoly.parse("X^2 - y*X", Z2)
    assert frobenius_power(P, 1) == CompanionPoly.parse("X^4 + y^2*X^2", Z2)
    P3 = CompanionPoly.parse("X^4 + y*X + y^4", Z2)
    assert frobenius_power(P3, 1) == CompanionPoly.parse("X^8 + y^2*X^2 + y^8", Z2)
    assert frobenius_power(P3, 0) == P3


def random_filtered(ring, d, rng, invertible_top=True):
    p = ring.modulus
    rec = [Poly(ring, [rng.randrange(p) for _ in range(i + 1)]) for i in range(1, d + 1)]
    if invertible_top:
        top = list(rec[-1].coeffs) + [0] * (d + 1 - len(rec[-1].coeffs))
        top[d] = rng.randrange(1, p)
        rec[-1] = Poly(ring, top)
    return CompanionPoly(ring, tuple(rec))


@pytest.mark.parametrize("ring", [Z2, Z3])
def test_frobenius_equals_power(ring):
    rng = random.Random(7)
    p = ring.modulus
    for d in range(1, 5):
        for k in range(3):
            P = random_filtered(ring, d, rng)
            assert frobenius_power(P, k) == P ** (p**k)


def test_cofactor_small_examples():
    cf = empty_middle_cofactor(CompanionPoly.parse("X - y", Z2))
    assert cf.e == 1 and [str(s) for s in cf.S] == ["1"]
    cf = empty_middle_cofactor(CompanionPoly.parse("X^2 + X*y + y^2", Z2))
    assert cf.e == 3 and cf.q == 4
    assert cf.product == CompanionPoly.parse("X^3 - y^3", Z2)
    P5 = example_gallery("hecke-p2-T5").companion
    cf = empty_middle_cofactor(P5)
    assert cf.e == 8
    assert bivariate_str(cf.S) == "X^2 + y^2"
    assert cf.product == CompanionPoly.parse("X^8 + y*X^3 + y^3*X + y^8", Z2)


def test_cofactor_rejects_zero_top_coefficient():
    with pytest.raises(ValueError, match="condition"):
        empty_middle_cofactor(CompanionPoly.parse("X^2 + y*X + y", Z3))


@pytest.mark.parametrize("ring", [Z2, Z3])
def test_cofactor_random(ring):
    rng = random.Random(11 + ring.modulus)
    for _ in range(50):
        d = rng.randint(1, 5)
        P = random_filtered(ring, d, rng)
        cf = empty_middle_cofactor(P)
        q = cf.q
        assert cf.e == q**cf.m * (q - 1)
        info = shape_info(cf.product)
        assert cf.product.order == cf.e
        assert info.empty_middle_D >= 1
        assert info.top_form == (1,) + (0,) * (cf.e - 1) + (ring(-1),)


def test_refined_bound_helpers():
    assert rational_lower(math.log(2) / math.log(3)) <= Fraction(math.log(2) / math.log(3))
    assert refined_bound_holds(3, 8, 3, 1, 1, Fraction(1, 2))
    assert not refined_bound_holds(100, 8, 3, 1, 1, Fraction(1, 2))


def degree_gap(T):
    gaps = [n - f.degree for n, f in enumerate(T.initial) if f]
    return min(gaps)


@pytest.mark.parametrize("name,q,D", [("sec10-p3", 3, 1), ("sec10-p5", 5, 1), ("toy-q3", 3, 1),
                                      ("hecke-p2-T3", 4, 2), ("hecke-p2-T5prime", 8, 4)])
def test_refined_bound(name, q, D, nil_indices):
    T = example_gallery(name)
    E = degree_gap(T)
    exponent = rational_lower(math.log(q - D) / math.log(q))
    for n, k in enumerate(nil_indices(name, 2000)):
        if n:
            assert refined_bound_holds(k, n, q, D, E, exponent), (n, k)


@pytest.mark.parametrize("name", ["hecke-p2-T3", "fib-p2", "hecke-p2-T5prime"])
def test_lift_to_z4(name):
    T2 = example_gallery(name)
    cfg = operator_config(T2)
    cfg["ring"] = "Z/4"
    T4 = operator_from_config(cfg)
    low = T2.nilpotence_indices(500)
    high = T4.nilpotence_indices(500)
    run = 0
    for n in range(501):
        run = max(run, low[n])
        assert high[n] <= 2 * (run + 1) - 1


@pytest.mark.parametrize("p,count,worst", [(7, 36, 3), (11, 8, 1)])
def test_sec10_exception_counts(p, count, worst):
    T = example_gallery(f"sec10-p{p}")
    idx = T.nilpotence_indices(999)
    diffs = [content(n, p, p - 1) - k for n, k in enumerate(idx) if content(n, p, p - 1) != k]
    assert len(diffs) == count
    assert 1 <= min(diffs) and max(diffs) == worst


@pytest.mark.parametrize("name,triple", [("toy-q3", (3, 3, 1)), ("hecke-p2-T3", (4, 4, 2))])
def test_content_decrease(name, triple):
    T = example_gallery(name)
    N = 2000 if name == "toy-q3" else 1000
    v = content_decrease_check(T, FractionTriple(*triple), N)
    assert v.passed and v.checked == N
    assert content_decrease_check(T, FractionTriple(*triple), 0).passed


def test_content_decrease_validates_shape():
    with pytest.raises(ValueError):
        content_decrease_check(example_gallery("sec10-p5"), FractionTriple(5, 5, 2), 10)
    with pytest.raises(ValueError):
        content_decrease_check(example_gallery("sec10-p5"), FractionTriple(7, 5, 1), 10)


@pytest.mark.parametrize("name", ["sec10-p3", "sec10-p5", "sec10-p7", "sec10-p11", "toy-q3"])
def test_corrected_ngt_bound(name, nil_indices):
    # integer-valued content c_{b,beta}(n) = beta * c^b_{b,beta}(n) bounds N_T when d = b
    T = example_gallery(name)
    p = T.ring.modulus
    c = WitnessFn(FractionTriple(p, p, 1))
    assert all(k <= (p - 1) * c(n) for n, k in enumerate(nil_indices(name, 2000)))


def test_alpha_estimate():
    _, _, a = alpha_estimate(example_gallery("fib-q"), 60)
    assert a == pytest.approx(1.0)
    zero = RecursionOperator(CompanionPoly.parse("X", Z3), [0])
    assert alpha_estimate(zero, 50)[2] == 0.0
    _, _, a3 = alpha_estimate(example_gallery("sec10-p3"), 1000)
    # sublinear; the finite-N estimate sits above log_3(2) and creeps down slowly
    assert math.log(2) / math.log(3) - 0.05 < a3 < 0.85


def test_gallery_round_trip():
    for name in GALLERY_NAMES:
        T = example_gallery(name)
        U = operator_from_config(json.loads(json.dumps(operator_config(T))))
        assert U.companion == T.companion and U.initial == T.initial
    with pytest.raises(KeyError):
        example_gallery("nope")
    assert set(SEC10) == {3, 5, 7, 11}
    assert example_gallery("sec10-p5").initial == tuple(Poly(CoeffRing.integers_mod(5), c)
                                                        for c in ([], [1], [0, 1], [0, 0, 1], [0, 0, 0, 1]))
