"""The (b, beta)-content function and the unit-fraction digit apparatus.

``content(q, b, beta)`` writes ``q`` in base ``b`` and reads the digits back
in base ``beta``.  The second half of the module studies ``1/d`` and ``D/d``
in base ``b`` together with the carries of ``1/d + ... + 1/d``; these feed
the lower bounds on ``c(1)`` and ``c(D)`` used by the witness checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .baserep import carry_word, carry_word_dfold, reed, rite
from .exactnum import nonneg


@dataclass(frozen=True)
class ContentParams:
    b: int
    beta: int

    def __post_init__(self):
        if self.b < 2 or self.beta < 2:
            raise ValueError(f"bases must be >= 2, got (b, beta) = ({self.b}, {self.beta})")

    def __call__(self, q) -> Fraction:
        return content(q, self.b, self.beta)


def content(q, b: int, beta: int) -> Fraction:
    """``c_{b,beta}(q)``: read the normal base-``b`` expansion of ``q`` in base ``beta``."""
    if b < 2 or beta < 2:
        raise ValueError(f"bases must be >= 2, got (b, beta) = ({b}, {beta})")
    return reed(rite(q, b), beta)


def content_int(n: int, b: int, beta: int) -> int:
    acc, scale = 0, 1
    while n:
        n, r = divmod(n, b)
        acc += r * scale
        scale *= beta
    return acc


def content_int_table(size: int, b: int, beta: int) -> List[int]:
    """``[c_{b,beta}(n) for n in range(size)]`` via ``c(n) = beta*c(n//b) + n%b``."""
    table = [0] * size
    for n in range(1, size):
        table[n] = beta * table[n // b] + n % b
    return table


def content_closed_form(q, b: int, beta: int) -> Fraction:
    """Evaluate through ``q = n + u/b^s + m/(b^s (b^t - 1))``."""
    from .baserep import base_stats
    st = base_stats(q, b)
    c = lambda k: content_int(k, b, beta)  # noqa: E731
    return (c(st.n) + Fraction(c(st.u), beta**st.s)
            + Fraction(c(st.m), beta**st.s * (beta**st.t - 1)))


def growth_envelope(n: int, b: int, beta: int) -> Tuple[int, Fraction]:
    """Rational bounds ``beta^(l-1) <= c(n) <= (b-1)(beta^l - 1)/(beta - 1)``, ``l = ell_b(n)``.

    Together with ``b^(l-1) <= n < b^l`` these imply the strict envelope
    ``beta^-1 n^log_b(beta) < c(n) < beta (b-1)/(beta-1) n^log_b(beta)``
    without any floating point; see :func:`growth_check`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ell = len(rite(n, b).int_digits)
    return beta ** (ell - 1), Fraction((b - 1) * (beta**ell - 1), beta - 1)


def growth_check(n: int, b: int, beta: int, value: Optional[int] = None) -> bool:
    ell = 0
    m = n
    while m:
        m //= b
        ell += 1
    if not (b ** (ell - 1) <= n < b**ell):
        return False
    c = content_int(n, b, beta) if value is None else value
    return beta ** (ell - 1) <= c and c * (beta - 1) <= (b - 1) * (beta**ell - 1)


def content_scale_check(q, k: int, b: int, beta: int) -> bool:
    """``c(b^k q) == beta^k c(q)`` for any integer ``k``."""
    q = nonneg(q)
    return content(q * Fraction(b) ** k, b, beta) == Fraction(beta) ** k * content(q, b, beta)


def carry_content_identity(m, n, b: int, beta: int) -> Tuple[Fraction, Fraction]:
    """Both sides of ``c(m) + c(n) = c(m+n) + (b - beta) reed_beta(r_b(m, n))``."""
    m, n = nonneg(m), nonneg(n)
    lhs = content(m, b, beta) + content(n, b, beta)
    rhs = content(m + n, b, beta) + (b - beta) * reed(carry_word(m, n, b), beta)
    return lhs, rhs


def content_rows(ns, b: int, beta: int) -> List[Dict[str, object]]:
    rows = []
    for n in ns:
        c = content(n, b, beta)
        rows.append({"n": n, "c": c, "c_approx": float(c)})
    return rows


# -- proper fractions -----------------------------------------------------

@dataclass(frozen=True)
class FractionTriple:
    """``(b, d, D)`` with ``1 <= D <= d <= b`` and ``beta = b - D >= 2``."""

    b: int
    d: int
    D: int

    def __post_init__(self):
        if not (1 <= self.D <= self.d <= self.b):
            raise ValueError(f"need 1 <= D <= d <= b, got (b, d, D) = {self.as_tuple()}")
        if self.b - self.D < 2:
            raise ValueError(f"need beta = b - D >= 2, got (b, d, D) = {self.as_tuple()}")

    @property
    def beta(self) -> int:
        return self.b - self.D

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.b, self.d, self.D)

    def c(self, n) -> Fraction:
        """The witness candidate ``c^d_{b,beta}(n) = c_{b,beta}(n/d)``."""
        return content(Fraction(n) / self.d, self.b, self.beta)

    def hypotheses_met(self) -> bool:
        return self.b - self.d <= 1 or 2 * self.D <= self.b

    def __str__(self) -> str:
        return f"(b={self.b}, d={self.d}, D={self.D})"


def all_triples(b_max: int, b_min: int = 2):
    for b in range(b_min, b_max + 1):
        for d in range(1, b + 1):
            for D in range(1, d + 1):
                if b - D >= 2:
                    yield FractionTriple(b, d, D)


def unit_digits(b: int, d: int, k: int) -> List[int]:
    """``a_1..a_k`` of ``1/d`` base ``b``, by ``a_k = floor(b^k/d) - sum a_i b^(k-i)``."""
    digits: List[int] = []
    for j in range(1, k + 1):
        digits.append(b**j // d - sum(a * b ** (j - i) for i, a in enumerate(digits, start=1)))
    return digits


def multiple_digits(b: int, d: int, D: int, k: int) -> List[int]:
    """``e_1..e_k`` of ``D/d`` base ``b`` (``D < d``)."""
    digits: List[int] = []
    for j in range(1, k + 1):
        digits.append(b**j * D // d - sum(e * b ** (j - i) for i, e in enumerate(digits, start=1)))
    return digits


class ClassifierError(ValueError):
    pass


def unit_fraction_case(b: int, d: int) -> int:
    """Which of the five shapes ``rite_b(1/d)`` takes (``2 <= d <= b``)."""
    if d == 1:
        raise ClassifierError("1/1 = 1.0^oo is outside the classification (d must be > 1)")
    if not 1 < d <= b:
        raise ClassifierError(f"need 1 < d <= b, got b={b}, d={d}")
    a1, a2, a3 = unit_digits(b, d, 3)
    if d == b:
        return 5
    if d == b - 1:
        return 4
    if a1 >= 2:
        return 1
    if a2 >= 3:
        return 2
    if a2 == 2 and a3 >= 4:
        return 3
    raise AssertionError(f"unclassified expansion for b={b}, d={d}: {a1, a2, a3}")  # pragma: no cover


def unit_fraction_digits(t: FractionTriple, k: int) -> Tuple[List[int], int]:
    return unit_digits(t.b, t.d, k), unit_fraction_case(t.b, t.d)


def closed_carries(b: int, d: int, D: int, k: int) -> Tuple[List[int], List[int]]:
    """``r_1..r_k`` by both closed formulas (powers of ``b`` and of ``b - d``)."""
    first = [D * b ** (j - 1) // d - D * (b ** (j - 1) // d) for j in range(1, k + 1)]
    second = [D * (b - d) ** (j - 1) // d - D * ((b - d) ** (j - 1) // d) for j in range(1, k + 1)]
    return first, second


@dataclass
class DigitsAndCarries:
    triple: FractionTriple
    a: List[int]
    e: List[int]
    r: List[int]
    r_closed_b: Optional[List[int]]
    r_closed_bd: Optional[List[int]]
    dmult_ok: Optional[bool]

    @property
    def carries_agree(self) -> bool:
        if self.r_closed_b is None:
            return True
        return self.r == self.r_closed_b == self.r_closed_bd


def fraction_digits_and_carries(t: FractionTriple, k: int) -> DigitsAndCarries:
    """Digits of ``1/d`` and ``D/d`` with the carries of the ``D``-fold sum.

    Carries come from the pairwise carry words; when ``D < d`` they are also
    evaluated by both closed formulas and ``e_j = D a_j + r_{j+1} - b r_j``
    is checked for ``j <= k``.
    """
    b, d, D = t.as_tuple()
    a = unit_digits(b, d, k)
    r = carry_word_dfold(d, D, b, k + 1)
    if D == d:
        e = rite(Fraction(D, d), b).fraction_digits(k)
        return DigitsAndCarries(t, a, e, r[:k], None, None, None)
    e = multiple_digits(b, d, D, k)
    if e != rite(Fraction(D, d), b).fraction_digits(k):
        raise AssertionError(f"digit recursion disagrees with long division for {t}")
    first, second = closed_carries(b, d, D, k + 1)
    dmult = all(e[j - 1] == D * a[j - 1] + r[j] - b * r[j - 1] for j in range(1, k + 1))
    return DigitsAndCarries(t, a, e, r[:k], first[:k], second[:k], dmult)


# -- lower bounds on c(1) and c(D) ----------------------------------------

# exhaustive over b <= 6 with d <= b - 2
KNOWN_C1_EXCEPTIONS = frozenset({(3, 1, 1), (4, 2, 2), (6, 4, 4)})


@dataclass
class BoundC1:
    triple: FractionTriple
    c1: Fraction
    prop_bound: Fraction
    cor_bound: Fraction
    prop_applies: bool
    cor_applies: bool
    prop_holds: bool
    cor_holds: bool
    known_exception: bool
    easy_value: Optional[Fraction] = None

    @property
    def prop_margin(self) -> Fraction:
        return self.c1 - self.prop_bound

    @property
    def cor_margin(self) -> Fraction:
        return self.c1 - self.cor_bound


def bound_c1(t: FractionTriple) -> BoundC1:
    """Compare ``c(1)`` with ``(beta+1)/(beta(beta-1))`` and ``D/(beta(beta-1))``."""
    b, d, D = t.as_tuple()
    beta = t.beta
    c1 = t.c(1)
    prop_bound = Fraction(beta + 1, beta * (beta - 1))
    cor_bound = Fraction(D, beta * (beta - 1))
    easy = Fraction(1, d - D) if d >= b - 1 and d > D else None
    return BoundC1(
        triple=t, c1=c1, prop_bound=prop_bound, cor_bound=cor_bound,
        prop_applies=d <= b - 2 and b > 6,
        cor_applies=d <= b - 2 and 2 * D <= b,
        prop_holds=c1 >= prop_bound, cor_holds=c1 >= cor_bound,
        known_exception=t.as_tuple() in KNOWN_C1_EXCEPTIONS,
        easy_value=easy,
    )


def poscutoff_bound(t: FractionTriple, k: int) -> Fraction:
    """Partial-sum lower bound ``(D sum (a_i - r_i) beta^(k-i) + r_{k+1}) / beta^k`` on ``c(D)``."""
    b, d, D = t.as_tuple()
    beta = t.beta
    a = unit_digits(b, d, k)
    r = carry_word_dfold(d, D, b, k + 1)
    total = D * sum((a[i - 1] - r[i - 1]) * beta ** (k - i) for i in range(1, k + 1)) + r[k]
    return Fraction(total, beta**k)


@dataclass
class BoundCD:
    triple: FractionTriple
    cD: Fraction
    bound: Fraction
    hypotheses_met: bool
    cond_d_small: bool
    cond_D_small: bool
    holds: bool
    sufficient: Dict[int, bool] = field(default_factory=dict)
    r2_equivalence: Optional[bool] = None
    cond_1prime: bool = False

    @property
    def margin(self) -> Fraction:
        return self.cD - self.bound

    @property
    def fired(self) -> List[int]:
        return sorted(k for k, v in self.sufficient.items() if v)


def bound_cD(t: FractionTriple) -> BoundCD:
    """Evaluate ``c(D) >= D(beta+1)/(beta(beta-1))`` and every sufficient condition for it.

    Nothing is asserted: outside ``D < d <= b - 2`` with one of the two
    conditions the result is only reported.
    """
    b, d, D = t.as_tuple()
    beta = t.beta
    cD = t.c(D)
    bound = Fraction(D * (beta + 1), beta * (beta - 1))
    cond_d = 2 * d <= b
    cond_D = d < b and D * (b - d) < d * (b - d - 1)
    hyp = D < d <= b - 2 and (cond_d or cond_D)
    a = unit_digits(b, d, 3)
    r = carry_word_dfold(d, D, b, 4)
    r2, r3 = r[1], r[2]
    suff = {
        1: beta >= 3 and a[0] >= 2,
        2: r2 * (beta - 1) >= 2 * D,
        3: beta >= 3 and a[1] - r2 >= 3,
        4: a[1] - r2 == 2 and r3 * (beta - 1) >= 2 * D,
        5: beta >= 3 and a[1] - r2 == 2 and a[2] - r3 >= 3,
    }
    equiv = None
    if 2 * d > b and d < b:
        equiv = cond_D == (r2 < b - d - 1)
    return BoundCD(
        triple=t, cD=cD, bound=bound, hypotheses_met=hyp, cond_d_small=cond_d,
        cond_D_small=cond_D, holds=cD >= bound, sufficient=suff, r2_equivalence=equiv,
        cond_1prime=(b - d) ** 2 > b - 1,
    )


def easy_content(t: FractionTriple, i: int) -> Fraction:
    """``c(i) = i/(d - D)`` for ``d in {b-1, b}`` and ``0 <= i < d``."""
    if t.d < t.b - 1 or t.d == t.D:
        raise ValueError(f"closed form needs d in (b-1, b) and D < d, got {t}")
    return Fraction(i, t.d - t.D)


def lcm_denominator(values) -> int:
    return math.lcm(*(Fraction(v).denominator for v in values)) if values else 1
