"""Checks that ``c^d_{b,beta}`` is a nilpotence-growth witness for ``(b, d, D)``.

A witness has four properties: its values lie in ``(1/M) N`` (discreteness),
it grows like ``n^(log_b beta)`` (growth), it increases on ``0..d-1`` and has
``c(d-D) <= c(d)`` (base), and it satisfies the step inequality relating
blocks of ``[d b^k, d b^(k+1))`` to shifts by ``i b^k`` and ``j b^k``.

The step property is checked two ways.  The sufficient check reduces it to
finitely many inequalities ``c(i-j) >= R(i,j) + bound``; the direct check
evaluates the defining min/max inequality for ``k <= k_max``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .baserep import base_stats, carry_word, reed
from .content import FractionTriple, content, content_int_table
from .exactnum import format_fraction


def m_const(t: FractionTriple) -> int:
    """``M = beta^s (beta^t - 1)`` with ``(s, t)`` the preperiod and period of ``1/d``."""
    st = base_stats(Fraction(1, t.d), t.b)
    return t.beta**st.s * (t.beta**st.t - 1)


def index_set(d: int, D: int) -> List[Tuple[int, int]]:
    """``{(i, j) : 0 <= j < j + D <= i <= d} | {(d, d)}``."""
    pairs = [(i, j) for i in range(d + 1) for j in range(d + 1) if j + D <= i]
    pairs.append((d, d))
    return pairs


class WitnessFn:
    """``n -> c_{b,beta}(n/d)`` with a cache of the fractional parts.

    ``c(n) = c_{b,beta}(n // d) + c_{b,beta}((n % d)/d)`` because the base-b
    expansion of ``n/d`` splits at the point.
    """

    def __init__(self, t: FractionTriple):
        self.t = t
        self.frac = [content(Fraction(r, t.d), t.b, t.beta) for r in range(t.d)]
        self._ints: List[int] = [0]

    def _int_part(self, k: int) -> int:
        if k >= len(self._ints):
            self._ints = content_int_table(max(2 * len(self._ints), k + 1), self.t.b, self.t.beta)
        return self._ints[k]

    def __call__(self, n: int) -> Fraction:
        q, r = divmod(n, self.t.d)
        return self._int_part(q) + self.frac[r]

    def table(self, size: int) -> List[Fraction]:
        self._int_part(size // self.t.d + 1)
        d = self.t.d
        return [self._ints[n // d] + self.frac[n % d] for n in range(size)]

    def float_table(self, size: int) -> np.ndarray:
        d = self.t.d
        self._int_part(size // d + 1)
        ns = np.arange(size)
        ints = np.asarray(self._ints, dtype=np.float64)[ns // d]
        fracs = np.asarray([float(x) for x in self.frac])[ns % d]
        return ints + fracs


def r_value(t: FractionTriple, m: int, n: int, c: Optional[WitnessFn] = None) -> Fraction:
    """``R(m, n) = D reed_beta(r_b((m-n)/d, n/d))`` for ``m >= n``.

    Checked against ``c(m) - c(m-n) = c(n) - R(m, n)`` on every call.
    """
    if m < n or n < 0:
        raise ValueError(f"need 0 <= n <= m, got m={m}, n={n}")
    value = t.D * reed(carry_word(Fraction(m - n, t.d), Fraction(n, t.d), t.b), t.beta)
    c = c or WitnessFn(t)
    assert c(m) - c(m - n) == c(n) - value, f"carry identity broken at {t}, m={m}, n={n}"
    return value


@dataclass
class PropertyVerdict:
    name: str
    passed: bool
    detail: Dict[str, object] = field(default_factory=dict)
    counterexamples: List[Dict[str, object]] = field(default_factory=list)


def check_discreteness(t: FractionTriple, n_range: int = 1000, c: Optional[WitnessFn] = None) -> PropertyVerdict:
    """``M c(n)`` is an integer: literally for ``n <= n_range`` and for all ``n`` via the split."""
    c = c or WitnessFn(t)
    M = m_const(t)
    bad = [{"n": n, "Mc": format_fraction(M * c(n))} for n in range(n_range + 1)
           if (M * c(n)).denominator != 1]
    frac_ok = all((M * x).denominator == 1 for x in c.frac)
    return PropertyVerdict("discreteness", not bad and frac_ok,
                           {"M": M, "n_range": n_range, "all_n_via_split": frac_ok}, bad[:5])


def check_growth(t: FractionTriple, n_range: int = 10_000, c: Optional[WitnessFn] = None) -> PropertyVerdict:
    """``beta^(l-1) <= c(n) < (b-1) beta^l/(beta-1)`` and ``b^(l-1) <= n/d < b^l`` with ``l = ell_b(n/d)``.

    Both chains are exact; together they give ``c(n) ~ n^(log_b beta)``
    with explicit constants.
    """
    c = c or WitnessFn(t)
    b, beta, d = t.b, t.beta, t.d
    bad = []
    for n in range(d, n_range + 1):
        whole = n // d
        ell = _ell(whole, b)
        q = Fraction(n, d)
        val = c(n)
        ok = (b ** (ell - 1) <= q < b**ell and beta ** (ell - 1) <= val
              and val * (beta - 1) < (b - 1) * beta**ell)
        if not ok:
            bad.append({"n": n, "c": format_fraction(val), "ell": ell})
            if len(bad) >= 5:
                break
    return PropertyVerdict("growth", not bad, {"n_range": n_range}, bad)


def _ell(n: int, b: int) -> int:
    ell = 0
    while n:
        n //= b
        ell += 1
    return ell


def check_base(t: FractionTriple, c: Optional[WitnessFn] = None) -> PropertyVerdict:
    """Strict chain ``c(0) < ... < c(d-1)`` and ``c(d-D) <= c(d)``.

    The verdict uses the non-strict comparison, which is what the easy cases
    ``d in {b-1, b}`` give (there ``c(d-D) = c(d) = 1``); the strict
    comparison is reported alongside.
    """
    c = c or WitnessFn(t)
    d, D = t.d, t.D
    vals = [c(i) for i in range(d + 1)]
    bad = [{"i": i, "c_i": format_fraction(vals[i]), "c_next": format_fraction(vals[i + 1])}
           for i in range(d - 1) if not vals[i] < vals[i + 1]]
    le = vals[d - D] <= vals[d]
    lt = vals[d - D] < vals[d]
    if not le:
        bad.append({"i": d - D, "c_i": format_fraction(vals[d - D]), "c_d": format_fraction(vals[d])})
    return PropertyVerdict("base", not bad, {
        "values": [format_fraction(v) for v in vals],
        "chain_strict": all(vals[i] < vals[i + 1] for i in range(d - 1)),
        "c_d_minus_D_le_c_d": le, "c_d_minus_D_lt_c_d": lt}, bad)


def step_bound(t: FractionTriple) -> Fraction:
    """Lower bound demanded of ``c(i - j)`` by the sufficient step check.

    It caps the carry terms: ``D/beta`` when ``d = b`` (one carried digit),
    ``D/(beta-1)`` when ``d = b - 1`` and ``D(beta+1)/(beta(beta-1))``
    otherwise, where a second carry word ``0.01^oo`` is added.
    """
    b, d, D, beta = t.b, t.d, t.D, t.beta
    if d == b:
        return Fraction(D, beta)
    if d == b - 1:
        return Fraction(D, beta - 1)
    return Fraction(D * (beta + 1), beta * (beta - 1))


def check_step_sufficient(t: FractionTriple, c: Optional[WitnessFn] = None) -> PropertyVerdict:
    """Finite reduction of the step inequality over the index set.

    ``i = d``: ``c(d) >= c(j)``.  ``i < d``: ``c(i - j) >= bound`` with
    :func:`step_bound`; when ``d in {b-1, b}`` the term ``R(i, j)`` must also
    vanish.  The sharper route ``c(i - j) >= R(i, j) + cap`` (exact
    ``R(i, j)``, worst case ``cap`` for the carry of the block element) is
    also sufficient; the verdict passes if either route does and the
    detail records both.
    """
    c = c or WitnessFn(t)
    d, D, beta = t.d, t.D, t.beta
    bound = step_bound(t)
    cap = Fraction(D, beta) if d == t.b else Fraction(D, beta - 1)
    bad = []
    sharp_ok = True
    for i, j in index_set(d, D):
        if i == d:
            lhs, rhs = c(d), c(j)
            ok = lhs >= rhs
        else:
            R = r_value(t, i, j, c)
            lhs, rhs = c(i - j), bound
            ok = lhs >= rhs and (d < t.b - 1 or R == 0)
            sharp_ok = sharp_ok and lhs >= R + cap
        if not ok:
            bad.append({"i": i, "j": j, "lhs": format_fraction(lhs), "rhs": format_fraction(rhs)})
    return PropertyVerdict("step_sufficient", not bad or sharp_ok,
                           {"bound": format_fraction(bound), "pairs": len(index_set(d, D)),
                            "bound_route": not bad, "exact_R_route": sharp_ok}, bad[:5])


def check_step_direct(t: FractionTriple, k_max: int = 1, n_budget: Optional[int] = None,
                      c: Optional[WitnessFn] = None) -> PropertyVerdict:
    """The step inequality itself for ``0 <= k <= k_max``.

    For each ``k`` and ``(i, j)``: ``min c(n) - c(n - i b^k)`` over
    ``n in [d b^k, d b^(k+1))`` is compared with ``max c(m) - c(m - j b^k)``
    over ``j b^k <= m <= n_budget`` (default ``d b^(k+1) - 1``).  Floats
    locate the extremes; the comparison itself is exact.
    """
    c = c or WitnessFn(t)
    b, d = t.b, t.d
    top = d * b ** (k_max + 1)
    size = max(top, (n_budget or 0) + 1)
    approx = c.float_table(size)
    eps = 1e-7
    bad = []
    checked = 0
    for k in range(k_max + 1):
        bk = b**k
        lo, hi = d * bk, d * bk * b
        m_hi = (n_budget if n_budget is not None else hi - 1)
        lhs_min: Dict[int, Fraction] = {}
        rhs_max: Dict[int, Fraction] = {}
        for i in range(d + 1):
            diff = approx[lo:hi] - approx[lo - i * bk:hi - i * bk]
            near = np.nonzero(diff <= diff.min() + eps)[0] + lo
            lhs_min[i] = min(c(int(n)) - c(int(n) - i * bk) for n in near)
        for j in range(d + 1):
            if j * bk > m_hi:
                continue
            ms = np.arange(j * bk, m_hi + 1)
            diff = approx[ms] - approx[ms - j * bk]
            near = ms[diff >= diff.max() - eps]
            rhs_max[j] = max(c(int(m)) - c(int(m) - j * bk) for m in near)
        for i, j in index_set(d, t.D):
            if j not in rhs_max:
                continue
            checked += 1
            if not lhs_min[i] >= rhs_max[j]:
                bad.append({"k": k, "i": i, "j": j, "lhs_min": format_fraction(lhs_min[i]),
                            "rhs_max": format_fraction(rhs_max[j])})
    return PropertyVerdict("step_direct", not bad,
                           {"k_max": k_max, "n_budget": n_budget, "comparisons": checked}, bad[:5])


@dataclass
class WitnessReport:
    triple: FractionTriple
    M: int
    hypotheses_met: bool
    discreteness: PropertyVerdict
    growth: PropertyVerdict
    base: PropertyVerdict
    step_sufficient: PropertyVerdict
    step_direct: Optional[PropertyVerdict] = None

    @property
    def passed(self) -> bool:
        return all(v.passed for v in (self.discreteness, self.growth, self.base, self.step_sufficient))

    def verdicts(self) -> List[PropertyVerdict]:
        out = [self.discreteness, self.growth, self.base, self.step_sufficient]
        if self.step_direct is not None:
            out.append(self.step_direct)
        return out

    def to_dict(self) -> Dict[str, object]:
        b, d, D = self.triple.as_tuple()
        return {"b": b, "d": d, "D": D, "beta": self.triple.beta, "M": self.M,
                "hypotheses_met": self.hypotheses_met, "passed": self.passed,
                "properties": {v.name: asdict(v) for v in self.verdicts()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def witness_report(t: FractionTriple, discreteness_range: int = 1000, growth_range: int = 10_000,
                   k_max: Optional[int] = 1, n_budget: Optional[int] = None) -> WitnessReport:
    """Run all four property checks (plus the direct step check unless ``k_max`` is None)."""
    c = WitnessFn(t)
    return WitnessReport(
        triple=t, M=m_const(t), hypotheses_met=t.hypotheses_met(),
        discreteness=check_discreteness(t, discreteness_range, c),
        growth=check_growth(t, growth_range, c),
        base=check_base(t, c),
        step_sufficient=check_step_sufficient(t, c),
        step_direct=None if k_max is None else check_step_direct(t, k_max, n_budget, c),
    )


def poly_content(f, c: Union[FractionTriple, WitnessFn, Callable[[int], object]]):
    """``max c(n)`` over the support of ``f``; ``-inf`` for the zero polynomial."""
    if isinstance(c, FractionTriple):
        c = WitnessFn(c)
    support = f.support()
    if not support:
        return float("-inf")
    return max(c(n) for n in support)
