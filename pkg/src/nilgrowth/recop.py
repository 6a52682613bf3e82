"""Recursion operators on ``R[y]`` and the shape of their companion polynomials.

A recursion operator ``T`` is fixed by its initial images ``T(1), ..., T(y^(d-1))``
and the linear recursion ``T(y^n) = a_1 T(y^(n-1)) + ... + a_d T(y^(n-d))``.
Companion polynomials are stored by their recursion coefficients ``a_i``;
the polynomial itself is ``P = X^d - a_1 X^(d-1) - ... - a_d``.

Bivariate polynomials in ``(X, y)`` are lists of :class:`Poly` in ``y``
indexed by the power of ``X``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exactnum import NEG_INF, CoeffRing, Poly, RingMismatchError
from .finitefield import factor_shape

Bivariate = List[Poly]


def _as_poly(ring: CoeffRing, x) -> Poly:
    if isinstance(x, Poly):
        if x.ring != ring:
            raise RingMismatchError(f"ring mismatch: {x.ring} vs {ring}")
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.constant(ring, x)
    return Poly(ring, x)


def bivariate_mul(A: Bivariate, B: Bivariate) -> Bivariate:
    ring = A[0].ring
    out = [Poly.zero(ring) for _ in range(len(A) + len(B) - 1)]
    for i, a in enumerate(A):
        if not a:
            continue
        for j, b in enumerate(B):
            if b:
                out[i + j] = out[i + j] + a * b
    return out


def bivariate_divmod(A: Bivariate, B: Bivariate) -> Tuple[Bivariate, Bivariate]:
    """Division in ``R[y][X]`` by ``B`` monic in ``X``."""
    ring = A[0].ring
    db = len(B) - 1
    if B[db] != Poly.constant(ring, 1):
        raise ValueError("divisor must be monic in X")
    rem = list(A)
    quo = [Poly.zero(ring) for _ in range(max(len(A) - db, 1))]
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if not c:
            continue
        quo[k - db] = c
        for j, b in enumerate(B):
            rem[k - db + j] = rem[k - db + j] - c * b
    return quo, rem[:db]


def bivariate_str(A: Bivariate, x: str = "X", y: str = "y") -> str:
    out = ""
    for k in range(len(A) - 1, -1, -1):
        for j in range(len(A[k].coeffs) - 1, -1, -1):
            c = A[k].coeffs[j]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            c = -c if c < 0 else c
            parts = [] if c == 1 and (j or k) else [str(c)]
            if j:
                parts.append(y if j == 1 else f"{y}^{j}")
            if k:
                parts.append(x if k == 1 else f"{x}^{k}")
            term = "*".join(parts)
            if not out:
                out = term if sign == "+" else "-" + term
            else:
                out += f" {sign} {term}"
    return out or "0"


@dataclass(frozen=True)
class CompanionPoly:
    """Monic companion polynomial, stored as recursion coefficients ``a_1..a_d``."""

    ring: CoeffRing
    rec: Tuple[Poly, ...]

    def __post_init__(self):
        if not self.rec:
            raise ValueError("order must be >= 1")
        for a in self.rec:
            if a.ring != self.ring:
                raise RingMismatchError(f"ring mismatch: {a.ring} vs {self.ring}")

    @classmethod
    def from_rec(cls, ring: CoeffRing, coeffs: Sequence) -> "CompanionPoly":
        return cls(ring, tuple(_as_poly(ring, a) for a in coeffs))

    @classmethod
    def from_bivariate(cls, A: Bivariate) -> "CompanionPoly":
        """From ``X``-coefficients (index = power of ``X``); must be monic in ``X``."""
        ring = A[0].ring
        d = len(A) - 1
        while d > 0 and not A[d]:
            d -= 1
        if A[d] != Poly.constant(ring, 1) or d < 1:
            raise ValueError("companion polynomial must be monic in X of degree >= 1")
        return cls(ring, tuple(-A[d - i] for i in range(1, d + 1)))

    @classmethod
    def parse(cls, text: str, ring: CoeffRing) -> "CompanionPoly":
        """Parse a polynomial in ``X`` and ``y`` (``Δ`` is read as ``y``), e.g. ``"X^4 + y*X + y^4"``."""
        import sympy

        from sympy.parsing.sympy_parser import (convert_xor, implicit_multiplication_application,
                                                parse_expr, standard_transformations)

        X, y = sympy.symbols("X y")
        expr = parse_expr(text.replace("Δ", "y"), local_dict={"X": X, "y": y},
                          transformations=standard_transformations
                          + (convert_xor, implicit_multiplication_application))
        poly = sympy.Poly(sympy.expand(expr), X, y)
        d = poly.degree(X)
        cols: Dict[int, Dict[int, Fraction]] = {}
        for (i, j), c in poly.terms():
            cols.setdefault(i, {})[j] = Fraction(int(c.p), int(c.q))
        A = [Poly.from_dict(ring, cols.get(i, {})) for i in range(d + 1)]
        return cls.from_bivariate(A)

    @property
    def order(self) -> int:
        return len(self.rec)

    def bivariate(self) -> Bivariate:
        d = self.order
        one = Poly.constant(self.ring, 1)
        return [-self.rec[d - k - 1] for k in range(d)] + [one]

    def __mul__(self, other: "CompanionPoly") -> "CompanionPoly":
        if other.ring != self.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")
        return CompanionPoly.from_bivariate(bivariate_mul(self.bivariate(), other.bivariate()))

    def __pow__(self, e: int) -> "CompanionPoly":
        out = self.bivariate()
        for _ in range(e - 1):
            out = bivariate_mul(out, self.bivariate())
        return CompanionPoly.from_bivariate(out)

    def terms(self):
        """``(i, j, coeff)`` for each nonzero term ``coeff * y^j * X^(d-i)`` of ``P`` with ``i >= 1``."""
        for i, a in enumerate(self.rec, start=1):
            for j, c in enumerate(a.coeffs):
                if c:
                    yield i, j, self.ring(-c)

    def to_str(self) -> str:
        """The polynomial ``P`` itself (signs negated relative to the recursion)."""
        return bivariate_str(self.bivariate())

    def rec_str(self) -> str:
        return ", ".join(a.to_str() for a in self.rec)

    def __str__(self) -> str:
        return self.to_str()


@dataclass(frozen=True)
class ShapeInfo:
    filtered: bool
    yd_coeff: object
    empty_middle_D: int
    top_form: Tuple[object, ...]

    @property
    def is_nro(self) -> bool:
        return self.filtered and bool(self.yd_coeff) and self.empty_middle_D >= 1


def shape_info(P: CompanionPoly) -> ShapeInfo:
    """Filteredness, the ``y^d`` coefficient of ``a_d`` and the largest empty-middle ``D``.

    ``top_form[i]`` is the coefficient of ``y^i X^(d-i)`` in ``P``.
    """
    d = P.order
    filtered = all(a.degree <= i for i, a in enumerate(P.rec, start=1))
    yd = P.rec[-1][d]
    top = [P.ring(1)] + [P.ring(-P.rec[i - 1][i]) for i in range(1, d + 1)]
    worst = NEG_INF
    for i, j, _ in P.terms():
        if (i, j) != (d, d):
            worst = max(worst, d - i + j)
    D = d if worst == NEG_INF else max(0, d - worst)
    return ShapeInfo(filtered, yd, D, tuple(top))


def frobenius_power(P: CompanionPoly, k: int) -> CompanionPoly:
    """``P^(p^k)`` in characteristic ``p``: ``a_i(y)^(p^k)`` moves to lag ``i p^k``."""
    if not P.ring.is_prime_field:
        raise ValueError(f"need prime characteristic coefficients Z/p, got {P.ring}")
    if k < 0:
        raise ValueError("k must be >= 0")
    q = P.ring.modulus**k
    zero = Poly.zero(P.ring)
    rec = [zero] * (P.order * q)
    for i, a in enumerate(P.rec, start=1):
        # coefficients lie in F_p, so a(y)^q = a(y^q)
        spread = [0] * (len(a.coeffs) - 1) * q + [0] if a.coeffs else []
        for j, c in enumerate(a.coeffs):
            spread[j * q] = c
        rec[i * q - 1] = Poly(P.ring, spread)
    return CompanionPoly(P.ring, tuple(rec))


@dataclass(frozen=True)
class Cofactor:
    S: Bivariate
    e: int
    q: int
    m: int
    product: CompanionPoly


def empty_middle_cofactor(P: CompanionPoly) -> Cofactor:
    """Homogeneous ``S`` with ``H S = X^e - y^e``, ``H`` the top form of ``P``.

    ``h(x) = H(x, 1)`` has roots in ``F_q`` with ``q = p^lcm(factor degrees)``;
    with ``q^m`` at least every root multiplicity, ``h`` divides
    ``x^(q^m (q-1)) - 1``.  Then ``P S`` has the empty-middle shape.
    """
    ring = P.ring
    if not ring.is_prime_field:
        raise ValueError(f"cofactor needs a prime field Z/p, got {ring}")
    info = shape_info(P)
    if not info.filtered:
        raise ValueError("companion polynomial is not filtered (deg a_i <= i fails)")
    if not info.yd_coeff:
        raise ValueError("condition (3) violated: y^d coefficient of a_d is zero")
    p, d = ring.modulus, P.order
    h = Poly(ring, list(reversed(info.top_form)))
    deg_lcm, mult = factor_shape(h)
    q = p**deg_lcm
    m = 0
    while q**m < mult:
        m += 1
    e = q**m * (q - 1)
    target = Poly(ring, [-1] + [0] * (e - 1) + [1])
    s, rem = divmod(target, h)
    if rem:
        raise AssertionError("h does not divide x^e - 1")  # pragma: no cover
    # S(X, y) = y^(e-d) s(X/y): the X^k coefficient is s_k y^(e-d-k)
    S = [Poly.monomial(ring, e - d - k, s[k]) if s[k] else Poly.zero(ring) for k in range(e - d + 1)]
    product = CompanionPoly.from_bivariate(bivariate_mul(P.bivariate(), S))
    return Cofactor(S, e, q, m, product)


class NotDegreeLoweringError(ValueError):
    pass


class RecursionOperator:
    """Linear operator ``T`` on ``R[y]`` with memoized basis images ``T(y^n)``."""

    def __init__(self, companion: CompanionPoly, initial: Sequence, name: str = ""):
        initial = [_as_poly(companion.ring, f) for f in initial]
        if len(initial) != companion.order:
            raise ValueError(f"need {companion.order} initial values, got {len(initial)}")
        self.companion = companion
        self.initial = tuple(initial)
        self.name = name
        self.shape = shape_info(companion)
        self._memo: List[Poly] = list(initial)

    @property
    def ring(self) -> CoeffRing:
        return self.companion.ring

    @property
    def order(self) -> int:
        return self.companion.order

    @property
    def degree_lowering(self) -> bool:
        """Certificate: filtered companion and ``deg T(y^i) < i`` for ``i < d``.

        By induction ``deg T(y^n) <= max(deg a_i + n - i - 1) < n`` for all ``n``.
        """
        return self.shape.filtered and all(f.degree < i for i, f in enumerate(self.initial))

    def image_of_basis(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("n must be >= 0")
        memo = self._memo
        rec = self.companion.rec
        while len(memo) <= n:
            k = len(memo)
            acc = Poly.zero(self.ring)
            for i, a in enumerate(rec, start=1):
                if a:
                    acc = acc + a * memo[k - i]
            memo.append(acc)
        return memo[n]

    def images(self, N: int) -> List[Poly]:
        self.image_of_basis(N)
        return self._memo[:N + 1]

    def apply(self, f: Poly) -> Poly:
        if f.ring != self.ring:
            raise RingMismatchError(f"ring mismatch: {f.ring} vs {self.ring}")
        if not f:
            return f
        self.image_of_basis(f.degree)
        size = max((len(self._memo[m].coeffs) for m, c in enumerate(f.coeffs) if c), default=0)
        out = [0] * size
        for m, c in enumerate(f.coeffs):
            if not c:
                continue
            for j, v in enumerate(self._memo[m].coeffs):
                out[j] += c * v
        return Poly(self.ring, out)

    def nilpotence_index(self, f: Poly, max_steps: Optional[int] = None):
        """``max {k : T^k f != 0}`` (``-inf`` for ``f = 0``).

        Without the degree-lowering certificate a ``max_steps`` bound is
        required; if it is hit, None is returned.
        """
        if max_steps is None and not self.degree_lowering:
            raise NotDegreeLoweringError("operator has no degree-lowering certificate; pass max_steps")
        if not f:
            return NEG_INF
        k = 0
        while True:
            f = self.apply(f)
            if not f:
                return k
            k += 1
            if max_steps is not None and k >= max_steps:
                return None

    def image_matrix(self, N: int) -> np.ndarray:
        """``(N+1) x (N+1)`` int64 matrix whose column ``n`` is ``T(y^n)`` over ``Z/m``."""
        m = self.ring.modulus
        if m is None:
            raise ValueError("image_matrix needs a modular ring")
        size = N + 1
        A = np.zeros((size, size), dtype=np.int64)
        for n in range(min(self.order, size)):
            c = self.initial[n].coeffs
            A[:len(c), n] = c
        rec = [(i, j, c) for i, a in enumerate(self.companion.rec, start=1) for j, c in enumerate(a.coeffs) if c]
        for n in range(self.order, size):
            col = np.zeros(size, dtype=np.int64)
            for i, j, c in rec:
                src = A[:size - j, n - i]
                col[j:] += c * src
            A[:, n] = col % m
        return A

    def nilpotence_indices(self, N: int) -> List[int]:
        """``[N_T(y^n) for n in 0..N]``; batched matrix powers over ``Z/m``."""
        if not self.degree_lowering:
            raise NotDegreeLoweringError("operator has no degree-lowering certificate")
        m = self.ring.modulus
        if m is None:
            return [self.nilpotence_index(Poly.monomial(self.ring, n)) for n in range(N + 1)]
        return _indices_by_lifting(self.image_matrix(N), m)

    def with_companion(self, companion: CompanionPoly, name: str = "") -> "RecursionOperator":
        """Same operator described by another recursion that its images satisfy."""
        images = self.images(companion.order - 1)
        return RecursionOperator(companion, images[:companion.order], name or self.name)

    def __repr__(self) -> str:
        return f"RecursionOperator({self.name or self.companion.to_str()!r} over {self.ring})"


def _indices_by_lifting(A: np.ndarray, m: int) -> List[int]:
    """Largest ``k`` with ``A^k e_n != 0`` for every column ``n`` of a nilpotent ``A``.

    Uses ``A^(2^j)`` and binary lifting: one product per bit.  Floats are
    exact while every dot product stays below the mantissa limit.
    """
    size = A.shape[0]
    if size * (m - 1) ** 2 < 2**24:
        dtype = np.float32
    elif size * (m - 1) ** 2 < 2**53:
        dtype = np.float64
    else:  # pragma: no cover
        raise ValueError("modulus too large for exact float products")
    bits = max(1, size.bit_length())
    powers = [A.astype(dtype)]
    for _ in range(bits - 1):
        powers.append(np.mod(powers[-1] @ powers[-1], m))
    V = np.eye(size, dtype=dtype)
    K = np.zeros(size, dtype=np.int64)
    for j in range(bits - 1, -1, -1):
        W = np.mod(powers[j] @ V, m)
        alive = W.any(axis=0)
        V[:, alive] = W[:, alive]
        K[alive] += 1 << j
    return K.tolist()


def make_operator(companion: CompanionPoly, initial: Sequence, name: str = "") -> RecursionOperator:
    return RecursionOperator(companion, initial, name)


def content_ranks(values) -> np.ndarray:
    """Integer ranks preserving the order of exact values."""
    distinct = sorted(set(values))
    index = {v: r for r, v in enumerate(distinct)}
    return np.asarray([index[v] for v in values], dtype=np.int64)


@dataclass
class DecreaseVerdict:
    passed: bool
    checked: int
    first_violation: Optional[Dict[str, object]] = None


def content_decrease_check(T: RecursionOperator, c, N: int, p: Optional[int] = None) -> DecreaseVerdict:
    """``max c(m)`` over the support of ``T(y^n)`` is below ``c(n)`` for ``1 <= n <= N``.

    ``c`` is a :class:`~nilgrowth.content.FractionTriple` (whose shape
    requirements are enforced) or any callable ``n -> value``.
    """
    from .content import FractionTriple
    from .exactnum import format_fraction
    from .witness import WitnessFn

    if isinstance(c, FractionTriple):
        t = c
        if T.shape.empty_middle_D < t.D or not T.shape.filtered:
            raise ValueError(f"operator is not a (d, {t.D}) recursion operator: empty-middle D = "
                             f"{T.shape.empty_middle_D}")
        if T.order != t.d:
            raise ValueError(f"operator order {T.order} differs from d = {t.d}")
        char = T.ring.characteristic
        if char == 0 or t.b % char:
            raise ValueError(f"characteristic {char} does not divide b = {t.b}")
        c = WitnessFn(t)
    if N < 1:
        return DecreaseVerdict(True, 0)
    vals = [c(n) for n in range(N + 1)]
    ranks = content_ranks(vals)
    images = T.images(N)
    for n in range(1, N + 1):
        sup = images[n].support()
        if sup and ranks[sup].max() >= ranks[n]:
            worst = max(sup, key=lambda k: ranks[k])
            return DecreaseVerdict(False, n, {"n": n, "argmax": worst, "c_image": format_fraction(vals[worst]),
                                              "c_n": format_fraction(vals[n])})
    return DecreaseVerdict(True, N)


def alpha_estimate(T: RecursionOperator, N: int, window: float = 0.25):
    """Indices ``N_T(y^n)`` for ``n <= N`` with running maxima of ``log N_T / log n``.

    ``alpha_hat`` is the largest ratio over ``n`` in ``[window*N, N]`` (small
    ``n`` always give ratios near 1, so they are left out).  Floats here are
    for presentation only.
    """
    indices = T.nilpotence_indices(N)
    samples = list(enumerate(indices))
    running = []
    best = 0.0
    for n, k in samples:
        if n >= 2 and k >= 1:
            best = max(best, math.log(k) / math.log(n))
        running.append(best)
    lo = max(2, int(window * N))
    tail = [math.log(k) / math.log(n) for n, k in samples[lo:] if k >= 1]
    alpha_hat = max(tail) if tail else 0.0
    return samples, running, alpha_hat


def rational_lower(x: float, max_den: int = 64) -> Fraction:
    """A fraction with small denominator not exceeding ``x``."""
    best = Fraction(math.floor(x))
    for den in range(1, max_den + 1):
        cand = Fraction(math.floor(x * den), den)
        while float(cand) > x:
            cand -= Fraction(1, den)
        if cand > best:
            best = cand
    return best


def refined_bound_holds(n_t: int, deg: int, q: int, D: int, E: int, exponent: Fraction) -> bool:
    """``n_t <= (q-D)(q-1)/(E(q-D-1)) * deg^exponent`` by exact powers (``exponent = u/v``)."""
    if deg < 1:
        return n_t <= 0
    u, v = exponent.numerator, exponent.denominator
    lhs = (n_t * E * (q - D - 1)) ** v
    rhs = ((q - D) * (q - 1)) ** v * deg**u
    return lhs <= rhs


# -- gallery --------------------------------------------------------------

QQ = CoeffRing.rationals()


def _op(ring: CoeffRing, text: str, initial: Sequence[Sequence[int]], name: str) -> RecursionOperator:
    P = CompanionPoly.parse(text, ring)
    return RecursionOperator(P, [Poly(ring, f) for f in initial], name)


def _powers_initial(d: int) -> List[List[int]]:
    # [0, 1, y, ..., y^(d-2)]
    return [[]] + [[0] * (k - 1) + [1] for k in range(1, d)]


SEC10 = {
    3: "X^3 + y*X - y^3",
    5: "X^5 + 3*y*X^3 + y^2*X^2 + 3*y^3*X + 4*y^5",
    7: "X^7 + 3*y^2*X^4 + 6*y^3*X^3 + 5*y^4*X^2 + 3*y^5*X + 6*y^7",
    11: "X^11 + 6*y*X^9 + 2*y^2*X^8 + 3*y^3*X^7 + 6*y^4*X^6 + 8*y^6*X^4 + y^8*X^2 + 9*y^9*X + 10*y^11",
}

GALLERY_NAMES = (
    "trivial", "sec3-4", "fib-q", "fib-p2", "fib-p3", "fib-p5", "fib-p7",
    "prop10.3-d2", "prop10.3-d3", "prop10.3-d5",
    "sec10-p3", "sec10-p5", "sec10-p7", "sec10-p11", "toy-q3",
    "hecke-p2-T3", "hecke-p2-T5", "hecke-p2-T5prime", "hecke-p3-T2", "hecke-p3-T7prime", "hecke-p3-T7",
)


def example_gallery(name: str, ring: Optional[CoeffRing] = None) -> RecursionOperator:
    """Named operators.  Polynomials are read as written: ``P`` itself, not the recursion.

    ``ring`` overrides the default coefficient ring where that makes sense
    (the shape examples are ring-agnostic and default to ``QQ``).
    """
    if name == "trivial":
        return _op(ring or QQ, "X^2 - y*X", [[], [1]], name)
    if name == "sec3-4":
        return _op(ring or QQ, "X^2 + y*X + y", [[], [1]], name)
    if name == "fib-q":
        return _op(ring or QQ, "X^2 - y*X - y^2", [[], [1]], name)
    if name.startswith("fib-p"):
        p = int(name[5:])
        return _op(CoeffRing.integers_mod(p), "X^2 - y*X - y^2", [[], [1]], name)
    if name.startswith("prop10.3-d"):
        d = int(name[len("prop10.3-d"):])
        if d < 2:
            raise KeyError(f"unknown gallery name {name!r}")
        init = [[] for _ in range(d - 1)] + [[1]]
        return _op(ring or QQ, f"X^{d} - y^{d} - y", init, name)
    if name.startswith("sec10-p") or name == "toy-q3":
        p = 3 if name == "toy-q3" else int(name[len("sec10-p"):])
        if p not in SEC10:
            raise KeyError(f"unknown gallery name {name!r}")
        return _op(CoeffRing.integers_mod(p), SEC10[p], _powers_initial(p), name)
    if name.startswith("hecke-"):
        from .hecke import hecke_gallery
        return hecke_gallery(name)
    raise KeyError(f"unknown gallery name {name!r}")


def operator_config(T: RecursionOperator) -> Dict[str, object]:
    """JSON-ready description that :func:`operator_from_config` inverts."""
    return {"name": T.name, "ring": str(T.ring), "companion": T.companion.to_str(),
            "initial": [list(map(str, f.coeffs)) for f in T.initial]}


def operator_from_config(cfg: Dict[str, object]) -> RecursionOperator:
    ring = CoeffRing.parse(cfg["ring"])
    P = CompanionPoly.parse(cfg["companion"], ring)
    initial = [Poly(ring, [Fraction(c) for c in f]) for f in cfg["initial"]]
    return RecursionOperator(P, initial, cfg.get("name", ""))
