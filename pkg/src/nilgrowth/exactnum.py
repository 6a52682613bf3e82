"""Exact coefficient rings and dense univariate polynomials.

Two coefficient rings are supported: the rationals (elements are ints when
integral, :class:`fractions.Fraction` otherwise) and ``Z/m`` for ``m >= 2`` (elements are ints in
``range(m)``).  Polynomials are immutable and always kept in canonical form:
reduced coefficients, no trailing zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

NEG_INF = float("-inf")
"""Degree of the zero polynomial (and content of the zero polynomial)."""

Elem = Union[int, Fraction]

# Below this length schoolbook multiplication beats the numpy round trip.
_NUMPY_MUL_CUTOFF = 24


class RingMismatchError(ValueError):
    """Raised when two operands live over different coefficient rings."""


@dataclass(frozen=True)
class CoeffRing:
    """Coefficient ring descriptor: ``QQ`` when ``modulus`` is None, else ``Z/modulus``."""

    modulus: Optional[int] = None

    def __post_init__(self):
        if self.modulus is not None and self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")

    @classmethod
    def rationals(cls) -> "CoeffRing":
        return cls(None)

    @classmethod
    def integers_mod(cls, m: int) -> "CoeffRing":
        return cls(int(m))

    @property
    def is_rational(self) -> bool:
        return self.modulus is None

    @property
    def characteristic(self) -> int:
        return 0 if self.modulus is None else self.modulus

    @property
    def is_prime_field(self) -> bool:
        return self.modulus is not None and _is_prime(self.modulus)

    @property
    def is_field(self) -> bool:
        return self.modulus is None or self.is_prime_field

    def __call__(self, x) -> Elem:
        """Reduce ``x`` to the canonical representative."""
        if self.modulus is None:
            # integral rationals are kept as ints, which keeps QQ arithmetic fast
            x = Fraction(x)
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, Fraction):
            if x.denominator != 1:
                return (x.numerator * pow(x.denominator, -1, self.modulus)) % self.modulus
            x = x.numerator
        return int(x) % self.modulus

    def inv(self, x: Elem) -> Elem:
        if self.modulus is None:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.modulus)

    def __str__(self) -> str:
        return "QQ" if self.modulus is None else f"Z/{self.modulus}"

    @classmethod
    def parse(cls, text: str) -> "CoeffRing":
        text = text.strip()
        if text.upper() in ("QQ", "Q"):
            return cls.rationals()
        for prefix in ("Z/", "F", "GF"):
            if text.upper().startswith(prefix.upper()):
                return cls.integers_mod(int(text[len(prefix):]))
        return cls.integers_mod(int(text))


QQ = CoeffRing.rationals()


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    for f in range(2, math.isqrt(m) + 1):
        if m % f == 0:
            return False
    return True


def _strip(coeffs: list) -> tuple:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Dense polynomial in ``y`` over a :class:`CoeffRing`.

    ``coeffs[i]`` is the coefficient of ``y**i``.  Instances are immutable
    and hashable.
    """

    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: CoeffRing, coeffs: Iterable = ()):
        self.ring = ring
        self.coeffs = _strip([ring(c) for c in coeffs])
        self._hash = None

    @classmethod
    def _raw(cls, ring: CoeffRing, coeffs: tuple) -> "Poly":
        # coeffs must already be reduced and stripped
        p = cls.__new__(cls)
        p.ring = ring
        p.coeffs = coeffs
        p._hash = None
        return p

    @classmethod
    def zero(cls, ring: CoeffRing) -> "Poly":
        return cls._raw(ring, ())

    @classmethod
    def constant(cls, ring: CoeffRing, c) -> "Poly":
        return cls(ring, [c])

    @classmethod
    def monomial(cls, ring: CoeffRing, n: int, c=1) -> "Poly":
        if n < 0:
            raise ValueError("negative exponent")
        return cls(ring, [0] * n + [c])

    @classmethod
    def from_dict(cls, ring: CoeffRing, terms: dict) -> "Poly":
        if not terms:
            return cls.zero(ring)
        out = [0] * (max(terms) + 1)
        for k, v in terms.items():
            out[k] += v
        return cls(ring, out)

    # -- basic queries -------------------------------------------------
    @property
    def degree(self) -> Union[int, float]:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Elem:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ring(0)

    def support(self) -> list:
        return [i for i, c in enumerate(self.coeffs) if c]

    def lead(self) -> Elem:
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.coeffs))
        return self._hash

    # -- arithmetic ----------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.ring, other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        m = self.ring.modulus
        if m is None:
            for i, c in enumerate(b):
                out[i] += c
        else:
            for i, c in enumerate(b):
                out[i] = (out[i] + c) % m
        return Poly._raw(self.ring, _strip(out))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        m = self.ring.modulus
        if m is None:
            return Poly._raw(self.ring, tuple(-c for c in self.coeffs))
        return Poly._raw(self.ring, tuple((-c) % m for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.ring)
        m = self.ring.modulus
        if m is not None and min(len(a), len(b)) >= 2 and max(len(a), len(b)) >= _NUMPY_MUL_CUTOFF \
                and m * m * min(len(a), len(b)) < 2**62:
            prod = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % m
            return Poly._raw(self.ring, _strip(prod.tolist()))
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        if m is not None:
            out = [c % m for c in out]
        return Poly._raw(self.ring, _strip(out))

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = self.ring(c)
        if not c:
            return Poly.zero(self.ring)
        m = self.ring.modulus
        if m is None:
            return Poly._raw(self.ring, tuple(x * c for x in self.coeffs))
        return Poly._raw(self.ring, _strip([(x * c) % m for x in self.coeffs]))

    def shift(self, k: int) -> "Poly":
        """Multiply by ``y**k``."""
        if not self.coeffs or k == 0:
            return self
        zero = self.ring(0)
        return Poly._raw(self.ring, (zero,) * k + self.coeffs)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power")
        result = Poly.constant(self.ring, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def derivative(self) -> "Poly":
        return Poly(self.ring, [i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self.scale(self.ring.inv(self.lead()))

    def __divmod__(self, other: "Poly"):
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        if not self.ring.is_field:
            lead = other.lead()
            if math.gcd(int(lead), self.ring.modulus) != 1:
                raise ValueError(f"leading coefficient {lead} not invertible in {self.ring}")
        inv = self.ring.inv(other.lead())
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        q = [0] * max(len(rem) - db, 0)
        m = self.ring.modulus
        bc = other.coeffs
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if not c:
                continue
            c = c * inv if m is None else (c * inv) % m
            q[i - db] = c
            for j, y in enumerate(bc):
                rem[i - db + j] -= c * y
            if m is not None:
                for j in range(i - db, i + 1):
                    rem[j] %= m
        return Poly(self.ring, q), Poly(self.ring, rem[:db] if db else [])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = self.ring(0)
        for c in reversed(self.coeffs):
            acc = self.ring(acc * x + c)
        return acc

    # -- rendering -----------------------------------------------------
    def to_str(self, var: str = "y") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"{c}*{var}")
            else:
                terms.append(f"{c}*{var}^{k}")
        return " + ".join(terms)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.ring}, {self.to_str()!r})"


def poly_arith(lhs: Poly, rhs: Poly, op: str) -> Poly:
    """Apply ``op`` in {'add', 'sub', 'mul'} to two polynomials over the same ring."""
    if lhs.ring != rhs.ring:
        raise RingMismatchError(f"ring mismatch: {lhs.ring} vs {rhs.ring}")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown op {op!r}")


def poly_degree(f: Poly) -> Union[int, float]:
    return f.degree


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over a field."""
    while b:
        a, b = b, a % b
    return a.monic()


def poly_powmod(base: Poly, e: int, modulus: Poly) -> Poly:
    result = Poly.constant(base.ring, 1) % modulus
    base = base % modulus
    while e:
        if e & 1:
            result = (result * base) % modulus
        e >>= 1
        if e:
            base = (base * base) % modulus
    return result


def reduce_mod(f: Poly, ring: CoeffRing) -> Poly:
    """Map an integer-coefficient polynomial into another ring (e.g. QQ -> Z/m)."""
    out = []
    for c in f.coeffs:
        c = Fraction(c)
        if c.denominator != 1 and ring.modulus is not None:
            raise ValueError(f"coefficient {c} is not integral")
        out.append(c)
    return Poly(ring, out)


# -- fraction helpers used across modules ---------------------------------

def parse_fraction(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"num/den"`` (or an integer) into a nonnegative Fraction."""
    q = Fraction(text) if not isinstance(text, str) else Fraction(text.strip())
    if q < 0:
        raise ValueError(f"expected a nonnegative rational, got {q}")
    return q


def format_fraction(q: Union[int, Fraction, float]) -> str:
    if isinstance(q, float):
        return "-inf" if q == NEG_INF else repr(q)
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def nonneg(q) -> Fraction:
    q = Fraction(q)
    if q < 0:
        raise ValueError(f"expected a nonnegative rational, got {q}")
    return q


def poly_from_seq(ring: CoeffRing, seq: Sequence) -> Poly:
    return Poly(ring, seq)
