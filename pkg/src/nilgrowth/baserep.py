"""Eventually periodic base-b expansions of nonnegative rationals.

A :class:`PeriodicWord` is a pointed word ``x.y(z)^oo``: integer digits ``x``
(most significant first), a fractional preperiod ``y`` and a repeating block
``z``.  Digit positions are indexed by the power of the base they multiply,
so ``word.digit(0)`` is the units digit and ``word.digit(-1)`` the first digit
after the point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .exactnum import nonneg


@dataclass(frozen=True)
class PeriodicWord:
    base: int
    int_digits: Tuple[int, ...]
    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]

    @classmethod
    def make(cls, base: int, int_digits: Sequence[int] = (), preperiod: Sequence[int] = (),
             period: Sequence[int] = (0,)) -> "PeriodicWord":
        """Build a word with minimal preperiod, then minimal period.

        No folding of ``(base-1)^oo`` tails happens here: carry words such as
        ``0.1^oo`` are legitimate values.
        """
        if base < 2:
            raise ValueError(f"base must be >= 2, got {base}")
        ints = list(int_digits)
        while ints and ints[0] == 0:
            ints.pop(0)
        pre = list(preperiod)
        per = list(period) or [0]
        if any(x < 0 for x in ints + pre + per):
            raise ValueError("digits must be nonnegative")
        while pre and pre[-1] == per[-1]:
            per = [pre.pop()] + per[:-1]
        t = len(per)
        for cand in range(1, t + 1):
            if t % cand == 0 and per == per[:cand] * (t // cand):
                per = per[:cand]
                break
        return cls(base, tuple(ints), tuple(pre), tuple(per))

    @property
    def ell(self) -> int:
        return len(self.int_digits)

    @property
    def s(self) -> int:
        return len(self.preperiod)

    @property
    def t(self) -> int:
        return len(self.period)

    def is_integral(self) -> bool:
        return not self.preperiod and self.period == (0,)

    def is_normal(self) -> bool:
        """True unless the word ends in ``(base-1)^oo``."""
        return self.period != (self.base - 1,)

    def digit(self, i: int) -> int:
        if i >= 0:
            return self.int_digits[-1 - i] if i < len(self.int_digits) else 0
        j = -i
        if j <= len(self.preperiod):
            return self.preperiod[j - 1]
        return self.period[(j - len(self.preperiod) - 1) % len(self.period)]

    def fraction_digits(self, k: int) -> List[int]:
        """Digits at positions -1, ..., -k."""
        return [self.digit(-j) for j in range(1, k + 1)]

    def __str__(self) -> str:
        return render_word(self)


def _join(digits: Sequence[int], wide: bool) -> str:
    return ",".join(map(str, digits)) if wide else "".join(map(str, digits))


def render_word(w: PeriodicWord, tag: bool = True) -> str:
    """Render as ``x.y(z)_b``; a zero period is omitted (``0.4(20)``, ``1241``)."""
    wide = any(x > 9 for x in w.int_digits + w.preperiod + w.period)
    out = _join(w.int_digits, wide) or "0"
    if w.period != (0,):
        out += "." + _join(w.preperiod, wide) + "(" + _join(w.period, wide) + ")"
    elif w.preperiod:
        out += "." + _join(w.preperiod, wide)
    if tag:
        out += f"_{w.base}"
    return out


def parse_word(text: str, base: int = None) -> PeriodicWord:
    """Inverse of :func:`render_word`.  ``base`` is required if the text is untagged."""
    text = text.strip()
    if "_" in text:
        text, tag = text.rsplit("_", 1)
        base = int(tag)
    if base is None:
        raise ValueError(f"untagged word {text!r} needs an explicit base")
    wide = "," in text

    def split(chunk: str) -> List[int]:
        if not chunk:
            return []
        return [int(x) for x in chunk.split(",")] if wide else [int(x) for x in chunk]

    period = [0]
    if "(" in text:
        text, rest = text.split("(", 1)
        period = split(rest.rstrip(")"))
    if "." in text:
        ints, pre = text.split(".", 1)
    else:
        ints, pre = text, ""
    ints = ints.strip(",")
    pre = pre.strip(",")
    return PeriodicWord.make(base, split(ints), split(pre), period)


@dataclass(frozen=True)
class BaseStats:
    """``(ell, s, t)`` plus the integers with ``q = n + u/b^s + m/(b^s (b^t - 1))``."""

    ell: int
    s: int
    t: int
    n: int
    u: int
    m: int


def _int_digits(n: int, b: int) -> List[int]:
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return out[::-1]


# beyond this denominator the remainder orbit is computed with numpy
_ORBIT_NUMPY_CUTOFF = 4096


def _power_orbit(b: int, L: int) -> Tuple[List[int], int]:
    """``[b^j mod L for j < s + t]`` and ``s``, the first index of the cycle.

    ``s`` counts how often a common factor of ``b`` can be stripped from
    ``L``; ``t`` is the multiplicative order of ``b`` on what is left.
    """
    rest, s = L, 0
    g = math.gcd(rest, b)
    while g > 1:
        rest //= g
        s += 1
        g = math.gcd(rest, b)
    if L < _ORBIT_NUMPY_CUTOFF or L > 2**31:
        out, x = [], 1 % L
        seen = {}
        while x not in seen:
            seen[x] = len(out)
            out.append(x)
            x = (x * b) % L
        return out, seen[x]
    # doubling: b^(j+k) = b^j * b^k, all products stay below 2^62
    pw = np.array([1 % L], dtype=np.int64)
    while len(pw) < s + rest + 1:
        step = pow(b, len(pw), L)
        pw = np.concatenate([pw, (pw * step) % L])
    # the cycle closes at the first j >= 1 with b^(s+j) = b^s mod L
    t = int(np.nonzero(pw[s + 1:s + rest + 1] == pw[s])[0][0]) + 1
    return pw[:s + t].tolist(), s


@lru_cache(maxsize=8192)
def rite(q, b: int) -> PeriodicWord:
    """Normal base-``b`` expansion of a nonnegative rational (never ends in ``(b-1)^oo``)."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    q = nonneg(q)
    num, den = q.numerator, q.denominator
    whole, rem = divmod(num, den)
    if not rem:
        return PeriodicWord(b, tuple(_int_digits(whole, b)), (), (0,))
    # long division: digit j is floor(b * rem * b^j / den) with rem * b^j taken mod den
    orbit, start = _power_orbit(b, den)
    digits = [(b * ((rem * x) % den)) // den for x in orbit]
    return PeriodicWord(b, tuple(_int_digits(whole, b)), tuple(digits[:start]), tuple(digits[start:]))


def _read_int(digits: Sequence[int], beta: int) -> int:
    # split in halves so long periods cost O(M(n) log n) instead of O(n^2)
    if len(digits) <= 64:
        acc = 0
        for x in digits:
            acc = acc * beta + x
        return acc
    half = len(digits) // 2
    low = digits[half:]
    return _read_int(digits[:half], beta) * beta ** len(low) + _read_int(low, beta)


def reed(w: PeriodicWord, beta: int) -> Fraction:
    """Read the digits of ``w`` in base ``beta`` (digits may be >= beta)."""
    if beta < 2:
        raise ValueError(f"base must be >= 2, got {beta}")
    s, t = len(w.preperiod), len(w.period)
    value = Fraction(_read_int(w.int_digits, beta))
    value += Fraction(_read_int(w.preperiod, beta), beta**s)
    value += Fraction(_read_int(w.period, beta), beta**s * (beta**t - 1))
    return value


def base_stats(q, b: int) -> BaseStats:
    w = rite(q, b)
    return BaseStats(ell=w.ell, s=w.s, t=w.t, n=_read_int(w.int_digits, b),
                     u=_read_int(w.preperiod, b), m=_read_int(w.period, b))


def carry_word(m, n, b: int) -> PeriodicWord:
    """Carry-digit word of the base-``b`` addition ``m + n``.

    Integer carries solve ``m_i + n_i + r_{i-1} = s_i + b r_i`` from the top
    index down.  The carry out of position ``-j`` is 1 exactly when
    ``frac(b^(j-1) m) + frac(b^(j-1) n) >= 1``; with ``L`` the common
    denominator both fractional parts are driven by ``b^(j-1) mod L``, so the
    first repeat of that residue gives the preperiod and period.
    """
    m, n = nonneg(m), nonneg(n)
    wm, wn, ws = rite(m, b), rite(n, b), rite(m + n, b)
    ints = []
    r = 0
    for i in range(ws.ell, 0, -1):
        r = ws.digit(i) + b * r - wm.digit(i) - wn.digit(i)
        ints.append(r)
    L = math.lcm(m.denominator, n.denominator)
    u = (m.numerator * (L // m.denominator)) % L
    v = (n.numerator * (L // n.denominator)) % L
    orbit, start = _power_orbit(b, L)
    frac = [int((x * u) % L + (x * v) % L >= L) for x in orbit]
    if any(c not in (0, 1) for c in ints):
        raise AssertionError(f"carry digit out of range for {m} + {n} base {b}: {ints}")
    return PeriodicWord.make(b, ints, frac[:start], frac[start:])


def carry_word_dfold(d: int, D: int, b: int, k: int) -> List[int]:
    """Digits ``r_1..r_k`` of the carries in ``1/d + ... + 1/d`` (``D`` terms), base ``b``.

    ``r_j`` is the digitwise sum of the pairwise words ``r_b(i/d, 1/d)``
    for ``1 <= i <= D - 1``.
    """
    if not (1 <= D <= d <= b):
        raise ValueError(f"need 1 <= D <= d <= b, got (d, D, b) = {(d, D, b)}")
    out = [0] * k
    for i in range(1, D):
        w = carry_word(Fraction(i, d), Fraction(1, d), b)
        for j in range(k):
            out[j] += w.digit(-(j + 1))
    return out
