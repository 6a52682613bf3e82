"""Hecke operators on mod-p level-one forms, ``p in {2, 3}``.

Forms are handled two ways.  The oracle side works with truncated
q-expansions: ``Delta = q prod (1 - q^n)^24`` reduced mod ``p`` and the
classical action ``a_n(T_l f) = a_{ln}(f) + l^(k-1) a_{n/l}(f)`` on a weight
``k`` form.  The recursion side describes ``T_l(Delta^n)`` as a polynomial
in ``y = Delta`` produced by a :class:`~nilgrowth.recop.RecursionOperator`.
The two are compared in :func:`verify_hecke_recursion`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exactnum import CoeffRing, Poly
from .recop import (Bivariate, CompanionPoly, RecursionOperator, bivariate_divmod)

SUPPORTED = {(2, 3), (2, 5), (3, 2), (3, 7)}

# companion polynomials P as written (X^d + ...), y standing for Delta
COMPANIONS = {
    (2, 3): "X^4 + y*X + y^4",
    (2, 5): "X^6 + y^2*X^4 + y^4*X^2 + y*X + y^6",
    (3, 2): "X^3 - y*X + y^3",
    (3, 7): "X^9 - y*X^5 - y^2*X^4 + (y^4 - y)*X^2 + (y^5 + y^2)*X - y^9",
}
P5_PRIME = "X^8 + y*X^3 + y^3*X + y^8"

# Delta^n extra precision used to confirm that an image is a polynomial of degree <= n
CHECK_MARGIN = 8


@dataclass(frozen=True)
class QExpansion:
    """``a_0 .. a_{N-1}`` of a power series mod ``p``."""

    p: int
    coeffs: Tuple[int, ...]

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.int64)

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __add__(self, other: "QExpansion") -> "QExpansion":
        if other.p != self.p:
            raise ValueError("characteristics differ")
        k = min(self.precision, other.precision)
        return QExpansion(self.p, tuple(((self.array()[:k] + other.array()[:k]) % self.p).tolist()))

    def scale(self, c: int) -> "QExpansion":
        return QExpansion(self.p, tuple(((self.array() * c) % self.p).tolist()))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@lru_cache(maxsize=None)
def _delta_array(p: int, N: int) -> np.ndarray:
    arr = np.zeros(N, dtype=np.int64)
    if N > 1:
        arr[1] = 1
    for n in range(1, N):
        for _ in range(24):
            arr[n:] = (arr[n:] - arr[:-n]) % p
    arr.setflags(write=False)
    return arr


def delta_qexp(p: int, N: int) -> QExpansion:
    """``q prod_{n >= 1} (1 - q^n)^24`` mod ``p`` to precision ``N`` (truncated product)."""
    if N < 2:
        raise ValueError("precision must be >= 2")
    return QExpansion(p, tuple(_delta_array(p, N).tolist()))


@lru_cache(maxsize=None)
def _delta_powers(p: int, n_max: int, N: int) -> np.ndarray:
    """Rows ``Delta^0 .. Delta^n_max`` to precision ``N``."""
    D = _delta_array(p, N)
    rows = np.zeros((n_max + 1, N), dtype=np.int64)
    rows[0, 0] = 1
    for j in range(1, n_max + 1):
        rows[j] = np.convolve(rows[j - 1], D)[:N] % p
    rows.setflags(write=False)
    return rows


def delta_power(p: int, n: int, N: int) -> QExpansion:
    return QExpansion(p, tuple(_delta_powers(p, n, N)[n].tolist()))


def _hecke_array(a: np.ndarray, p: int, ell: int, weight: int) -> np.ndarray:
    N = len(a)
    out_len = (N - 1) // ell + 1
    out = a[::ell][:out_len].copy()
    if ell % p:
        factor = pow(ell, weight - 1, p) if weight >= 1 else pow(ell, -1, p)
        idx = np.arange(0, out_len, ell)
        out[idx] += factor * a[idx // ell]
    elif weight < 1:
        raise ValueError("T_p on weight 0 is undefined mod p")
    return out % p


def hecke_apply_qexp(f: QExpansion, ell: int, weight: int) -> QExpansion:
    """``a_n(T_l f) = a_{ln}(f) + l^(weight-1) a_{n/l}(f)`` mod ``p``.

    The output has precision ``floor((N-1)/l) + 1``.  For ``l = p`` (and
    weight at least 1) the second term vanishes mod ``p``; see :func:`t_p`.
    """
    return QExpansion(f.p, tuple(_hecke_array(f.array(), f.p, ell, weight).tolist()))


def t_p(f: QExpansion) -> QExpansion:
    """``T_p`` mod ``p`` on a form of positive weight, i.e. ``a_n -> a_{pn}``."""
    a = f.array()
    return QExpansion(f.p, tuple(a[::f.p].tolist()))


class NotDeltaPolynomialError(ValueError):
    pass


def qexp_to_delta_poly(f: QExpansion, max_degree: Optional[int] = None) -> Poly:
    """The ``g`` with ``g(Delta) = f`` to the available precision.

    With ``max_degree = k < precision - 1`` the coefficients beyond ``q^k``
    must vanish after elimination, otherwise the series is rejected.
    """
    N = f.precision
    k = N - 1 if max_degree is None else max_degree
    if k >= N:
        raise ValueError(f"degree {k} needs precision > {k}, have {N}")
    p = f.p
    powers = _delta_powers(p, k, N)
    res = f.array().copy()
    g = [0] * (k + 1)
    for j in range(k + 1):
        c = int(res[j])
        if c:
            g[j] = c
            res = (res - c * powers[j]) % p
    if res.any():
        first = int(np.nonzero(res)[0][0])
        raise NotDeltaPolynomialError(f"not a polynomial in Delta of degree <= {k}: residual at q^{first}")
    return Poly(CoeffRing.integers_mod(p), g)


def tau_mod(p: int, ell: int) -> int:
    return int(_delta_array(p, ell + 1)[ell])


def required_precision(ell: int, n: int, margin: int = CHECK_MARGIN) -> int:
    """Oracle coefficients needed to recover ``T_l(Delta^n)`` and confirm its degree."""
    return ell * (n + 1 + margin)


def oracle_images(p: int, ell: int, n_max: int, modified: bool = True,
                  margin: int = CHECK_MARGIN) -> List[Poly]:
    """``T_l'(Delta^n)`` (or ``T_l``) as polynomials in ``Delta`` for ``n <= n_max``.

    Each image is recovered from ``n + 1 + margin`` coefficients and must be
    a polynomial of degree ``<= n``; the extra coefficients are the check.
    """
    N = required_precision(ell, n_max, margin)
    rows = _delta_powers(p, n_max, N)
    shift = tau_mod(p, ell) if modified else 0
    out = []
    for n in range(n_max + 1):
        prec = ell * (n + 1 + margin)
        img = _hecke_array(rows[n, :prec], p, ell, 12 * n)
        if shift:
            img = (img - shift * rows[n, :len(img)]) % p
        out.append(qexp_to_delta_poly(QExpansion(p, tuple(img.tolist())), max_degree=n))
    return out


@dataclass
class HeckeOp:
    p: int
    ell: int
    modified: bool
    as_recursion: RecursionOperator
    variant: str = ""


def _companion(text: str, p: int) -> CompanionPoly:
    return CompanionPoly.parse(text, CoeffRing.integers_mod(p))


def t7_order8(p: int = 3) -> CompanionPoly:
    """``P_7 / (X - Delta)``: the order-8 recursion of the unmodified ``T_7``."""
    P7 = _companion(COMPANIONS[(3, 7)], p)
    ring = P7.ring
    linear: Bivariate = [-Poly.monomial(ring, 1), Poly.constant(ring, 1)]
    Q, R = bivariate_divmod(P7.bivariate(), linear)
    if any(R):
        raise AssertionError("X - Delta does not divide P_7")  # pragma: no cover
    return CompanionPoly.from_bivariate(Q)


def hecke_recursion_operator(p: int, ell: int, variant: str = "") -> HeckeOp:
    """Recursion operator for ``T_l'`` on ``F_p[Delta]`` with oracle initial values.

    ``variant="prime"`` for ``(2, 5)`` uses ``P_5' = P_5 (X^2 + Delta^2)``;
    ``variant="order8"`` for ``(3, 7)`` gives the unmodified ``T_7``.
    """
    if (p, ell) not in SUPPORTED:
        raise ValueError(f"unsupported pair (p, l) = {(p, ell)}")
    modified = True
    if variant == "prime" and (p, ell) == (2, 5):
        P = _companion(P5_PRIME, p)
    elif variant == "order8" and (p, ell) == (3, 7):
        P = t7_order8(p)
        modified = False
    elif variant == "":
        P = _companion(COMPANIONS[(p, ell)], p)
    else:
        raise ValueError(f"unknown variant {variant!r} for {(p, ell)}")
    initial = oracle_images(p, ell, P.order - 1, modified=modified)
    name = f"hecke-p{p}-T{ell}" + ("prime" if modified and tau_mod(p, ell) else "")
    T = RecursionOperator(P, initial, name + (f"-{variant}" if variant else ""))
    return HeckeOp(p, ell, modified, T, variant)


def hecke_gallery(name: str) -> RecursionOperator:
    table = {
        "hecke-p2-T3": (2, 3, ""), "hecke-p2-T5": (2, 5, ""), "hecke-p2-T5prime": (2, 5, "prime"),
        "hecke-p3-T2": (3, 2, ""), "hecke-p3-T7prime": (3, 7, ""), "hecke-p3-T7": (3, 7, "order8"),
    }
    if name not in table:
        raise KeyError(f"unknown gallery name {name!r}")
    p, ell, variant = table[name]
    T = hecke_recursion_operator(p, ell, variant).as_recursion
    T.name = name
    return T


@dataclass
class RecursionVerdict:
    p: int
    ell: int
    order: int
    n_max: int
    failures: List[int] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.failures

    @property
    def first_valid_n(self) -> Optional[int]:
        """Smallest ``n0 >= d`` with the recursion valid on ``[n0, n_max]``."""
        if not self.failures:
            return self.order
        last = max(self.failures)
        return last + 1 if last < self.n_max else None


def verify_hecke_recursion(p: int, ell: int, N: int, companion: Optional[CompanionPoly] = None,
                           modified: Optional[bool] = None) -> RecursionVerdict:
    """Check oracle images against ``T(Delta^n) = sum a_i T(Delta^(n-i))`` for ``d <= n <= N``."""
    if (p, ell) not in SUPPORTED:
        raise ValueError(f"unsupported pair (p, l) = {(p, ell)}")
    P = companion or _companion(COMPANIONS[(p, ell)], p)
    mod = True if modified is None else modified
    images = oracle_images(p, ell, N, modified=mod)
    verdict = RecursionVerdict(p, ell, P.order, N)
    for n in range(P.order, N + 1):
        acc = Poly.zero(P.ring)
        for i, a in enumerate(P.rec, start=1):
            if a:
                acc = acc + a * images[n - i]
        if acc != images[n]:
            verdict.failures.append(n)
    return verdict


@dataclass
class KernelVerdict:
    p: int
    n_max: int
    nonzero_off_multiples: List[int]
    zero_on_multiples: List[int]

    @property
    def passed(self) -> bool:
        return not self.nonzero_off_multiples and not self.zero_on_multiples


def kernel_check(p: int, N: int) -> KernelVerdict:
    """``T_p(Delta^n) = 0`` exactly when ``p`` does not divide ``n`` (``1 <= n <= N``)."""
    prec = p * (N + 2)
    rows = _delta_powers(p, N, prec)
    bad_off, bad_on = [], []
    for n in range(1, N + 1):
        img = rows[n, ::p]
        if n % p and img.any():
            bad_off.append(n)
        elif n % p == 0 and not img.any():
            bad_on.append(n)
    return KernelVerdict(p, N, bad_off, bad_on)


PAIRS = {2: ("hecke-p2-T3", "hecke-p2-T5"), 3: ("hecke-p3-T2", "hecke-p3-T7prime")}


def joint_nilpotence(p: int, N: int) -> List[Dict[str, int]]:
    """Rows ``(n, N_T, N_S, N)`` for ``1 <= n <= N`` prime to ``p``."""
    if p not in PAIRS:
        raise ValueError(f"unsupported p = {p}")
    T = hecke_gallery(PAIRS[p][0])
    S = hecke_gallery(PAIRS[p][1])
    nt = T.nilpotence_indices(N)
    ns = S.nilpotence_indices(N)
    return [{"n": n, "N_T": nt[n], "N_S": ns[n], "N": nt[n] + ns[n]}
            for n in range(1, N + 1) if n % p]


def hilbert_samuel_count(table: Sequence[Dict[str, int]], k: int) -> int:
    """``#{n : N(Delta^n) >= k}`` over the rows of :func:`joint_nilpotence`."""
    return sum(1 for row in table if row["N"] >= k)


def count_killed(table: Sequence[Dict[str, int]], k: int) -> int:
    """``#{n : N(Delta^n) < k}``: the ``Delta^n`` killed by every product of ``k`` generators."""
    return sum(1 for row in table if row["N"] < k)


def loglog_slope(ks: Sequence[int], counts: Sequence[int]) -> float:
    """Least-squares slope of ``log count`` against ``log k`` (diagnostic only)."""
    pts = [(math.log(k), math.log(c)) for k, c in zip(ks, counts) if c > 0]
    if len(pts) < 2:
        return float("nan")
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def hilbert_samuel_summary(p: int, N: int, ks: Sequence[int] = tuple(range(2, 16))) -> Dict[str, object]:
    table = joint_nilpotence(p, N)
    ge = [hilbert_samuel_count(table, k) for k in ks]
    lt = [count_killed(table, k) for k in ks]
    return {"p": p, "n_max": N, "k": list(ks), "count_ge": ge, "count_lt": lt,
            "diagnostic_slope_ge": loglog_slope(ks, ge), "diagnostic_slope_lt": loglog_slope(ks, lt)}
