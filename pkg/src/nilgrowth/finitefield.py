"""Squarefree and distinct-degree factorization over a prime field ``Z/p``.

Only what the cofactor construction needs: the multiplicities of the
irreducible factors of a monic polynomial and the degrees of those factors.
"""
from __future__ import annotations

import math
from typing import List, Tuple

from .exactnum import Poly, poly_gcd, poly_powmod


def _require_prime_field(f: Poly) -> int:
    if not f.ring.is_prime_field:
        raise ValueError(f"need a prime field Z/p, got {f.ring}")
    return f.ring.modulus


def _pth_root(f: Poly, p: int) -> Poly:
    # over F_p, f' = 0 means f(x) = g(x^p) = g(x)^p
    return Poly(f.ring, f.coeffs[::p])


def squarefree_decomposition(f: Poly) -> List[Tuple[Poly, int]]:
    """Pairs ``(g, k)`` with ``g`` squarefree and ``f = prod g^k`` (``f`` monic)."""
    p = _require_prime_field(f)
    f = f.monic()
    one = Poly.constant(f.ring, 1)
    if f.degree <= 0:
        return []
    out: List[Tuple[Poly, int]] = []
    c = poly_gcd(f, f.derivative()) if f.derivative() else f
    w = f // c
    i = 1
    while w != one:
        g = poly_gcd(w, c)
        fac = w // g
        if fac != one:
            out.append((fac.monic(), i))
        w = g
        c = c // g
        i += 1
    if c != one:
        for g, k in squarefree_decomposition(_pth_root(c, p)):
            out.append((g, k * p))
    return out


def distinct_degree_factorization(f: Poly) -> List[Tuple[Poly, int]]:
    """Pairs ``(g, i)``: ``g`` is the product of the degree-``i`` irreducible factors of squarefree ``f``."""
    p = _require_prime_field(f)
    f = f.monic()
    one = Poly.constant(f.ring, 1)
    x = Poly.monomial(f.ring, 1)
    out: List[Tuple[Poly, int]] = []
    h = x % f if f.degree > 0 else x
    i = 1
    while f.degree >= 2 * i:
        h = poly_powmod(h, p, f)
        g = poly_gcd(f, h - x)
        if g != one:
            out.append((g, i))
            f = f // g
            h = h % f
        i += 1
    if f.degree > 0:
        out.append((f.monic(), f.degree))
    return out


def factor_shape(f: Poly) -> Tuple[int, int]:
    """``(lcm of irreducible factor degrees, largest multiplicity)`` of ``f``."""
    degrees = []
    mult = 0
    for g, k in squarefree_decomposition(f):
        mult = max(mult, k)
        degrees.extend(i for _, i in distinct_degree_factorization(g))
    return (math.lcm(*degrees) if degrees else 1), mult
