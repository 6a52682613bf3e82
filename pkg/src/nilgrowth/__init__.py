"""Nilpotence growth of recursion operators on polynomial rings.

Submodules:

* ``exactnum``: coefficient rings and dense polynomials
* ``baserep``: eventually periodic base-b words and carry words
* ``content``: the (b, beta)-content function and unit-fraction digits
* ``witness``: the four witness properties of ``c_{b,beta}(n/d)``
* ``recop``: recursion operators, nilpotence indices, companion shapes
* ``hecke``: mod 2 and mod 3 Hecke operators on powers of Delta
* ``cli``: the ``nilgrowth`` command
"""
from .content import FractionTriple, content
from .exactnum import QQ, CoeffRing, Poly
from .recop import CompanionPoly, RecursionOperator, example_gallery

__all__ = ["CoeffRing", "CompanionPoly", "FractionTriple", "Poly", "QQ", "RecursionOperator",
           "content", "example_gallery"]
__version__ = "0.1.0"
