"""Exact torsion-growth exponents of CM abelian varieties.

The package computes, from finite group data describing a CM type, the
character system of the associated Mumford-Tate torus and the optimal
exponent governing torsion growth in the tower of division fields.  All
arithmetic is exact (arbitrary-precision integers and rationals).
"""

__version__ = "0.1.0"
