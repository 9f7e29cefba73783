"""Exact truncated power-series certificates for finite-rank and sieve arguments.

Submodules:

- ``rings``: coefficient rings Z, F_p, Z/p^e and F_p(x)
- ``series``: truncated univariate, bivariate and Laurent series
- ``linalg``: F_p elimination, integer Smith form, bounded F_p(x)-dependence
- ``rank``: observed ranks and finite-rank decompositions
- ``sieve``: n,d-sieve certificates and the sieve-vs-rank experiment
- ``construction``: the explicit lacunary series and related families
- ``homology``: window presentations for lamplighter and Lie-algebra H_2
"""

__version__ = "0.1.0"

from .errors import AlgebraError  # noqa: E402,F401

__all__ = ["AlgebraError", "__version__"]
