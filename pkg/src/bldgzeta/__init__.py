"""Exact zeta functions for finite quotients of affine buildings.

Modules:

* :mod:`bldgzeta.coxeter` affine and finite Coxeter groups, Poincare series
* :mod:`bldgzeta.cones` lattice points of sharp rational cones
* :mod:`bldgzeta.complex` quotient graphs, thin quotients, translation operators
* :mod:`bldgzeta.zeta` trace series, closed rational forms, geodesic oracle
* :mod:`bldgzeta.cusp` cuspidal rank-one quotients and Pade fitting
* :mod:`bldgzeta.cli` command line
"""

from .errors import BldgZetaError
from .poly import MultiPoly, RationalFunction, series_expand

__version__ = "0.1.0"

__all__ = ["BldgZetaError", "MultiPoly", "RationalFunction", "series_expand", "__version__"]
