"""Moment-variety toolkit.

Exact determinantal matrices and checks for the moment varieties of the
inverse Gaussian, gamma, Gaussian, exponential, and chi-squared
distributions, a compact homotopy-continuation solver, and method-of-moments
estimation for mixtures.
"""

__version__ = "0.1.0"

from .moments import Dist
from .varieties import Family

__all__ = ["Dist", "Family", "__version__"]
