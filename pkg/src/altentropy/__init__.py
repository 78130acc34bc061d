"""Differential Shannon and Renyi entropies, their nonnegative alternatives,
and the discrete functionals that do or do not converge to them."""

__version__ = "0.1.0"
