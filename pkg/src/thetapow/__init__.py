"""Coefficients of powers of Jacobi theta functions, evaluated with certified error radii."""
from .arith import ErrValue, Precision, TauPoint, geometric_tail_bound, qpow, tau_from_negative_real

__version__ = "0.1.0"
