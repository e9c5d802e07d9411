"""
Mellin-Barnes transformation engine for hypergeometric functions.

Represents Mellin-Barnes integrands of multivariable hypergeometric functions,
rewrites them with the linear-transformation rules of the Gauss 2F1 and the
Appell F1-type integrals, and checks every resulting identity numerically
against series summation and contour quadrature.
"""

__version__ = "1.0.0"
