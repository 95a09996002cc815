"""Thin wrappers over scipy quadrature and root finding with uniform error reporting."""
import math
import warnings

import numpy as np
from scipy import integrate, optimize

from .errors import RegimeError, ToleranceError

QUAD_RTOL = 1e-9
QUAD_ATOL = 1e-13
ROOT_XTOL = 1e-12


def quad(f, a, b, rtol=QUAD_RTOL, atol=QUAD_ATOL, points=None, limit=200):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Raises ToleranceError (with the achieved estimate) when QUADPACK reports
    non-convergence and the error estimate exceeds the requested tolerance.
    """
    if b == a:
        return 0.0
    if points is not None:
        points = [p for p in points if a < p < b] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, epsabs=atol, epsrel=rtol, limit=limit,
                             points=points, full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > max(atol, rtol * abs(value)) * 100:
        raise ToleranceError(f"quadrature on [{a}, {b}] did not converge: {out[3]}", value)
    return value


def bracket_root(f, step, limit):
    """Grow ``[0, step * 2**k]`` geometrically until ``f`` changes sign.

    ``f(0)`` must be positive. Returns the last bracket ``(lo, hi)``.
    """
    lo, hi = 0.0, min(step, limit)
    while f(hi) > 0:
        if hi >= limit:
            raise RegimeError(f"no sign change of the root function within horizon {limit:g}")
        lo, hi = hi, min(2.0 * hi, limit)
    return lo, hi


def root(f, lo, hi, xtol=ROOT_XTOL):
    """Bracketed root via Brent's method; raises ToleranceError if it fails to converge."""
    x, info = optimize.brentq(f, lo, hi, xtol=xtol, rtol=4 * float(np.finfo(float).eps), maxiter=500,
                              full_output=True, disp=False)
    if not info.converged:
        raise ToleranceError("root finder did not converge", x)
    return x


def is_finite(*xs):
    return all(isinstance(x, (int, float)) and math.isfinite(x) for x in xs)
