"""Semicircle-law special functions.

The spherical Kac-Rice computation reduces Hessian determinants to the
logarithmic potential of the semicircle measure on [-2, 2],

    Omega(x) = int log|lambda - x| dmu*(lambda),

which has the piecewise closed form implemented here, and large deviations
of the top eigenvalue enter through the rate function I1.  Everything in
this module is stateless scalar math.
"""

from __future__ import annotations

import math

from .errors import PreconditionError

SQRT2 = math.sqrt(2.0)


def density(x: float) -> float:
    """Semicircle density (1/2pi) sqrt(4 - x^2) on [-2, 2], zero outside."""
    if abs(x) >= 2.0:
        return 0.0
    return math.sqrt(4.0 - x * x) / (2.0 * math.pi)


def omega(x: float) -> float:
    """Log-potential of the semicircle measure.

    x^2/4 - 1/2 on the support; outside, the bracket subtracts the
    deficit so that omega stays continuous (and C^1) across |x| = 2.
    """
    ax = abs(x)
    if ax <= 2.0:
        return x * x / 4.0 - 0.5
    root = math.sqrt(x * x - 4.0)
    return x * x / 4.0 - 0.5 - (ax / 4.0 * root - math.log(root / 2.0 + ax / 2.0))


def omega_prime(x: float) -> float:
    """d omega / dx: x/2 inside the support, (x - sign(x) sqrt(x^2-4))/2 outside."""
    if abs(x) <= 2.0:
        return x / 2.0
    return (x - math.copysign(math.sqrt(x * x - 4.0), x)) / 2.0


def goe_rate_i1(x: float) -> float:
    """Large-deviation rate of the top GOE eigenvalue at location x.

    Real-valued on x >= sqrt(2), where it vanishes, and increasing.  (Some
    references print the domain under a normalization whose edge sits at 2;
    the formula itself is real exactly on x >= sqrt(2).)
    """
    if x < SQRT2 - 1e-15:
        raise PreconditionError(f"goe_rate_i1 needs x >= sqrt(2), got {x}")
    s = math.sqrt(max(x * x - 2.0, 0.0))
    return 0.5 * (x * s + math.log(2.0) - 2.0 * math.log(x + s))
