"""One-point complexity surface Theta and the ground-state solvers.

Theta_{nu,q}(u, x) is the exponential growth rate of the expected number of
q-critical points with energy per site near u and radial derivative (per
sqrt(N)) near x.  The radial derivative of H at sigma is the directional
derivative <grad H(sigma), sigma/|sigma|>; with that convention the Gaussian
pair (H/sqrt(N), dH/dR) on the sphere of radius q*sqrt(N) has covariance

    S_q = [[nu(q^2),            q nu'(q^2)          ],
           [q nu'(q^2),  q^2 nu''(q^2) + nu'(q^2)   ]],

and Theta is a log-determinant constant, minus half the Gaussian quadratic
form, plus the semicircle log-potential of the rescaled radial coordinate.
Restriction to radius q is equivalent (same disorder) to the scaled mixture
nu_q on the unit sphere with the radial derivative multiplied by q, so
Theta_{nu,q}(u, x) = Theta_{nu_q,1}(u, q x) holds identically; the published
matrix Sigma_q = diag(1,q) S_q diag(1,q) describes the (u, qx) coordinates.

E0(q) is the zero-crossing energy of sup_x Theta (the normalized ground
state on the q-sphere), x0(q) the radial derivative at which that supremum
is attained, and E_infinity(q) the Hessian spectral threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateCovarianceError,
    NumericFailureError,
    PreconditionError,
)
from .mixture import Mixture
from .semicircle import omega

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def sigma_q_matrix(m: Mixture, q: float) -> tuple[float, float, float]:
    """Entries (s11, s12, s22) of the published Sigma_q at radius q."""
    q2 = q * q
    n0, n1, n2 = m.eval(q2), m.eval(q2, 1), m.eval(q2, 2)
    return n0, q2 * n1, q2 * q2 * n2 + q2 * n1


def radial_cov_matrix(m: Mixture, q: float) -> tuple[float, float, float]:
    """Entries of S_q, the covariance of (H/sqrt(N), dH/dR) at radius q."""
    q2 = q * q
    n0, n1, n2 = m.eval(q2), m.eval(q2, 1), m.eval(q2, 2)
    return n0, q * n1, q2 * n2 + n1


class _ThetaContext:
    """Precomputed scalars for repeated Theta evaluation at fixed (m, q)."""

    __slots__ = ("q", "log_term", "s11", "s12", "s22", "det", "omega_scale")

    def __init__(self, m: Mixture, q: float):
        if not 0.0 < q <= 1.0:
            raise PreconditionError(f"q must lie in (0, 1], got {q}")
        q2 = q * q
        n1, n2 = m.eval(q2, 1), m.eval(q2, 2)
        if n1 <= 0 or n2 <= 0:
            raise PreconditionError("mixture derivatives must be positive on (0,1]")
        self.q = q
        self.log_term = 0.5 + 0.5 * math.log(q2 * n2 / n1)
        self.s11, self.s12, self.s22 = radial_cov_matrix(m, q)
        self.det = self.s11 * self.s22 - self.s12 * self.s12
        scale = max(abs(self.s11), abs(self.s22))
        if self.det <= 1e-14 * scale * scale:
            raise DegenerateCovarianceError(
                "covariance of (H, dH/dR) is singular; pure mixtures must use "
                "theta_pure"
            )
        self.omega_scale = 1.0 / (q * math.sqrt(n2))

    def value(self, u: float, x: float) -> float:
        quad = (
            self.s22 * u * u - 2.0 * self.s12 * u * x + self.s11 * x * x
        ) / self.det
        return self.log_term - 0.5 * quad + omega(x * self.omega_scale)


def theta(m: Mixture, q: float, u: float, x: float) -> float:
    """Complexity exponent at energy u, radial derivative x, radius q.

    Raises DegenerateCovarianceError for pure mixtures.
    """
    return _ThetaContext(m, q).value(u, x)


def theta_pure(p: int, u: float) -> float:
    """Degenerate one-dimensional complexity of the pure p-spin model.

    For a homogeneous model the radial derivative is a deterministic
    multiple of the energy, so the surface collapses to a function of u.
    """
    if p < 3:
        raise PreconditionError("theta_pure needs p >= 3")
    return 0.5 + 0.5 * math.log(p - 1.0) - u * u / 2.0 + omega(u * math.sqrt(p / (p - 1.0)))


def e_infinity(m: Mixture, q: float = 1.0) -> float:
    """Spectral threshold energy E_inf of the radius-q restriction.

    Computed by applying the closed form to the scaled mixture nu_q (no 1/q
    renormalization, matching the convention used for E0(q)).
    """
    mq = m.scale(q) if q != 1.0 else m
    n0, n1, n2 = mq.eval(1.0), mq.eval(1.0, 1), mq.eval(1.0, 2)
    return (n2 * n0 + n1 * n1 - n1 * n0) / (n1 * math.sqrt(n2))


def _golden_section_max(f, a, b, tol):
    """Golden-section maximization of a unimodal-enough f on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    xm = 0.5 * (a + b)
    return xm, f(xm)


def sup_theta_x(
    m: Mixture,
    q: float,
    u: float,
    x_hint: float | None = None,
    tol: float = 1e-11,
) -> tuple[float, float]:
    """Global maximum of x -> Theta_{nu,q}(u, x) over the real line.

    Returns (value, argmax).  A coarse grid brackets the global maximum
    (the Gaussian term dominates the tails), then golden section refines;
    the log-potential has curvature kinks at +-2 q sqrt(nu''(q^2)), which
    rules out Newton but not a derivative-free search.  With ``x_hint`` the
    grid is centered and narrowed around the hint (used by continuation
    along q).
    """
    ctx = _ThetaContext(m, q)
    f = ctx.value
    s = 1.0 / ctx.omega_scale  # q sqrt(nu''(q^2)), natural x scale

    if x_hint is None:
        lo, hi, n = -6.0 * s, 2.0 * s, 513
    else:
        lo, hi, n = x_hint - 0.5 * s, x_hint + 0.5 * s, 65

    for _ in range(40):
        step = (hi - lo) / (n - 1)
        best_i, best_v = 0, -math.inf
        for i in range(n):
            v = f(u, lo + i * step)
            if v > best_v:
                best_i, best_v = i, v
        if 0 < best_i < n - 1:
            a = lo + (best_i - 1) * step
            b = lo + (best_i + 1) * step
            xm, vm = _golden_section_max(lambda x: f(u, x), a, b, tol)
            return vm, xm
        # maximum at the grid edge: expand on that side
        width = hi - lo
        if best_i == 0:
            lo, hi = lo - 2.0 * width, lo + 0.25 * width
        else:
            lo, hi = hi - 0.25 * width, hi + 2.0 * width
        n = 513
    raise NumericFailureError("sup_theta_x failed to bracket the maximum")


@dataclass(frozen=True)
class GroundStateSolution:
    """Root data of sup_x Theta_{nu,q}(-E, x) = 0.

    e0 is the normalized ground-state energy of the radius-q restriction,
    x0 the radial derivative of the dominant deep critical points, e_inf
    the spectral threshold, and residual the achieved |sup Theta| at -e0.
    """

    q: float
    e0: float
    x0: float
    e_inf: float
    residual: float


_GS_CACHE: dict[tuple, GroundStateSolution] = {}


def ground_state_solution(
    m: Mixture,
    q: float = 1.0,
    tol: float = 1e-10,
    _hint: tuple[float, float] | None = None,
) -> GroundStateSolution:
    """Solve for (E0(q), x0(q)) by bisection on E -> sup_x Theta(-E, x).

    Requires a non-pure mixture whose radius-q restriction is pure-like
    (sup_x Theta at -E_inf positive), which makes [E_inf, E_hi] a valid
    bracket.  ``_hint`` warm-starts continuation along a q-path.
    """
    if m.is_pure:
        raise DegenerateCovarianceError(
            "ground_state_solution needs a non-pure mixture; use the "
            "one-dimensional pure solver"
        )
    key = (m.coeffs, q, tol)
    if _hint is None and key in _GS_CACHE:
        return _GS_CACHE[key]

    e_inf = e_infinity(m, q)

    def sup_at(E, hint):
        return sup_theta_x(m, q, -E, x_hint=hint)

    if _hint is not None:
        e_guess, x_guess = _hint
        lo, hi = e_guess, e_guess
        v, x_at = sup_at(e_guess, -x_guess)
        step = max(1e-4, 8.0 * tol)
        if v > 0:
            while v > 0:
                lo = hi
                hi += step
                step *= 2.0
                v, x_at = sup_at(hi, x_at)
                if hi > e_guess + 10.0:
                    raise NumericFailureError("ground-state bracket ran away")
        else:
            while v <= 0:
                hi = lo
                lo -= step
                step *= 2.0
                v, x_at = sup_at(lo, x_at)
                if lo < max(e_inf, 0.0) - 1.0:
                    raise NumericFailureError("ground-state bracket ran away")
        x_hint = x_at
    else:
        v_inf, x_hint = sup_at(e_inf, None)
        if not v_inf > 0:
            raise PreconditionError(
                "radius-q restriction is not pure-like: sup Theta(-E_inf) = "
                f"{v_inf:.3e} <= 0"
            )
        lo, hi = e_inf, e_inf + 0.25
        v, x_hint = sup_at(hi, x_hint)
        doublings = 0
        while v > 0:
            lo, hi = hi, hi + (hi - e_inf)
            v, x_hint = sup_at(hi, x_hint)
            doublings += 1
            if doublings > 60:
                raise NumericFailureError("no sign change while bracketing E0")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v, x_hint = sup_at(mid, x_hint)
        if v > 0:
            lo = mid
        else:
            hi = mid
    e0 = 0.5 * (lo + hi)
    value, argmax = sup_theta_x(m, q, -e0, x_hint=x_hint)
    sol = GroundStateSolution(q=q, e0=e0, x0=-argmax, e_inf=e_inf, residual=value)
    if _hint is None:
        _GS_CACHE[key] = sol
    return sol


def e0_pure(p: int, tol: float = 1e-12) -> float:
    """Ground-state energy of the pure p-spin model: root of theta_pure."""
    lo = 2.0 * math.sqrt((p - 1.0) / p)  # E_inf(p)
    hi = lo + 1.0
    while theta_pure(p, -hi) > 0:
        hi += 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if theta_pure(p, -mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theta_expanded_unit(m: Mixture, u: float, x: float) -> float:
    """Theta at q = 1 via the conditional-Gaussian expansion.

    Splits the quadratic form into the marginal of u and the conditional
    of x given u; used as an independent cross-check of the matrix path.
    """
    n0, n1, n2 = m.eval(1.0), m.eval(1.0, 1), m.eval(1.0, 2)
    E = -u
    cond_var = n2 + n1 - n1 * n1 / n0
    return (
        0.5
        + 0.5 * math.log(n2 / n1)
        - E * E / (2.0 * n0)
        - (x + n1 * E / n0) ** 2 / (2.0 * cond_var)
        + omega(x / math.sqrt(n2))
    )
