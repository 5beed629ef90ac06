"""Two-point (pair) complexity: covariance assembly, Psi, and Condition M.

For two spheres of radii q1*sqrt(N), q2*sqrt(N) and configurations with
overlap r, conditioning the energies and radial derivatives on both
spherical gradients vanishing leaves a 4-dimensional Gaussian vector
(U1, U2, X1, X2) whose covariance Sigma_UX is assembled here from closed
scalar forms (a1..a4, upsilon1..3), together with the conditional Hessian
blocks Sigma_Z, Sigma_Q and the cross vectors varsigma1/2.  The pair
complexity Psi is the two-point analogue of Theta; its ground-state profile

    Psi0(r) = Psi_{nu,1,1}(r, -E0, -E0, -x0, -x0)

satisfies Psi0(0) = 0, and Condition M asks that this be the unique maximum
over [-1, 1] with strictly negative curvature at the origin, for a mixed
pure-like model.  Condition M is what separates models with 1-RSB
low-temperature geometry (and temperature chaos) from the pure ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .complexity import ground_state_solution
from .errors import (
    DegenerateCovarianceError,
    NumericFailureError,
    PreconditionError,
)
from .mixture import Mixture, MixtureKind, classify
from .semicircle import omega

CONDITION_CAP = 1e12
NEG_INF_THRESHOLD = -1e3


@dataclass(frozen=True)
class PairCovariance:
    """Assembled two-point covariance data at (r, q1, q2)."""

    r: float
    q1: float
    q2: float
    a1: float
    a2: float
    a3: float
    a4: float
    v1: float
    v2: float
    v3: float
    b1: float
    b2: float
    b3: float
    b4: float
    sigma_U: np.ndarray
    sigma_X: np.ndarray
    sigma_b: np.ndarray
    sigma_UX: np.ndarray
    sigma_Z: np.ndarray
    sigma_Q: np.ndarray
    varsigma1: np.ndarray
    varsigma2: np.ndarray


def _a1(m: Mixture, r: float, qa: float, qb: float) -> float:
    n1a, n1b = m.eval(qa * qa, 1), m.eval(qb * qb, 1)
    n1r = m.eval(qa * qb * r, 1)
    return n1b / (n1a * n1b - n1r * n1r)


def _k_term(m: Mixture, r: float, qa: float, qb: float) -> float:
    z = qa * qb * r
    return r * m.eval(z, 1) - qa * qb * m.eval(z, 2) * (1.0 - r * r)


def _a2(m: Mixture, r: float, qa: float, qb: float) -> float:
    n1a, n1b = m.eval(qa * qa, 1), m.eval(qb * qb, 1)
    k = _k_term(m, r, qa, qb)
    return n1b / (n1a * n1b - k * k)


def _a3(m: Mixture, r: float, qa: float, qb: float) -> float:
    n1a, n1b = m.eval(qa * qa, 1), m.eval(qb * qb, 1)
    n1r = m.eval(qa * qb * r, 1)
    return -n1r / (n1a * n1b - n1r * n1r)


def _a4(m: Mixture, r: float, qa: float, qb: float) -> float:
    n1a, n1b = m.eval(qa * qa, 1), m.eval(qb * qb, 1)
    k = _k_term(m, r, qa, qb)
    return -k / (n1a * n1b - k * k)


def _v1(m: Mixture, r: float, qa: float, qb: float) -> float:
    z = qa * qb * r
    return qa * qb * r * m.eval(z, 2) + m.eval(z, 1)


def _v2(m: Mixture, r: float, qa: float, qb: float) -> float:
    z = qa * qb * r
    return -qa * qb * qb * m.eval(z, 3) * (1.0 - r * r) + 2.0 * r * qb * m.eval(z, 2)


def _v3(m: Mixture, r: float, qa: float, qb: float) -> float:
    z = qa * qb * r
    return qa * qa * qb * r * m.eval(z, 3) + 2.0 * qa * m.eval(z, 2)


def assemble(m: Mixture, r: float, q1: float, q2: float) -> PairCovariance:
    """Evaluate all scalar helpers and covariance blocks at (r, q1, q2).

    Requires |r| < 1 and q1, q2 in (0, 1].  For pure mixtures the 4x4
    block is rank-deficient and a DegenerateCovarianceError is raised.
    """
    if not abs(r) < 1.0:
        raise PreconditionError(f"overlap r must satisfy |r| < 1, got {r}")
    for q in (q1, q2):
        if not 0.0 < q <= 1.0:
            raise PreconditionError(f"radius q must lie in (0, 1], got {q}")

    z = q1 * q2 * r
    one_m_r2 = 1.0 - r * r
    n0r, n1r, n2r, n3r, n4r = (m.eval(z, k) for k in range(5))
    n1_1, n2_1 = m.eval(q1 * q1, 1), m.eval(q1 * q1, 2)
    n1_2, n2_2 = m.eval(q2 * q2, 1), m.eval(q2 * q2, 2)
    n0_1, n0_2 = m.eval(q1 * q1), m.eval(q2 * q2)

    # denominators are positive on |r| < 1 for any nontrivial mixture
    for qa, qb in ((q1, q2), (q2, q1)):
        if n1_1 * n1_2 - m.eval(z, 1) ** 2 <= 0 or n1_1 * n1_2 - _k_term(m, r, qa, qb) ** 2 <= 0:
            raise DegenerateCovarianceError("covariance denominators not positive")

    a2_12, a2_21 = _a2(m, r, q1, q2), _a2(m, r, q2, q1)
    a4_12 = _a4(m, r, q1, q2)
    v1_12 = _v1(m, r, q1, q2)  # symmetric in (q1, q2)
    v2_12, v2_21 = _v2(m, r, q1, q2), _v2(m, r, q2, q1)
    v3_12, v3_21 = _v3(m, r, q1, q2), _v3(m, r, q2, q1)

    sigma_U = np.array(
        [
            [n0_1 - q1 * q1 * a2_21 * n1r * n1r * one_m_r2,
             n0r + q1 * q2 * a4_12 * n1r * n1r * one_m_r2],
            [n0r + q1 * q2 * a4_12 * n1r * n1r * one_m_r2,
             n0_2 - q2 * q2 * a2_12 * n1r * n1r * one_m_r2],
        ]
    )
    x_off = z * r * n2r + r * n1r + v1_12 * v1_12 * one_m_r2 * a4_12
    sigma_X = np.array(
        [
            [q1 * q1 * n2_1 + n1_1 - v1_12 * v1_12 * one_m_r2 * a2_21, x_off],
            [x_off, q2 * q2 * n2_2 + n1_2 - v1_12 * v1_12 * one_m_r2 * a2_12],
        ]
    )
    sigma_b = np.array(
        [
            [q1 * n1_1 - q1 * one_m_r2 * n1r * v1_12 * a2_21,
             q1 * r * n1r + q1 * one_m_r2 * n1r * v1_12 * a4_12],
            [q2 * r * n1r + q2 * one_m_r2 * n1r * v1_12 * a4_12,
             q2 * n1_2 - q2 * one_m_r2 * n1r * v1_12 * a2_12],
        ]
    )
    sigma_UX = np.block([[sigma_U, sigma_b], [sigma_b.T, sigma_X]])

    eigvals = np.linalg.eigvalsh(sigma_UX)
    if eigvals[0] <= 0 or eigvals[-1] / eigvals[0] > CONDITION_CAP:
        raise DegenerateCovarianceError(
            "pair covariance is numerically singular "
            f"(eigenvalues {eigvals[0]:.3e}..{eigvals[-1]:.3e})"
        )

    z_off = -(
        q1 * q2 * one_m_r2 * n3r
        + r * n2r
        + q1 * q2 * one_m_r2 * n2r * n2r * _a3(m, r, q1, q2)
    ) / math.sqrt(n2_1 * n2_2)
    sigma_Z = np.array(
        [
            [1.0 - q2 * q2 * one_m_r2 * n2r * n2r * _a1(m, r, q2, q1) / n2_1, z_off],
            [z_off, 1.0 - q1 * q1 * one_m_r2 * n2r * n2r * _a1(m, r, q1, q2) / n2_2],
        ]
    )

    varsigma1 = np.array(
        [
            q1 * n1r * v2_12 * a2_21,
            q2 * q2 * n2r - q2 * n1r * v2_12 * a4_12,
            v1_12 * v2_12 * a2_21,
            v3_21 - v1_12 * v2_12 * a4_12,
        ]
    ) / math.sqrt(n2_1)
    varsigma2 = np.array(
        [
            q1 * q1 * n2r - q1 * n1r * v2_21 * a4_12,
            q2 * n1r * v2_21 * a2_12,
            v3_12 - v1_12 * v2_21 * a4_12,
            v1_12 * v2_21 * one_m_r2 * a2_12,
        ]
    ) / math.sqrt(n2_2)

    solve = np.linalg.solve
    q11 = float(varsigma1 @ solve(sigma_UX, varsigma1))
    q22 = float(varsigma2 @ solve(sigma_UX, varsigma2))
    q12 = float(varsigma1 @ solve(sigma_UX, varsigma2))
    q_off = (
        q1 * q2 * n4r * one_m_r2 * one_m_r2
        - 2.0 * q1 * q2 * one_m_r2 * r * n3r
        + 2.0 * r * r * one_m_r2 * n2r
        + v2_12 * v2_21 * a4_12
    ) / math.sqrt(n2_1 * n2_2) - one_m_r2 * one_m_r2 * q12
    sigma_Q = np.array(
        [
            [2.0 - one_m_r2 * a2_21 * v2_12 * v2_12 / n2_1
             - one_m_r2 * one_m_r2 * q11, q_off],
            [q_off,
             2.0 - one_m_r2 * a2_12 * v2_21 * v2_21 / n2_2
             - one_m_r2 * one_m_r2 * q22],
        ]
    )

    # q = 1 scalar shorthands, exposed for completeness
    n1_u, n2_u = m.eval(1.0, 1), m.eval(1.0, 2)
    nur1 = m.eval(r, 1)
    a2_u, a4_u = _a2(m, r, 1.0, 1.0), _a4(m, r, 1.0, 1.0)
    v1_u, v2_u = _v1(m, r, 1.0, 1.0), _v2(m, r, 1.0, 1.0)
    b1 = -n1_u + a2_u * one_m_r2 * nur1 * v1_u
    b2 = -r * nur1 - a4_u * one_m_r2 * nur1 * v1_u
    b3 = a2_u * one_m_r2 * nur1 * v2_u
    b4 = m.eval(r, 2) * one_m_r2 - a4_u * one_m_r2 * nur1 * v2_u

    return PairCovariance(
        r=r, q1=q1, q2=q2,
        a1=_a1(m, r, q1, q2), a2=a2_12, a3=_a3(m, r, q1, q2), a4=a4_12,
        v1=v1_12, v2=v2_12, v3=v3_12,
        b1=b1, b2=b2, b3=b3, b4=b4,
        sigma_U=sigma_U, sigma_X=sigma_X, sigma_b=sigma_b,
        sigma_UX=sigma_UX, sigma_Z=sigma_Z, sigma_Q=sigma_Q,
        varsigma1=varsigma1, varsigma2=varsigma2,
    )


def psi(
    m: Mixture,
    q1: float,
    q2: float,
    r: float,
    u1: float,
    u2: float,
    x1: float,
    x2: float,
) -> float:
    """Pair complexity at overlap r, energies u_i, radial derivatives x_i.

    At r = 0 this decomposes exactly into the sum of the two one-point
    complexities.
    """
    cov = assemble(m, r, q1, q2)
    return psi_from_cov(m, cov, u1, u2, x1, x2)


def psi_from_cov(
    m: Mixture, cov: PairCovariance, u1: float, u2: float, x1: float, x2: float
) -> float:
    """Psi evaluated against a pre-assembled covariance (scan fast path)."""
    q1, q2, r = cov.q1, cov.q2, cov.r
    n1_1, n2_1 = m.eval(q1 * q1, 1), m.eval(q1 * q1, 2)
    n1_2, n2_2 = m.eval(q2 * q2, 1), m.eval(q2 * q2, 2)
    n1r = m.eval(q1 * q2 * r, 1)
    log_arg = (
        (1.0 - r * r)
        * q1 * q1 * q2 * q2 * n2_1 * n2_2
        / (n1_1 * n1_2 - n1r * n1r)
    )
    w = np.array([u1, u2, x1, x2])
    quad = float(w @ np.linalg.solve(cov.sigma_UX, w))
    return (
        1.0
        + 0.5 * math.log(log_arg)
        - 0.5 * quad
        + omega(x1 / (q1 * math.sqrt(n2_1)))
        + omega(x2 / (q2 * math.sqrt(n2_2)))
    )


def psi0(m: Mixture, r: float) -> float:
    """Ground-state pair-complexity profile Psi0(r) on [-1, 1].

    Interior points evaluate Psi at (-E0, -x0); the endpoints are defined
    as limits and computed by dyadic extrapolation.  Returns -inf at
    r = -1 for non-even mixtures.
    """
    if not -1.0 <= r <= 1.0:
        raise PreconditionError(f"r must lie in [-1, 1], got {r}")
    if abs(r) == 1.0:
        return psi0_endpoint(m, int(math.copysign(1.0, r)))
    gs = ground_state_solution(m, 1.0)
    return psi(m, 1.0, 1.0, r, -gs.e0, -gs.e0, -gs.x0, -gs.x0)


def _is_even(m: Mixture) -> bool:
    return all(p % 2 == 0 for p, c in m.coeffs if c > 0)


def psi0_endpoint(m: Mixture, side: int, k_min: int = 6, k_max: int = 16) -> float:
    """Limit of Psi0 at r -> +-1 by evaluation at 1 - 2^-k and extrapolation.

    Declares -inf (returned as -math.inf) when the values fall below -1e3
    while still decreasing; that happens at r = -1 exactly for non-even
    mixtures.
    """
    gs = ground_state_solution(m, 1.0)
    vals = []
    for k in range(k_min, k_max + 1):
        r = side * (1.0 - 2.0**-k)
        try:
            vals.append(psi(m, 1.0, 1.0, r, -gs.e0, -gs.e0, -gs.x0, -gs.x0))
        except DegenerateCovarianceError:
            break  # conditioning guard tripped; extrapolate from what we have
    if len(vals) < 4:
        raise NumericFailureError("endpoint ladder collapsed too early")
    if vals[-1] < NEG_INF_THRESHOLD and vals[-1] < vals[0]:
        return -math.inf
    # Richardson on the dyadic sequence: error ~ C 2^-k at each stage
    seq = list(vals)
    for stage in range(1, 4):
        factor = 2.0**stage
        seq = [
            (factor * seq[i + 1] - seq[i]) / (factor - 1.0)
            for i in range(len(seq) - 1)
        ]
    return seq[-1]


class CondMFailure(Enum):
    NOT_MIXED = "not_mixed"
    NOT_PURE_LIKE = "not_pure_like"
    SECOND_DERIVATIVE_NONNEGATIVE = "second_derivative_nonnegative"
    MAX_NOT_UNIQUE_AT_ZERO = "max_not_unique_at_zero"


@dataclass(frozen=True)
class CondMVerdict:
    """Outcome of the Condition M check with its diagnostic quantities."""

    holds: bool
    failed_clause: CondMFailure | None
    psi0_at_zero: float
    d2_psi0_at_zero: float
    max_margin: float
    endpoint_plus: float
    endpoint_minus: float  # -inf encodes the divergent odd-mixture endpoint


D2_THRESHOLD = -1e-8


def check_condition_m(m: Mixture, grid_step: float = 1e-3) -> CondMVerdict:
    """Decide Condition M: mixed, pure-like, concave at 0, unique maximum.

    The uniqueness clause scans (-1, 1) on a fixed grid (refining around
    near-ties by golden section) and checks both endpoint limits; the
    margin is measured outside |r| < 10 * grid_step.  Deterministic for a
    fixed grid_step.
    """
    nan = float("nan")
    if m.is_pure:
        return CondMVerdict(False, CondMFailure.NOT_MIXED, nan, nan, nan, nan, nan)
    cls = classify(m)
    if cls.kind is not MixtureKind.PURE_LIKE:
        return CondMVerdict(False, CondMFailure.NOT_PURE_LIKE, nan, nan, nan, nan, nan)

    gs = ground_state_solution(m, 1.0)

    def f(r: float) -> float:
        return psi(m, 1.0, 1.0, r, -gs.e0, -gs.e0, -gs.x0, -gs.x0)

    psi0_zero = f(0.0)

    # Richardson-extrapolated second derivative at 0
    d2_estimates = []
    for h in (1e-2, 5e-3, 2.5e-3):
        d2_estimates.append((f(h) - 2.0 * psi0_zero + f(-h)) / (h * h))
    d2a = (4.0 * d2_estimates[1] - d2_estimates[0]) / 3.0
    d2b = (4.0 * d2_estimates[2] - d2_estimates[1]) / 3.0
    d2 = (16.0 * d2b - d2a) / 15.0

    endpoint_plus = psi0_endpoint(m, +1)
    endpoint_minus = psi0_endpoint(m, -1)

    # grid scan for the uniqueness clause
    n = int(round(2.0 / grid_step)) - 1
    rs = [-1.0 + (i + 1) * grid_step for i in range(n)]
    vals = [f(r) if abs(r) < 1.0 else -math.inf for r in rs]
    exclusion = 10.0 * grid_step

    best_outside = -math.inf
    for r, v in zip(rs, vals):
        if abs(r) >= exclusion and v > best_outside:
            best_outside = v
    # refine around outside grid points within 1e-6 of the running max
    gold = (math.sqrt(5.0) - 1.0) / 2.0
    for i, (r, v) in enumerate(zip(rs, vals)):
        if abs(r) < exclusion or v < best_outside - 1e-6:
            continue
        a = rs[i - 1] if i > 0 else max(-1.0 + 1e-9, r - grid_step)
        b = rs[i + 1] if i < n - 1 else min(1.0 - 1e-9, r + grid_step)
        lo, hi = a, b
        c = hi - gold * (hi - lo)
        d = lo + gold * (hi - lo)
        fc, fd = f(c), f(d)
        while hi - lo > 1e-10:
            if fc > fd:
                hi, d, fd = d, c, fc
                c = hi - gold * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + gold * (hi - lo)
                fd = f(d)
        best_outside = max(best_outside, fc, fd)
    best_outside = max(best_outside, endpoint_plus, endpoint_minus)
    max_margin = psi0_zero - best_outside

    if not d2 < D2_THRESHOLD:
        return CondMVerdict(
            False, CondMFailure.SECOND_DERIVATIVE_NONNEGATIVE,
            psi0_zero, d2, max_margin, endpoint_plus, endpoint_minus,
        )
    if not max_margin > 0.0:
        return CondMVerdict(
            False, CondMFailure.MAX_NOT_UNIQUE_AT_ZERO,
            psi0_zero, d2, max_margin, endpoint_plus, endpoint_minus,
        )
    return CondMVerdict(
        True, None, psi0_zero, d2, max_margin, endpoint_plus, endpoint_minus,
    )
