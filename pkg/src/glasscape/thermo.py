"""Band free-energy functionals and the low-temperature phase quantities.

Around a center on the radius-q sphere, the Hamiltonian restricted to the
band decomposes into independent pure k-spin models with weights alpha_k(q).
Conditioning on the center being a q-critical point at energy NE kills the
k = 1 term and freezes k = 0, leaving the logarithmic band weight

    Lambda_{Z,beta}(E, q) = -beta E + (1/2) log(1-q^2)
                            + (beta^2/2) sum_{k>=2} alpha_k^2(q),

whose restriction to the deepest centers, Lambda_{Z,beta}(-E0(q), q), has
for large beta exactly two stationary radii: the local maximum q_star
(where the Gibbs measure lives) and the local minimum q_star_star.  The
replica-symmetry threshold q_c is where the effective 2-spin temperature
beta*alpha_2(q) crosses 1/sqrt(2); below it the annealed weight is replaced
by the quenched 2-spin free energy Lambda^{2-}_{F,beta}.  The free energy
is the supremum of Lambda_Z over [q_c, 1), attained at q_star, and the gap
between Lambda_Z at q_star and at q_c stays bounded away from zero as
beta -> infinity, with an explicit limit in terms of t_- and t_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .complexity import ground_state_solution
from .errors import NumericFailureError, OutOfRegimeError, PreconditionError
from .mixture import Mixture


def _binom(p: int, k: int) -> float:
    return float(math.comb(p, k))


def alpha_k(m: Mixture, q: float, k: int) -> float:
    """Band decomposition weight alpha_k(q) of the pure k-spin component."""
    if not 0.0 < q < 1.0:
        raise PreconditionError(f"alpha_k needs q in (0, 1), got {q}")
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    s = sum(c * _binom(p, k) * q ** (2 * (p - k)) for p, c in m.coeffs if p >= k)
    return (1.0 - q * q) ** (k / 2.0) * math.sqrt(s)


def alpha_sq_tail(m: Mixture, q: float) -> float:
    """sum_{k>=2} alpha_k^2(q) = nu(1) - alpha_0^2 - alpha_1^2, by the
    binomial generating identity."""
    q2 = q * q
    return m.eval(1.0) - m.eval(q2) - (1.0 - q2) * m.eval(q2, 1)


def lambda_Z(m: Mixture, beta: float, E: float, q: float) -> float:
    """Annealed logarithmic band weight at center energy N*E, radius q."""
    if not 0.0 < q < 1.0:
        raise PreconditionError(f"lambda_Z needs q in (0, 1), got {q}")
    return (
        -beta * E
        + 0.5 * math.log(1.0 - q * q)
        + 0.5 * beta * beta * alpha_sq_tail(m, q)
    )


def lambda_Z_series(m: Mixture, beta: float, E: float, q: float) -> float:
    """Series form of lambda_Z, summing alpha_k^2 for k = 2..max degree.

    alpha_k vanishes for k above the top mixture degree, so the truncation
    is exact; agreement with the closed form is an identity check.
    """
    tail = sum(alpha_k(m, q, k) ** 2 for k in range(2, m.max_degree + 1))
    return -beta * E + 0.5 * math.log(1.0 - q * q) + 0.5 * beta * beta * tail


def lambda_F_2minus(
    m: Mixture, beta: float, E: float, q: float, force: bool = False
) -> float:
    """Quenched band weight of the 2-and-below spins (high-temperature form).

    Exact when beta*alpha_2(q) >= 1/sqrt(2); outside that regime it raises
    unless ``force`` requests the raw formula.
    """
    a2 = alpha_k(m, q, 2)
    if beta * a2 < 1.0 / math.sqrt(2.0) - 1e-9 and not force:
        raise OutOfRegimeError(
            f"beta*alpha_2(q) = {beta * a2:.6f} < 1/sqrt(2); replica-symmetric "
            "formula not valid (pass force=True for the raw value)"
        )
    return (
        -beta * E
        + math.sqrt(2.0) * beta * a2
        - 0.25 * math.log(beta * beta * m.eval(q * q, 2))
        - 0.75
    )


def lambda_F_2minus_long(m: Mixture, beta: float, E: float, q: float) -> float:
    """First displayed line of the quenched weight (identity-check form)."""
    a2 = alpha_k(m, q, 2)
    return (
        -beta * E
        + 0.5 * math.log(1.0 - q * q)
        + math.sqrt(2.0) * beta * a2
        - 0.5 * math.log(beta * a2)
        - 0.75
        - 0.25 * math.log(2.0)
    )


def t_c(m: Mixture) -> float:
    """Limit coefficient of beta*(1 - q_c): 1 / (2 sqrt(nu''(1)))."""
    return 1.0 / (2.0 * math.sqrt(m.eval(1.0, 2)))


def q_c(m: Mixture, beta: float) -> float:
    """Largest root of alpha_2(q) = 1/(beta*sqrt(2)) in (0, 1).

    alpha_2 decreases to 0 at q = 1-, so the root is found by bisection
    from above once beta is past the transition.
    """
    target = 1.0 / (beta * math.sqrt(2.0))

    def g(q: float) -> float:
        return alpha_k(m, q, 2) - target

    hi = 1.0 - 1e-14
    if g(hi) > 0:
        raise PreconditionError(
            f"beta = {beta} too small: alpha_2 stays above the threshold"
        )
    lo = hi
    step = 1.0 / beta
    while True:
        lo = hi - step
        if lo <= 0.0:
            raise PreconditionError(
                f"beta = {beta} too small: alpha_2(q) = {target:.6f} has no "
                "root in (0, 1)"
            )
        if g(lo) > 0:
            break
        step *= 2.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_plus_minus(m: Mixture) -> tuple[float, float]:
    """(t_minus, t_plus): limits of beta*(1 - q) at the two stationary radii.

    Requires the discriminant x0(1)^2 - 4 nu''(1) > 0, which holds for
    pure-like mixtures.
    """
    x0 = ground_state_solution(m, 1.0).x0
    n2 = m.eval(1.0, 2)
    disc = x0 * x0 - 4.0 * n2
    if disc <= 0:
        raise PreconditionError("discriminant x0(1)^2 - 4 nu''(1) is not positive")
    root = math.sqrt(disc)
    return (x0 - root) / (4.0 * n2), (x0 + root) / (4.0 * n2)


def _x0_on_grid(m: Mixture, qs: list[float]) -> list[float]:
    """x0(q) along a grid by warm-started continuation from the largest q."""
    out = [0.0] * len(qs)
    order = sorted(range(len(qs)), key=lambda i: -qs[i])
    hint = None
    for i in order:
        sol = ground_state_solution(m, qs[i], _hint=hint)
        hint = (sol.e0, sol.x0)
        out[i] = sol.x0
    return out


def lambda_Z_theta_derivative(m: Mixture, beta: float, q: float, x0q: float) -> float:
    """d/dq of Lambda_{Z,beta}(-E0(q), q), using dE0/dq = x0(q)."""
    q2 = q * q
    return (
        beta * x0q
        - q / (1.0 - q2)
        - beta * beta * (1.0 - q2) * q * m.eval(q2, 2)
    )


def q_star(m: Mixture, beta: float) -> tuple[float, float]:
    """The stationary radii (q_star, q_star_star) of Lambda_Z at inverse
    temperature beta.

    Scans g(q) = dLambda_Z/dq on [1 - log(beta)/beta, 1 - 1e-4/beta] and
    bisects each sign change; the larger root is the local maximum q_star,
    the smaller the local minimum q_star_star.  Raises when fewer than two
    sign changes are found (beta below the transition window).
    """
    lo_q = 1.0 - math.log(beta) / beta
    hi_q = 1.0 - 1e-4 / beta
    if lo_q <= 0:
        raise PreconditionError(f"beta = {beta} too small for the scan window")
    n = 2048
    qs = [lo_q + (hi_q - lo_q) * i / (n - 1) for i in range(n)]
    x0s = _x0_on_grid(m, qs)
    gs = [lambda_Z_theta_derivative(m, beta, q, x0) for q, x0 in zip(qs, x0s)]

    brackets = []
    for i in range(n - 1):
        if gs[i] == 0.0:
            brackets.append((qs[i], qs[i]))
        elif gs[i] * gs[i + 1] < 0:
            brackets.append((qs[i], qs[i + 1]))
    if len(brackets) < 2:
        raise PreconditionError(
            f"found {len(brackets)} stationary radii in the scan window; "
            f"beta = {beta} is below the band transition"
        )

    def refine(a: float, b: float) -> float:
        sol = ground_state_solution(m, b, _hint=None)
        hint = (sol.e0, sol.x0)

        def g(q: float) -> float:
            nonlocal hint
            s = ground_state_solution(m, q, _hint=hint)
            hint = (s.e0, s.x0)
            return lambda_Z_theta_derivative(m, beta, q, s.x0)

        ga = g(a)
        while b - a > 1e-12:
            mid = 0.5 * (a + b)
            if g(mid) * ga > 0:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    roots = sorted(refine(a, b) for a, b in (brackets[0], brackets[-1]))
    return roots[-1], roots[0]


def free_energy(m: Mixture, beta: float) -> tuple[float, float]:
    """(F_beta, argmax_q): supremum of Lambda_Z(-E0(q), q) over [q_c, 1).

    The maximizer coincides with q_star; golden section is justified since
    the derivative is positive on (q_c, q_star) and negative above.
    """
    qc = q_c(m, beta)
    lo, hi = qc, 1.0 - 1e-9 / beta
    gold = (math.sqrt(5.0) - 1.0) / 2.0

    sol = ground_state_solution(m, hi)
    hint = (sol.e0, sol.x0)

    def f(q: float) -> float:
        nonlocal hint
        s = ground_state_solution(m, q, _hint=hint)
        hint = (s.e0, s.x0)
        return lambda_Z(m, beta, -s.e0, q)

    c = hi - gold * (hi - lo)
    d = lo + gold * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > 1e-9:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - gold * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + gold * (hi - lo)
            fd = f(d)
    qm = 0.5 * (lo + hi)
    return f(qm), qm


def gap(m: Mixture, beta: float) -> tuple[float, float]:
    """(finite, limit) free-energy gap between q_star and q_c.

    finite = Lambda_Z(-E0(q*), q*) - Lambda_Z(-E0(q_c), q_c) at this beta;
    limit is its closed-form beta -> infinity value, positive under
    Condition M.
    """
    qs, _ = q_star(m, beta)
    qc = q_c(m, beta)
    e_qs = ground_state_solution(m, qs).e0
    e_qc = ground_state_solution(m, qc).e0
    finite = lambda_Z(m, beta, -e_qs, qs) - lambda_Z(m, beta, -e_qc, qc)
    tm, _ = t_plus_minus(m)
    tc = t_c(m)
    x0 = ground_state_solution(m, 1.0).x0
    n2 = m.eval(1.0, 2)
    limit = (tc - tm) * x0 + 0.5 * math.log(tm / tc) + n2 * (tm * tm - tc * tc)
    return finite, limit


@dataclass(frozen=True)
class PhaseSummary:
    """Per-beta record of the phase quantities."""

    beta: float
    q_c: float
    q_star: float
    q_star_star: float
    e_star: float
    f_beta: float
    t_minus: float
    t_plus: float
    t_c: float
    gap_finite: float
    gap_limit: float


def phase_summary(m: Mixture, beta: float) -> PhaseSummary:
    """Assemble the full phase record at one inverse temperature."""
    qc = q_c(m, beta)
    qs, qss = q_star(m, beta)
    e_star = ground_state_solution(m, qs).e0
    f_beta, _ = free_energy(m, beta)
    tm, tp = t_plus_minus(m)
    finite, limit = gap(m, beta)
    return PhaseSummary(
        beta=beta, q_c=qc, q_star=qs, q_star_star=qss, e_star=e_star,
        f_beta=f_beta, t_minus=tm, t_plus=tp, t_c=t_c(m),
        gap_finite=finite, gap_limit=limit,
    )
