"""Mixtures nu(x) = sum_p gamma_p^2 x^p of spherical p-spin interactions.

A mixture is the variance polynomial of the Hamiltonian: two configurations
with overlap R have energy covariance N*nu(R).  The model is *pure* when nu
is a monomial and *mixed* otherwise.  Mixed models are further classified as
pure-like, critical or full according to a sign criterion tied to the ground
state and the spectral threshold energy; both the literal classifier value
and the complexity-based one are reported, since they are known to disagree
for near-pure low-degree mixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import PreconditionError

MAX_DEGREE_CAP = 64
TAIL_TOLERANCE = 1e-12
NORMALIZATION_TOLERANCE = 1e-12


class MixtureKind(Enum):
    PURE = "pure"
    PURE_LIKE = "pure_like"
    CRITICAL = "critical"
    FULL = "full"


@dataclass(frozen=True)
class Mixture:
    """Sparse polynomial sum_p c_p x^p with c_p = gamma_p^2 >= 0, p >= 2.

    ``coeffs`` maps degree to coefficient; ``normalized`` records whether
    nu(1) = 1 was enforced at construction.
    """

    coeffs: tuple[tuple[int, float], ...]
    normalized: bool = True

    def __post_init__(self):
        if not self.coeffs:
            raise PreconditionError("mixture needs at least one coefficient")
        seen = set()
        for p, c in self.coeffs:
            if p < 2:
                raise PreconditionError(f"degree {p} < 2 is not allowed")
            if p > MAX_DEGREE_CAP:
                raise PreconditionError(f"degree {p} exceeds cap {MAX_DEGREE_CAP}")
            if c < 0:
                raise PreconditionError(f"negative coefficient {c} at degree {p}")
            if p in seen:
                raise PreconditionError(f"duplicate degree {p}")
            seen.add(p)
        if not any(c > 0 for _, c in self.coeffs):
            raise PreconditionError("mixture must have a positive coefficient")
        if self.normalized and abs(self.eval(1.0) - 1.0) > NORMALIZATION_TOLERANCE:
            raise PreconditionError("normalized mixture must satisfy nu(1) = 1")

    @staticmethod
    def from_coeffs(coeffs: dict[int, float], normalize: bool = True) -> "Mixture":
        items = {int(p): float(c) for p, c in coeffs.items() if c != 0.0}
        dropped = sum(c for p, c in items.items() if p > MAX_DEGREE_CAP)
        if dropped:
            # truncation of fast-decaying tails; anything heavier is suspect
            total = sum(items.values())
            if dropped > TAIL_TOLERANCE * total:
                import warnings

                warnings.warn(
                    f"dropping degrees above {MAX_DEGREE_CAP} removes a "
                    f"fraction {dropped / total:.3e} of nu(1)",
                    stacklevel=2,
                )
            items = {p: c for p, c in items.items() if p <= MAX_DEGREE_CAP}
        if normalize:
            total = sum(items.values())
            if total <= 0:
                raise PreconditionError("cannot normalize a zero mixture")
            items = {p: c / total for p, c in items.items()}
        return Mixture(tuple(sorted(items.items())), normalized=normalize)

    @staticmethod
    def pure(p: int) -> "Mixture":
        return Mixture.from_coeffs({p: 1.0})

    @property
    def max_degree(self) -> int:
        return self.coeffs[-1][0]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.coeffs)

    @property
    def is_pure(self) -> bool:
        return sum(1 for _, c in self.coeffs if c > 0) == 1

    def coeff(self, p: int) -> float:
        for q, c in self.coeffs:
            if q == p:
                return c
        return 0.0

    def eval(self, x: float, k: int = 0) -> float:
        """k-th derivative nu^(k)(x), exact sparse polynomial evaluation."""
        if not 0 <= k <= 4:
            raise PreconditionError(f"derivative order {k} unsupported (0..4)")
        total = 0.0
        for p, c in self.coeffs:
            if p < k:
                continue
            fall = 1.0
            for j in range(k):
                fall *= p - j
            total += c * fall * x ** (p - k)
        return total

    def scale(self, q: float) -> "Mixture":
        """The radius-q mixture nu_q(x) = sum_p gamma_p^2 q^(2p) x^p.

        Restricting the Hamiltonian to the sphere of radius q*sqrt(N) gives
        (in law) the nu_q model on the unit-scaled sphere.  Not normalized:
        nu_q(1) = nu(q^2).
        """
        if q <= 0:
            raise PreconditionError("scale parameter q must be positive")
        return Mixture(
            tuple((p, c * q ** (2 * p)) for p, c in self.coeffs),
            normalized=False,
        )


def norm_distance(m1: Mixture, m2: Mixture) -> float:
    """Fourth-moment weighted coefficient distance sum_p |c_p - c'_p| p^4.

    Controls all derivatives up to order four uniformly on [-1, 1], which is
    what the stability statements for E0, x0 and the pair-complexity profile
    need.
    """
    degrees = set(m1.degrees) | set(m2.degrees)
    return sum(abs(m1.coeff(p) - m2.coeff(p)) * p**4 for p in degrees)


def perturb_pure(p: int, eps: float, partner_degree: int) -> Mixture:
    """Mixture (1-eps) x^p + eps x^partner, normalized by construction."""
    if partner_degree < 2 or partner_degree == p:
        raise PreconditionError("partner degree must be >= 2 and differ from p")
    if not 0.0 <= eps < 1.0:
        raise PreconditionError("eps must lie in [0, 1)")
    if eps == 0.0:
        return Mixture.pure(p)
    return Mixture.from_coeffs({p: 1.0 - eps, partner_degree: eps})


@dataclass(frozen=True)
class Classification:
    """Both classifier values and the resulting kind.

    ``g_literal`` is the closed-form expression in nu(1), nu'(1), nu''(1);
    ``g_via_theta`` is sup_x Theta_{nu,1}(-E_inf, x), the form the ground
    state characterization actually uses.  The two are known to disagree in
    sign near pure low-degree models, hence ``agree``.
    """

    kind: MixtureKind
    g_literal: float
    g_via_theta: float

    @property
    def agree(self) -> bool:
        return (self.g_literal > 0) == (self.g_via_theta > 0)


def g_literal(m: Mixture) -> float:
    """Closed-form classifier from the first two derivatives at 1.

    Equals log(p-1) - 2 exactly for the pure degree-p model.
    """
    n0 = m.eval(1.0)
    n1 = m.eval(1.0, 1)
    n2 = m.eval(1.0, 2)
    return math.log(n2 / n1) - (n2 + n1) * (n2 * n0 + n1**2 - n1 * n0) / (n2 * n1**2)


CRITICAL_BAND = 1e-9


def classify(m: Mixture) -> Classification:
    """Classify as pure / pure-like / critical / full.

    For mixed models the kind follows the sign of sup_x Theta(-E_inf, x);
    pure models use the degenerate one-dimensional complexity.  The literal
    closed form is computed alongside for the disagreement report.
    """
    # imported here: complexity builds on mixture
    from . import complexity

    lit = g_literal(m)
    if m.is_pure:
        p = next(p for p, c in m.coeffs if c > 0)
        if p >= 3:
            via = complexity.theta_pure(p, -complexity.e_infinity(m, 1.0))
        else:
            via = float("nan")  # one-dimensional form needs p >= 3
        return Classification(MixtureKind.PURE, lit, via)
    e_inf = complexity.e_infinity(m, 1.0)
    via, _ = complexity.sup_theta_x(m, 1.0, -e_inf)
    if via > CRITICAL_BAND:
        kind = MixtureKind.PURE_LIKE
    elif via < -CRITICAL_BAND:
        kind = MixtureKind.FULL
    else:
        kind = MixtureKind.CRITICAL
    return Classification(kind, lit, via)


def parse_mixture_text(text: str) -> Mixture:
    """Parse the line-oriented mixture format.

    ``#`` starts a comment, data lines are ``p value`` with value gamma_p^2,
    and an optional ``normalize true|false`` directive controls whether the
    coefficients are rescaled to nu(1) = 1 (default true).
    """
    normalize = True
    coeffs: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "normalize":
            if len(parts) != 2 or parts[1] not in ("true", "false"):
                raise PreconditionError(f"line {lineno}: bad normalize directive")
            normalize = parts[1] == "true"
            continue
        if len(parts) != 2:
            raise PreconditionError(f"line {lineno}: expected 'p value'")
        try:
            p = int(parts[0])
            value = float(parts[1])
        except ValueError as exc:
            raise PreconditionError(f"line {lineno}: {exc}") from exc
        if p < 2:
            raise PreconditionError(f"line {lineno}: degree {p} < 2")
        if value < 0:
            raise PreconditionError(f"line {lineno}: negative value")
        if p in coeffs:
            raise PreconditionError(f"line {lineno}: duplicate degree {p}")
        coeffs[p] = value
    if not coeffs:
        raise PreconditionError("mixture file has no data lines")
    return Mixture.from_coeffs(coeffs, normalize=normalize)


def load_mixture(path) -> Mixture:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_mixture_text(fh.read())


def format_mixture(m: Mixture) -> str:
    lines = [f"normalize {'true' if m.normalized else 'false'}"]
    lines += [f"{p} {c!r}" for p, c in m.coeffs]
    return "\n".join(lines) + "\n"
