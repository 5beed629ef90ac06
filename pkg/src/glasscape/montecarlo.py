"""Desk-scale Monte Carlo verification of the landscape predictions.

Everything here is a pure function of (arguments, seed): replicas get
independent Philox streams derived from (seed, replica index), and
aggregation is order-independent, so re-runs are bit-identical.

The experiments target the paper-level claims at small N: located critical
points against the Kac-Rice growth rate, ground-state energies against
E0, Gibbs samples against the band/1-RSB picture, cross-temperature
overlaps against chaos, and GOE log-determinants against the semicircle
potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .complexity import ground_state_solution, sup_theta_x
from .errors import NumericFailureError, PreconditionError
from .hamiltonian import (
    HamiltonianInstance,
    sample_hamiltonian,
    spherical_hessian_matrix,
    tangent_basis,
)
from .mixture import Mixture
from .semicircle import omega
from .thermo import q_star


def _replica_rng(seed: int, replica: int, domain: int = 0) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(
            np.random.SeedSequence(entropy=seed, spawn_key=(domain, replica))
        )
    )


@dataclass(frozen=True)
class CriticalPoint:
    """A located q-critical point with its diagnostics."""

    sigma: np.ndarray = field(repr=False)
    q: float
    energy_per_site: float
    radial_per_sqrt: float
    grad_residual: float
    hess_min_abs_eig: float
    index: int


def _newton_polish(
    h: HamiltonianInstance,
    x: np.ndarray,
    radius: float,
    tol: float,
    max_iter: int = 80,
) -> tuple[np.ndarray, float] | None:
    """Riemannian Newton for grad_sp H = 0 with Levenberg damping.

    Works in the full embedding space: the tangent Newton system is solved
    with the radial direction pinned by a rank-one term, and the iterate is
    retracted to the sphere.  Returns (point, residual) or None.
    """
    n = h.n
    x = x * (radius / np.linalg.norm(x))
    lam = 0.0
    _, grad = h.value_grad(x)
    u = x / radius
    g_sp = grad - (grad @ u) * u
    res = float(np.linalg.norm(g_sp))
    for _ in range(max_iter):
        if res <= tol:
            return x, res
        hess = h.euclidean_hessian(x)
        dr = float(grad @ u)
        proj = np.eye(n) - np.outer(u, u)
        a = proj @ hess @ proj - (dr / radius) * proj
        scale = max(1.0, float(np.max(np.abs(a))))
        step = None
        for _ in range(25):
            m_sys = a + lam * proj + scale * np.outer(u, u)
            try:
                step = np.linalg.solve(m_sys, -g_sp)
            except np.linalg.LinAlgError:
                lam = max(2.0 * lam, 1e-6 * scale)
                continue
            step -= (step @ u) * u
            if np.linalg.norm(step) > 0.5 * radius:
                lam = max(2.0 * lam, 1e-6 * scale)
                continue
            x_new = x + step
            x_new *= radius / np.linalg.norm(x_new)
            _, grad_new = h.value_grad(x_new)
            u_new = x_new / radius
            g_new = grad_new - (grad_new @ u_new) * u_new
            res_new = float(np.linalg.norm(g_new))
            if res_new < res:
                x, grad, u, g_sp, res = x_new, grad_new, u_new, g_new, res_new
                lam *= 0.25
                break
            lam = max(4.0 * lam, 1e-6 * scale)
        else:
            return None
    return (x, res) if res <= tol else None


def _descend(
    h: HamiltonianInstance,
    x: np.ndarray,
    radius: float,
    max_iter: int = 400,
) -> np.ndarray:
    """Projected gradient descent with backtracking, toward a local minimum."""
    x = x * (radius / np.linalg.norm(x))
    e, grad = h.value_grad(x)
    step = 0.1 * radius
    for _ in range(max_iter):
        u = x / radius
        g_sp = grad - (grad @ u) * u
        gn = float(np.linalg.norm(g_sp))
        if gn < 1e-7 * math.sqrt(h.n):
            break
        improved = False
        while step > 1e-12 * radius:
            x_new = x - (step / gn) * g_sp
            x_new *= radius / np.linalg.norm(x_new)
            e_new, grad_new = h.value_grad(x_new)
            if e_new < e:
                x, e, grad = x_new, e_new, grad_new
                step *= 1.5
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return x


def _make_critical_point(
    h: HamiltonianInstance, x: np.ndarray, q: float, res: float
) -> CriticalPoint:
    _, grad = h.value_grad(x)
    hess_sp = spherical_hessian_matrix(h, x, grad=grad)
    eigs = np.linalg.eigvalsh(hess_sp)
    radius = float(np.linalg.norm(x))
    return CriticalPoint(
        sigma=x,
        q=q,
        energy_per_site=h.value(x) / h.n,
        radial_per_sqrt=float(grad @ x) / radius / math.sqrt(h.n),
        grad_residual=res,
        hess_min_abs_eig=float(np.min(np.abs(eigs))),
        index=int(np.sum(eigs < 0.0)),
    )


def _is_even_mixture(m: Mixture) -> bool:
    return all(p % 2 == 0 for p, c in m.coeffs if c > 0)


def find_q_critical(
    h: HamiltonianInstance,
    q: float,
    n_starts: int | None = None,
    tol: float = 1e-9,
    seed: int = 0,
    descend_first: bool = True,
) -> list[CriticalPoint]:
    """Multi-start search for q-critical points.

    Each start runs (optionally) gradient descent toward a local minimum
    and then Newton-polishes the spherical gradient to zero; converged
    points are deduplicated by overlap (for even mixtures antipodal pairs
    count as distinct points).  Sorted by energy; can be empty.
    """
    if not 0.0 < q <= 1.0:
        raise PreconditionError(f"q must lie in (0, 1], got {q}")
    if n_starts is None:
        n_starts = 50 * h.n
    radius = q * math.sqrt(h.n)
    rng = _replica_rng(seed, 0, domain=1)
    even = _is_even_mixture(h.mixture)
    tol_abs = tol * math.sqrt(h.n)

    found: list[CriticalPoint] = []
    for _ in range(n_starts):
        x0 = rng.standard_normal(h.n)
        x0 *= radius / np.linalg.norm(x0)
        if descend_first:
            x0 = _descend(h, x0, radius)
        polished = _newton_polish(h, x0, radius, tol_abs)
        if polished is None:
            continue
        x, res = polished
        merged = False
        for i, other in enumerate(found):
            overlap = float(x @ other.sigma) / (radius * radius)
            close = overlap > 1.0 - 1e-6 if even else abs(overlap) > 1.0 - 1e-6
            if close:
                cand = _make_critical_point(h, x, q, res)
                if (cand.energy_per_site, cand.grad_residual) < (
                    other.energy_per_site, other.grad_residual
                ):
                    found[i] = cand
                merged = True
                break
        if not merged:
            found.append(_make_critical_point(h, x, q, res))
    found.sort(key=lambda cp: cp.energy_per_site)
    return found


@dataclass(frozen=True)
class CriticalPath:
    """Continuation of a critical point in the radius parameter q."""

    points: list[CriticalPoint]
    aborted: bool
    abort_reason: str | None


HESS_CONDITION_CAP = 1e10


def track_critical_path(
    h: HamiltonianInstance,
    cp: CriticalPoint,
    q_min: float,
    step: float = 1e-3,
    tol: float = 1e-9,
) -> CriticalPath:
    """Predictor-corrector continuation of a local minimum from q = 1 down.

    Predictor rescales radially; corrector is the Newton polish at the new
    radius.  Aborts (with a partial path) if the spherical Hessian becomes
    ill-conditioned or the corrector fails.
    """
    if cp.index != 0:
        raise PreconditionError("path tracking starts from a local minimum")
    points = [cp]
    x = cp.sigma.copy()
    q = cp.q
    tol_abs = tol * math.sqrt(h.n)
    while q > q_min + 1e-12:
        q_next = max(q - step, q_min)
        x_pred = x * (q_next / q)
        radius = q_next * math.sqrt(h.n)
        polished = _newton_polish(h, x_pred, radius, tol_abs, max_iter=30)
        if polished is None:
            return CriticalPath(points, True, "corrector failed")
        x_new, res = polished
        new_cp = _make_critical_point(h, x_new, q_next, res)
        hess_sp = spherical_hessian_matrix(h, x_new)
        eigs = np.abs(np.linalg.eigvalsh(hess_sp))
        if eigs.min() <= 0 or eigs.max() / eigs.min() > HESS_CONDITION_CAP:
            return CriticalPath(points, True, "hessian condition cap")
        points.append(new_cp)
        x, q = x_new, q_next
    return CriticalPath(points, False, None)


def sup_theta_window(
    m: Mixture, q: float, window_b: tuple[float, float],
    window_d: tuple[float, float], grid: int = 101,
) -> float:
    """sup of Theta over the (energy, radial) box, by dense grid."""
    us = np.linspace(window_b[0], window_b[1], grid)
    xs = np.linspace(window_d[0], window_d[1], grid)
    from .complexity import _ThetaContext

    ctx = _ThetaContext(m, q)
    best = -math.inf
    for u in us:
        for x in xs:
            v = ctx.value(float(u), float(x))
            if v > best:
                best = v
    return best


def crt_count_experiment(
    m: Mixture,
    n: int,
    q: float,
    window_b: tuple[float, float],
    window_d: tuple[float, float],
    replicas: int,
    seed: int,
    n_starts: int | None = None,
) -> tuple[float, float, list[int]]:
    """Empirical Kac-Rice exponent vs. sup Theta over the window.

    Returns ((1/n) log mean count, sup Theta, per-replica counts).  The
    mean over replicas of the number of located q-critical points with
    energy per site in window_b and radial derivative (per sqrt(N)) in
    window_d estimates E Crt; its normalized log is compared against the
    analytic exponent.
    """
    counts = []
    for rep in range(replicas):
        h = sample_hamiltonian(m, n, seed + 1000 * rep)
        pts = find_q_critical(h, q, n_starts=n_starts, seed=seed + rep)
        c = sum(
            1
            for p in pts
            if window_b[0] <= p.energy_per_site <= window_b[1]
            and window_d[0] <= p.radial_per_sqrt <= window_d[1]
        )
        counts.append(c)
    mean = float(np.mean(counts))
    log_mean = math.log(mean) / n if mean > 0 else -math.inf
    return log_mean, sup_theta_window(m, q, window_b, window_d), counts


@dataclass(frozen=True)
class OverlapHistogram:
    """Binned pair overlaps with masses near the 1-RSB targets."""

    bin_edges: np.ndarray
    counts: np.ndarray
    n_pairs: int
    mass_near_zero: float
    mass_near_plus: float
    mass_near_minus: float
    target: float  # q_star^2 used for the +- targets
    window: float

    @staticmethod
    def from_overlaps(
        overlaps: np.ndarray, target: float, window: float, bins: int = 80
    ) -> "OverlapHistogram":
        edges = np.linspace(-1.0, 1.0, bins + 1)
        counts, _ = np.histogram(overlaps, bins=edges)
        n_pairs = int(overlaps.size)

        def mass(center: float) -> float:
            if n_pairs == 0:
                return 0.0
            return float(np.mean(np.abs(overlaps - center) < window))

        return OverlapHistogram(
            bin_edges=edges,
            counts=counts,
            n_pairs=n_pairs,
            mass_near_zero=mass(0.0),
            mass_near_plus=mass(target),
            mass_near_minus=mass(-target),
            target=target,
            window=window,
        )


@dataclass
class GibbsDiagnostics:
    acceptance_rate: float
    step_angle: float
    mixing_flag: bool  # True when acceptance collapsed below 1%


@dataclass
class GibbsRun:
    """Samples of independent tempered chains at one temperature."""

    samples: np.ndarray  # (chains, kept, n) configurations at target beta
    energies: np.ndarray  # (chains, kept)
    diagnostics: GibbsDiagnostics


def run_gibbs_chains(
    h: HamiltonianInstance,
    beta: float,
    chains: int,
    sweeps: int,
    seed: int,
    burn_in_fraction: float = 0.5,
    n_rungs: int = 8,
    keep_every: int = 10,
) -> GibbsRun:
    """Metropolis sampling with a geometric parallel-tempering ladder.

    Great-circle proposals with a per-rung step angle adapted toward 30%
    acceptance during burn-in only; rung swaps every sweep; samples are
    collected from the coldest rung after burn-in.
    """
    if beta <= 0:
        raise PreconditionError("beta must be positive")
    n = h.n
    radius = math.sqrt(n)
    betas = np.geomspace(beta / 8.0, beta, n_rungs)
    burn_in = int(sweeps * burn_in_fraction)

    all_samples = []
    all_energies = []
    total_acc = 0
    total_prop = 0
    final_angle = 0.0
    for chain in range(chains):
        rng = _replica_rng(seed, chain, domain=2)
        xs = np.empty((n_rungs, n))
        es = np.empty(n_rungs)
        for k in range(n_rungs):
            v = rng.standard_normal(n)
            xs[k] = v * (radius / np.linalg.norm(v))
            es[k] = h.value(xs[k])
        angles = np.full(n_rungs, 0.5)
        kept = []
        kept_e = []
        acc_counts = np.zeros(n_rungs, dtype=np.int64)
        for sweep_idx in range(sweeps):
            for k in range(n_rungs):
                normals = rng.standard_normal((n, n))
                unifs = rng.random(n)
                es[k], acc = kernels.sweep(
                    h._t2, h._m3, h._m4, h._s2, h._s3, h._s4,
                    xs[k], es[k], betas[k], radius, angles[k], normals, unifs,
                )
                acc_counts[k] += acc
                if sweep_idx < burn_in and (sweep_idx + 1) % 20 == 0:
                    rate = acc_counts[k] / (20.0 * n)
                    acc_counts[k] = 0
                    if rate < 0.25:
                        angles[k] = max(angles[k] * 0.7, 1e-4)
                    elif rate > 0.35:
                        angles[k] = min(angles[k] * 1.3, math.pi / 2)
            if sweep_idx == burn_in - 1:
                acc_counts[:] = 0  # diagnostics count post-burn-in proposals only
            # neighbor swaps (deterministic order, random acceptance)
            swap_u = rng.random(n_rungs - 1)
            for k in range(n_rungs - 1):
                delta = (betas[k + 1] - betas[k]) * (es[k + 1] - es[k])
                if delta >= 0 or swap_u[k] < math.exp(delta):
                    xs[[k, k + 1]] = xs[[k + 1, k]]
                    es[[k, k + 1]] = es[[k + 1, k]]
            if sweep_idx >= burn_in and (sweep_idx - burn_in) % keep_every == 0:
                kept.append(xs[-1].copy())
                kept_e.append(es[-1])
        all_samples.append(np.array(kept))
        all_energies.append(np.array(kept_e))
        total_acc += int(acc_counts[-1])
        total_prop += (sweeps - burn_in) * n
        final_angle = float(angles[-1])

    rate = total_acc / max(total_prop, 1)
    diag = GibbsDiagnostics(
        acceptance_rate=rate, step_angle=final_angle, mixing_flag=rate < 0.01
    )
    return GibbsRun(
        samples=np.array(all_samples), energies=np.array(all_energies),
        diagnostics=diag,
    )


def _cross_chain_overlaps(samples: np.ndarray, n: int) -> np.ndarray:
    """Pair overlaps between samples of distinct chains."""
    chains = samples.shape[0]
    out = []
    for a in range(chains):
        for b in range(a + 1, chains):
            out.append((samples[a] @ samples[b].T).ravel() / n)
    return np.concatenate(out) if out else np.empty(0)


@dataclass
class GibbsExperimentResult:
    """Histogram, band masses and band-conditioned pair statistics."""

    histogram: OverlapHistogram
    band_mass: float
    same_band_mass: float   # |R - q*^2| < window among same-band pairs
    cross_band_mass: float  # |R| < window among different-band pairs
    n_same_pairs: int
    n_cross_pairs: int
    q_star_value: float
    run: GibbsRun


def _band_labels(
    flat: np.ndarray, centers: list[np.ndarray], qs: float, band_eps: float, n: int
) -> np.ndarray:
    """Band index per sample: center k -> label k, its antipode -> ~k, else -1.

    Antipodal bands get the complementary label -(k + 2) so that pairs in
    opposite bands of the same center are not counted as same-band.
    """
    labels = np.full(flat.shape[0], -1, dtype=np.int64)
    best = np.full(flat.shape[0], band_eps)
    for k, c in enumerate(centers):
        overlap = flat @ c / (np.linalg.norm(c) * math.sqrt(n))
        for sign, label in ((1.0, k), (-1.0, -(k + 2))):
            dev = np.abs(sign * overlap - qs)
            take = dev <= best
            labels[take] = label
            best[take] = dev[take]
    return labels


def gibbs_experiment(
    h: HamiltonianInstance,
    beta: float,
    chains: int,
    sweeps: int,
    seed: int,
    band_eps: float = 0.1,
    overlap_window: float = 0.15,
) -> GibbsExperimentResult:
    """Pair-overlap histogram and band statistics at inverse temperature beta.

    Band membership is measured against the deepest located q_star-critical
    points and their antipodes: sigma belongs to the band of sigma_0 when
    |R(sigma, sigma_0) - q_star| <= band_eps.  Pair overlaps are always
    between samples of distinct chains; same-band purity and cross-band
    orthogonality masses follow the band labels.
    """
    run = run_gibbs_chains(h, beta, chains, sweeps, seed)
    qs, _ = q_star(h.mixture, beta)
    centers = _deep_centers(h, qs, seed)
    n = h.n
    chains_n, kept, _ = run.samples.shape

    flat = run.samples.reshape(-1, n)
    labels = (
        _band_labels(flat, centers, qs, band_eps, n)
        if centers
        else np.full(flat.shape[0], -1, dtype=np.int64)
    )
    band_mass = float(np.mean(labels != -1))

    overlaps = []
    same_hits = same_tot = cross_hits = cross_tot = 0
    lab2 = labels.reshape(chains_n, kept)
    for a in range(chains_n):
        for b in range(a + 1, chains_n):
            ov = run.samples[a] @ run.samples[b].T / n
            overlaps.append(ov.ravel())
            la = lab2[a][:, None]
            lb = lab2[b][None, :]
            both = (la != -1) & (lb != -1)
            same = both & (la == lb)
            cross = both & (la != lb) & (la != -(lb + 2))
            same_tot += int(same.sum())
            cross_tot += int(cross.sum())
            same_hits += int((np.abs(ov - qs * qs) < overlap_window)[same].sum())
            cross_hits += int((np.abs(ov) < overlap_window)[cross].sum())
    all_ov = np.concatenate(overlaps) if overlaps else np.empty(0)
    hist = OverlapHistogram.from_overlaps(all_ov, qs * qs, overlap_window)
    return GibbsExperimentResult(
        histogram=hist,
        band_mass=band_mass,
        same_band_mass=same_hits / same_tot if same_tot else float("nan"),
        cross_band_mass=cross_hits / cross_tot if cross_tot else float("nan"),
        n_same_pairs=same_tot,
        n_cross_pairs=cross_tot,
        q_star_value=qs,
        run=run,
    )


def _deep_centers(
    h: HamiltonianInstance, q: float, seed: int, n_starts: int = 40
) -> list[np.ndarray]:
    pts = find_q_critical(h, q, n_starts=n_starts, seed=seed + 77)
    if not pts:
        return []
    floor = pts[0].energy_per_site + 0.05
    return [p.sigma for p in pts if p.energy_per_site <= floor]


def chaos_experiment(
    h: HamiltonianInstance,
    beta1: float,
    beta2: float,
    chains: int,
    sweeps: int,
    seed: int,
    overlap_window: float = 0.15,
) -> OverlapHistogram:
    """Cross-temperature overlap histogram between two Gibbs runs."""
    if beta1 == beta2:
        raise PreconditionError("chaos experiment needs beta1 != beta2")
    run1 = run_gibbs_chains(h, beta1, chains, sweeps, seed)
    run2 = run_gibbs_chains(h, beta2, chains, sweeps, seed + 104729)
    n = h.n
    a = run1.samples.reshape(-1, n)
    b = run2.samples.reshape(-1, n)
    overlaps = (a @ b.T).ravel() / n
    qs1, _ = q_star(h.mixture, beta1)
    qs2, _ = q_star(h.mixture, beta2)
    return OverlapHistogram.from_overlaps(overlaps, qs1 * qs2, overlap_window)


def goe_check(
    n_matrix: int, x: float, replicas: int, seed: int
) -> tuple[float, float]:
    """Mean (1/n) sum log|lambda_i - x| over GOE samples vs Omega(x).

    GOE normalization: independent N(0, 1/n) above the diagonal and
    N(0, 2/n) on it, so the spectrum fills [-2, 2].
    """
    if abs(x) <= 2.1:
        raise PreconditionError("goe_check needs |x| > 2.1, away from the edge")
    vals = []
    for rep in range(replicas):
        rng = _replica_rng(seed, rep, domain=3)
        a = rng.standard_normal((n_matrix, n_matrix))
        g = (a + a.T) / math.sqrt(2.0 * n_matrix)
        eigs = np.linalg.eigvalsh(g)
        vals.append(float(np.mean(np.log(np.abs(eigs - x)))))
    return float(np.mean(vals)), omega(x)


def covariance_probe(
    m: Mixture, n: int, replicas: int, seed: int, overlaps: tuple[float, ...]
) -> list[tuple[float, float, float, float]]:
    """Empirical two-point covariance of H against N nu(R) at fixed probes.

    Returns (R, mean of H(s1)H(s2)/N, standard error, nu(R)) per probe.
    Probe pairs are held fixed across replicas; each replica instance is
    sampled once and evaluated at every probe.
    """
    probe_rng = _replica_rng(seed, 0, domain=4)
    s1 = probe_rng.standard_normal(n)
    s1 *= math.sqrt(n) / np.linalg.norm(s1)
    v = probe_rng.standard_normal(n)
    v -= (v @ s1 / n) * s1
    v *= math.sqrt(n) / np.linalg.norm(v)
    pairs = {
        r: r * s1 + math.sqrt(max(1.0 - r * r, 0.0)) * v for r in overlaps
    }
    prods = {r: [] for r in overlaps}
    for rep in range(replicas):
        h = sample_hamiltonian(m, n, seed + 7919 * rep)
        e1 = h.value(s1)
        for r, s2 in pairs.items():
            prods[r].append(e1 * h.value(s2) / n)
    rows = []
    for r in overlaps:
        arr = np.array(prods[r])
        rows.append(
            (
                r,
                float(arr.mean()),
                float(arr.std(ddof=1) / math.sqrt(replicas)),
                m.eval(r),
            )
        )
    return rows
