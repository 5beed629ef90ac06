"""Sampled mixed p-spin Hamiltonians and their derivatives on spheres.

An instance holds, per degree p with positive mixture weight, the
symmetrization of an i.i.d. standard Gaussian order-p tensor (contraction
against x^(x)p only sees the symmetric part, so symmetrizing changes
nothing and makes derivative formulas uniform).  The evaluation prefactor
gamma_p / N^((p-1)/2) gives two configurations with overlap R the energy
covariance N*nu(R).

Tensor streams are drawn from counter-based generators keyed by
(seed, degree), so an instance is regenerated bit-identically from
(mixture, n, seed).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import PreconditionError, ResourceCapError
from .mixture import Mixture

MEMORY_CAP_BYTES = 2**31
SUPPORTED_DEGREES = (2, 3, 4)


@dataclass(frozen=True, eq=False)
class HamiltonianInstance:
    """Frozen disorder sample of a mixed model in dimension n."""

    n: int
    mixture: Mixture
    seed: int
    scales: dict[int, float] = field(repr=False)
    tensors: dict[int, np.ndarray] = field(repr=False)
    # matricized views consumed by the kernels
    _t2: np.ndarray = field(repr=False)
    _m3: np.ndarray = field(repr=False)
    _m4: np.ndarray = field(repr=False)
    _s2: float = 0.0
    _s3: float = 0.0
    _s4: float = 0.0

    def value(self, x: np.ndarray) -> float:
        return float(
            kernels.value(self._t2, self._m3, self._m4,
                          self._s2, self._s3, self._s4, np.ascontiguousarray(x))
        )

    def value_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        grad = np.empty(self.n)
        e = kernels.value_grad(
            self._t2, self._m3, self._m4,
            self._s2, self._s3, self._s4, np.ascontiguousarray(x), grad,
        )
        return float(e), grad

    def euclidean_hessian(self, x: np.ndarray) -> np.ndarray:
        hess = np.empty((self.n, self.n))
        kernels.hessian(
            self._t2, self._m3, self._m4,
            self._s2, self._s3, self._s4, np.ascontiguousarray(x), hess,
        )
        return hess


def sample_hamiltonian(m: Mixture, n: int, seed: int) -> HamiltonianInstance:
    """Draw the disorder tensors for mixture m in dimension n.

    Every active degree must be one of 2, 3, 4 and fit the memory cap;
    the per-degree stream is numpy's Philox keyed by (seed, p), so the
    same arguments always regenerate the same instance.
    """
    if n < 2:
        raise PreconditionError("dimension n must be at least 2")
    scales: dict[int, float] = {}
    tensors: dict[int, np.ndarray] = {}
    for p, c in m.coeffs:
        if c == 0.0:
            continue
        if p not in SUPPORTED_DEGREES:
            raise ResourceCapError(
                f"degree {p} not supported for sampling (tensor storage); "
                f"supported degrees are {SUPPORTED_DEGREES}"
            )
        if 8 * n**p > MEMORY_CAP_BYTES:
            raise ResourceCapError(
                f"degree-{p} tensor at n = {n} exceeds the memory cap"
            )
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(p,)))
        )
        raw = rng.standard_normal((n,) * p)
        tensors[p] = _symmetrize_mean(raw)
        scales[p] = np.sqrt(c) / n ** ((p - 1) / 2.0)

    empty2 = np.zeros((0, 0))
    t2 = tensors.get(2, empty2)
    m3 = tensors[3].reshape(n * n, n) if 3 in tensors else np.zeros((0, 0))
    m4 = tensors[4].reshape(n * n * n, n) if 4 in tensors else np.zeros((0, 0))
    return HamiltonianInstance(
        n=n, mixture=m, seed=seed, scales=scales, tensors=tensors,
        _t2=np.ascontiguousarray(t2), _m3=np.ascontiguousarray(m3),
        _m4=np.ascontiguousarray(m4),
        _s2=scales.get(2, 0.0), _s3=scales.get(3, 0.0), _s4=scales.get(4, 0.0),
    )


def _symmetrize_mean(t: np.ndarray) -> np.ndarray:
    p = t.ndim
    out = np.zeros_like(t)
    count = 0
    for perm in itertools.permutations(range(p)):
        out += np.transpose(t, perm)
        count += 1
    out /= count
    return out


def evaluate(h: HamiltonianInstance, x: np.ndarray, order: int = 2):
    """(H, euclidean gradient, euclidean hessian) at x, up to ``order``.

    Entries beyond the requested order are returned as None.
    """
    if order not in (0, 1, 2):
        raise PreconditionError("order must be 0, 1 or 2")
    if order == 0:
        return h.value(x), None, None
    e, grad = h.value_grad(x)
    if order == 1:
        return e, grad, None
    return e, grad, h.euclidean_hessian(x)


def radial_derivative(h: HamiltonianInstance, x: np.ndarray,
                      grad: np.ndarray | None = None) -> float:
    """dH/dR at x: <grad H(x), x/|x|>."""
    if grad is None:
        _, grad = h.value_grad(x)
    return float(grad @ x) / float(np.linalg.norm(x))


def spherical_gradient(x: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Projection of the Euclidean gradient onto the tangent space at x."""
    u = x / np.linalg.norm(x)
    return grad - (grad @ u) * u


def tangent_basis(x: np.ndarray) -> np.ndarray:
    """Orthonormal (n, n-1) basis of the tangent space at x."""
    u = x / np.linalg.norm(x)
    q, _ = np.linalg.qr(u.reshape(-1, 1), mode="complete")
    return q[:, 1:]


def spherical_hessian_matrix(
    h: HamiltonianInstance,
    x: np.ndarray,
    grad: np.ndarray | None = None,
    hess: np.ndarray | None = None,
) -> np.ndarray:
    """Tangent-frame spherical Hessian: A Hess_E A^T - (dH/dR / |x|) I."""
    if grad is None:
        _, grad = h.value_grad(x)
    if hess is None:
        hess = h.euclidean_hessian(x)
    basis = tangent_basis(x)
    radius = float(np.linalg.norm(x))
    dr = float(grad @ x) / radius
    inner = basis.T @ hess @ basis
    return inner - (dr / radius) * np.eye(basis.shape[1])


def conditioned_band_value(
    h: HamiltonianInstance, q: float, u: float, sigma: np.ndarray
) -> float:
    """H(sigma) under conditioning H(q n_hat) = u, grad_sp H(q n_hat) = 0.

    Exact Gaussian regression: the covariance of (H(q n_hat), tangent
    gradient) is block diagonal in the coordinate frame at n_hat, so the
    conditional value is

        H(sigma) - (H(q n_hat) - u) - <sigma_tangent, tangent grad>.

    ``sigma`` must lie on the band {R(sigma, n_hat) = q} of the outer
    sphere of radius sqrt(n).
    """
    n = h.n
    center = np.zeros(n)
    center[-1] = q * np.sqrt(n)
    e_c, grad_c = h.value_grad(center)
    correction = float(grad_c[:-1] @ sigma[:-1])
    return h.value(sigma) - (e_c - u) - correction
