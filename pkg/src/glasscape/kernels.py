"""Hot numeric kernels: tensor contractions and Metropolis sweeps.

Hamiltonian evaluation is a symmetric tensor contraction per degree; the
degree-p tensor is stored matricized as (n^(p-1), n) so every contraction
stage is a BLAS matrix-vector product.  Absent degrees are passed as empty
arrays.

Kernels are compiled with numba by default.  Setting the environment
variable ``GLASSCAPE_PURE_NUMPY=1`` (or running without numba installed)
selects the pure-numpy implementations of the same functions; the
``benchmarks/bench_kernels.py`` script compares the two paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = os.environ.get("GLASSCAPE_PURE_NUMPY", "0").lower()
_WANT_NUMBA = _ENV_FLAG not in ("1", "true", "yes")

if _WANT_NUMBA:
    try:
        import numba

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False
else:
    USE_NUMBA = False


def _value_impl(t2, m3, m4, s2, s3, s4, x):
    """H(x) = sum_p s_p <S_p, x^(x)p> over the present degrees."""
    e = 0.0
    n = x.shape[0]
    if t2.size > 0:
        e += s2 * np.dot(x, np.dot(t2, x))
    if m3.size > 0:
        w = np.dot(m3, x).reshape(n, n)
        e += s3 * np.dot(np.dot(w, x), x)
    if m4.size > 0:
        w = np.dot(m4, x).reshape(n * n, n)
        w2 = np.dot(w, x).reshape(n, n)
        e += s4 * np.dot(np.dot(w2, x), x)
    return e


def _value_grad_impl(t2, m3, m4, s2, s3, s4, x, grad):
    """Returns H(x) and writes the Euclidean gradient into ``grad``."""
    e = 0.0
    n = x.shape[0]
    grad[:] = 0.0
    if t2.size > 0:
        g2 = np.dot(t2, x)
        e += s2 * np.dot(x, g2)
        grad += (2.0 * s2) * g2
    if m3.size > 0:
        w = np.dot(m3, x).reshape(n, n)
        g3 = np.dot(w, x)
        e += s3 * np.dot(g3, x)
        grad += (3.0 * s3) * g3
    if m4.size > 0:
        w = np.dot(m4, x).reshape(n * n, n)
        w2 = np.dot(w, x).reshape(n, n)
        g4 = np.dot(w2, x)
        e += s4 * np.dot(g4, x)
        grad += (4.0 * s4) * g4
    return e


def _hessian_impl(t2, m3, m4, s2, s3, s4, x, hess):
    """Writes the Euclidean Hessian of H into ``hess``."""
    n = x.shape[0]
    hess[:] = 0.0
    if t2.size > 0:
        hess += (2.0 * s2) * t2
    if m3.size > 0:
        hess += (6.0 * s3) * np.dot(m3, x).reshape(n, n)
    if m4.size > 0:
        w = np.dot(m4, x).reshape(n * n, n)
        hess += (12.0 * s4) * np.dot(w, x).reshape(n, n)


def _make_sweep(value_fn):
    def _sweep_impl(t2, m3, m4, s2, s3, s4, x, energy, beta, radius,
                    step_angle, normals, uniforms):
        """One Metropolis pass: great-circle rotations by step_angle.

        Mutates x in place; returns (energy, accepted count).
        """
        nprop = normals.shape[0]
        accepted = 0
        cos_t = math.cos(step_angle)
        sin_t = math.sin(step_angle)
        for t in range(nprop):
            v = normals[t]
            v = v - (np.dot(v, x) / (radius * radius)) * x
            nv = math.sqrt(np.dot(v, v))
            if nv == 0.0:
                continue
            xp = cos_t * x + (sin_t * radius / nv) * v
            xp = xp * (radius / math.sqrt(np.dot(xp, xp)))
            ep = value_fn(t2, m3, m4, s2, s3, s4, xp)
            de = ep - energy
            if de <= 0.0 or uniforms[t] < math.exp(-beta * de):
                x[:] = xp
                energy = ep
                accepted += 1
        return energy, accepted

    return _sweep_impl


# pure-numpy path, always available (and used directly by the benchmark)
value_numpy = _value_impl
value_grad_numpy = _value_grad_impl
hessian_numpy = _hessian_impl
sweep_numpy = _make_sweep(_value_impl)

if USE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True, fastmath=False)
    value = _jit(_value_impl)
    value_grad = _jit(_value_grad_impl)
    hessian = _jit(_hessian_impl)
    sweep = _jit(_make_sweep(value))
else:
    value = value_numpy
    value_grad = value_grad_numpy
    hessian = hessian_numpy
    sweep = sweep_numpy
