"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Small batches always take the numpy path (see the thresholds below). Set
``HKFLOP_DISABLE_NUMBA=1`` (read at import time) to force the numpy
versions; they are also used when numba cannot be imported. Both paths take
and return the same array shapes, and the test-suite checks they agree.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("HKFLOP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled by HKFLOP_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy reference implementations

def _powers_np(X: np.ndarray, maxdeg: int) -> np.ndarray:
    P, n = X.shape
    pw = np.ones((P, n, maxdeg + 1), dtype=np.complex128)
    for k in range(1, maxdeg + 1):
        pw[:, :, k] = pw[:, :, k - 1] * X
    return pw


def poly_eval_np(exps: np.ndarray, coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.complex128)
    if exps.shape[0] == 0:
        return np.zeros(X.shape[0], dtype=np.complex128)
    n = X.shape[1]
    pw = _powers_np(X, int(exps.max()))
    mono = pw[:, np.arange(n)[None, :], exps]  # (P, T, n)
    return np.prod(mono, axis=2) @ coeffs


def poly_derivs_np(exps: np.ndarray, coeffs: np.ndarray, X: np.ndarray):
    """Values, gradients and Hessians of a polynomial at each row of X."""
    X = np.asarray(X, dtype=np.complex128)
    P, n = X.shape
    T = exps.shape[0]
    val = np.zeros(P, dtype=np.complex128)
    grad = np.zeros((P, n), dtype=np.complex128)
    hess = np.zeros((P, n, n), dtype=np.complex128)
    if T == 0:
        return val, grad, hess
    maxdeg = int(exps.max())
    pw = _powers_np(X, maxdeg)
    cols = np.arange(n)[None, :]
    val = np.prod(pw[:, cols, exps], axis=2) @ coeffs
    for i in range(n):
        ei = exps[:, i]
        ci = coeffs * ei
        di = exps.copy()
        di[:, i] = np.maximum(di[:, i] - 1, 0)
        grad[:, i] = np.prod(pw[:, cols, di], axis=2) @ ci
        for j in range(i, n):
            ej = di[:, j] if j != i else np.maximum(ei - 1, 0)
            cij = ci * (ej if j != i else ei - 1)
            dij = di.copy()
            dij[:, j] = np.maximum(dij[:, j] - 1, 0)
            h = np.prod(pw[:, cols, dij], axis=2) @ cij
            hess[:, i, j] = h
            hess[:, j, i] = h
    return val, grad, hess


def calabi_potential_np(W: np.ndarray) -> np.ndarray:
    """Kahler potential log(1+|z|^2) + F(t) for rows W = (z, zeta)."""
    W = np.asarray(W, dtype=np.complex128)
    n = W.shape[1] // 2
    z = W[:, :n]
    zeta = W[:, n:]
    nz = 1.0 + np.sum(np.abs(z) ** 2, axis=1)
    t = nz * (np.sum(np.abs(zeta) ** 2, axis=1) + np.abs(np.sum(z * zeta, axis=1)) ** 2)
    s = np.sqrt(1.0 + 4.0 * t)
    return np.log(nz) + s - np.log1p(s)


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True)
    def _mono(X, p, exps, t, skip_i, skip_j):
        n = X.shape[1]
        acc = 1.0 + 0.0j
        for k in range(n):
            e = exps[t, k]
            if k == skip_i:
                e -= 1
            if k == skip_j:
                e -= 1
            for _ in range(e):
                acc *= X[p, k]
        return acc

    @njit(cache=True)
    def _poly_eval_nb(exps, coeffs, X):
        P = X.shape[0]
        T = exps.shape[0]
        out = np.zeros(P, dtype=np.complex128)
        for p in range(P):
            s = 0.0j
            for t in range(T):
                s += coeffs[t] * _mono(X, p, exps, t, -1, -1)
            out[p] = s
        return out

    @njit(cache=True)
    def _poly_derivs_nb(exps, coeffs, X):
        P, n = X.shape
        T = exps.shape[0]
        val = np.zeros(P, dtype=np.complex128)
        grad = np.zeros((P, n), dtype=np.complex128)
        hess = np.zeros((P, n, n), dtype=np.complex128)
        for p in range(P):
            for t in range(T):
                c = coeffs[t]
                val[p] += c * _mono(X, p, exps, t, -1, -1)
                for i in range(n):
                    ei = exps[t, i]
                    if ei == 0:
                        continue
                    grad[p, i] += c * ei * _mono(X, p, exps, t, i, -1)
                    for j in range(i, n):
                        if j == i:
                            if ei < 2:
                                continue
                            h = c * ei * (ei - 1) * _mono(X, p, exps, t, i, i)
                        else:
                            ej = exps[t, j]
                            if ej == 0:
                                continue
                            h = c * ei * ej * _mono(X, p, exps, t, i, j)
                        hess[p, i, j] += h
                        if j != i:
                            hess[p, j, i] += h
        return val, grad, hess

    @njit(cache=True)
    def _calabi_potential_nb(W):
        P = W.shape[0]
        n = W.shape[1] // 2
        out = np.empty(P, dtype=np.float64)
        for p in range(P):
            nz = 1.0
            zz = 0.0
            dot = 0.0j
            for k in range(n):
                a = W[p, k]
                b = W[p, n + k]
                nz += a.real * a.real + a.imag * a.imag
                zz += b.real * b.real + b.imag * b.imag
                dot += a * b
            t = nz * (zz + dot.real * dot.real + dot.imag * dot.imag)
            s = np.sqrt(1.0 + 4.0 * t)
            out[p] = np.log(nz) + s - np.log1p(s)
        return out


# Below these batch sizes the compiled path loses to numpy once numba's
# one-off runtime start-up (~0.6 s even with a warm cache) is counted.
POLY_MIN_WORK = 4096   # points * terms
CALABI_MIN_POINTS = 256


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def poly_eval(exps, coeffs, X) -> np.ndarray:
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.complex128)
    if HAVE_NUMBA and X.shape[0] * len(coeffs) >= POLY_MIN_WORK:
        return _poly_eval_nb(np.ascontiguousarray(exps, dtype=np.int64),
                             np.ascontiguousarray(coeffs, dtype=np.complex128), X)
    return poly_eval_np(exps, coeffs, X)


def poly_derivs(exps, coeffs, X):
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.complex128)
    if HAVE_NUMBA and X.shape[0] * len(coeffs) >= POLY_MIN_WORK:
        return _poly_derivs_nb(np.ascontiguousarray(exps, dtype=np.int64),
                               np.ascontiguousarray(coeffs, dtype=np.complex128), X)
    return poly_derivs_np(exps, coeffs, X)


def calabi_potential(W) -> np.ndarray:
    W = np.ascontiguousarray(np.atleast_2d(W), dtype=np.complex128)
    if HAVE_NUMBA and W.shape[0] >= CALABI_MIN_POINTS:
        return _calabi_potential_nb(W)
    return calabi_potential_np(W)
