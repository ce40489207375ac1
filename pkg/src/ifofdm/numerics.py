"""Complex-matrix primitives: Fourier matrices, circulant and Toeplitz builders,
and thin QR/SVD wrappers.

Index origin
------------
Functions here take and return 0-based numpy arrays.  The only place a
1-based convention shows up is the *column label* of the IDFT matrix:
column ``k`` of :func:`idft_matrix` (0-based array index ``k``) is the
vector usually written ``f_{k+1}``.  Use :func:`idft_columns` to select
columns by their 1-based label.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "idft_matrix",
    "idft_columns",
    "circulant_from_first_column",
    "circulant_eigenvalues",
    "toeplitz_conv_matrix",
    "qr_decompose",
    "svd",
]


def _as_vector(c, name: str = "vector") -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {c.shape}")
    if c.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(c)):
        raise ValueError(f"{name} has non-finite entries")
    return c


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def idft_matrix(n: int) -> np.ndarray:
    """Unitary ``n``-point Fourier matrix ``F``.

    Entry ``(m, k)`` is ``exp(-2j*pi*m*k/n) / sqrt(n)``, so the 1-based
    column ``f_k`` is built from the root of unity ``exp(-2j*pi*(k-1)/n)``.
    Every ``n x n`` circulant matrix satisfies ``C = F diag(lam) F^H``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"IDFT size must be >= 1, got {n}")
    return _idft_cached(n).copy()


@lru_cache(maxsize=64)
def _idft_cached(n: int) -> np.ndarray:
    m = np.arange(n)
    # exact integer phase index keeps columns orthonormal to ~1e-15
    phase = np.outer(m, m) % n
    F = np.exp(-2j * np.pi * phase / n) / np.sqrt(n)
    F.setflags(write=False)
    return F


def idft_columns(n: int, labels: Sequence[int]) -> np.ndarray:
    """Columns of :func:`idft_matrix` selected by 1-based labels ``f_k``."""
    labels = [int(k) for k in labels]
    bad = [k for k in labels if not 1 <= k <= n]
    if bad:
        raise ValueError(f"subcarrier labels {bad} outside 1..{n}")
    return _idft_cached(int(n))[:, [k - 1 for k in labels]]


def circulant_from_first_column(c) -> np.ndarray:
    """Circulant matrix whose column ``j`` is ``c`` rolled down by ``j``."""
    c = _as_vector(c, "first column")
    n = c.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx]


def circulant_eigenvalues(c) -> np.ndarray:
    """Eigenvalues of ``circulant_from_first_column(c)`` in the column order
    of :func:`idft_matrix`.

    ``lam[k] = sum_t c[t] * exp(+2j*pi*t*k/n)``, which is what makes
    ``C = F diag(lam) F^H`` hold with ``F = idft_matrix(n)``.
    """
    c = _as_vector(c, "first column")
    return np.fft.ifft(c) * c.size


def toeplitz_conv_matrix(h, input_len: int) -> np.ndarray:
    """Tall ``(n+L-1) x n`` matrix of the linear convolution ``y = h * x``.

    Entry ``(r, c)`` (0-based) is ``h[r-c]`` when ``0 <= r-c < L``.
    """
    h = _as_vector(h, "impulse response")
    n = int(input_len)
    if n < 1:
        raise ValueError(f"input length must be >= 1, got {n}")
    L = h.size
    T = np.zeros((n + L - 1, n), dtype=complex)
    for c in range(n):
        T[c : c + L, c] = h
    return T


def qr_decompose(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR of a square complex matrix (LAPACK ``geqrf``).

    A rank-deficient ``A`` gives (near-)zero diagonal entries in ``R``; the
    rate code treats those as zero-rate streams.
    """
    A = _as_square(A)
    Q, R = np.linalg.qr(A, mode="complete")
    return Q, np.triu(R)


def svd(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, s, V)`` with ``A = U @ diag(s) @ V.conj().T``.

    ``s`` is real, non-negative and sorted non-increasing.  Note that ``V``
    itself is returned, not ``V^H``.
    """
    A = _as_square(A)
    U, s, Vh = np.linalg.svd(A)
    return U, s, Vh.conj().T
