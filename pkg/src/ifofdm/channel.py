"""K-user ISI interference channel: sampling, and the per-subblock effective
matrices seen by a receiver after cyclic-prefix removal.

Users are indexed from 0 in this module.  ``channel.link(k, i)`` is the
impulse response from transmitter ``i`` to receiver ``k``; tap ``h[0]`` is
the line-of-sight tap (``h[1]`` in the usual 1-based notation).

All effective matrices are built *operationally*: the N unit vectors are
pushed through cyclic-prefix insertion, linear convolution and prefix
removal, rather than transcribed from a closed-form banded layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .numerics import circulant_from_first_column, toeplitz_conv_matrix

__all__ = [
    "ImpulseResponse",
    "NetworkChannel",
    "LargeScaleConfig",
    "symmetric_tap_grid",
    "sample_network",
    "effective_circulant_interference",
    "cp_insertion_matrix",
    "chain_matrix",
    "decompose_desired",
    "inter_subblock_matrix",
    "effective_noise_variance_partial_isi",
]


@dataclass(frozen=True, eq=False)
class ImpulseResponse:
    """Complex taps of one transmitter-to-receiver link (one tap per symbol period)."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=complex).reshape(-1)
        if taps.size < 1:
            raise ValueError("impulse response needs at least one tap")
        if not np.all(np.isfinite(taps)):
            raise ValueError("impulse response has non-finite taps")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def L(self) -> int:
        return self.taps.size

    def __len__(self) -> int:
        return self.taps.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.taps, dtype=dtype)

    @classmethod
    def _trusted(cls, taps: np.ndarray) -> "ImpulseResponse":
        # skips validation; caller guarantees a finite, non-empty complex vector
        obj = object.__new__(cls)
        taps.setflags(write=False)
        object.__setattr__(obj, "taps", taps)
        return obj


def _taps(h) -> np.ndarray:
    if isinstance(h, ImpulseResponse):
        return h.taps
    return ImpulseResponse(h).taps


@dataclass(frozen=True, eq=False)
class NetworkChannel:
    """K x K grid of impulse responses; ``links[k][i]`` is transmitter i -> receiver k."""

    links: tuple[tuple[ImpulseResponse, ...], ...]
    L_D: int = field(init=False)
    L_I: int = field(init=False)

    def __post_init__(self):
        grid = tuple(
            tuple(h if isinstance(h, ImpulseResponse) else ImpulseResponse(h) for h in row)
            for row in self.links
        )
        K = len(grid)
        if K < 1 or any(len(row) != K for row in grid):
            raise ValueError("channel grid must be a complete K x K grid with K >= 1")
        object.__setattr__(self, "links", grid)
        object.__setattr__(self, "L_D", max(grid[k][k].L for k in range(K)))
        # no interfering links at all when K == 1
        L_I = max((grid[k][i].L for k in range(K) for i in range(K) if i != k), default=0)
        object.__setattr__(self, "L_I", L_I)

    @property
    def K(self) -> int:
        return len(self.links)

    def link(self, k: int, i: int) -> np.ndarray:
        return self.links[k][i].taps

    def desired(self, k: int) -> np.ndarray:
        return self.links[k][k].taps

    @property
    def tap_lengths(self) -> np.ndarray:
        return np.array([[h.L for h in row] for row in self.links], dtype=int)


@dataclass(frozen=True)
class LargeScaleConfig:
    """Distance-dependent path loss; ``distances[k, i]`` is transmitter i -> receiver k."""

    distances: np.ndarray
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distances must be a square K x K array, got shape {d.shape}")
        if np.any(d <= 0):
            raise ValueError("all distances must be positive")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        object.__setattr__(self, "distances", d)

    @property
    def K(self) -> int:
        return self.distances.shape[0]


def symmetric_tap_grid(K: int, L_D: int, L_I: int) -> np.ndarray:
    """Tap-length grid with ``L_D`` on the diagonal and ``L_I`` elsewhere."""
    grid = np.full((K, K), int(L_I), dtype=int)
    np.fill_diagonal(grid, int(L_D))
    return grid


def sample_network(
    K: int,
    tap_lengths,
    beta: float = 0.0,
    seed=None,
    large_scale: LargeScaleConfig | None = None,
) -> NetworkChannel:
    """Draw a block-fading K-user channel.

    Tap ``l`` (0-based) of every link is ``CN(0, exp(-beta*l))``, all taps
    independent.  ``seed`` is anything :func:`numpy.random.default_rng`
    accepts; equal seeds give bit-identical channels.  With ``large_scale``
    the link ``(k, i)`` is additionally scaled by ``d[k, i]**(-alpha/2)``.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    grid = np.asarray(tap_lengths, dtype=int)
    if grid.shape != (K, K):
        raise ValueError(f"tap_lengths must have shape ({K}, {K}), got {grid.shape}")
    if np.any(grid < 1):
        raise ValueError("every link needs at least one tap")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    rng = np.random.default_rng(seed)
    # one draw for the whole grid, consumed row-major, keeps the stream layout fixed
    total = int(grid.sum())
    z = (rng.standard_normal(total) + 1j * rng.standard_normal(total)) / np.sqrt(2.0)
    links = []
    pos = 0
    for k in range(K):
        row = []
        for i in range(K):
            L = int(grid[k, i])
            taps = z[pos : pos + L] * np.exp(-0.5 * beta * np.arange(L))
            if large_scale is not None:
                taps = taps * large_scale.distances[k, i] ** (-large_scale.alpha / 2)
            pos += L
            row.append(ImpulseResponse._trusted(taps))
        links.append(tuple(row))
    return NetworkChannel(tuple(links))


def effective_circulant_interference(h, N: int) -> np.ndarray:
    """N x N circulant with first column ``[h, 0, ..., 0]``.

    This is what an interfering link looks like after prefix removal when its
    delay spread fits inside the cyclic prefix.
    """
    h = _taps(h)
    if h.size > N:
        raise ValueError(f"{h.size} taps cannot be circularized over N={N} samples")
    c = np.zeros(N, dtype=complex)
    c[: h.size] = h
    return circulant_from_first_column(c)


def cp_insertion_matrix(N: int, cp_len: int, gap: int = 0) -> np.ndarray:
    """``(gap + cp_len + N) x N`` map from a payload to ``[0]*gap + tail + payload``."""
    if N < 1 or cp_len < 0 or gap < 0:
        raise ValueError("need N >= 1, cp_len >= 0, gap >= 0")
    if cp_len > N:
        raise ValueError(f"cyclic prefix ({cp_len}) longer than payload ({N})")
    eye = np.eye(N, dtype=complex)
    return np.vstack([np.zeros((gap, N), dtype=complex), eye[N - cp_len :], eye])


def chain_matrix(h, N: int, cp_len: int) -> np.ndarray:
    """N x N map from a subblock payload to its own post-prefix-removal samples.

    Leakage from the previous subblock is excluded; see
    :func:`inter_subblock_matrix`.
    """
    h = _taps(h)
    A = cp_insertion_matrix(N, cp_len)
    Y = toeplitz_conv_matrix(h, N + cp_len) @ A
    return Y[cp_len : cp_len + N]


def decompose_desired(Hbar, h, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Split ``Hbar`` into the N-circularization of ``h`` plus a residual.

    The circulant part uses ``h`` truncated (or zero-padded) to ``N`` taps as
    its first column.  ``circulant + residual == Hbar`` exactly.
    """
    h = _taps(h)
    Hbar = np.asarray(Hbar, dtype=complex)
    if Hbar.shape != (N, N):
        raise ValueError(f"Hbar must be {N} x {N}, got {Hbar.shape}")
    c = np.zeros(N, dtype=complex)
    m = min(N, h.size)
    c[:m] = h[:m]
    circ = circulant_from_first_column(c)
    return circ, Hbar - circ


def inter_subblock_matrix(h, N: int, cp_len: int, gap: int = 0) -> np.ndarray:
    """N x N map from the previous subblock's payload to the leakage it leaves
    in the current subblock's post-prefix-removal samples.

    ``gap`` zero slots precede the prefix of every subblock (guard-time
    variant); with ``gap >= L - 1 - cp_len`` the result is all zeros.
    """
    h = _taps(h)
    stride = gap + cp_len + N
    if h.size - 1 > stride:
        raise ValueError("channel spreads past the next subblock; not supported")
    A = cp_insertion_matrix(N, cp_len, gap)
    Y = toeplitz_conv_matrix(h, stride) @ A
    out = np.zeros((N, N), dtype=complex)
    start = stride + gap + cp_len
    rows = Y[start : start + N]
    out[: rows.shape[0]] = rows
    return out


def effective_noise_variance_partial_isi(
    cfg: LargeScaleConfig,
    L_d: int,
    L_I: int,
    P: float,
    sigma2: float,
) -> np.ndarray:
    """Per-receiver variance of the noise-plus-residual-ISI term when
    interference taps ``L_d..L_I`` (1-based) are treated as noise.

    The result is normalized to the desired link's path loss (the received
    signal is multiplied by ``d_kk**(alpha/2)``)::

        sum_{i != k} (d_kk/d_ki)**alpha * sum_{l=L_d}^{L_I} exp(-beta*(l-1)) * P
            + d_kk**alpha * sigma2
    """
    if not 1 <= L_d <= L_I:
        raise ValueError(f"need 1 <= L_d <= L_I, got L_d={L_d}, L_I={L_I}")
    d = cfg.distances
    K = cfg.K
    ells = np.arange(L_d, L_I + 1)
    tail = np.exp(-cfg.beta * (ells - 1)).sum()
    out = np.empty(K)
    for k in range(K):
        ratio = sum((d[k, k] / d[k, i]) ** cfg.alpha for i in range(K) if i != k)
        out[k] = ratio * tail * P + d[k, k] ** cfg.alpha * sigma2
    return out
