"""Achievable spectral efficiencies: ZF-SIC without CSIT, SVD + water-filling
with desired-link CSIT, the TDMA-OFDM baseline, and the two-slot
fold-combiner receiver of the introductory example.

All rates are in bits per channel use.  ``P`` is the per-user average
transmit power per slot and ``sigma2`` the receiver noise power, so
``P / sigma2`` is the SNR used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import NetworkChannel
from .numerics import idft_columns, qr_decompose, svd, toeplitz_conv_matrix
from .phy import FrameConfig, effective_matrix

__all__ = [
    "waterfill",
    "stream_snr",
    "rate_no_csit",
    "rate_with_csit",
    "tdma_ofdm_rate",
    "fold_combiner",
    "fold_matrix",
    "FoldLink",
    "fold_combiner_link",
]


def waterfill(gains, P_total: float, sigma2: float = 1.0) -> tuple[np.ndarray, float]:
    """Water-filling over parallel channels with power gains ``gains``.

    Returns ``(p, level)`` with ``p[n] = max(level - sigma2 / gains[n], 0)``
    and ``sum(p) == P_total``.  ``level`` is the water level ``1/delta``.
    """
    g = np.asarray(gains, dtype=float).reshape(-1)
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValueError("gains must be finite and non-negative")
    if not np.any(g > 0):
        raise ValueError("at least one gain must be positive")
    if not P_total > 0:
        raise ValueError(f"P_total must be positive, got {P_total}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    pos = np.flatnonzero(g > 0)
    floor = sigma2 / g[pos]
    order = np.argsort(floor, kind="stable")
    f = floor[order]
    csum = np.cumsum(f)
    m = np.arange(1, f.size + 1)
    levels = (P_total + csum) / m
    # largest active count whose level still clears its own floor
    n_active = int(np.flatnonzero(levels > f)[-1]) + 1
    level = float(levels[n_active - 1])
    # level - floor cancels badly when floors dwarf the budget; the same
    # allocation written with pairwise floor differences does not
    fa = f[:n_active]
    pa = (P_total + (fa[None, :] - fa[:, None]).sum(axis=1)) / n_active
    pa = np.maximum(pa, 0.0)
    pa *= P_total / pa.sum()
    p = np.zeros_like(g)
    p[pos[order[:n_active]]] = pa
    return p, level


def _check_noise(sigma2):
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")


def _overhead(cfg: FrameConfig, finite_B: bool) -> float:
    # slots per subblock; the block guard is amortized away unless finite_B
    if finite_B:
        return cfg.M / cfg.B
    return float(cfg.stride)


def stream_snr(cfg: FrameConfig, k: int, P, sigma2: float):
    """Per-stream SNR ``(N/Nbar) * (N P / (L_kk - L_I)) / sigma2``."""
    m = cfg.streams(k)
    return (cfg.N / cfg.Nbar) * (cfg.N * np.asarray(P, dtype=float) / m) / sigma2


def _powers(P) -> tuple[np.ndarray, bool]:
    P = np.asarray(P, dtype=float)
    if P.ndim > 1 or np.any(P < 0):
        raise ValueError("P must be a non-negative scalar or 1-D array")
    return np.atleast_1d(P), P.ndim == 0


def rate_no_csit(
    channel: NetworkChannel, cfg: FrameConfig, P, sigma2: float, finite_B: bool = False
) -> np.ndarray:
    """Per-user ZF-SIC rates with no CSIT.

    ``R_k = sum_n log2(1 + |r_nn|^2 SNR) / stride`` where ``r_nn`` is the
    diagonal of the QR factor of the effective matrix and ``stride`` is the
    subblock length ``Nbar`` (plus the guard gap in the guard variant).  With
    ``finite_B`` the rate is over the full ``M``-slot block instead of the
    ``B -> inf`` limit.

    ``P`` may be a 1-D array of powers; the result then has shape
    ``(len(P), K)`` and each effective matrix is factored once.
    """
    _check_noise(sigma2)
    Ps, scalar = _powers(P)
    rates = np.zeros((Ps.size, cfg.K))
    for k in range(cfg.K):
        if cfg.streams(k) == 0:
            continue
        _, R = qr_decompose(effective_matrix(channel, cfg, k))
        g = np.abs(np.diag(R)) ** 2
        snr = stream_snr(cfg, k, Ps, sigma2)
        rates[:, k] = np.log2(1 + snr[:, None] * g[None, :]).sum(axis=1)
    rates /= _overhead(cfg, finite_B)
    return rates[0] if scalar else rates


def rate_with_csit(
    channel: NetworkChannel, cfg: FrameConfig, P, sigma2: float, finite_B: bool = False
) -> np.ndarray:
    """Per-user rates of the SVD precoder with water-filling.

    The power budget per subblock is the same total the no-CSIT scheme puts
    on its streams, ``(N/Nbar) N P``, so the two are directly comparable.
    Array-valued ``P`` behaves as in :func:`rate_no_csit`.
    """
    _check_noise(sigma2)
    Ps, scalar = _powers(P)
    rates = np.zeros((Ps.size, cfg.K))
    for k in range(cfg.K):
        m = cfg.streams(k)
        if m == 0:
            continue
        _, s, _ = svd(effective_matrix(channel, cfg, k))
        g = s**2
        if not np.any(g > 0):
            continue
        for j, budget in enumerate(m * stream_snr(cfg, k, Ps, sigma2) * sigma2):
            if budget <= 0:
                continue
            p, _ = waterfill(g, budget, sigma2)
            rates[j, k] = np.log2(1 + g * p / sigma2).sum()
    rates /= _overhead(cfg, finite_B)
    return rates[0] if scalar else rates


def tdma_ofdm_rate(channel: NetworkChannel, P: float, sigma2: float, M: int = 64) -> np.ndarray:
    """Round-robin OFDM baseline: each user gets ``1/K`` of the blocks.

    A user's own-block rate is ``sum_m log2(1 + SNR |lam_m|^2) / (M + L - 1)``
    over the ``M``-point DFT of its desired channel, with a prefix of
    ``L - 1 = max(L_D, L_I) - 1`` samples.  Returned values already carry
    the ``1/K`` share, so they sum to the sum rate.
    """
    _check_noise(sigma2)
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    L = max(channel.L_D, channel.L_I)
    if L > M:
        raise ValueError(f"{L} taps do not fit an {M}-point OFDM symbol")
    snr = P / sigma2
    out = np.empty(channel.K)
    for k in range(channel.K):
        lam = np.fft.fft(channel.desired(k), M)
        out[k] = np.log2(1 + snr * np.abs(lam) ** 2).sum() / (M + L - 1)
    return out / channel.K


def fold_combiner(y, N: int, span: int) -> np.ndarray:
    """Overlap-add the first ``N + span - 1`` samples of ``y`` modulo ``N``.

    ``out[m] = sum_j y[m + j N]`` over ``m + j N < N + span - 1``.  A
    ``span``-tap channel seen through this fold is circulant; with ``N=2``
    and ``span=2`` it is the ``[[1,0,1,0],[0,1,0,0]]`` combiner.
    """
    y = np.asarray(y)
    if N < 1 or span < 1:
        raise ValueError("N and span must be >= 1")
    W = N + span - 1
    if y.size < W:
        raise ValueError(f"need at least {W} samples, got {y.size}")
    out = np.zeros(N, dtype=np.result_type(y, complex))
    for j in range(0, W, N):
        chunk = y[j : min(j + N, W)]
        out[: chunk.size] += chunk
    return out


def fold_matrix(N: int, span: int, length: int) -> np.ndarray:
    """The 0/1 matrix applied by :func:`fold_combiner` to ``length`` samples."""
    return np.stack([fold_combiner(e, N, span) for e in np.eye(length)], axis=1).real


@dataclass(frozen=True)
class FoldLink:
    gain: complex
    noise_var: float
    sinr: float
    slots: int

    @property
    def bits_per_symbol(self) -> float:
        return float(np.log2(1 + self.sinr))

    @property
    def rate(self) -> float:
        """Bits per channel use: one symbol every ``slots`` slots."""
        return self.bits_per_symbol / self.slots


def fold_combiner_link(
    h_desired, L_I: int, P: float, sigma2: float, N: int = 2, tx_label: int = 1, rx_label: int = 2
) -> FoldLink:
    """Single-symbol IF-OFDM link without a cyclic prefix.

    The symbol (power ``P``) rides on ``f_tx``; the receiver folds the
    received samples so every ``L_I``-tap interferer becomes circulant, then
    projects on ``f_rx``.  Gain and noise variance are computed from the
    actual convolution and fold matrices.
    """
    h = np.asarray(h_desired, dtype=complex).reshape(-1)
    H = toeplitz_conv_matrix(h, N)
    D = fold_matrix(N, L_I, H.shape[0])
    f_tx = idft_columns(N, [tx_label])[:, 0]
    f_rx = idft_columns(N, [rx_label])[:, 0]
    g = complex(f_rx.conj() @ (D @ H) @ f_tx)
    w = D.T @ f_rx.conj()
    noise = float(sigma2 * np.vdot(w, w).real)
    return FoldLink(gain=g, noise_var=noise, sinr=P * abs(g) ** 2 / noise, slots=H.shape[0])
