"""IF-OFDM frame structure, transmit chain, and the ZF-SIC receiver.

Frame layout for one block of ``M`` slots::

    [gap | cp | payload_1] [gap | cp | payload_2] ... [gap | cp | payload_B] [guard]

``cp`` has ``L_I - 1`` samples, ``payload`` has ``N`` samples and the trailing
``guard`` has ``L_D - 1`` zeros.  ``gap`` is empty unless the guard-time
variant is enabled, in which case ``L_D - L_I`` zeros sit in front of every
subblock and no inter-subblock cancellation is needed.

Subcarrier labels (``S_k`` and the decoding sets) are 1-based, matching the
``f_1..f_N`` naming of the IDFT columns.  User indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import NetworkChannel, chain_matrix, inter_subblock_matrix
from .numerics import idft_columns, qr_decompose

__all__ = [
    "SchemeInapplicable",
    "DecodeError",
    "FrameConfig",
    "SymbolGrid",
    "DecodedFrame",
    "subblock_length",
    "make_frame_config",
    "random_symbols",
    "precode_subblock",
    "assemble_block",
    "disassemble_block",
    "build_frames",
    "transmit",
    "subblock_window",
    "project_iui",
    "effective_matrix",
    "leakage_matrix",
    "sic_decode",
]

# numeric rank threshold, relative to the largest singular value
RANK_TOL = 1e-8


class SchemeInapplicable(ValueError):
    """No user has more desired taps than the worst interfering link."""


class DecodeError(RuntimeError):
    def __init__(self, user: int, message: str):
        super().__init__(f"user {user}: {message}")
        self.user = user


def subblock_length(L_D: int, L_I: int) -> int:
    """Payload length ``N = max(L_I, 2 (L_D - L_I))``."""
    return max(L_I, 2 * (L_D - L_I))


@dataclass(frozen=True)
class FrameConfig:
    K: int
    tap_lengths: np.ndarray
    L_D: int
    L_I: int
    N: int
    B: int
    subcarriers: tuple[tuple[int, ...], ...]
    decode_sets: tuple[tuple[int, ...], ...]
    guard_variant: bool = False

    @property
    def cp_len(self) -> int:
        return self.L_I - 1

    @property
    def Nbar(self) -> int:
        return self.N + self.L_I - 1

    @property
    def gap(self) -> int:
        return self.L_D - self.L_I if self.guard_variant else 0

    @property
    def stride(self) -> int:
        """Slots per subblock including any guard-time gap."""
        return self.gap + self.Nbar

    @property
    def guard_len(self) -> int:
        return self.L_D - 1

    @property
    def M(self) -> int:
        return self.B * self.stride + self.guard_len

    def streams(self, k: int) -> int:
        return len(self.subcarriers[k])

    def data_offset(self, b: int) -> int:
        """Index of the first post-prefix sample of subblock ``b`` (0-based)."""
        return b * self.stride + self.gap + self.cp_len


def _resolve_subcarriers(subcarriers, n_streams, K, L_D, L_I, N):
    if subcarriers is None:
        subcarriers = range(1, L_D - L_I + 1)
    subcarriers = list(subcarriers)
    if subcarriers and isinstance(subcarriers[0], (int, np.integer)):
        # one common active set; user k takes its first n_streams[k] entries
        common = sorted(int(s) for s in subcarriers)
        if len(set(common)) != len(common):
            raise ValueError("duplicate subcarrier labels")
        if len(common) < max(n_streams):
            raise ValueError(
                f"active set of size {len(common)} cannot carry {max(n_streams)} streams"
            )
        sets = [tuple(common[:m]) for m in n_streams]
    else:
        if len(subcarriers) != K:
            raise ValueError(f"need one subcarrier set per user ({K}), got {len(subcarriers)}")
        sets = [tuple(sorted(int(s) for s in S)) for S in subcarriers]
        for k, (S, m) in enumerate(zip(sets, n_streams)):
            if len(S) != m or len(set(S)) != m:
                raise ValueError(f"user {k} needs {m} distinct subcarriers, got {S}")
    used = sorted(set().union(*sets))
    bad = [s for s in used if not 1 <= s <= N]
    if bad:
        raise ValueError(f"subcarrier labels {bad} outside 1..{N}")
    free = [s for s in range(1, N + 1) if s not in used]
    if len(free) < max(n_streams):
        raise ValueError("not enough subcarriers left for interference-free decoding")
    decode = [tuple(free[:m]) for m in n_streams]
    return tuple(sets), tuple(decode)


def make_frame_config(
    channel: NetworkChannel | np.ndarray,
    B: int,
    subcarriers=None,
    guard_variant: bool = False,
) -> FrameConfig:
    """Block parameters for a given channel (or tap-length grid).

    ``subcarriers`` is the subcarrier policy:

    * ``None``: the first ``L_kk - L_I`` subcarriers for user ``k``;
    * a flat sequence of labels: a common active set shared by all users,
      user ``k`` taking its first ``L_kk - L_I`` entries;
    * a sequence of ``K`` label sequences: explicit per-user sets.

    Receivers decode on the lowest-numbered subcarriers not used by anyone.
    With the default policy that is ``{L_D-L_I+1, ..., L_kk+L_D-2 L_I}``.
    Users with ``L_kk <= L_I`` get no streams.
    """
    grid = channel.tap_lengths if isinstance(channel, NetworkChannel) else np.asarray(channel)
    grid = np.array(grid, dtype=int)
    K = grid.shape[0]
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    L_D = int(np.max(np.diag(grid)))
    off = grid[~np.eye(K, dtype=bool)]
    # a lone user sees no interference; a 1-tap bound keeps the prefix length at 0
    L_I = max(int(off.max()) if off.size else 0, 1)
    n_streams = [max(int(grid[k, k]) - L_I, 0) for k in range(K)]
    if max(n_streams) == 0:
        raise SchemeInapplicable(
            f"no user has more desired taps than L_I={L_I}; use the TDMA-OFDM baseline"
        )
    N = subblock_length(L_D, L_I)
    grid.setflags(write=False)
    sets, decode = _resolve_subcarriers(subcarriers, n_streams, K, L_D, L_I, N)
    return FrameConfig(
        K=K,
        tap_lengths=grid,
        L_D=L_D,
        L_I=L_I,
        N=N,
        B=int(B),
        subcarriers=sets,
        decode_sets=decode,
        guard_variant=bool(guard_variant),
    )


@dataclass(frozen=True)
class SymbolGrid:
    """``symbols[k]`` has shape ``(B, len(S_k))``; row ``b`` is subblock ``b``."""

    symbols: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class DecodedFrame:
    """Symbol estimates plus the per-stream effective gains ``|r_nn|``."""

    symbols: tuple[np.ndarray, ...]
    gains: tuple[np.ndarray, ...]


def random_symbols(cfg: FrameConfig, P: float = 1.0, seed=None) -> SymbolGrid:
    """Gaussian data symbols with ``E|s|^2 = N P / (L_kk - L_I)``.

    That scaling gives ``E||F_S s||^2 = N P`` for every subblock.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(cfg.K):
        m = cfg.streams(k)
        if m == 0:
            out.append(np.zeros((cfg.B, 0), dtype=complex))
            continue
        var = cfg.N * P / m
        z = rng.standard_normal((cfg.B, m, 2)) @ np.array([1.0, 1j])
        out.append(z * np.sqrt(var / 2))
    return SymbolGrid(tuple(out))


def precode_subblock(s, subcarriers: Sequence[int], N: int) -> np.ndarray:
    """``sum_n f_n s_n`` over the labelled IDFT columns."""
    s = np.asarray(s, dtype=complex).reshape(-1)
    if s.size != len(subcarriers):
        raise ValueError(f"{s.size} symbols for {len(subcarriers)} subcarriers")
    if s.size == 0:
        return np.zeros(N, dtype=complex)
    return idft_columns(N, subcarriers) @ s


def assemble_block(payloads, cfg: FrameConfig) -> np.ndarray:
    """Insert prefixes (and gaps), concatenate, append the trailing guard."""
    payloads = np.asarray(payloads, dtype=complex)
    if payloads.shape != (cfg.B, cfg.N):
        raise ValueError(f"expected payloads of shape ({cfg.B}, {cfg.N}), got {payloads.shape}")
    x = np.zeros(cfg.M, dtype=complex)
    cp = cfg.cp_len
    for b, p in enumerate(payloads):
        start = b * cfg.stride + cfg.gap
        if cp:
            x[start : start + cp] = p[-cp:]
        x[start + cp : start + cp + cfg.N] = p
    return x


def disassemble_block(x, cfg: FrameConfig) -> np.ndarray:
    """Inverse of :func:`assemble_block`: the ``(B, N)`` payloads."""
    x = np.asarray(x)
    return np.stack([x[cfg.data_offset(b) : cfg.data_offset(b) + cfg.N] for b in range(cfg.B)])


def build_frames(grid: SymbolGrid, cfg: FrameConfig) -> list[np.ndarray]:
    """Transmit vectors (length ``M``) for every user."""
    frames = []
    for k in range(cfg.K):
        S = cfg.subcarriers[k]
        payloads = np.stack([precode_subblock(s, S, cfg.N) for s in grid.symbols[k]])
        frames.append(assemble_block(payloads, cfg))
    return frames


def transmit(frames, channel: NetworkChannel, sigma2: float = 0.0, seed=None) -> list[np.ndarray]:
    """Pass every user's frame through the K x K ISI channel.

    ``y_k[n] = sum_i sum_l h_ki[l] x_i[n-l] + z_k[n]`` truncated to the
    frame length; ``z`` is ``CN(0, sigma2)``.  ``sigma2 == 0`` is noiseless.
    """
    frames = [np.asarray(x, dtype=complex) for x in frames]
    if len(frames) != channel.K:
        raise ValueError(f"need {channel.K} frames, got {len(frames)}")
    M = frames[0].size
    if any(x.size != M for x in frames):
        raise ValueError("all frames must have the same length")
    rng = np.random.default_rng(seed)
    out = []
    for k in range(channel.K):
        y = np.zeros(M, dtype=complex)
        for i, x in enumerate(frames):
            y += np.convolve(channel.link(k, i), x)[:M]
        if sigma2 > 0:
            z = rng.standard_normal((M, 2)) @ np.array([1.0, 1j])
            y += z * np.sqrt(sigma2 / 2)
        out.append(y)
    return out


def subblock_window(y, cfg: FrameConfig, b: int) -> np.ndarray:
    """The ``Nbar`` received samples of subblock ``b`` (prefix included, gap excluded)."""
    start = b * cfg.stride + cfg.gap
    return np.asarray(y)[start : start + cfg.Nbar]


def project_iui(y_subblock, cfg: FrameConfig, k: int) -> np.ndarray:
    """Drop the prefix and project onto the decoding subcarriers of user ``k``.

    The decoding columns are orthogonal to every subcarrier any user
    transmits on, so aligned interference vanishes here.
    """
    y_subblock = np.asarray(y_subblock, dtype=complex)
    if y_subblock.size != cfg.Nbar:
        raise ValueError(f"subblock must have {cfg.Nbar} samples, got {y_subblock.size}")
    G = idft_columns(cfg.N, cfg.decode_sets[k])
    return G.conj().T @ y_subblock[cfg.cp_len :]


def effective_matrix(channel: NetworkChannel, cfg: FrameConfig, k: int) -> np.ndarray:
    """``F_dec^H Hbar_kk F_S`` for user ``k``; square of size ``L_kk - L_I``."""
    H = chain_matrix(channel.desired(k), cfg.N, cfg.cp_len)
    G = idft_columns(cfg.N, cfg.decode_sets[k])
    F = idft_columns(cfg.N, cfg.subcarriers[k])
    return G.conj().T @ H @ F


def leakage_matrix(channel: NetworkChannel, cfg: FrameConfig, k: int) -> np.ndarray:
    """Previous-subblock leakage seen on user ``k``'s decoding subcarriers."""
    Hp = inter_subblock_matrix(channel.desired(k), cfg.N, cfg.cp_len, cfg.gap)
    G = idft_columns(cfg.N, cfg.decode_sets[k])
    F = idft_columns(cfg.N, cfg.subcarriers[k])
    return G.conj().T @ Hp @ F


def _back_substitute(R: np.ndarray, v: np.ndarray) -> np.ndarray:
    m = R.shape[0]
    s = np.zeros(m, dtype=complex)
    for n in range(m - 1, -1, -1):
        s[n] = (v[n] - R[n, n + 1 :] @ s[n + 1 :]) / R[n, n]
    return s


def sic_decode(received, channel: NetworkChannel, cfg: FrameConfig) -> DecodedFrame:
    """Zero-forcing SIC receiver for every user.

    Per user: subblock 1 is solved directly; every later subblock first
    subtracts the leakage of the already-decoded previous subblock.  Each
    solve is a QR back-substitution.  Estimates are unquantized (no
    constellation), which makes the noiseless path an exact round trip.
    """
    symbols, gains = [], []
    for k in range(cfg.K):
        m = cfg.streams(k)
        if m == 0:
            symbols.append(np.zeros((cfg.B, 0), dtype=complex))
            gains.append(np.zeros(0))
            continue
        H = effective_matrix(channel, cfg, k)
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] <= RANK_TOL * max(sv[0], np.finfo(float).tiny):
            raise DecodeError(k, f"effective channel matrix is rank deficient (cond {sv[0] / max(sv[-1], 1e-300):.2e})")
        Q, R = qr_decompose(H)
        d = np.abs(np.diag(R))
        J = None if cfg.guard_variant else leakage_matrix(channel, cfg, k)
        est = np.zeros((cfg.B, m), dtype=complex)
        for b in range(cfg.B):
            v = project_iui(subblock_window(received[k], cfg, b), cfg, k)
            if b > 0 and J is not None:
                v = v - J @ est[b - 1]
            est[b] = _back_substitute(R, Q.conj().T @ v)
        symbols.append(est)
        gains.append(d)
    return DecodedFrame(tuple(symbols), tuple(gains))
