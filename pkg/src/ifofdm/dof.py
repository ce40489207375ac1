"""Closed-form degrees-of-freedom formulas, in exact rational arithmetic.

The MISO broadcast channel with ``K`` distributed transmit antennas has a
sum-DoF at least :func:`sum_dof_theorem1` of the matching interference
channel (cooperation cannot hurt), so no separate function is provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "DofQuery",
    "sum_dof_theorem1",
    "sum_dof_symmetric",
    "tdma_ofdm_dof",
    "mimo_circulant_ic_dof",
    "dof_slope_estimate",
]


@dataclass(frozen=True)
class DofQuery:
    """Per-user desired tap counts ``L_kk`` and the worst interfering tap count."""

    desired_taps: tuple[int, ...]
    L_I: int

    def __post_init__(self):
        taps = tuple(int(L) for L in self.desired_taps)
        if not taps:
            raise ValueError("need at least one user")
        if min(taps) < 1 or self.L_I < 1:
            raise ValueError("tap counts must be >= 1")
        object.__setattr__(self, "desired_taps", taps)

    @classmethod
    def symmetric(cls, K: int, L_D: int, L_I: int) -> "DofQuery":
        return cls((L_D,) * K, L_I)

    @property
    def K(self) -> int:
        return len(self.desired_taps)

    @property
    def L_D(self) -> int:
        return max(self.desired_taps)


def sum_dof_theorem1(q: DofQuery) -> Fraction:
    """``max(sum_k (L_kk - L_I)^+ / (N + L_I - 1), 1)``, ``N = max(L_I, 2(L_D - L_I))``."""
    N = max(q.L_I, 2 * (q.L_D - q.L_I))
    total = sum(Fraction(max(L - q.L_I, 0), N + q.L_I - 1) for L in q.desired_taps)
    return max(total, Fraction(1))


def sum_dof_symmetric(K: int, L_D: int, L_I: int) -> Fraction:
    """Symmetric-case simplification; two branches split at ``L_D = 3 L_I / 2``."""
    if K < 1 or L_I < 1:
        raise ValueError("K and L_I must be >= 1")
    if L_D <= L_I:
        raise ValueError(f"need L_D > L_I (got {L_D} <= {L_I}); TDMA regime")
    if 2 * L_D >= 3 * L_I:
        return Fraction(K) / (2 + Fraction(L_I - 1, L_D - L_I))
    return Fraction(K * (L_D - L_I), 2 * L_I - 1)


def tdma_ofdm_dof(M: int, L_D: int, L_I: int) -> Fraction:
    """Round-robin OFDM with an ``M``-point IDFT: ``M / (M + max(L_I, L_D) - 1)``."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return Fraction(M, M + max(L_I, L_D) - 1)


def mimo_circulant_ic_dof(K: int, antennas: int) -> Fraction:
    """K-user MIMO IC with circulant cross links: ``K * antennas / 2``."""
    if K < 1 or antennas < 1:
        raise ValueError("K and antennas must be >= 1")
    return Fraction(K * antennas, 2)


def dof_slope_estimate(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of sum rate against ``log2(P)`` from ``(P_dB, rate)`` pairs."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (P_dB, rate) points")
    x = pts[:, 0] / 10 * np.log2(10)
    if np.ptp(x) == 0:
        raise ValueError("powers must be distinct")
    return float(np.polyfit(x, pts[:, 1], 1)[0])
