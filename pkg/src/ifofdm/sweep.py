"""Seeded Monte-Carlo sweeps of ergodic sum spectral efficiency.

Every trial draws its own channel from a seed derived from
``(master seed, K index, SNR index, trial index)``, so results do not depend
on evaluation order.  All schemes at one grid point see the same channels.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import LargeScaleConfig, sample_network, symmetric_tap_grid
from .phy import SchemeInapplicable, make_frame_config
from .rates import rate_no_csit, rate_with_csit, tdma_ofdm_rate

__all__ = [
    "SCHEMES",
    "ExperimentConfig",
    "SweepRow",
    "SweepResult",
    "trial_seed",
    "run_sweep",
    "emit_csv",
    "CSV_HEADER",
]

log = logging.getLogger(__name__)

SCHEMES = ("if-ofdm", "if-ofdm-csit", "tdma-ofdm")
CSV_HEADER = ("snr_db", "k", "scheme", "trials", "mean_sum_se", "stderr")


@dataclass(frozen=True)
class ExperimentConfig:
    K: tuple[int, ...] = (2, 4)
    L_D: int = 2
    L_I: int = 1
    schemes: tuple[str, ...] = ("if-ofdm",)
    snr_db: tuple[float, float, float] = (0.0, 30.0, 5.0)
    trials: int = 100
    B: int = 64
    seed: int = 0
    beta: float = 0.0
    tdma_M: int = 64
    guard_variant: bool = False
    # explicit K x K tap-length grid; overrides L_D/L_I and needs a single K
    tap_grid: np.ndarray | None = field(default=None, compare=False)
    large_scale: LargeScaleConfig | None = field(default=None, compare=False)
    out: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "K", tuple(int(k) for k in self.K))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ValueError(f"unknown scheme(s) {unknown}; choose from {SCHEMES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.K or min(self.K) < 1:
            raise ValueError("K values must be >= 1")
        start, stop, step = self.snr_db
        if not step > 0:
            raise ValueError("SNR step must be positive")
        if stop < start:
            raise ValueError("SNR stop must not be below start")
        if self.tap_grid is not None and len(self.K) != 1:
            raise ValueError("an explicit tap grid fixes K; pass a single K")

    @property
    def snr_grid(self) -> np.ndarray:
        start, stop, step = self.snr_db
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(n)

    def taps_for(self, K: int) -> np.ndarray:
        if self.tap_grid is not None:
            return np.asarray(self.tap_grid, dtype=int)
        return symmetric_tap_grid(K, self.L_D, self.L_I)


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    k: int
    scheme: str
    trials: int
    mean_sum_se: float
    stderr: float
    error: str | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def sorted_rows(self) -> list[SweepRow]:
        return sorted(self.rows, key=lambda r: (r.scheme, r.k, r.snr_db))

    def select(self, scheme: str, k: int) -> list[SweepRow]:
        return sorted((r for r in self.rows if r.scheme == scheme and r.k == k), key=lambda r: r.snr_db)


def trial_seed(master: int, k_index: int, snr_index: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=(k_index, snr_index, trial))


def _sum_rate(scheme, channel, frame, P, tdma_M):
    if scheme == "if-ofdm":
        return float(rate_no_csit(channel, frame, P, 1.0).sum())
    if scheme == "if-ofdm-csit":
        return float(rate_with_csit(channel, frame, P, 1.0).sum())
    return float(tdma_ofdm_rate(channel, P, 1.0, tdma_M).sum())


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Mean and standard error of the sum rate at every (K, SNR, scheme) point.

    Noise power is fixed at 1, so ``P = 10**(snr_db/10)``.  A scheme that
    cannot run on the tap profile (IF-OFDM with ``L_D <= L_I``) yields rows
    with ``nan`` statistics and an ``error`` message; nothing is substituted.
    """
    rows = []
    snrs = cfg.snr_grid
    for ki, K in enumerate(cfg.K):
        grid = cfg.taps_for(K)
        frame, frame_error = None, None
        if any(s != "tdma-ofdm" for s in cfg.schemes):
            try:
                frame = make_frame_config(grid, cfg.B, guard_variant=cfg.guard_variant)
            except SchemeInapplicable as exc:
                frame_error = str(exc)
        live = [s for s in cfg.schemes if s == "tdma-ofdm" or frame is not None]
        for si, snr in enumerate(snrs):
            P = 10.0 ** (snr / 10.0)
            samples = {s: np.empty(cfg.trials) for s in live}
            for t in range(cfg.trials):
                if not live:
                    break
                ch = sample_network(
                    K, grid, cfg.beta, trial_seed(cfg.seed, ki, si, t), cfg.large_scale
                )
                for s in live:
                    samples[s][t] = _sum_rate(s, ch, frame, P, cfg.tdma_M)
            for s in cfg.schemes:
                if s not in samples:
                    rows.append(SweepRow(float(snr), K, s, cfg.trials, math.nan, math.nan, frame_error))
                    continue
                x = samples[s]
                se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
                rows.append(SweepRow(float(snr), K, s, cfg.trials, float(x.mean()), se))
            log.debug("K=%d snr=%g done", K, snr)
    return SweepResult(rows)


def _fmt(x: float) -> str:
    return format(x, ".9g")


def emit_csv(result: SweepResult, path) -> Path:
    """Write ``snr_db,k,scheme,trials,mean_sum_se,stderr`` rows (UTF-8, LF)."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in result.sorted_rows():
                w.writerow([_fmt(r.snr_db), r.k, r.scheme, r.trials, _fmt(r.mean_sum_se), _fmt(r.stderr)])
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc.strerror or exc}") from exc
    return path
