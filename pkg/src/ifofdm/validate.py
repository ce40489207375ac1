"""Quick invariant checks behind ``ifofdm validate``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import sample_network, symmetric_tap_grid
from .numerics import circulant_eigenvalues, circulant_from_first_column, idft_matrix
from .phy import (
    build_frames,
    make_frame_config,
    project_iui,
    random_symbols,
    sic_decode,
    subblock_window,
    transmit,
)

__all__ = ["Check", "circulant_reconstruction", "iui_nulling", "round_trip", "run_checks"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst: float
    tol: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst={self.worst:.3e} tol={self.tol:.0e}"


def circulant_reconstruction(draws: int = 200, seed: int = 0, tol: float = 1e-10) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        n = int(rng.integers(2, 65))
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        F = idft_matrix(n)
        C = F @ np.diag(circulant_eigenvalues(c)) @ F.conj().T
        err = np.linalg.norm(C - circulant_from_first_column(c)) / np.linalg.norm(c)
        worst = max(worst, err)
    return Check("circulant reconstruction", worst <= tol, worst, tol)


def _interference_only_frames(cfg, grid, k):
    frames = build_frames(grid, cfg)
    frames[k] = np.zeros_like(frames[k])
    return frames


def iui_nulling(
    K: int, L_D: int, L_I: int, draws: int = 50, B: int = 2, seed: int = 0, tol: float = 1e-10
) -> Check:
    """Worst ``||projected|| / ||received subblock||`` with the desired user silent."""
    worst = 0.0
    taps = symmetric_tap_grid(K, L_D, L_I)
    cfg = make_frame_config(taps, B)
    for d in range(draws):
        ss = np.random.SeedSequence(seed, spawn_key=(d,))
        ch_seed, sym_seed = ss.spawn(2)
        ch = sample_network(K, taps, seed=ch_seed)
        grid = random_symbols(cfg, 1.0, seed=sym_seed)
        for k in range(K):
            y = transmit(_interference_only_frames(cfg, grid, k), ch)[k]
            for b in range(B):
                w = subblock_window(y, cfg, b)
                out = project_iui(w, cfg, k)
                worst = max(worst, np.linalg.norm(out) / np.linalg.norm(w))
    return Check(f"IUI nulling K={K} L_D={L_D} L_I={L_I}", worst <= tol, worst, tol)


def round_trip(
    K: int, L_D: int, L_I: int, B: int, draws: int = 20, seed: int = 0, tol: float = 1e-8
) -> Check:
    """Worst relative symbol error of noiseless transmit + SIC decode."""
    worst = 0.0
    taps = symmetric_tap_grid(K, L_D, L_I)
    cfg = make_frame_config(taps, B)
    for d in range(draws):
        ss = np.random.SeedSequence(seed, spawn_key=(d,))
        ch_seed, sym_seed = ss.spawn(2)
        ch = sample_network(K, taps, seed=ch_seed)
        grid = random_symbols(cfg, 1.0, seed=sym_seed)
        dec = sic_decode(transmit(build_frames(grid, cfg), ch), ch, cfg)
        for s_hat, s in zip(dec.symbols, grid.symbols):
            worst = max(worst, float(np.max(np.abs(s_hat - s)) / np.max(np.abs(s))))
    return Check(f"round trip K={K} L_D={L_D} L_I={L_I} B={B}", worst <= tol, worst, tol)


def run_checks(report: Callable[[str], None] = print) -> bool:
    checks = [circulant_reconstruction()]
    for K in (2, 4):
        for L_D, L_I in ((2, 1), (3, 2), (10, 6)):
            checks.append(iui_nulling(K, L_D, L_I, draws=10))
    for B in (1, 2, 10):
        for L_D, L_I in ((10, 4), (10, 6)):
            checks.append(round_trip(2, L_D, L_I, B, draws=5))
    for c in checks:
        report(c.line())
    ok = all(c.passed for c in checks)
    report(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return ok
