"""Sum spectral efficiency vs SNR for K = 2..8 users, (L_D, L_I) = (2, 1),
IF-OFDM against the round-robin OFDM baseline.  Writes a CSV and prints a
small table."""

import argparse
from pathlib import Path

from ifofdm.sweep import ExperimentConfig, emit_csv, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=Path("fig3.csv"))
    args = ap.parse_args()

    cfg = ExperimentConfig(
        K=(2, 4, 6, 8), L_D=2, L_I=1, schemes=("if-ofdm", "tdma-ofdm"),
        snr_db=(0, 30, 5), trials=args.trials, seed=args.seed,
    )
    res = run_sweep(cfg)
    emit_csv(res, args.out)
    print(f"{'K':>2} {'SNR':>4} {'if-ofdm':>9} {'tdma-ofdm':>10}")
    for K in cfg.K:
        for a, b in zip(res.select("if-ofdm", K), res.select("tdma-ofdm", K)):
            print(f"{K:>2} {a.snr_db:>4g} {a.mean_sum_se:>9.3f} {b.mean_sum_se:>10.3f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
