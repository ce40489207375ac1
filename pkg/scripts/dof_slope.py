"""High-SNR slope of the Monte-Carlo sum rate against the closed-form sum-DoF."""

import argparse

from ifofdm.dof import DofQuery, dof_slope_estimate, sum_dof_theorem1
from ifofdm.sweep import ExperimentConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=6)
    args = ap.parse_args()

    for L_D, L_I, K in ((2, 1, 4), (3, 1, 4), (3, 2, 4), (10, 6, 4)):
        cfg = ExperimentConfig(K=(K,), L_D=L_D, L_I=L_I, snr_db=(40, 60, 5), trials=args.trials, seed=args.seed)
        rows = run_sweep(cfg).select("if-ofdm", K)
        slope = dof_slope_estimate([(r.snr_db, r.mean_sum_se) for r in rows])
        target = sum_dof_theorem1(DofQuery.symmetric(K, L_D, L_I))
        print(f"L_D={L_D} L_I={L_I} K={K}: slope {slope:.4f}  closed form {target} ({float(target):.4f})")


if __name__ == "__main__":
    main()
