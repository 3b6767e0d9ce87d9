"""Monte Carlo spread of the expanded uncertainty of a 15-reading primary-standard series."""
import argparse

import numpy as np

from acoumetro import budget


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    std = budget.PRIMARY_STANDARD
    rng = np.random.default_rng(args.seed)
    U = np.array([
        budget.UncertaintyBudget.from_samples(
            rng.normal(1482.36, std.rms_deviation, std.n_measurements), [("ref", std.u_b)]
        ).U
        for _ in range(args.trials)
    ])
    print(f"median U = {np.median(U):.6f} m/s")
    print(f"P(U <= 0.043 m/s) = {np.mean(U <= 0.043):.4f}")
    print(f"P(round(U, 2) == 0.04) = {np.mean(np.round(U, 2) == 0.04):.4f}")


if __name__ == "__main__":
    main()
