"""Residual RMSE of the speed-vs-code fit over many seeds, by fit degree and code noise."""
import argparse

import numpy as np

from acoumetro import calib
from acoumetro.channel import ChannelGeometry, Velocimeter


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--noise", type=float, nargs="+", default=[0.0, 0.005, 0.01, 0.02])
    ap.add_argument("--degrees", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    args = ap.parse_args()
    print("speed_noise_m_s,degree,median_rmse_m_s,p90_rmse_m_s")
    for noise in args.noise:
        inst = Velocimeter(ChannelGeometry(), speed_noise=noise)
        logs = [calib.run_protocol(inst, seed=s) for s in range(args.seeds)]
        for deg in args.degrees:
            r = [calib.fit_speed_vs_code(p, degree=deg).rmse for p in logs]
            print(f"{noise},{deg},{np.median(r):.6g},{np.percentile(r, 90):.6g}")


if __name__ == "__main__":
    main()
