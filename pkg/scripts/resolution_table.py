"""Velocity quantization step against channel base length and timer resolution."""
import argparse

from acoumetro.channel import ChannelGeometry, velocity_quantization


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--speed", type=float, default=1500.0)
    ap.add_argument("--bases-mm", type=float, nargs="+", default=[25, 50, 100])
    ap.add_argument("--timer-ps", type=float, nargs="+", default=[1, 10, 100])
    args = ap.parse_args()
    print("base_mm,timer_ps,delta_c_m_s")
    for base in args.bases_mm:
        for ps in args.timer_ps:
            g = ChannelGeometry(l1=0.01, l2=0.01 + base / 1000, timer_resolution=ps * 1e-12)
            print(f"{base:g},{ps:g},{velocity_quantization(g, args.speed):.6g}")


if __name__ == "__main__":
    main()
