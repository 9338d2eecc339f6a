"""Pump threshold of the open and closed loop, and its dependence on the feedback phase.

    python3 scripts/stability_scan.py
"""
import argparse

import numpy as np

from slh_netsim import NetworkParams, build_network, instability_threshold, stability, to_abcd


def threshold(p: NetworkParams, hi: float = 3.0) -> float:
    return instability_threshold(lambda x: to_abcd(build_network(p.replace(x=x))), 0.0, hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, default=1.4, help="pump value to report stability at")
    args = ap.parse_args()

    base = NetworkParams()
    print(f"open loop  x* = {threshold(base.replace(l1=1.0, l2=1.0)):.6f}")
    print(f"closed loop x* = {threshold(base):.6f}  (phi = pi)")
    rep = stability(to_abcd(build_network(base.replace(x=args.x))))
    print(f"closed loop at x = {args.x}: max Re eig = {rep.max_real_part:.4g} rad/s, "
          f"Hurwitz = {rep.is_hurwitz}")
    print("phi      x*")
    for phi in np.linspace(2.5, 3.8, 14):
        print(f"{phi:.2f}  {threshold(base.replace(phi=float(phi))):.4f}")


if __name__ == "__main__":
    main()
