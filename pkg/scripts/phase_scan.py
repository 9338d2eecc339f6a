"""Steady-state loop power versus feedback phase for a detuned controller.

    python3 scripts/phase_scan.py --detuning-hz 16e6 --x 0.29
"""
import argparse
import math

import numpy as np

from slh_netsim import NetworkParams, phase_scan
from slh_netsim.components import controller_detuning
from slh_netsim.experiment import phase_scan_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--detuning-hz", type=float, default=16e6)
    ap.add_argument("--x", type=float, default=0.29)
    ap.add_argument("--points", type=int, default=629)
    ap.add_argument("--port", type=int, default=2, help="monitored output port (2 = l2 tap)")
    ap.add_argument("--csv", help="write the curve here")
    args = ap.parse_args()

    p = NetworkParams(x=args.x, delta=controller_detuning(args.detuning_hz))
    scan = phase_scan(p, np.linspace(0, 2 * math.pi, args.points), port=args.port)
    ok = scan.power[scan.stable]
    print(f"phi* = {scan.phi_min:.4f} rad, max/min = {ok.max() / ok.min():.2f}, "
          f"{np.count_nonzero(~scan.stable)} unstable points")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(phase_scan_csv(scan))


if __name__ == "__main__":
    main()
