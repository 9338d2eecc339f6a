"""Regenerate the spectra for every figure pump setting as CSV files.

    python3 scripts/reproduce_figures.py --out results/
"""
import argparse
from pathlib import Path

from slh_netsim.experiment import (
    FIGURE_VARIANTS,
    ExperimentConfig,
    OutputSpec,
    run_experiment,
    write_outputs,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results", type=Path)
    ap.add_argument("--plot-scripts", action="store_true")
    args = ap.parse_args()

    for preset, variants in FIGURE_VARIANTS.items():
        for params in variants:
            tag = "_".join(f"{k}{v:+.2f}" for k, v in params.items())
            cfg = ExperimentConfig(preset=preset, params=dict(params),
                                   output=OutputSpec(format="csv"), emit_plot_script=args.plot_scripts)
            result = run_experiment(cfg)
            path = args.out / f"{preset}_{tag}.csv"
            for written in write_outputs(result, cfg, path):
                print(written)
            for name, values in result.curves.items():
                lo, hi = values.min(), values.max()
                print(f"  {name:22s} min {lo:.4f}  max {hi:.4f}")


if __name__ == "__main__":
    main()
