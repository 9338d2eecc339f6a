"""Command-line entry point: ``slh-netsim {run,preset,validate}``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import NetSimError
from .experiment import (
    FORMATS,
    PRESETS,
    ExperimentConfig,
    OutputSpec,
    default_output_path,
    parse_config,
    run_experiment,
    serialize_config,
    write_outputs,
)


def _load(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise NetSimError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)


def _execute(cfg: ExperimentConfig) -> int:
    result = run_experiment(cfg)
    for path in write_outputs(result, cfg, default_output_path(cfg)):
        print(f"wrote {path}", file=sys.stderr)
    if result.phase_scan is not None:
        print(f"phi_min = {result.phase_scan.phi_min:.6f} rad", file=sys.stderr)
    if result.stability_scan is not None and result.stability_scan["threshold"] is not None:
        print(f"instability threshold x* = {result.stability_scan['threshold']:.9f}", file=sys.stderr)
    return 0


def _preset_config(args) -> ExperimentConfig:
    params = {}
    for key in ("x", "y", "phi"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if args.detuning_hz is not None:
        params["detuning_hz"] = args.detuning_hz
    cfg = ExperimentConfig(preset=args.name, params=params,
                           output=OutputSpec(args.out, args.format),
                           emit_plot_script=args.plot_script)
    # round-trip through the parser so CLI overrides get the same validation as files
    return parse_config(serialize_config(cfg))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slh-netsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config file")
    run.add_argument("config")

    pre = sub.add_parser("preset", help="run a named preset")
    pre.add_argument("name", choices=PRESETS)
    pre.add_argument("--x", type=float)
    pre.add_argument("--y", type=float)
    pre.add_argument("--phi", type=float)
    pre.add_argument("--detuning-hz", type=float)
    pre.add_argument("--out")
    pre.add_argument("--format", choices=FORMATS, default="csv")
    pre.add_argument("--plot-script", action="store_true", help="also write a matplotlib script")

    val = sub.add_parser("validate", help="check a config file and print it fully resolved")
    val.add_argument("config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _execute(_load(args.config))
        if args.command == "preset":
            return _execute(_preset_config(args))
        cfg = _load(args.config)
        print(serialize_config(cfg), end="")
        resolved = dataclasses.asdict(cfg.resolved_params())
        print("# resolved parameters")
        for k, v in resolved.items():
            print(f"#   {k} = {v}")
        return 0
    except NetSimError as exc:
        print(f"slh-netsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
