"""Experiment configs, presets and result serialization.

Config files are YAML mappings with these top-level keys (all optional)::

    preset: opo_network          # open_loop | empty_cavity_feedback | opo_network |
                                 # detuned_controller | phase_scan | stability_scan | custom
    params:                      # overrides of NetworkParams fields (rates in rad/s)
      x: 0.32
      y: 0.10
      detuning_hz: 16e6          # controller detuning in Hz; sets delta = 2 pi f
      input_amplitudes: [[re, im], ...]   # 8 complex seeds, sqrt(photons/s)
    grid: {start_hz: 0, stop_hz: 20e6, points: 1024}
    scan: {start: 0, stop: 6.283185307179586, points: 629}   # phi (phase_scan) or x (stability_scan)
    port: 0                      # detected output port (0 = homodyne)
    open_loop_comparison: true   # add openloop_* curves (l1 = l2 = 1)
    output: {path: out.csv, format: csv}
    emit_plot_script: false

Unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import (
    PhaseScanResult,
    phase_scan,
    squeezing_spectrum,
)
from .components import HOMODYNE_PORT, L2_TAP_PORT, N_PORTS, NetworkParams, build_network
from .errors import ConfigError, ExperimentError, NetSimError, ParameterError
from .linear import instability_threshold, stability, to_abcd

OUTPUT_DIR_ENV = "SLH_NETSIM_OUTPUT_DIR"
PRESETS = (
    "open_loop",
    "empty_cavity_feedback",
    "opo_network",
    "detuned_controller",
    "phase_scan",
    "stability_scan",
    "custom",
)
SPECTRUM_PRESETS = {"open_loop", "empty_cavity_feedback", "opo_network", "detuned_controller", "custom"}
FORMATS = ("csv", "json")

FIG5_DETUNING_HZ = 16e6
OPEN_LOOP = {"l1": 1.0, "l2": 1.0}

# per-preset parameter defaults layered on top of NetworkParams()
PRESET_PARAMS = {
    "open_loop": {"x": 0.79, **OPEN_LOOP},
    "empty_cavity_feedback": {"x": 0.33},
    "opo_network": {"x": 0.32, "y": 0.10},
    "detuned_controller": {"x": 0.29, "y": 0.0, "detuning_hz": FIG5_DETUNING_HZ},
    "phase_scan": {"x": 0.29, "y": 0.0, "detuning_hz": FIG5_DETUNING_HZ},
    "stability_scan": {"y": 0.0},
    "custom": {},
}
# all published pump settings per preset, for batch reproduction
FIGURE_VARIANTS = {
    "open_loop": [{"x": 0.3}, {"x": 0.79}],
    "empty_cavity_feedback": [{"x": 0.17}, {"x": 0.33}],
    "opo_network": [{"x": 0.32, "y": 0.10}, {"x": 0.32, "y": -0.09}],
    "detuned_controller": [{"x": 0.29, "y": 0.0}],
}
PRESET_SCAN = {
    "phase_scan": {"start": 0.0, "stop": 2 * math.pi, "points": 629},
    "detuned_controller": {"start": 0.0, "stop": 2 * math.pi, "points": 629},
    "stability_scan": {"start": 0.0, "stop": 1.5, "points": 151},
}

PARAM_KEYS = {f.name for f in dataclasses.fields(NetworkParams)} | {"detuning_hz"}
TOP_KEYS = {"preset", "params", "grid", "scan", "port", "open_loop_comparison", "output",
            "emit_plot_script"}


@dataclass(frozen=True)
class GridSpec:
    start_hz: float = 0.0
    stop_hz: float = 20e6
    points: int = 1024

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start_hz, self.stop_hz, self.points)


@dataclass(frozen=True)
class ScanSpec:
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "custom"
    params: dict = field(default_factory=dict)
    grid: GridSpec = GridSpec()
    scan: ScanSpec | None = None
    port: int = HOMODYNE_PORT
    open_loop_comparison: bool | None = None
    output: OutputSpec = OutputSpec()
    emit_plot_script: bool = False

    def resolved_params(self) -> NetworkParams:
        merged = {**PRESET_PARAMS[self.preset], **self.params}
        return params_from_mapping(merged)

    def resolved_scan(self) -> ScanSpec | None:
        if self.scan is not None:
            return self.scan
        spec = PRESET_SCAN.get(self.preset)
        return ScanSpec(**spec) if spec else None

    @property
    def wants_open_loop(self) -> bool:
        if self.open_loop_comparison is not None:
            return self.open_loop_comparison
        return self.preset in {"empty_cavity_feedback", "opo_network", "detuned_controller"}


def params_from_mapping(values: dict) -> NetworkParams:
    values = dict(values)
    if "detuning_hz" in values:
        hz = values.pop("detuning_hz")
        if "delta" in values:
            raise ConfigError("give either delta or detuning_hz, not both", key="detuning_hz")
        values["delta"] = 2 * math.pi * hz
    try:
        return NetworkParams(**values)
    except ParameterError as exc:
        raise ConfigError(str(exc), key=str(exc).split(":")[0]) from exc


def _number(value, key, kind=float):
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    try:
        # YAML reads "16e6" as a string
        num = kind(float(value)) if kind is int else kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}", key=key) from None
    if kind is int and num != float(value):
        raise ConfigError(f"expected an integer, got {value!r}", key=key)
    return num


def _complex_list(value, key):
    if not isinstance(value, list) or len(value) != N_PORTS:
        raise ConfigError(f"expected a list of {N_PORTS} [re, im] pairs", key=key)
    out = []
    for item in value:
        if isinstance(item, list) and len(item) == 2:
            out.append(complex(_number(item[0], key), _number(item[1], key)))
        else:
            out.append(complex(_number(item, key), 0.0))
    return tuple(out)


def _section(raw, name, allowed):
    value = raw.get(name) if raw else None
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError("expected a mapping", key=name)
    unknown = set(value) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}", key=name)
    return value


_RANGE_CHECKS = {"l1": (0.0, 1.0), "l2": (0.0, 1.0), "l3": (0.0, 1.0)}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML experiment config."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"syntax error: {getattr(exc, 'problem', exc)}", line=line) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}")

    preset = raw.get("preset", "custom")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}", key="preset")

    params = {}
    for key, value in _section(raw, "params", PARAM_KEYS).items():
        if key == "input_amplitudes":
            params[key] = _complex_list(value, f"params.{key}")
            continue
        num = _number(value, f"params.{key}")
        if key in _RANGE_CHECKS and not _RANGE_CHECKS[key][0] <= num <= _RANGE_CHECKS[key][1]:
            raise ConfigError("loss out of range [0, 1]", key=f"params.{key}")
        if key.startswith(("gamma", "kappa")) and num < 0:
            raise ConfigError("rate must be nonnegative", key=f"params.{key}")
        params[key] = num

    g = _section(raw, "grid", {"start_hz", "stop_hz", "points"})
    grid = GridSpec(
        _number(g.get("start_hz", 0.0), "grid.start_hz"),
        _number(g.get("stop_hz", 20e6), "grid.stop_hz"),
        _number(g.get("points", 1024), "grid.points", int),
    )
    if grid.points < 2 or grid.stop_hz <= grid.start_hz:
        raise ConfigError("need points >= 2 and stop_hz > start_hz", key="grid")

    s = _section(raw, "scan", {"start", "stop", "points"})
    scan = None
    if s:
        try:
            scan = ScanSpec(_number(s["start"], "scan.start"), _number(s["stop"], "scan.stop"),
                            _number(s["points"], "scan.points", int))
        except KeyError as exc:
            raise ConfigError("scan needs start, stop and points", key=f"scan.{exc.args[0]}") from None
        if scan.points < 2:
            raise ConfigError("need points >= 2", key="scan.points")

    port = _number(raw.get("port", HOMODYNE_PORT), "port", int)
    if not 0 <= port < N_PORTS:
        raise ConfigError(f"port must be in [0, {N_PORTS})", key="port")

    olc = raw.get("open_loop_comparison")
    if olc is not None and not isinstance(olc, bool):
        raise ConfigError("expected true/false", key="open_loop_comparison")

    o = _section(raw, "output", {"path", "format"})
    output = OutputSpec(o.get("path"), o.get("format", "csv"))
    if output.format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}", key="output.format")

    eps = raw.get("emit_plot_script", False)
    if not isinstance(eps, bool):
        raise ConfigError("expected true/false", key="emit_plot_script")

    cfg = ExperimentConfig(preset, params, grid, scan, port, olc, output, eps)
    cfg.resolved_params()  # surface domain errors at parse time
    return cfg


def serialize_config(cfg: ExperimentConfig) -> str:
    doc = {"preset": cfg.preset}
    if cfg.params:
        params = {}
        for k, v in cfg.params.items():
            params[k] = [[c.real, c.imag] for c in v] if k == "input_amplitudes" else v
        doc["params"] = params
    doc["grid"] = dataclasses.asdict(cfg.grid)
    if cfg.scan is not None:
        doc["scan"] = dataclasses.asdict(cfg.scan)
    doc["port"] = cfg.port
    if cfg.open_loop_comparison is not None:
        doc["open_loop_comparison"] = cfg.open_loop_comparison
    doc["output"] = {k: v for k, v in dataclasses.asdict(cfg.output).items() if v is not None}
    doc["emit_plot_script"] = cfg.emit_plot_script
    return yaml.safe_dump(doc, sort_keys=False)


# ---------------------------------------------------------------------------
# running


@dataclass
class ExperimentResult:
    preset: str
    params: NetworkParams
    curves: dict = field(default_factory=dict)          # name -> (freq_hz, P)
    phase_scan: PhaseScanResult | None = None
    stability_scan: dict | None = None
    metadata: dict = field(default_factory=dict)


def _spectrum(p: NetworkParams, port: int, freqs: np.ndarray, pump_sign: float):
    q = p.replace(x=pump_sign * p.x, y=pump_sign * p.y)
    return squeezing_spectrum(to_abcd(build_network(q)), port, q.theta, freqs).values


def spectrum_curves(p: NetworkParams, port: int, freqs: np.ndarray, open_loop: bool) -> dict:
    """Squeeze / anti-squeeze / vacuum curves (plus open-loop pair) at the homodyne angle ``p.theta``."""
    curves = {
        "squeeze": _spectrum(p, port, freqs, -1.0),
        "antisqueeze": _spectrum(p, port, freqs, +1.0),
        "vacuum": _spectrum(p.replace(x=0.0, y=0.0), port, freqs, 1.0),
    }
    if open_loop:
        ol = p.replace(**OPEN_LOOP)
        curves["openloop_squeeze"] = _spectrum(ol, port, freqs, -1.0)
        curves["openloop_antisqueeze"] = _spectrum(ol, port, freqs, +1.0)
    return curves


def run_stability_scan(p: NetworkParams, xs: np.ndarray, tol: float = 1e-9) -> dict:
    def system_at(x):
        return to_abcd(build_network(p.replace(x=float(x))))

    max_re = np.array([stability(system_at(x)).max_real_part for x in xs])
    hurwitz = max_re < 0
    threshold = None
    if hurwitz[0] and not hurwitz.all():
        k = int(np.argmin(hurwitz))
        threshold = instability_threshold(system_at, float(xs[k - 1]), float(xs[k]), tol)
    return {"x": xs, "max_real_part": max_re, "is_hurwitz": hurwitz, "threshold": threshold}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.resolved_params()
    result = ExperimentResult(cfg.preset, p)
    try:
        if cfg.preset in ("phase_scan", "detuned_controller"):
            scan = cfg.resolved_scan()
            result.phase_scan = phase_scan(p, scan.values(), port=L2_TAP_PORT)
            if cfg.preset == "detuned_controller" and "phi" not in cfg.params:
                p = p.replace(phi=result.phase_scan.phi_min)
                result.params = p
        if cfg.preset == "stability_scan":
            result.stability_scan = run_stability_scan(p, cfg.resolved_scan().values())
        if cfg.preset in SPECTRUM_PRESETS:
            result.curves = spectrum_curves(p, cfg.port, cfg.grid.frequencies(), cfg.wants_open_loop)
    except NetSimError as exc:
        raise ExperimentError(f"{cfg.preset}: {exc}") from exc
    result.metadata = {
        "tool": "slh_netsim",
        "version": __version__,
        "preset": cfg.preset,
        "port": cfg.port,
        "grid": dataclasses.asdict(cfg.grid),
        "params": _params_dict(p),
    }
    if cfg.resolved_scan() is not None:
        result.metadata["scan"] = dataclasses.asdict(cfg.resolved_scan())
    return result


# ---------------------------------------------------------------------------
# serialization


def _fmt(v) -> str:
    return f"{float(v):.12g}"


def _num(v):
    return float(_fmt(v))


def _params_dict(p: NetworkParams) -> dict:
    d = dataclasses.asdict(p)
    d["input_amplitudes"] = [[_num(c.real), _num(c.imag)] for c in p.input_amplitudes]
    return {k: (_num(v) if isinstance(v, float) else v) for k, v in d.items()}


def to_csv(result: ExperimentResult) -> str:
    """Main table: spectra for spectrum presets, otherwise the scan."""
    buf = io.StringIO()
    if result.curves:
        buf.write("freq_hz,P,P_db,curve\n")
        for name, values in result.curves.items():
            freqs = np.linspace(result.metadata["grid"]["start_hz"], result.metadata["grid"]["stop_hz"],
                                result.metadata["grid"]["points"])
            for f, v in zip(freqs, values):
                buf.write(f"{_fmt(f)},{_fmt(v)},{_fmt(10 * math.log10(v))},{name}\n")
    elif result.phase_scan is not None:
        buf.write(phase_scan_csv(result.phase_scan))
    elif result.stability_scan is not None:
        buf.write(stability_scan_csv(result.stability_scan))
    return buf.getvalue()


def phase_scan_csv(scan: PhaseScanResult) -> str:
    lines = ["phi_rad,power,stable,curve"]
    for phi, pw, st in zip(scan.phis, scan.power, scan.stable):
        lines.append(f"{_fmt(phi)},{_fmt(pw) if st else 'nan'},{int(st)},phase_scan")
    return "\n".join(lines) + "\n"


def stability_scan_csv(scan: dict) -> str:
    lines = ["x,max_real_part,is_hurwitz,curve"]
    for x, mr, h in zip(scan["x"], scan["max_real_part"], scan["is_hurwitz"]):
        lines.append(f"{_fmt(x)},{_fmt(mr)},{int(h)},stability_scan")
    return "\n".join(lines) + "\n"


def to_json(result: ExperimentResult) -> str:
    doc = {"metadata": result.metadata}
    if result.curves:
        freqs = np.linspace(result.metadata["grid"]["start_hz"], result.metadata["grid"]["stop_hz"],
                            result.metadata["grid"]["points"])
        doc["freq_hz"] = [_num(f) for f in freqs]
        doc["curves"] = {
            name: {"P": [_num(v) for v in vals], "P_db": [_num(10 * math.log10(v)) for v in vals]}
            for name, vals in result.curves.items()
        }
    if result.phase_scan is not None:
        s = result.phase_scan
        doc["phase_scan"] = {
            "phi_rad": [_num(v) for v in s.phis],
            "power": [_num(v) if st else None for v, st in zip(s.power, s.stable)],
            "stable": [bool(v) for v in s.stable],
            "phi_min": _num(s.phi_min),
            "port": s.port,
            "seed_port": s.seed_port,
        }
    if result.stability_scan is not None:
        s = result.stability_scan
        doc["stability_scan"] = {
            "x": [_num(v) for v in s["x"]],
            "max_real_part": [_num(v) for v in s["max_real_part"]],
            "is_hurwitz": [bool(v) for v in s["is_hurwitz"]],
            "threshold": None if s["threshold"] is None else _num(s["threshold"]),
        }
    return json.dumps(doc, indent=1) + "\n"


PLOT_TEMPLATE = '''\
"""Plot {data_name} (generated by slh_netsim)."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: ([], []))
with open({data_name!r}) as fh:
    reader = csv.reader(fh)
    header = next(reader)
    for row in reader:
        xs, ys = curves[row[-1]]
        xs.append(float(row[0]))
        ys.append(float(row[{ycol}]))

fig, ax = plt.subplots()
for name, (xs, ys) in curves.items():
    ax.plot({xscale}, ys, label=name)
ax.set_xlabel({xlabel!r})
ax.set_ylabel(header[{ycol}])
ax.legend()
fig.savefig({png_name!r}, dpi=150)
'''


def plot_script(result: ExperimentResult, data_name: str) -> str:
    if result.curves:
        kw = dict(ycol=2, xscale="[x / 1e6 for x in xs]", xlabel="frequency (MHz)")
    elif result.phase_scan is not None:
        kw = dict(ycol=1, xscale="xs", xlabel="feedback phase (rad)")
    else:
        kw = dict(ycol=1, xscale="xs", xlabel="pump parameter x")
    return PLOT_TEMPLATE.format(data_name=data_name, png_name=Path(data_name).stem + ".png", **kw)


def default_output_path(cfg: ExperimentConfig) -> Path | None:
    if cfg.output.path:
        return Path(cfg.output.path)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / f"{cfg.preset}.{cfg.output.format}"
    return None


def write_outputs(result: ExperimentResult, cfg: ExperimentConfig, path: Path | None):
    """Write the main result (stdout if ``path`` is None); returns the written paths."""
    text = to_json(result) if cfg.output.format == "json" else to_csv(result)
    written = []
    if path is None:
        print(text, end="")
        return written
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    written.append(path)
    if cfg.output.format == "csv" and result.curves and result.phase_scan is not None:
        extra = path.with_name(path.stem + "_phase_scan.csv")
        extra.write_text(phase_scan_csv(result.phase_scan))
        written.append(extra)
    if cfg.emit_plot_script and cfg.output.format == "csv":
        script = path.with_name(path.stem + "_plot.py")
        script.write_text(plot_script(result, path.name))
        written.append(script)
    return written
