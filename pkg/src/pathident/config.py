"""Experiment configuration: JSON load/validate/dump.

A config mirrors the parameter types::

    {
      "state":  {"i_h": 0.5, "coh": 1.0, "phi": 0.0},
      "setup":  {"b1": 0.7071, "b2": [0.0, 0.7071], "t_h": 1.0, "t_v": 1.0,
                 "theta": 0.7854, "xi": [0, 0, 0, 0],
                 "phi_alpha": 0.0, "phi_beta": 0.0},
      "scan":   {"n_phases": 256, "span": 12.566},
      "mc":     {"exposure": 1e5, "seed": 0, "replications": 200, "setting": "D"},
      "output": {"format": "csv", "path": "out"}
    }

Complex amplitudes are a number or a ``[re, im]`` pair. Omitted ``xi``
defaults to the phase-consistent choice for the state's ``phi``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .detect import DEFAULT_N_PHASES, DEFAULT_SPAN, AnalyzerSetting, scan_phases
from .entmeas import MixedStateParams
from .interf import SetupParams, coherent_two_source_rho, consistent_xi


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScanConfig:
    n_phases: int = DEFAULT_N_PHASES
    span: float = DEFAULT_SPAN

    def phases(self):
        return scan_phases(self.n_phases, self.span)


@dataclass(frozen=True)
class MCConfig:
    exposure: float = 1e5
    seed: int = 0
    replications: int = 200
    setting: str = "D"


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    state: MixedStateParams
    setup: SetupParams = field(default_factory=SetupParams)
    scan: ScanConfig = field(default_factory=ScanConfig)
    mc: MCConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        s = self.setup
        d = {
            "state": {"i_h": self.state.i_h, "coh": self.state.coh, "phi": self.state.phi},
            "setup": {
                "b1": [s.b1.real, s.b1.imag], "b2": [s.b2.real, s.b2.imag],
                "t_h": s.t_h, "t_v": s.t_v, "theta": s.theta, "xi": list(s.xi),
                "phi_alpha": s.phi_alpha, "phi_beta": s.phi_beta,
            },
            "scan": {"n_phases": self.scan.n_phases, "span": self.scan.span},
            "output": {"format": self.output.format, "path": self.output.path},
        }
        if self.mc is not None:
            d["mc"] = {"exposure": self.mc.exposure, "seed": self.mc.seed,
                       "replications": self.mc.replications, "setting": self.mc.setting}
        return d


_KNOWN = {
    "state": {"i_h", "coh", "phi"},
    "setup": {"b1", "b2", "t_h", "t_v", "theta", "xi", "phi_alpha", "phi_beta"},
    "scan": {"n_phases", "span"},
    "mc": {"exposure", "seed", "replications", "setting"},
    "output": {"format", "path"},
}


def _number(sec: dict, key: str, where: str, default=None, kind=float):
    if key not in sec:
        if default is None:
            raise ConfigError(f"{where}.{key}: required")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    if kind is int:
        if float(v) != int(v):
            raise ConfigError(f"{where}.{key}: expected an integer, got {v!r}")
        return int(v)
    if not math.isfinite(v):
        raise ConfigError(f"{where}.{key}: must be finite")
    return float(v)


def _complex(sec: dict, key: str, where: str, default: complex) -> complex:
    if key not in sec:
        return default
    v = sec[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        return complex(v[0], v[1])
    raise ConfigError(f"{where}.{key}: expected a number or [re, im], got {v!r}")


def from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    for key, sec in d.items():
        if key not in _KNOWN:
            raise ConfigError(f"{key}: unknown section")
        if sec is not None and not isinstance(sec, dict):
            raise ConfigError(f"{key}: expected an object")
        unknown = set(sec or {}) - _KNOWN[key]
        if unknown:
            raise ConfigError(f"{key}: unknown keys {sorted(unknown)}")
    if "state" not in d:
        raise ConfigError("state: required section")

    st = d["state"]
    try:
        state = MixedStateParams(_number(st, "i_h", "state"), _number(st, "coh", "state"),
                                 _number(st, "phi", "state", 0.0))
    except ValueError as e:
        raise ConfigError(f"state: {e}") from None

    su = d.get("setup") or {}
    ideal = 1 / math.sqrt(2)
    xi = su.get("xi")
    if xi is None:
        xi = consistent_xi(state.phi)
    elif not (isinstance(xi, list) and len(xi) == 4
              and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in xi)):
        raise ConfigError(f"setup.xi: expected four numbers (HH, VV, HV, VH), got {xi!r}")
    try:
        setup = SetupParams(
            b1=_complex(su, "b1", "setup", ideal), b2=_complex(su, "b2", "setup", ideal),
            t_h=_number(su, "t_h", "setup", 1.0), t_v=_number(su, "t_v", "setup", 1.0),
            theta=_number(su, "theta", "setup", math.pi / 4), xi=tuple(xi),
            phi_alpha=_number(su, "phi_alpha", "setup", 0.0),
            phi_beta=_number(su, "phi_beta", "setup", 0.0))
    except ValueError as e:
        raise ConfigError(f"setup: {e}") from None
    try:
        coherent_two_source_rho(state, setup)
    except ValueError as e:
        raise ConfigError(f"setup.xi: {e}") from None

    sc = d.get("scan") or {}
    scan = ScanConfig(_number(sc, "n_phases", "scan", DEFAULT_N_PHASES, int),
                      _number(sc, "span", "scan", DEFAULT_SPAN))
    if scan.n_phases < 64:
        raise ConfigError("scan.n_phases: need at least 64 samples")
    if scan.span < 2 * math.pi - 1e-12:
        raise ConfigError("scan.span: must cover at least 2*pi")

    mc = None
    if d.get("mc") is not None:
        m = d["mc"]
        mc = MCConfig(_number(m, "exposure", "mc", 1e5), _number(m, "seed", "mc", 0, int),
                      _number(m, "replications", "mc", 200, int), m.get("setting", "D"))
        if not mc.exposure > 0:
            raise ConfigError("mc.exposure: must be positive")
        if mc.replications < 1:
            raise ConfigError("mc.replications: must be at least 1")
        if mc.setting not in {x.value for x in AnalyzerSetting}:
            raise ConfigError(f"mc.setting: unknown analyser setting {mc.setting!r}")

    out = d.get("output") or {}
    output = OutputConfig(out.get("format", "csv"), out.get("path"))
    if output.format not in ("csv", "json"):
        raise ConfigError(f"output.format: expected csv or json, got {output.format!r}")
    return ExperimentConfig(state, setup, scan, mc, output)


def loads(text: str) -> ExperimentConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return from_dict(d)


def load(path) -> ExperimentConfig:
    return loads(Path(path).read_text())


def dumps(cfg: ExperimentConfig) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(cfg.to_dict(), indent=2)
