"""Experiment configuration files.

Grammar: ``[section]`` headers, ``key = value`` lines, ``#`` comments.  No
nesting; lists are comma separated.  Every key is checked against the
schema below before anything is computed, and unknown keys are rejected.

Example::

    [experiment]
    name = strichartz

    [grid]
    L = 20
    N = 1024

    [initial]
    kind = gaussian
    amplitude = 1.0
    width = 0.5
"""
from __future__ import annotations

import configparser
import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .grid import SpatialGrid, StateField

EXPERIMENTS = ("linear_verify", "strichartz", "decay_scaling", "evolve",
               "blowup_compare", "homogenize", "stopping")


class ConfigError(ValueError):
    pass


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _opt_float(s: str) -> Optional[float]:
    return None if s.strip().lower() in ("", "none") else float(s)


def _str(s: str) -> str:
    return s.strip()


SCHEMA: dict[str, dict[str, Any]] = {
    "experiment": {"name": _str},
    "grid": {"L": float, "N": int},
    "time": {"T": float, "dt": float, "steps": int, "T_list": _floats},
    "initial": {"kind": _str, "amplitude": float, "width": float, "center": float, "k": int},
    "ensemble": {"n_paths": int, "seed": int, "batch_size": int, "pilot_paths": int,
                 "threads": int},
    "dispersion": {"source": _str, "rate": float, "halved": _bool, "driver": _str,
                   "relax": float, "var": float, "eps": _floats},
    "evolution": {"nonlinearity": _str, "splitting": _str, "cutoff_R": _opt_float,
                  "cutoff_M": _opt_float, "dealias": _str, "blowup_factor": float,
                  "blowup_band": float, "save_stride": int, "snapshots": _bool},
    "checks": {"deltas": _floats, "closed_form_deltas": _floats, "n_random": int,
               "R_factors": _floats, "R_pilot_fraction": float},
    "output": {"dir": _str},
}

_COMMON = {
    "grid": {"L": 10.0, "N": 1024},
    "time": {"T": 1.0, "dt": 1e-3},
    "initial": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0, "center": 0.0, "k": 1},
    "ensemble": {"n_paths": 1, "seed": 12345, "batch_size": 250},
    "dispersion": {"source": "brownian", "rate": 1.0, "halved": False, "driver": "ou",
                   "relax": 1.0, "var": 0.5},
    "evolution": {"nonlinearity": "quintic", "splitting": "strang", "cutoff_R": None,
                  "cutoff_M": None, "dealias": "monitor", "blowup_factor": 25.0,
                  "blowup_band": 1e-4, "save_stride": 0, "snapshots": False},
    "checks": {},
    "output": {"dir": "results"},
}

#: per-experiment defaults; these are the sizes used by the acceptance suite
DEFAULTS: dict[str, dict[str, dict]] = {
    "linear_verify": {
        "grid": {"L": 15.0, "N": 2048},
        "checks": {"deltas": [0.1, 0.5, 1.0], "closed_form_deltas": [0.1, 0.25, 0.5],
                   "n_random": 100},
    },
    "strichartz": {
        "grid": {"L": 20.0, "N": 1024},
        "time": {"T": 0.5, "steps": 200, "T_list": [0.25, 0.5, 1.0]},
        "initial": {"width": 0.5},
        "ensemble": {"n_paths": 2000},
    },
    "decay_scaling": {
        "grid": {"L": 20.0, "N": 2048},
        "time": {"steps": 128, "T_list": [2.0**-8, 2.0**-6, 2.0**-4, 2.0**-2]},
        "initial": {"width": 0.25},
        "ensemble": {"n_paths": 2000},
    },
    "evolve": {
        "grid": {"L": 10.0, "N": 1024},
        "time": {"T": 1.0, "dt": 1e-4},
        "initial": {"amplitude": 0.8},
    },
    "blowup_compare": {
        "grid": {"L": 8.0, "N": 512},
        "time": {"T": 0.5, "dt": 1e-4},
        "initial": {"amplitude": 2.0},
        "ensemble": {"n_paths": 500},
    },
    "homogenize": {
        "grid": {"L": 8.0, "N": 512},
        "time": {"T": 0.2, "dt": 1e-4},
        "initial": {"amplitude": 2.0},
        "ensemble": {"n_paths": 1000},
        "dispersion": {"eps": [0.4, 0.2, 0.1]},
    },
    "stopping": {
        "grid": {"L": 10.0, "N": 256},
        "time": {"T": 0.25, "dt": 1e-3},
        "initial": {"width": 0.5},
        "ensemble": {"n_paths": 1000, "pilot_paths": 200},
        "checks": {"R_factors": [1.0, 2.0, 4.0], "R_pilot_fraction": 0.5},
    },
}


@dataclass
class ExperimentConfig:
    name: str
    sections: dict = field(default_factory=dict)
    source: Optional[str] = None

    def __getitem__(self, section: str) -> dict:
        return self.sections[section]

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value) -> "ExperimentConfig":
        out = copy.deepcopy(self)
        out.sections.setdefault(section, {})[key] = value
        return out

    def to_dict(self) -> dict:
        return {"name": self.name, **copy.deepcopy(self.sections)}

    @property
    def grid(self) -> SpatialGrid:
        from .grid import make_grid
        return make_grid(self["grid"]["L"], self["grid"]["N"])

    def initial_field(self, grid: Optional[SpatialGrid] = None) -> StateField:
        return initial_condition(grid or self.grid, self["initial"])


def initial_condition(grid: SpatialGrid, spec: dict) -> StateField:
    kind = spec.get("kind", "gaussian")
    A = spec.get("amplitude", 1.0)
    w = spec.get("width", 1.0)
    c = spec.get("center", 0.0)
    x = grid.x
    if kind == "gaussian":
        v = A * np.exp(-(((x - c) / w) ** 2))
    elif kind == "soliton_like":
        # profile of the quintic ground state, sech(x / w)^(1/2)
        v = A / np.sqrt(np.cosh((x - c) / w))
    elif kind == "mode":
        v = A * grid.mode(int(spec.get("k", 1)))
    else:
        raise ConfigError(f"unknown initial condition kind {kind!r}")
    return StateField(grid, v.astype(complex))


def _defaults(name: str) -> dict:
    out = copy.deepcopy(_COMMON)
    for sec, vals in DEFAULTS[name].items():
        out.setdefault(sec, {}).update(copy.deepcopy(vals))
    return out


def default_config(name: str) -> ExperimentConfig:
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}")
    cfg = ExperimentConfig(name, _defaults(name))
    validate(cfg)
    return cfg


def parse_config(text: str, name: Optional[str] = None, source: Optional[str] = None
                 ) -> ExperimentConfig:
    """Parse config text; ``name`` (the subcommand) wins over ``[experiment] name``."""
    cp = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                   interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    file_name = cp.get("experiment", "name", fallback=None)
    if name and file_name and file_name.replace("-", "_") != name:
        raise ConfigError(f"config is for experiment {file_name!r}, not {name!r}")
    name = (name or file_name or "").replace("-", "_")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    sections = _defaults(name)
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            if sec == "experiment":
                continue
            try:
                sections.setdefault(sec, {})[key] = SCHEMA[sec][key](raw)
            except ValueError as exc:
                raise ConfigError(f"[{sec}] {key} = {raw!r}: {exc}") from exc
    cfg = ExperimentConfig(name, sections, source)
    validate(cfg)
    return cfg


def load_config(path: str | Path, name: Optional[str] = None) -> ExperimentConfig:
    p = Path(path)
    return parse_config(p.read_text(), name, str(p))


def validate(cfg: ExperimentConfig) -> None:
    """Check value ranges; raises :class:`ConfigError`."""
    from .grid import make_grid
    try:
        make_grid(cfg["grid"]["L"], cfg["grid"]["N"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t = cfg["time"]
    if t.get("T", 1.0) <= 0 or t.get("dt", 1.0) <= 0:
        raise ConfigError("T and dt must be positive")
    if "steps" in t and t["steps"] < 1:
        raise ConfigError("steps must be >= 1")
    if any(v <= 0 for v in t.get("T_list", [])):
        raise ConfigError("T_list entries must be positive")
    if cfg["initial"]["kind"] not in ("gaussian", "soliton_like", "mode"):
        raise ConfigError(f"unknown initial condition kind {cfg['initial']['kind']!r}")
    if cfg["initial"]["width"] <= 0:
        raise ConfigError("initial width must be positive")
    e = cfg["ensemble"]
    if e["n_paths"] < 1 or e.get("batch_size", 1) < 1:
        raise ConfigError("n_paths and batch_size must be >= 1")
    d = cfg["dispersion"]
    if d["source"] not in ("brownian", "deterministic", "integrated_stationary"):
        raise ConfigError(f"unknown dispersion source {d['source']!r}")
    if d["driver"] not in ("ou", "telegraph"):
        raise ConfigError(f"unknown driver {d['driver']!r}")
    if d["relax"] <= 0 or d["var"] < 0 or any(v <= 0 for v in d.get("eps", [])):
        raise ConfigError("driver needs relax > 0, var >= 0, eps > 0")
    ev = cfg["evolution"]
    if ev["nonlinearity"] not in ("quintic", "off"):
        raise ConfigError(f"unknown nonlinearity {ev['nonlinearity']!r}")
    if ev["splitting"] not in ("strang", "lie"):
        raise ConfigError(f"unknown splitting {ev['splitting']!r}")
    if ev["dealias"] not in ("monitor", "truncate"):
        raise ConfigError(f"unknown dealias mode {ev['dealias']!r}")
    if ev["cutoff_R"] is not None and ev["cutoff_M"] is not None:
        raise ConfigError("at most one of cutoff_R and cutoff_M may be set")
    if cfg.name == "homogenize" and len(d.get("eps", [])) < 3:
        raise ConfigError("homogenize needs at least three eps values")
    if cfg.name in ("strichartz", "decay_scaling", "blowup_compare", "homogenize", "stopping") \
            and e["n_paths"] < 2:
        raise ConfigError(f"{cfg.name} needs n_paths >= 2")
