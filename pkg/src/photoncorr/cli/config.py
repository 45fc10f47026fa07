"""Scenario configuration: schema, loading and validation.

A config is a TOML (or JSON) document with one required key, ``scenario``, and
the sections listed in :data:`SCHEMA`. Unknown keys are rejected so that typos
cannot silently fall back to defaults.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCENARIOS = ("steady-g2", "pulsed-g2", "filter-map", "filter-compare", "chain-g2", "validate")


class ConfigError(Exception):
    """Invalid configuration; ``field`` is the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass(frozen=True)
class Field:
    type: str  # "float", "int", "bool", "str", "float-list"
    default: Any = None
    choices: Optional[Tuple[str, ...]] = None
    doc: str = ""


SCHEMA: Dict[str, Dict[str, Field]] = {
    "": {
        "scenario": Field("str", None, SCENARIOS, "experiment to run (required)"),
        "description": Field("str", "", doc="free text, echoed to the summary"),
        "threads": Field("int", 0, doc="worker threads over sweep points; 0 = one per CPU"),
    },
    "params": {
        "beta_r": Field("float", 1.0, doc="branching ratio into the right-going mode"),
        "beta_l": Field("float", None, doc="left-going ratio; default min(beta_r, 1 - beta_r)"),
        "beta_s": Field("float", None, doc="side-loss ratio; default 1 - beta_r - beta_l"),
        "delta": Field("float", 0.0, doc="drive detuning in units of the decay rate"),
    },
    "chain": {
        "n": Field("int", 5, doc="number of emitters (chain-g2)"),
        "spacing_phase": Field("float", math.pi, doc="k0 times the emitter spacing, radians"),
        "phases": Field("float-list", None, doc="explicit k0 z_j per emitter; overrides n and spacing_phase"),
    },
    "drive": {
        "kind": Field("str", "constant", ("constant", "gaussian-pulse"), "drive envelope"),
        "amplitude": Field("float", None,
                           doc="CW field amplitude in units of sqrt(decay rate); "
                               "default 0.01, or 5e-4 for chain-g2"),
        "phase": Field("float", 0.0, doc="CW field phase, radians"),
        "sigma": Field("float", 0.1, doc="pulse width, standard deviation of Omega^2 times the decay rate"),
        "area": Field("float", math.pi, doc="pulse area"),
        "center": Field("float", 0.0, doc="pulse centre"),
        "geometry": Field("str", None, ("waveguide", "side"),
                          "default: waveguide for CW, side for pulses"),
    },
    "grid": {
        "n_steps": Field("int", 2000, doc="RK4 steps"),
        "zeta_start": Field("float", None, doc="default 0 for CW; pulses start 6 widths before the centre"),
        "zeta_end": Field("float", None, doc="default 26 for CW; pulses end tail lifetimes after it"),
        "tail": Field("float", 12.0, doc="lifetimes kept after a pulse when zeta_end is unset"),
    },
    "filter": {
        "kind": Field("str", "lorentzian", ("lorentzian", "gaussian", "tabulated"), "filter shape"),
        "kappa": Field("float", 1.0, doc="filter bandwidth in units of the decay rate"),
        "omega_c": Field("float", 0.0, doc="filter centre relative to the emitter line"),
        "table": Field("str", None, doc="path of an (omega, Re T, Im T) table for kind = tabulated"),
        "n_pad": Field("int", None, doc="padded transform length; default from kappa and the grid"),
    },
    "correlation": {
        "order": Field("str", "leading", ("leading", "full"), "expansion order of G1 and G2"),
        "cg_substitution": Field("bool", True, doc="weight the bare coherent term by c_g(zeta_T)"),
        "branch_fraction": Field("float", 0.4, doc="steady-state branch node as a fraction of the grid"),
        "steady_tol": Field("float", 1e-2, doc="allowed relative drift of |c_e| over the last tenth"),
        "start": Field("str", "ground", ("ground", "steady"),
                       "emitter state at the grid start; steady removes the turn-on transient "
                       "(single emitter only)"),
    },
    "output": {
        "dir": Field("str", "results", doc="output directory (--out overrides)"),
        "grid_bin": Field("bool", False, doc="also write the two-photon amplitude to grid.bin"),
    },
}
# [sweep] maps dotted parameter names to value lists; the Cartesian product is run


def schema_document() -> Dict[str, Any]:
    """JSON-serializable description of the config format."""
    doc: Dict[str, Any] = {}
    for section, fields in SCHEMA.items():
        entries = {k: {"type": f.type, "default": f.default, "doc": f.doc,
                       **({"choices": list(f.choices)} if f.choices else {})}
                   for k, f in fields.items()}
        if section:
            doc[section] = entries
        else:
            doc.update(entries)
    doc["sweep"] = {
        "<section.key>": {"type": "float-list",
                          "doc": "values for a numeric parameter, e.g. \"drive.sigma\" = [0.1, 0.2]; "
                                 "several entries form a Cartesian product in the order given"}}
    return doc


def _coerce(path: str, f: Field, value):
    if value is None:
        return None
    t = f.type
    if t == "bool":
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true or false, got {value!r}")
        return value
    if t == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if t == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(path, f"must be finite, got {value!r}")
        return float(value)
    if t == "str":
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        if f.choices and value not in f.choices:
            raise ConfigError(path, f"must be one of {', '.join(f.choices)}; got {value!r}")
        return value
    if t == "float-list":
        if not isinstance(value, list):
            raise ConfigError(path, f"expected a list of numbers, got {value!r}")
        if not value:
            raise ConfigError(path, "list is empty")
        return [_coerce(f"{path}[{i}]", Field("float"), v) for i, v in enumerate(value)]
    raise AssertionError(t)


def _field(dotted: str) -> Field:
    section, _, key = dotted.rpartition(".")
    try:
        return SCHEMA[section][key]
    except KeyError:
        raise KeyError(dotted) from None


def resolve(raw: Dict[str, Any]) -> Dict[str, Any]:
    """Validate ``raw`` and fill defaults; the result is the canonical config.

    Raises:
        ConfigError: naming the first offending field.
    """
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a table")
    out: Dict[str, Any] = {}
    for key, value in raw.items():
        if key in SCHEMA or key == "sweep":
            if not isinstance(value, dict):
                raise ConfigError(key, "expected a section")
        elif key not in SCHEMA[""]:
            raise ConfigError(key, "unknown key")
    for key, f in SCHEMA[""].items():
        out[key] = _coerce(key, f, raw.get(key, f.default))
    if out["scenario"] is None:
        raise ConfigError("scenario", f"required; one of {', '.join(SCENARIOS)}")
    if out["threads"] < 0:
        raise ConfigError("threads", "must be >= 0")
    for section, fields in SCHEMA.items():
        if not section:
            continue
        given = raw.get(section, {})
        for key in given:
            if key not in fields:
                raise ConfigError(f"{section}.{key}", "unknown key")
        out[section] = {k: _coerce(f"{section}.{k}", f, given.get(k, f.default))
                        for k, f in fields.items()}
    out["sweep"] = {}
    for key, values in raw.get("sweep", {}).items():
        path = f"sweep.{key}"
        try:
            f = _field(key)
        except KeyError:
            raise ConfigError(path, "names no known parameter") from None
        if f.type not in ("float", "int"):
            raise ConfigError(path, f"parameter {key} is not numeric and cannot be swept")
        if not isinstance(values, list):
            raise ConfigError(path, "expected a list of values")
        if not values:
            raise ConfigError(path, "sweep values list is empty")
        out["sweep"][key] = [_coerce(f"{path}[{i}]", f, v) for i, v in enumerate(values)]
    _check_ranges(out)
    return out


def _check_ranges(cfg: Dict[str, Any]) -> None:
    g = cfg["grid"]
    if g["n_steps"] < 2:
        raise ConfigError("grid.n_steps", "must be >= 2")
    f = cfg["filter"]
    if f["kind"] == "tabulated" and f["table"] is None:
        raise ConfigError("filter.table", "required when filter.kind = tabulated")
    if f["n_pad"] is not None and f["n_pad"] < 2:
        raise ConfigError("filter.n_pad", "must be >= 2")
    bf = cfg["correlation"]["branch_fraction"]
    if not 0.0 <= bf < 1.0:
        raise ConfigError("correlation.branch_fraction", "must lie in [0, 1)")
    if cfg["chain"]["n"] < 1:
        raise ConfigError("chain.n", "must be >= 1")
    scen = cfg["scenario"]
    if cfg["correlation"]["start"] == "steady" and scen != "steady-g2":
        raise ConfigError("correlation.start", "steady start is only available for steady-g2")
    if cfg["output"]["grid_bin"] and "grid.n_steps" in cfg["sweep"]:
        raise ConfigError("output.grid_bin", "needs a fixed grid.n_steps across the sweep")
    kind = cfg["drive"]["kind"]
    if scen in ("steady-g2", "chain-g2") and kind != "constant":
        raise ConfigError("drive.kind", f"{scen} needs a constant drive")
    if scen not in ("steady-g2", "chain-g2") and kind != "gaussian-pulse":
        raise ConfigError("drive.kind", f"{scen} needs a gaussian-pulse drive")
    if kind == "gaussian-pulse" and cfg["drive"]["geometry"] == "waveguide":
        raise ConfigError("drive.geometry", "pulsed scenarios need geometry = side "
                                            "(a waveguide pulse would reach the detector)")


def load(path) -> Dict[str, Any]:
    """Read and resolve a ``.toml`` or ``.json`` config file.

    JSON nulls mean "use the default", so a summary's config echo loads back.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        raw = _drop_nulls(raw)
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("", f"{path}: {exc}") from None
    return resolve(raw)


def _drop_nulls(obj):
    if isinstance(obj, dict):
        return {k: _drop_nulls(v) for k, v in obj.items() if v is not None}
    return obj


def sweep_points(cfg: Dict[str, Any]) -> List[Tuple[Dict[str, Any], Dict[str, Any]]]:
    """Expand the sweep into ``(overrides, config)`` pairs in row order."""
    axes = list(cfg["sweep"].items())
    if not axes:
        return [({}, cfg)]
    points = []
    for combo in product(*(values for _, values in axes)):
        point = copy.deepcopy(cfg)
        over = {}
        for (dotted, _), value in zip(axes, combo):
            section, _, key = dotted.rpartition(".")
            if section:
                point[section][key] = value
            else:
                point[key] = value
            over[dotted] = value
        points.append((over, point))
    return points
