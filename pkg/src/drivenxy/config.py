"""Plain-text run configuration.

The format is INI-like: flat ``[section]`` headers followed by
``key = value`` lines, ``#`` or ``;`` comments. Energies are in units of
``h0`` (``h0 = 1`` in every preset); dephasing rates are given in units of
``J = max(J0, J1)`` unless ``[noise] lambda_unit = h0``.

Runs integrate in the interaction picture by default (``[run] frame``).
Grids accept either ``start:stop:count`` (inclusive, evenly spaced) or a
comma-separated list. Exactly one of ``[sweep] omega_d`` and
``[sweep] lambda`` may be present.
"""

import configparser
import difflib
import math
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from .errors import ConfigError
from .model import DriveProtocol, NetworkSpec
from .propagate import NoiseSpec
from .router import RouterSpec, build_router_graph

__all__ = [
    "SCENARIOS",
    "SCHEMA",
    "SweepConfig",
    "parse_config",
    "load_preset",
    "list_presets",
    "parse_grid",
]

SCENARIOS = ("coupling-drive", "field-drive", "router", "resonance-table", "multipartite")
FORMATS = ("csv", "json", "svg")
# keeps the accumulated norm drift of a full N = 6 window below 1e-8
DEFAULT_NU = 200.0

# section -> key -> kind
SCHEMA = {
    "run": {"scenario": "str", "samples": "int", "nu": "float", "seed": "int", "workers": "int",
            "label": "str", "frame": "str"},
    "network": {"n_sites": "int", "gamma": "float", "epsilon": "floats", "gamma_source": "str"},
    "drive": {"h0": "float", "h1": "float", "J0": "float", "J1": "float", "omega_d": "float",
              "t_on": "float"},
    "noise": {"lambda": "float", "lambda_unit": "str"},
    "sweep": {"omega_d": "grid", "lambda": "grid"},
    "window": {"t_end": "str", "pair": "ints"},
    "router": {"trunk_length": "int", "arm_lengths": "ints", "arm_drive": "strs",
               "trunk_drive": "str", "init": "str", "alice_link": "float",
               "arm_field_offset": "floats"},
    "resonances": {"max_order": "int", "h1": "float"},
    "multipartite": {"amplitudes": "floats", "labels": "strs", "vacuum": "float"},
    "output": {"formats": "strs", "dir": "str"},
}

_DYNAMICS = ("coupling-drive", "field-drive")

_REQUIRED = {
    "coupling-drive": [("network", "n_sites"), ("network", "gamma"), ("drive", "h0"),
                       ("drive", "h1"), ("drive", "J0"), ("drive", "J1")],
    "field-drive": [("network", "n_sites"), ("network", "gamma"), ("drive", "h0"),
                    ("drive", "h1"), ("drive", "J0"), ("drive", "J1")],
    "router": [("router", "trunk_length"), ("router", "arm_lengths"), ("drive", "h0"),
               ("drive", "J0"), ("drive", "J1")],
    "resonance-table": [("drive", "h0"), ("resonances", "max_order")],
    "multipartite": [("multipartite", "amplitudes")],
}


def parse_grid(text):
    """``start:stop:count`` or a comma list, as a tuple of floats."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must read start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            return ()
        return tuple(float(v) for v in np.linspace(start, stop, count))
    return tuple(float(v) for v in text.split(","))


def _convert(kind, raw):
    raw = raw.strip()
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError(f"{raw!r} is not finite")
        return v
    if kind == "floats":
        return tuple(float(v) for v in raw.split(","))
    if kind == "ints":
        return tuple(int(v) for v in raw.split(","))
    if kind == "strs":
        return tuple(v.strip() for v in raw.split(",") if v.strip())
    if kind == "grid":
        return parse_grid(raw)
    raise AssertionError(kind)


@dataclass(frozen=True)
class SweepConfig:
    """Validated run configuration.

    ``grid`` is expressed in config units: energy for ``omega_d`` and
    multiples of ``lambda_unit`` for ``lambda``.
    """

    scenario: str
    network: NetworkSpec = None
    protocol: DriveProtocol = None
    noise: NoiseSpec = NoiseSpec()
    lambda_unit: str = "J"
    axis: str = None
    grid: tuple = ()
    t_end: float = None
    pair: tuple = None
    samples: int = 400
    nu: float = DEFAULT_NU
    frame: str = "interaction"
    workers: int = 1
    seed: int = 0
    formats: tuple = FORMATS
    out_dir: str = "results"
    router: RouterSpec = None
    resonances: dict = field(default_factory=dict)
    multipartite: dict = field(default_factory=dict)
    label: str = ""
    gamma_source: str = ""
    source: str = ""

    @property
    def lambda_scale(self):
        """Physical rate per unit of the configured ``lambda``."""
        if self.lambda_unit == "h0":
            return self.protocol.h0
        return max(self.protocol.J0, self.protocol.J1)

    def window(self):
        if self.t_end is not None:
            return self.t_end
        return self.protocol.window(self.network.n_sites)

    def site_pair(self):
        return self.pair if self.pair is not None else self.network.end_pair()

    def with_overrides(self, **changes):
        return replace(self, **changes)

    def echo(self):
        """Every physics-affecting parameter, as plain JSON-ready values."""
        out = {"scenario": self.scenario, "source": self.source, "label": self.label,
               "samples": self.samples, "nu": self.nu, "frame": self.frame, "seed": self.seed,
               "axis": self.axis, "grid": list(self.grid), "t_end": self.t_end}
        if self.network is not None:
            n = self.network
            out["network"] = {"n_sites": n.n_sites, "edges": [list(e) for e in n.edges],
                              "gamma": n.gamma, "gamma_source": self.gamma_source,
                              "epsilon": list(n.epsilon), "edge_scale": list(n.edge_scale),
                              "edge_driven": list(n.edge_driven),
                              "field_offset": list(n.field_offset), "ac_field": list(n.ac_field)}
            out["pair"] = list(self.site_pair())
        if self.protocol is not None:
            out["drive"] = dict(self.protocol.__dict__)
            out["noise"] = {"lambda": self.noise.rate, "lambda_unit": self.lambda_unit,
                            "lambda_scale": self.lambda_scale}
        if self.router is not None:
            r = self.router
            out["router"] = {"trunk_length": r.trunk_length, "arm_lengths": list(r.arm_lengths),
                             "arm_drive": list(r.arm_drive), "trunk_drive": r.trunk_drive,
                             "init": r.init, "alice_link": r.alice_link_scale,
                             "arm_field_offset": list(r.arm_field_offset)}
        if self.resonances:
            out["resonances"] = dict(self.resonances)
        if self.multipartite:
            out["multipartite"] = {k: list(v) if isinstance(v, tuple) else v
                                   for k, v in self.multipartite.items()}
        return out


def _suggest(word, options):
    match = difflib.get_close_matches(word, list(options), n=1, cutoff=0.5)
    return f"; did you mean {match[0]!r}?" if match else f"; valid keys: {', '.join(options)}"


def _read(text, errors):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        errors.append(f"syntax error: {exc}")
        return {}
    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            errors.append(f"unknown section [{section}]"
                          + _suggest(section, SCHEMA).replace("keys", "sections"))
            continue
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                errors.append(f"unknown key {key!r} in [{section}]" + _suggest(key, SCHEMA[section]))
                continue
            kind = SCHEMA[section][key]
            try:
                values[section, key] = _convert(kind, raw)
            except ValueError as exc:
                errors.append(f"[{section}] {key}: cannot parse {raw!r} as {kind} ({exc})")
    return values


def parse_config(text, source="", overrides=None):
    """Parse and validate a configuration.

    ``overrides`` maps ``"section.key"`` to raw strings and takes precedence
    over ``text``. All problems are collected and raised together as one
    :class:`ConfigError`.
    """
    errors = []
    values = _read(text, errors)
    for dotted, raw in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if section not in SCHEMA or key not in SCHEMA[section]:
            errors.append(f"unknown override {dotted!r}"
                          + _suggest(dotted, [f"{s}.{k}" for s in SCHEMA for k in SCHEMA[s]]))
            continue
        try:
            values[section, key] = _convert(SCHEMA[section][key], raw)
        except ValueError as exc:
            errors.append(f"override {dotted}: cannot parse {raw!r} ({exc})")

    def get(section, key, default=None):
        return values.get((section, key), default)

    scenario = get("run", "scenario")
    if scenario is None:
        if not any("[run] scenario" in e for e in errors):
            errors.append("missing required key 'scenario' in [run]")
        raise ConfigError(errors)
    if scenario not in SCENARIOS:
        errors.append(f"unknown scenario {scenario!r}" + _suggest(scenario, SCENARIOS))
        raise ConfigError(errors)

    missing = [(s, k) for s, k in _REQUIRED[scenario] if (s, k) not in values]
    if scenario in _DYNAMICS and ("drive", "omega_d") not in values \
            and ("sweep", "omega_d") not in values:
        missing.append(("drive", "omega_d"))
    for s, k in missing:
        errors.append(f"missing required key {k!r} in [{s}]")

    samples = get("run", "samples", 400)
    if samples < 2:
        errors.append(f"[run] samples must be at least 2, got {samples}")
    nu = get("run", "nu", DEFAULT_NU)
    if nu < 50:
        errors.append(f"[run] nu must be at least 50, got {nu}")
    frame = get("run", "frame", "interaction")
    if frame not in ("lab", "interaction"):
        errors.append(f"[run] frame must be 'lab' or 'interaction', got {frame!r}")
    workers = get("run", "workers", 1)
    if workers < 1:
        errors.append(f"[run] workers must be at least 1, got {workers}")
    formats = get("output", "formats", FORMATS)
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        errors.append(f"[output] formats: unknown format(s) {bad}; choose from {FORMATS}")
    if not formats:
        errors.append("[output] formats must name at least one format")

    # sweep axis
    axes = [k for k in ("omega_d", "lambda") if ("sweep", k) in values]
    axis, grid = None, ()
    if len(axes) > 1:
        errors.append("[sweep] defines two swept axes (omega_d and lambda); exactly one is allowed")
    elif axes:
        axis = axes[0]
        grid = get("sweep", axis)
        if not grid:
            errors.append(f"[sweep] {axis}: grid is empty")
        elif any(b <= a for a, b in zip(grid, grid[1:])):
            errors.append(f"[sweep] {axis}: grid must be strictly increasing")
        elif axis == "omega_d" and grid[0] <= 0:
            errors.append("[sweep] omega_d: frequencies must be positive")
        elif axis == "lambda" and grid[0] < 0:
            errors.append("[sweep] lambda: rates must be non-negative")

    lambda_unit = get("noise", "lambda_unit", "J")
    if lambda_unit not in ("J", "h0"):
        errors.append(f"[noise] lambda_unit must be 'J' or 'h0', got {lambda_unit!r}")
    if get("noise", "lambda", 0.0) < 0:
        errors.append("[noise] lambda must be non-negative")

    protocol = None
    if ("drive", "h0") in values and not missing:
        omega = get("drive", "omega_d", grid[0] if axis == "omega_d" and grid else 0.0)
        try:
            protocol = DriveProtocol(get("drive", "h0"), get("drive", "h1", 0.0),
                                     get("drive", "J0", 0.0), get("drive", "J1", 0.0),
                                     omega, get("drive", "t_on", 0.0))
        except ValueError as exc:
            errors.append(f"[drive] {exc}")

    if protocol is not None and scenario == "coupling-drive":
        if protocol.h1 != 0:
            errors.append("coupling-drive scenario requires h1 = 0")
        if protocol.J1 == 0:
            errors.append("coupling-drive scenario requires J1 != 0")
    if protocol is not None and scenario == "field-drive":
        if protocol.J1 != 0:
            errors.append("field-drive scenario requires J1 = 0")
        if protocol.h1 == 0:
            errors.append("field-drive scenario requires h1 != 0")

    t_end = get("window", "t_end", "auto")
    if t_end == "auto":
        t_end = None
        if protocol is not None and scenario in _DYNAMICS + ("router",) \
                and max(protocol.J0, protocol.J1) <= 0:
            errors.append("[window] t_end = auto needs max(J0, J1) > 0")
    else:
        try:
            t_end = float(t_end)
            if not t_end > 0:
                raise ValueError("must be positive")
        except ValueError as exc:
            errors.append(f"[window] t_end: expected 'auto' or a positive number ({exc})")
            t_end = None

    network = None
    if scenario in _DYNAMICS and not missing:
        n = get("network", "n_sites")
        try:
            network = NetworkSpec.chain(n, get("network", "gamma"), get("network", "epsilon"))
        except ValueError as exc:
            errors.append(f"[network] {exc}")
    pair = get("window", "pair")
    if pair is not None:
        if len(pair) != 2 or pair[0] == pair[1]:
            errors.append(f"[window] pair must name two distinct sites, got {pair}")
        elif network is not None and not all(0 <= s < network.n_sites for s in pair):
            errors.append(f"[window] pair {pair} outside 0..{network.n_sites - 1}")

    router = None
    if scenario == "router" and not missing:
        try:
            router = RouterSpec(get("router", "trunk_length"), get("router", "arm_lengths"),
                                get("router", "arm_drive"), get("router", "trunk_drive", "undriven"),
                                get("router", "arm_field_offset"), get("router", "init", "bell"),
                                get("router", "alice_link"))
            network = build_router_graph(router, get("network", "gamma", 0.0))
        except ValueError as exc:
            errors.append(f"[router] {exc}")

    resonances = {}
    if scenario == "resonance-table" and not missing:
        resonances = {"max_order": get("resonances", "max_order"), "h1": get("resonances", "h1")}
        if resonances["max_order"] < 1:
            errors.append("[resonances] max_order must be at least 1")
    multipartite = {}
    if scenario == "multipartite" and not missing:
        multipartite = {"amplitudes": get("multipartite", "amplitudes"),
                        "labels": get("multipartite", "labels"),
                        "vacuum": get("multipartite", "vacuum", 0.0)}
        labels = multipartite["labels"]
        if labels is not None and len(labels) != len(multipartite["amplitudes"]):
            errors.append("[multipartite] labels must match amplitudes one to one")

    if errors:
        raise ConfigError(errors)

    cfg = SweepConfig(scenario=scenario, network=network, protocol=protocol,
                      lambda_unit=lambda_unit, axis=axis, grid=tuple(grid), t_end=t_end,
                      pair=tuple(pair) if pair is not None else None, samples=samples, nu=nu, frame=frame,
                      workers=workers, seed=get("run", "seed", 0), formats=tuple(formats),
                      out_dir=get("output", "dir", "results"), router=router,
                      resonances=resonances, multipartite=multipartite,
                      label=get("run", "label", ""), gamma_source=get("network", "gamma_source", ""),
                      source=source)
    if protocol is not None:
        cfg = replace(cfg, noise=NoiseSpec(get("noise", "lambda", 0.0) * cfg.lambda_scale))
    return cfg


def list_presets():
    files = resources.files("drivenxy") / "presets"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".ini"))


def preset_text(name):
    path = resources.files("drivenxy") / "presets" / f"{name}.ini"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}" + _suggest(name, list_presets()))
    return path.read_text(encoding="utf-8")


def load_preset(name, overrides=None):
    return parse_config(preset_text(name), source=f"preset:{name}", overrides=overrides)
