"""Scenario configuration: YAML files, dotted overrides and validation.

A configuration is a nested mapping. Every scenario starts from its preset,
then the file is merged over it, then ``section.key=value`` overrides from the
command line. Photon energies are given in eV here and converted to hartree
once, by :attr:`ScenarioConfig.omega_c`; nothing past this module sees eV.
"""

import copy
import math
import re
from dataclasses import dataclass

import yaml

from .errors import ConfigError
from .hamiltonian import BasisKind, Variant
from .units import ev_to_hartree

SCENARIOS = ("surfaces", "splittings", "downconversion", "dissociation")

BASE = {
    "model": {"name": "lif-default", "parameters": {}},
    "cavity": {"chi": 0.007, "omega_ev": 1.5},
    "variant": "pf",
    "basis": {"kind": "diabatic-pfs", "n_fock": 8},
    "grid": {"r_min": 1.5, "r_max": 40.0, "n_points": 1024},
    "propagation": {"dt": 0.5, "t_final": 4000.0, "snapshot_every": 25.0,
                    "derivative_couplings": False, "absorber_width": None},
    "initial_state": {"r_g": 3.01, "alpha": 19.12, "state": None, "channel": "C0",
                      "condon": True},
    "observables": {"rho_levels": 6, "polaritons": 0, "dissociation": False},
    "surfaces": {"r_min": 1.5, "r_max": 20.0, "n_points": 371, "n_states": 8,
                 "crossings": [0, 1, 2, 3], "mesh": False, "q_min": -4.0,
                 "q_max": 4.0, "n_q": 81, "mesh_points": 111},
    "splittings": {"variants": ["pf", "rabi"], "indices": [1, 2, 3],
                   "n_fock_pfs": 12, "n_fock_fock": 24},
    "output": {"directory": None},
}

PRESETS = {
    "surfaces": {
        "cavity": {"chi": 0.007, "omega_ev": 1.5},
        "basis": {"kind": "diabatic-pfs", "n_fock": 12},
    },
    "splittings": {
        "cavity": {"chi": [0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007],
                   "omega_ev": 1.5},
    },
    "downconversion": {
        "cavity": {"chi": 0.007, "omega_ev": 1.5},
        "basis": {"kind": "diabatic-pfs", "n_fock": 8},
        "propagation": {"dt": 0.5, "t_final": 4000.0, "snapshot_every": 25.0},
        "initial_state": {"state": None, "channel": "C0"},
    },
    "dissociation": {
        "cavity": {"chi": [0.0, 0.004, 0.007, 0.01], "omega_ev": 7.5},
        "basis": {"kind": "diabatic-pfs", "n_fock": 4},
        "propagation": {"dt": 1.0, "t_final": 8000.0, "snapshot_every": 50.0},
        "initial_state": {"state": 1, "channel": None},
        "observables": {"rho_levels": 4, "dissociation": True},
    },
}

_CHANNEL = re.compile(r"^\s*([IiCc])\s*,?\s*(\d+)\s*$")


def _merge(base, extra, path=""):
    out = copy.deepcopy(base)
    for key, val in (extra or {}).items():
        where = f"{path}.{key}" if path else str(key)
        if key not in out:
            raise ConfigError("unknown key", where)
        if isinstance(out[key], dict) and key != "parameters":
            if not isinstance(val, dict):
                raise ConfigError("expected a mapping", where)
            out[key] = _merge(out[key], val, where)
        elif key == "parameters":
            if not isinstance(val, dict):
                raise ConfigError("expected a mapping", where)
            out[key] = {**out[key], **val}
        else:
            out[key] = copy.deepcopy(val)
    return out


def parse_override(text):
    """'grid.n_points=2048' -> {'grid': {'n_points': 2048}} (value parsed as YAML)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key.path=value")
    key, raw = text.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"override {text!r} has an empty key")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse value: {exc}", key.strip())
    tree = value
    for p in reversed(parts):
        tree = {p: tree}
    return tree


def read_file(path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc.strerror}", str(path))
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}", str(path))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", str(path))
    return data


# -- validation helpers ---------------------------------------------------------

def _num(value, path, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", path)
    if positive and value <= 0:
        raise ConfigError(f"must be positive, got {value}", path)
    if nonneg and value < 0:
        raise ConfigError(f"must be non-negative, got {value}", path)
    return value


def _int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be at least {minimum}, got {value}", path)
    return value


def _bool(value, path):
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", path)
    return value


def _enum(cls, value, path):
    try:
        return cls(value)
    except ValueError:
        raise ConfigError(f"{value!r} is not one of {[m.value for m in cls]}", path)


def _int_list(value, path, minimum=0):
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError("expected a non-empty list of integers", path)
    return tuple(_int(v, f"{path}[{i}]", minimum) for i, v in enumerate(value))


def parse_channel(label, path="initial_state.channel"):
    """'C0', 'I,3' -> (state, n) with state 0 = ionic, 1 = covalent."""
    m = _CHANNEL.match(str(label))
    if not m:
        raise ConfigError(f"{label!r} is not a diabatic channel label like 'C0' or 'I3'",
                          path)
    return (0 if m.group(1).upper() == "I" else 1), int(m.group(2))


# -- typed sections -------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    r_min: float
    r_max: float
    n_points: int


@dataclass(frozen=True)
class PropagationSpec:
    dt: float
    t_final: float
    snapshot_every: float
    derivative_couplings: bool
    absorber_width: float = None

    @property
    def n_steps(self):
        return int(round(self.t_final / self.dt))

    @property
    def stride(self):
        return int(round(self.snapshot_every / self.dt))


@dataclass(frozen=True)
class InitialStateSpec:
    r_g: float
    alpha: float
    state: int = None
    channel: tuple = None
    condon: bool = True


@dataclass(frozen=True)
class SurfacesSpec:
    r_min: float
    r_max: float
    n_points: int
    n_states: int
    crossings: tuple
    mesh: bool
    q_min: float
    q_max: float
    n_q: int
    mesh_points: int


@dataclass(frozen=True)
class SplittingsSpec:
    variants: tuple
    indices: tuple
    n_fock_pfs: int
    n_fock_fock: int


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario. ``raw`` is the resolved mapping in file units."""

    scenario: str
    model_name: str
    model_parameters: dict
    chi_values: tuple
    omega_ev: float
    variant: Variant
    basis_kind: BasisKind
    n_fock: int
    grid: GridSpec
    propagation: PropagationSpec
    initial_state: InitialStateSpec
    rho_levels: int
    polaritons: int
    dissociation: bool
    surfaces: SurfacesSpec
    splittings: SplittingsSpec
    output_directory: str
    raw: dict

    @property
    def omega_c(self):
        """Cavity photon energy in hartree."""
        return ev_to_hartree(self.omega_ev)

    def model(self):
        from .model import get_model
        return get_model(self.model_name, **self.model_parameters)

    def to_dict(self):
        """Resolved configuration in file units; loading it reproduces this object."""
        return copy.deepcopy(self.raw)


def validate(data, scenario):
    """Turn a merged mapping into a :class:`ScenarioConfig` or raise ConfigError."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; known: {list(SCENARIOS)}",
                          "scenario")
    d = data

    model = d["model"]
    if not isinstance(model["name"], str):
        raise ConfigError("expected a string", "model.name")
    from .model import MODEL_REGISTRY, get_model
    if model["name"] not in MODEL_REGISTRY:
        raise ConfigError(f"unknown model; known: {sorted(MODEL_REGISTRY)}", "model.name")
    params = model["parameters"] or {}
    for key, val in params.items():
        if key == "window":
            if not (isinstance(val, (list, tuple)) and len(val) == 2):
                raise ConfigError("expected [r_lo, r_hi]", "model.parameters.window")
            continue
        _num(val, f"model.parameters.{key}")
    try:
        mdl = get_model(model["name"], **params)
    except TypeError as exc:
        raise ConfigError(str(exc), "model.parameters")
    except ValueError as exc:
        raise ConfigError(str(exc), "model.parameters")

    chi = d["cavity"]["chi"]
    chis = chi if isinstance(chi, (list, tuple)) else [chi]
    if not chis:
        raise ConfigError("empty chi list", "cavity.chi")
    chi_values = tuple(_num(c, f"cavity.chi[{i}]" if isinstance(chi, (list, tuple))
                            else "cavity.chi", nonneg=True) for i, c in enumerate(chis))
    omega_ev = _num(d["cavity"]["omega_ev"], "cavity.omega_ev", positive=True)

    variant = _enum(Variant, d["variant"], "variant")
    kind = _enum(BasisKind, d["basis"]["kind"], "basis.kind")
    n_fock = _int(d["basis"]["n_fock"], "basis.n_fock", 2)
    if variant is not Variant.PAULI_FIERZ and kind is not BasisKind.ADIABATIC_FOCK:
        raise ConfigError(f"variant {variant.value!r} is only defined in the "
                          "adiabatic-fock basis", "basis.kind")
    if scenario in ("downconversion", "dissociation"):
        if kind is BasisKind.ADIABATIC_FOCK:
            raise ConfigError("dynamics needs a diabatic basis (diabatic-pfs or "
                              "diabatic-fock)", "basis.kind")
        if variant is not Variant.PAULI_FIERZ:
            raise ConfigError("dynamics is defined for the pf variant only", "variant")

    g = d["grid"]
    grid = GridSpec(_num(g["r_min"], "grid.r_min", positive=True),
                    _num(g["r_max"], "grid.r_max", positive=True),
                    _int(g["n_points"], "grid.n_points", 16))
    if grid.r_max <= grid.r_min:
        raise ConfigError("must exceed grid.r_min", "grid.r_max")
    if grid.n_points & (grid.n_points - 1):
        raise ConfigError("must be a power of two", "grid.n_points")
    lo, hi = mdl.window
    if scenario in ("downconversion", "dissociation") and (grid.r_min < lo or grid.r_max > hi):
        raise ConfigError(f"grid [{grid.r_min}, {grid.r_max}] leaves the model window "
                          f"[{lo}, {hi}]", "grid")

    p = d["propagation"]
    dt = _num(p["dt"], "propagation.dt", positive=True)
    t_final = _num(p["t_final"], "propagation.t_final", positive=True)
    every = _num(p["snapshot_every"], "propagation.snapshot_every", positive=True)
    for name, val in (("t_final", t_final), ("snapshot_every", every)):
        if abs(val / dt - round(val / dt)) > 1e-9 * max(1.0, val / dt):
            raise ConfigError("must be an integer multiple of propagation.dt",
                              f"propagation.{name}")
    absorber = p["absorber_width"]
    if absorber is not None:
        absorber = _num(absorber, "propagation.absorber_width", positive=True)
        if absorber >= grid.r_max - grid.r_min:
            raise ConfigError("wider than the grid", "propagation.absorber_width")
    prop = PropagationSpec(dt, t_final, every,
                           _bool(p["derivative_couplings"], "propagation.derivative_couplings"),
                           absorber)

    s = d["initial_state"]
    state, channel = s["state"], s["channel"]
    if (state is None) == (channel is None):
        raise ConfigError("give exactly one of 'state' (polariton index) or 'channel' "
                          "(diabatic label such as C0)", "initial_state")
    init = InitialStateSpec(
        _num(s["r_g"], "initial_state.r_g", positive=True),
        _num(s["alpha"], "initial_state.alpha", positive=True),
        None if state is None else _int(state, "initial_state.state", 0),
        None if channel is None else parse_channel(channel),
        _bool(s["condon"], "initial_state.condon"))
    if init.channel is not None and init.channel[1] >= n_fock:
        raise ConfigError(f"photon number {init.channel[1]} needs basis.n_fock > "
                          f"{init.channel[1]}", "initial_state.channel")
    if init.state is not None and init.state >= 2 * n_fock:
        raise ConfigError(f"index beyond the {2 * n_fock} basis states",
                          "initial_state.state")
    if scenario in ("downconversion", "dissociation") and not grid.r_min < init.r_g < grid.r_max:
        raise ConfigError("must lie inside the grid", "initial_state.r_g")

    o = d["observables"]
    rho_levels = _int(o["rho_levels"], "observables.rho_levels", 1)
    polaritons = _int(o["polaritons"], "observables.polaritons", 0)
    dissociation = _bool(o["dissociation"], "observables.dissociation")

    sf = d["surfaces"]
    surfaces = SurfacesSpec(
        _num(sf["r_min"], "surfaces.r_min", positive=True),
        _num(sf["r_max"], "surfaces.r_max", positive=True),
        _int(sf["n_points"], "surfaces.n_points", 2),
        _int(sf["n_states"], "surfaces.n_states", 1),
        _int_list(sf["crossings"], "surfaces.crossings"),
        _bool(sf["mesh"], "surfaces.mesh"),
        _num(sf["q_min"], "surfaces.q_min"),
        _num(sf["q_max"], "surfaces.q_max"),
        _int(sf["n_q"], "surfaces.n_q", 2),
        _int(sf["mesh_points"], "surfaces.mesh_points", 2))
    if surfaces.r_max <= surfaces.r_min:
        raise ConfigError("must exceed surfaces.r_min", "surfaces.r_max")
    if surfaces.q_max <= surfaces.q_min:
        raise ConfigError("must exceed surfaces.q_min", "surfaces.q_max")
    if scenario == "surfaces" and (surfaces.r_min < lo or surfaces.r_max > hi):
        raise ConfigError(f"range leaves the model window [{lo}, {hi}]", "surfaces")
    if scenario == "surfaces" and surfaces.n_states > 2 * n_fock:
        raise ConfigError(f"more states than the {2 * n_fock} basis states",
                          "surfaces.n_states")

    sp = d["splittings"]
    if not isinstance(sp["variants"], (list, tuple)) or not sp["variants"]:
        raise ConfigError("expected a non-empty list", "splittings.variants")
    splittings = SplittingsSpec(
        tuple(_enum(Variant, v, f"splittings.variants[{i}]")
              for i, v in enumerate(sp["variants"])),
        _int_list(sp["indices"], "splittings.indices"),
        _int(sp["n_fock_pfs"], "splittings.n_fock_pfs", 2),
        _int(sp["n_fock_fock"], "splittings.n_fock_fock", 2))

    out = d["output"]["directory"]
    if out is not None and not isinstance(out, str):
        raise ConfigError("expected a path string", "output.directory")

    return ScenarioConfig(
        scenario=scenario, model_name=model["name"], model_parameters=dict(params),
        chi_values=chi_values, omega_ev=omega_ev, variant=variant, basis_kind=kind,
        n_fock=n_fock, grid=grid, propagation=prop, initial_state=init,
        rho_levels=rho_levels, polaritons=polaritons, dissociation=dissociation,
        surfaces=surfaces, splittings=splittings, output_directory=out,
        raw=copy.deepcopy(d))


def load_config(scenario, path=None, overrides=(), data=None):
    """Preset <- file (or ``data``) <- overrides, validated."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; known: {list(SCENARIOS)}",
                          "scenario")
    merged = _merge(BASE, PRESETS[scenario])
    if path is not None:
        merged = _merge(merged, read_file(path))
    if data is not None:
        merged = _merge(merged, data)
    for text in overrides:
        merged = _merge(merged, parse_override(text))
    return validate(merged, scenario)


def dump_config(cfg: ScenarioConfig):
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)


def describe_units():
    return {"energy": "hartree (omega_ev in eV at the interface)", "length": "bohr",
            "time": "atomic units (hbar = 1)", "mass": "electron masses",
            "chi": "atomic units", "dipole": "e bohr"}


__all__ = ["ScenarioConfig", "GridSpec", "PropagationSpec", "InitialStateSpec",
           "SurfacesSpec", "SplittingsSpec", "load_config", "validate",
           "parse_override", "parse_channel", "dump_config", "describe_units",
           "SCENARIOS"]
