"""Run configuration: a flat set of dotted keys read from TOML.

Every key has a default (``DEFAULTS``); a config file or ``--override``
only replaces values. Unknown keys and wrongly typed values are rejected.
"""
import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .boundary import BoundaryData, PeriodicSignal
from .errors import ConfigError, ValidationError
from .forcing import BackgroundSolution, ForcingCoefficient, validate
from .fv import FvGrid
from .gasdyn import GasParams
from .march import MarchGrid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DIAGNOSTICS = ("periodicity", "deviation", "h2_profile", "energy", "characteristics")

DEFAULTS = {
    "params.a": 1.0,
    "params.gamma": 2.0,
    "params.L": 1.0,
    "params.P": 1.0,
    "params.rho_ref": 1.0,
    "params.u_ref": 2.0,
    "forcing.kind": "sine_series",
    "forcing.coefficients": [[0.5, 1]],
    "forcing.samples": [],
    "forcing.relaxed": False,
    "boundary.u.kind": "background_plus_sine3",
    "boundary.u.delta": 1e-2,
    "boundary.u.harmonic": 1,
    "boundary.u.value": 0.0,
    "boundary.u.coefficients": [],
    "boundary.u.samples": [],
    "boundary.rho.kind": "background_plus_sine3",
    "boundary.rho.delta": 0.0,
    "boundary.rho.harmonic": 1,
    "boundary.rho.value": 0.0,
    "boundary.rho.coefficients": [],
    "boundary.rho.samples": [],
    "march.enabled": True,
    "march.nt_per_period": 256,
    "march.scheme_order": 2,
    "march.t_max": 5.0,
    "march.cfl_safety": 0.9,
    "march.buffer": 1.25,
    "march.error_estimate": True,
    "march.backend": "auto",
    "fv.enabled": True,
    "fv.nx": 1024,
    "fv.cfl": 0.0,
    "fv.flux": "hll",
    "fv.scheme_order": 2,
    "fv.t_end": 5.0,
    "fv.record_dt": 0.0,
    "fv.error_estimate": True,
    "fv.backend": "auto",
    "outputs.directory": "out",
    "outputs.stride_t": 4,
    "outputs.stride_x": 8,
    "outputs.diagnostics": list(DIAGNOSTICS),
    "convergence.solver": "march",
    "convergence.resolutions": [32, 64, 128, 256],
    "periodicity.tol": 0.0,
    "energy.points": [],
    "background.samples_per_period": 256,
    "background.periods": 2,
}


def flatten(tree, prefix=""):
    out = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _coerce(key, value):
    ref = DEFAULTS[key]
    if isinstance(ref, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    if isinstance(ref, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(ref, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if isinstance(ref, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if not isinstance(value, list):
        raise ConfigError(f"{key}: expected a list, got {value!r}")
    return value


def parse_override(item):
    """``key=value`` with a TOML literal value; bare words become strings."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, raw = (p.strip() for p in item.split("=", 1))
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


@dataclass
class Problem:
    params: GasParams
    forcing: ForcingCoefficient
    background: BackgroundSolution
    boundary: BoundaryData


@dataclass
class RunConfig:
    values: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))
    source: str = "<defaults>"

    @classmethod
    def load(cls, path=None, overrides=()):
        cfg = cls()
        if path is not None:
            try:
                tree = tomllib.loads(Path(path).read_text())
            except (OSError, tomllib.TOMLDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            cfg.update(flatten(tree))
            cfg.source = str(path)
        cfg.update(dict(parse_override(o) for o in overrides))
        return cfg

    def update(self, flat):
        for key, value in flat.items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            self.values[key] = _coerce(key, value)
        bad = set(self["outputs.diagnostics"]) - set(DIAGNOSTICS)
        if bad:
            raise ConfigError(f"unknown diagnostics {sorted(bad)}; choose from {list(DIAGNOSTICS)}")
        return self

    def replace(self, **flat):
        """Copy with dotted keys (``__`` in place of ``.``) replaced."""
        new = RunConfig(copy.deepcopy(self.values), self.source)
        return new.update({k.replace("__", "."): v for k, v in flat.items()})

    def __getitem__(self, key):
        return self.values[key]

    def section(self, name):
        n = len(name) + 1
        return {k[n:]: v for k, v in self.values.items() if k.startswith(name + ".")}

    def header_lines(self):
        """Resolved configuration as ``key = value`` lines, sorted by key."""
        return [f"{k} = {_toml_value(self.values[k])}" for k in sorted(self.values)]

    # ------------------------------------------------------------- builders
    def params(self) -> GasParams:
        return GasParams(**self.section("params"))

    def forcing(self) -> ForcingCoefficient:
        P = self["params.P"]
        kind = self["forcing.kind"]
        try:
            return ForcingCoefficient(
                kind, P, tuple(tuple(c) for c in self["forcing.coefficients"]) if kind == "sine_series" else (),
                tuple(self["forcing.samples"]) if kind == "tabulated" else (),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ConfigError(f"forcing: {exc}") from exc

    def _signal(self, channel, bg):
        s = self.section(f"boundary.{channel}")
        P = bg.params.P
        kind = s["kind"]
        if kind == "constant":
            value = s["value"] or (bg.params.rho_ref if channel == "rho" else bg.params.u_ref)
            return PeriodicSignal("constant", P, value=value, channel=channel)
        if kind == "background_plus_sine3":
            return PeriodicSignal(kind, P, amplitude=s["delta"], harmonic=s["harmonic"],
                                  channel=channel, background=bg)
        try:
            return PeriodicSignal(kind, P, value=s["value"], coefficients=tuple(tuple(c) for c in s["coefficients"]),
                                  samples=tuple(s["samples"]), channel=channel)
        except TypeError as exc:
            raise ConfigError(f"boundary.{channel}: {exc}") from exc

    def problem(self, check=True) -> Problem:
        """Build and validate every model object before any solver starts."""
        params = self.params()
        forcing = self.forcing()
        rep = validate(forcing, params, relaxed=self["forcing.relaxed"])
        if check and not rep.valid:
            raise ValidationError("forcing: " + "; ".join(rep.violations))
        bg = BackgroundSolution(params, forcing)
        boundary = BoundaryData(self._signal("rho", bg), self._signal("u", bg), bg)
        if check:
            boundary.check()
        return Problem(params, forcing, bg, boundary)

    def march_grid(self, problem: Problem, nt_per_period=None) -> MarchGrid:
        return MarchGrid.build(
            problem.params, problem.background.lambda_floor,
            nt_per_period=nt_per_period or self["march.nt_per_period"],
            t_max=self["march.t_max"], cfl_safety=self["march.cfl_safety"], buffer=self["march.buffer"],
        )

    def fv_grid(self, problem: Problem, nx=None) -> FvGrid:
        return FvGrid(
            nx or self["fv.nx"], problem.params.L, self["fv.cfl"] or None, self["fv.t_end"],
            self["fv.record_dt"] or None,
        )

    def backend(self, solver):
        name = self[f"{solver}.backend"]
        return None if name == "auto" else name


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    return str(v)


def default_config_path(name="baseline"):
    return Path(__file__).parent / "configs" / f"{name}.toml"
