"""Experiment configuration: schema, sweep expansion and physics checks."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import jsonschema

from .lmg import DENSITY_CEILING, PURE_CEILING
from .spin_wigner import MULTIPOLE_CEILING

SCHEMA_VERSION = 1

EXPERIMENTS = {
    "cycle": "one-cycle squeezing |s| and phase from the squeeze-amplitude ODE",
    "battery": "work distribution, mean/variance, fluctuation ratio and ergotropy",
    "noisy_battery": "stored work and ergotropy per cycle with T=0 damping (Gaussian moments)",
    "multi_cycle": "squeezing after each of M cycles and interference class",
    "lmg_squeeze": "LMG pure-state cycles: fitted |xi| N, F_xi, ground-state fidelity",
    "lmg_noise": "LMG master-equation cycles with collective decay: fit, F0, chi^2",
    "chi2": "entanglement witness chi^2_min after each cycle",
    "wigner": "spin Wigner function W(theta, phi) after each cycle",
    "protocol_scan": "accumulated phase, predicted arg b and integrated arg b",
}

LMG_KINDS = {"lmg_squeeze", "lmg_noise", "chi2", "wigner"}

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}


def _axis(item):
    return {"type": "array", "minItems": 1, "items": item}


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "experiment"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "experiment": {"enum": sorted(EXPERIMENTS)},
        "protocol": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": {"enum": ["power_law", "trigonometric"]},
                "exponent": _pos,
                "tau": _pos,
                "omega": _pos,
                "cycles": {"type": "integer", "minimum": 1},
                "z_nu": _pos,
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "r": _axis(_pos),
                "tau": _axis(_pos),
                "M": _axis({"type": "integer", "minimum": 1}),
                "N": _axis({"type": "integer", "minimum": 2}),
                "kappa": _axis({"type": "number", "minimum": 0}),
            },
        },
        "numerics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol": {"type": "number", "minimum": 1e-14, "maximum": 1e-6},
                "tail_bound": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e-10},
                "grid": {"type": "array", "items": {"type": "integer", "minimum": 3},
                         "minItems": 2, "maxItems": 2},
                "export_trajectories": {"type": "boolean"},
                "export_states": {"type": "boolean"},
                "wigner_format": {"enum": ["csv", "matrix"]},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string", "minLength": 1}},
        },
    },
}

DEFAULT_PROTOCOL = {"family": "power_law", "exponent": 2.0, "tau": 10.0, "omega": 1.0,
                    "cycles": 1, "z_nu": 0.5}
DEFAULT_NUMERICS = {"tol": 1e-10, "tail_bound": 1e-12, "grid": [181, 361],
                    "export_trajectories": False, "export_states": False,
                    "wigner_format": "csv"}
AXIS_ORDER = ("r", "tau", "M", "N", "kappa")
DEFAULT_AXES = {"N": [100], "kappa": [0.0]}


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class Diagnostics:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    experiment: str
    protocol: dict
    sweep: dict
    numerics: dict
    out_dir: str

    def points(self):
        """Sweep points in a fixed order: cartesian product over AXIS_ORDER."""
        axes = [(k, self.sweep[k]) for k in AXIS_ORDER if k in self.sweep]
        names = [k for k, _ in axes]
        for combo in itertools.product(*[v for _, v in axes]):
            yield dict(zip(names, combo))


def _path(err):
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def _axes_for(kind):
    if kind in ("lmg_squeeze", "chi2", "wigner"):
        return ("r", "tau", "M", "N")
    if kind == "lmg_noise":
        return ("r", "tau", "M", "N", "kappa")
    if kind == "noisy_battery":
        return ("r", "tau", "M", "kappa")
    return ("r", "tau", "M")


def parse(raw: dict, out_dir=None) -> ExperimentConfig:
    """Validate and normalise a config dict; raises ConfigError listing every problem."""
    diag = validate(raw)
    if not diag.ok:
        raise ConfigError(diag.errors)
    kind = raw["experiment"]
    protocol = dict(DEFAULT_PROTOCOL, **raw.get("protocol", {}))
    numerics = dict(DEFAULT_NUMERICS, **raw.get("numerics", {}))
    given = raw.get("sweep", {})
    sweep = {}
    for axis in _axes_for(kind):
        if axis in given:
            sweep[axis] = list(given[axis])
        elif axis == "r":
            sweep[axis] = [protocol["exponent"]]
        elif axis == "tau":
            sweep[axis] = [protocol["tau"]]
        elif axis == "M":
            sweep[axis] = [protocol["cycles"]]
        else:
            sweep[axis] = list(DEFAULT_AXES[axis])
    out = out_dir or raw.get("output", {}).get("dir") or "results"
    return ExperimentConfig(raw, kind, protocol, sweep, numerics, out)


def load(path, out_dir=None) -> ExperimentConfig:
    with open(path) as fh:
        raw = json.load(fh)
    return parse(raw, out_dir)


def validate(raw) -> Diagnostics:
    """Schema errors plus physics checks; warnings never block a run."""
    diag = Diagnostics()
    if not isinstance(raw, dict):
        diag.errors.append("<root>: config must be a JSON object")
        return diag
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        diag.errors.append(f"{_path(err)}: {err.message}")
    if diag.errors:
        return diag
    kind = raw["experiment"]
    protocol = dict(DEFAULT_PROTOCOL, **raw.get("protocol", {}))
    sweep = raw.get("sweep", {})
    for axis in sweep:
        if axis not in _axes_for(kind):
            diag.warnings.append(f"sweep.{axis}: ignored by experiment {kind!r}")
    omega = protocol["omega"]
    taus = sweep.get("tau", [protocol["tau"]])
    if kind in LMG_KINDS:
        Ns = sweep.get("N", DEFAULT_AXES["N"])
        ceiling = {"lmg_noise": DENSITY_CEILING, "wigner": MULTIPOLE_CEILING}.get(kind, PURE_CEILING)
        for N in Ns:
            if N > ceiling:
                diag.errors.append(f"sweep.N: N={N} exceeds the {kind} ceiling {ceiling}")
        for N in Ns:
            for tau in taus:
                wt = omega * tau
                if wt > N ** (1.0 / 3.0):
                    diag.warnings.append(
                        f"omega*tau={wt:g}, N={N}: outside quasiadiabatic window "
                        f"1 <~ omega*tau <~ N^(1/3) = {N ** (1 / 3):.3g}; "
                        "cycle approaches the adiabatic limit")
                elif wt < 1:
                    diag.warnings.append(
                        f"omega*tau={wt:g}: below the quasiadiabatic window (sudden-quench regime)")
    elif kind in ("cycle", "battery", "multi_cycle", "noisy_battery"):
        for tau in taus:
            if omega * tau < 1:
                diag.warnings.append(
                    f"omega*tau={omega * tau:g} < 1: sudden regime, universal squeezing not expected")
    return diag
