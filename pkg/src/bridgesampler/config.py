"""Declarative experiment configuration: YAML file plus dotted overrides.

A config is a nested mapping validated eagerly against the default schema.
Unknown sections or keys are rejected outright; every leaf can be overridden
on the command line with --set section.key=value.  The resolved mapping is
hashed so result files can state exactly which configuration produced them.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .models import GaussianConditionalModel, GaussianMixtureConditionalModel
from .samplers import METHODS
from .schedule import SPACINGS, BridgeSchedule, TimeGrid, make_schedule, make_time_grid

DEFAULTS: dict = {
    "schedule": {
        "kind": "brownian_bridge",
        "T": 1.0,
        "sigma": 1.0,
        "beta_min": 0.1,
        "beta_max": 20.0,
    },
    "model": {
        "kind": "gaussian",
        "dim": 2,
        "mean_scale": 0.25,
        "mean_offset": 0.5,
        "var": 1.5,
        "weights": None,
        "offsets": None,
        "y": 2.0,
    },
    "sampler": {
        "method": "odes3",
        "N": 20,
        "spacing": "uniform",
        "t_min": None,
        "seed": 7,
        "runs": 200,
        "record_trajectory": False,
    },
    "validate": {
        "epsilons_t1": [1e-2, 1e-3, 1e-4, 1e-5],
        "epsilons_t2": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
        "taus": None,
        "ys": [-2.0, -0.5, 0.5, 1.0, 2.0],
        "t3_comparator": "em",
        "mc_draws": 0,
        "seed": 11,
    },
    "compare": {
        "methods": ["odes3", "em_sde", "em_start_heun", "deterministic_start_heun"],
        "grid_Ns": [5, 10, 20, 40],
        "runs": 1000,
        "seed": 13,
    },
    "converge": {
        "families": ["odes3", "em_sde"],
        "grid_sizes": [8, 16, 32, 64],
        "runs": 8,
        "tau": 0.9,
        "seed": 17,
    },
    "report": {"plots": True},
}

MODEL_KINDS = ("gaussian", "gaussian_mixture")
T3_COMPARATORS = ("em", "post")

# Keys whose value may be a single number or a per-dimension list.
SCALAR_OR_LIST = {("model", "y"), ("model", "mean_offset"), ("model", "var")}


class _ConfigLoader(yaml.SafeLoader):
    """SafeLoader that reads exponent-only literals like 1e-3 as floats."""


_ConfigLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
         |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
         |[-+]?\.[0-9_]+(?:[eE][-+]?[0-9]+)?
         |[-+]?\.(?:inf|Inf|INF)
         |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def _yaml_load(text: str):
    return yaml.load(text, Loader=_ConfigLoader)


def _check_leaf(section: str, key: str, default, value) -> None:
    if default is None or value is None:
        return
    if (section, key) in SCALAR_OR_LIST:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        ok = ok or (
            isinstance(value, list)
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        )
        if not ok:
            raise ConfigError(f"{section}.{key} must be a number or list of numbers, got {value!r}")
        return
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{section}.{key} must be a boolean, got {value!r}")
    elif isinstance(default, (int, float)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    elif isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key} must be a string, got {value!r}")
    elif isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{section}.{key} must be a list, got {value!r}")


def _merge(user: dict) -> dict:
    if not isinstance(user, dict):
        raise ConfigError("config root must be a mapping of sections")
    resolved = copy.deepcopy(DEFAULTS)
    for section, content in user.items():
        if section not in resolved:
            raise ConfigError(f"unknown config section {section!r}")
        if content is None:
            continue
        if not isinstance(content, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        for key, value in content.items():
            if key not in resolved[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
            _check_leaf(section, key, DEFAULTS[section][key], value)
            resolved[section][key] = value
    return resolved


def _apply_override(resolved: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form section.key=value")
    path, raw = item.split("=", 1)
    parts = path.strip().split(".")
    if len(parts) != 2:
        raise ConfigError(f"override path {path!r} must be section.key")
    section, key = parts
    if section not in resolved or key not in resolved[section]:
        raise ConfigError(f"unknown config key {section}.{key}")
    try:
        value = _yaml_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse override value {raw!r}: {exc}") from exc
    _check_leaf(section, key, DEFAULTS[section][key], value)
    resolved[section][key] = value


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved configuration with typed builders for domain objects."""

    resolved: dict

    @property
    def hash(self) -> str:
        canonical = json.dumps(self.resolved, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def section(self, name: str) -> dict:
        return self.resolved[name]

    def build_schedule(self) -> BridgeSchedule:
        sc = self.section("schedule")
        if sc["kind"] == "brownian_bridge":
            return make_schedule("brownian_bridge", T=float(sc["T"]), sigma=float(sc["sigma"]))
        if sc["kind"] == "variance_preserving":
            return make_schedule(
                "variance_preserving",
                T=float(sc["T"]),
                beta_min=float(sc["beta_min"]),
                beta_max=float(sc["beta_max"]),
            )
        raise ConfigError(f"unknown schedule kind {sc['kind']!r}")

    def build_model(self):
        mc = self.section("model")
        dim = mc["dim"]
        if not isinstance(dim, int) or dim < 1:
            raise ConfigError(f"model.dim must be a positive integer, got {dim!r}")
        try:
            if mc["kind"] == "gaussian":
                return GaussianConditionalModel.isotropic(
                    dim,
                    mean_scale=float(mc["mean_scale"]),
                    mean_offset=mc["mean_offset"],
                    var=mc["var"],
                )
            if mc["kind"] == "gaussian_mixture":
                if mc["weights"] is None or mc["offsets"] is None:
                    raise ConfigError("gaussian_mixture requires model.weights and model.offsets")
                return GaussianMixtureConditionalModel(
                    weights=np.asarray(mc["weights"], dtype=float),
                    offsets=np.asarray(mc["offsets"], dtype=float),
                    var=np.broadcast_to(np.asarray(mc["var"], dtype=float), (dim,)),
                    mean_scale=float(mc["mean_scale"]),
                )
        except ValueError as exc:
            raise ConfigError(f"model values do not fit dim {dim}: {exc}") from exc
        raise ConfigError(f"unknown model kind {mc['kind']!r}; choose from {MODEL_KINDS}")

    def condition(self) -> np.ndarray:
        mc = self.section("model")
        try:
            return np.broadcast_to(np.asarray(mc["y"], dtype=float), (mc["dim"],)).astype(float)
        except ValueError as exc:
            raise ConfigError(f"model.y does not broadcast to dim {mc['dim']}: {exc}") from exc

    def build_grid(self, s: BridgeSchedule, N: int | None = None) -> TimeGrid:
        sa = self.section("sampler")
        n = sa["N"] if N is None else N
        if not isinstance(n, int) or n < 2:
            raise ConfigError(f"sampler.N must be an integer >= 2, got {n!r}")
        t_min = sa["t_min"]
        return make_time_grid(s, n, spacing=sa["spacing"], t_min=None if t_min is None else float(t_min))

    def validate_taus(self, s: BridgeSchedule) -> list[float]:
        taus = self.section("validate")["taus"]
        if taus is None:
            return [float(t) for t in np.linspace(0.05, 0.95, 10) * s.T]
        out = [float(t) for t in taus]
        if any(not (0.0 < t < s.T) for t in out):
            raise ConfigError("validate.taus must lie strictly inside (0, T)")
        return out

    def check_values(self) -> None:
        """Eager validation of everything a command might touch."""
        s = self.build_schedule()
        self.build_model()
        self.condition()
        self.build_grid(s)
        self.validate_taus(s)
        sa = self.section("sampler")
        if sa["method"] not in METHODS:
            raise ConfigError(f"unknown sampler.method {sa['method']!r}; choose from {METHODS}")
        if sa["spacing"] not in SPACINGS:
            raise ConfigError(f"unknown sampler.spacing {sa['spacing']!r}")
        if not isinstance(sa["runs"], int) or sa["runs"] < 1:
            raise ConfigError("sampler.runs must be a positive integer")
        va = self.section("validate")
        if va["t3_comparator"] not in T3_COMPARATORS:
            raise ConfigError(f"validate.t3_comparator must be one of {T3_COMPARATORS}")
        if not isinstance(va["mc_draws"], int) or va["mc_draws"] < 0:
            raise ConfigError("validate.mc_draws must be a nonnegative integer")
        if len(va["epsilons_t1"]) < 1 or len(va["epsilons_t2"]) < 3:
            raise ConfigError("epsilon sweeps need at least 1 (T1) and 3 (T2) values")
        co = self.section("compare")
        for m in co["methods"]:
            if m not in METHODS:
                raise ConfigError(f"unknown compare method {m!r}")
        if not isinstance(co["runs"], int) or co["runs"] < 2:
            raise ConfigError("compare.runs must be an integer >= 2")
        for n in co["grid_Ns"]:
            if not isinstance(n, int) or n < 2:
                raise ConfigError("compare.grid_Ns entries must be integers >= 2")
        cv = self.section("converge")
        for fam in cv["families"]:
            if fam not in ("odes3", "em_sde", "heun", "euler"):
                raise ConfigError(f"unknown converge family {fam!r}")
        if not (0.0 < float(cv["tau"]) < s.T):
            raise ConfigError("converge.tau must lie strictly inside (0, T)")
        if not isinstance(cv["runs"], int) or cv["runs"] < 1:
            raise ConfigError("converge.runs must be a positive integer")


def load_config(path: str | Path, overrides=()) -> ExperimentConfig:
    """Read, merge, override, and eagerly validate a config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        user = _yaml_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    resolved = _merge(user if user is not None else {})
    for item in overrides:
        _apply_override(resolved, item)
    cfg = ExperimentConfig(resolved=resolved)
    cfg.check_values()
    return cfg
