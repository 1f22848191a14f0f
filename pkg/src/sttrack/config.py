"""Simulation configuration, the scenario file schema, and loading with overrides."""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np
import yaml

from .estimation import NoiseConfig, TargetModel
from .geometry import ConvexPolygon, GeometryError
from .kinematics import InvalidBudget, SpeedBudget, validate_budget
from .limited_range import RangeConfig

STRATEGIES = ("constant", "self_triggered", "self_triggered_limited")
ESTIMATORS = ("known_target", "centralized_ekf", "decentralized_ekf_ci")

PAPER_DT = 0.1
PAPER_OMEGA_MAX = math.pi / 180.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OutputOptions:
    dir: str = "out"
    prefix: str = "run"
    trace_csv: bool = True
    summary_json: bool = True
    plots: bool = False


@dataclass(frozen=True)
class SimConfig:
    polygon: ConvexPolygon
    n_robots: int = 6
    strategy: str = "self_triggered"
    estimator: str = "known_target"
    sigma: float = 0.05
    dt: float = PAPER_DT
    omega_max: float | None = PAPER_OMEGA_MAX
    v_max: float | None = None
    omega_ro: float = 100.0
    target: TargetModel = field(default_factory=TargetModel)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    ranges: RangeConfig = field(default_factory=RangeConfig)
    initial_angles: tuple[float, ...] | None = None
    initial_arclengths: tuple[float, ...] | None = None
    initial_mean: tuple[float, float] | None = None
    initial_cov: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))
    max_steps: int = 5000
    stop_at_convergence: bool = True
    tight_ubd: bool = False
    ci_criterion: str = "trace"
    seed: int = 0

    def __post_init__(self):
        if self.n_robots < 3:
            raise ConfigError("need at least 3 robots for Voronoi segments")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if not self.dt > 0.0:
            raise ConfigError("dt must be positive")
        if self.sigma < 0.0:
            raise ConfigError("sigma must be nonnegative")
        if self.max_steps < 0:
            raise ConfigError("max_steps must be nonnegative")
        if self.ci_criterion not in ("trace", "det"):
            raise ConfigError("ci_criterion must be 'trace' or 'det'")
        if self.omega_max is None and self.v_max is None:
            raise ConfigError("omega_max is computed from v_max; give one of them")
        if self.omega_max is not None and not self.omega_max > 0.0:
            raise ConfigError("omega_max must be positive")
        if self.v_max is not None:
            try:
                validate_budget(self.polygon, self.speed_budget)
            except InvalidBudget as exc:
                raise ConfigError(str(exc)) from exc
        for name in ("initial_angles", "initial_arclengths"):
            vals = getattr(self, name)
            if vals is not None and len(vals) != self.n_robots:
                raise ConfigError(f"{name} needs exactly n_robots = {self.n_robots} entries")
        if self.initial_angles is not None and self.initial_arclengths is not None:
            raise ConfigError("give initial_angles or initial_arclengths, not both")
        o0 = self.target.position_at(0.0)
        if not self.polygon.contains_strictly(o0):
            raise ConfigError(f"initial target position {o0} is not inside the polygon")
        if self.initial_mean is not None and not self.polygon.contains_strictly(self.initial_mean):
            raise ConfigError("initial_mean must be inside the polygon")
        cov = np.asarray(self.initial_cov, dtype=float)
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T) or np.any(np.linalg.eigvalsh(cov) <= 0):
            raise ConfigError("initial_cov must be a symmetric positive definite 2x2 matrix")

    @property
    def speed_budget(self) -> SpeedBudget:
        return SpeedBudget(self.v_max, self.omega_ro, self.dt)

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict[str, Any]:
        def enc(v):
            if isinstance(v, float) and math.isinf(v):
                return "unlimited"
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        out = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            if k == "polygon":
                v = [list(p) for p in v.vertices]
            elif k == "noise":
                v = {"R": v.R.tolist(), "q": v.q, "measurement_std": v.measurement_std}
            elif k in ("target", "ranges"):
                v = asdict(v)
            elif k == "omega_max" and v is None:
                v = "computed"
            out[k] = enc(v)
        return out


_num = {"type": "number"}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_range = {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "unlimited"}]}
_matrix2 = {"type": "array", "items": _point, "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "sttrack scenario",
    "type": "object",
    "additionalProperties": False,
    "required": ["polygon"],
    "properties": {
        "polygon": {"type": "array", "items": _point, "minItems": 3,
                    "description": "counterclockwise vertices, meters"},
        "n_robots": {"type": "integer", "minimum": 3},
        "strategy": {"enum": list(STRATEGIES)},
        "estimator": {"enum": list(ESTIMATORS)},
        "sigma": {"type": "number", "minimum": 0, "description": "trigger tolerance, rad"},
        "dt": {"type": "number", "exclusiveMinimum": 0, "description": "seconds"},
        "omega_max": {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "computed"}],
                      "description": "rad/s, or 'computed' from v_max and omega_ro"},
        "v_max": {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "null"}],
                  "description": "boundary speed cap, m/s"},
        "omega_ro": {"type": "number", "exclusiveMinimum": 0, "description": "turn rate at vertices, rad/s"},
        "target": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["stationary", "circular", "waypoints"]},
                "position": _point, "center": _point,
                "v_o": _num, "omega_o": _num, "phase": _num,
                "waypoints": {"type": "array", "items": _point},
            },
        },
        "noise": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "R": _matrix2,
                "q": {"type": "number", "exclusiveMinimum": 0},
                "measurement_std": {"anyOf": [{"type": "number", "minimum": 0}, {"type": "null"}]},
            },
        },
        "ranges": {
            "type": "object", "additionalProperties": False,
            "properties": {"r_c": _range, "r_s": _range},
        },
        "initial_angles": {"anyOf": [{"type": "array", "items": _num}, {"type": "null"}]},
        "initial_arclengths": {"anyOf": [{"type": "array", "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1}}, {"type": "null"}],
                               "description": "fractions of the perimeter from vertex 0"},
        "initial_mean": {"anyOf": [_point, {"type": "null"}]},
        "initial_cov": _matrix2,
        "max_steps": {"type": "integer", "minimum": 0},
        "stop_at_convergence": {"type": "boolean"},
        "tight_ubd": {"type": "boolean"},
        "ci_criterion": {"enum": ["trace", "det"]},
        "seed": {"type": "integer", "minimum": 0},
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"}, "prefix": {"type": "string"},
                "trace_csv": {"type": "boolean"}, "summary_json": {"type": "boolean"},
                "plots": {"type": "boolean"},
            },
        },
    },
}


def _parse_scalar(text: str) -> Any:
    return yaml.safe_load(text)


def apply_overrides(doc: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply ``a.b.c=value`` overrides; values are parsed as YAML scalars or lists."""
    doc = copy.deepcopy(doc)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        path, _, raw = item.partition("=")
        keys = path.strip().split(".")
        node = doc
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r}: {key!r} is not a section")
        node[keys[-1]] = _parse_scalar(raw)
    return doc


def validate_document(doc: dict[str, Any]) -> None:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc


def _rng(v) -> float:
    return math.inf if v == "unlimited" else float(v)


def build_config(doc: dict[str, Any]) -> tuple[SimConfig, OutputOptions]:
    validate_document(doc)
    d = dict(doc)
    out = OutputOptions(**d.pop("output", {}))
    try:
        poly = ConvexPolygon(d.pop("polygon"))
        kwargs: dict[str, Any] = {"polygon": poly}
        if "target" in d:
            t = dict(d.pop("target"))
            for key in ("position", "center"):
                if key in t:
                    t[key] = tuple(t[key])
            if "waypoints" in t:
                t["waypoints"] = tuple(tuple(p) for p in t["waypoints"])
            kwargs["target"] = TargetModel(**t)
        if "noise" in d:
            kwargs["noise"] = NoiseConfig(**d.pop("noise"))
        if "ranges" in d:
            r = d.pop("ranges")
            kwargs["ranges"] = RangeConfig(_rng(r.get("r_c", "unlimited")),
                                           _rng(r.get("r_s", "unlimited")))
        if d.get("omega_max") == "computed":
            d["omega_max"] = None
        for key in ("initial_angles", "initial_arclengths", "initial_mean"):
            if d.get(key) is not None:
                d[key] = tuple(float(x) for x in d[key])
        if "initial_cov" in d:
            d["initial_cov"] = tuple(tuple(float(x) for x in row) for row in d["initial_cov"])
        kwargs.update(d)
        return SimConfig(**kwargs), out
    except ConfigError:
        raise
    except (GeometryError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(path: str | Path, overrides: list[str] | None = None) -> tuple[SimConfig, OutputOptions]:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping at the top level")
    return build_config(apply_overrides(doc, overrides or []))
