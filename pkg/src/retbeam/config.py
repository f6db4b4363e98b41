"""JSON run configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

from .presets import make_preset
from .problem import ProblemSpec
from .quadrature import QuadratureSpec
from .solver import SolverOptions

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "retbeam run configuration",
    "type": "object",
    "required": ["preset"],
    "additionalProperties": False,
    "properties": {
        "preset": {"type": "string"},
        "params": {"type": "object"},
        "bc_j": {"type": "integer", "enum": [0, 1, 2, 3]},
        "r_override": {"type": "number", "exclusiveMinimum": 0},
        "rhos": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 16},
                "panels": {"type": "integer", "minimum": 8},
                "nodes_per_panel": {"type": "integer", "minimum": 4, "maximum": 16},
                "tol_fix": {"type": "number", "exclusiveMinimum": 0},
                "tol_res": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "damping": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pairs": {"type": "string"},
                "profiles": {"type": "string"},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    preset: str
    params: dict = field(default_factory=dict)
    bc_j: int | None = None
    r_override: float | None = None
    rhos: list[float] = field(default_factory=list)
    solver: SolverOptions = field(default_factory=SolverOptions)
    output: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid configuration: {exc.message}") from None
        s = dict(data.get("solver", {}))
        quad = QuadratureSpec(s.pop("panels", 16), s.pop("nodes_per_panel", 8))
        try:
            opts = SolverOptions(quad=quad, **s)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return cls(
            preset=data["preset"],
            params=dict(data.get("params", {})),
            bc_j=data.get("bc_j"),
            r_override=data.get("r_override"),
            rhos=sorted(float(x) for x in data.get("rhos", [])),
            solver=opts,
            output=dict(data.get("output", {})),
        )

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        return cls.from_dict(data)

    def problem(self) -> ProblemSpec:
        try:
            return make_preset(self.preset, self.params, self.bc_j, self.r_override)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
