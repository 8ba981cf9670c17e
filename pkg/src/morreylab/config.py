"""Experiment configuration: versioned JSON schema with strict validation.

Unknown keys are errors (naming the offending field path), so tolerance
names cannot drift silently.  A validated config is deterministic given
its seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .checks import CHECKS
from .duhamel import SolverConfig
from .indices import ProblemDims

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "validate_config", "DEFAULT_CONFIG"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def _require_keys(obj: dict, allowed: dict, path: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected a mapping")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")
    out = {}
    for key, (required, check) in allowed.items():
        if key in obj:
            out[key] = check(obj[key], f"{path}.{key}")
        elif required:
            raise ConfigError(f"{path}.{key}: required key missing")
    return out


def _number(lo=None, hi=None):
    def check(v, path):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {v!r}")
        if lo is not None and v < lo:
            raise ConfigError(f"{path}: {v} below minimum {lo}")
        if hi is not None and v > hi:
            raise ConfigError(f"{path}: {v} above maximum {hi}")
        return float(v)

    return check


def _integer(lo=None):
    def check(v, path):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}: expected an integer, got {v!r}")
        if lo is not None and v < lo:
            raise ConfigError(f"{path}: {v} below minimum {lo}")
        return v

    return check


def _string(v, path):
    if not isinstance(v, str):
        raise ConfigError(f"{path}: expected a string")
    return v


def _optional_string(v, path):
    if v is None:
        return None
    return _string(v, path)


def _optional_number(v, path):
    if v is None:
        return None
    return _number()(v, path)


@dataclass(frozen=True)
class ExperimentConfig:
    version: int
    seed: int
    dims: ProblemDims
    n: int
    L: float
    solver: SolverConfig
    checks: tuple = field(default_factory=tuple)  # ((name, params), ...)
    output_dir: str | None = None

    def echo(self) -> dict:
        return {
            "version": self.version,
            "seed": self.seed,
            "dims": {"N": self.dims.N, "m": self.dims.m, "mu": self.dims.mu},
            "grid": {"n": self.n, "L": self.L},
            "solver": {
                "horizon": self.solver.horizon,
                "nodes": self.solver.nodes,
                "grading": self.solver.grading,
                "theta": self.solver.theta,
                "picard_tol": self.solver.picard_tol,
                "max_sweeps": self.solver.max_sweeps,
                "calibration": self.solver.calibration,
            },
            "checks": [{"name": name, **params} for name, params in self.checks],
            "output_dir": self.output_dir,
        }


DEFAULT_CONFIG = {
    "version": SCHEMA_VERSION,
    "seed": 0,
    "dims": {"N": 1, "m": 1, "mu": 1.0},
    "grid": {"n": 4096, "L": 8.0},
    "solver": {"horizon": 0.25, "nodes": 64, "grading": 2.0, "theta": None,
               "picard_tol": 1e-8, "max_sweeps": 60, "calibration": 1.0},
    "checks": [{"name": name} for name in CHECKS]
    + [{"name": "selfsimilar_collapse", "m": 2, "tol": 1e-2}],
    "output_dir": None,
}


def validate_config(raw: dict, path: str = "config") -> ExperimentConfig:
    top = _require_keys(raw, {
        "version": (True, _integer(1)),
        "seed": (False, _integer(0)),
        "dims": (False, lambda v, p: _require_keys(v, {
            "N": (False, _integer(1)),
            "m": (False, _integer(1)),
            "mu": (False, _number(1e-9, 1.0)),
        }, p)),
        "grid": (False, lambda v, p: _require_keys(v, {
            "n": (False, _integer(8)),
            "L": (False, _number(1e-9)),
        }, p)),
        "solver": (False, lambda v, p: _require_keys(v, {
            "horizon": (False, _number(1e-12)),
            "nodes": (False, _integer(16)),
            "grading": (False, _number(1.0)),
            "theta": (False, _optional_number),
            "picard_tol": (False, _number(0.0)),
            "max_sweeps": (False, _integer(1)),
            "calibration": (False, _number(0.0)),
        }, p)),
        "checks": (False, _check_list),
        "output_dir": (False, _optional_string),
    }, path)
    if top["version"] != SCHEMA_VERSION:
        raise ConfigError(f"{path}.version: schema version {top['version']} unsupported "
                          f"(expected {SCHEMA_VERSION})")
    dims_raw = top.get("dims", {})
    dims = ProblemDims(dims_raw.get("N", 1), dims_raw.get("m", 1), dims_raw.get("mu", 1.0))
    grid = top.get("grid", {})
    solver_raw = top.get("solver", {})
    solver = SolverConfig(
        horizon=solver_raw.get("horizon", 0.25),
        nodes=solver_raw.get("nodes", 64),
        grading=solver_raw.get("grading", 2.0),
        theta=solver_raw.get("theta"),
        picard_tol=solver_raw.get("picard_tol", 1e-8),
        max_sweeps=solver_raw.get("max_sweeps", 60),
        calibration=solver_raw.get("calibration", 1.0),
    )
    checks = top.get("checks", tuple((name, {}) for name in CHECKS))
    return ExperimentConfig(
        version=top["version"],
        seed=top.get("seed", 0),
        dims=dims,
        n=grid.get("n", 4096),
        L=grid.get("L", 8.0),
        solver=solver,
        checks=tuple(checks),
        output_dir=top.get("output_dir"),
    )


def _check_list(v, path):
    if not isinstance(v, list):
        raise ConfigError(f"{path}: expected a list of check entries")
    out = []
    for i, entry in enumerate(v):
        p = f"{path}[{i}]"
        if not isinstance(entry, dict) or "name" not in entry:
            raise ConfigError(f"{p}: expected a mapping with a 'name' key")
        name = entry["name"]
        if name not in CHECKS:
            raise ConfigError(f"{p}.name: unknown check {name!r}")
        params = {k: val for k, val in entry.items() if k != "name"}
        for k, val in params.items():
            if isinstance(val, list):
                params[k] = tuple(val)
        out.append((name, params))
    return tuple(out)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return validate_config(raw)
