"""JSON problem configurations: schema checks and object construction.

Configs describe kernels and fields by name plus parameters, or by sample
tables interpolated linearly on each half-line. Validation errors carry a
JSON-pointer-style path to the offending entry.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .model import (
    EvalOptions,
    Field,
    Kernel,
    Multiplicities,
    Problem,
    ProblemDomain,
    make_constant_field,
    make_freud_field,
    make_gaussian_field,
    make_inverse_power_kernel,
    make_linear_decay_field,
    make_log_kernel,
    make_segment_field,
    make_table_field,
    make_table_kernel,
)
from .solver import SolveOptions

__all__ = [
    "ConfigError",
    "SCHEMA_VERSION",
    "load_config",
    "build_kernel",
    "build_field",
    "build_weight_field",
    "build_problem",
    "build_solve_options",
    "json_sanitize",
]

SCHEMA_VERSION = 1

KERNEL_NAMES = ("log", "inverse_power")
FIELD_NAMES = ("gaussian", "freud", "segment", "linear_decay", "const")
WEIGHT_NAMES = ("hermite", "freud", "const")


class ConfigError(ValueError):
    """Invalid configuration, annotated with a JSON pointer."""

    def __init__(self, message: str, pointer: str):
        super().__init__(f"{message} (at {pointer})")
        self.pointer = pointer


def _coerce_special(obj):
    if isinstance(obj, str):
        low = obj.strip().lower()
        if low in ("-inf", "-infinity"):
            return -math.inf
        if low in ("inf", "+inf", "infinity"):
            return math.inf
        return obj
    if isinstance(obj, list):
        return [_coerce_special(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _coerce_special(v) for k, v in obj.items()}
    return obj


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}", "/") from exc
    cfg = _coerce_special(cfg)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object", "/")
    schema = cfg.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema}", "/schema")
    return cfg


def _get(cfg: dict, key: str, pointer: str, kind=None, required=True, default=None):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required key {key!r}", f"{pointer}/{key}")
        return default
    val = cfg[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(
            f"expected {getattr(kind, '__name__', kind)} for {key!r}", f"{pointer}/{key}"
        )
    return val


def _params(cfg: dict, pointer: str) -> dict:
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object", f"{pointer}/params")
    return params


def build_kernel(cfg, pointer: str = "/kernel") -> Kernel:
    if not isinstance(cfg, dict):
        raise ConfigError("kernel must be an object", pointer)
    if "table" in cfg:
        table = cfg["table"]
        if not isinstance(table, dict) or "t" not in table or "value" not in table:
            raise ConfigError("kernel table needs 't' and 'value' arrays", f"{pointer}/table")
        try:
            return make_table_kernel(
                table["t"], table["value"], value_at_zero=table.get("value_at_zero")
            )
        except ValueError as exc:
            raise ConfigError(str(exc), f"{pointer}/table") from exc
    name = _get(cfg, "name", pointer, str)
    params = _params(cfg, pointer)
    try:
        if name == "log":
            return make_log_kernel()
        if name == "inverse_power":
            return make_inverse_power_kernel(params.get("s", 1.0))
    except ValueError as exc:
        raise ConfigError(str(exc), f"{pointer}/params") from exc
    raise ConfigError(f"unknown kernel {name!r}; expected one of {KERNEL_NAMES}", f"{pointer}/name")


def build_field(cfg, pointer: str = "/field") -> Field:
    if not isinstance(cfg, dict):
        raise ConfigError("field must be an object", pointer)
    if "table" in cfg:
        table = cfg["table"]
        if not isinstance(table, dict) or "t" not in table or "value" not in table:
            raise ConfigError("field table needs 't' and 'value' arrays", f"{pointer}/table")
        try:
            return make_table_field(table["t"], table["value"])
        except ValueError as exc:
            raise ConfigError(str(exc), f"{pointer}/table") from exc
    name = _get(cfg, "name", pointer, str)
    params = _params(cfg, pointer)
    try:
        if name == "gaussian":
            return make_gaussian_field(params.get("scale", 1.0))
        if name == "freud":
            return make_freud_field(params.get("power", 3.0), params.get("scale", 1.0))
        if name == "segment":
            return make_segment_field(
                params.get("a", 0.0), params.get("b", 1.0),
                inside_value=params.get("inside_value", 0.0),
            )
        if name == "linear_decay":
            return make_linear_decay_field(params.get("slope", 1.0))
        if name == "const":
            return make_constant_field(params.get("value", 0.0))
    except ValueError as exc:
        raise ConfigError(str(exc), f"{pointer}/params") from exc
    raise ConfigError(f"unknown field {name!r}; expected one of {FIELD_NAMES}", f"{pointer}/name")


def build_weight_field(cfg, pointer: str = "/weight") -> Field:
    """Turn a nonnegative weight description into its logarithm field."""
    if not isinstance(cfg, dict):
        raise ConfigError("weight must be an object", pointer)
    if "table" in cfg:
        table = cfg["table"]
        if not isinstance(table, dict) or "t" not in table or "value" not in table:
            raise ConfigError("weight table needs 't' and 'value' arrays", f"{pointer}/table")
        w = np.asarray(table["value"], dtype=float)
        if np.any(w < 0):
            raise ConfigError("weight values must be nonnegative", f"{pointer}/table/value")
        with np.errstate(divide="ignore"):
            logs = np.where(w > 0, np.log(np.maximum(w, 1e-300)), -math.inf)
        try:
            return make_table_field(table["t"], logs)
        except ValueError as exc:
            raise ConfigError(str(exc), f"{pointer}/table") from exc
    name = _get(cfg, "name", pointer, str)
    params = _params(cfg, pointer)
    try:
        if name == "hermite":
            return make_gaussian_field(params.get("scale", 1.0))
        if name == "freud":
            return make_freud_field(params.get("power", 3.0), params.get("scale", 1.0))
        if name == "const":
            value = float(params.get("value", 1.0))
            if value <= 0:
                raise ConfigError("constant weight must be positive", f"{pointer}/params/value")
            return make_constant_field(math.log(value))
    except ValueError as exc:
        raise ConfigError(str(exc), f"{pointer}/params") from exc
    raise ConfigError(f"unknown weight {name!r}; expected one of {WEIGHT_NAMES}", f"{pointer}/name")


def _build_domain(cfg, pointer: str = "/domain") -> ProblemDomain:
    if cfg is None:
        return ProblemDomain("axis")
    if not isinstance(cfg, dict):
        raise ConfigError("domain must be an object", pointer)
    kind = _get(cfg, "kind", pointer, str)
    if kind == "segment":
        endpoints = _get(cfg, "endpoints", pointer, list)
        if len(endpoints) != 2:
            raise ConfigError("segment endpoints must be [a, b]", f"{pointer}/endpoints")
        try:
            return ProblemDomain("segment", tuple(float(v) for v in endpoints))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"{pointer}/endpoints") from exc
    if kind in ("axis", "semiaxis"):
        return ProblemDomain(kind)
    raise ConfigError(f"unknown domain kind {kind!r}", f"{pointer}/kind")


def _build_eval_opts(cfg, pointer: str = "/evaluation") -> EvalOptions:
    if cfg is None:
        return EvalOptions()
    if not isinstance(cfg, dict):
        raise ConfigError("evaluation must be an object", pointer)
    kwargs = {}
    for key in ("tol_t", "tol_v"):
        if key in cfg:
            kwargs[key] = float(cfg[key])
    for key in ("golden_max_iter", "grid_cells"):
        if key in cfg:
            kwargs[key] = int(cfg[key])
    return EvalOptions(**kwargs)


def build_problem(cfg: dict) -> Problem:
    kernel = build_kernel(_get(cfg, "kernel", "", dict))
    field = build_field(_get(cfg, "field", "", dict))
    mults = _get(cfg, "multiplicities", "", list)
    try:
        multiplicities = Multiplicities(tuple(float(v) for v in mults))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "/multiplicities") from exc
    domain = _build_domain(cfg.get("domain"))
    eval_opts = _build_eval_opts(cfg.get("evaluation"))
    admissibility = cfg.get("admissibility", {})
    asserted = bool(admissibility.get("assert", False)) if isinstance(admissibility, dict) else False
    try:
        return Problem(
            kernel=kernel,
            field=field,
            multiplicities=multiplicities,
            domain=domain,
            eval_opts=eval_opts,
            admissibility_asserted=asserted,
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "/") from exc


def build_solve_options(cfg: dict, *, seed=None, multistart=None) -> SolveOptions:
    solver = cfg.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("solver must be an object", "/solver")
    kwargs = {}
    for key in ("spread_tol", "damping"):
        if key in solver:
            kwargs[key] = float(solver[key])
    for key in ("max_iters", "multistart", "seed"):
        if key in solver:
            kwargs[key] = int(solver[key])
    if "via_unit" in solver:
        kwargs["via_unit"] = bool(solver["via_unit"])
    if seed is not None:
        kwargs["seed"] = int(seed)
    if multistart is not None:
        kwargs["multistart"] = int(multistart)
    try:
        return SolveOptions(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), "/solver") from exc


def json_sanitize(obj):
    """Replace non-finite floats with string literals for portable JSON."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if obj == math.inf:
            return "inf"
        if obj == -math.inf:
            return "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: json_sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return json_sanitize(float(obj))
    return obj
