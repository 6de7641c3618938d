"""Experiment configuration: dotted key-value text or JSON, one schema.

The text form is TOML restricted to dotted keys at top level::

    p = 2
    surface.d = [[0.1]]
    methods = ["bp1", "bp2"]

JSON input may use nested objects or dotted keys; both flatten to the same
dotted names. Unknown keys are rejected with their line number.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .engines.quadrature import MAX_GH_ORDER
from .errors import InvalidArgumentError

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config", "SCHEMA"]

SIM_METHODS = ("bp1", "bp2", "bp3", "naive", "double", "pivot")
ORDER_METHODS = ("naive", "pivot", "pivot_numeric", "double")
GRIDS = ("diagonal", "product", "first")


class ConfigError(InvalidArgumentError):
    """Invalid configuration; the message names the key and, for text, the line."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _num(x, key):
    if not _is_num(x) or not math.isfinite(x):
        raise ConfigError(f"{key}: expected a finite number, got {x!r}")
    return float(x)


def _int(x, key, lo=None, hi=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{key}: expected an integer, got {x!r}")
    if lo is not None and x < lo:
        raise ConfigError(f"{key}: must be at least {lo}")
    if hi is not None and x > hi:
        raise ConfigError(f"{key}: must be at most {hi}")
    return x


def _num_list(x, key, positive=False, nonempty=True):
    if _is_num(x):
        x = [x]
    if not isinstance(x, list) or (nonempty and not x):
        raise ConfigError(f"{key}: expected a non-empty list of numbers")
    out = tuple(_num(v, key) for v in x)
    if positive and any(v <= 0 for v in out):
        raise ConfigError(f"{key}: values must be positive")
    return out


def _int_list(x, key, lo=1):
    if isinstance(x, int) and not isinstance(x, bool):
        x = [x]
    if not isinstance(x, list) or not x:
        raise ConfigError(f"{key}: expected a non-empty list of integers")
    return tuple(_int(v, key, lo) for v in x)


def _choice_list(x, key, choices, nonempty=True):
    if isinstance(x, str):
        x = [x]
    if not isinstance(x, list) or (nonempty and not x):
        raise ConfigError(f"{key}: expected a list of names")
    for v in x:
        if v not in choices:
            raise ConfigError(f"{key}: unknown entry {v!r}; choose from {list(choices)}")
    return tuple(x)


def _tensor(x, key):
    """Nested lists of floats, or a float for a bare number."""
    if x is None:
        return None
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number or nested list of numbers") from None
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{key}: entries must be finite")
    return arr.tolist() if arr.ndim else float(arr)


def _choice(x, key, choices):
    if x not in choices:
        raise ConfigError(f"{key}: expected one of {list(choices)}, got {x!r}")
    return x


def _str(x, key):
    if not isinstance(x, str):
        raise ConfigError(f"{key}: expected a string")
    return x


def _u64(x, key):
    x = _int(x, key, 0)
    if x >= 1 << 64:
        raise ConfigError(f"{key}: must fit in 64 bits")
    return x


# key -> (attribute, validator, default)
SCHEMA = {
    "p": ("p", lambda x, k: _int(x, k, 2), 2),
    "surface.d": ("surface_d", _tensor, None),
    "surface.e": ("surface_e", _tensor, None),
    "tensors.phi3": ("phi3", _tensor, None),
    "tensors.phi4": ("phi4", _tensor, None),
    "family.d0": ("family_d0", _tensor, None),
    "family.e0": ("family_e0", _tensor, None),
    "family.eps": ("family_eps", lambda x, k: _num_list(x, k, positive=True), (0.2, 0.1, 0.05)),
    "methods": ("methods", lambda x, k: _choice_list(x, k, SIM_METHODS), ("bp1",)),
    "scales.tau": ("scales_tau", lambda x, k: _num_list(x, k, positive=True), None),
    "scales.n": ("scales_n", lambda x, k: _int(x, k, 1), None),
    "scales.m": ("scales_m", _int_list, None),
    "scales.grid": ("scales_grid", lambda x, k: _choice(x, k, GRIDS), "diagonal"),
    "centers.lambda": ("centers_lambda", lambda x, k: _num_list(x, k), (1.0,)),
    "engine": ("engine", lambda x, k: _choice(x, k, ("mc", "quad", "quadrature")), "quadrature"),
    "mc.draws": ("mc_draws", lambda x, k: _int_list(x, k, 2), (100_000, 1_000)),
    "quad.nodes": ("quad_nodes", lambda x, k: _int(x, k, 2, MAX_GH_ORDER), 120),
    "quad.nested_nodes": ("quad_nested_nodes", lambda x, k: _int(x, k, 2, MAX_GH_ORDER), 12),
    "quad.tangent_nodes": ("quad_tangent_nodes", lambda x, k: _int(x, k, 2, MAX_GH_ORDER), 32),
    "seed": ("seed", _u64, 0),
    "threads": ("threads", lambda x, k: _int(x, k, 1), None),
    "output": ("output", _str, None),
    "verify.checks": ("verify_checks", None, None),
    "verify.inject": ("verify_inject", None, ()),
    "order.methods": ("order_methods", lambda x, k: _choice_list(x, k, ORDER_METHODS), ("naive", "pivot")),
    "order.alpha": ("order_alpha", _num, 0.05),
}


def _check_names(x, key):
    from .verify import INJECTABLE, SUITES

    choices = SUITES if key == "verify.checks" else INJECTABLE
    return _choice_list(x, key, tuple(choices), nonempty=False)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration. Attribute names mirror the dotted keys."""

    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and _canon(self.values) == _canon(other.values)

    # ---- derived objects ---------------------------------------------------
    def surface(self):
        from .geometry import BoundarySurface

        k = self.p - 1
        d = np.zeros((k, k)) if self.surface_d is None else np.asarray(self.surface_d, dtype=float).reshape(k, k)
        e = np.zeros((k,) * 3) if self.surface_e is None else np.asarray(self.surface_e, dtype=float).reshape((k,) * 3)
        return BoundarySurface(self.p, d, e)

    def tensors(self):
        from .tensors import PotentialTensors

        p = self.p
        f3 = np.zeros((p,) * 3) if self.phi3 is None else np.asarray(self.phi3, dtype=float).reshape((p,) * 3)
        f4 = np.zeros((p,) * 4) if self.phi4 is None else np.asarray(self.phi4, dtype=float).reshape((p,) * 4)
        return PotentialTensors(p, f3, f4)

    def family(self):
        from .bootstrap.order import SurfaceFamily

        k = self.p - 1
        if self.family_d0 is None:
            raise ConfigError("family.d0 is required for order studies")
        d0 = np.asarray(self.family_d0, dtype=float).reshape(k, k)
        e0 = None if self.family_e0 is None else np.asarray(self.family_e0, dtype=float).reshape((k,) * 3)
        return SurfaceFamily(d0, e0)

    def scales(self):
        from .bootstrap import ScaleSchedule

        if self.scales_tau is not None:
            return ScaleSchedule(self.scales_tau)
        if self.scales_m is not None:
            return ScaleSchedule.from_sizes(self.scales_n, self.scales_m)
        return ScaleSchedule()

    def to_text(self):
        """Dotted key-value text that parses back to an equal config."""
        lines = []
        for key, (attr, _, default) in SCHEMA.items():
            val = self.values[attr]
            if val is None:
                continue
            lines.append(f"{key} = {_toml_value(val)}")
        return "\n".join(lines) + "\n"


def _canon(v):
    if isinstance(v, dict):
        return {k: _canon(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return tuple(_canon(x) for x in v)
    return v


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _line_of(text, key):
    pat = re.compile(r"^\s*" + r"\s*\.\s*".join(re.escape(p) for p in key.split(".")) + r"\s*=")
    for i, line in enumerate(text.splitlines(), 1):
        if pat.match(line):
            return i
    leaf = key.split(".")[-1]
    for i, line in enumerate(text.splitlines(), 1):
        if re.search(r'(^|[\s".{,])' + re.escape(leaf) + r'"?\s*[=:]', line):
            return i
    return None


def parse_config(text: str, fmt: str = "auto") -> ExperimentConfig:
    """Parse and validate configuration text (``fmt`` is "toml", "json" or "auto")."""
    if fmt == "auto":
        fmt = "json" if text.lstrip().startswith("{") else "toml"
    try:
        raw = json.loads(text) if fmt == "json" else tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: {exc.msg}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table of keys")
    flat = _flatten(raw)

    def where(key):
        line = _line_of(text, key)
        return f"line {line}: " if line else ""

    values = {}
    for key, val in flat.items():
        if key not in SCHEMA:
            raise ConfigError(f"{where(key)}unknown key {key!r}")
        attr, check, _ = SCHEMA[key]
        check = check or _check_names
        try:
            values[attr] = check(val, key)
        except ConfigError as exc:
            raise ConfigError(f"{where(key)}{exc}") from None
    for key, (attr, _, default) in SCHEMA.items():
        values.setdefault(attr, default)
    if values["verify_checks"] is None:
        from .verify import SUITES

        values["verify_checks"] = tuple(SUITES)
    try:
        _cross_validate(values)
    except ConfigError as exc:
        raise ConfigError(f"{where(exc.key) if exc.key else ''}{exc}", exc.key) from None
    return ExperimentConfig(values)


def _cross_validate(v):
    if v["engine"] == "quad":
        v["engine"] = "quadrature"
    if (v["scales_m"] is None) != (v["scales_n"] is None):
        raise ConfigError("scales.n and scales.m must be given together", "scales.m" if v["scales_m"] else "scales.n")
    if v["scales_m"] is not None and v["scales_tau"] is not None:
        raise ConfigError("give either scales.tau or scales.n/scales.m, not both", "scales.tau")
    if not 0 < v["order_alpha"] < 1:
        raise ConfigError("order.alpha must be in (0, 1)", "order.alpha")
    k = v["p"] - 1
    shapes = {
        "surface_d": ("surface.d", (k, k)),
        "surface_e": ("surface.e", (k,) * 3),
        "family_d0": ("family.d0", (k, k)),
        "family_e0": ("family.e0", (k,) * 3),
        "phi3": ("tensors.phi3", (k + 1,) * 3),
        "phi4": ("tensors.phi4", (k + 1,) * 4),
    }
    for attr, (key, shape) in shapes.items():
        val = v[attr]
        if val is not None and np.asarray(val).size != int(np.prod(shape)):
            raise ConfigError(f"{key}: expected {int(np.prod(shape))} entries for p = {v['p']}", key)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    fmt = "json" if str(path).endswith(".json") else "auto"
    return parse_config(text, fmt)
