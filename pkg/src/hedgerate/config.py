"""Experiment configuration: a versioned JSON document with strict validation.

Schema (schema_version 1), all keys optional unless noted:

    {
      "schema_version": 1,
      "beta": 0.5,                     # required, in (0, 1]
      "horizon": 1.0,
      "payoff": {"kind": "indicator", "strike": 0.0},   # required
      "truncation_order": 64,
      "n_values": [4, 8, 16, 32, 64, 128, 256],
      "n_paths": 100000,
      "seed": 2024,
      "theta": null,                   # null -> smoothness-based policy
      "output_path": "hedgerate-out"
    }

Payoff kinds and their keys: indicator/call (strike, default 0.0),
pure_hermite (degree, required), polynomial (coefficients, required),
tabulated (grid, values, required).  Unknown keys anywhere are rejected so
typos fail loudly; every violation is collected, not just the first.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .payoffs import PayoffSpec

SCHEMA_VERSION = 1
DEFAULT_N_VALUES = (4, 8, 16, 32, 64, 128, 256)
DEFAULT_N_PATHS = 100_000
DEFAULT_TRUNCATION = 64
DEFAULT_SEED = 2024
OUTPUT_DIR_ENV = "HEDGERATE_OUTPUT_DIR"

_TOP_KEYS = {
    "schema_version",
    "beta",
    "horizon",
    "payoff",
    "truncation_order",
    "n_values",
    "n_paths",
    "seed",
    "theta",
    "output_path",
}
_PAYOFF_KEYS = {
    "indicator": {"kind", "strike"},
    "call": {"kind", "strike"},
    "pure_hermite": {"kind", "degree"},
    "polynomial": {"kind", "coefficients"},
    "tabulated": {"kind", "grid", "values"},
}


class ConfigError(ValueError):
    """All validation failures of one document, collected."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


def default_output_path() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "hedgerate-out")


@dataclass(frozen=True)
class ExperimentConfig:
    beta: float
    payoff: PayoffSpec
    horizon: float = 1.0
    truncation_order: int = DEFAULT_TRUNCATION
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    n_paths: int = DEFAULT_N_PATHS
    seed: int = DEFAULT_SEED
    theta: float | None = None
    output_path: str = field(default_factory=default_output_path)

    def to_dict(self) -> dict:
        payoff: dict = {"kind": self.payoff.kind}
        if self.payoff.kind in ("indicator", "call"):
            payoff["strike"] = self.payoff.strike
        elif self.payoff.kind == "pure_hermite":
            payoff["degree"] = self.payoff.degree
        elif self.payoff.kind == "polynomial":
            payoff["coefficients"] = list(self.payoff.coefficients)
        else:
            payoff["grid"] = list(self.payoff.grid)
            payoff["values"] = list(self.payoff.values)
        return {
            "schema_version": SCHEMA_VERSION,
            "beta": self.beta,
            "horizon": self.horizon,
            "payoff": payoff,
            "truncation_order": self.truncation_order,
            "n_values": list(self.n_values),
            "n_paths": self.n_paths,
            "seed": self.seed,
            "theta": self.theta,
            "output_path": self.output_path,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _payoff_from_dict(doc: dict, errors: list[str]) -> PayoffSpec | None:
    if not isinstance(doc, dict):
        errors.append("payoff: must be an object with a 'kind' key")
        return None
    kind = doc.get("kind")
    if kind not in _PAYOFF_KEYS:
        errors.append(
            f"payoff.kind: must be one of {sorted(_PAYOFF_KEYS)}, got {kind!r}"
        )
        return None
    unknown = set(doc) - _PAYOFF_KEYS[kind]
    if unknown:
        errors.append(f"payoff: unknown keys for kind {kind!r}: {sorted(unknown)}")
        return None
    try:
        if kind in ("indicator", "call"):
            strike = _as_float(doc.get("strike", 0.0), "payoff.strike", errors)
            if strike is None:
                return None
            return PayoffSpec(kind=kind, strike=strike)
        if kind == "pure_hermite":
            if "degree" not in doc:
                errors.append("payoff.degree: required for pure_hermite")
                return None
            return PayoffSpec.pure_hermite(int(doc["degree"]))
        if kind == "polynomial":
            if "coefficients" not in doc:
                errors.append("payoff.coefficients: required for polynomial")
                return None
            return PayoffSpec.polynomial(doc["coefficients"])
        if "grid" not in doc or "values" not in doc:
            errors.append("payoff.grid and payoff.values: required for tabulated")
            return None
        return PayoffSpec.tabulated(doc["grid"], doc["values"])
    except (TypeError, ValueError) as exc:
        errors.append(f"payoff: {exc}")
        return None


def _as_float(v, name: str, errors: list[str]) -> float | None:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errors.append(f"{name}: must be a number, got {v!r}")
        return None
    v = float(v)
    if not math.isfinite(v):
        errors.append(f"{name}: must be finite, got {v!r}")
        return None
    return v


def _as_int(v, name: str, errors: list[str]) -> int | None:
    if isinstance(v, bool) or not isinstance(v, int):
        errors.append(f"{name}: must be an integer, got {v!r}")
        return None
    return v


def parse_config(source) -> ExperimentConfig:
    """Parse and validate a config document (JSON text or an already-loaded dict).

    Raises ConfigError carrying every violation found.
    """
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"document is not valid JSON: {exc}"]) from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ConfigError(["top-level document must be a JSON object"])

    errors: list[str] = []
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        errors.append(f"unknown keys: {sorted(unknown)}")

    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    beta = None
    if "beta" not in doc:
        errors.append("beta: required, in (0, 1]")
    else:
        beta = _as_float(doc["beta"], "beta", errors)
        if beta is not None and not (0.0 < beta <= 1.0):
            errors.append(f"beta: must be in (0, 1], got {beta}")
            beta = None

    horizon = _as_float(doc.get("horizon", 1.0), "horizon", errors)
    if horizon is not None and horizon <= 0.0:
        errors.append(f"horizon: must be > 0, got {horizon}")
        horizon = None

    payoff = None
    if "payoff" not in doc:
        errors.append("payoff: required")
    else:
        payoff = _payoff_from_dict(doc["payoff"], errors)

    trunc = _as_int(doc.get("truncation_order", DEFAULT_TRUNCATION), "truncation_order", errors)
    if trunc is not None and trunc < 0:
        errors.append(f"truncation_order: must be >= 0, got {trunc}")
        trunc = None

    n_values_raw = doc.get("n_values", list(DEFAULT_N_VALUES))
    n_values = None
    if not isinstance(n_values_raw, (list, tuple)) or not n_values_raw:
        errors.append("n_values: must be a nonempty list of integers")
    else:
        vals = [_as_int(v, "n_values[*]", errors) for v in n_values_raw]
        if all(v is not None for v in vals):
            if any(v < 1 for v in vals):
                errors.append(f"n_values: all entries must be >= 1, got {vals}")
            elif sorted(set(vals)) != vals:
                errors.append(f"n_values: must be strictly increasing, got {vals}")
            else:
                n_values = tuple(vals)

    n_paths = _as_int(doc.get("n_paths", DEFAULT_N_PATHS), "n_paths", errors)
    if n_paths is not None and n_paths < 2:
        errors.append(f"n_paths: must be >= 2, got {n_paths}")
        n_paths = None

    seed = _as_int(doc.get("seed", DEFAULT_SEED), "seed", errors)
    if seed is not None and not (0 <= seed < 2**64):
        errors.append(f"seed: must be an unsigned 64-bit integer, got {seed}")
        seed = None

    theta = doc.get("theta")
    if theta is not None:
        theta = _as_float(theta, "theta", errors)
        if theta is not None and not (0.0 < theta < 1.0):
            errors.append(f"theta: must be in (0, 1), got {theta}")
            theta = None

    output_path = doc.get("output_path", default_output_path())
    if not isinstance(output_path, str) or not output_path:
        errors.append(f"output_path: must be a nonempty string, got {output_path!r}")
        output_path = None

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        beta=beta,
        horizon=horizon,
        payoff=payoff,
        truncation_order=trunc,
        n_values=n_values,
        n_paths=n_paths,
        seed=seed,
        theta=theta,
        output_path=output_path,
    )
