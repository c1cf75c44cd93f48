"""Experiment configuration: a JSON document validated against a strict
schema (unknown keys rejected), then materialized into target, pool and
scheme objects.

A config is either *static* (pool + schemes + sample sizes) or
*adaptive* (an `adaptive` block instead of `pool`/`schemes`). Numbers
are plain JSON numbers, so parsing is locale-independent.
"""

from __future__ import annotations

import json
import os

import jsonschema
import numpy as np

from .adaptive import WEIGHTING_VARIANTS, AdaptiveConfig
from .errors import ConfigError
from .estimators import Estimand
from .proposals import ProposalPool, uniform_locations
from .schemes import NAMED_SCHEMES, SchemeSpec
from .targets import TargetDensity, equal_gaussian_mixture_1d
from .variance import RunningExampleConfig

_NUM = {"type": "number"}
_POS_INT = {"type": "integer", "minimum": 1}
_MATRIX = {"type": "array", "minItems": 1,
           "items": {"type": "array", "minItems": 1, "items": _NUM}}

_TARGET_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["family"],
    "properties": {
        "family": {"enum": ["gaussian_mixture", "ggd_mixture", "banana",
                            "running_example"]},
        "weights": {"type": "array", "items": _NUM},
        "means": _MATRIX,
        "variances": {"type": "array", "items": _NUM},
        "covariances": {"type": "array"},
        "mu": _NUM,
        "sigma": {"type": "number", "exclusiveMinimum": 0},
        "locations": _MATRIX,
        "alpha": _NUM,
        "beta": _NUM,
        "sigma2": {"type": "number", "exclusiveMinimum": 0},
        "b": _NUM,
        "dim": _POS_INT,
    },
}

_POOL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["family"],
    "properties": {
        "family": {"enum": ["gaussian", "student_t"]},
        "locations": _MATRIX,
        "random_locations": {
            "type": "object",
            "additionalProperties": False,
            "required": ["count", "low", "high", "dim"],
            "properties": {"count": _POS_INT, "low": _NUM, "high": _NUM,
                           "dim": _POS_INT},
        },
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "scales": {"type": "array", "items": _NUM},
        "dof": {"type": "number", "exclusiveMinimum": 0},
    },
}

_SCHEME_ITEM = {
    "oneOf": [
        {"enum": sorted(NAMED_SCHEMES)},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["mode", "option"],
            "properties": {
                "mode": {"enum": ["S1", "S2", "S3"]},
                "option": {"enum": ["W1", "W2", "W3", "W4", "W5"]},
            },
        },
    ]
}

_ADAPTIVE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["adapter", "weighting", "chains", "iterations",
                 "upper_scale", "lower_scale", "init_region"],
    "properties": {
        "adapter": {"enum": ["lais", "pmc"]},
        "weighting": {"enum": list(WEIGHTING_VARIANTS)},
        "chains": _POS_INT,
        "iterations": _POS_INT,
        "upper_scale": {"type": "number", "minimum": 0},
        "lower_scale": {"type": "number", "exclusiveMinimum": 0},
        "init_region": {"type": "array", "minItems": 1,
                        "items": {"type": "array", "minItems": 2,
                                  "maxItems": 2, "items": _NUM}},
        "allow_full_mixture": {"type": "boolean"},
    },
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment", "seed", "replicates", "target"],
    "properties": {
        "experiment": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "replicates": _POS_INT,
        "output": {"type": "string", "minLength": 1},
        "target": _TARGET_SCHEMA,
        "pool": _POOL_SCHEMA,
        "schemes": {"type": "array", "minItems": 1, "items": _SCHEME_ITEM},
        "expert": {"type": "boolean"},
        "estimand": {"enum": ["identity", "square"]},
        "estimators": {"type": "array", "minItems": 1,
                       "items": {"enum": ["z", "mean", "self"]}},
        "sample_sizes": {"type": "array", "minItems": 1, "items": _POS_INT},
        "analytic_oracle": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mu", "sigma"],
            "properties": {"mu": _NUM,
                           "sigma": {"type": "number", "exclusiveMinimum": 0}},
        },
        "adaptive": _ADAPTIVE_SCHEMA,
    },
}


def load_config(path: str) -> dict:
    """Parse and validate one config file; raise ConfigError with the
    offending location on any problem."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    return validate_config(doc, source=path)


def validate_config(doc: dict, source: str = "<config>") -> dict:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(f"{source}: invalid field {where}: {exc.message}") from exc
    static = "pool" in doc
    adaptive = "adaptive" in doc
    if static == adaptive:
        raise ConfigError(f"{source}: exactly one of 'pool' or 'adaptive' "
                          "must be present")
    if static and "schemes" not in doc:
        raise ConfigError(f"{source}: static experiments need 'schemes'")
    if static and "sample_sizes" not in doc:
        raise ConfigError(f"{source}: static experiments need 'sample_sizes'")
    if any(isinstance(s, dict) for s in doc.get("schemes", ())) \
            and not doc.get("expert", False):
        raise ConfigError(f"{source}: raw mode/option scheme pairs need "
                          "\"expert\": true")
    _check_target(doc["target"], source)
    return doc


def _check_target(t: dict, source: str):
    fam = t["family"]
    required = {
        "gaussian_mixture": ("weights", "means"),
        "ggd_mixture": ("locations", "alpha", "beta"),
        "banana": (),
        "running_example": ("mu",),
    }[fam]
    for key in required:
        if key not in t:
            raise ConfigError(f"{source}: target family {fam!r} needs {key!r}")
    if fam == "gaussian_mixture" and ("variances" in t) == ("covariances" in t):
        raise ConfigError(f"{source}: gaussian_mixture target needs exactly "
                          "one of 'variances' or 'covariances'")


def build_target(doc: dict) -> TargetDensity:
    t = doc["target"]
    fam = t["family"]
    if fam == "running_example":
        cfg = RunningExampleConfig(t["mu"], t.get("sigma", 1.0))
        return cfg.target()
    if fam == "gaussian_mixture":
        means = np.asarray(t["means"], dtype=float)
        if "variances" in t:
            d = means.shape[1]
            cov = np.stack([v * np.eye(d) for v in t["variances"]])
        else:
            cov = np.asarray(t["covariances"], dtype=float)
        return TargetDensity.gaussian_mixture(t["weights"], means, cov)
    if fam == "ggd_mixture":
        locs = np.asarray(t["locations"], dtype=float)
        return TargetDensity.ggd_mixture(locs, t["alpha"], t["beta"])
    return TargetDensity.banana(t.get("sigma2", 4.0), t.get("b", 3.0),
                                t.get("dim", 2))


def build_pool(doc: dict, rng=None) -> ProposalPool:
    """Materialize the pool; random proposal locations consume `rng`."""
    p = doc["pool"]
    if ("locations" in p) == ("random_locations" in p):
        raise ConfigError("pool needs exactly one of 'locations' or "
                          "'random_locations'")
    if "random_locations" in p:
        r = p["random_locations"]
        if rng is None:
            raise ConfigError("random proposal locations need an rng")
        locations = uniform_locations(r["count"], r["low"], r["high"],
                                      r["dim"], rng)
    else:
        locations = np.asarray(p["locations"], dtype=float)
    scales = p.get("scales", p.get("scale", 1.0))
    if p["family"] == "student_t":
        if "dof" not in p:
            raise ConfigError("student_t pool needs 'dof'")
        return ProposalPool.student_t(locations, scales, p["dof"])
    return ProposalPool.gaussian(locations, scales)


def build_schemes(doc: dict, n_proposals: int, sample_size: int) -> list:
    """SchemeSpecs for one sample size M; M must be a whole number of
    blocks of N samples."""
    if sample_size % n_proposals != 0:
        raise ConfigError(f"sample size {sample_size} is not a multiple of "
                          f"the pool size {n_proposals}")
    blocks = sample_size // n_proposals
    specs = []
    for s in doc["schemes"]:
        if isinstance(s, str):
            specs.append(SchemeSpec.from_name(s, blocks))
        else:
            specs.append(SchemeSpec.from_pair(s["mode"], s["option"], blocks))
    return specs


def build_estimand(doc: dict) -> Estimand:
    return Estimand.from_name(doc.get("estimand", "identity"))


def build_adaptive(doc: dict) -> AdaptiveConfig:
    a = doc["adaptive"]
    return AdaptiveConfig(
        chains=a["chains"], iterations=a["iterations"],
        upper_scale=a["upper_scale"], lower_scale=a["lower_scale"],
        adapter=a["adapter"], weighting=a["weighting"],
        init_region=np.asarray(a["init_region"], dtype=float),
        allow_full_mixture=a.get("allow_full_mixture", False))
