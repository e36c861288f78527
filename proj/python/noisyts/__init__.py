"""Thompson sampling for linear contextual bandits with noisy contexts."""

import json as _json

from . import _core
from ._core import (
    BOUNDS_HEADER,
    CSV_HEADER,
    BoundInputs,
    ConfigError,
    FitError,
    HypothesisError,
    NumericalError,
    fit,
    git_describe,
    isotropic_b,
    mi_delayed,
    mi_sum_unobserved,
    oracle_predictive,
    predictive_posterior,
    theorem1_bound,
    theorem2_bound,
    u_bound,
    verify,
)

__all__ = [
    "BOUNDS_HEADER",
    "CSV_HEADER",
    "BoundInputs",
    "ConfigError",
    "FitError",
    "HypothesisError",
    "NumericalError",
    "bounds_csv",
    "fit",
    "fit_fragment",
    "git_describe",
    "isotropic_b",
    "mi_delayed",
    "mi_sum_unobserved",
    "oracle_predictive",
    "predictive_posterior",
    "resolve_config",
    "run",
    "run_to_files",
    "theorem1_bound",
    "theorem2_bound",
    "u_bound",
    "verify",
]


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def resolve_config(config):
    """Config dict (or JSON text) with every default filled in."""
    return _json.loads(_core.resolve_config(_text(config)))


def run(config, workers=1):
    """Run an experiment. Returns the CSV columns as lists and the sidecar metadata as a dict."""
    out = _core.run(_text(config), workers)
    out["metadata"] = _json.loads(out["metadata"])
    return out


def run_to_files(config, out, workers=1):
    _core.run_to_files(_text(config), workers, str(out))


def bounds_csv(config):
    return _core.bounds_csv(_text(config))


def fit_fragment(rows, diagonal=False):
    return _json.loads(_core.fit_fragment(rows, diagonal))
