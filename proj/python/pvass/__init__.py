"""Termination-order analysis and simulation for VASS MDPs.

Thin wrapper over the C++ core: structured results cross the boundary as
JSON and are decoded here.
"""

import json

from ._core import (
    Model,
    check_certificate_json,
    fit_exponent,
    parse_model,
    run_cli,
    validate,
)
from . import _core

__all__ = [
    "Model",
    "parse_model",
    "validate",
    "analyze",
    "mec_decomposition",
    "increments",
    "scheme_info",
    "simulate",
    "check_certificate",
    "fit_exponent",
    "run_cli",
]


def analyze(model, mode):
    """Decide the termination order; mode is "demonic" or "angelic"."""
    return json.loads(_core.analyze_json(model, mode))


def mec_decomposition(model):
    return json.loads(_core.mec_json(model))


def increments(model):
    return json.loads(_core.increments_json(model))


def scheme_info(model, n):
    return json.loads(_core.scheme_json(model, n))


def simulate(model, strategy, n_grid, trials, seed, horizon=0, event="", start="", jobs=1):
    """Monte-Carlo termination statistics for a built-in strategy."""
    return json.loads(
        _core.simulate_json(model, strategy, list(n_grid), trials, seed, horizon, event, start, jobs)
    )


def check_certificate(model, certificate):
    """Validate a ranking certificate (dict or JSON string) against a model."""
    if not isinstance(certificate, str):
        certificate = json.dumps(certificate)
    ok, violation = check_certificate_json(model, certificate)
    return ok, violation
