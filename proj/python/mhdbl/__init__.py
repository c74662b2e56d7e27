"""Boundary-layer MHD solver and verifier."""

import json

from . import _mhdbl
from ._mhdbl import ConfigError, FormatError, canonical_config, fit_decay, sup_constants

__all__ = ["ConfigError", "FormatError", "canonical_config", "fit_decay", "simulate", "sup_constants", "verify"]


def simulate(text, overrides=None):
    """Run a config text. Returns (columns, summary) with columns name -> list."""
    cols, summary = _mhdbl.simulate(text, {k: str(v) for k, v in (overrides or {}).items()})
    return cols, json.loads(summary)


def verify(suite, seed=1):
    return json.loads(_mhdbl.verify(suite, seed))
