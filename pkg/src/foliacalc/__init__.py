"""Exact computations on invariant coframe models of foliated manifolds."""

from .exterior import Form, contract, hodge, pointwise_inner, volume, wedge
from .model import (
    Check,
    CoframeModel,
    Diagnostics,
    ManifestError,
    differential,
    parse_form,
    parse_manifest,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Check",
    "CoframeModel",
    "Diagnostics",
    "Form",
    "ManifestError",
    "contract",
    "differential",
    "hodge",
    "parse_form",
    "parse_manifest",
    "pointwise_inner",
    "validate",
    "volume",
    "wedge",
]
