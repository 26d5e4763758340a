"""Rigged null submanifolds: frames, induced objects and identity checks."""

__version__ = "0.1.0"

from .errors import ConfigurationError, NullRigError, NumericalError, UnsupportedError
from .induced import GeometryBundle
from .verifier import IdentityCheck, ResidualReport, run_suite

__all__ = [
    "GeometryBundle", "IdentityCheck", "ResidualReport", "run_suite",
    "NullRigError", "NumericalError", "ConfigurationError", "UnsupportedError",
]
