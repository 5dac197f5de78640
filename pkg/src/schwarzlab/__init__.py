"""Numerical laboratory for Schwarz functions and free-boundary regularity."""

__version__ = "0.1.0"

from .errors import SchwarzLabError  # noqa: E402
from .tolerances import DEFAULTS, Tolerances  # noqa: E402

__all__ = ["DEFAULTS", "SchwarzLabError", "Tolerances", "__version__"]
