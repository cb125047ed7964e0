"""Design and characterization toolkit for kinetic-inductance traveling-wave parametric amplifiers."""

__version__ = "0.1.0"

from .errors import ComputationError, DataError, KitwpaError  # noqa: E402

__all__ = ["__version__", "KitwpaError", "DataError", "ComputationError"]
