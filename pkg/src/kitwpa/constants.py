"""Exact 2019 SI constants. Fixed on purpose; not configurable."""

from typing import Final

HBAR: Final[float] = 1.054571817e-34  # J s
KB: Final[float] = 1.380649e-23  # J / K

# BCS weak-coupling gap ratio Delta(0) = 1.76 k_B T_c
BCS_GAP_RATIO: Final[float] = 1.76
