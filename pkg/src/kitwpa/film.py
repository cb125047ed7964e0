"""Superconducting film records, T_c extraction and kinetic inductance.

Two routes to the kinetic inductance are provided: the BCS estimate from the
critical temperature and normal-state sheet resistance, and the inversion of
a measured resonance frequency for a lumped resonator of known geometric
inductance and capacitance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import BCS_GAP_RATIO, HBAR, KB
from .errors import (
    DataError,
    IncomparableMethods,
    NegativeResult,
    NoCrossing,
    NonMonotonicBracket,
    NonPositiveTc,
    NoPlateau,
)

PLATEAU_FRACTION = 0.10  # top share of the temperature range used as normal state
PLATEAU_TOLERANCE = 0.05  # allowed relative spread of the plateau


@dataclass(frozen=True)
class TransitionCurve:
    """Resistance against temperature through the superconducting transition."""

    temperature: np.ndarray  # K
    resistance: np.ndarray  # ohm
    film_id: str = ""
    deposition_batch: str = ""

    def __post_init__(self):
        t = np.asarray(self.temperature, dtype=float)
        r = np.asarray(self.resistance, dtype=float)
        object.__setattr__(self, "temperature", t)
        object.__setattr__(self, "resistance", r)
        if t.ndim != 1 or t.shape != r.shape:
            raise DataError("temperature and resistance must be 1-d arrays of equal length")
        if t.size < 4:
            raise DataError("a transition curve needs at least 4 samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
            raise DataError("transition curve contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise DataError("temperatures must be strictly increasing")
        if np.any(r < 0):
            raise DataError("resistances must be non-negative")

    @classmethod
    def from_samples(cls, samples, film_id: str = "", deposition_batch: str = "") -> "TransitionCurve":
        arr = np.asarray(samples, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], film_id, deposition_batch)

    def scaled(self, alpha: float) -> "TransitionCurve":
        return TransitionCurve(self.temperature, alpha * self.resistance, self.film_id, self.deposition_batch)


@dataclass(frozen=True)
class FilmProperties:
    tc: float  # K
    rn_sheet: float  # ohm / sq
    lk_sheet: float = 0.0  # H / sq
    i_star: float | None = None  # A
    i_c: float | None = None  # A
    thickness: float | None = None  # m, informational

    def __post_init__(self):
        if not self.tc > 0:
            raise NonPositiveTc(f"tc must be positive, got {self.tc}")
        if self.rn_sheet < 0 or self.lk_sheet < 0:
            raise DataError("rn_sheet and lk_sheet must be non-negative")
        if self.i_star is not None and not self.i_star > 0:
            raise DataError("i_star must be positive when set")
        if self.i_c is not None and self.i_c < 0:
            raise DataError("i_c must be non-negative when set")

    @property
    def nonlinearity(self) -> float | None:
        if self.i_c is None or self.i_star is None:
            return None
        return self.i_c / self.i_star


def plateau_resistance(
    curve: TransitionCurve,
    fraction: float = PLATEAU_FRACTION,
    tolerance: float = PLATEAU_TOLERANCE,
) -> float:
    """Median resistance of the top ``fraction`` of the temperature range.

    Raises :class:`NoPlateau` when those samples spread by more than
    ``tolerance`` relative to their median.
    """
    t, r = curve.temperature, curve.resistance
    t_cut = t[-1] - fraction * (t[-1] - t[0])
    top = r[t >= t_cut]
    if top.size < 2:
        raise NoPlateau(f"fewer than two samples in the top {fraction:.0%} of the temperature range")
    med = float(np.median(top))
    if med <= 0:
        raise NoPlateau("normal-state resistance is zero")
    spread = float((top.max() - top.min()) / med)
    if spread >= tolerance:
        raise NoPlateau(f"normal-state samples spread by {spread:.1%} (limit {tolerance:.0%})")
    return med


def _crossing(t, rn, criterion):
    """First upward crossing of ``criterion`` and whether the curve re-crosses it."""
    below = rn < criterion
    up = np.flatnonzero(below[:-1] & ~below[1:])
    if up.size == 0:
        raise NoCrossing(f"normalized resistance never rises through {criterion}")
    i = int(up[0])
    r0, r1 = rn[i], rn[i + 1]
    tc = t[i] + (criterion - r0) / (r1 - r0) * (t[i + 1] - t[i])
    return float(tc), bool(up.size > 1 or np.any(below[i + 1 :]))


def extract_tc_detail(
    curve: TransitionCurve,
    criterion: float = 0.5,
    fraction: float = PLATEAU_FRACTION,
    tolerance: float = PLATEAU_TOLERANCE,
) -> tuple[float, float, tuple[str, ...]]:
    """``(tc, plateau resistance, notes)`` without emitting warnings."""
    if not 0.0 < criterion < 1.0:
        raise DataError("criterion must lie strictly between 0 and 1")
    rn_plateau = plateau_resistance(curve, fraction, tolerance)
    tc, rebound = _crossing(curve.temperature, curve.resistance / rn_plateau, criterion)
    notes = ()
    if rebound:
        notes = (f"{curve.film_id or 'curve'}: transition is not monotonic around the {criterion} crossing; "
                 f"first upward crossing used",)
    return tc, rn_plateau, notes


def extract_tc(
    curve: TransitionCurve,
    criterion: float = 0.5,
    fraction: float = PLATEAU_FRACTION,
    tolerance: float = PLATEAU_TOLERANCE,
) -> float:
    """Temperature where R/R_n first rises through ``criterion`` [K]."""
    tc, _, notes = extract_tc_detail(curve, criterion, fraction, tolerance)
    for msg in notes:
        warnings.warn(msg, NonMonotonicBracket, stacklevel=2)
    return tc


def transition_width(curve: TransitionCurve, lo: float = 0.1, hi: float = 0.9) -> float:
    """Temperature span between the ``lo`` and ``hi`` resistance criteria [K]."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonMonotonicBracket)
        return extract_tc(curve, hi) - extract_tc(curve, lo)


def lk_from_tc(tc: float, rn_sheet: float) -> float:
    """BCS kinetic sheet inductance ``hbar R_n / (1.76 pi k_B T_c)`` [H/sq]."""
    if not tc > 0:
        raise NonPositiveTc(f"tc must be positive, got {tc}")
    if rn_sheet < 0:
        raise DataError("rn_sheet must be non-negative")
    return HBAR * rn_sheet / (BCS_GAP_RATIO * math.pi * KB * tc)


def resonance_frequency(l_total: float, c: float) -> float:
    """``1 / (2 pi sqrt(L C))`` [Hz]."""
    return 1.0 / (2.0 * math.pi * math.sqrt(l_total * c))


def lk_from_sim(f0: float, lg: float, c: float) -> float:
    """Kinetic inductance that puts a lumped resonator at ``f0`` [H]."""
    if not (f0 > 0 and c > 0 and lg >= 0):
        raise DataError("lk_from_sim needs f0 > 0, c > 0 and lg >= 0")
    l_total = 1.0 / ((2.0 * math.pi * f0) ** 2 * c)
    lk = l_total - lg
    if lk < 0:
        # tolerate round-off when the geometric inductance alone sets f0
        if lk > -1e-12 * l_total:
            return 0.0
        raise NegativeResult(
            f"geometric inductance {lg:.4g} H exceeds the total {l_total:.4g} H implied by f0 = {f0:.6g} Hz"
        )
    return lk


def relative_deviation(lk_tc: float, lk_sim: float) -> float:
    """``|lk_sim - lk_tc| / lk_tc``."""
    if lk_tc == 0:
        raise IncomparableMethods("the T_c estimate is zero; relative deviation is undefined")
    return abs(lk_sim - lk_tc) / abs(lk_tc)


@dataclass(frozen=True)
class LkComparison:
    lk_tc: float  # H, T_c route scaled by squares
    lk_sim: float  # H, resonance route
    relative_deviation: float
    squares: float
    tc: float
    rn_sheet: float
    f0: float
    lg: float
    c: float


def compare_lk_methods(film: FilmProperties, f0: float, lg: float, c: float, squares: float = 1.0) -> LkComparison:
    """Compare the T_c and resonance estimates of the device kinetic inductance.

    The sheet value from the T_c route is multiplied by ``squares`` so both
    numbers refer to the same device.
    """
    if not squares > 0:
        raise DataError("squares must be positive")
    lk_tc = lk_from_tc(film.tc, film.rn_sheet) * squares
    lk_sim = lk_from_sim(f0, lg, c)
    return LkComparison(lk_tc, lk_sim, relative_deviation(lk_tc, lk_sim), squares, film.tc, film.rn_sheet, f0, lg, c)


__all__ = [
    "TransitionCurve",
    "FilmProperties",
    "LkComparison",
    "plateau_resistance",
    "extract_tc",
    "extract_tc_detail",
    "transition_width",
    "lk_from_tc",
    "lk_from_sim",
    "resonance_frequency",
    "relative_deviation",
    "compare_lk_methods",
]
