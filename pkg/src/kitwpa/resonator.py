"""Resonance fitting and extraction of the nonlinearity scale I*.

A probe power ``P`` maps to an RMS current through an externally supplied
factor ``beta`` (``I^2 = beta P``). The kinetic inductance at each power
follows from ``(2 pi f0)^-2 = (L_k + L_g) C`` and is regressed against
``I^2``: ``L_k(I) = L_k0 (1 + (I/I*)^2)`` is a straight line with slope
``L_k0 / I*^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    DataError,
    FitDiverged,
    NegativeLk,
    NonlinearityUndetectable,
    NonMonotonicShift,
    NonPositiveBeta,
    NonPositiveIStar,
    NoResonance,
)

MAX_NFEV = 200
NOISE_FACTOR = 3.0  # dip must exceed this many baseline noise widths
MIN_POINTS = 16
LITERATURE_NONLINEARITY = 0.34  # I_c / I* benchmark line for NbTiN


@dataclass(frozen=True)
class S21Sweep:
    frequency: np.ndarray  # Hz
    s21_db: np.ndarray  # dB
    probe_power: float = math.nan  # dBm
    resonator_id: str = ""
    phase: np.ndarray | None = None  # rad, optional and unused by the magnitude fit

    def __post_init__(self):
        f = np.asarray(self.frequency, dtype=float)
        s = np.asarray(self.s21_db, dtype=float)
        object.__setattr__(self, "frequency", f)
        object.__setattr__(self, "s21_db", s)
        if f.ndim != 1 or f.shape != s.shape:
            raise DataError("frequency and s21_db must be 1-d arrays of equal length")
        if f.size < MIN_POINTS:
            raise DataError(f"an S21 sweep needs at least {MIN_POINTS} points, got {f.size}")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(s))):
            raise DataError("S21 sweep contains non-finite values")
        if np.any(np.diff(f) <= 0):
            raise DataError("frequencies must be strictly increasing")

    def shifted(self, delta: float) -> "S21Sweep":
        return S21Sweep(self.frequency + delta, self.s21_db, self.probe_power, self.resonator_id, self.phase)


@dataclass(frozen=True)
class ResonanceFit:
    f0: float  # Hz
    q_loaded: float
    depth_db: float
    asymmetry: float
    baseline_db: float
    residual_rms: float  # dB
    nfev: int = 0


def resonance_model(f, f0, q_loaded, depth_db, asymmetry, baseline_db):
    """Skewed-Lorentzian dip in |S21| [dB]."""
    x = (np.asarray(f, dtype=float) - f0) / (f0 / q_loaded)
    dip = (1.0 - 10.0 ** (-depth_db / 10.0)) * (1.0 + 2.0 * asymmetry * x) / (1.0 + 4.0 * x * x)
    return baseline_db + 10.0 * np.log10(np.maximum(1.0 - dip, 1e-30))


def _noise_level(s):
    # robust scatter of first differences: blind to a smooth dip
    d = np.diff(s)
    return 1.4826 * float(np.median(np.abs(d - np.median(d)))) / math.sqrt(2.0)


def _initial_guess(f, s):
    n_edge = max(2, f.size // 10)
    baseline = float(np.median(np.concatenate([s[:n_edge], s[-n_edge:]])))
    j = int(np.argmin(s))
    depth = baseline - float(s[j])
    # full width at half depth on the linear power scale
    half = baseline + 10.0 * math.log10(0.5 * (1.0 + 10.0 ** (-depth / 10.0)))
    lo = j
    while lo > 0 and s[lo] < half:
        lo -= 1
    hi = j
    while hi < f.size - 1 and s[hi] < half:
        hi += 1
    width = max(float(f[hi] - f[lo]), float(np.min(np.diff(f))))
    return float(f[j]), float(f[j]) / width, depth, baseline


def fit_resonance(sweep: S21Sweep) -> ResonanceFit:
    """Least-squares skewed-Lorentzian fit of one magnitude trace."""
    f, s = sweep.frequency, sweep.s21_db
    f_init, q_init, depth_init, base_init = _initial_guess(f, s)
    noise = _noise_level(s)
    if not (depth_init > NOISE_FACTOR * noise and depth_init > 1e-6):
        raise NoResonance(
            f"deepest point is {depth_init:.3g} dB below baseline; noise is {noise:.3g} dB"
        )
    lw = f_init / q_init
    # parameters: f0 offset in initial linewidths, log(Q/Q_init), depth, asymmetry, baseline
    p0 = np.array([0.0, 0.0, depth_init, 0.0, base_init])
    lo = np.array([(f[0] - f_init) / lw, -math.log(50.0), 0.0, -1.0, base_init - 10.0])
    hi = np.array([(f[-1] - f_init) / lw, math.log(50.0), max(80.0, 2 * depth_init), 1.0, base_init + 10.0])
    p0 = np.clip(p0, lo + 1e-12, hi - 1e-12)

    def unpack(p):
        return f_init + p[0] * lw, q_init * math.exp(p[1]), p[2], p[3], p[4]

    def resid(p):
        return resonance_model(f, *unpack(p)) - s

    res = least_squares(resid, p0, bounds=(lo, hi), max_nfev=MAX_NFEV, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if res.status == 0:
        raise FitDiverged(f"resonance fit hit the {MAX_NFEV}-evaluation cap")
    if not res.success or not np.all(np.isfinite(res.x)):
        raise FitDiverged(f"resonance fit failed: {res.message}")
    f0, q, depth, asym, base = unpack(res.x)
    if not (f[0] <= f0 <= f[-1]) or not q > 0:
        raise FitDiverged("fitted resonance left the sweep span")
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return ResonanceFit(float(f0), float(q), float(depth), float(asym), float(base), rms, int(res.nfev))


def power_to_current(p_dbm: float, beta: float) -> float:
    """RMS current ``sqrt(beta * P)`` for a probe power in dBm [A]."""
    if not beta > 0:
        raise NonPositiveBeta(f"beta must be positive, got {beta}")
    if p_dbm == -math.inf:
        return 0.0
    return math.sqrt(beta * 10.0 ** ((p_dbm - 30.0) / 10.0))


@dataclass(frozen=True)
class PowerSweep:
    entries: tuple[tuple[float, ResonanceFit], ...]  # (probe power dBm, fit)
    beta: float  # A^2 / W
    lg: float  # H
    c: float  # F

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e[0])))
        if not self.beta > 0:
            raise NonPositiveBeta(f"beta must be positive, got {self.beta}")
        if len(self.entries) < 2:
            raise DataError("a power sweep needs at least two powers")
        powers = [p for p, _ in self.entries]
        if len(set(powers)) != len(powers):
            raise DataError("probe powers must be distinct")
        if not (self.c > 0 and self.lg >= 0):
            raise DataError("power sweep needs c > 0 and lg >= 0")

    @classmethod
    def from_f0(cls, powers, f0s, beta, lg, c) -> "PowerSweep":
        """Sweep from bare resonance frequencies (other fit fields left blank)."""
        entries = tuple(
            (float(p), ResonanceFit(float(f), math.nan, math.nan, 0.0, 0.0, 0.0)) for p, f in zip(powers, f0s)
        )
        return cls(entries, beta, lg, c)


@dataclass(frozen=True)
class IStarResult:
    i_star: float  # A
    lk0: float  # H
    fit_r_squared: float
    points_used: int
    slope: float  # H / A^2
    slope_stderr: float
    current: np.ndarray  # A, per power
    lk: np.ndarray  # H, per power
    notes: tuple[str, ...] = ()


def _monotonic_notes(sweep: PowerSweep, rtol: float) -> tuple[str, ...]:
    f0 = np.array([fit.f0 for _, fit in sweep.entries])
    rises = np.flatnonzero(np.diff(f0) > rtol * f0[:-1])
    if rises.size == 0:
        return ()
    p = [sweep.entries[i + 1][0] for i in rises]
    return (f"resonance frequency rises with power at {', '.join(f'{v:g} dBm' for v in p)}",)


def extract_istar_detail(sweep: PowerSweep, shift_rtol: float = 1e-7) -> IStarResult:
    """Regression of ``L_k`` on ``I^2``; warnings are returned in ``notes``."""
    powers = np.array([p for p, _ in sweep.entries])
    f0 = np.array([fit.f0 for _, fit in sweep.entries])
    cur = np.array([power_to_current(p, sweep.beta) for p in powers])
    lk = 1.0 / ((2.0 * np.pi * f0) ** 2 * sweep.c) - sweep.lg
    if np.any(lk <= 0):
        raise NegativeLk("geometric inductance and capacitance leave no room for kinetic inductance")
    x = cur**2
    n = x.size
    xm, ym = x.mean(), lk.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise NonlinearityUndetectable("all probe currents are equal")
    slope = float(np.sum((x - xm) * (lk - ym)) / sxx)
    icpt = float(ym - slope * xm)
    fitted = icpt + slope * x
    ss_res = float(np.sum((lk - fitted) ** 2))
    ss_tot = float(np.sum((lk - ym) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else -math.inf)
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else 0.0
    if slope <= 0 or slope * x.max() <= 1e-12 * abs(icpt):
        raise NonlinearityUndetectable(f"L_k does not grow with I^2 (slope {slope:.3g} H/A^2)")
    if n > 2 and slope < 2.0 * stderr:
        raise NonlinearityUndetectable(f"slope {slope:.3g} H/A^2 is below twice its standard error {stderr:.3g}")
    if icpt <= 0:
        raise NegativeLk(f"zero-current kinetic inductance extrapolates to {icpt:.3g} H")
    return IStarResult(
        math.sqrt(icpt / slope), icpt, r2, n, slope, stderr, cur, lk, _monotonic_notes(sweep, shift_rtol)
    )


def extract_istar(sweep: PowerSweep, shift_rtol: float = 1e-7) -> IStarResult:
    """Scaling current I* and zero-current kinetic inductance from a power sweep."""
    res = extract_istar_detail(sweep, shift_rtol)
    for msg in res.notes:
        warnings.warn(msg, NonMonotonicShift, stacklevel=2)
    return res


def nonlinearity_figure(i_c: float, i_star: float) -> float:
    """``I_c / I*``, the largest usable nonlinearity of the film."""
    if not i_star > 0:
        raise NonPositiveIStar(f"i_star must be positive, got {i_star}")
    if i_c < 0:
        raise DataError("i_c must be non-negative")
    return i_c / i_star


__all__ = [
    "S21Sweep",
    "ResonanceFit",
    "PowerSweep",
    "IStarResult",
    "LITERATURE_NONLINEARITY",
    "resonance_model",
    "fit_resonance",
    "power_to_current",
    "extract_istar",
    "extract_istar_detail",
    "nonlinearity_figure",
]
