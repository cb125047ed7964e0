"""Three-wave mixing in a dc-biased kinetic-inductance line.

Amplitudes are peak currents; distance is counted in supercells and all
wavenumbers are Bloch wavenumbers per supercell taken from the dc-biased
dispersion. With ``eps = 2 * I_d * chi`` the coupled-mode equations are::

    dAp/dx = i kp eps/4 As Ai exp(-i dkL x) + i s kp chi/8 (|Ap|^2 + 2|As|^2 + 2|Ai|^2) Ap
    dAs/dx = i ks eps/4 Ap Ai* exp(+i dkL x) + i s ks chi/8 (|As|^2 + 2|Ai|^2 + 2|Ap|^2) As
    dAi/dx = i ki eps/4 Ap As* exp(+i dkL x) + i s ki chi/8 (|Ai|^2 + 2|As|^2 + 2|Ap|^2) Ai

where ``dkL = kp - ks - ki`` and ``s`` is the sign of the self/cross phase
terms. The small-signal gain rate that follows is
``g = chi I_d I_p0 / 2 * sqrt(ks ki)``; the time-domain ladder oracle
reproduces this prefactor (half of it underestimates the gain by several dB).

``s = -1`` (:data:`KERR_PRINTED`, the default) makes the total mismatch read
``(kp - ks - ki) - chi Ip0^2/8 (kp - 2ks - 2ki)``, the phase-matching relation
as printed. ``s = +1`` (:data:`KERR_PHYSICAL`) is the sign seen in the
oracle's self- and cross-phase shifts, where a larger current raises every
wavenumber. Gain depends on the mismatch only through its square, so the two
conventions differ only where linear and Kerr mismatch compete.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .constants import HBAR, KB
from .errors import (
    DataError,
    FrequencyInStopband,
    NoSignChange,
    NoStopbandInBand,
    SingularChi,
    StepFailure,
)
from .tline import DispersionCurve, LoadedLineSpec

KERR_PRINTED = -1.0
KERR_PHYSICAL = 1.0
KERR_SIGN = KERR_PRINTED
KERR_CONVENTIONS = {"printed": KERR_PRINTED, "physical": KERR_PHYSICAL}


def chi(i_star: float, i_d: float) -> float:
    """Kerr coefficient of the biased line, ``1/(I*^2 + I_d^2)`` [A^-2]."""
    denom = i_star * i_star + i_d * i_d
    if denom == 0.0:
        raise SingularChi("chi is undefined when both I* and I_d vanish")
    return 1.0 / denom


@dataclass(frozen=True)
class MixingConfig:
    """Pump, bias and line for a 3WM calculation.

    ``omega_p`` may be ``None`` while the pump is still to be placed.
    ``coupling_scale`` multiplies the 3WM rate ``chi I_d I_p0 / 2 sqrt(ks ki)``.
    """

    omega_p: float | None
    i_p0: float
    i_d: float
    i_star: float
    dispersion: DispersionCurve
    line: LoadedLineSpec | None = None
    kerr_sign: float = KERR_SIGN
    coupling_scale: float = 1.0

    def __post_init__(self):
        if not self.i_star > 0:
            raise DataError("i_star must be positive")
        if self.i_p0 < 0:
            raise DataError("i_p0 must be non-negative")
        if self.i_p0 >= self.i_star:
            raise DataError("i_p0 must stay below i_star (perturbative regime)")
        if self.omega_p is not None and not self.dispersion.in_passband(self.omega_p):
            raise FrequencyInStopband(f"pump {self.omega_p:.6g} rad/s is not in a passband")

    @property
    def chi(self) -> float:
        return chi(self.i_star, self.i_d)

    @property
    def n_supercells(self) -> int:
        return 1 if self.line is None else self.line.n_supercells

    def with_pump(self, omega_p: float) -> "MixingConfig":
        return replace(self, omega_p=omega_p)

    def to_config(self) -> dict:
        return {
            "omega_p_hz": None if self.omega_p is None else self.omega_p / (2 * math.pi),
            "i_p0_A": self.i_p0,
            "i_d_A": self.i_d,
        }


def _wavenumbers(omega_s: float, cfg: MixingConfig) -> tuple[float, float, float]:
    if cfg.omega_p is None:
        raise DataError("pump frequency not set")
    omega_i = cfg.omega_p - omega_s
    ks = cfg.dispersion.k_at(omega_s)
    ki = cfg.dispersion.k_at(omega_i)
    kp = cfg.dispersion.k_at(cfg.omega_p)
    for name, w, k in (("signal", omega_s, ks), ("idler", omega_i, ki), ("pump", cfg.omega_p, kp)):
        if math.isnan(k):
            raise FrequencyInStopband(f"{name} at {w:.6g} rad/s is not in a passband")
    return kp, ks, ki


def _mismatch(kp, ks, ki, cfg):
    kerr = cfg.chi * cfg.i_p0**2 / 8.0
    return (kp - ks - ki) + cfg.kerr_sign * kerr * (kp - 2.0 * ks - 2.0 * ki)


def phase_mismatch(omega_s: float, cfg: MixingConfig) -> float:
    """Total 3WM phase mismatch at ``omega_s`` [rad per supercell]."""
    if not 0.0 < omega_s < (cfg.omega_p or 0.0):
        raise DataError("signal must lie strictly between 0 and the pump frequency")
    return _mismatch(*_wavenumbers(omega_s, cfg), cfg)


def coupling_rate(omega_s: float, cfg: MixingConfig) -> float:
    """Small-signal 3WM gain rate ``g`` [1 per supercell]."""
    _, ks, ki = _wavenumbers(omega_s, cfg)
    return cfg.coupling_scale * 0.5 * cfg.chi * cfg.i_d * cfg.i_p0 * math.sqrt(ks * ki)


def undepleted_gain(g: float, delta: float, length: float) -> float:
    """Power gain of the undepleted-pump solution (linear, not dB)."""
    gp2 = g * g - 0.25 * delta * delta
    if gp2 > 0:
        gp = math.sqrt(gp2)
        s = math.sinh(gp * length)
        return 1.0 + (g * s / gp) ** 2
    if gp2 < 0:
        kap = math.sqrt(-gp2)
        s = math.sin(kap * length)
        return 1.0 + (g * s / kap) ** 2
    return 1.0 + (g * length) ** 2


# --------------------------------------------------------------------------
# full coupled-mode integration


def _cme_rhs(x, y, kp, ks, ki, dk, eps, kerr):
    ap = y[0] + 1j * y[1]
    as_ = y[2] + 1j * y[3]
    ai = y[4] + 1j * y[5]
    pp, ps, pi_ = abs(ap) ** 2, abs(as_) ** 2, abs(ai) ** 2
    ph = np.exp(1j * dk * x)
    dap = 1j * kp * (eps / 4 * as_ * ai * np.conj(ph) + kerr * (pp + 2 * ps + 2 * pi_) * ap)
    das = 1j * ks * (eps / 4 * ap * np.conj(ai) * ph + kerr * (ps + 2 * pi_ + 2 * pp) * as_)
    dai = 1j * ki * (eps / 4 * ap * np.conj(as_) * ph + kerr * (pi_ + 2 * ps + 2 * pp) * ai)
    return [dap.real, dap.imag, das.real, das.imag, dai.real, dai.imag]


@dataclass(frozen=True)
class CMESolution:
    x: np.ndarray
    pump: np.ndarray
    signal: np.ndarray
    idler: np.ndarray
    manley_rowe_drift: float

    @property
    def gain(self) -> float:
        return float(abs(self.signal[-1]) ** 2 / abs(self.signal[0]) ** 2)


def integrate_cme(
    kp: float,
    ks: float,
    ki: float,
    dk_linear: float,
    eps: float,
    kerr_chi: float,
    a_p0: complex,
    a_s0: complex,
    length: float,
    rtol: float = 1e-8,
    n_out: int = 201,
) -> CMESolution:
    """Integrate the three coupled-mode equations with pump depletion.

    ``kerr_chi`` is the signed Kerr coefficient (``kerr_sign * chi``).
    Photon-flux invariants ``|Ap|^2/kp + |As|^2/ks`` and ``|Ap|^2/kp + |Ai|^2/ki``
    are monitored; the larger relative excursion is reported.
    """
    y0 = [a_p0.real, a_p0.imag, a_s0.real, a_s0.imag, 0.0, 0.0]
    xs = np.linspace(0.0, length, n_out)
    scale = max(abs(a_p0), abs(a_s0))
    sol = solve_ivp(
        _cme_rhs,
        (0.0, length),
        y0,
        method="DOP853",
        t_eval=xs,
        rtol=rtol,
        atol=rtol * 1e-3 * scale,
        args=(kp, ks, ki, dk_linear, eps, kerr_chi / 8.0),
    )
    if not sol.success:
        raise StepFailure(sol.message)
    ap = sol.y[0] + 1j * sol.y[1]
    as_ = sol.y[2] + 1j * sol.y[3]
    ai = sol.y[4] + 1j * sol.y[5]
    inv_s = abs(ap) ** 2 / kp + abs(as_) ** 2 / ks
    inv_i = abs(ap) ** 2 / kp + abs(ai) ** 2 / ki
    drift = max(
        float(np.max(np.abs(inv_s - inv_s[0])) / inv_s[0]),
        float(np.max(np.abs(inv_i - inv_i[0])) / inv_i[0]),
    )
    return CMESolution(sol.t, ap, as_, ai, drift)


# --------------------------------------------------------------------------
# gain profile


@dataclass(frozen=True)
class GainPoint:
    omega_s: float
    gain_db: float
    omega_i: float
    mismatch: float
    manley_rowe_drift: float | None = None


@dataclass(frozen=True)
class GainProfile:
    points: tuple[GainPoint, ...]
    line_length: int
    method: str = "undepleted"

    @property
    def gain_db(self) -> np.ndarray:
        return np.array([p.gain_db for p in self.points])

    @property
    def omega_s(self) -> np.ndarray:
        return np.array([p.omega_s for p in self.points])

    def csv_rows(self) -> list[tuple[float, float, float, float]]:
        tau = 2 * math.pi
        return [(p.omega_s / tau, p.gain_db, p.omega_i / tau, p.mismatch) for p in self.points]


def cme_gain(
    cfg: MixingConfig,
    omega_s_grid: Sequence[float],
    method: str = "undepleted",
    mismatch: float | None = None,
    length: float | None = None,
    signal_below_pump_db: float = 30.0,
) -> GainProfile:
    """Signal gain along the line for each signal frequency.

    ``mismatch`` forces the total phase mismatch (rad/supercell) instead of
    reading it from the dispersion. ``method="full"`` integrates the three
    coupled-mode equations with pump depletion; the input signal power is
    ``signal_below_pump_db`` below the pump.
    """
    if method not in ("undepleted", "full"):
        raise DataError(f"unknown gain method {method!r}")
    length = cfg.n_supercells if length is None else length
    points = []
    for ws in omega_s_grid:
        ws = float(ws)
        if not 0.0 < ws < cfg.omega_p:
            raise DataError("signal grid must lie strictly between 0 and the pump frequency")
        kp, ks, ki = _wavenumbers(ws, cfg)
        delta = _mismatch(kp, ks, ki, cfg) if mismatch is None else float(mismatch)
        drift = None
        if cfg.i_p0 == 0.0 or cfg.i_d == 0.0:
            g_lin = 1.0
            if method == "full":
                drift = 0.0
        elif method == "undepleted":
            g = coupling_rate(ws, cfg)
            g_lin = undepleted_gain(g, delta, length)
        else:
            eps = cfg.coupling_scale * 2.0 * cfg.i_d * cfg.chi
            # remove the Kerr part again: the equations carry it explicitly
            kerr = cfg.kerr_sign * cfg.chi
            dk_lin = delta - kerr * cfg.i_p0**2 / 8.0 * (kp - 2 * ks - 2 * ki)
            a_s0 = cfg.i_p0 * 10 ** (-signal_below_pump_db / 20.0)
            sol = integrate_cme(kp, ks, ki, dk_lin, eps, kerr, complex(cfg.i_p0), complex(a_s0), length)
            g_lin = sol.gain
            drift = sol.manley_rowe_drift
        points.append(GainPoint(ws, 10.0 * math.log10(g_lin), cfg.omega_p - ws, delta, drift))
    return GainProfile(tuple(points), int(round(length)), method)


# --------------------------------------------------------------------------
# pump placement


@dataclass(frozen=True)
class PumpPlacement:
    omega_p: float
    mismatch: float  # at omega_p / 2
    side: str  # "below" or "above" the narrow stopband
    stopband: tuple[float, float]
    sign_change: bool
    warnings: tuple[str, ...] = field(default=())


def _half_mismatch(cfg, wp):
    c = cfg.with_pump(wp) if cfg.dispersion.in_passband(wp) else None
    if c is None:
        return math.nan
    try:
        return phase_mismatch(0.5 * wp, c)
    except FrequencyInStopband:
        return math.nan


def _scan_side(cfg, lo, hi, n_scan, rtol):
    ws = np.linspace(lo, hi, n_scan)
    vals = np.array([_half_mismatch(cfg, w) for w in ws])
    ok = ~np.isnan(vals)
    if not ok.any():
        return None
    # sign changes between consecutive valid samples, nearest the gap last
    idx = [i for i in range(n_scan - 1) if ok[i] and ok[i + 1] and vals[i] * vals[i + 1] <= 0]
    if idx:
        i = idx[-1] if hi > lo else idx[0]
        a, b = ws[i], ws[i + 1]
        fa = vals[i]
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = _half_mismatch(cfg, mid)
            if math.isnan(fm):
                break
            if fa * fm <= 0:
                b = mid
            else:
                a, fa = mid, fm
            if abs(b - a) <= rtol * abs(mid):
                break
        w = 0.5 * (a + b)
        return w, _half_mismatch(cfg, w), True
    j = int(np.nanargmin(np.where(ok, np.abs(vals), np.nan)))
    return ws[j], vals[j], False


def solve_pump_placement(
    cfg: MixingConfig,
    band: tuple[float, float],
    side: str = "auto",
    span: float = 0.1,
    n_scan: int = 400,
    rtol: float = 1e-6,
) -> PumpPlacement:
    """Place the pump next to the first stopband whose lower edge lies in ``band``.

    The pump is scanned over ``span`` (relative) below the lower edge and,
    for ``side="auto"`` when no zero exists there, over the same span above
    the upper edge. The returned frequency zeroes the mismatch at the band
    centre ``omega_p/2`` to ``rtol`` when a sign change exists; otherwise the
    minimiser of ``|mismatch|`` is returned with a :class:`NoSignChange`
    warning.
    """
    if side not in ("auto", "below", "above"):
        raise DataError("side must be 'auto', 'below' or 'above'")
    lo, hi = band
    gaps = [sb for sb in cfg.dispersion.stopbands if lo <= sb.lo <= hi]
    if not gaps:
        raise NoStopbandInBand(f"no stopband edge between {lo:.6g} and {hi:.6g} rad/s")
    gap = gaps[0]
    eps_edge = 1e-9 * gap.lo
    notes = []
    candidates = []
    if side in ("auto", "below"):
        r = _scan_side(cfg, gap.lo - eps_edge, gap.lo * (1 - span), n_scan, rtol)
        if r is not None:
            candidates.append(("below",) + r)
    if side == "above" or (side == "auto" and not (candidates and candidates[0][3])):
        r = _scan_side(cfg, gap.hi + eps_edge, gap.hi * (1 + span), n_scan, rtol)
        if r is not None:
            candidates.append(("above",) + r)
    if not candidates:
        raise NoStopbandInBand("no scannable passband next to the stopband")
    matched = [c for c in candidates if c[3]]
    best = matched[0] if matched else min(candidates, key=lambda c: abs(c[2]))
    where, wp, dk, sign_change = best
    if not sign_change:
        msg = f"mismatch never crosses zero near the stopband; |mismatch| minimised at {dk:.3e} rad/supercell"
        warnings.warn(msg, NoSignChange, stacklevel=2)
        notes.append(msg)
    return PumpPlacement(float(wp), float(dk), where, (gap.lo, gap.hi), sign_change, tuple(notes))


def length_for_gain(cfg: MixingConfig, omega_s: float, gain_db: float, max_length: float = 1e7) -> float | None:
    """Shortest line (supercells) whose undepleted gain at ``omega_s`` reaches ``gain_db``.

    ``None`` when the mismatch bounds the gain below the target. Gain grows
    monotonically with length while ``|mismatch| < 2 g``, so bisection on
    the length is safe there.
    """
    kp, ks, ki = _wavenumbers(omega_s, cfg)
    delta = _mismatch(kp, ks, ki, cfg)
    g = coupling_rate(omega_s, cfg)
    target = 10.0 ** (gain_db / 10.0)
    if g == 0.0 or g * g - 0.25 * delta * delta <= 0.0:
        return None
    hi = 1.0
    while undepleted_gain(g, delta, hi) < target:
        hi *= 2.0
        if hi > max_length:
            return None
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if undepleted_gain(g, delta, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * hi:
            break
    return hi


NOISE_TARGET_K = 0.6  # added-noise ceiling targeted for KITWPAs


def quantum_limit_noise(omega: float) -> float:
    """Added-noise temperature of an ideal phase-insensitive amplifier, hbar*omega/(2 k_B) [K]."""
    if omega < 0:
        raise DataError("omega must be non-negative")
    return HBAR * omega / (2.0 * KB)


def noise_benchmark(omega: float, target: float = NOISE_TARGET_K) -> dict:
    """Quantum-limit line at ``omega`` and its comparison with the noise target."""
    t_q = quantum_limit_noise(omega)
    return {
        "f_Hz": omega / (2 * math.pi),
        "quantum_limit_K": t_q,
        "target_K": target,
        "below_target": bool(t_q < target),
    }
