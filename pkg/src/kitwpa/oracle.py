"""Brute-force time-domain integration of the nonlinear ladder.

Used to check the coupled-mode gain and the harmonic suppression of
engineered lines. Drive amplitudes are peak currents of the forward wave
launched into a matched line; the returned spectrum holds peak currents in
the load.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DataError, FrequencyInStopband, NotSteady, StepFailure
from .tline import LoadedLineSpec, bloch_dispersion, group_delay

DEFAULT_BUDGET = 2.0e7  # cell x drive-cycle product
STEADY_FRACTION = 0.25
LEAKAGE_DBC = -60.0


@dataclass(frozen=True)
class Tone:
    omega: float
    amplitude: float
    phase: float  # rad, relative to cos(omega t) at t = 0
    order: tuple[int, ...]  # mixing indices over the drive tones


@dataclass(frozen=True)
class OracleResult:
    tones: tuple[Tone, ...]
    drive: tuple[tuple[float, float], ...]
    duration: float
    window: tuple[float, float]
    leakage_dbc: float
    steps: int
    rejected: int
    backend: str

    def tone_at(self, omega: float, rtol: float = 1e-9) -> Tone:
        for t in self.tones:
            if abs(t.omega - omega) <= rtol * max(abs(omega), 1.0):
                return t
        raise KeyError(f"no tone at {omega:.6g} rad/s")

    def amplitude_at(self, omega: float, rtol: float = 1e-9) -> float:
        return self.tone_at(omega, rtol).amplitude

    def spectrum(self) -> list[tuple[float, float]]:
        return [(t.omega, t.amplitude) for t in self.tones]


def _base_frequency(freqs: Sequence[float]) -> float:
    """Largest frequency of which every drive frequency is an integer multiple."""
    ref = min(freqs)
    denom = 1
    for f in freqs:
        frac = Fraction(f / ref).limit_denominator(10_000)
        if abs(float(frac) - f / ref) > 1e-9 * f / ref:
            raise DataError("drive frequencies must be commensurate (ratios of small integers)")
        denom = denom * frac.denominator // math.gcd(denom, frac.denominator)
    base = ref / denom
    nums = [round(f / base) for f in freqs]
    g = 0
    for k in nums:
        g = math.gcd(g, k)
    return base * g


def mixing_products(omegas: Sequence[float], max_order: int = 3) -> list[tuple[float, tuple[int, ...]]]:
    """Positive frequencies ``sum n_j w_j`` with ``sum |n_j| <= max_order``, deduplicated."""
    out: dict[float, tuple[int, ...]] = {}
    q = len(omegas)
    for orders in itertools.product(range(-max_order, max_order + 1), repeat=q):
        if sum(abs(n) for n in orders) > max_order:
            continue
        w = sum(n * o for n, o in zip(orders, omegas))
        if w <= 0:
            continue
        key = round(w, 3)
        prev = out.get(key)
        if prev is None or sum(map(abs, orders)) < sum(map(abs, prev)):
            out[key] = orders
    return sorted(((w, o) for w, o in out.items()), key=lambda t: t[0])


def ladder_elements(spec: LoadedLineSpec) -> tuple[np.ndarray, np.ndarray]:
    """Series inductances (n+1, half cells at both ends) and shunt capacitances (n)."""
    l_cells, c_cells = spec.cell_values(0.0)
    l_cells = np.tile(l_cells, spec.n_supercells)
    c_cells = np.tile(c_cells, spec.n_supercells)
    lind = np.empty(l_cells.size + 1)
    lind[0] = 0.5 * l_cells[0]
    lind[1:-1] = 0.5 * (l_cells[:-1] + l_cells[1:])
    lind[-1] = 0.5 * l_cells[-1]
    return lind, c_cells


def time_domain_oracle(
    spec: LoadedLineSpec,
    drive: Sequence[tuple[float, float]],
    duration: float,
    dc_bias: float | None = None,
    budget: float = DEFAULT_BUDGET,
    rtol: float = 1e-7,
    max_order: int = 3,
    leakage_dbc: float = LEAKAGE_DBC,
    ramp_cycles: float = 10.0,
) -> OracleResult:
    """Integrate the nonlinear ladder driven by ``drive`` and analyse its output.

    ``drive`` lists ``(omega, amplitude)`` pairs; frequencies must be
    commensurate so the analysis window holds an integer number of periods
    of every mixing product. The last quarter of the record is split in two
    halves; if any tone differs between the halves by more than
    ``leakage_dbc`` relative to the strongest tone the run is not steady.
    """
    if not drive:
        raise DataError("at least one drive tone is required")
    bias = spec.dc_bias if dc_bias is None else dc_bias
    omegas = np.array([float(w) for w, _ in drive])
    amps = np.array([float(a) for _, a in drive])
    if np.any(omegas <= 0) or np.any(amps < 0):
        raise DataError("drive frequencies must be positive and amplitudes non-negative")
    curve = bloch_dispersion(spec, np.sort(omegas), bias)
    if not np.all(curve.passband):
        raise FrequencyInStopband("every drive tone must propagate (lie in a passband of the line)")
    if duration <= 0:
        raise DataError("duration must be positive")
    cost = spec.n_cells * duration * omegas.max() / (2 * math.pi)
    if cost > budget:
        raise BudgetExceeded(f"cells x cycles = {cost:.3g} exceeds the budget {budget:.3g}")

    f_base = _base_frequency(list(omegas / (2 * math.pi)))
    t_base = 1.0 / f_base
    products = [(w, o) for w, o in mixing_products(list(omegas), max_order)]
    w_top = max(max(w for w, _ in products), omegas.max())
    # samples per base period: at least 8 per period of the fastest product
    n_per = int(math.ceil(8 * w_top / (2 * math.pi) * t_base))
    dt = t_base / n_per
    n_base = int(math.ceil(duration / t_base - 1e-9))
    t_end = n_base * t_base
    # analysis window: an even number of base periods inside the last quarter
    n_win = 2 * int(math.floor(STEADY_FRACTION * n_base / 2))
    if n_win < 2:
        raise NotSteady("duration too short for a steady-state window of two base periods")

    lind, cap = ladder_elements(spec)
    r0 = spec.bloch_impedance_dc(bias)
    inv_is2 = 0.0 if math.isinf(spec.base.i_star) else 1.0 / spec.base.i_star**2
    lb = lind * (1.0 + bias * bias * inv_is2)
    w_max = 2.0 / math.sqrt(float(np.min(lb[1:-1] if lb.size > 2 else lb)) * float(np.min(cap)))
    h_max = 2.5 / max(w_max, w_top)
    scale = np.concatenate([np.full(lind.size, 1e-3 * amps.max() * rtol + 1e-30),
                            np.full(cap.size, 1e-3 * amps.max() * r0 * rtol + 1e-30)])
    t_ramp = ramp_cycles * 2 * math.pi / omegas.min()
    max_steps = int(50 * t_end / h_max) + 10_000
    record, steps, rejected, status = kernels.integrate_ladder(
        lind, cap, float(bias), inv_is2, r0, r0, omegas, amps, np.zeros_like(omegas), t_ramp,
        t_end, dt, h_max, rtol, scale, max_steps,
    )
    if status != 0:
        raise StepFailure("time integration failed" + (" (step limit)" if status == 1 else " (step underflow)"))

    n_samples = n_win * n_per
    x = record[-n_samples - 1 : -1]
    t = (np.arange(n_samples) + (record.size - 1 - n_samples)) * dt
    half = n_samples // 2
    tones = []
    worst = 0.0
    for w, order in products:
        ph = np.exp(-1j * w * t)
        a_full = 2.0 / n_samples * np.dot(x, ph)
        a1 = 2.0 / half * np.dot(x[:half], ph[:half])
        a2 = 2.0 / half * np.dot(x[half:], ph[half:])
        worst = max(worst, abs(a1 - a2))
        tones.append(Tone(float(w), float(abs(a_full)), float(np.angle(a_full)), tuple(int(v) for v in order)))
    ref = max(t.amplitude for t in tones)
    leak = 20 * math.log10(max(worst, 1e-300) / ref) if ref > 0 else -math.inf
    if leak > leakage_dbc:
        raise NotSteady(f"tone drift between window halves {leak:.1f} dBc exceeds {leakage_dbc:.1f} dBc")
    return OracleResult(
        tuple(tones),
        tuple((float(w), float(a)) for w, a in zip(omegas, amps)),
        t_end,
        (float(t[0]), float(t[-1] + dt)),
        leak,
        int(steps),
        int(rejected),
        kernels.BACKEND,
    )


def transit_time(spec: LoadedLineSpec, omega: float, bias: float | None = None) -> float:
    """Group delay of the whole line at ``omega``."""
    return spec.n_supercells * group_delay(spec, omega, bias)


def suggest_duration(
    spec: LoadedLineSpec,
    drive: Sequence[tuple[float, float]],
    bias: float | None = None,
    settle: float = 3.0,
    window_periods: int = 2,
) -> float:
    """Duration covering the ramp, ``settle`` line transits and a steady window."""
    omegas = [w for w, _ in drive]
    f_base = _base_frequency([w / (2 * math.pi) for w in omegas])
    lead = 10.0 * 2 * math.pi / min(omegas) + settle * max(transit_time(spec, w, bias) for w in omegas)
    return max(lead / (1.0 - STEADY_FRACTION), window_periods / f_base / STEADY_FRACTION)


def oracle_gain_db(
    spec: LoadedLineSpec,
    pump: tuple[float, float],
    signal: tuple[float, float],
    duration: float | None = None,
    dc_bias: float | None = None,
    **kwargs,
) -> tuple[float, OracleResult, OracleResult]:
    """Signal gain from a pumped run against a signal-only reference run."""
    duration = duration or suggest_duration(spec, [pump, signal], dc_bias)
    on = time_domain_oracle(spec, [pump, signal], duration, dc_bias, **kwargs)
    off = time_domain_oracle(spec, [signal], duration, dc_bias, **kwargs)
    ws = signal[0]
    g = 20 * math.log10(on.amplitude_at(ws) / off.amplitude_at(ws))
    return g, on, off
