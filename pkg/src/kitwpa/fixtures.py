"""Seeded synthetic data: transition curves, resonance traces, power sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .film import TransitionCurve, resonance_frequency
from .resonator import S21Sweep, power_to_current, resonance_model


def tanh_transition(
    tc: float = 13.0,
    width: float = 0.1,
    rn: float = 100.0,
    t_range: tuple[float, float] = (11.0, 15.0),
    step: float = 0.01,
    noise: float = 0.0,
    seed: int | None = None,
    film_id: str = "synthetic",
    deposition_batch: str = "",
) -> TransitionCurve:
    """``R(T) = R_n (1 + tanh((T - tc)/width)) / 2`` sampled on a regular grid."""
    n = int(round((t_range[1] - t_range[0]) / step)) + 1
    t = t_range[0] + step * np.arange(n)
    r = rn * 0.5 * (1.0 + np.tanh((t - tc) / width))
    if noise > 0:
        r = r + noise * rn * np.random.default_rng(seed).standard_normal(n)
        r = np.abs(r)
    return TransitionCurve(t, r, film_id, deposition_batch)


def step_transition(
    tc: float = 9.0, rn: float = 100.0, t_range: tuple[float, float] = (7.0, 11.0), step: float = 0.01
) -> TransitionCurve:
    n = int(round((t_range[1] - t_range[0]) / step)) + 1
    t = t_range[0] + step * np.arange(n)
    r = np.where(t >= tc - 1e-12, rn, 0.0)
    return TransitionCurve(t, r, "step")


def lorentzian_sweep(
    f0: float = 5e9,
    q_loaded: float = 1e4,
    depth_db: float = 20.0,
    asymmetry: float = 0.0,
    baseline_db: float = 0.0,
    n_points: int = 801,
    span_linewidths: float = 10.0,
    noise_db: float = 0.0,
    seed: int | np.random.Generator | None = None,
    probe_power: float = math.nan,
    resonator_id: str = "synthetic",
    center: float | None = None,
) -> S21Sweep:
    """Model trace around ``center`` (default ``f0``), optionally with Gaussian noise."""
    center = f0 if center is None else center
    lw = f0 / q_loaded
    f = center + lw * np.linspace(-0.5 * span_linewidths, 0.5 * span_linewidths, n_points)
    s = resonance_model(f, f0, q_loaded, depth_db, asymmetry, baseline_db)
    if noise_db > 0:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        s = s + noise_db * rng.standard_normal(n_points)
    return S21Sweep(f, s, probe_power, resonator_id)


@dataclass(frozen=True)
class PowerSweepFixture:
    sweeps: tuple[S21Sweep, ...]
    f0: tuple[float, ...]  # true resonance per power, Hz
    i_star: float
    lk0: float
    lg: float
    c: float
    beta: float
    i_c: float | None = None


def power_sweep_fixture(
    i_star: float = 1.0e-3,
    lk0: float = 8e-9,
    lg: float = 2e-9,
    c: float = 0.1e-12,
    beta: float = 1e-3,
    powers=tuple(range(-70, -49)),
    q_loaded: float = 5e4,
    depth_db: float = 20.0,
    n_points: int = 801,
    span_linewidths: float = 10.0,
    noise_db: float = 0.0,
    seed: int | None = None,
    i_c: float | None = 0.25e-3,
    resonator_id: str = "kid",
) -> PowerSweepFixture:
    """Traces of a lumped resonator whose kinetic inductance follows ``Lk0 (1 + (I/I*)^2)``.

    Every trace is centred on the zero-power resonance so the grid itself
    carries no information about the shift.
    """
    rng = np.random.default_rng(seed)
    f_ref = resonance_frequency(lk0 + lg, c)
    sweeps, f0s = [], []
    for p in powers:
        i = power_to_current(float(p), beta)
        f0 = resonance_frequency(lk0 * (1.0 + (i / i_star) ** 2) + lg, c)
        sweeps.append(
            lorentzian_sweep(
                f0, q_loaded, depth_db, 0.0, 0.0, n_points, span_linewidths, noise_db, rng,
                float(p), resonator_id, center=f_ref,
            )
        )
        f0s.append(f0)
    return PowerSweepFixture(tuple(sweeps), tuple(f0s), i_star, lk0, lg, c, beta, i_c)


__all__ = [
    "tanh_transition",
    "step_transition",
    "lorentzian_sweep",
    "power_sweep_fixture",
    "PowerSweepFixture",
]
