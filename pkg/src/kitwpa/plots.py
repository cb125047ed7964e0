"""Static SVG views of the analyses. Deterministic: no timestamps, fixed hash salt."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "kitwpa"
_META = {"Date": None, "Creator": "kitwpa"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return path


def plot_transitions(path, curves, plateaus, tcs, criterion=0.5) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for curve, rn, tc in zip(curves, plateaus, tcs):
        ax.plot(curve.temperature, curve.resistance / rn, label=f"{curve.film_id} (T_c = {tc:.3f} K)")
    ax.axhline(criterion, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("temperature [K]")
    ax.set_ylabel("R / R_n")
    ax.legend(fontsize=7)
    return _save(fig, path)


def plot_lk_comparison(path, labels, lk_tc, lk_sim) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = np.arange(len(labels))
    ax.bar(x - 0.2, np.asarray(lk_tc) * 1e9, 0.4, label="from T_c")
    sim = np.array([np.nan if v is None else v for v in lk_sim], dtype=float)
    ax.bar(x + 0.2, sim * 1e9, 0.4, label="from resonance")
    ax.set_xticks(x, labels)
    ax.set_ylabel("L_k [nH]")
    ax.legend(fontsize=7)
    return _save(fig, path)


def plot_resonances(path, sweeps, fits, model) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for sw, fit in zip(sweeps, fits):
        line = ax.plot(sw.frequency * 1e-9, sw.s21_db, ".", ms=1.5)[0]
        ax.plot(sw.frequency * 1e-9, model(sw.frequency, fit.f0, fit.q_loaded, fit.depth_db, fit.asymmetry,
                                           fit.baseline_db), "-", lw=0.8, color=line.get_color())
    ax.set_xlabel("frequency [GHz]")
    ax.set_ylabel("|S21| [dB]")
    return _save(fig, path)


def plot_istar(path, current, lk, lk0, slope) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = np.asarray(current) ** 2
    ax.plot(x * 1e12, np.asarray(lk) * 1e9, "o", ms=3, label="data")
    xs = np.linspace(0.0, x.max(), 50)
    ax.plot(xs * 1e12, (lk0 + slope * xs) * 1e9, "-", label="linear fit")
    ax.set_xlabel("I^2 [uA^2]")
    ax.set_ylabel("L_k [nH]")
    ax.legend(fontsize=7)
    return _save(fig, path)


def plot_nonlinearity(path, figure, benchmark) -> Path:
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.bar([0], [figure], 0.5, label="this film")
    ax.axhline(benchmark, color="C3", ls="--", label="literature")
    ax.set_xticks([0], ["I_c / I*"])
    ax.set_ylim(0, max(figure, benchmark) * 1.3)
    ax.legend(fontsize=7)
    return _save(fig, path)


def plot_dispersion(path, curve, stopbands, marks=()) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    f = curve.omega / (2 * math.pi) * 1e-9
    k = np.where(curve.passband, curve.k.real, np.nan)
    ax.plot(f, k, "-", lw=1)
    for sb in stopbands:
        ax.axvspan(sb.lo / (2 * math.pi) * 1e-9, sb.hi / (2 * math.pi) * 1e-9, color="0.85")
    for w in marks:
        ax.axvline(w / (2 * math.pi) * 1e-9, color="C3", lw=0.8, ls="--")
    ax.set_xlabel("frequency [GHz]")
    ax.set_ylabel("k [rad / supercell]")
    return _save(fig, path)


def plot_gain(path, profile) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(profile.omega_s / (2 * math.pi) * 1e-9, profile.gain_db, "-")
    ax.set_xlabel("signal frequency [GHz]")
    ax.set_ylabel("gain [dB]")
    return _save(fig, path)


def plot_spectrum(path, result) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    w = np.array([t.omega for t in result.tones]) / (2 * math.pi) * 1e-9
    a = np.array([t.amplitude for t in result.tones])
    ax.stem(w, 20 * np.log10(np.maximum(a, 1e-30) / a.max()), bottom=-200)
    ax.set_ylim(-160, 5)
    ax.set_xlabel("frequency [GHz]")
    ax.set_ylabel("output [dBc]")
    return _save(fig, path)
