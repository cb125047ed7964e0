"""Lumped-element kinetic-inductance line: cells, loading, Bloch dispersion.

A cell is a series inductor followed by a shunt capacitor. A loaded line
repeats a *supercell* of ``len(pattern)`` cells whose capacitance (or
inductance) is scaled cell by cell. Wavenumbers are expressed in radians per
supercell unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import bisect

from . import kernels
from .errors import DataError, DesignInfeasible, EmptyGrid, OutOfRange


@dataclass(frozen=True)
class UnitCell:
    """Series inductance ``l0`` [H], shunt capacitance ``c`` [F], scale current ``i_star`` [A]."""

    l0: float
    c: float
    i_star: float = math.inf

    def __post_init__(self):
        if not (self.l0 > 0 and self.c > 0 and self.i_star > 0):
            raise DataError(f"UnitCell needs l0 > 0, c > 0, i_star > 0, got {self}")

    @property
    def cutoff(self) -> float:
        """Upper edge of the uniform ladder passband, 2/sqrt(LC) [rad/s]."""
        return 2.0 / math.sqrt(self.l0 * self.c)

    @property
    def impedance(self) -> float:
        return math.sqrt(self.l0 / self.c)


def effective_inductance(cell: UnitCell, i: float) -> float:
    """Current-dependent inductance ``l0 * (1 + (i/i_star)**2)``."""
    return cell.l0 * (1.0 + (i / cell.i_star) ** 2)


def abcd_cell(omega: float, cell: UnitCell, bias: float = 0.0) -> np.ndarray:
    """Complex 2x2 transfer matrix of one cell at the dc operating point ``bias``."""
    if omega < 0:
        raise DataError("omega must be non-negative")
    z = 1j * omega * effective_inductance(cell, bias)
    y = 1j * omega * cell.c
    series = np.array([[1.0, z], [0.0, 1.0]], dtype=complex)
    shunt = np.array([[1.0, 0.0], [y, 1.0]], dtype=complex)
    return series @ shunt


@dataclass(frozen=True)
class LoadedLineSpec:
    """Periodically loaded ladder.

    ``pattern`` holds one multiplier per cell of the supercell, applied to the
    capacitance (``pattern_target == "c"``) or to the linear inductance
    (``"l"``).
    """

    base: UnitCell
    pattern: tuple[float, ...] = (1.0,)
    pattern_target: str = "c"
    n_supercells: int = 1
    dc_bias: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(float(m) for m in self.pattern))
        if len(self.pattern) < 1 or min(self.pattern) <= 0:
            raise DataError("pattern needs at least one cell and positive multipliers")
        if self.pattern_target not in ("c", "l"):
            raise DataError(f"pattern_target must be 'c' or 'l', got {self.pattern_target!r}")
        if int(self.n_supercells) != self.n_supercells or self.n_supercells < 1:
            raise DataError("n_supercells must be a positive integer")

    @property
    def cells_per_supercell(self) -> int:
        return len(self.pattern)

    @property
    def n_cells(self) -> int:
        return self.cells_per_supercell * self.n_supercells

    def cell_values(self, bias: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell (inductance, capacitance) of one supercell at the given dc bias."""
        bias = self.dc_bias if bias is None else bias
        m = np.asarray(self.pattern)
        l_lin = self.base.l0 * (m if self.pattern_target == "l" else np.ones_like(m))
        c = self.base.c * (m if self.pattern_target == "c" else np.ones_like(m))
        return l_lin * (1.0 + (bias / self.base.i_star) ** 2), c

    def cutoff(self, bias: float | None = None) -> float:
        """Lowest per-cell LC cutoff of the biased ladder [rad/s]."""
        l, c = self.cell_values(bias)
        return float(np.min(2.0 / np.sqrt(l * c)))

    def bloch_impedance_dc(self, bias: float | None = None) -> float:
        """Low-frequency Bloch impedance sqrt(L_avg / C_avg)."""
        l, c = self.cell_values(bias)
        return float(np.sqrt(l.mean() / c.mean()))

    def to_config(self) -> dict:
        return {
            "base": {
                "l0_H": self.base.l0,
                "c_F": self.base.c,
                "i_star_A": None if math.isinf(self.base.i_star) else self.base.i_star,
            },
            "pattern": list(self.pattern),
            "pattern_target": self.pattern_target,
            "n_supercells": int(self.n_supercells),
            "dc_bias_A": self.dc_bias,
        }

    @classmethod
    def from_config(cls, section: dict) -> "LoadedLineSpec":
        base = section["base"]
        i_star = base.get("i_star_A")
        return cls(
            base=UnitCell(
                l0=float(base["l0_H"]),
                c=float(base["c_F"]),
                i_star=math.inf if i_star is None else float(i_star),
            ),
            pattern=tuple(section.get("pattern", (1.0,))),
            pattern_target=section.get("pattern_target", "c"),
            n_supercells=int(section.get("n_supercells", 1)),
            dc_bias=float(section.get("dc_bias_A", 0.0)),
        )


class Stopband(NamedTuple):
    lo: float
    hi: float
    width: float


@dataclass(frozen=True)
class DispersionCurve:
    """Tabulated Bloch dispersion.

    ``k`` is complex: in passbands it is real and unwrapped so that it grows
    continuously from zero; in stopbands the real part sits on the band-edge
    multiple of pi and the imaginary part is the attenuation per supercell.
    """

    omega: np.ndarray
    k: np.ndarray
    passband: np.ndarray
    stopbands: tuple[Stopband, ...] = ()
    supercell_length: int = 1
    line: LoadedLineSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        if np.any(np.diff(self.omega) <= 0):
            raise DataError("dispersion omegas must be strictly increasing")

    @classmethod
    def from_table(cls, omega, k, supercell_length: int = 1) -> "DispersionCurve":
        """All-passband curve from tabulated real wavenumbers (e.g. an ideal line)."""
        omega = np.asarray(omega, dtype=float)
        k = np.asarray(k, dtype=float)
        return cls(omega, k.astype(complex), np.ones(omega.shape, bool), (), supercell_length)

    def k_at(self, omega: float) -> float:
        """Real Bloch wavenumber at ``omega``, linear between grid points.

        Returns NaN when either bracketing sample lies in a stopband or the
        frequency falls outside the tabulated range.
        """
        w = self.omega
        if omega < w[0] or omega > w[-1]:
            return math.nan
        j = int(np.searchsorted(w, omega))
        if j < len(w) and w[j] == omega:
            return float(self.k[j].real) if self.passband[j] else math.nan
        lo, hi = j - 1, j
        if not (self.passband[lo] and self.passband[hi]):
            return math.nan
        frac = (omega - w[lo]) / (w[hi] - w[lo])
        return float(self.k[lo].real + frac * (self.k[hi].real - self.k[lo].real))

    def in_passband(self, omega: float) -> bool:
        return not math.isnan(self.k_at(omega))


def _half_trace_offsets(omegas, l, c):
    ea, _, _, ed = kernels.supercell_abcd(np.ascontiguousarray(omegas, dtype=float), l, c)
    tm1 = 0.5 * (ea + ed)  # (A + D)/2 - 1
    return tm1, tm1 + 2.0  # and (A + D)/2 + 1


def supercell_matrix(spec: LoadedLineSpec, omega: float, bias: float | None = None) -> np.ndarray:
    """Complex supercell transfer matrix (cell 0 at the input side)."""
    l, c = spec.cell_values(bias)
    ea, b, cc, ed = kernels.supercell_abcd(np.array([float(omega)]), l, c)
    return np.array([[1.0 + ea[0], 1j * b[0]], [1j * cc[0], 1.0 + ed[0]]])


def _bloch_phase(tm1: np.ndarray, tp1: np.ndarray) -> np.ndarray:
    """arccos((A+D)/2) evaluated without cancellation near either band edge."""
    t = tm1 + 1.0
    theta = np.empty_like(t)
    upper = t >= 0
    theta[upper] = 2.0 * np.arcsin(np.sqrt(np.clip(-tm1[upper], 0.0, None) / 2.0))
    theta[~upper] = np.pi - 2.0 * np.arcsin(np.sqrt(np.clip(tp1[~upper], 0.0, None) / 2.0))
    return theta


def _unwrap(theta, tm1, tp1, passband):
    k = np.empty(theta.shape, dtype=complex)
    prev = 0.0
    two_pi = 2.0 * np.pi
    for i in range(theta.shape[0]):
        if passband[i]:
            m = math.floor(prev / two_pi)
            best = math.inf
            for base in (two_pi * m, two_pi * (m + 1)):
                for cand in (base - theta[i], base + theta[i]):
                    if cand >= prev - 1e-9 * (1.0 + prev) and cand < best:
                        best = cand
            k[i] = best
            prev = best
        else:
            above = tm1[i] > 0  # (A+D)/2 > 1: zone centre gap, else zone edge
            n = round(prev / np.pi)
            if (n % 2 == 0) != above:
                n = n + 1 if n * np.pi <= prev else n - 1
            t_abs = tm1[i] + 1.0 if above else -(tp1[i] - 1.0)
            k[i] = n * np.pi + 1j * math.acosh(t_abs)
            prev = n * np.pi
    return k


def bloch_dispersion(spec: LoadedLineSpec, omegas, bias: float | None = None) -> DispersionCurve:
    """Bloch wavenumber per supercell over an increasing frequency grid."""
    omegas = np.asarray(omegas, dtype=float)
    if omegas.size == 0:
        raise EmptyGrid("frequency grid is empty")
    if np.any(np.diff(omegas) <= 0):
        raise DataError("frequency grid must be strictly increasing")
    if omegas[0] < 0:
        raise OutOfRange("frequencies must be non-negative")
    limit = 3.0 * spec.cutoff(bias)
    if omegas[-1] > limit * (1 + 1e-12):
        raise OutOfRange(
            f"grid reaches {omegas[-1]:.4g} rad/s, beyond 3x the ladder cutoff ({limit:.4g} rad/s)"
        )
    l, c = spec.cell_values(bias)
    tm1, tp1 = _half_trace_offsets(omegas, l, c)
    passband = (tm1 <= 0.0) & (tp1 >= 0.0)
    theta = _bloch_phase(tm1, tp1)
    k = _unwrap(theta, tm1, tp1, passband)
    curve = DispersionCurve(
        omega=omegas,
        k=k,
        passband=passband,
        supercell_length=spec.cells_per_supercell,
        line=replace(spec, dc_bias=spec.dc_bias if bias is None else bias),
    )
    return replace(curve, stopbands=tuple(find_stopbands(curve)))


def group_delay(spec: LoadedLineSpec, omega: float, bias: float | None = None) -> float:
    """Group delay per supercell, |dk/domega|, at a passband frequency [s].

    Uses ``dk/dw = -(dt/dw) / sin(k)`` with ``t = (A+D)/2`` differentiated
    numerically; ``t`` is smooth, so no branch bookkeeping is needed.
    """
    l, c = spec.cell_values(bias)
    d = 1e-6 * omega
    tm1, tp1 = _half_trace_offsets(np.array([omega - d, omega, omega + d]), l, c)
    t = tm1 + 1.0
    if not (tm1[1] <= 0.0 <= tp1[1]):
        raise DataError(f"{omega:.6g} rad/s is not in a passband")
    theta = _bloch_phase(tm1[1:2], tp1[1:2])[0]
    return float(abs((t[2] - t[0]) / (2 * d)) / max(math.sin(theta), 1e-12))


def _stop_measure(spec: LoadedLineSpec, omega: float, upper: bool) -> float:
    """Positive inside the stopband of the given type, negative in the passband next to it."""
    l, c = spec.cell_values()
    tm1, tp1 = _half_trace_offsets(np.array([omega]), l, c)
    return float(tm1[0]) if upper else float(-tp1[0])


def find_stopbands(curve: DispersionCurve, rtol: float = 1e-6) -> list[Stopband]:
    """Contiguous non-passband runs of ``curve``, edges refined by bisection.

    An edge is refined only when the run is bracketed by a passband sample on
    that side; a run touching either end of the grid keeps the grid value.
    """
    w = curve.omega
    stop = ~curve.passband
    bands = []
    i = 0
    n = len(w)
    while i < n:
        if not stop[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and stop[j + 1]:
            j += 1
        lo, hi = w[i], w[j]
        if curve.line is not None:
            # even multiples of pi: (A+D)/2 > 1, odd: (A+D)/2 < -1
            upper_lo = round(curve.k[i].real / np.pi) % 2 == 0
            upper_hi = round(curve.k[j].real / np.pi) % 2 == 0
            if i > 0:
                lo = _refine_edge(curve.line, w[i - 1], w[i], upper_lo, rtol)
            if j < n - 1:
                hi = _refine_edge(curve.line, w[j + 1], w[j], upper_hi, rtol)
        bands.append(Stopband(float(lo), float(hi), float(hi - lo)))
        i = j + 1
    return bands


def _refine_edge(spec, w_pass, w_stop, upper, rtol):
    f = lambda w: _stop_measure(spec, w, upper)  # noqa: E731
    if f(w_pass) > 0 or f(w_stop) <= 0:
        # type changed inside one grid step (tiny band); keep the grid point
        return w_stop
    a, b = sorted((w_pass, w_stop))
    return bisect(f, a, b, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps))


# --------------------------------------------------------------------------
# loading design


@dataclass(frozen=True)
class DesignConstraints:
    """Search box for :func:`design_loading`.

    The supercell is ``3 * period`` cells long; cells ``0``, ``period`` and
    ``2 * period`` carry the load ``multiplier`` (the first one scaled by
    ``1 + asymmetry``), all others are unloaded. The strong ``period``
    modulation opens the wide gap at the third harmonic, the asymmetry opens
    the narrow gap near the pump.
    """

    period_range: tuple[int, int] = (3, 40)
    multiplier_range: tuple[float, float] = (1.0, 4.0)
    asymmetries: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3, 0.5)
    pattern_target: str = "c"
    edge_window: tuple[float, float] = (1.0, 1.05)
    max_narrow_width: float = 0.05  # relative to the gap centre
    n_supercells: int = 64
    dc_bias: float = 0.0
    multiplier_steps: int = 25


def loading_pattern(period: int, multiplier: float, asymmetry: float) -> tuple[float, ...]:
    pattern = [1.0] * (3 * period)
    pattern[0] = multiplier * (1.0 + asymmetry)
    pattern[period] = multiplier
    pattern[2 * period] = multiplier
    return tuple(pattern)


@dataclass(frozen=True)
class DesignResult:
    spec: LoadedLineSpec
    target_pump: float
    narrow_gap: Stopband
    harmonic_gap: Stopband
    edge_ratio: float
    harmonic_margin: float  # distance of 3*omega_p from the nearest gap edge / (3*omega_p)


def _evaluate(base, pattern, target, cons, grid):
    spec = LoadedLineSpec(base, pattern, cons.pattern_target, cons.n_supercells, cons.dc_bias)
    curve = bloch_dispersion(spec, grid)
    narrow = None
    harmonic = None
    lo_ok, hi_ok = cons.edge_window
    for sb in curve.stopbands:
        centre = 0.5 * (sb.lo + sb.hi)
        if lo_ok * target < sb.lo < hi_ok * target and sb.width <= cons.max_narrow_width * centre:
            narrow = sb if narrow is None else narrow
        if sb.lo <= 3.0 * target <= sb.hi:
            harmonic = sb
    return spec, narrow, harmonic


def check_design(spec: LoadedLineSpec, target_pump: float, cons: DesignConstraints | None = None, n_grid: int = 4000):
    """Return ``(narrow_gap, harmonic_gap)`` found on ``spec``; either may be None."""
    cons = cons or DesignConstraints()
    grid = np.linspace(0.5 * target_pump, 3.5 * target_pump, n_grid)
    _, narrow, harmonic = _evaluate(spec.base, spec.pattern, target_pump, replace(cons, pattern_target=spec.pattern_target, n_supercells=spec.n_supercells, dc_bias=spec.dc_bias), grid)
    return narrow, harmonic


def design_loading(
    target_pump: float,
    base: UnitCell,
    constraints: DesignConstraints | None = None,
    n_grid: int = 3000,
) -> DesignResult:
    """Search loading patterns placing a narrow gap just above the pump and a gap over 3x the pump.

    Grid search over the load period, multiplier and asymmetry, then
    bisection on the multiplier to centre the narrow-gap lower edge in the
    allowed window. Among feasible patterns the one whose third-harmonic
    gap covers ``3 * target_pump`` with the largest margin wins.
    """
    cons = constraints or DesignConstraints()
    probe = LoadedLineSpec(base, (1.0,), cons.pattern_target, 1, cons.dc_bias)
    if 3.0 * target_pump >= probe.cutoff():
        raise DesignInfeasible(
            f"third harmonic {3 * target_pump:.4g} rad/s is beyond the ladder cutoff {probe.cutoff():.4g} rad/s"
        )
    m_lo, m_hi = cons.multiplier_range
    if m_hi <= 1.0 + 1e-12 and m_lo >= 1.0 - 1e-12:
        raise DesignInfeasible("multiplier box pins the line to uniform; no stopband can open")
    grid = np.linspace(0.5 * target_pump, 3.5 * target_pump, n_grid)
    target_edge = 0.5 * sum(cons.edge_window) * target_pump
    best = None

    multipliers = np.linspace(m_lo, m_hi, cons.multiplier_steps)
    for period in _candidate_periods(base, target_pump, cons):
        for asym in cons.asymmetries:
            edges = []
            for m in multipliers:
                spec, narrow, harmonic = _evaluate(base, loading_pattern(period, m, asym), target_pump, replace(cons, edge_window=(0.8, 1.3)), grid)
                edges.append(narrow.lo if narrow is not None else math.nan)
            edges = np.asarray(edges)
            # narrow-gap edge falls as the load grows; bracket the target edge
            for a in range(len(multipliers) - 1):
                ea, eb = edges[a], edges[a + 1]
                if math.isnan(ea) or math.isnan(eb) or not (eb <= target_edge <= ea):
                    continue
                m_star = _refine_multiplier(base, period, asym, multipliers[a], multipliers[a + 1], target_pump, target_edge, cons, grid)
                spec, narrow, harmonic = _evaluate(base, loading_pattern(period, m_star, asym), target_pump, cons, grid)
                if narrow is None or harmonic is None:
                    continue
                margin = min(3 * target_pump - harmonic.lo, harmonic.hi - 3 * target_pump) / (3 * target_pump)
                if best is None or margin > best.harmonic_margin:
                    best = DesignResult(spec, target_pump, narrow, harmonic, narrow.lo / target_pump, margin)
    if best is None:
        raise DesignInfeasible("no loading pattern in the constraint box meets both stopband goals")
    return best


def _candidate_periods(base, target, cons):
    """Periods whose supercell Bragg frequency can reach the pump.

    The narrow gap sits where the supercell (``3 * period`` cells) is half a
    wavelength long. Loading only raises the average cell reactance, so the
    unloaded and fully loaded long-wavelength wavenumbers bracket the
    reachable Bragg condition; a 20 % slack covers dispersion and asymmetry.
    """
    k0 = 2.0 * math.asin(min(1.0, 0.5 * target * math.sqrt(base.l0 * base.c)))
    m_hi = max(cons.multiplier_range)
    keep = []
    for period in range(cons.period_range[0], cons.period_range[1] + 1):
        fill = 1.0 + (m_hi * (3.0 + max(cons.asymmetries, default=0.0)) - 3.0) / (3.0 * period)
        k_lo, k_hi = 3 * period * k0, 3 * period * k0 * math.sqrt(fill)
        if 0.8 * k_lo <= math.pi <= 1.2 * k_hi:
            keep.append(period)
    return keep


def _refine_multiplier(base, period, asym, m_a, m_b, target, target_edge, cons, grid, iters=30):
    loose = replace(cons, edge_window=(0.8, 1.3))

    def edge(m):
        _, narrow, _ = _evaluate(base, loading_pattern(period, m, asym), target, loose, grid)
        return math.nan if narrow is None else narrow.lo

    lo, hi = m_a, m_b
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        e = edge(mid)
        if math.isnan(e):
            break
        if e > target_edge:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6 * mid:
            break
    return 0.5 * (lo + hi)


def uniform_line(cell: UnitCell, n_cells: int, dc_bias: float = 0.0, cells_per_supercell: int = 1) -> LoadedLineSpec:
    """Unloaded ladder expressed with an arbitrary (all-ones) supercell."""
    if n_cells % cells_per_supercell:
        raise DataError("n_cells must be a multiple of cells_per_supercell")
    return LoadedLineSpec(cell, (1.0,) * cells_per_supercell, "c", n_cells // cells_per_supercell, dc_bias)


def frequency_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, int(n))


__all__: Sequence[str] = [
    "UnitCell",
    "LoadedLineSpec",
    "DispersionCurve",
    "Stopband",
    "DesignConstraints",
    "DesignResult",
    "effective_inductance",
    "abcd_cell",
    "bloch_dispersion",
    "find_stopbands",
    "design_loading",
    "check_design",
    "loading_pattern",
    "supercell_matrix",
    "uniform_line",
]
