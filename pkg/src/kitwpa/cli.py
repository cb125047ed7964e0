"""Command-line front end.

Every command reads one JSON config (``--config``), writes one JSON report
plus optional SVG plots and CSV tables into ``--out``, and exits with 0 on
success, 2 on bad input or configuration and 3 when a computation fails.
Physical config keys carry their unit as a suffix (``_K``, ``_ohm``, ``_Hz``,
``_H``, ``_F``, ``_A``, ``_dBm``); unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import film, fixtures, io, mixing, oracle, report, resonator, tline
from .errors import ComputationError, DataError, KitwpaError

log = logging.getLogger("kitwpa")

TAU = 2.0 * math.pi
ANY = object()  # leaf of any JSON type

LINE_KEYS = {
    "base": {"l0_H": ANY, "c_F": ANY, "i_star_A": ANY},
    "pattern": ANY,
    "pattern_target": ANY,
    "n_supercells": ANY,
    "dc_bias_A": ANY,
}
GRID_KEYS = {"f_min_Hz": ANY, "f_max_Hz": ANY, "n_points": ANY}
COMMON_KEYS = {"seed": ANY, "plots": ANY}

SCHEMAS = {
    "tc": {
        "curves": [{"path": ANY, "film_id": ANY, "deposition_batch": ANY}],
        "criterion": ANY,
        "plateau_fraction": ANY,
        "plateau_tolerance": ANY,
    },
    "lk": {
        "films": [{
            "film_id": ANY, "tc_K": ANY, "rn_sheet_ohm": ANY, "squares": ANY,
            "f0_Hz": ANY, "lg_H": ANY, "c_F": ANY,
        }],
    },
    "resfit": {"sweeps": [{"path": ANY, "probe_power_dBm": ANY, "resonator_id": ANY}]},
    "istar": {
        "manifest": ANY,
        "i_c_A": ANY,
        "literature_nonlinearity": ANY,
        "shift_rtol": ANY,
    },
    "dispersion": {"line": LINE_KEYS, "grid": GRID_KEYS},
    "design": {
        "target_pump_Hz": ANY,
        "base": LINE_KEYS["base"],
        "constraints": {
            "period_range": ANY, "multiplier_range": ANY, "asymmetries": ANY, "pattern_target": ANY,
            "edge_window": ANY, "max_narrow_width": ANY, "multiplier_steps": ANY,
        },
        "n_supercells": ANY,
        "dc_bias_A": ANY,
        "i_p0_A": ANY,
        "kerr_convention": ANY,
        "coupling_scale": ANY,
        "signal": GRID_KEYS,
        "gain_target_dB": ANY,
        "length_scan": ANY,
        "dispersion_points": ANY,
    },
    "gain": {
        "line": LINE_KEYS,
        "pump_Hz": ANY,
        "i_p0_A": ANY,
        "i_d_A": ANY,
        "signal": GRID_KEYS,
        "method": ANY,
        "kerr_convention": ANY,
        "coupling_scale": ANY,
        "dispersion_points": ANY,
    },
    "oracle": {
        "line": LINE_KEYS,
        "drive": [{"f_Hz": ANY, "amplitude_A": ANY}],
        "duration_s": ANY,
        "settle_transits": ANY,
        "dc_bias_A": ANY,
        "budget": ANY,
        "rtol": ANY,
        "compare_cme": {"kerr_convention": ANY, "coupling_scale": ANY, "dispersion_points": ANY},
    },
    "gen-fixtures": {},
}
MANIFEST_KEYS = {
    "sweeps": [{"path": ANY, "probe_power_dBm": ANY}],
    "beta_A2_per_W": ANY,
    "beta_provenance": ANY,
    "lg_H": ANY,
    "c_F": ANY,
    "resonator_id": ANY,
}


def check_keys(doc, allowed, where: str = "config") -> None:
    """Reject keys absent from ``allowed``; recurse into sections and lists of sections."""
    if allowed is ANY:
        return
    if isinstance(allowed, list):
        if not isinstance(doc, list):
            raise DataError(f"{where}: expected a list")
        for i, item in enumerate(doc):
            check_keys(item, allowed[0], f"{where}[{i}]")
        return
    if not isinstance(doc, dict):
        raise DataError(f"{where}: expected an object")
    for key, val in doc.items():
        if key not in allowed:
            raise DataError(f"{where}: unknown key '{key}'")
        check_keys(val, allowed[key], f"{where}.{key}")


def _req(section: dict, key: str, where: str):
    if key not in section:
        raise DataError(f"{where}: missing required key '{key}'")
    return section[key]


def _num(section: dict, key: str, where: str, default=None) -> float:
    val = section.get(key, default)
    if val is None:
        raise DataError(f"{where}: missing required key '{key}'")
    try:
        return float(val)
    except (TypeError, ValueError):
        raise DataError(f"{where}.{key}: expected a number, got {val!r}") from None


class Run:
    """Shared state of one command invocation."""

    def __init__(self, command, config, base_dir: Path, out: Path, plots: bool, seed: int | None):
        self.command = command
        self.config = config
        self.base_dir = base_dir
        self.out = out
        self.plots = plots and bool(config.get("plots", True))
        self.seed = seed
        self.inputs: list[Path] = []
        self.outputs: list[str] = []
        self.notes: list[str] = []

    def path(self, rel) -> Path:
        p = Path(rel)
        p = p if p.is_absolute() else self.base_dir / p
        if not p.is_file():
            raise DataError(f"{rel}: input file does not exist")
        self.inputs.append(p)
        return p

    def emit(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out / name


def _map(fn, items):
    items = list(items)
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(fn, items))


def _line(section: dict, where: str = "line") -> tline.LoadedLineSpec:
    try:
        return tline.LoadedLineSpec.from_config(section)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{where}: {exc}") from None


def _grid(section: dict, where: str) -> np.ndarray:
    lo = _num(section, "f_min_Hz", where)
    hi = _num(section, "f_max_Hz", where)
    n = int(_num(section, "n_points", where, 201))
    if not (0 < lo < hi) or n < 2:
        raise DataError(f"{where}: need 0 < f_min_Hz < f_max_Hz and n_points >= 2")
    return TAU * np.linspace(lo, hi, n)


def _kerr(name) -> float:
    try:
        return mixing.KERR_CONVENTIONS[name]
    except KeyError:
        raise DataError(f"kerr_convention must be one of {sorted(mixing.KERR_CONVENTIONS)}") from None


def _line_report(spec: tline.LoadedLineSpec) -> dict:
    return {
        "l0_H": spec.base.l0,
        "c_F": spec.base.c,
        "i_star_A": None if math.isinf(spec.base.i_star) else spec.base.i_star,
        "pattern_1": list(spec.pattern),
        "pattern_target": spec.pattern_target,
        "cells_per_supercell_count": spec.cells_per_supercell,
        "n_supercells_count": spec.n_supercells,
        "dc_bias_A": spec.dc_bias,
    }


def _stopbands(bands):
    return [{"f_lo_Hz": b.lo / TAU, "f_hi_Hz": b.hi / TAU, "width_Hz": b.width / TAU} for b in bands]


def _passband_signals(cfg: mixing.MixingConfig, grid):
    keep, dropped = [], 0
    for ws in grid:
        ok = 0 < ws < cfg.omega_p and cfg.dispersion.in_passband(ws) and cfg.dispersion.in_passband(cfg.omega_p - ws)
        if ok:
            keep.append(ws)
        else:
            dropped += 1
    return np.array(keep), dropped


def _profile_rows(profile: mixing.GainProfile):
    return [
        {"f_signal_Hz": p.omega_s / TAU, "gain_dB": p.gain_db, "f_idler_Hz": p.omega_i / TAU,
         "mismatch_rad_per_supercell": p.mismatch}
        for p in profile.points
    ]


# --------------------------------------------------------------------------
# commands


def cmd_tc(run: Run) -> dict:
    cfg = run.config
    curves_cfg = _req(cfg, "curves", "config")
    if not curves_cfg:
        raise DataError("config.curves: at least one curve is required")
    crit = _num(cfg, "criterion", "config", 0.5)
    frac = _num(cfg, "plateau_fraction", "config", film.PLATEAU_FRACTION)
    tol = _num(cfg, "plateau_tolerance", "config", film.PLATEAU_TOLERANCE)
    curves = [
        io.read_transition_csv(run.path(_req(c, "path", f"curves[{i}]")), c.get("film_id"), c.get("deposition_batch", ""))
        for i, c in enumerate(curves_cfg)
    ]

    def one(curve):
        tc, rn, notes = film.extract_tc_detail(curve, crit, frac, tol)
        out = {"film_id": curve.film_id, "deposition_batch": curve.deposition_batch, "tc_K": tc,
               "rn_plateau_ohm": rn}
        for label, level in (("t10_K", 0.1), ("t90_K", 0.9)):
            try:
                out[label] = film.extract_tc_detail(curve, level, frac, tol)[0]
            except ComputationError as exc:
                out[label] = None
                notes = notes + (f"{curve.film_id}: {label[:3]} criterion not reached ({exc})",)
        out["width_K"] = None if None in (out["t10_K"], out["t90_K"]) else out["t90_K"] - out["t10_K"]
        return out, notes

    results = _map(one, curves)
    for _, notes in results:
        run.notes.extend(notes)
    films = [r for r, _ in results]
    if run.plots:
        film_plot = run.emit("transitions.svg")
        from . import plots

        plots.plot_transitions(film_plot, curves, [f["rn_plateau_ohm"] for f in films], [f["tc_K"] for f in films], crit)
    return {"criterion_1": crit, "films": films}


def cmd_lk(run: Run) -> dict:
    films_cfg = _req(run.config, "films", "config")
    rows = []
    for i, fc in enumerate(films_cfg):
        where = f"films[{i}]"
        fid = str(fc.get("film_id", f"film{i}"))
        props = film.FilmProperties(_num(fc, "tc_K", where), _num(fc, "rn_sheet_ohm", where))
        squares = _num(fc, "squares", where, 1.0)
        lk_sheet = film.lk_from_tc(props.tc, props.rn_sheet)
        row = {"film_id": fid, "tc_K": props.tc, "rn_sheet_ohm_per_sq": props.rn_sheet, "squares_1": squares,
               "lk_tc_H_per_sq": lk_sheet, "lk_tc_H": lk_sheet * squares}
        have = [k in fc for k in ("f0_Hz", "lg_H", "c_F")]
        if all(have):
            try:
                cmp_ = film.compare_lk_methods(props, _num(fc, "f0_Hz", where), _num(fc, "lg_H", where),
                                               _num(fc, "c_F", where), squares)
            except ComputationError as exc:
                raise type(exc)(f"{fid}: {exc}") from None
            row.update({"f0_Hz": cmp_.f0, "lg_H": cmp_.lg, "c_F": cmp_.c, "lk_sim_H": cmp_.lk_sim,
                        "relative_deviation_1": cmp_.relative_deviation})
        else:
            missing = [k for k, h in zip(("f0_Hz", "lg_H", "c_F"), have) if not h]
            run.notes.append(f"{fid}: resonance method skipped, missing {', '.join(missing)}")
            row.update({"lk_sim_H": None, "relative_deviation_1": None})
        rows.append(row)
    if run.plots:
        from . import plots

        plots.plot_lk_comparison(run.emit("lk_comparison.svg"), [r["film_id"] for r in rows],
                                 [r["lk_tc_H"] for r in rows], [r["lk_sim_H"] for r in rows])
    return {"films": rows}


def _fit_row(sweep, fit):
    return {"resonator_id": sweep.resonator_id, "probe_power_dBm": sweep.probe_power, "f0_Hz": fit.f0,
            "q_loaded_1": fit.q_loaded, "depth_dB": fit.depth_db, "asymmetry_1": fit.asymmetry,
            "baseline_dB": fit.baseline_db, "residual_rms_dB": fit.residual_rms}


def cmd_resfit(run: Run) -> dict:
    sweeps_cfg = _req(run.config, "sweeps", "config")
    if not sweeps_cfg:
        raise DataError("config.sweeps: at least one sweep is required")
    sweeps = [
        io.read_s21_csv(run.path(_req(s, "path", f"sweeps[{i}]")), float(s.get("probe_power_dBm", math.nan)),
                        s.get("resonator_id"))
        for i, s in enumerate(sweeps_cfg)
    ]
    fits = _map(resonator.fit_resonance, sweeps)
    if run.plots:
        from . import plots

        plots.plot_resonances(run.emit("resonances.svg"), sweeps, fits, resonator.resonance_model)
    return {"fits": [_fit_row(s, f) for s, f in zip(sweeps, fits)]}


def cmd_istar(run: Run) -> dict:
    cfg = run.config
    man_path = run.path(_req(cfg, "manifest", "config"))
    man = io.read_json(man_path)
    check_keys(man, MANIFEST_KEYS, str(man_path.name))
    where = man_path.name
    beta = _num(man, "beta_A2_per_W", where)
    lg = _num(man, "lg_H", where)
    c = _num(man, "c_F", where)
    provenance = man.get("beta_provenance")
    if not provenance:
        provenance = "not stated"
        run.notes.append(f"{where}: beta_provenance missing; the power-to-current factor is unverified")
    rid = man.get("resonator_id")
    old_base, run.base_dir = run.base_dir, man_path.parent
    try:
        sweeps = [
            io.read_s21_csv(run.path(_req(s, "path", f"{where}.sweeps[{i}]")),
                            _num(s, "probe_power_dBm", f"{where}.sweeps[{i}]"), rid)
            for i, s in enumerate(_req(man, "sweeps", where))
        ]
    finally:
        run.base_dir = old_base
    fits = _map(resonator.fit_resonance, sweeps)
    ps = resonator.PowerSweep(tuple((s.probe_power, f) for s, f in zip(sweeps, fits)), beta, lg, c)
    res = resonator.extract_istar_detail(ps, _num(cfg, "shift_rtol", "config", 1e-7))
    run.notes.extend(res.notes)
    bench = _num(cfg, "literature_nonlinearity", "config", resonator.LITERATURE_NONLINEARITY)
    out = {
        "i_star_A": res.i_star,
        "lk0_H": res.lk0,
        "slope_H_per_A2": res.slope,
        "fit_r_squared_1": res.fit_r_squared,
        "points_used_count": res.points_used,
        "beta_A2_per_W": beta,
        "beta_provenance": str(provenance),
        "lg_H": lg,
        "c_F": c,
        "literature_nonlinearity_1": bench,
        "points": [
            {"probe_power_dBm": p, "current_A": i, "lk_H": l, "f0_Hz": f.f0}
            for (p, f), i, l in zip(ps.entries, res.current, res.lk)
        ],
    }
    if "i_c_A" in cfg:
        i_c = _num(cfg, "i_c_A", "config")
        out["i_c_A"] = i_c
        out["nonlinearity_1"] = resonator.nonlinearity_figure(i_c, res.i_star)
    if run.plots:
        from . import plots

        plots.plot_resonances(run.emit("istar_resonances.svg"), sweeps, fits, resonator.resonance_model)
        plots.plot_istar(run.emit("istar.svg"), res.current, res.lk, res.lk0, res.slope)
        if "nonlinearity_1" in out:
            plots.plot_nonlinearity(run.emit("nonlinearity.svg"), out["nonlinearity_1"], bench)
    return out


def cmd_dispersion(run: Run) -> dict:
    spec = _line(_req(run.config, "line", "config"))
    grid = _grid(_req(run.config, "grid", "config"), "grid")
    curve = tline.bloch_dispersion(spec, grid)
    io.write_csv(run.emit("dispersion.csv"), io.DISPERSION_HEADER,
                 zip(curve.omega / TAU, np.where(curve.passband, curve.k.real, np.nan), curve.passband.astype(int)))
    if run.plots:
        from . import plots

        plots.plot_dispersion(run.emit("dispersion.svg"), curve, curve.stopbands)
    return {
        "line": _line_report(spec),
        "cutoff_Hz": spec.cutoff() / TAU,
        "bloch_impedance_ohm": spec.bloch_impedance_dc(),
        "stopbands": _stopbands(curve.stopbands),
    }


def _design_constraints(cfg: dict) -> tline.DesignConstraints:
    c = dict(cfg.get("constraints", {}))
    kw = {}
    for key in ("period_range", "multiplier_range", "edge_window"):
        if key in c:
            kw[key] = tuple(c[key])
    if "asymmetries" in c:
        kw["asymmetries"] = tuple(float(a) for a in c["asymmetries"])
    for key in ("max_narrow_width",):
        if key in c:
            kw[key] = float(c[key])
    if "multiplier_steps" in c:
        kw["multiplier_steps"] = int(c["multiplier_steps"])
    if "pattern_target" in c:
        kw["pattern_target"] = c["pattern_target"]
    kw["n_supercells"] = int(cfg.get("n_supercells", 64))
    kw["dc_bias"] = float(cfg.get("dc_bias_A", 0.0))
    return tline.DesignConstraints(**kw)


def cmd_design(run: Run) -> dict:
    cfg = run.config
    target = TAU * _num(cfg, "target_pump_Hz", "config")
    base_cfg = dict(_req(cfg, "base", "config"))
    base = _line({"base": base_cfg}, "base").base
    cons = _design_constraints(cfg)
    if math.isinf(base.i_star):
        raise DataError("base.i_star_A is required for the gain calculation")
    res = tline.design_loading(target, base, cons)
    spec = res.spec
    n_pts = int(cfg.get("dispersion_points", 20000))
    curve = tline.bloch_dispersion(spec, np.linspace(0.005 * target, 3.5 * target, n_pts))
    i_p0 = _num(cfg, "i_p0_A", "config", 1e-4)
    mcfg = mixing.MixingConfig(None, i_p0, cons.dc_bias, base.i_star, curve, spec,
                               _kerr(cfg.get("kerr_convention", "printed")), float(cfg.get("coupling_scale", 1.0)))
    lo, hi = cons.edge_window
    place = mixing.solve_pump_placement(mcfg, (0.99 * lo * target, 1.01 * hi * target))
    run.notes.extend(place.warnings)
    mcfg = mcfg.with_pump(place.omega_p)
    sig = cfg.get("signal")
    grid = _grid(sig, "signal") if sig else np.linspace(0.3, 0.7, 201) * place.omega_p
    grid, dropped = _passband_signals(mcfg, grid)
    if dropped:
        run.notes.append(f"{dropped} signal points skipped: signal or idler inside a stopband")
    profile = mixing.cme_gain(mcfg, grid)
    half = 0.5 * place.omega_p
    scan = [int(n) for n in cfg.get("length_scan", [16, 32, 64, 128, 256, 512])]
    scan_gain = [mixing.cme_gain(mcfg, [half], length=n).points[0].gain_db for n in scan]
    target_db = _num(cfg, "gain_target_dB", "config", 20.0)
    need = mixing.length_for_gain(mcfg, half, target_db)
    io.write_csv(run.emit("gain.csv"), io.GAIN_HEADER, profile.csv_rows())
    if run.plots:
        from . import plots

        plots.plot_dispersion(run.emit("design_dispersion.svg"), curve, curve.stopbands, [place.omega_p, 3 * place.omega_p])
        plots.plot_gain(run.emit("design_gain.svg"), profile)
    return {
        "line": _line_report(spec),
        "target_pump_Hz": target / TAU,
        "narrow_stopband": _stopbands([res.narrow_gap])[0],
        "harmonic_stopband": _stopbands([res.harmonic_gap])[0],
        "edge_ratio_1": res.edge_ratio,
        "harmonic_margin_1": res.harmonic_margin,
        "pump": {
            "f_Hz": place.omega_p / TAU,
            "side": place.side,
            "mismatch_rad_per_supercell": place.mismatch,
            "sign_change": place.sign_change,
            "i_p0_A": i_p0,
            "i_d_A": cons.dc_bias,
            "kerr_convention": cfg.get("kerr_convention", "printed"),
        },
        "gain": _profile_rows(profile),
        "peak_gain_dB": float(np.max(profile.gain_db)) if profile.points else None,
        "length_scan": [{"n_supercells_count": n, "gain_dB": g} for n, g in zip(scan, scan_gain)],
        "gain_monotone_in_length": bool(np.all(np.diff(scan_gain) >= -1e-12)),
        "gain_target_dB": target_db,
        "supercells_for_target_count": need,
        "noise_benchmark": mixing.noise_benchmark(half),
    }


def _mixing_from(cfg: dict, spec: tline.LoadedLineSpec, omega_p: float, i_p0: float, i_d: float, where: str):
    if math.isinf(spec.base.i_star):
        raise DataError(f"{where}: line.base.i_star_A is required for mixing")
    n_pts = int(cfg.get("dispersion_points", 20000))
    top = min(1.2 * omega_p, 3.0 * spec.cutoff(i_d))
    curve = tline.bloch_dispersion(spec, np.linspace(1e-3 * omega_p, top, n_pts), i_d)
    return mixing.MixingConfig(omega_p, i_p0, i_d, spec.base.i_star, curve, replace(spec, dc_bias=i_d),
                               _kerr(cfg.get("kerr_convention", "printed")), float(cfg.get("coupling_scale", 1.0)))


def cmd_gain(run: Run) -> dict:
    cfg = run.config
    spec = _line(_req(cfg, "line", "config"))
    wp = TAU * _num(cfg, "pump_Hz", "config")
    i_p0 = _num(cfg, "i_p0_A", "config")
    i_d = _num(cfg, "i_d_A", "config", spec.dc_bias)
    mcfg = _mixing_from(cfg, spec, wp, i_p0, i_d, "config")
    sig = cfg.get("signal")
    grid = _grid(sig, "signal") if sig else np.linspace(0.3, 0.7, 201) * wp
    grid, dropped = _passband_signals(mcfg, grid)
    if dropped:
        run.notes.append(f"{dropped} signal points skipped: signal or idler inside a stopband")
    method = cfg.get("method", "undepleted")
    profile = mixing.cme_gain(mcfg, grid, method=method)
    io.write_csv(run.emit("gain.csv"), io.GAIN_HEADER, profile.csv_rows())
    if run.plots:
        from . import plots

        plots.plot_gain(run.emit("gain.svg"), profile)
    out = {
        "line": _line_report(spec),
        "pump_Hz": wp / TAU,
        "i_p0_A": i_p0,
        "i_d_A": i_d,
        "method": method,
        "gain": _profile_rows(profile),
        "peak_gain_dB": float(np.max(profile.gain_db)) if profile.points else None,
        "noise_benchmark": mixing.noise_benchmark(0.5 * wp),
    }
    if method == "full":
        out["max_manley_rowe_drift_1"] = max(p.manley_rowe_drift for p in profile.points)
    return out


def cmd_oracle(run: Run) -> dict:
    cfg = run.config
    spec = _line(_req(cfg, "line", "config"))
    drive_cfg = _req(cfg, "drive", "config")
    drive = [(TAU * _num(d, "f_Hz", f"drive[{i}]"), _num(d, "amplitude_A", f"drive[{i}]")) for i, d in enumerate(drive_cfg)]
    if not drive:
        raise DataError("config.drive: at least one tone is required")
    bias = _num(cfg, "dc_bias_A", "config", spec.dc_bias)
    settle = _num(cfg, "settle_transits", "config", 12.0)
    duration = cfg.get("duration_s")
    duration = float(duration) if duration is not None else oracle.suggest_duration(spec, drive, bias, settle)
    kw = {"budget": _num(cfg, "budget", "config", oracle.DEFAULT_BUDGET), "rtol": _num(cfg, "rtol", "config", 1e-7)}
    res = oracle.time_domain_oracle(spec, drive, duration, bias, **kw)
    out = {
        "line": _line_report(spec),
        "dc_bias_A": bias,
        "duration_s": res.duration,
        "window_start_s": res.window[0],
        "window_stop_s": res.window[1],
        "leakage_dBc": res.leakage_dbc,
        "steps_count": res.steps,
        "rejected_count": res.rejected,
        "backend": res.backend,
        "drive": [{"f_Hz": w / TAU, "amplitude_A": a,
                   "transmission_1": res.amplitude_at(w) / a if a > 0 else None} for w, a in drive],
        "tones": [{"f_Hz": t.omega / TAU, "amplitude_A": t.amplitude, "phase_rad": t.phase,
                   "mixing_order": ",".join(str(o) for o in t.order)} for t in res.tones],
    }
    if "compare_cme" in cfg:
        if len(drive) != 2:
            raise DataError("compare_cme needs exactly two drive tones: pump first, then signal")
        (wp, ap), (ws, a_s) = drive
        ref = oracle.time_domain_oracle(spec, [(ws, a_s)], duration, bias, **kw)
        g_or = 20 * math.log10(res.amplitude_at(ws) / ref.amplitude_at(ws))
        mcfg = _mixing_from(cfg["compare_cme"], spec, wp, ap, bias, "compare_cme")
        g_cme = mixing.cme_gain(mcfg, [ws]).points[0].gain_db
        out["comparison"] = {
            "f_signal_Hz": ws / TAU,
            "oracle_gain_dB": g_or,
            "cme_gain_dB": g_cme,
            "difference_dB": g_cme - g_or,
            "within_1dB": bool(abs(g_cme - g_or) <= 1.0),
        }
    if run.plots:
        from . import plots

        plots.plot_spectrum(run.emit("oracle_spectrum.svg"), res)
    return out


def cmd_gen_fixtures(run: Run) -> dict:
    out = run.out
    seed = 0 if run.seed is None else run.seed
    rng = np.random.SeedSequence(seed)
    s_tr, s_ps = rng.spawn(2)
    written = []

    def put(name, writer, *args):
        writer(out / name, *args)
        written.append(name)

    put("transitions/film_a.csv", io.write_transition_csv, fixtures.tanh_transition(film_id="film_a"))
    put("transitions/film_b.csv", io.write_transition_csv,
        fixtures.tanh_transition(12.5, 0.15, 120.0, noise=1e-4, seed=np.random.default_rng(s_tr), film_id="film_b"))
    fx = fixtures.power_sweep_fixture(noise_db=0.05, seed=int(s_ps.generate_state(1)[0]))
    sweeps = []
    for sw in fx.sweeps:
        name = f"istar/p{int(round(sw.probe_power)):+d}dBm.csv"
        put(name, io.write_s21_csv, sw)
        sweeps.append({"path": Path(name).name, "probe_power_dBm": sw.probe_power})
    put("istar/manifest.json", io.write_json, {
        "sweeps": sweeps, "beta_A2_per_W": fx.beta, "lg_H": fx.lg, "c_F": fx.c, "resonator_id": "kid",
        "beta_provenance": "synthetic fixture: beta fixed at generation",
    })
    line = {"base": {"l0_H": 100e-12, "c_F": 40e-15, "i_star_A": 1e-3}, "pattern": [1.0], "pattern_target": "c",
            "n_supercells": 64, "dc_bias_A": 0.0}
    lk_true = 8e-9
    f0 = film.resonance_frequency(lk_true + 2e-9, 1e-13)
    tc = 13.0
    rn = lk_true / film.lk_from_tc(tc, 1.0) / 1000.0
    configs = {
        "tc.json": {"curves": [{"path": "transitions/film_a.csv", "film_id": "film_a"},
                               {"path": "transitions/film_b.csv", "film_id": "film_b"}]},
        "lk.json": {"films": [
            {"film_id": "film_a", "tc_K": tc, "rn_sheet_ohm": rn, "squares": 1000.0,
             "f0_Hz": f0, "lg_H": 2e-9, "c_F": 1e-13},
            {"film_id": "film_b", "tc_K": 12.5, "rn_sheet_ohm": 120.0, "squares": 500.0},
        ]},
        "resfit.json": {"sweeps": [{"path": f"istar/{s['path']}", "probe_power_dBm": s["probe_power_dBm"]}
                                   for s in sweeps[:: max(1, len(sweeps) // 4)]]},
        "istar.json": {"manifest": "istar/manifest.json", "i_c_A": 0.25e-3},
        "dispersion.json": {"line": {**line, "pattern": [1.0, 1.0, 1.5], "n_supercells": 16},
                            "grid": {"f_min_Hz": 1e8, "f_max_Hz": 1.5e11, "n_points": 4000}},
        "design.json": {"target_pump_Hz": 8e9, "base": line["base"], "n_supercells": 64, "dc_bias_A": 0.3e-3,
                        "i_p0_A": 1e-4},
        "gain.json": {"line": {**line, "dc_bias_A": 0.5e-3}, "pump_Hz": 16e9, "i_p0_A": 1e-4,
                      "signal": {"f_min_Hz": 4e9, "f_max_Hz": 12e9, "n_points": 81}},
        "oracle.json": {"line": {**line, "base": {"l0_H": 100e-12, "c_F": 40e-15, "i_star_A": None},
                                 "n_supercells": 32},
                        "drive": [{"f_Hz": 8e9, "amplitude_A": 1e-5}], "settle_transits": 3},
    }
    for name, doc in configs.items():
        put(name, io.write_json, doc)
    run.outputs.extend(written)
    return {"files": written, "istar_true_A": fx.i_star, "lk0_true_H": fx.lk0}


COMMANDS = {
    "tc": cmd_tc,
    "lk": cmd_lk,
    "resfit": cmd_resfit,
    "istar": cmd_istar,
    "dispersion": cmd_dispersion,
    "design": cmd_design,
    "gain": cmd_gain,
    "oracle": cmd_oracle,
    "gen-fixtures": cmd_gen_fixtures,
}


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", type=Path, default=d(None), help="JSON run config")
    p.add_argument("--out", type=Path, default=d(Path("kitwpa_out")), help="output directory")
    p.add_argument("--no-plots", action="store_true", default=d(False), help="skip SVG plots")
    p.add_argument("--seed", type=int, default=d(None), help="seed for synthetic data")
    p.add_argument("--verbose", "-v", action="store_true", default=d(False), help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kitwpa", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    helps = {
        "tc": "critical temperature from R(T) curves",
        "lk": "kinetic inductance by the T_c and resonance methods",
        "resfit": "fit resonance traces",
        "istar": "nonlinearity scale I* from a power sweep",
        "dispersion": "Bloch dispersion and stopbands of a loaded line",
        "design": "loading design, pump placement and gain",
        "gain": "coupled-mode gain of a pumped line",
        "oracle": "time-domain simulation of the nonlinear ladder",
        "gen-fixtures": "write seeded synthetic data and example configs",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def run_command(command: str, config: dict, base_dir: Path, out: Path, plots: bool = True,
                seed: int | None = None) -> dict:
    """Run one command on an in-memory config; returns the validated report."""
    check_keys(config, {**SCHEMAS[command], **COMMON_KEYS})
    if seed is None and config.get("seed") is not None:
        seed = int(config["seed"])
    out.mkdir(parents=True, exist_ok=True)
    run = Run(command, config, base_dir, out, plots, seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results = COMMANDS[command](run)
    notes = run.notes + [str(w.message) for w in caught if issubclass(w.category, UserWarning)]
    digest = report.input_digest({"command": command, "config": config, "seed": seed}, run.inputs)
    rep = report.build_report(command, digest, results, notes, seed, run.outputs)
    io.write_json(out / f"report_{command}.json", rep)
    return rep


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.config is not None:
            config = io.read_json(args.config)
            base_dir = args.config.resolve().parent
        elif args.command == "gen-fixtures":
            config, base_dir = {}, Path.cwd()
        else:
            raise DataError(f"{args.command}: --config is required")
        log.info("running %s", args.command)
        rep = run_command(args.command, config, base_dir, args.out, not args.no_plots, args.seed)
    except DataError as exc:
        print(f"kitwpa {args.command}: input error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"kitwpa {args.command}: computation failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    except KitwpaError as exc:  # pragma: no cover - every error is one of the two above
        print(f"kitwpa {args.command}: {exc}", file=sys.stderr)
        return 3
    for msg in rep["warnings"]:
        print(f"warning: {msg}", file=sys.stderr)
    print(args.out / f"report_{args.command}.json")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
