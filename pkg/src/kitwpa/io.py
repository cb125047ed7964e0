"""CSV and JSON readers/writers for measurement data and configs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .film import TransitionCurve
from .resonator import S21Sweep

TRANSITION_HEADER = ("temperature_K", "resistance_ohm")
S21_HEADER = ("frequency_Hz", "s21_db")
S21_PHASE = "s21_phase_rad"
GAIN_HEADER = ("f_signal_Hz", "gain_dB", "f_idler_Hz", "mismatch_rad")
DISPERSION_HEADER = ("f_Hz", "k_rad_per_supercell", "passband")


def _read_table(path: Path, required: Sequence[str], optional: Sequence[str] = ()) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"{path}: file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: cannot read ({exc})") from None
    rows = list(csv.reader(line for line in text.splitlines() if line.strip()))
    if not rows:
        raise DataError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    missing = [h for h in required if h not in header]
    if missing:
        raise DataError(f"{path}: header lacks {', '.join(missing)} (found {', '.join(header)})")
    cols = [h for h in (*required, *optional) if h in header]
    idx = [header.index(h) for h in cols]
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    try:
        data = np.array([[float(r[i]) for i in idx] for r in rows[1:]], dtype=float)
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path}: malformed row ({exc})") from None
    return {h: data[:, j] for j, h in enumerate(cols)}


def read_transition_csv(path, film_id: str | None = None, deposition_batch: str = "") -> TransitionCurve:
    """R(T) table; rows are sorted by temperature."""
    tab = _read_table(path, TRANSITION_HEADER)
    order = np.argsort(tab["temperature_K"], kind="stable")
    try:
        return TransitionCurve(
            tab["temperature_K"][order],
            tab["resistance_ohm"][order],
            Path(path).stem if film_id is None else film_id,
            deposition_batch,
        )
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def read_s21_csv(path, probe_power: float = math.nan, resonator_id: str | None = None) -> S21Sweep:
    tab = _read_table(path, S21_HEADER, (S21_PHASE,))
    order = np.argsort(tab["frequency_Hz"], kind="stable")
    phase = tab.get(S21_PHASE)
    try:
        return S21Sweep(
            tab["frequency_Hz"][order],
            tab["s21_db"][order],
            probe_power,
            Path(path).stem if resonator_id is None else resonator_id,
            None if phase is None else phase[order],
        )
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_transition_csv(path, curve: TransitionCurve) -> Path:
    return write_csv(path, TRANSITION_HEADER, zip(curve.temperature, curve.resistance))


def write_s21_csv(path, sweep: S21Sweep) -> Path:
    return write_csv(path, S21_HEADER, zip(sweep.frequency, sweep.s21_db))


def read_json(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"{path}: file not found") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: cannot parse JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise DataError(f"{path}: top level must be a JSON object")
    return doc


def dump_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(obj), encoding="utf-8")
    return path


__all__ = [
    "read_transition_csv",
    "read_s21_csv",
    "write_csv",
    "write_transition_csv",
    "write_s21_csv",
    "read_json",
    "write_json",
    "dump_json",
    "TRANSITION_HEADER",
    "S21_HEADER",
    "GAIN_HEADER",
    "DISPERSION_HEADER",
]
