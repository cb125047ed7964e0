"""JSON run reports: assembly, input digest and schema validation."""

from __future__ import annotations

import hashlib
import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

import jsonschema
import numpy as np

from . import __version__
from .errors import DataError


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files("kitwpa").joinpath("report.schema.json").read_text(encoding="utf-8"))


def input_digest(config: dict, files: Iterable[Path]) -> str:
    """SHA-256 over the canonical config and the bytes of every input file, in order."""
    h = hashlib.sha256()
    h.update(json.dumps(config, sort_keys=True, separators=(",", ":")).encode())
    for f in files:
        h.update(b"\0")
        h.update(Path(f).read_bytes())
    return "sha256:" + h.hexdigest()


def clean(obj):
    """Plain JSON types; non-finite floats become ``None``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def build_report(command: str, digest: str, results: dict, warnings: Iterable[str], seed: int | None,
                 outputs: Iterable[str] = ()) -> dict:
    rep = {
        "command": command,
        "version": __version__,
        "input_digest": digest,
        "seed": seed,
        "results": clean(results),
        "warnings": list(dict.fromkeys(warnings)),
        "outputs": sorted(outputs),
    }
    validate(rep)
    return rep


def validate(report: dict) -> None:
    try:
        jsonschema.validate(report, schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise DataError(f"report does not match the schema at '{path}': {exc.message}") from None
