"""Machine-readable experiment reports.

Reports are JSON with sorted keys and a trailing newline, written to a temp
file in the target directory and renamed into place.  Wall-clock timing is
kept out of the report (it would break byte stability) and goes to a
`<name>.timing.json` sidecar instead.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def plain(obj):
    """JSON-ready copy: numpy scalars and arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, Path):
        return str(obj)
    return obj


def within(value, target, tolerance):
    value = float(value)
    return {"value": value, "target": float(target), "tolerance": float(tolerance), "kind": "within",
            "pass": bool(abs(value - target) <= tolerance)}


def at_most(value, bound):
    value = float(value)
    return {"value": value, "tolerance": float(bound), "kind": "max", "pass": bool(value <= bound)}


def at_least(value, bound):
    value = float(value)
    return {"value": value, "tolerance": float(bound), "kind": "min", "pass": bool(value >= bound)}


def in_range(value, lo, hi):
    value = float(value)
    return {"value": value, "tolerance": [float(lo), float(hi)], "kind": "range",
            "pass": bool(lo <= value <= hi)}


def holds(flag, what=""):
    return {"value": bool(flag), "tolerance": None, "kind": "flag", "pass": bool(flag),
            **({"detail": what} if what else {})}


def failed(message):
    return {"value": message, "tolerance": None, "kind": "error", "pass": False}


@dataclass
class ReportDoc:
    experiment_id: str
    config_echo: dict
    metrics: dict = field(default_factory=dict)
    observations: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(m["pass"] for m in self.metrics.values())

    def failures(self):
        return sorted(k for k, m in self.metrics.items() if not m["pass"])

    def to_dict(self) -> dict:
        return plain({
            "schemaVersion": SCHEMA_VERSION,
            "experimentId": self.experiment_id,
            "configEcho": self.config_echo,
            "metrics": self.metrics,
            "observations": self.observations,
            "artifacts": sorted(self.artifacts),
            "pass": self.passed,
        })


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_report(doc: ReportDoc, directory, name="report") -> Path:
    """Write `<name>.json` (byte-stable) and `<name>.timing.json` into directory."""
    d = Path(directory)
    path = atomic_write(d / f"{name}.json", dumps(doc.to_dict()))
    if doc.timing:
        atomic_write(d / f"{name}.timing.json", dumps(plain(doc.timing)))
    return path


def read_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
