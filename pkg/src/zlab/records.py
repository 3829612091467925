"""ExperimentRecord and its JSON / CSV serialisations."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

VERDICTS = ("pass", "fail", "informational")


def _clean(value):
    """Make a value JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, complex):
        return {"re": _clean(value.real), "im": _clean(value.imag)}
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return str(value)


@dataclass
class ExperimentRecord:
    name: str
    inputs: dict
    computed: dict
    reference: dict
    verdict: str
    runtime_seconds: float = 0.0
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")

    def payload(self):
        """Everything except the wall-clock runtime; equal inputs give equal payloads."""
        return _clean({"name": self.name, "inputs": self.inputs, "computed": self.computed,
                       "reference": self.reference, "verdict": self.verdict, "notes": self.notes})

    def to_dict(self):
        d = self.payload()
        d["runtime_seconds"] = float(self.runtime_seconds)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def payload_json(self):
        return json.dumps(self.payload(), sort_keys=True, allow_nan=False)

    def csv_row(self):
        """One flat row: name, verdict, runtime, then computed.* and reference.* columns.

        List-valued entries are stored as JSON text in their cell.
        """
        row = {"name": self.name, "verdict": self.verdict,
               "runtime_seconds": float(self.runtime_seconds)}
        for prefix, block in (("input", self.inputs), ("computed", self.computed),
                              ("reference", self.reference)):
            for k, v in _clean(block).items():
                row[f"{prefix}.{k}"] = v if not isinstance(v, (list, dict)) else json.dumps(v)
        return row

    def to_csv(self):
        row = self.csv_row()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], d["inputs"], d["computed"], d["reference"], d["verdict"],
                   d.get("runtime_seconds", 0.0), d.get("notes", []))


def output_paths(out, name, fmt, stamp=None):
    """Resolve ``--out``: a directory gets ``<name>-<timestamp>.<ext>`` files.

    A file path is used as given for its own format; with ``fmt='both'`` the
    sibling with the other extension is written too.
    """
    exts = {"json": ["json"], "csv": ["csv"], "both": ["json", "csv"]}[fmt]
    out = Path(out)
    if out.is_dir() or str(out).endswith(("/", "\\")):
        out.mkdir(parents=True, exist_ok=True)
        stamp = stamp or time.strftime("%Y%m%dT%H%M%S")
        return [out / f"{name}-{stamp}.{e}" for e in exts]
    if len(exts) == 1:
        return [out]
    return [out.with_suffix(f".{e}") for e in exts]


def write_record(record, out, fmt="json", stamp=None):
    paths = output_paths(out, record.name, fmt, stamp)
    for p in paths:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(record.to_csv() if p.suffix == ".csv" else record.to_json())
    return paths
