"""On-disk formats: CSV time series, JSON manifests, flat key=value
configs, and a small binary container for field snapshots.

All numeric CSV entries use repr() (shortest round-trip decimal), so
identical runs produce bitwise-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .spectral import ScalarField2D, TorusGrid

__all__ = ["write_csv", "read_csv", "write_manifest", "read_config",
           "save_field", "load_field"]

FIELD_MAGIC = b"VSLF"
FIELD_VERSION = 1


def write_csv(path, columns, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v
                        for v in row])


def read_csv(path):
    """Returns (columns, rows) with all entries parsed as float when
    possible."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        columns = next(r)
        rows = []
        for raw in r:
            row = []
            for v in raw:
                try:
                    row.append(float(v))
                except ValueError:
                    row.append(v)
            rows.append(row)
    return columns, rows


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_manifest(path, config: dict, extra: dict | None = None):
    doc = {"config": config, "config_hash": config_hash(config)}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_config(path) -> dict:
    """Flat key=value file; '#' starts a comment; values kept as strings."""
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def save_field(path, field: ScalarField2D, time: float, field_id: str):
    """Binary snapshot: magic, version, N, L, time, 16-byte id, then
    row-major little-endian float64 samples."""
    fid = field_id.encode()[:16].ljust(16, b"\0")
    header = FIELD_MAGIC + struct.pack("<II", FIELD_VERSION, field.grid.resolution)
    header += struct.pack("<dd", field.grid.half_period, time)
    header += fid
    data = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    Path(path).write_bytes(header + data)


def load_field(path):
    """Returns (field, time, field_id)."""
    blob = Path(path).read_bytes()
    if blob[:4] != FIELD_MAGIC:
        raise ValueError("not a field file (bad magic)")
    version, N = struct.unpack("<II", blob[4:12])
    if version != FIELD_VERSION:
        raise ValueError(f"unsupported field-file version {version}")
    L, time = struct.unpack("<dd", blob[12:28])
    field_id = blob[28:44].rstrip(b"\0").decode()
    values = np.frombuffer(blob[44:], dtype="<f8").reshape(N, N).copy()
    return ScalarField2D(TorusGrid(L, N), values), time, field_id
