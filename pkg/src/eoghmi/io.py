"""Recording persistence: timestamped CSV or raw float32 with a JSON sidecar."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .trace import SignalTrace

_SIDECAR_KEYS = ("fs", "subject", "activity", "session", "bit_depth")


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(Path(path).suffix + ".json")


def save_recording(trace: SignalTrace, path) -> Path:
    """Write a trace as CSV (``t_s,amplitude``) or raw little-endian float32.

    The format follows the extension: ``.csv`` writes a timestamp column at
    1/fs spacing; anything else writes bare float32 samples.  Both get a JSON
    sidecar carrying fs and the trace's provenance metadata.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_s", "amplitude"])
            for i, v in enumerate(trace.samples):
                writer.writerow([repr(i / trace.fs), repr(float(v))])
    else:
        trace.samples.astype("<f4").tofile(path)
    sidecar = {
        "fs": trace.fs,
        "subject": trace.meta.get("subject", "unknown"),
        "activity": trace.meta.get("activity", "unknown"),
        "session": trace.meta.get("session", "unknown"),
        "bit_depth": trace.meta.get("bit_depth", 16),
    }
    for key, value in trace.meta.items():
        if key not in sidecar:
            sidecar[key] = value
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    return path


def load_recording(path) -> SignalTrace:
    """Read a recording saved by save_recording; fs comes from the sidecar.

    CSV files may also stand alone (fs inferred from the timestamp column)
    so externally produced files remain loadable.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidParameterError(f"recording not found: {path}")
    meta: dict = {}
    fs = None
    sc = sidecar_path(path)
    if sc.exists():
        meta = json.loads(sc.read_text())
        fs = float(meta.pop("fs"))

    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["t_s", "amplitude"]:
                raise InvalidParameterError(f"{path}: expected 't_s,amplitude' header")
            times, values = [], []
            for rec in reader:
                if not rec:
                    continue
                times.append(float(rec[0]))
                values.append(float(rec[1]))
        if len(values) < 2:
            raise InvalidParameterError(f"{path}: need at least 2 samples")
        if fs is None:
            steps = np.diff(times)
            if np.max(np.abs(steps - steps[0])) > 1e-6:
                raise InvalidParameterError(f"{path}: non-uniform timestamps")
            fs = 1.0 / steps[0]
        samples = np.asarray(values, dtype=np.float64)
    else:
        if fs is None:
            raise InvalidParameterError(f"{path}: raw recordings need a JSON sidecar with fs")
        samples = np.fromfile(path, dtype="<f4").astype(np.float64)
        if samples.size < 1:
            raise InvalidParameterError(f"{path}: empty recording")
    return SignalTrace(samples=samples, fs=fs, meta=meta)


def list_recordings(directory) -> list[Path]:
    """Recordings under a directory (CSV or raw-with-sidecar), path-sorted."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InvalidParameterError(f"not a directory: {directory}")
    found = []
    for p in sorted(directory.iterdir()):
        if p.suffix.lower() == ".csv" and not p.name.endswith(".csv.json"):
            found.append(p)
        elif p.suffix.lower() in (".raw", ".f32", ".bin") and sidecar_path(p).exists():
            found.append(p)
    return found
