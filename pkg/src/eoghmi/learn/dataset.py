"""Labeled stacked-feature datasets and their CSV persistence."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidParameterError
from ..features import FEATURE_SCHEMA_VERSION, N_STACKED, STACKED_NAMES

# Fixed activity alphabet, alphabetical; confusion matrices use this order.
ACTIVITIES = (
    "blink",
    "eyebrows_up",
    "frowning",
    "left_eye_closed",
    "normal_glance",
    "right_eye_closed",
)


@dataclass
class LabeledDataset:
    """Feature matrix with one activity label and one session key per row."""

    X: np.ndarray
    y: np.ndarray
    session: np.ndarray
    feature_names: tuple[str, ...] = STACKED_NAMES

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=object)
        self.session = np.asarray(self.session, dtype=object)
        if self.X.ndim != 2:
            raise InvalidParameterError("X must be 2-D")
        n = self.X.shape[0]
        if self.y.shape != (n,) or self.session.shape != (n,):
            raise InvalidParameterError("labels and sessions must match row count")
        if self.X.shape[1] != len(self.feature_names):
            raise InvalidParameterError(
                f"X has {self.X.shape[1]} columns for {len(self.feature_names)} feature names"
            )
        unknown = set(self.y.tolist()) - set(ACTIVITIES)
        if unknown:
            raise InvalidParameterError(f"labels outside the activity alphabet: {sorted(unknown)}")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def sessions(self) -> list[str]:
        return sorted(set(self.session.tolist()))

    def subset(self, mask: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            X=self.X[mask], y=self.y[mask], session=self.session[mask], feature_names=self.feature_names
        )


def save_dataset_csv(dataset: LabeledDataset, path) -> None:
    """Write the matrix with a header of feature names plus label,session."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + ["label", "session"])
        for row, label, session in zip(dataset.X, dataset.y, dataset.session):
            writer.writerow([repr(float(v)) for v in row] + [label, session])


def load_dataset_csv(path) -> LabeledDataset:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-2:] != ["label", "session"]:
            raise InvalidParameterError(f"{path}: expected trailing label,session columns")
        names = tuple(header[:-2])
        if len(names) != N_STACKED:
            raise InvalidParameterError(
                f"{path}: {len(names)} feature columns, expected {N_STACKED} "
                f"(schema {FEATURE_SCHEMA_VERSION})"
            )
        rows, labels, sessions = [], [], []
        for rec in reader:
            if not rec:
                continue
            rows.append([float(v) for v in rec[:-2]])
            labels.append(rec[-2])
            sessions.append(rec[-1])
    if not rows:
        raise InvalidParameterError(f"{path}: no data rows")
    return LabeledDataset(X=np.asarray(rows), y=np.asarray(labels, dtype=object),
                          session=np.asarray(sessions, dtype=object), feature_names=names)
