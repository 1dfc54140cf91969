"""Dataset and matrix files: CSV features, label lists, key=value configs."""
from __future__ import annotations

import csv
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError


@dataclass
class Dataset:
    X: np.ndarray  # d x n
    truth: Optional[np.ndarray]
    name: str

    def __post_init__(self):
        if self.truth is not None and len(self.truth) != self.X.shape[1]:
            raise DataError(f"{len(self.truth)} labels for {self.X.shape[1]} points")


def read_features(path) -> np.ndarray:
    """Rows are samples; returns the d x n transpose."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric value") from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataError(f"{path}:{lineno}: expected {width} columns, got {len(values)}")
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    X = np.asarray(rows, dtype=np.float64).T
    if not np.all(np.isfinite(X)):
        raise DataError(f"{path}: non-finite feature values")
    return np.ascontiguousarray(X)


def read_labels(path) -> np.ndarray:
    labels = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            labels.append(int(line))
        except ValueError:
            raise DataError(f"{path}:{lineno}: expected an integer label, got {line!r}") from None
    return np.asarray(labels, dtype=np.int64)


def write_labels(labels, path) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


def load_dataset(features_path, labels_path=None, div255: bool = False) -> Dataset:
    X = read_features(features_path)
    if div255:
        X = X / 255.0
    truth = read_labels(labels_path) if labels_path is not None else None
    return Dataset(X=X, truth=truth, name=Path(features_path).stem)


def write_matrix(M, path) -> None:
    np.savetxt(path, np.asarray(M), delimiter=",", fmt="%.17g")


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def coerce(cls, values: dict[str, str]) -> dict:
    """Convert string values to the field types of dataclass ``cls``; unknown keys are ignored."""
    out = {}
    for f in fields(cls):
        if f.name not in values or values[f.name] is None:
            continue
        raw = values[f.name]
        if not isinstance(raw, str):
            out[f.name] = raw
            continue
        ftype = f.type if isinstance(f.type, str) else f.type.__name__
        try:
            if ftype == "bool":
                if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(raw)
                out[f.name] = raw.lower() in ("true", "1", "yes")
            elif ftype == "int":
                out[f.name] = int(raw)
            elif ftype == "float":
                out[f.name] = float(raw)
            else:
                out[f.name] = raw
        except ValueError:
            raise ConfigError(f"bad value for {f.name}: {raw!r}") from None
    return out
