"""Inverse-dataset container and its versioned JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import FormatError, ValidationError
from .simplex import on_simplex

DATASET_FORMAT = "invtremo.inverse-dataset"
DATASET_VERSION = 1


@dataclass
class InverseDataset:
    """Rows of (preference vector, nondominated solution) for one task.

    Invariants checked on construction and on load: every preference row
    sums to one within 1e-6 with nonnegative components, and every
    solution lies within the recorded bounds.
    """

    m: int
    d: int
    W: np.ndarray
    X: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    nondominated: bool = True
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.W = np.atleast_2d(np.asarray(self.W, dtype=float))
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.validate()

    def __len__(self) -> int:
        return len(self.W)

    def validate(self) -> None:
        if self.W.shape != (len(self.X), self.m):
            raise ValidationError(
                f"preference block has shape {self.W.shape}, expected ({len(self.X)}, {self.m})"
            )
        if self.X.shape[1] != self.d:
            raise ValidationError(f"solution block has {self.X.shape[1]} columns, expected {self.d}")
        bad = np.nonzero(~on_simplex(self.W, tol=1e-6))[0]
        if bad.size:
            raise ValidationError(f"preference rows {bad.tolist()} are not on the simplex")
        out = np.nonzero(
            np.any(self.X < self.lower - 1e-12, axis=1)
            | np.any(self.X > self.upper + 1e-12, axis=1)
        )[0]
        if out.size:
            raise ValidationError(f"solution rows {out.tolist()} violate the recorded bounds")

    def column(self, j: int) -> np.ndarray:
        return self.X[:, j]

    def to_dict(self) -> dict:
        return {
            "format": DATASET_FORMAT,
            "version": DATASET_VERSION,
            "m": self.m,
            "d": self.d,
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "nondominated": self.nondominated,
            "provenance": self.provenance,
            "rows": [
                {"w": w.tolist(), "x": x.tolist()} for w, x in zip(self.W, self.X)
            ],
        }

    @staticmethod
    def from_dict(obj: dict) -> "InverseDataset":
        if obj.get("format") != DATASET_FORMAT:
            raise FormatError(f"not an inverse-dataset file (format={obj.get('format')!r})")
        if obj.get("version") != DATASET_VERSION:
            raise FormatError(f"unsupported dataset version {obj.get('version')!r}")
        rows = obj["rows"]
        return InverseDataset(
            m=int(obj["m"]),
            d=int(obj["d"]),
            W=np.asarray([r["w"] for r in rows], dtype=float),
            X=np.asarray([r["x"] for r in rows], dtype=float),
            lower=np.asarray(obj["lower"], dtype=float),
            upper=np.asarray(obj["upper"], dtype=float),
            nondominated=bool(obj["nondominated"]),
            provenance=dict(obj.get("provenance", {})),
        )


def dumps_canonical(obj: dict) -> str:
    """Deterministic JSON serialization used by every writer in the package."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_dataset(dataset: InverseDataset, path: str | Path) -> None:
    Path(path).write_text(dumps_canonical(dataset.to_dict()))


def load_dataset(path: str | Path) -> InverseDataset:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: malformed JSON at line {err.lineno}: {err.msg}") from err
    return InverseDataset.from_dict(obj)
