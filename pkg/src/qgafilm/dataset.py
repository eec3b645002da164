"""Append-only store of (structure code, true figure of merit) pairs."""

from __future__ import annotations

import csv
import math

import numpy as np

from .encoding import code_to_string, string_to_code


class LabeledDataset:
    """Training rows for the surrogates. Codes are unique and same-length."""

    def __init__(self, code_length: int):
        if code_length < 1:
            raise ValueError("code_length must be >= 1")
        self.code_length = code_length
        self._codes: list[np.ndarray] = []
        self._labels: list[float] = []
        self._index: dict[bytes, int] = {}

    def __len__(self) -> int:
        return len(self._codes)

    def _key(self, code: np.ndarray) -> bytes:
        return code.astype(np.uint8).tobytes()

    def __contains__(self, code) -> bool:
        code = np.asarray(code, dtype=np.uint8)
        return self._key(code) in self._index

    def add(self, code, fom: float) -> None:
        code = np.asarray(code, dtype=np.uint8)
        if code.shape != (self.code_length,):
            raise ValueError(f"code shape {code.shape} != ({self.code_length},)")
        if not math.isfinite(fom):
            raise ValueError(f"label must be finite, got {fom}")
        key = self._key(code)
        if key in self._index:
            raise ValueError(f"duplicate code {code_to_string(code)}")
        self._index[key] = len(self._codes)
        self._codes.append(code.copy())
        self._labels.append(float(fom))

    def label_of(self, code) -> float:
        code = np.asarray(code, dtype=np.uint8)
        return self._labels[self._index[self._key(code)]]

    def codes(self) -> np.ndarray:
        return np.asarray(self._codes, dtype=np.uint8)

    def labels(self) -> np.ndarray:
        return np.asarray(self._labels, dtype=float)

    def rows(self):
        return list(zip(self._codes, self._labels))

    def best(self) -> tuple[np.ndarray, float]:
        """Row with the minimum label (figure of merit: lower is better)."""
        if not self._labels:
            raise ValueError("dataset is empty")
        i = int(np.argmin(self._labels))
        return self._codes[i].copy(), self._labels[i]

    def subset(self, indices) -> "LabeledDataset":
        out = LabeledDataset(self.code_length)
        for i in indices:
            out.add(self._codes[i], self._labels[i])
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["code", "fom"])
            for code, label in zip(self._codes, self._labels):
                writer.writerow([code_to_string(code), repr(label)])

    @classmethod
    def from_csv(cls, path) -> "LabeledDataset":
        rows = []
        with open(path, newline="") as fh:
            for record in csv.DictReader(fh):
                rows.append((string_to_code(record["code"]), float(record["fom"])))
        if not rows:
            raise ValueError(f"empty dataset file {path}")
        out = cls(len(rows[0][0]))
        for code, label in rows:
            out.add(code, label)
        return out
