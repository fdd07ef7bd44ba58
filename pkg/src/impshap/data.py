"""Tabular datasets: the three synthetic benchmarks and CSV ingestion."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

N_TRAIN = 1000
N_TEST = 250
CENTER = (2.5, 2.5)


class DatasetKind(str, Enum):
    CIRCLE = "circle"
    GAUSS_RINGS = "gauss_rings"
    CLUSTERS = "clusters"


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    class_names: list[str] = field(default_factory=list)
    n_classes: int | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or self.X.shape[0] < 1:
            raise ValueError("feature matrix must be 2-D with at least one row")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("need exactly one label per row")
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("one feature name per column required")
        if np.any(self.y < 0):
            raise ValueError("labels must be nonnegative class indices")
        if self.n_classes is None:
            self.n_classes = int(self.y.max()) + 1
        if np.any(self.y >= self.n_classes):
            raise ValueError(f"labels must be < {self.n_classes}")
        if not self.class_names:
            self.class_names = [str(c) for c in range(self.n_classes)]
        self.means = self.X.mean(axis=0)

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)


def circle_label(point: Sequence[float]) -> int:
    """0 inside the unit circle around (2.5, 2.5), else 1."""
    return int(math.dist(point, CENTER) > 1.0)


def rings_label(point: Sequence[float]) -> int:
    """0 inside radius 1, 2 outside radius 2, 1 in between."""
    r = math.dist(point, CENTER)
    if r < 1.0:
        return 0
    return 2 if r > 2.0 else 1


RING_COUNTS = ((340, 336, 324), (92, 80, 78))


def _quota_sample(rng: np.random.Generator, counts: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Draw from N(center, 0.5 I) until every ring class has its quota.

    Plain sampling leaves the outer ring with ~2% of the mass; quotas keep
    the classes balanced while labels stay a function of the radius.
    """
    need = np.array(counts)
    taken: list[list[np.ndarray]] = [[] for _ in counts]
    while need.any():
        batch = rng.normal(CENTER, math.sqrt(0.5), size=(4096, 2))
        for point in batch:
            c = rings_label(point)
            if need[c]:
                taken[c].append(point)
                need[c] -= 1
    X = np.vstack([np.array(t) for t in taken])
    y = np.repeat(np.arange(len(counts)), counts)
    order = rng.permutation(len(y))
    return X[order], y[order]


SQUARE_VERTICES = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])


def generate_dataset(which: "DatasetKind | str", seed: int = 0) -> tuple[Dataset, Dataset]:
    """Training (1000 rows) and test (250 rows) split of a synthetic benchmark."""
    which = DatasetKind(which)
    rng = np.random.default_rng(seed)
    n = N_TRAIN + N_TEST
    if which is DatasetKind.CIRCLE:
        X = rng.uniform(0.0, 5.0, size=(n, 2))
        y = np.array([circle_label(p) for p in X])
        k = 2
    elif which is DatasetKind.GAUSS_RINGS:
        X_tr, y_tr = _quota_sample(rng, RING_COUNTS[0])
        X_te, y_te = _quota_sample(rng, RING_COUNTS[1])
        X, y = np.vstack([X_tr, X_te]), np.concatenate([y_tr, y_te])
        k = 3
    else:
        y = rng.integers(0, 4, size=n)
        X = SQUARE_VERTICES[y] + rng.normal(0.0, 1.0, size=(n, 2))
        k = 4
    names = ["x", "y"]
    train = Dataset(X[:N_TRAIN], y[:N_TRAIN], names, n_classes=k)
    test = Dataset(X[N_TRAIN:], y[N_TRAIN:], names, n_classes=k)
    return train, test


class CsvError(ValueError):
    pass


def load_csv(path: "str | Path", label_column: str) -> Dataset:
    """Read a header-first comma-separated file.

    Labels are mapped to ``0..C-1`` in order of first appearance; every other
    column must be numeric and non-empty.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise CsvError(f"{path}: no column named {label_column!r} (have {header})")
        label_idx = header.index(label_column)
        feature_names = [h for j, h in enumerate(header) if j != label_idx]
        if not feature_names:
            raise CsvError(f"{path}: no feature columns")
        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise CsvError(f"{path}: row {line_no} has {len(row)} fields, expected {len(header)}")
            values = []
            for j, cell in enumerate(row):
                cell = cell.strip()
                if j == label_idx:
                    continue
                if cell == "" or cell.lower() in {"na", "nan"}:
                    raise CsvError(f"{path}: missing value at row {line_no}, column {header[j]!r}")
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvError(f"{path}: non-numeric value {cell!r} at row {line_no}, "
                                   f"column {header[j]!r}") from None
            label = row[label_idx].strip()
            if label == "":
                raise CsvError(f"{path}: missing label at row {line_no}")
            rows.append(values)
            labels.append(label)
    if not rows:
        raise CsvError(f"{path}: no data rows")
    class_names: list[str] = []
    index: dict[str, int] = {}
    for label in labels:
        if label not in index:
            index[label] = len(class_names)
            class_names.append(label)
    y = np.array([index[label] for label in labels])
    return Dataset(np.array(rows), y, feature_names, class_names, n_classes=len(class_names))


def write_csv(data: Dataset, path: "str | Path", label_column: str = "label") -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*data.feature_names, label_column])
        for row, label in zip(data.X, data.y):
            writer.writerow([repr(float(v)) for v in row] + [data.class_names[label]])
