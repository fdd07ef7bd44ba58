"""Value types shared across the package.

Probability vectors are stored as read-only numpy arrays so instances can be
passed between threads and used as cache values without defensive copies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

INGEST_TOL = 1e-6
INTERNAL_TOL = 1e-9
NEGATIVE_TOL = 1e-9


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """A point in the unit simplex over ``C >= 2`` classes."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 1 or probs.size < 2:
            raise ValueError("a distribution needs at least 2 classes")
        if not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite")
        if np.any(probs < 0):
            raise ValueError(f"negative probability in {probs.tolist()}")
        if abs(probs.sum() - 1.0) > INTERNAL_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def n_classes(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.n_classes

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbabilityDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())

    def __repr__(self) -> str:
        return f"ProbabilityDistribution({self.probs.tolist()})"

    def argmax(self) -> int:
        """Index of the most probable class; ties go to the lowest index."""
        return int(np.argmax(self.probs))

    @classmethod
    def one_hot(cls, index: int, n_classes: int) -> "ProbabilityDistribution":
        probs = np.zeros(n_classes)
        probs[index] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, n_classes: int) -> "ProbabilityDistribution":
        return cls(np.full(n_classes, 1.0 / n_classes))


@dataclass(frozen=True, eq=False)
class CumulativeDistribution:
    cum: np.ndarray

    def __post_init__(self):
        cum = _frozen(self.cum)
        if cum.ndim != 1 or cum.size < 2:
            raise ValueError("a cumulative distribution needs at least 2 entries")
        if np.any(np.diff(cum) < 0):
            raise ValueError("cumulative distribution must be nondecreasing")
        if np.any(cum < 0) or np.any(cum > 1):
            raise ValueError("cumulative probabilities must lie in [0, 1]")
        if abs(cum[-1] - 1.0) > INTERNAL_TOL:
            raise ValueError("cumulative distribution must end at 1")
        object.__setattr__(self, "cum", cum)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CumulativeDistribution):
            return NotImplemented
        return np.array_equal(self.cum, other.cum)

    def __hash__(self) -> int:
        return hash(self.cum.tobytes())

    def __len__(self) -> int:
        return int(self.cum.size)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if np.isnan(lo) or np.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi + 1e-12:
            raise ValueError(f"improper interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @classmethod
    def point(cls, value: float) -> "Interval":
        return cls(value, value)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def issubset(self, other: "Interval", tol: float = 0.0) -> bool:
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class ShapleyIntervalSet:
    """Per-feature Shapley intervals before and after the efficiency reduction.

    ``reduced`` equals ``raw`` whenever the reduction was skipped; ``warning``
    then carries the reason.
    """

    raw: tuple[Interval, ...]
    reduced: tuple[Interval, ...]
    precise: tuple[float, ...]
    gain: Interval
    warning: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = len(self.raw)
        if m < 1:
            raise ValueError("need at least one feature")
        if len(self.reduced) != m or len(self.precise) != m:
            raise ValueError("raw, reduced and precise must have equal length")
        for k, (r, red) in enumerate(zip(self.raw, self.reduced)):
            if not red.issubset(r, tol=INTERNAL_TOL):
                raise ValueError(f"reduced interval {k} is not inside the raw one")

    @property
    def n_features(self) -> int:
        return len(self.raw)


def make_distribution(values: Sequence[float]) -> ProbabilityDistribution:
    """Validate and normalize raw class scores coming from outside the package.

    Small negative noise (down to -1e-9) is clamped to zero; a sum that is off
    by more than 1e-6 is rescaled.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("need a 1-D vector with at least 2 entries")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    if np.any(arr < -NEGATIVE_TOL):
        raise ValueError(f"negative entries in {arr.tolist()}")
    arr = np.clip(arr, 0.0, None)
    total = arr.sum()
    if total <= 0:
        raise ValueError("all-zero vector cannot be normalized")
    if abs(total - 1.0) > INGEST_TOL or np.any(np.asarray(values, dtype=float) < 0):
        arr = arr / total
    # absorb residual rounding so the strict internal check holds
    arr = arr / arr.sum()
    return ProbabilityDistribution(arr)


def cumulative(p: ProbabilityDistribution) -> CumulativeDistribution:
    cum = np.cumsum(p.probs)
    cum = np.clip(cum, 0.0, 1.0)
    cum[-1] = 1.0
    return CumulativeDistribution(cum)
