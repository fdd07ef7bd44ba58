"""Linear-vacuous (epsilon-contamination) credal sets around a distribution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Interval, ProbabilityDistribution, cumulative

DEFAULT_IDM_S = 1.0


@dataclass(frozen=True)
class CredalBox:
    """Bounds induced by ``{(1 - eps) P + eps H : H any distribution}``.

    ``class_bounds[i]`` bounds the probability of class ``i``;
    ``cumulative_bounds[i]`` bounds ``P({0, ..., i})``. The last cumulative
    bound is always the point ``[1, 1]``.
    """

    epsilon: float
    center: ProbabilityDistribution
    class_bounds: tuple[Interval, ...]
    cumulative_bounds: tuple[Interval, ...]

    @property
    def n_classes(self) -> int:
        return self.center.n_classes

    def lower_cumulative(self) -> np.ndarray:
        return np.array([b.lo for b in self.cumulative_bounds])

    def upper_cumulative(self) -> np.ndarray:
        return np.array([b.hi for b in self.cumulative_bounds])

    def contains(self, p: ProbabilityDistribution, tol: float = 1e-12) -> bool:
        """Whether ``p`` satisfies every class bound (boundary inclusive)."""
        return all(b.contains(x, tol) for b, x in zip(self.class_bounds, p.probs))


def build_credal_box(p: ProbabilityDistribution, epsilon: float) -> CredalBox:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    shrunk = (1.0 - epsilon) * p.probs
    class_bounds = tuple(Interval(lo, lo + epsilon) for lo in shrunk)

    cum = cumulative(p).cum
    cum_bounds = []
    for value in cum[:-1]:
        lo = min(max((1.0 - epsilon) * value, 0.0), 1.0)
        hi = min(lo + epsilon, 1.0)
        cum_bounds.append(Interval(lo, hi))
    cum_bounds.append(Interval(1.0, 1.0))
    return CredalBox(epsilon, p, class_bounds, tuple(cum_bounds))


def extreme_points(box: CredalBox) -> list[ProbabilityDistribution]:
    """The C vertices: all contamination mass placed on one class."""
    eps = box.epsilon
    base = (1.0 - eps) * box.center.probs
    points = []
    for k in range(box.n_classes):
        v = base.copy()
        v[k] += eps
        # rounding can leave the sum a few ulps away from 1
        points.append(ProbabilityDistribution(v / v.sum()))
    return points


def epsilon_from_idm(s: float = DEFAULT_IDM_S, n: int = 0) -> float:
    """Contamination level matching an imprecise Dirichlet model with
    hyperparameter ``s`` after ``n`` observations."""
    if s <= 0:
        raise ValueError(f"IDM hyperparameter s must be positive, got {s}")
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    return s / (n + s)
