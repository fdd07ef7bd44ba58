"""Sampling-based bounds for arbitrary divergences.

Points of a credal set are drawn as convex combinations of its extreme
points with weights uniform on the simplex. The resulting min/max of
``D(P, Q) - D(R, Q)`` is an inner approximation of the true range.

Streams are prefix-stable: the first ``n`` triples drawn with ``count = N``
are the triples drawn with ``count = n``, so intervals only grow with
``count`` for a fixed seed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .contamination import CredalBox, extreme_points
from .core import Interval
from .divergences import DivergenceKind, distance_rows

MIN_SAMPLES = 100
MAX_VERTEX_TRIPLES = 64


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def sample_simplex(k: int, count: int, seed=None) -> np.ndarray:
    """``count`` points uniform on the (k-1)-simplex, one per row.

    Normalized unit exponentials: ``E_i = Y_i / sum(Y)``.
    """
    if k < 2:
        raise ValueError(f"simplex dimension must be >= 2, got {k}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    y = rng.standard_exponential((count, k))
    return y / y.sum(axis=1, keepdims=True)


def _vertex_matrix(box: CredalBox) -> np.ndarray:
    return np.array([v.probs for v in extreme_points(box)])


def sample_credal(box: CredalBox, count: int, seed=None) -> np.ndarray:
    """``count`` distributions from the credal set, one per row."""
    if box.epsilon == 0.0:
        sample_simplex(box.n_classes, count, seed)  # validate arguments
        return np.tile(box.center.probs, (count, 1))
    weights = sample_simplex(box.n_classes, count, seed)
    samples = weights @ _vertex_matrix(box)
    return samples / samples.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class McResult:
    interval: Interval
    evaluated: int
    infinite: int = 0
    undefined: int = 0
    meta: dict = field(default_factory=dict, compare=False)


def _anchor_points(box: CredalBox) -> np.ndarray:
    return np.vstack([box.center.probs[None, :], _vertex_matrix(box)])


def _injected_triples(box_p, box_r, box_q):
    """Centers first, then vertex triples (all of them when there are few)."""
    ap, ar, aq = _anchor_points(box_p), _anchor_points(box_r), _anchor_points(box_q)
    c = box_p.n_classes
    if c ** 3 <= MAX_VERTEX_TRIPLES:
        idx = [(0, 0, 0)] + list(itertools.product(range(1, c + 1), repeat=3))
    else:
        idx = [(0, 0, 0)]
        idx += [(k, k, k) for k in range(1, c + 1)]
        idx += [(k, j, 0) for k in range(1, c + 1) for j in range(1, c + 1) if k != j]
    p = np.array([ap[i] for i, _, _ in idx])
    r = np.array([ar[j] for _, j, _ in idx])
    q = np.array([aq[k] for _, _, k in idx])
    return p, r, q


def mc_difference_bounds(box_p: CredalBox, box_r: CredalBox, box_q: CredalBox,
                         kind: DivergenceKind = DivergenceKind.KOLMOGOROV_SMIRNOV,
                         count: int = 1000, seed=None) -> McResult:
    """Sampled range of ``D(P, Q) - D(R, Q)`` with P, R, Q drawn independently.

    When both distances are infinite the difference is undefined and the
    triple is skipped (counted in ``undefined``).
    """
    if not box_p.n_classes == box_r.n_classes == box_q.n_classes:
        raise ValueError("credal boxes must share the class count")
    if count < MIN_SAMPLES:
        raise ValueError(f"count must be >= {MIN_SAMPLES}, got {count}")
    kind = DivergenceKind.parse(kind)
    p0, r0, q0 = _injected_triples(box_p, box_r, box_q)
    n_random = max(count - len(p0), 0)
    seeds = _seed_sequence(seed).spawn(3)
    if n_random:
        p = np.vstack([p0, sample_credal(box_p, n_random, seeds[0])])
        r = np.vstack([r0, sample_credal(box_r, n_random, seeds[1])])
        q = np.vstack([q0, sample_credal(box_q, n_random, seeds[2])])
    else:
        p, r, q = p0, r0, q0
    return _difference_range(p, r, q, kind)


def _difference_range(p, r, q, kind) -> McResult:
    dp = distance_rows(p, q, kind)
    dr = distance_rows(r, q, kind)
    both_inf = np.isinf(dp) & np.isinf(dr)
    with np.errstate(invalid="ignore"):
        diff = np.where(np.all(p == r, axis=1), 0.0, dp - dr)
    diff = diff[~both_inf | np.all(p == r, axis=1)]
    if diff.size == 0:
        raise ValueError("every sampled difference is undefined (inf - inf)")
    n_inf = int(np.isinf(diff).sum())
    return McResult(Interval(float(diff.min()), float(diff.max())), int(len(p)),
                    infinite=n_inf, undefined=int(len(p) - diff.size))


def mc_distance_bounds(box_p: CredalBox, box_q: CredalBox,
                       kind: DivergenceKind = DivergenceKind.KOLMOGOROV_SMIRNOV,
                       count: int = 1000, seed=None) -> McResult:
    """Sampled range of ``D(P, Q)``: the total-gain bounds for the sampling path."""
    if box_p.n_classes != box_q.n_classes:
        raise ValueError("credal boxes must share the class count")
    if count < MIN_SAMPLES:
        raise ValueError(f"count must be >= {MIN_SAMPLES}, got {count}")
    ap, aq = _anchor_points(box_p), _anchor_points(box_q)
    pairs = list(itertools.product(range(len(ap)), range(len(aq))))
    p0 = np.array([ap[i] for i, _ in pairs])
    q0 = np.array([aq[j] for _, j in pairs])
    n_random = max(count - len(p0), 0)
    seeds = _seed_sequence(seed).spawn(2)
    if n_random:
        p = np.vstack([p0, sample_credal(box_p, n_random, seeds[0])])
        q = np.vstack([q0, sample_credal(box_q, n_random, seeds[1])])
    else:
        p, q = p0, q0
    d = distance_rows(p, q, kind)
    n_inf = int(np.isinf(d).sum())
    return McResult(Interval(float(d.min()), float(d.max())), int(len(p)), infinite=n_inf)
