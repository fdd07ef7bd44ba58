"""Distances between class-probability vectors.

KL and chi-squared may be ``inf``; the Monte-Carlo bounds take min/max over
them, so they are returned as values rather than raised.
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .core import ProbabilityDistribution


class DivergenceKind(str, Enum):
    KOLMOGOROV_SMIRNOV = "kolmogorov_smirnov"
    KULLBACK_LEIBLER = "kullback_leibler"
    CHI_SQUARED = "chi_squared"

    @classmethod
    def parse(cls, value: "str | DivergenceKind") -> "DivergenceKind":
        if isinstance(value, cls):
            return value
        aliases = {"ks": cls.KOLMOGOROV_SMIRNOV, "kl": cls.KULLBACK_LEIBLER,
                   "chi2": cls.CHI_SQUARED}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


def _check_pair(p: ProbabilityDistribution, q: ProbabilityDistribution):
    if p.n_classes != q.n_classes:
        raise ValueError(f"class count mismatch: {p.n_classes} vs {q.n_classes}")


def ks_distance(p: ProbabilityDistribution, q: ProbabilityDistribution) -> float:
    _check_pair(p, q)
    gap = np.abs(np.cumsum(p.probs)[:-1] - np.cumsum(q.probs)[:-1])
    return float(min(gap.max(), 1.0))


def kl_divergence(p: ProbabilityDistribution, q: ProbabilityDistribution) -> float:
    _check_pair(p, q)
    total = 0.0
    for pi, qi in zip(p.probs, q.probs):
        if pi == 0.0:
            continue
        if qi == 0.0:
            return math.inf
        total += pi * (math.log(pi) - math.log(qi))  # no overflow for tiny qi
    return max(total, 0.0)


def chi2_divergence(p: ProbabilityDistribution, q: ProbabilityDistribution) -> float:
    """Csiszar form with ``f(u) = (1 - u)^2 / u``, i.e. ``sum (q - p)^2 / p``.

    Classes with ``p_i = q_i = 0`` contribute nothing. Any other zero on
    either side makes the divergence infinite.
    """
    _check_pair(p, q)
    if np.any((p.probs == 0.0) ^ (q.probs == 0.0)):
        return math.inf
    # q (1 - u)^2 / u with u = p / q, rearranged so tiny q cannot overflow
    return float(_chi2_rows(p.probs[None], q.probs[None])[0])


_DISTANCES = {
    DivergenceKind.KOLMOGOROV_SMIRNOV: ks_distance,
    DivergenceKind.KULLBACK_LEIBLER: kl_divergence,
    DivergenceKind.CHI_SQUARED: chi2_divergence,
}


def distance(p, q, kind: DivergenceKind = DivergenceKind.KOLMOGOROV_SMIRNOV) -> float:
    return _DISTANCES[DivergenceKind.parse(kind)](p, q)


def marginal_difference(p, r, q, kind: DivergenceKind = DivergenceKind.KOLMOGOROV_SMIRNOV) -> float:
    """``D(p, q) - D(r, q)``: how much closer to ``q`` one gets moving from p to r."""
    if p == r:
        _check_pair(p, q)
        return 0.0
    a = distance(p, q, kind)
    b = distance(r, q, kind)
    if math.isinf(a) and math.isinf(b):
        return math.nan
    return a - b


def _ks_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    gap = np.abs(np.cumsum(p, axis=1)[:, :-1] - np.cumsum(q, axis=1)[:, :-1])
    return np.minimum(gap.max(axis=1), 1.0)


def _kl_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * (np.log(p) - np.log(q)), 0.0)
    out = terms.sum(axis=1)
    out[np.any((p > 0) & (q == 0), axis=1)] = math.inf
    return np.maximum(out, 0.0)


def _chi2_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    both_zero = (p == 0) & (q == 0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        terms = np.where(both_zero, 0.0, (q - p) ** 2 / p)
    out = terms.sum(axis=1)
    out[np.any((p == 0) ^ (q == 0), axis=1)] = math.inf
    return out


_ROW_DISTANCES = {
    DivergenceKind.KOLMOGOROV_SMIRNOV: _ks_rows,
    DivergenceKind.KULLBACK_LEIBLER: _kl_rows,
    DivergenceKind.CHI_SQUARED: _chi2_rows,
}


def distance_rows(p: np.ndarray, q: np.ndarray, kind: DivergenceKind) -> np.ndarray:
    """Row-wise distances between two stacks of distributions, shape (n, C)."""
    p, q = np.atleast_2d(p), np.atleast_2d(q)
    if p.shape[1] != q.shape[1]:
        raise ValueError(f"class count mismatch: {p.shape[1]} vs {q.shape[1]}")
    return _ROW_DISTANCES[DivergenceKind.parse(kind)](p, q)
