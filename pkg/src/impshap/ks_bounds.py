"""Bounds on ``D_KS(P, Q) - D_KS(R, Q)`` when P, R, Q range over
cumulative-probability boxes.

The min (max) of a difference of two maxima is non-convex; it splits into
one LP per index ``k`` and per sign of the dominating ``|tau_k - alpha_k|``
(resp. ``|pi_k - alpha_k|``) term. Every subproblem over-estimates the
minimum (under-estimates the maximum) on its own region, and the region
holding the true optimum reproduces it exactly, so the bound is the min
(max) over all feasible subproblems.

Cumulative coordinates are indexed ``0 .. C-2``; the pinned last coordinate
(always 1) is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .contamination import CredalBox
from .core import Interval
from .lp import LinearProgram, Sense, solve

CASE_TOL = 1e-12


class BoundInfeasibleError(RuntimeError):
    """No subproblem of a bound family is feasible: the boxes are inconsistent."""


@dataclass(frozen=True)
class BoundProblemInputs:
    pi_bounds: tuple[Interval, ...]
    tau_bounds: tuple[Interval, ...]
    alpha_bounds: tuple[Interval, ...]

    def __post_init__(self):
        sizes = {len(self.pi_bounds), len(self.tau_bounds), len(self.alpha_bounds)}
        if len(sizes) != 1 or 0 in sizes:
            raise ValueError("pi, tau and alpha bounds need one common length >= 1")
        for name in ("pi_bounds", "tau_bounds", "alpha_bounds"):
            for b in getattr(self, name):
                if b.lo < -CASE_TOL or b.hi > 1 + CASE_TOL:
                    raise ValueError(f"{name} entry {b} leaves [0, 1]")

    @property
    def size(self) -> int:
        return len(self.pi_bounds)

    @classmethod
    def from_boxes(cls, box_p: CredalBox, box_r: CredalBox, box_q: CredalBox) -> "BoundProblemInputs":
        return cls(box_p.cumulative_bounds[:-1], box_r.cumulative_bounds[:-1],
                   box_q.cumulative_bounds[:-1])


def _distance_lp(sense: Sense, first: Sequence[Interval], alpha: Sequence[Interval],
                 objective: np.ndarray) -> LinearProgram:
    """LP skeleton over ``(B, x_0..x_{n-1}, a_0..a_{n-1})`` with boxes,
    monotonicity and ``B >= |x_i - a_i|``."""
    n = len(alpha)
    dim = 1 + 2 * n
    bounds = [(0.0, math.inf)]
    bounds += [(b.lo, b.hi) for b in first]
    bounds += [(b.lo, b.hi) for b in alpha]
    lp = LinearProgram(sense, objective, bounds=bounds)
    for i in range(n):
        row = np.zeros(dim)
        row[0], row[1 + i], row[1 + n + i] = 1.0, -1.0, 1.0
        lp.add(row, ">=", 0.0)
        row[1 + i], row[1 + n + i] = 1.0, -1.0
        lp.add(row, ">=", 0.0)
    for i in range(n - 1):
        for off in (1, 1 + n):
            row = np.zeros(dim)
            row[off + i], row[off + i + 1] = 1.0, -1.0
            lp.add(row, "<=", 0.0)
    return lp


def _dominance_rows(lp: LinearProgram, n: int, k: int, anchor: Sequence[float], upper: bool) -> None:
    """Force term ``k`` to dominate: ``anchor_k - a_k >= anchor_i - a_i`` for the
    upper family, ``a_k - anchor_k >= a_i - anchor_i`` for the lower one."""
    dim = 1 + 2 * n
    row = np.zeros(dim)
    row[1 + n + k] = 1.0
    lp.add(row, "<=" if upper else ">=", anchor[k])
    for i in range(n):
        if i == k:
            continue
        row = np.zeros(dim)
        if upper:
            row[1 + n + i], row[1 + n + k] = 1.0, -1.0
            lp.add(row, ">=", anchor[i] - anchor[k])
        else:
            row[1 + n + k], row[1 + n + i] = 1.0, -1.0
            lp.add(row, ">=", anchor[k] - anchor[i])


def _subproblem_values(moving: Sequence[Interval], fixed: Sequence[Interval],
                       alpha: Sequence[Interval], sense: Sense):
    """Yield the optimal objective of every feasible subproblem.

    ``moving`` is the cumulative kept as an LP variable (pi for the lower
    bound, tau for the upper one); ``fixed`` is the one whose extreme value is
    substituted per index.
    """
    n = len(alpha)
    fixed_hi = [b.hi for b in fixed]
    fixed_lo = [b.lo for b in fixed]
    sign = 1.0 if sense is Sense.MINIMIZE else -1.0
    for k in range(n):
        for upper in (True, False):
            if upper and fixed_hi[k] < alpha[k].lo - CASE_TOL:
                continue
            if not upper and fixed_lo[k] > alpha[k].hi + CASE_TOL:
                continue
            obj = np.zeros(1 + 2 * n)
            obj[0] = sign
            # lower bound: B - (tauU_k - a_k) or B - (a_k - tauL_k)
            # upper bound: (piU_k - a_k) - B or (a_k - piL_k) - B
            obj[1 + n + k] = sign if upper else -sign
            const = -sign * fixed_hi[k] if upper else sign * fixed_lo[k]
            lp = _distance_lp(sense, moving, alpha, obj)
            _dominance_rows(lp, n, k, fixed_hi if upper else fixed_lo, upper)
            sol = solve(lp)
            if sol.optimal:
                yield sol.objective_value + const, (k, "upper" if upper else "lower", sol.point)


def lower_difference_bound(inp: BoundProblemInputs) -> float:
    """Minimum of ``max|pi - alpha| - max|tau - alpha|`` over the boxes."""
    values = [v for v, _ in _subproblem_values(inp.pi_bounds, inp.tau_bounds,
                                               inp.alpha_bounds, Sense.MINIMIZE)]
    if not values:
        raise BoundInfeasibleError("every lower-bound subproblem is infeasible")
    return min(values)


def upper_difference_bound(inp: BoundProblemInputs) -> float:
    """Maximum of ``max|pi - alpha| - max|tau - alpha|`` over the boxes."""
    values = [v for v, _ in _subproblem_values(inp.tau_bounds, inp.pi_bounds,
                                               inp.alpha_bounds, Sense.MAXIMIZE)]
    if not values:
        raise BoundInfeasibleError("every upper-bound subproblem is infeasible")
    return max(values)


def difference_bounds(inp: BoundProblemInputs) -> Interval:
    lo = lower_difference_bound(inp)
    hi = upper_difference_bound(inp)
    return Interval(lo, max(lo, hi))


def binary_difference_bounds(pi: Interval, tau: Interval, alpha: Interval) -> Interval:
    """Closed-form bounds for two classes (one free cumulative coordinate each).

    For fixed ``a`` the inner problems are explicit: the lower bound needs
    ``dist(a, pi) - max(tauU - a, a - tauL)`` and the upper bound
    ``max(|a - piL|, |a - piU|) - dist(a, tau)``. Both are piecewise linear
    in ``a``, so the extremes sit at the ends of the alpha box or at the
    clipped kinks where a local extremum can occur: pi's endpoints for the
    minimum, tau's endpoints for the maximum. Evaluated there they give the
    familiar four-case expressions such as ``2 alphaL - piU - tauU`` or
    ``tauU - piL``.
    """
    for name, b in (("pi", pi), ("tau", tau), ("alpha", alpha)):
        if b.lo < -CASE_TOL or b.hi > 1 + CASE_TOL:
            raise ValueError(f"{name} interval {b} leaves [0, 1]")

    def clip(a: float) -> float:
        return min(max(a, alpha.lo), alpha.hi)

    def lower_at(a: float) -> float:
        return max(0.0, pi.lo - a, a - pi.hi) - max(tau.hi - a, a - tau.lo)

    def upper_at(a: float) -> float:
        return max(a - pi.lo, pi.hi - a) - max(0.0, tau.lo - a, a - tau.hi)

    lo = min(lower_at(a) for a in (alpha.lo, alpha.hi, clip(pi.lo), clip(pi.hi)))
    hi = max(upper_at(a) for a in (alpha.lo, alpha.hi, clip(tau.lo), clip(tau.hi)))
    return Interval(lo, max(lo, hi))


def total_gain_bounds(pi_bounds: Sequence[Interval], alpha_bounds: Sequence[Interval]) -> Interval:
    """Range of ``max_i |pi_i - alpha_i|`` over two cumulative boxes."""
    pi_bounds, alpha_bounds = tuple(pi_bounds), tuple(alpha_bounds)
    if len(pi_bounds) != len(alpha_bounds) or not pi_bounds:
        raise ValueError("pi and alpha bounds need one common length >= 1")
    n = len(pi_bounds)
    obj = np.zeros(1 + 2 * n)
    obj[0] = 1.0
    sol = solve(_distance_lp(Sense.MINIMIZE, pi_bounds, alpha_bounds, obj))
    if not sol.optimal:
        raise BoundInfeasibleError("total-gain lower bound LP is infeasible")
    d_lo = max(sol.objective_value, 0.0)
    d_hi = max(max(p.hi - a.lo, a.hi - p.lo) for p, a in zip(pi_bounds, alpha_bounds))
    d_hi = min(max(d_hi, 0.0), 1.0)
    return Interval(d_lo, max(d_lo, d_hi))


def total_gain_bounds_from_boxes(box_empty: CredalBox, box_full: CredalBox) -> Interval:
    return total_gain_bounds(box_empty.cumulative_bounds[:-1], box_full.cumulative_bounds[:-1])
