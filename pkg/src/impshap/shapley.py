"""Distance-based Shapley values over exactly enumerated coalitions.

A feature's marginal contribution for coalition ``S`` is
``D(P_S, ref) - D(P_{S+i}, ref)``: how much adding the feature moves the
prediction towards the reference distribution. With credal sets around every
prediction each term becomes an interval, the weighted sums give raw
per-feature intervals, and the efficiency budget ``[D^L, D^U]`` tightens
them to reachable ones.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .contamination import CredalBox, build_credal_box
from .core import Interval, ProbabilityDistribution, ShapleyIntervalSet, make_distribution
from .divergences import DivergenceKind, distance
from .ks_bounds import (BoundProblemInputs, binary_difference_bounds, difference_bounds,
                        total_gain_bounds_from_boxes)
from .lp import LinearProgram, Sense, solve
from .montecarlo import MIN_SAMPLES, mc_difference_bounds, mc_distance_bounds

log = logging.getLogger(__name__)

MAX_FEATURES = 15
THREADS_ENV = "IMPSHAP_THREADS"
PARALLEL_MIN_TERMS = 256
SNAP_TOL = 1e-12


class Mode(str, Enum):
    DISTRIBUTION = "distribution"
    CLASS = "class"
    CERTAINTY = "certainty"


class BoundMethod(str, Enum):
    LP_KS = "lp_ks"
    MONTE_CARLO = "monte_carlo"

    @classmethod
    def parse(cls, value) -> "BoundMethod":
        if isinstance(value, cls):
            return value
        return {"lp": cls.LP_KS, "mc": cls.MONTE_CARLO}.get(str(value), None) or cls(value)


@dataclass(frozen=True)
class ExplanationConfig:
    mode: Mode = Mode.DISTRIBUTION
    distance: DivergenceKind = DivergenceKind.KOLMOGOROV_SMIRNOV
    epsilon: float = 0.0
    bound_method: BoundMethod = BoundMethod.LP_KS
    mc_samples: int = 1000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "distance", DivergenceKind.parse(self.distance))
        object.__setattr__(self, "bound_method", BoundMethod.parse(self.bound_method))
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if (self.bound_method is BoundMethod.LP_KS
                and self.distance is not DivergenceKind.KOLMOGOROV_SMIRNOV):
            raise ValueError("the LP bound method only supports the Kolmogorov-Smirnov distance")
        if self.bound_method is BoundMethod.MONTE_CARLO and self.mc_samples < MIN_SAMPLES:
            raise ValueError(f"mc_samples must be >= {MIN_SAMPLES}")


class CoalitionError(RuntimeError):
    def __init__(self, mask: int, cause: Exception):
        super().__init__(f"model failed on coalition {mask:#b}: {cause}")
        self.mask = mask


def _as_predictor(model) -> Callable[[np.ndarray], Sequence[float]]:
    if hasattr(model, "predict_proba"):
        return model.predict_proba
    if callable(model):
        return model
    raise TypeError("model must be callable or expose predict_proba")


class CoalitionContext:
    """Instance, removal baseline and a memo of coalition predictions.

    Coalitions are bitmasks: bit ``j`` set means feature ``j`` keeps its
    instance value, otherwise it takes the baseline value.
    """

    def __init__(self, model, instance: Sequence[float], baseline: Sequence[float]):
        self.instance = np.asarray(instance, dtype=float)
        self.baseline = np.asarray(baseline, dtype=float)
        if self.instance.ndim != 1 or self.instance.shape != self.baseline.shape:
            raise ValueError("instance and baseline must be 1-D vectors of equal length")
        self.m = int(self.instance.size)
        if not 1 <= self.m <= MAX_FEATURES:
            raise ValueError(f"exact enumeration supports 1..{MAX_FEATURES} features, got {self.m}")
        self._predict = _as_predictor(model)
        self._cache: dict[int, ProbabilityDistribution] = {}

    @property
    def full_mask(self) -> int:
        return (1 << self.m) - 1

    def masked_input(self, mask: int) -> np.ndarray:
        keep = np.array([(mask >> j) & 1 for j in range(self.m)], dtype=bool)
        return np.where(keep, self.instance, self.baseline)

    def predict(self, mask: int) -> ProbabilityDistribution:
        if not 0 <= mask <= self.full_mask:
            raise ValueError(f"coalition mask {mask} out of range for {self.m} features")
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        try:
            p = make_distribution(self._predict(self.masked_input(mask)))
        except Exception as exc:
            raise CoalitionError(mask, exc) from exc
        self._cache[mask] = p
        return p

    def populate(self) -> None:
        for mask in range(self.full_mask + 1):
            self.predict(mask)

    def reference(self, mode: Mode) -> ProbabilityDistribution:
        full = self.predict(self.full_mask)
        mode = Mode(mode)
        if mode is Mode.DISTRIBUTION:
            return full
        if mode is Mode.CLASS:
            return ProbabilityDistribution.one_hot(full.argmax(), full.n_classes)
        return ProbabilityDistribution.uniform(full.n_classes)


def predict_coalition(ctx: CoalitionContext, coalition: int) -> ProbabilityDistribution:
    return ctx.predict(coalition)


def coalition_weight(s_size: int, m: int) -> float:
    """Shapley weight ``|S|! (m - |S| - 1)! / m!``."""
    if m < 1 or not 0 <= s_size <= m - 1:
        raise ValueError(f"coalition size {s_size} out of range for m={m}")
    return math.factorial(s_size) * math.factorial(m - s_size - 1) / math.factorial(m)


def _terms(m: int):
    """Yield ``(feature, mask_without, mask_with, weight)`` for every coalition term."""
    weights = [coalition_weight(s, m) for s in range(m)]
    for i in range(m):
        bit = 1 << i
        for mask in range(1 << m):
            if mask & bit:
                continue
            yield i, mask, mask | bit, weights[bin(mask).count("1")]


def _sign(mode: Mode) -> float:
    # certainty: moving away from uniform is a positive contribution
    return -1.0 if Mode(mode) is Mode.CERTAINTY else 1.0


def precise_shapley(ctx: CoalitionContext, config: ExplanationConfig | None = None) -> np.ndarray:
    config = config or ExplanationConfig()
    ref = ctx.reference(config.mode)
    dist = {mask: distance(ctx.predict(mask), ref, config.distance)
            for mask in range(ctx.full_mask + 1)}
    phi = np.zeros(ctx.m)
    for i, without, with_i, w in _terms(ctx.m):
        phi[i] += w * (dist[without] - dist[with_i])
    return _sign(config.mode) * phi


def total_gain(ctx: CoalitionContext, config: ExplanationConfig | None = None) -> float:
    """What the precise values sum to: ``D(P_empty, ref) - D(P_N, ref)``, sign-adjusted."""
    config = config or ExplanationConfig()
    ref = ctx.reference(config.mode)
    d = (distance(ctx.predict(0), ref, config.distance)
         - distance(ctx.predict(ctx.full_mask), ref, config.distance))
    return _sign(config.mode) * d


def _term_bounds(box_p: CredalBox, box_r: CredalBox, box_q: CredalBox,
                 config: ExplanationConfig, seed) -> Interval:
    if config.bound_method is BoundMethod.MONTE_CARLO:
        return mc_difference_bounds(box_p, box_r, box_q, config.distance,
                                    config.mc_samples, seed).interval
    if box_p.n_classes == 2:
        return binary_difference_bounds(box_p.cumulative_bounds[0], box_r.cumulative_bounds[0],
                                        box_q.cumulative_bounds[0])
    return difference_bounds(BoundProblemInputs.from_boxes(box_p, box_r, box_q))


def _term_batch(args):
    jobs, config = args
    return [_term_bounds(p, r, q, config, seed) for p, r, q, seed in jobs]


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
    return os.cpu_count() or 1


def _signed(iv: Interval, sign: float) -> Interval:
    return iv if sign > 0 else Interval(-iv.hi, -iv.lo)


def imprecise_shapley(ctx: CoalitionContext, config: ExplanationConfig) -> ShapleyIntervalSet:
    ctx.populate()
    eps = config.epsilon
    mode = config.mode
    sign = _sign(mode)
    boxes = {mask: build_credal_box(ctx.predict(mask), eps) for mask in range(ctx.full_mask + 1)}
    ref = ctx.reference(mode)
    # class/certainty references are decisions, not predictions: kept precise
    ref_box = boxes[ctx.full_mask] if mode is Mode.DISTRIBUTION else build_credal_box(ref, 0.0)

    terms = list(_terms(ctx.m))
    seeds = np.random.SeedSequence(config.seed).spawn(len(terms) + 1)
    jobs = [(boxes[without], boxes[with_i], ref_box, seeds[t])
            for t, (_, without, with_i, _) in enumerate(terms)]
    workers = min(_worker_count(), max(1, len(jobs) // 64))
    if workers > 1 and len(jobs) >= PARALLEL_MIN_TERMS:
        chunks = np.array_split(np.arange(len(jobs)), workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_term_batch, [([jobs[j] for j in c], config) for c in chunks])
            bounds = [b for part in parts for b in part]
    else:
        bounds = _term_batch((jobs, config))

    lo = np.zeros(ctx.m)
    hi = np.zeros(ctx.m)
    for (i, _, _, w), b in zip(terms, bounds):
        b = _signed(b, sign)
        lo[i] += w * b.lo
        hi[i] += w * b.hi
    precise = precise_shapley(ctx, config)
    # keep rounding from pushing the precise point outside its own interval
    lo = np.minimum(lo, precise)
    hi = np.maximum(hi, precise)
    raw = tuple(Interval(a, b) for a, b in zip(lo, hi))

    empty, full = boxes[0], boxes[ctx.full_mask]
    if config.bound_method is BoundMethod.MONTE_CARLO:
        if mode is Mode.DISTRIBUTION:
            gain = mc_distance_bounds(empty, full, config.distance, config.mc_samples,
                                      seeds[-1]).interval
        else:
            gain = mc_difference_bounds(empty, full, ref_box, config.distance,
                                        config.mc_samples, seeds[-1]).interval
    elif mode is Mode.DISTRIBUTION:
        gain = total_gain_bounds_from_boxes(empty, full)
    else:
        gain = _term_bounds(empty, full, ref_box, config, None)
    gain = _signed(gain, sign)
    g = total_gain(ctx, config)
    gain = Interval(min(gain.lo, g), max(gain.hi, g))

    reduced, warning = reachable_reduction(raw, gain)
    return ShapleyIntervalSet(raw=raw, reduced=tuple(reduced), precise=tuple(float(v) for v in precise),
                              gain=gain, warning=warning,
                              meta={"mode": mode.value, "distance": config.distance.value,
                                    "epsilon": eps, "bound_method": config.bound_method.value,
                                    "terms": len(terms)})


def reachable_reduction(raw: Sequence[Interval], gain: Interval,
                        tol: float = 1e-9) -> tuple[list[Interval], str | None]:
    """Tighten per-feature intervals using ``D^L <= sum(phi) <= D^U``.

    Returns the reduced intervals and a warning (``None`` when the reduction
    was applied). The gain interval is first clipped to the attainable sums;
    if nothing remains the raw intervals come back unchanged.
    """
    raw = list(raw)
    lo = np.array([r.lo for r in raw])
    hi = np.array([r.hi for r in raw])
    m = len(raw)
    d_lo = max(gain.lo, lo.sum())
    d_hi = min(gain.hi, hi.sum())
    if d_lo > d_hi + tol:
        msg = (f"efficiency bounds [{gain.lo:.6g}, {gain.hi:.6g}] miss the attainable sums "
               f"[{lo.sum():.6g}, {hi.sum():.6g}]; reduction skipped")
        log.warning(msg)
        return raw, msg
    d_hi = max(d_hi, d_lo)

    shift = lo.min()
    lo_s, hi_s = lo - shift, hi - shift
    d_lo_s, d_hi_s = d_lo - m * shift, d_hi - m * shift
    sum_lo, sum_hi = lo_s.sum(), hi_s.sum()
    red_hi = np.minimum(hi_s, d_hi_s - (sum_lo - lo_s))
    red_lo = np.maximum(lo_s, d_lo_s - (sum_hi - hi_s))
    out = []
    for k in range(m):
        a = float(min(max(red_lo[k] + shift, lo[k]), hi[k]))
        b = float(min(max(red_hi[k] + shift, lo[k]), hi[k]))
        # undo the shift's rounding where a constraint is inactive
        a = float(lo[k]) if a - lo[k] <= SNAP_TOL else a
        b = float(hi[k]) if hi[k] - b <= SNAP_TOL else b
        out.append(Interval(min(a, b), max(a, b)))
    return out, None


def _functional_lp(a, raw, gain, sense: Sense) -> LinearProgram:
    m = len(raw)
    lp = LinearProgram(sense, a, bounds=[(r.lo, r.hi) for r in raw])
    lp.add(np.ones(m), ">=", gain.lo)
    lp.add(np.ones(m), "<=", gain.hi)
    return lp


def linear_functional_bounds(a: Sequence[float], raw: Sequence[Interval], gain: Interval) -> Interval:
    """Range of ``<a, phi>`` over the box intervals and the efficiency constraint."""
    a = np.asarray(a, dtype=float)
    raw = list(raw)
    if a.size != len(raw):
        raise ValueError(f"{a.size} coefficients for {len(raw)} features")
    low = solve(_functional_lp(a, raw, gain, Sense.MINIMIZE))
    high = solve(_functional_lp(a, raw, gain, Sense.MAXIMIZE))
    if not (low.optimal and high.optimal):
        raise ValueError("efficiency bounds are incompatible with the intervals")
    return Interval(low.objective_value, max(low.objective_value, high.objective_value))


def dual_functional_bounds(a: Sequence[float], raw: Sequence[Interval], gain: Interval) -> Interval:
    """Same range computed through the dual LPs (in coordinates shifted to be
    nonnegative, where the primal's sign constraints are redundant).

    Variables are ``(v_0, w_0, v_1..v_m, w_1..w_m)``, all nonnegative; row ``k``
    couples ``v_0 - w_0 + v_k - w_k`` with ``a_k``.
    """
    a = np.asarray(a, dtype=float)
    raw = list(raw)
    m = len(raw)
    if a.size != m:
        raise ValueError(f"{a.size} coefficients for {m} features")
    shift = min(0.0, min(r.lo for r in raw))
    lo = np.array([r.lo for r in raw]) - shift
    hi = np.array([r.hi for r in raw]) - shift
    d_lo, d_hi = gain.lo - m * shift, gain.hi - m * shift

    def rows(lp: LinearProgram, relation: str):
        for k in range(m):
            row = np.zeros(2 + 2 * m)
            row[0], row[1] = 1.0, -1.0
            row[2 + k], row[2 + m + k] = 1.0, -1.0
            lp.add(row, relation, a[k])

    g_lo = LinearProgram(Sense.MAXIMIZE, np.concatenate([[d_lo, -d_hi], lo, -hi]))
    rows(g_lo, "<=")
    g_hi = LinearProgram(Sense.MINIMIZE, np.concatenate([[d_hi, -d_lo], hi, -lo]))
    rows(g_hi, ">=")
    low, high = solve(g_lo), solve(g_hi)
    if not (low.optimal and high.optimal):
        raise ValueError("dual problem has no finite optimum; primal is infeasible")
    offset = shift * a.sum()
    return Interval(low.objective_value + offset, max(low.objective_value, high.objective_value) + offset)


def decision_strategy(intervals: Sequence[Interval], eta: float) -> int:
    """Index (0-based) maximizing ``eta * lo + (1 - eta) * hi``.

    ``eta = 1`` ranks by lower bounds (robust), ``eta = 0`` by upper bounds
    (optimistic). Ties go to the lowest index.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    intervals = list(intervals)
    if not intervals:
        raise ValueError("need at least one interval")
    scores = [eta * iv.lo + (1.0 - eta) * iv.hi for iv in intervals]
    return int(np.argmax(scores))
