import numpy as np
import pytest

from conftest import grid_difference_range, grid_distance_min, random_boxes
from impshap import (BoundProblemInputs, Interval, binary_difference_bounds, build_credal_box,
                     difference_bounds, extreme_points, ks_distance, lower_difference_bound, make_distribution,
                     total_gain_bounds, upper_difference_bound)
from impshap.ks_bounds import BoundInfeasibleError, total_gain_bounds_from_boxes

I = Interval


def _inputs(boxes):
    return BoundProblemInputs.from_boxes(*boxes)


def test_zero_epsilon_gives_exact_difference():
    p, r, q = (make_distribution(v) for v in ([0.2, 0.3, 0.5], [0.6, 0.1, 0.3], [0.1, 0.8, 0.1]))
    inp = _inputs([build_credal_box(x, 0.0) for x in (p, r, q)])
    exact = ks_distance(p, q) - ks_distance(r, q)
    assert lower_difference_bound(inp) == pytest.approx(exact, abs=1e-12)
    assert upper_difference_bound(inp) == pytest.approx(exact, abs=1e-12)


def test_same_box_for_both_predictions_straddles_zero(rng):
    for _ in range(20):
        bp, _, bq = random_boxes(rng, 4)
        bound = difference_bounds(_inputs((bp, bp, bq)))
        assert bound.lo <= 1e-12 <= bound.hi + 2e-12


def test_fixed_three_class_example_against_grid():
    pi = (I(0.1, 0.3), I(0.5, 0.7))
    tau = (I(0.2, 0.4), I(0.6, 0.8))
    alpha = (I(0.15, 0.25), I(0.55, 0.65))
    bound = difference_bounds(BoundProblemInputs(pi, tau, alpha))
    g_lo, g_hi = grid_difference_range(pi, tau, alpha)
    assert bound.lo <= g_lo + 1e-12 and abs(bound.lo - g_lo) <= 0.01
    assert bound.hi >= g_hi - 1e-12 and abs(bound.hi - g_hi) <= 0.01


def test_upper_not_below_lower(rng):
    for c in (2, 3, 5):
        for _ in range(10):
            bound = difference_bounds(_inputs(random_boxes(rng, c)))
            assert bound.hi >= bound.lo


def test_bounds_contain_sampled_points(rng):
    """Every concrete (P, R, Q) drawn from the boxes lands inside [L, U]."""
    for _ in range(20):
        boxes = random_boxes(rng, 4)
        bound = difference_bounds(_inputs(boxes))
        for _ in range(50):
            p, r, q = (make_distribution(rng.dirichlet(np.ones(4)) @ np.array(
                [v.probs for v in extreme_points(b)])) for b in boxes)
            diff = ks_distance(p, q) - ks_distance(r, q)
            assert bound.contains(diff, tol=1e-9)


def test_inconsistent_boxes_raise():
    # alpha must be nondecreasing, but its box forces alpha_0 > alpha_1
    inp = BoundProblemInputs((I(0, 1), I(0, 1)), (I(0, 1), I(0, 1)), (I(0.8, 0.9), I(0.1, 0.2)))
    with pytest.raises(BoundInfeasibleError):
        lower_difference_bound(inp)


def test_input_validation():
    with pytest.raises(ValueError):
        BoundProblemInputs((I(0, 1),), (I(0, 1), I(0, 1)), (I(0, 1),))
    with pytest.raises(ValueError):
        BoundProblemInputs((I(0, 1.5),), (I(0, 1),), (I(0, 1),))


def _binary_grid(pi, tau, alpha, step=1e-4):
    axis = lambda b: np.linspace(b.lo, b.hi, max(int(np.ceil(b.width / step)), 0) + 1)
    P, T, A = axis(pi), axis(tau), axis(alpha)
    dp = np.abs(P[None] - A[:, None])
    dt = np.abs(T[None] - A[:, None])
    return (dp.min(1) - dt.max(1)).min(), (dp.max(1) - dt.min(1)).max()


def test_binary_examples():
    assert binary_difference_bounds(I(0.4, 0.4), I(0.4, 0.4), I(0.4, 0.4)) == I(0.0, 0.0)
    pi, tau, alpha = I(0.1, 0.2), I(0.1, 0.2), I(0.5, 0.6)
    bound = binary_difference_bounds(pi, tau, alpha)
    g_lo, g_hi = _binary_grid(pi, tau, alpha)
    assert bound.lo == pytest.approx(-0.1, abs=1e-12) and bound.lo == pytest.approx(g_lo, abs=1e-4)
    assert bound.hi == pytest.approx(0.1, abs=1e-12) and bound.hi == pytest.approx(g_hi, abs=1e-4)


def test_binary_closed_form_against_grid(rng):
    for _ in range(200):
        starts = rng.uniform(0, 0.75, 3)
        pi, tau, alpha = (I(a, a + rng.uniform(0, 0.25)) for a in starts)
        bound = binary_difference_bounds(pi, tau, alpha)
        g_lo, g_hi = _binary_grid(pi, tau, alpha, step=5e-4)
        assert g_lo - 1e-3 <= bound.lo <= g_lo + 1e-12
        assert g_hi - 1e-12 <= bound.hi <= g_hi + 1e-3


def test_binary_rejects_out_of_range():
    with pytest.raises(ValueError):
        binary_difference_bounds(I(-0.1, 0.2), I(0.1, 0.2), I(0.1, 0.2))


def test_total_gain_examples(rng):
    p, q = make_distribution([0.2, 0.3, 0.5]), make_distribution([0.5, 0.3, 0.2])
    g = total_gain_bounds_from_boxes(build_credal_box(p, 0.0), build_credal_box(q, 0.0))
    assert g.lo == pytest.approx(0.3, abs=1e-12) and g.hi == pytest.approx(0.3, abs=1e-12)
    overlap = total_gain_bounds_from_boxes(build_credal_box(p, 0.5), build_credal_box(q, 0.5))
    assert overlap.lo == pytest.approx(0.0, abs=1e-12)
    for _ in range(20):
        b_empty, b_full, _ = random_boxes(rng, 3)
        pi, alpha = b_empty.cumulative_bounds[:-1], b_full.cumulative_bounds[:-1]
        g = total_gain_bounds(pi, alpha)
        grid_lo = grid_distance_min(pi, alpha)
        assert g.lo <= grid_lo + 1e-12 and grid_lo - g.lo <= 0.01
        closed_hi = max(max(p.hi - a.lo, a.hi - p.lo) for p, a in zip(pi, alpha))
        assert g.hi == pytest.approx(min(closed_hi, 1.0), abs=1e-15)


def test_total_gain_validation():
    with pytest.raises(ValueError):
        total_gain_bounds([I(0, 1)], [])
