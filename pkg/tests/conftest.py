from __future__ import annotations

import itertools

import numpy as np
import pytest

from impshap import Interval, build_credal_box, make_distribution

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, passed: bool, detail: str = "") -> None:
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


def random_distribution(rng: np.random.Generator, c: int, sparse: bool = False):
    p = rng.dirichlet(np.ones(c))
    if sparse and rng.random() < 0.3:
        p[rng.integers(c)] = 0.0
        p /= p.sum()
    return make_distribution(p)


def random_boxes(rng: np.random.Generator, c: int, eps=None):
    """Three credal boxes (P_S, P_S+i, reference) with independent centers."""
    out = []
    for _ in range(3):
        e = float(rng.uniform(0.0, 0.3)) if eps is None else eps
        out.append(build_credal_box(random_distribution(rng, c, sparse=True), e))
    return tuple(out)


def monotone_grid(bounds, step: float) -> np.ndarray:
    """All nondecreasing vectors on a grid (spacing <= step) inside the boxes."""
    axes = []
    for b in bounds:
        n = max(int(np.ceil((b.hi - b.lo) / step - 1e-12)), 0) + 1
        axes.append(np.linspace(b.lo, b.hi, n))
    pts = np.array(list(itertools.product(*axes)))
    keep = np.all(np.diff(pts, axis=1) >= -1e-15, axis=1) if pts.shape[1] > 1 else np.ones(len(pts), bool)
    return pts[keep]


def grid_difference_range(pi_b, tau_b, alpha_b, step: float = 0.005) -> tuple[float, float]:
    """Brute-force min and max of max|pi - a| - max|tau - a| over monotone grid points.

    pi and tau enter independently once a is fixed, so the search over the
    triple product factorizes into per-a min/max over each grid.
    """
    P, T, A = (monotone_grid(b, step) for b in (pi_b, tau_b, alpha_b))
    lo, hi = np.inf, -np.inf
    for start in range(0, len(A), 256):
        a = A[start:start + 256, None, :]
        dp = np.abs(P[None] - a).max(axis=2)
        dt = np.abs(T[None] - a).max(axis=2)
        lo = min(lo, (dp.min(axis=1) - dt.max(axis=1)).min())
        hi = max(hi, (dp.max(axis=1) - dt.min(axis=1)).max())
    return float(lo), float(hi)


def grid_distance_min(pi_b, alpha_b, step: float = 0.005) -> float:
    P, A = monotone_grid(pi_b, step), monotone_grid(alpha_b, step)
    return float(np.abs(P[None] - A[:, None]).max(axis=2).min())


def random_proper_instance(rng: np.random.Generator, m: int):
    """Raw intervals plus a gain interval that meets the attainable sums."""
    lo = rng.uniform(-0.5, 0.5, m)
    hi = lo + rng.uniform(0.0, 0.4, m) * (rng.random(m) > 0.1)
    raw = [Interval(float(a), float(b)) for a, b in zip(lo, hi)]
    s_lo, s_hi = lo.sum(), hi.sum()
    a = rng.uniform(s_lo - 0.3, s_hi)
    b = rng.uniform(max(a, s_lo), s_hi + 0.3)
    return raw, Interval(float(a), float(b))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
