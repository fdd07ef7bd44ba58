"""Dense two-phase simplex for the small LPs used by the bound engines.

Every LP here has a handful of variables and constraints with data in
[0, 1], so a plain tableau with Bland's rule is enough and keeps results
bit-reproducible. Variables are shifted to be nonnegative, rows are
sign-normalized to a nonnegative right-hand side, and phase 1 minimizes the
sum of artificials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-10
OPT_TOL = 1e-10


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Relation(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[float, ...]
    relation: Relation
    rhs: float


@dataclass
class LinearProgram:
    """``sense`` of ``objective . x`` subject to linear rows and box bounds.

    ``bounds`` defaults to ``[0, inf)`` for every variable.
    """

    sense: Sense
    objective: Sequence[float]
    constraints: list[Constraint] = field(default_factory=list)
    bounds: list[tuple[float, float]] | None = None

    def __post_init__(self):
        self.sense = Sense(self.sense)
        self.objective = tuple(float(c) for c in self.objective)
        n = len(self.objective)
        if n == 0:
            raise ValueError("LP needs at least one variable")
        if self.bounds is None:
            self.bounds = [(0.0, math.inf)] * n
        if len(self.bounds) != n:
            raise ValueError(f"{len(self.bounds)} bounds for {n} variables")
        for lo, hi in self.bounds:
            if math.isnan(lo) or math.isnan(hi) or lo == math.inf or hi == -math.inf:
                raise ValueError(f"bad variable bounds ({lo}, {hi})")
        for con in self.constraints:
            if len(con.coeffs) != n:
                raise ValueError(
                    f"constraint has {len(con.coeffs)} coefficients, expected {n}")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def add(self, coeffs: Sequence[float], relation: "Relation | str", rhs: float) -> None:
        coeffs = tuple(float(c) for c in coeffs)
        if len(coeffs) != self.n_vars:
            raise ValueError(f"constraint has {len(coeffs)} coefficients, expected {self.n_vars}")
        self.constraints.append(Constraint(coeffs, Relation(relation), float(rhs)))

    def is_feasible(self, x: Sequence[float], tol: float = FEAS_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        for (lo, hi), xi in zip(self.bounds, x):
            if xi < lo - tol or xi > hi + tol:
                return False
        for con in self.constraints:
            lhs = float(np.dot(con.coeffs, x))
            if con.relation is Relation.LE and lhs > con.rhs + tol:
                return False
            if con.relation is Relation.GE and lhs < con.rhs - tol:
                return False
            if con.relation is Relation.EQ and abs(lhs - con.rhs) > tol:
                return False
        return True


@dataclass(frozen=True)
class LpSolution:
    status: Status
    objective_value: float | None = None
    point: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Unbounded(Exception):
    pass


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    nz = np.nonzero(factors)[0]
    if nz.size:
        tab[nz] -= np.outer(factors[nz], tab[row])


def _run_simplex(tab: np.ndarray, basis: list[int], allowed: int) -> None:
    """Minimize the objective row of ``tab`` in place; columns ``>= allowed``
    never enter the basis."""
    n_rows = tab.shape[0] - 1
    max_iter = 50 * (n_rows + tab.shape[1]) + 1000
    for _ in range(max_iter):
        costs = tab[-1, :allowed]
        candidates = np.nonzero(costs < -OPT_TOL)[0]
        if candidates.size == 0:
            return
        col = int(candidates[0])  # Bland: lowest index enters
        column = tab[:n_rows, col]
        rows = np.nonzero(column > PIVOT_TOL)[0]
        if rows.size == 0:
            raise _Unbounded()
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12]
        row = int(min(tied, key=lambda r: basis[r]))  # Bland: lowest index leaves
        _pivot(tab, row, col)
        basis[row] = col
    raise RuntimeError("simplex iteration limit reached")


def solve(lp: LinearProgram) -> LpSolution:
    n = lp.n_vars
    # x_j = shift_j + sign_j * y_j with y_j >= 0; free variables split in two.
    shift = np.zeros(n)
    sign = np.ones(n)
    free = []
    upper_rows = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo > -math.inf:
            shift[j] = lo
            if hi < math.inf:
                upper_rows.append((j, hi - lo))
        elif hi < math.inf:
            shift[j], sign[j] = hi, -1.0
        else:
            free.append(j)
    n_y = n + len(free)

    def expand(coeffs) -> np.ndarray:
        c = np.asarray(coeffs, dtype=float)
        out = np.zeros(n_y)
        out[:n] = c * sign
        for t, j in enumerate(free):
            out[n + t] = -c[j]
        return out

    rows, rels, rhs = [], [], []
    for con in lp.constraints:
        rows.append(expand(con.coeffs))
        rels.append(con.relation)
        rhs.append(con.rhs - float(np.dot(con.coeffs, shift)))
    for j, width in upper_rows:
        e = np.zeros(n_y)
        e[j] = 1.0
        rows.append(e)
        rels.append(Relation.LE)
        rhs.append(width)

    n_rows = len(rows)
    for i in range(n_rows):
        if rhs[i] < 0:
            rows[i] = -rows[i]
            rhs[i] = -rhs[i]
            if rels[i] is Relation.LE:
                rels[i] = Relation.GE
            elif rels[i] is Relation.GE:
                rels[i] = Relation.LE

    n_slack = sum(r is not Relation.EQ for r in rels)
    n_art = sum(r is not Relation.LE for r in rels)
    n_cols = n_y + n_slack + n_art
    tab = np.zeros((n_rows + 1, n_cols + 1))
    basis = [0] * n_rows
    s_col, a_col = n_y, n_y + n_slack
    art_cols = []
    for i in range(n_rows):
        tab[i, :n_y] = rows[i]
        tab[i, -1] = rhs[i]
        if rels[i] is Relation.LE:
            tab[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
        else:
            if rels[i] is Relation.GE:
                tab[i, s_col] = -1.0
                s_col += 1
            tab[i, a_col] = 1.0
            basis[i] = a_col
            art_cols.append(a_col)
            a_col += 1
    first_art = n_y + n_slack

    # phase 1
    if n_art:
        tab[-1, first_art:n_cols] = 1.0
        for i in range(n_rows):
            if basis[i] >= first_art:
                tab[-1] -= tab[i]
        _run_simplex(tab, basis, n_cols)
        if -tab[-1, -1] > FEAS_TOL:
            return LpSolution(Status.INFEASIBLE)
        # drive remaining artificials out; drop rows that turn out redundant
        keep = []
        for i in range(n_rows):
            if basis[i] >= first_art:
                nz = np.nonzero(np.abs(tab[i, :first_art]) > PIVOT_TOL)[0]
                if nz.size:
                    _pivot(tab, i, int(nz[0]))
                    basis[i] = int(nz[0])
                    keep.append(i)
            else:
                keep.append(i)
        tab = np.vstack([tab[keep], tab[-1:]])
        basis = [basis[i] for i in keep]
        tab = np.delete(tab, np.s_[first_art:n_cols], axis=1)
        n_rows = len(basis)

    # phase 2
    c = expand(lp.objective)
    if lp.sense is Sense.MAXIMIZE:
        c = -c
    tab[-1, :] = 0.0
    tab[-1, :n_y] = c
    for i in range(n_rows):
        cb = tab[-1, basis[i]]
        if cb != 0.0:
            tab[-1] -= cb * tab[i]
    try:
        _run_simplex(tab, basis, first_art)
    except _Unbounded:
        return LpSolution(Status.UNBOUNDED)

    y = np.zeros(tab.shape[1] - 1)
    for i, b in enumerate(basis):
        y[b] = tab[i, -1]
    x = shift + sign * y[:n]
    for t, j in enumerate(free):
        x[j] -= y[n + t]
    # clean last-bit overshoot of box bounds
    for j, (lo, hi) in enumerate(lp.bounds):
        x[j] = min(max(x[j], lo), hi)
    value = float(np.dot(lp.objective, x))
    x.setflags(write=False)
    return LpSolution(Status.OPTIMAL, value, x)
