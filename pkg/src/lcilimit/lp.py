"""Small dense two-phase simplex solver with Bland's pivoting rule.

Intended for the handful-of-variables programs that appear in the analysis
(active-set membership, the perturbation functional). Pivoting is fully
deterministic, so identical problems give bit-identical witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import TOL
from .errors import LpFailure

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

MAX_PIVOTS = 100_000


@dataclass
class LpProblem:
    """maximize c.x  s.t.  A_ub x <= b_ub,  A_eq x == b_eq,  lo_j <= x_j <= hi_j.

    ``bounds`` holds one ``(lo, hi)`` pair per variable, ``None`` meaning
    unbounded on that side; the default is ``(0, None)`` for every variable.
    """

    c: Sequence[float]
    A_ub: Optional[Sequence[Sequence[float]]] = None
    b_ub: Optional[Sequence[float]] = None
    A_eq: Optional[Sequence[Sequence[float]]] = None
    b_eq: Optional[Sequence[float]] = None
    bounds: Optional[Sequence[tuple]] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise ValueError(f"{len(self.bounds)} bounds for {n} variables")
        self.bounds = [(None if lo is None else float(lo), None if hi is None else float(hi))
                       for lo, hi in self.bounds]
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty bound interval [{lo}, {hi}]")
        data = [self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq]
        if not all(np.all(np.isfinite(a)) for a in data):
            raise ValueError("problem data must be finite")

    @property
    def n(self) -> int:
        return self.c.size


def _rows(A, b, n, name):
    if A is None or len(A) == 0:
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[1] != n or A.shape[0] != b.size:
        raise ValueError(f"inconsistent {name} constraint shapes {A.shape} / {b.shape}")
    return A, b


@dataclass
class LpResult:
    status: str
    optimum: Optional[float]
    witness: Optional[np.ndarray]
    residual: float = field(default=0.0)
    pivots: int = field(default=0)

    def __iter__(self):
        # unpacks as (status, optimum, witness)
        return iter((self.status, self.optimum, self.witness))


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, c] = 0.0
    T[r, c] = 1.0


def _simplex(T: np.ndarray, basis: list, allowed: int, tol: float) -> tuple:
    """Minimize the reduced-cost row (last row) in place. Returns (status, pivots)."""
    pivots = 0
    while True:
        costs = T[-1, :allowed]
        entering = np.flatnonzero(costs < -tol)
        if entering.size == 0:
            return OPTIMAL, pivots
        j = int(entering[0])
        col = T[:-1, j]
        pos = np.flatnonzero(col > tol)
        if pos.size == 0:
            return UNBOUNDED, pivots
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, j)
        basis[r] = j
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise LpFailure("simplex exceeded the pivot limit")


def _standard_form(p: LpProblem):
    """Rewrite with nonnegative variables; returns (A, b, kinds, cost, const, map)."""
    cols = []          # per original var: list of (std index, sign)
    offsets = np.zeros(p.n)
    extra_ub = []      # (std index, upper) rows x' <= u
    k = 0
    for j, (lo, hi) in enumerate(p.bounds):
        if lo is not None:
            offsets[j] = lo
            cols.append([(k, 1.0)])
            if hi is not None:
                extra_ub.append((k, hi - lo))
            k += 1
        elif hi is not None:
            offsets[j] = hi
            cols.append([(k, -1.0)])
            k += 1
        else:
            cols.append([(k, 1.0), (k + 1, -1.0)])
            k += 2
    nstd = k

    def expand(A):
        out = np.zeros((A.shape[0], nstd))
        for j, entries in enumerate(cols):
            for idx, sign in entries:
                out[:, idx] += sign * A[:, j]
        return out

    A_ub = expand(p.A_ub)
    b_ub = p.b_ub - p.A_ub @ offsets
    if extra_ub:
        rows = np.zeros((len(extra_ub), nstd))
        for r, (idx, u) in enumerate(extra_ub):
            rows[r, idx] = 1.0
        A_ub = np.vstack([A_ub, rows])
        b_ub = np.concatenate([b_ub, [u for _, u in extra_ub]])
    A_eq = expand(p.A_eq)
    b_eq = p.b_eq - p.A_eq @ offsets
    cost = expand(p.c.reshape(1, -1))[0]
    return A_ub, b_ub, A_eq, b_eq, cost, cols, offsets, nstd


def lp_solve(p: LpProblem, tol: float | None = None) -> LpResult:
    """Solve a maximization problem. Infeasible and unbounded are statuses, not exceptions."""
    tol = TOL.lp_pivot if tol is None else tol
    A_ub, b_ub, A_eq, b_eq, cost, cols, offsets, nstd = _standard_form(p)
    n_ub, n_eq = A_ub.shape[0], A_eq.shape[0]
    nrows = n_ub + n_eq
    nslack = n_ub
    width = nstd + nslack + nrows  # structural, slack, artificial

    T = np.zeros((nrows + 1, width + 1))
    T[:n_ub, :nstd] = A_ub
    T[:n_ub, nstd:nstd + nslack] = np.eye(n_ub)
    T[:n_ub, -1] = b_ub
    T[n_ub:nrows, :nstd] = A_eq
    T[n_ub:nrows, -1] = b_eq
    neg = T[:nrows, -1] < 0
    T[:nrows][neg] *= -1.0
    T[:nrows, nstd + nslack:width] = np.eye(nrows)
    basis = list(range(nstd + nslack, width))

    # phase 1: minimize the sum of artificials
    T[-1, :] = -T[:nrows, :].sum(axis=0)
    T[-1, nstd + nslack:width] = 0.0
    status, piv1 = _simplex(T, basis, width, tol)
    if status != OPTIMAL:
        raise LpFailure("phase 1 reported an unbounded objective")
    scale = 1.0 + float(np.abs(T[:nrows, -1]).max(initial=0.0))
    if -T[-1, -1] > TOL.lp_feasibility * scale:
        return LpResult(INFEASIBLE, None, None, pivots=piv1)

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    real = nstd + nslack
    for r in range(nrows):
        if basis[r] >= real:
            nz = np.flatnonzero(np.abs(T[r, :real]) > tol)
            if nz.size:
                _pivot(T, r, int(nz[0]))
                basis[r] = int(nz[0])
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep][:, list(range(real)) + [width]], np.zeros((1, real + 1))])
    basis = [basis[r] for r in keep]

    # phase 2: minimize -cost
    full_cost = np.concatenate([-cost, np.zeros(nslack)])
    T[-1, :real] = full_cost
    for r, b in enumerate(basis):
        T[-1, :] -= full_cost[b] * T[r, :]
    status, piv2 = _simplex(T, basis, real, tol)
    pivots = piv1 + piv2
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None, pivots=pivots)

    std = np.zeros(real)
    for r, b in enumerate(basis):
        std[b] = T[r, -1]
    x = offsets.copy()
    for j, entries in enumerate(cols):
        for idx, sign in entries:
            x[j] += sign * std[idx]
    residual = constraint_residual(p, x)
    return LpResult(OPTIMAL, float(p.c @ x), x, residual, pivots)


def constraint_residual(p: LpProblem, x: np.ndarray) -> float:
    """Largest violation of any constraint or bound at ``x``."""
    worst = 0.0
    if p.A_ub.size:
        worst = max(worst, float(np.max(p.A_ub @ x - p.b_ub, initial=0.0)))
    if p.A_eq.size:
        worst = max(worst, float(np.max(np.abs(p.A_eq @ x - p.b_eq), initial=0.0)))
    for xj, (lo, hi) in zip(x, p.bounds):
        if lo is not None:
            worst = max(worst, lo - xj)
        if hi is not None:
            worst = max(worst, xj - hi)
    return worst
