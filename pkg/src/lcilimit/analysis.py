"""Deterministic limit quantities: e_max, the case split, the active set and the polytopes.

Every routine works on two positive mass vectors ``qX``, ``qY`` indexed by
slots. For plain instances the slots are the letters; for a block order the
slot k carries the masses of letter ``alpha[k]`` (the vectors then need not
sum to one). Exact ``Fraction`` inputs give exact outputs wherever the
quantity is rational; the active set itself comes from small float LPs and
is cross-checked against the structural facts that hold in each case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .config import TOL
from .core import Instance, Pmf, fmt_number, is_exact, validate_pmf
from .errors import (EmptyGrid, GridTooLarge, InadmissiblePair, InconsistentAnalysis,
                     InconsistentSpan, LpFailure, NoValidCut, WrongCase)
from .exact import BlockOrder, compositions
from .lp import OPTIMAL, LpProblem, lp_solve

CASE_A = "CaseA"
CASE_A_SYM = "CaseASymmetric"
CASE_B1 = "CaseB1"
CASE_B2 = "CaseB2"
CASES = (CASE_A, CASE_A_SYM, CASE_B1, CASE_B2)

MAX_GRID_POINTS = 10**7
ACTIVE_THRESHOLD = 1e-9


def _tol(exact: bool) -> float:
    return 0 if exact else TOL.analysis    # int 0 keeps Fraction arithmetic exact


def _lt(a, b, exact: bool) -> bool:
    return a < b - _tol(exact)


def _eq(a, b, exact: bool) -> bool:
    return abs(a - b) <= _tol(exact)


def _vectors(inst) -> tuple:
    if isinstance(inst, Instance):
        return inst.pX.probs, inst.pY.probs
    qX, qY = inst
    return tuple(qX), tuple(qY)


# ---------------------------------------------------------------- e_max

def _admissible(qX, qY, i: int, j: int) -> bool:
    return qX[i] < qX[j] and qY[i] > qY[j] and qX[i] < qY[i] and qY[j] < qX[j]


def _score(qX, qY, i: int, j: int):
    num = qX[i] * qY[i] * (qX[j] - qY[j]) + qX[j] * qY[j] * (qY[i] - qX[i])
    return num / (qY[i] * qX[j] - qX[i] * qY[j])


def pair_score(inst, i: int, j: int):
    """Value of the best split that uses only letters i < j (1-based) with
    letter i limited by X and letter j limited by Y."""
    qX, qY = _vectors(inst)
    a, b = i - 1, j - 1
    if not (0 <= a < len(qX) and 0 <= b < len(qX)) or a == b:
        raise InadmissiblePair(f"bad letter pair ({i}, {j})")
    if not _admissible(qX, qY, a, b):
        raise InadmissiblePair(f"pair ({i}, {j}) violates the admissibility conditions")
    return _score(qX, qY, a, b)


def _emax_parts(qX, qY) -> tuple:
    l = len(qX)
    e1 = max(min(x, y) for x, y in zip(qX, qY))
    scores = [_score(qX, qY, i, j) for i in range(l) for j in range(l)
              if i != j and _admissible(qX, qY, i, j)]
    e2 = max(scores) if scores else None
    e_max = e1 if e2 is None or e2 < e1 else e2
    return e1, e2, e_max


def compute_emax(inst) -> tuple:
    """Return ``(e1, e2, e_max)``; ``e2`` is None when no pair is admissible."""
    qX, qY = _vectors(inst)
    return _emax_parts(qX, qY)


def _simplex_points(parts: int, r: int) -> np.ndarray:
    return np.array(list(compositions(r, parts)), dtype=np.int64).reshape(-1, parts)


def emax_grid_oracle(inst, r: int):
    """Brute-force max of sum_i min(pX_i lX_i, pY_i lY_i) over the step-1/r grid of both simplices."""
    if r < 1:
        raise ValueError("resolution must be at least 1")
    qX, qY = _vectors(inst)
    l = len(qX)
    count = math.comb(r + l - 1, l - 1)
    if count * count > MAX_GRID_POINTS:
        raise GridTooLarge(f"{count}^2 grid points exceed {MAX_GRID_POINTS}")
    pts = _simplex_points(l, r)
    ax = pts * np.array([float(q) for q in qX])
    ay = pts * np.array([float(q) for q in qY])
    best = -np.inf
    best_pairs = []
    chunk = max(1, 2_000_000 // (count * l))
    for start in range(0, count, chunk):
        vals = np.minimum(ax[start:start + chunk, None, :], ay[None, :, :]).sum(axis=2)
        top = vals.max()
        if top > best + 1e-9:
            best = top
            best_pairs = []
        if top >= best - 1e-9:
            idx = np.argwhere(vals >= best - 1e-9)
            best_pairs.extend((start + a, b) for a, b in idx[:16])
    if not is_exact(qX + qY):
        return float(best) / r
    return max(sum((min(qX[i] * int(pts[a, i]), qY[i] * int(pts[b, i])) for i in range(l)),
                   Fraction(0)) / r for a, b in best_pairs)


# ---------------------------------------------------------------- LPs on the letter-mass polytope

def _u_problem(qX, qY, e, objective) -> LpProblem:
    l = len(qX)
    return LpProblem(
        c=objective,
        A_ub=[[1.0 / float(q) for q in qX], [1.0 / float(q) for q in qY]],
        b_ub=[1.0, 1.0],
        A_eq=[[1.0] * l],
        b_eq=[float(e)],
    )


def _solve_exact(rows, rhs) -> Optional[list]:
    """Gauss-Jordan over Fractions; None unless the system has exactly one solution."""
    n = len(rows[0]) if rows else 0
    M = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, len(M)) if M[k][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [v / piv for v in M[r]]
        for k in range(len(M)):
            if k != r and M[k][c] != 0:
                f = M[k][c]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
    if len(pivots) < n:
        return None
    if any(row[-1] != 0 for row in M[r:]):
        return None
    sol = [Fraction(0)] * n
    for k, c in enumerate(pivots):
        sol[c] = M[k][-1]
    return sol


def _exact_vertex(u: np.ndarray, qX, qY, e) -> Optional[tuple]:
    """Recover the exact point behind a float LP vertex from its support and tight rows."""
    support = [i for i in range(len(u)) if u[i] > ACTIVE_THRESHOLD]
    if not support:
        return None
    rows = [[Fraction(1)] * len(support)]
    rhs = [e]
    for q in (qX, qY):
        if abs(sum(u[i] / float(q[i]) for i in support) - 1.0) <= 1e-9:
            rows.append([1 / q[i] for i in support])
            rhs.append(Fraction(1))
    sol = _solve_exact(rows, rhs)
    if sol is None or any(v <= 0 for v in sol):
        return None
    out = [Fraction(0)] * len(u)
    for i, v in zip(support, sol):
        out[i] = v
    if sum(o / q for o, q in zip(out, qX)) > 1 or sum(o / q for o, q in zip(out, qY)) > 1:
        return None
    return tuple(out)


def _active_set(qX, qY, e) -> tuple:
    """For each slot k, maximize u_k over the optimal face; k is active when that max is positive.

    Returns ``(I, witnesses)`` with 0-based indices and the maximizer for each active slot.
    """
    l = len(qX)
    active, witnesses = [], {}
    for k in range(l):
        obj = np.zeros(l)
        obj[k] = 1.0
        res = lp_solve(_u_problem(qX, qY, e, obj))
        if res.status != OPTIMAL:
            raise LpFailure(f"active-set LP for slot {k + 1} ended {res.status}")
        if res.residual > TOL.lp_feasibility * 10:
            raise LpFailure(f"active-set LP residual {res.residual:.3g}")
        if res.optimum > ACTIVE_THRESHOLD:
            active.append(k)
            witnesses[k] = res.witness
    if not active:
        raise LpFailure("no slot can carry mass on the optimal face")
    return tuple(active), witnesses


def compute_I(inst, e_max=None) -> tuple:
    """Active letters (1-based, sorted): those usable by some maximizer of the letter-mass program."""
    qX, qY = _vectors(inst)
    if e_max is None:
        e_max = _emax_parts(qX, qY)[2]
    active, _ = _active_set(qX, qY, e_max)
    return tuple(k + 1 for k in active)


def _slack_direction(qX, qY, e) -> Optional[str]:
    """Independent LP route to the case split: can one marginal stay slack at the optimum?"""
    for name, q in (("X", qY), ("Y", qX)):
        obj = -np.array([1.0 / float(v) for v in q])
        res = lp_solve(_u_problem(qX, qY, e, obj))
        if res.status != OPTIMAL:
            raise LpFailure(f"slack LP ended {res.status}")
        if -res.optimum < 1.0 - 1e-9:
            return name
    return None


# ---------------------------------------------------------------- report

@dataclass(frozen=True)
class AnalysisReport:
    qX: tuple
    qY: tuple
    e1: object
    e2: object
    e_max: object
    I: tuple                 # 1-based slots
    case: str
    anchor: tuple            # (aX, aY), each a tuple over slots
    constants: dict = field(default_factory=dict)
    alpha: Optional[tuple] = None
    exact: bool = True

    @property
    def l(self) -> int:
        return len(self.qX)

    @property
    def m(self) -> int:
        return len(self.qX) if self.alpha is None else max(self.alpha)

    @property
    def slot_letters(self) -> tuple:
        return tuple(range(1, self.l + 1)) if self.alpha is None else self.alpha

    @property
    def I0(self) -> tuple:
        return tuple(i - 1 for i in self.I)

    @property
    def is_case_a(self) -> bool:
        return self.case in (CASE_A, CASE_A_SYM)

    def to_json(self) -> dict:
        def conv(v):
            if isinstance(v, (tuple, list)):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (Fraction, float)):
                return fmt_number(v)
            return v

        out = {
            "case": self.case,
            "e_max": conv(self.e_max),
            "e1": conv(self.e1),
            "e2": None if self.e2 is None else conv(self.e2),
            "I": list(self.I),
            "anchor": {"X": conv(self.anchor[0]), "Y": conv(self.anchor[1])},
            "constants": conv(self.constants),
            "pX": conv(self.qX),
            "pY": conv(self.qY),
            "exact": self.exact,
        }
        if self.alpha is not None:
            out["alpha"] = list(self.alpha)
        return out


def f_value(report_or_vectors, lam_x, lam_y):
    """sum_i min(pX_i lX_i, pY_i lY_i)."""
    if isinstance(report_or_vectors, AnalysisReport):
        qX, qY = report_or_vectors.qX, report_or_vectors.qY
    else:
        qX, qY = _vectors(report_or_vectors)
    return sum(min(a * x, b * y) for a, b, x, y in zip(qX, qY, lam_x, lam_y))


def _b1_constants(qX, qY, I0, e, exact) -> dict:
    def side(qa, qb):
        vals = [qb[i] * (qa[i] - e) / (e * (qa[i] - qb[i]))
                for i in range(len(qa)) if i not in I0 and qa[i] >= e and qa[i] != qb[i]]
        return max(vals) if vals else (Fraction(0) if exact else 0.0)

    s_x = side(qX, qY)
    s_y = side(qY, qX)
    one = Fraction(1) if exact else 1.0
    consts = {"s_X": s_x, "t_X": one - s_x, "s_Y": s_y, "t_Y": one - s_y}
    tol = _tol(exact)
    for name, v in consts.items():
        if v < -tol or v > 1 + tol:
            raise InconsistentAnalysis(f"{name}={v} outside [0, 1]")
    return consts


def _b2_constants(qX, qY, I0, e, exact) -> dict:
    """Unique (s, t) with s/pX_i + t/pY_i = 1 on the active set."""
    pair = None
    for a in I0:
        for b in I0:
            if b <= a:
                continue
            det = 1 / (qX[a] * qY[b]) - 1 / (qY[a] * qX[b])
            if (det != 0) if exact else abs(det) > 1e-12:
                pair = (a, b, det)
                break
        if pair:
            break
    if pair is None:
        raise InconsistentSpan("the two mass vectors are parallel on the active set")
    a, b, det = pair
    s = (1 / qY[b] - 1 / qY[a]) / det
    t = (1 / qX[a] - 1 / qX[b]) / det
    resid = max(abs(s / qX[i] + t / qY[i] - 1) for i in I0)
    if resid > (0 if exact else TOL.span_residual):
        raise InconsistentSpan(f"(s, t) residual {resid} on the active set")
    if not _eq(s + t, e, exact) and abs(s + t - e) > TOL.span_residual:
        raise InconsistentSpan(f"s + t = {s + t} differs from e_max = {e}")
    return {"s": s, "t": t}


def _anchor(qX, qY, I0, witnesses, e, exact) -> tuple:
    l = len(qX)
    pts = []
    for k in I0:
        w = _exact_vertex(witnesses[k], qX, qY, e) if exact else None
        pts.append(w if w is not None else tuple(float(v) for v in witnesses[k]))
    if exact and all(isinstance(p[0], Fraction) for p in pts):
        u = tuple(sum(p[i] for p in pts) / len(pts) for i in range(l))
    else:
        u = tuple(float(sum(float(p[i]) for p in pts) / len(pts)) for i in range(l))
        exact = False
    zero = Fraction(0) if exact else 0.0
    u = tuple(u[i] if i in I0 else zero for i in range(l))
    ax = [u[i] / qX[i] for i in range(l)]
    ay = [u[i] / qY[i] for i in range(l)]
    sx, sy = sum(ax), sum(ay)
    return tuple(v / sx for v in ax), tuple(v / sy for v in ay), u


def _analyze(qX, qY, alpha=None) -> AnalysisReport:
    qX, qY = tuple(qX), tuple(qY)
    exact = is_exact(qX + qY)
    if not exact:
        qX, qY = tuple(float(v) for v in qX), tuple(float(v) for v in qY)
    l = len(qX)
    e1, e2, e = _emax_parts(qX, qY)

    achievers = [i for i in range(l) if _eq(min(qX[i], qY[i]), e1, exact)]
    x_limited = [i for i in achievers if _lt(qX[i], qY[i], exact)]
    y_limited = [i for i in achievers if _lt(qY[i], qX[i], exact)]
    if e2 is not None and _lt(e1, e2, exact):
        case = CASE_B2
    elif x_limited:
        case = CASE_A
    elif y_limited:
        case = CASE_A_SYM
    elif e2 is None or _lt(e2, e1, exact):
        case = CASE_B1
    else:
        case = CASE_B2

    I0, witnesses = _active_set(qX, qY, e)

    # structural cross-checks, each an independent route to the same facts
    slack = _slack_direction(qX, qY, e)
    expected_slack = {CASE_A: "X", CASE_A_SYM: "Y"}.get(case)
    if slack != expected_slack:
        raise InconsistentAnalysis(f"case {case} but slack LP says {slack!r}")
    constants: dict = {}
    if case in (CASE_A, CASE_A_SYM):
        lim, other = (qX, qY) if case == CASE_A else (qY, qX)
        top = max(lim)
        if not _eq(e, top, exact):
            raise InconsistentAnalysis(f"e_max={e} differs from the limiting side's max mass {top}")
        expect = tuple(i for i in range(l) if _eq(lim[i], top, exact))
        if expect != I0:
            raise InconsistentAnalysis(f"active set {I0} but top-mass letters {expect}")
        i1 = next(i for i in I0 if _lt(top, other[i], exact))
        constants = {"i1": i1 + 1}
    elif case == CASE_B1:
        expect = tuple(i for i in range(l) if _eq(qX[i], e, exact) and _eq(qY[i], e, exact))
        if expect != I0:
            raise InconsistentAnalysis(f"active set {I0} but equal-mass maximizers {expect}")
        constants = _b1_constants(qX, qY, I0, e, exact)
    else:
        constants = _b2_constants(qX, qY, I0, e, exact)

    ax, ay, u = _anchor(qX, qY, I0, witnesses, e, exact)
    fa = sum(min(qX[i] * ax[i], qY[i] * ay[i]) for i in range(l))
    if abs(float(fa) - float(e)) > 1e-9:
        raise InconsistentAnalysis(f"anchor value {fa} differs from e_max {e}")
    return AnalysisReport(qX, qY, e1, e2, e, tuple(i + 1 for i in I0), case, (ax, ay),
                          constants, None if alpha is None else tuple(alpha), exact)


def classify_case(inst) -> AnalysisReport:
    """Full analysis of an instance: e_max, case tag, active set, constants and an anchor point."""
    qX, qY = _vectors(inst)
    return _analyze(qX, qY)


def blocks_analysis(inst: Instance, alpha) -> AnalysisReport:
    """Analysis over block slots; slot k inherits the masses of letter ``alpha[k]``."""
    order = alpha if isinstance(alpha, BlockOrder) else BlockOrder(tuple(alpha), inst.m)
    base = classify_case(inst)
    qX = tuple(inst.pX.probs[a - 1] for a in order.alpha)
    qY = tuple(inst.pY.probs[a - 1] for a in order.alpha)
    rep = _analyze(qX, qY, order.alpha)
    if not _eq(rep.e_max, base.e_max, rep.exact):
        raise InconsistentAnalysis(f"block e_max {rep.e_max} differs from {base.e_max}")
    pre_image = tuple(k + 1 for k, a in enumerate(order.alpha) if a in base.I)
    if rep.I != pre_image:
        raise InconsistentAnalysis(f"block active set {rep.I} but pre-image of I is {pre_image}")
    return rep


def two_letter_rule(inst: Instance) -> tuple:
    """Closed-form case and e_max for two-letter instances, from the first-letter masses."""
    if inst.m != 2:
        raise WrongCase("the two-letter rule needs m = 2")
    a, b = inst.pX.probs[0], inst.pY.probs[0]
    half = Fraction(1, 2) if inst.exact else 0.5
    if a == b:
        return CASE_B1, max(a, 1 - a)
    if min(a, b) < half < max(a, b):
        return CASE_B2, a * b + (1 - a) * (1 - b)
    e = max(min(a, b), min(1 - a, 1 - b))
    # the binding letter is on whichever side has the smaller mass for it
    i = 0 if min(a, b) >= min(1 - a, 1 - b) else 1
    px, py = inst.pX.probs[i], inst.pY.probs[i]
    return (CASE_A if px < py else CASE_A_SYM), e


# ---------------------------------------------------------------- grids

@dataclass(frozen=True)
class PolytopeGrid:
    """Grid of split points. ``lam_x``/``lam_y`` hold one tuple per point (None for a free side)."""

    kind: str                # "J", "K-B1" or "K-B2"
    resolution: int
    dimension: int
    lam_x: tuple
    lam_y: Optional[tuple]
    side: str = "X"          # which marginal carries the search in Case a

    def __len__(self) -> int:
        return len(self.lam_x)

    def arrays(self) -> tuple:
        ax = np.array([[float(v) for v in p] for p in self.lam_x])
        ay = None if self.lam_y is None else np.array([[float(v) for v in p] for p in self.lam_y])
        return ax, ay


def _grid_guard(parts: int, r: int) -> None:
    if parts >= 1 and math.comb(r + parts - 1, max(parts - 1, 0)) > MAX_GRID_POINTS:
        raise GridTooLarge(f"simplex grid with {parts} parts at r={r} is too large")


def _embed(values, I0, l, zero):
    out = [zero] * l
    for i, v in zip(I0, values):
        out[i] = v
    return tuple(out)


def in_J(report: AnalysisReport, lam) -> bool:
    """Membership of a split vector in the Case a slice (searching side per the report)."""
    if not report.is_case_a:
        raise WrongCase("J is defined in Case a only")
    lim, other = (report.qX, report.qY) if report.case == CASE_A else (report.qY, report.qX)
    tol = 0 if (report.exact and is_exact(tuple(lam))) else TOL.membership
    if any(abs(lam[i]) > tol for i in range(report.l) if i not in report.I0):
        return False
    if any(v < -tol for v in lam) or abs(sum(lam) - 1) > tol:
        return False
    top = max(lim)
    return sum(lam[i] / other[i] for i in report.I0) <= 1 / top + tol


def grid_J(report: AnalysisReport, r: int) -> PolytopeGrid:
    """Step-1/r points of the Case a slice, each checked against its inequality exactly."""
    if not report.is_case_a:
        raise WrongCase(f"grid_J needs Case a, got {report.case}")
    I0, l = report.I0, report.l
    _grid_guard(len(I0), r)
    lim, other = (report.qX, report.qY) if report.case == CASE_A else (report.qY, report.qX)
    top = max(lim)
    exact = report.exact
    zero = Fraction(0) if exact else 0.0
    pts = []
    bound = 1 / top
    for comp in compositions(r, len(I0)):
        lam = [Fraction(k, r) for k in comp]
        lhs = sum(v / other[i] for v, i in zip(lam, I0))
        ok = lhs <= bound if exact else float(lhs) <= float(bound) + TOL.membership
        if ok:
            pts.append(_embed(lam if exact else [float(v) for v in lam], I0, l, zero))
    if not pts:
        raise EmptyGrid(f"no grid point of J at r={r}")
    side = "X" if report.case == CASE_A else "Y"
    return PolytopeGrid("J", r, len(I0) - 1, tuple(pts), None, side)


def in_K(report: AnalysisReport, lam_x, lam_y) -> bool:
    if report.case not in (CASE_B1, CASE_B2):
        raise WrongCase("K is used in Case b only")
    tol = TOL.membership
    for lam in (lam_x, lam_y):
        if any(v < -tol for v in lam) or abs(sum(lam) - 1) > tol:
            return False
        if any(abs(lam[i]) > tol for i in range(report.l) if i not in report.I0):
            return False
    return abs(float(f_value(report, lam_x, lam_y)) - float(report.e_max)) <= tol and all(
        abs(float(report.qX[i] * lam_x[i] - report.qY[i] * lam_y[i])) <= tol for i in report.I0)


def grid_K(report: AnalysisReport, r: int) -> PolytopeGrid:
    """Step-1/r points of the maximizing set in Case b.

    Case b1 couples the two sides (one simplex over I). Case b2 walks the
    |I|-2 free coordinates of the slice pX.u-form and solves the last two exactly.
    """
    I0, l = report.I0, report.l
    exact = report.exact
    zero = Fraction(0) if exact else 0.0
    qX, qY = report.qX, report.qY
    if report.case == CASE_B1:
        _grid_guard(len(I0), r)
        xs = []
        for comp in compositions(r, len(I0)):
            lam = [Fraction(k, r) for k in comp]
            xs.append(_embed(lam if exact else [float(v) for v in lam], I0, l, zero))
        return PolytopeGrid("K-B1", r, len(I0) - 1, tuple(xs), tuple(xs))
    if report.case != CASE_B2:
        raise WrongCase(f"grid_K needs Case b, got {report.case}")

    rho = {i: qX[i] / qY[i] for i in I0}
    pivot = None
    for a in I0:
        for b in I0:
            if b > a and ((rho[a] != rho[b]) if exact else abs(rho[a] - rho[b]) > 1e-12):
                pivot = (a, b)
                break
        if pivot:
            break
    if pivot is None:
        raise InconsistentSpan("no pivot pair for the Case b2 slice")
    a, b = pivot
    free = [i for i in I0 if i not in pivot]
    _grid_guard(len(free) + 1, r)
    xs, ys = [], []
    for ks in product(range(r + 1), repeat=len(free)):
        if sum(ks) > r:
            continue
        vals = {i: (Fraction(k, r) if exact else k / r) for i, k in zip(free, ks)}
        rest = 1 - sum(vals.values())
        rest_rho = 1 - sum(rho[i] * v for i, v in vals.items())
        lb = (rest_rho - rho[a] * rest) / (rho[b] - rho[a])
        la = rest - lb
        if (la < 0 or lb < 0) if exact else (la < -1e-12 or lb < -1e-12):
            continue
        if not exact:
            la, lb = max(la, 0.0), max(lb, 0.0)
        vals[a], vals[b] = la, lb
        lam_x = tuple(vals.get(i, zero) for i in range(l))
        lam_y = tuple(qX[i] * lam_x[i] / qY[i] for i in range(l))
        xs.append(lam_x)
        ys.append(lam_y)
    if not xs:
        raise EmptyGrid(f"resolution r={r} misses the Case b2 slice; raise r")
    return PolytopeGrid("K-B2", r, len(I0) - 2, tuple(xs), tuple(ys))


# ---------------------------------------------------------------- truncation

def truncate_alphabet(pX, pY) -> tuple:
    """Smallest cut m with both tails sum_{i>=m} p_i below e_max; letters >= m merge into m."""
    px = validate_pmf(pX).probs
    py = validate_pmf(pY).probs
    if len(px) != len(py):
        raise NoValidCut("marginals must share a support size")
    e = _emax_parts(px, py)[2]
    M = len(px)
    for m in range(2, M + 1):
        tail_x = sum(px[m - 1:])
        tail_y = sum(py[m - 1:])
        if tail_x < e and tail_y < e:
            bx = tuple(px[:m - 1]) + (tail_x,)
            by = tuple(py[:m - 1]) + (tail_y,)
            return m, Instance(Pmf(bx), Pmf(by))
    raise NoValidCut(f"no cut m <= {M} has both tails below e_max = {e}")
