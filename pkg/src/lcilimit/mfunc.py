"""The second-order functional of the Case b limit: closed form and LP oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import CASE_B1, CASE_B2, AnalysisReport
from .config import TOL
from .core import to_number
from .errors import BadPerturbation, BoxEscape, LpFailure, WrongCase
from .lp import OPTIMAL, LpProblem, lp_solve

MAX_DOUBLINGS = 20


@dataclass(frozen=True)
class Perturbation:
    nuX: tuple
    nuY: tuple

    @classmethod
    def make(cls, report: AnalysisReport, nuX, nuY) -> "Perturbation":
        """Build and check against ``report``: one entry per slot, zero off the active set."""
        nuX = tuple(_num(v) for v in nuX)
        nuY = tuple(_num(v) for v in nuY)
        if len(nuX) != report.l or len(nuY) != report.l:
            raise BadPerturbation(f"need {report.l} entries per side, got {len(nuX)}/{len(nuY)}")
        for i in range(report.l):
            if i not in report.I0 and (nuX[i] != 0 or nuY[i] != 0):
                raise BadPerturbation(f"slot {i + 1} is outside the active set but has nonzero mass")
        return cls(nuX, nuY)

    def sums(self, report: AnalysisReport) -> tuple:
        return (sum(self.nuX[i] for i in report.I0), sum(self.nuY[i] for i in report.I0))


def _num(v):
    if isinstance(v, (int, float, np.floating, np.integer, str)) or hasattr(v, "denominator"):
        return to_number(v) if not isinstance(v, (float, np.floating)) else float(v)
    raise BadPerturbation(f"not a number: {v!r}")


def _require_case_b(report: AnalysisReport) -> None:
    if report.case not in (CASE_B1, CASE_B2):
        raise WrongCase(f"the functional is finite only in Case b, got {report.case}")


def _as_perturbation(report, nu) -> Perturbation:
    if isinstance(nu, Perturbation):
        return Perturbation.make(report, nu.nuX, nu.nuY)
    nuX, nuY = nu
    return Perturbation.make(report, nuX, nuY)


def m_closed(report: AnalysisReport, nu):
    """Closed form: piecewise-linear in the two active sums (b1) or linear (b2)."""
    _require_case_b(report)
    nu = _as_perturbation(report, nu)
    c = report.constants
    if report.case == CASE_B1:
        sx, sy = nu.sums(report)
        if sx <= sy:
            return c["s_X"] * sy + c["t_X"] * sx
        return c["s_Y"] * sx + c["t_Y"] * sy
    return sum(c["s"] * nu.nuX[i] / report.qX[i] + c["t"] * nu.nuY[i] / report.qY[i]
               for i in report.I0)


def m_closed_batch(report: AnalysisReport, vx: np.ndarray, vy: np.ndarray) -> np.ndarray:
    """Vectorized closed form; ``vx``/``vy`` have slots on the last axis (entries off I ignored)."""
    _require_case_b(report)
    I0 = list(report.I0)
    c = {k: float(v) for k, v in report.constants.items()}
    if report.case == CASE_B1:
        sx = vx[..., I0].sum(axis=-1)
        sy = vy[..., I0].sum(axis=-1)
        return np.where(sx <= sy, c["s_X"] * sy + c["t_X"] * sx, c["s_Y"] * sx + c["t_Y"] * sy)
    wx = np.array([c["s"] / float(report.qX[i]) for i in I0])
    wy = np.array([c["t"] / float(report.qY[i]) for i in I0])
    return vx[..., I0] @ wx + vy[..., I0] @ wy


def _box_lp(report: AnalysisReport, nux: np.ndarray, nuy: np.ndarray, B: float) -> LpProblem:
    # variables: t (l, free), xX (l), xY (l); maximize sum t
    l = report.l
    px = np.array([float(q) for q in report.qX])
    py = np.array([float(q) for q in report.qY])
    eye = np.eye(l)
    A_ub = np.vstack([
        np.hstack([eye, -np.diag(px), np.zeros((l, l))]),
        np.hstack([eye, np.zeros((l, l)), -np.diag(py)]),
    ])
    b_ub = np.concatenate([nux, nuy])
    A_eq = np.zeros((2, 3 * l))
    A_eq[0, l:2 * l] = 1.0
    A_eq[1, 2 * l:] = 1.0
    active = set(report.I0)
    xb = [(-B if i in active else 0.0, B) for i in range(l)]
    bounds = [(None, None)] * l + xb + xb
    c = np.concatenate([np.ones(l), np.zeros(2 * l)])
    return LpProblem(c, A_ub, b_ub, A_eq, [0.0, 0.0], bounds)


def m_lp_oracle(report: AnalysisReport, nu) -> float:
    """Solve the defining max over zero-sum shifts directly, inside a doubling box.

    Stops when the optimizer is strictly inside the box, or when doubling the
    box leaves the optimum unchanged (the box optimum is concave and
    nondecreasing in the box size, so a flat step means it has settled).
    """
    _require_case_b(report)
    nu = _as_perturbation(report, nu)
    nux = np.array([float(v) for v in nu.nuX])
    nuy = np.array([float(v) for v in nu.nuY])
    l = report.l
    B = 4.0 * l * (max(np.abs(nux).max(), np.abs(nuy).max()) + 1.0)
    prev = None
    for _ in range(MAX_DOUBLINGS + 1):
        res = lp_solve(_box_lp(report, nux, nuy, B))
        if res.status != OPTIMAL:
            raise LpFailure(f"box LP ended {res.status}")
        x = res.witness[l:]
        if np.abs(x).max(initial=0.0) < B * (1 - 1e-9):
            return res.optimum
        if prev is not None and abs(res.optimum - prev) <= TOL.lp_compare * 1e-2 * (1 + abs(prev)):
            return res.optimum
        prev = res.optimum
        B *= 2.0
    raise BoxEscape(f"optimizer still on the box boundary after {MAX_DOUBLINGS} doublings")
