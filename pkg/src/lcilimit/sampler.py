"""Monte Carlo draws of the limit laws from discretized correlated Brownian paths.

A path G^X (and independently G^Y) is the Gaussian limit of the centered
letter-count process: its increments over [s, t] have covariance
(t - s) (diag(p) - p p^T). Each replicate's limit value is the maximum of
the relevant functional over a grid of split points.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis import (CASE_A, CASE_A_SYM, CASE_B1, CASE_B2, AnalysisReport, PolytopeGrid,
                       grid_J, grid_K, in_J, in_K)
from .config import TOL
from .core import Instance, RngConfig
from .errors import LciError, PointNotInJ, PointNotInK
from .mfunc import m_closed, m_closed_batch

CHUNK = 64
DEFAULT_STEPS = 4096
DEFAULT_R = 64
_EVAL_BUDGET = 4_000_000   # floats per evaluation block


def increments(p: np.ndarray, g: np.ndarray, N: int) -> np.ndarray:
    """Map i.i.d. standard normals ``g`` (last axis = letters in p) to per-step increments.

    Covariance is (diag(p) - p p^T)/N. When p covers only some letters, the
    rank-one correction is rescaled so the marginal law is still exact.
    """
    v = np.sqrt(p)
    s = float(p.sum())
    if s >= 1.0 - 1e-15:
        kappa = 1.0
    else:
        kappa = (1.0 - math.sqrt(1.0 - s)) / s
    proj = g @ v
    return v * (g - kappa * proj[..., None] * v) / math.sqrt(N)


def _paths(p: np.ndarray, N: int, reps: int, gen: np.random.Generator) -> np.ndarray:
    g = gen.standard_normal((reps, N, p.size))
    G = np.zeros((reps, N + 1, p.size))
    np.cumsum(increments(p, g, N), axis=1, out=G[:, 1:, :])
    return G


@dataclass(frozen=True)
class BrownianGrid:
    """Paths on t_k = k/N; ``GX``/``GY`` have shape (N+1, m) and start at zero."""

    N: int
    GX: np.ndarray
    GY: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N

    def value(self, side: str, letter: int, t: float) -> float:
        """Linear interpolation of G^side_letter at time t (letter is 1-based)."""
        G = self.GX if side == "X" else self.GY
        pos = min(max(float(t), 0.0), 1.0) * self.N
        k = min(int(math.floor(pos)), self.N - 1)
        frac = pos - k
        return float(G[k, letter - 1] + frac * (G[k + 1, letter - 1] - G[k, letter - 1]))


def sample_brownian(inst: Instance, N: int, rng: RngConfig) -> BrownianGrid:
    """One pair of independent paths (X from sub-stream 0, Y from sub-stream 1)."""
    if N < 2:
        raise LciError("need at least 2 path steps")
    GX = _paths(inst.pX.as_array(), N, 1, rng.child(0).generator())[0]
    GY = _paths(inst.pY.as_array(), N, 1, rng.child(1).generator())[0]
    return BrownianGrid(N, GX, GY)


def _slot_increments(path: BrownianGrid, side: str, report: AnalysisReport, lam) -> list:
    letters = report.slot_letters
    out = []
    c = 0.0
    for k in range(report.l):
        lo = c
        c += float(lam[k])
        if k in report.I0:
            out.append(path.value(side, letters[k], c) - path.value(side, letters[k], lo))
        else:
            out.append(0.0)
    return out


def eval_za(path: BrownianGrid, report: AnalysisReport, lam) -> float:
    """Sum over active slots of the searching side's increments across each slot's interval."""
    if not in_J(report, lam):
        raise PointNotInJ(f"{tuple(lam)} is not in J")
    side = "X" if report.case == CASE_A else "Y"
    return float(sum(_slot_increments(path, side, report, lam)))


def eval_zb(path: BrownianGrid, report: AnalysisReport, lam_x, lam_y) -> float:
    """The Case b functional applied to the slot increments of both paths."""
    if not in_K(report, lam_x, lam_y):
        raise PointNotInK("split point is not a maximizer of the mean objective")
    vx = _slot_increments(path, "X", report, lam_x)
    vy = _slot_increments(path, "Y", report, lam_y)
    return float(m_closed(report, (vx, vy)))


# ---------------------------------------------------------------- batched evaluation

@dataclass
class _SideTable:
    """Precomputed interpolation data for one side: per active slot, the two breakpoints."""

    cols: np.ndarray       # (|I|,) column of the slot's letter in the sampled path
    lo_idx: np.ndarray     # (|I|, P)
    lo_frac: np.ndarray
    hi_idx: np.ndarray
    hi_frac: np.ndarray


def _interp(times: np.ndarray, N: int) -> tuple:
    pos = np.clip(times, 0.0, 1.0) * N
    idx = np.minimum(np.floor(pos).astype(np.int64), N - 1)
    return idx, pos - idx


def _side_table(lam: np.ndarray, report: AnalysisReport, letter_cols: dict, N: int) -> _SideTable:
    cum = np.concatenate([np.zeros((lam.shape[0], 1)), np.cumsum(lam, axis=1)], axis=1)
    I0 = list(report.I0)
    letters = report.slot_letters
    lo_idx, lo_frac = _interp(cum[:, I0].T, N)
    hi_idx, hi_frac = _interp(cum[:, [k + 1 for k in I0]].T, N)
    cols = np.array([letter_cols[letters[k]] for k in I0])
    return _SideTable(cols, lo_idx, lo_frac, hi_idx, hi_frac)


def _slot_values(G: np.ndarray, tab: _SideTable, sl: slice) -> np.ndarray:
    """(reps, P_block, |I|) increments of the sampled paths ``G`` (reps, N+1, |S|)."""
    outs = []
    for j, col in enumerate(tab.cols):
        Gc = G[:, :, col]
        li, lf = tab.lo_idx[j, sl], tab.lo_frac[j, sl]
        hi, hf = tab.hi_idx[j, sl], tab.hi_frac[j, sl]
        lo = Gc[:, li] + lf * (Gc[:, li + 1] - Gc[:, li])
        up = Gc[:, hi] + hf * (Gc[:, hi + 1] - Gc[:, hi])
        outs.append(up - lo)
    return np.stack(outs, axis=-1)


def _functional(report: AnalysisReport, vx: Optional[np.ndarray], vy: Optional[np.ndarray]) -> np.ndarray:
    if report.is_case_a:
        return (vx if report.case == CASE_A else vy).sum(axis=-1)
    shape = vx.shape[:-1] + (report.l,)
    fx = np.zeros(shape)
    fy = np.zeros(shape)
    fx[..., list(report.I0)] = vx
    fy[..., list(report.I0)] = vy
    return m_closed_batch(report, fx, fy)


class _Plan:
    """Everything about a sampling run that does not depend on the random paths."""

    def __init__(self, report: AnalysisReport, N: int, r: int, refine: bool):
        self.report = report
        self.N = N
        self.r = r
        self.refine = refine
        self.case_a = report.is_case_a
        letters = report.slot_letters
        used = sorted({letters[k] for k in report.I0})
        self.letter_cols = {a: j for j, a in enumerate(used)}
        self.pX = np.array([float(report.qX[report.slot_letters.index(a)]) for a in used])
        self.pY = np.array([float(report.qY[report.slot_letters.index(a)]) for a in used])
        self.need_x = not self.case_a or report.case == CASE_A
        self.need_y = not self.case_a or report.case == CASE_A_SYM
        self.single = len(report.I0) == 1
        if self.single:
            self.grid = None
            return
        self.grid = grid_J(report, r) if self.case_a else grid_K(report, r)
        ax, ay = self.grid.arrays()
        if self.case_a:
            lam_side = ax
            self.lam_x = lam_side if report.case == CASE_A else None
            self.lam_y = lam_side if report.case == CASE_A_SYM else None
        else:
            self.lam_x, self.lam_y = ax, ay
        self.tab_x = None if self.lam_x is None else _side_table(self.lam_x, report, self.letter_cols, N)
        self.tab_y = None if self.lam_y is None else _side_table(self.lam_y, report, self.letter_cols, N)

    @property
    def points(self) -> int:
        return 1 if self.grid is None else len(self.grid)

    def evaluate(self, GX, GY) -> tuple:
        """Per-replicate max over the grid and the index of the maximizing point."""
        reps = (GX if GX is not None else GY).shape[0]
        P = self.points
        block = max(1, _EVAL_BUDGET // (reps * max(1, len(self.report.I0)) * 4))
        best = np.full(reps, -np.inf)
        arg = np.zeros(reps, dtype=np.int64)
        for start in range(0, P, block):
            sl = slice(start, min(P, start + block))
            vx = None if self.tab_x is None else _slot_values(GX, self.tab_x, sl)
            vy = None if self.tab_y is None else _slot_values(GY, self.tab_y, sl)
            vals = _functional(self.report, vx, vy)
            k = vals.argmax(axis=1)
            top = vals[np.arange(reps), k]
            better = top > best
            best[better] = top[better]
            arg[better] = k[better] + start
        return best, arg


def _refine(plan: _Plan, GX, GY, best, arg) -> np.ndarray:
    """Two rounds of local search around each replicate's grid maximizer (step r/2, then r/4).

    Moves transfer mass between two active slots, which keeps a point on the
    simplex; candidates outside the polytope are discarded. Case b2 slices
    are left as they are.
    """
    rep = plan.report
    if plan.grid is None or rep.case == CASE_B2:
        return best
    I0 = list(rep.I0)
    base = plan.lam_x if plan.lam_x is not None else plan.lam_y
    out = best.copy()
    for i in range(len(out)):
        lam = base[arg[i]].copy()
        cur = out[i]
        for h in (0.5 / plan.r, 0.25 / plan.r):
            cands = []
            for a in I0:
                for b in I0:
                    if a != b and lam[a] >= h - 1e-15:
                        c = lam.copy()
                        c[a] -= h
                        c[b] += h
                        if plan.case_a and not in_J(rep, c):
                            continue
                        cands.append(c)
            if not cands:
                continue
            cands = np.array(cands)
            gx = None if GX is None else GX[i:i + 1]
            gy = None if GY is None else GY[i:i + 1]
            tx = None if plan.tab_x is None else _side_table(cands, rep, plan.letter_cols, plan.N)
            ty = None if plan.tab_y is None else _side_table(cands, rep, plan.letter_cols, plan.N)
            sl = slice(0, len(cands))
            vx = None if tx is None else _slot_values(gx, tx, sl)
            vy = None if ty is None else _slot_values(gy, ty, sl)
            vals = _functional(rep, vx, vy)[0]
            k = int(vals.argmax())
            if vals[k] > cur:
                cur = float(vals[k])
                lam = cands[k]
        out[i] = cur
    return out


def _run_chunk(plan: _Plan, c: int, size: int, rng: RngConfig, y_rng: RngConfig) -> np.ndarray:
    gx = rng.child(c, 0).generator() if plan.need_x else None
    gy = y_rng.child(c, 1).generator() if plan.need_y else None
    if plan.single:
        # one active slot: no split to optimize, draw the endpoint values directly
        vx = None if gx is None else (gx.standard_normal((size, 1)) * np.sqrt(plan.pX * (1 - plan.pX)))
        vy = None if gy is None else (gy.standard_normal((size, 1)) * np.sqrt(plan.pY * (1 - plan.pY)))
        return _functional(plan.report, vx, vy)
    GX = None if gx is None else _paths(plan.pX, plan.N, size, gx)
    GY = None if gy is None else _paths(plan.pY, plan.N, size, gy)
    best, arg = plan.evaluate(GX, GY)
    if plan.refine:
        best = _refine(plan, GX, GY, best, arg)
    return best


@dataclass
class LimitSampleSet:
    samples: np.ndarray
    case: str
    N: int
    r: int
    reps: int
    seed: int
    stream: int = 0
    alpha: Optional[tuple] = None
    refine: bool = False
    meta: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        out = {"kind": "limit", "case": self.case, "N": self.N, "r": self.r, "reps": self.reps,
               "seed": self.seed, "stream": self.stream, "refine": int(self.refine)}
        if self.alpha is not None:
            out["alpha"] = ",".join(str(a) for a in self.alpha)
        out.update(self.meta)
        return out

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def std_error(self) -> float:
        return float(np.std(self.samples, ddof=1) / math.sqrt(len(self.samples)))


def sample_limit(report: AnalysisReport, N: int = DEFAULT_STEPS, r: int = DEFAULT_R,
                 reps: int = 1000, rng: Optional[RngConfig] = None, threads: int = 1,
                 refine: bool = False, y_rng: Optional[RngConfig] = None) -> LimitSampleSet:
    """``reps`` i.i.d. draws of the limit law described by ``report``.

    Replicates are generated in chunks of 64, each chunk on its own stream,
    so the output is the same for any thread count. ``y_rng`` overrides the
    stream of the Y paths only.
    """
    if reps < 1:
        raise LciError("reps must be at least 1")
    if N < 2:
        raise LciError("need at least 2 path steps")
    rng = rng if rng is not None else RngConfig(0)
    y_rng = y_rng if y_rng is not None else rng
    plan = _Plan(report, N, r, refine)
    sizes = [min(CHUNK, reps - s) for s in range(0, reps, CHUNK)]
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda cs: _run_chunk(plan, cs[0], cs[1], rng, y_rng),
                                  enumerate(sizes)))
    else:
        parts = [_run_chunk(plan, c, s, rng, y_rng) for c, s in enumerate(sizes)]
    samples = np.concatenate(parts)
    return LimitSampleSet(samples, report.case, N, r, reps, rng.seed, rng.stream, report.alpha,
                          refine, {"grid_points": plan.points})


def sample_limit_blocks(report: AnalysisReport, N: int = DEFAULT_STEPS, r: int = DEFAULT_R,
                        reps: int = 1000, rng: Optional[RngConfig] = None, threads: int = 1,
                        refine: bool = False, y_rng: Optional[RngConfig] = None) -> LimitSampleSet:
    """Block-order variant; slots sharing a letter read the same path coordinate."""
    if report.alpha is None:
        raise LciError("expected a block-order report")
    return sample_limit(report, N, r, reps, rng, threads, refine, y_rng)


# ---------------------------------------------------------------- CSV

def write_samples_csv(path, samples, meta: dict) -> None:
    """One sample per line under a ``sample`` header; metadata as ``# key: value`` comments."""
    with open(path, "w", newline="") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}: {v}\n")
        w = csv.writer(fh)
        w.writerow(["sample"])
        for x in np.asarray(samples, dtype=float):
            w.writerow([repr(float(x))])


def read_samples_csv(path) -> tuple:
    meta, values = {}, []
    with open(path, newline="") as fh:
        rows = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = val.strip()
            else:
                rows.append(line)
    reader = csv.reader(rows)
    header = next(reader, None)
    if header != ["sample"]:
        raise LciError(f"unexpected CSV header {header!r}")
    for row in reader:
        if row:
            values.append(float(row[0]))
    return np.array(values), meta
