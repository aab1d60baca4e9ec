"""Convergence experiments: simulated centered LCI lengths, two-sample KS, and n-sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.special import kolmogorov

from .analysis import AnalysisReport, classify_case
from .core import Instance, RngConfig, fmt_number, sample_word
from .errors import EmptySample, LciError
from .exact import lc_blocks_length, lci_length
from .sampler import DEFAULT_R, DEFAULT_STEPS, LimitSampleSet, sample_limit


@dataclass
class EmpiricalZSet:
    samples: np.ndarray      # (LCI_n - n e_max) / sqrt(n)
    lengths: np.ndarray      # the integer LCI_n values
    n: int
    reps: int
    seed: int
    stream: int
    instance_hash: str
    e_max: object
    alpha: Optional[tuple] = None
    path: tuple = ()

    def metadata(self) -> dict:
        out = {"kind": "empirical", "n": self.n, "reps": self.reps, "seed": self.seed,
               "stream": self.stream, "instance": self.instance_hash,
               "e_max": fmt_number(self.e_max)}
        if self.path:
            out["path"] = ",".join(str(k) for k in self.path)
        if self.alpha is not None:
            out["alpha"] = ",".join(str(a) for a in self.alpha)
        return out

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def std_error(self) -> float:
        return float(np.std(self.samples, ddof=1) / math.sqrt(self.reps))


def centered(length: int, n: int, e_max) -> float:
    """(length - n e_max)/sqrt(n), with the numerator formed exactly for rational e_max."""
    if isinstance(e_max, Fraction):
        return float(Fraction(length) - n * e_max) / math.sqrt(n)
    return (length - n * float(e_max)) / math.sqrt(n)


def _one_length(inst: Instance, n: int, rng: RngConfig, k: int, alpha) -> int:
    x = sample_word(inst.pX, n, rng.child(k, 0))
    y = sample_word(inst.pY, n, rng.child(k, 1))
    if alpha is None:
        return lci_length(x, y)
    return lc_blocks_length(x, y, alpha)


def simulate_zn(inst: Instance, n: int, reps: int, rng: RngConfig,
                report: Optional[AnalysisReport] = None, threads: int = 1,
                alpha=None) -> EmpiricalZSet:
    """``reps`` independent word pairs of length n; replicate k uses sub-streams (k, 0) and (k, 1)."""
    if n < 1 or reps < 1:
        raise LciError("n and reps must be positive")
    e = (report if report is not None else classify_case(inst)).e_max
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            lengths = list(pool.map(lambda k: _one_length(inst, n, rng, k, alpha), range(reps)))
    else:
        lengths = [_one_length(inst, n, rng, k, alpha) for k in range(reps)]
    samples = np.array([centered(L, n, e) for L in lengths])
    return EmpiricalZSet(samples, np.array(lengths, dtype=np.int64), n, reps, rng.seed,
                         rng.stream, inst.digest(), e, None if alpha is None else tuple(alpha),
                         rng.path)


def replay(inst: Instance, zset: EmpiricalZSet, k: int) -> float:
    """Recompute replicate k of ``zset`` from its logged seed."""
    rng = RngConfig(zset.seed, zset.stream, zset.path)
    L = _one_length(inst, zset.n, rng, k, zset.alpha)
    return centered(L, zset.n, zset.e_max)


@dataclass(frozen=True)
class KsResult:
    statistic: float
    n_a: int
    n_b: int
    pvalue: float

    def critical(self, level: float = 0.001) -> float:
        return ks_critical(self.n_a, self.n_b, level)


def ks_critical(n_a: int, n_b: int, level: float = 0.001) -> float:
    """Asymptotic two-sample critical value c(level) sqrt((n_a + n_b)/(n_a n_b))."""
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    return c * math.sqrt((n_a + n_b) / (n_a * n_b))


def ks_two_sample(a, b) -> KsResult:
    """Sup-distance between the two empirical CDFs, with the asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = a.size * b.size / (a.size + b.size)
    p = float(min(1.0, max(0.0, kolmogorov(math.sqrt(en) * d))))
    return KsResult(d, int(a.size), int(b.size), p)


@dataclass
class ConvergeReport:
    rows: list                      # (n, mean Z_n, KS D, p-value)
    limit: LimitSampleSet
    empirical: list = field(default_factory=list)

    def trend_nonincreasing(self) -> bool:
        """First-to-last decrease of D (the acceptance notion of a trend)."""
        ds = [row[2] for row in self.rows]
        return len(ds) < 2 or ds[-1] <= ds[0]

    def to_json(self) -> dict:
        return {
            "limit": {"mean": self.limit.mean(), "reps": self.limit.reps, "N": self.limit.N,
                      "r": self.limit.r, "case": self.limit.case},
            "rows": [{"n": n, "mean": m, "ks": d, "p": p} for n, m, d, p in self.rows],
            "trend_nonincreasing": self.trend_nonincreasing(),
        }

    def to_gnuplot(self) -> str:
        lines = ["# n mean_Zn ks_D p_value"]
        lines += [f"{n} {m!r} {d!r} {p!r}" for n, m, d, p in self.rows]
        return "\n".join(lines) + "\n"


def converge(inst: Instance, ns: Sequence[int], reps: int, N: int = DEFAULT_STEPS,
             r: int = DEFAULT_R, limit_reps: int = 10_000, rng: Optional[RngConfig] = None,
             report: Optional[AnalysisReport] = None, threads: int = 1) -> ConvergeReport:
    """For each n, KS distance between simulated Z_n and one shared batch of limit draws.

    Streams: the limit batch uses sub-stream 0 of ``stream + 1``; length n_j
    uses sub-path (j,) of ``rng``.
    """
    rng = rng if rng is not None else RngConfig(0)
    report = report if report is not None else classify_case(inst)
    limit = sample_limit(report, N, r, limit_reps, RngConfig(rng.seed, rng.stream + 1), threads)
    rows, sets = [], []
    for j, n in enumerate(ns):
        z = simulate_zn(inst, int(n), reps, rng.child(j), report, threads)
        ks = ks_two_sample(z.samples, limit.samples)
        rows.append((int(n), z.mean(), ks.statistic, ks.pvalue))
        sets.append(z)
    return ConvergeReport(rows, limit, sets)
