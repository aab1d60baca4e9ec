"""Exact lengths: LCI, block-aligned common subsequences, plain LCS, and brute-force oracles.

Words of unequal length are accepted everywhere; the definitions carry over verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .core import Word
from .errors import AlphabetMismatch, BadComposition, LciError, NotOnto, TooLarge, TooManyBlocks

BRUTE_FORCE_MAX_LEN = 12
MAX_BLOCK_ORDERS = 10**6


def _check_pair(x: Word, y: Word) -> int:
    if x.m != y.m:
        raise AlphabetMismatch(f"words over different alphabets: m={x.m} vs m={y.m}")
    return x.m


@dataclass(frozen=True)
class BlockOrder:
    """Surjective slot-to-letter map ``alpha``: slot k aligns only letter ``alpha[k]``."""

    alpha: tuple
    m: int

    def __post_init__(self):
        alpha = tuple(int(a) for a in self.alpha)
        if any(a < 1 or a > self.m for a in alpha):
            raise NotOnto(f"block letters must lie in 1..{self.m}: {alpha}")
        if set(alpha) != set(range(1, self.m + 1)):
            raise NotOnto(f"block order {alpha} does not cover all {self.m} letters")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def identity(cls, m: int) -> "BlockOrder":
        return cls(tuple(range(1, m + 1)), m)

    @property
    def length(self) -> int:
        return len(self.alpha)

    def is_identity(self) -> bool:
        return self.alpha == tuple(range(1, self.m + 1))


def _as_block_order(alpha, m: int) -> BlockOrder:
    if isinstance(alpha, BlockOrder):
        if alpha.m != m:
            raise AlphabetMismatch(f"block order over m={alpha.m}, words over m={m}")
        return alpha
    return BlockOrder(tuple(alpha), m)


def _block_dp(xs: np.ndarray, ys: np.ndarray, slots: Sequence[int]) -> int:
    """Rolling DP: table[k][j] = best length using slots 1..k against y[:j].

    Per x-letter the row update is: take the max of the row above, the
    previous slot of this row, and a diagonal +1 on matches; the left
    neighbour dependence is a running maximum along j.
    """
    ny = ys.size
    nslots = len(slots)
    if xs.size == 0 or ny == 0:
        return 0
    match = {c: (ys == c) for c in set(slots)}
    prev = np.zeros((nslots + 1, ny + 1), dtype=np.int64)
    cur = np.zeros_like(prev)
    for a in xs:
        cur[0] = 0
        for k in range(1, nslots + 1):
            tmp = np.maximum(prev[k], cur[k - 1])
            if slots[k - 1] == a:
                diag = prev[k][:-1] + match[a]
                np.maximum(tmp[1:], diag, out=tmp[1:])
            np.maximum.accumulate(tmp, out=cur[k])
        prev, cur = cur, prev
    return int(prev[nslots][ny])


def _lci_two_letters(xs: np.ndarray, ys: np.ndarray) -> int:
    # A common weakly increasing word is 1^c 2^d. For each c, embed the ones
    # as early as possible in both words and count the 2s left after them.
    ones_x = np.flatnonzero(xs == 1)
    ones_y = np.flatnonzero(ys == 1)
    k = min(ones_x.size, ones_y.size)
    twos_x = np.concatenate([np.cumsum((xs == 2)[::-1])[::-1], [0]])
    twos_y = np.concatenate([np.cumsum((ys == 2)[::-1])[::-1], [0]])
    pos_x = np.concatenate([[0], ones_x[:k] + 1])
    pos_y = np.concatenate([[0], ones_y[:k] + 1])
    best = np.arange(k + 1) + np.minimum(twos_x[pos_x], twos_y[pos_y])
    return int(best.max())


def lci_dp(x: Word, y: Word) -> int:
    """The O(|x| |y| m) dynamic program, for any alphabet size."""
    m = _check_pair(x, y)
    return _block_dp(x.letters, y.letters, range(1, m + 1))


def lci_length(x: Word, y: Word) -> int:
    """Length of the longest common weakly increasing subsequence (0 if none).

    Binary alphabets use a linear-time greedy; larger alphabets use the DP.
    """
    m = _check_pair(x, y)
    if m == 2:
        return _lci_two_letters(x.letters, y.letters)
    return _block_dp(x.letters, y.letters, range(1, m + 1))


def _weakly_increasing_subsequences(seq) -> set:
    subs = {()}
    for c in seq:
        subs |= {s + (c,) for s in subs if not s or s[-1] <= c}
    return subs


def lci_bruteforce(x: Word, y: Word) -> int:
    """Exhaustive oracle: intersect the weakly increasing subsequences of both words."""
    _check_pair(x, y)
    if len(x) > BRUTE_FORCE_MAX_LEN or len(y) > BRUTE_FORCE_MAX_LEN:
        raise TooLarge(f"brute force limited to length {BRUTE_FORCE_MAX_LEN}")
    xs = [int(c) for c in x.letters]
    ys = [int(c) for c in y.letters]
    common = _weakly_increasing_subsequences(xs) & _weakly_increasing_subsequences(ys)
    return max(len(s) for s in common)


def compositions(n: int, parts: int) -> Iterator[tuple]:
    """All tuples of ``parts`` nonnegative integers summing to ``n``."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def _check_composition(comp, total: int, parts: int, name: str) -> tuple:
    comp = tuple(int(v) for v in comp)
    if len(comp) != parts:
        raise BadComposition(f"{name} has {len(comp)} parts, expected {parts}")
    if any(v < 0 for v in comp):
        raise BadComposition(f"{name} has a negative part: {comp}")
    if sum(comp) != total:
        raise BadComposition(f"{name} sums to {sum(comp)}, expected {total}")
    return comp


def composition_value(x: Word, y: Word, lx, ly, alpha=None) -> int:
    """Sum over blocks of min(count of the block letter in the x-segment, same in y).

    Segment k of a word spans positions (lx_1+...+lx_{k-1}, lx_1+...+lx_k].
    The maximum over all composition pairs equals ``lci_length`` (identity
    order) or ``lc_blocks_length`` (general ``alpha``).
    """
    m = _check_pair(x, y)
    order = BlockOrder.identity(m) if alpha is None else _as_block_order(alpha, m)
    lx = _check_composition(lx, len(x), order.length, "lx")
    ly = _check_composition(ly, len(y), order.length, "ly")
    bx = np.concatenate([[0], np.cumsum(lx)])
    by = np.concatenate([[0], np.cumsum(ly)])
    total = 0
    for k, letter in enumerate(order.alpha):
        nx = int(np.count_nonzero(x.letters[bx[k]:bx[k + 1]] == letter))
        ny = int(np.count_nonzero(y.letters[by[k]:by[k + 1]] == letter))
        total += min(nx, ny)
    return total


def lc_blocks_length(x: Word, y: Word, alpha) -> int:
    """Longest common subsequence made of consecutive, possibly empty, blocks;
    block k may only contain letter ``alpha[k]``."""
    m = _check_pair(x, y)
    order = _as_block_order(alpha, m)
    return _block_dp(x.letters, y.letters, order.alpha)


def _onto_orders_without_repeats(m: int, b: int) -> Iterator[tuple]:
    # Equal neighbouring slots merge without changing the length, and padding a
    # shorter order up to b slots only adds options, so these orders suffice.
    def extend(prefix, seen):
        missing = m - len(seen)
        remaining = b - len(prefix)
        if remaining == 0:
            if missing == 0:
                yield tuple(prefix)
            return
        if missing > remaining:
            return
        for c in range(1, m + 1):
            if prefix and prefix[-1] == c:
                continue
            prefix.append(c)
            yield from extend(prefix, seen | {c})
            prefix.pop()

    yield from extend([], frozenset())


def lc_b_blocks(x: Word, y: Word, b: int) -> int:
    """Maximum of ``lc_blocks_length`` over every surjection {1..b} -> {1..m}."""
    m = _check_pair(x, y)
    if b < m:
        raise NotOnto(f"need at least m={m} blocks, got {b}")
    if m**b > MAX_BLOCK_ORDERS:
        raise TooManyBlocks(f"m^b = {m}^{b} exceeds {MAX_BLOCK_ORDERS}")
    best = 0
    for order in _onto_orders_without_repeats(m, b):
        best = max(best, _block_dp(x.letters, y.letters, order))
    return best


def all_block_orders(m: int, b: int) -> Iterator[tuple]:
    """Every surjection {1..b} -> {1..m}, by plain enumeration (test oracle)."""
    full = set(range(1, m + 1))
    for alpha in product(range(1, m + 1), repeat=b):
        if set(alpha) == full:
            yield alpha


def lcs_length(x: Word, y: Word) -> int:
    """Classic longest common subsequence length."""
    _check_pair(x, y)
    xs, ys = x.letters, y.letters
    if xs.size == 0 or ys.size == 0:
        return 0
    prev = np.zeros(ys.size + 1, dtype=np.int64)
    cur = np.zeros_like(prev)
    for a in xs:
        cur[0] = 0
        tmp = prev.copy()
        np.maximum(tmp[1:], prev[:-1] + (ys == a), out=tmp[1:])
        np.maximum.accumulate(tmp, out=cur)
        prev, cur = cur, prev
    return int(prev[-1])


def longest_weakly_increasing(seq) -> int:
    """Patience-style length of the longest nondecreasing subsequence."""
    import bisect

    tails: list = []
    for c in seq:
        k = bisect.bisect_right(tails, c)
        if k == len(tails):
            tails.append(c)
        else:
            tails[k] = c
    return len(tails)


__all__ = [
    "BlockOrder", "LciError", "all_block_orders", "composition_value", "compositions",
    "lc_b_blocks", "lc_blocks_length", "lci_bruteforce", "lci_dp", "lci_length",
    "lcs_length", "longest_weakly_increasing",
]
