"""Domain types shared by every module: pmfs, instances, words and seeded RNG streams.

Masses are kept exact (``fractions.Fraction``) whenever the caller supplies
ints, ``Fraction`` objects or strings such as ``"3/8"`` / ``"0.375"``; any
Python float switches the whole pmf to float64 arithmetic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

from .config import TOL
from .errors import AlphabetMismatch, LciError, NonPositiveMass, NotNormalized, TooShort

Number = Union[Fraction, float]


def to_number(value) -> Number:
    """Coerce one mass to ``Fraction`` (exact inputs) or ``float``."""
    if isinstance(value, bool):
        raise LciError(f"not a probability: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise LciError(f"cannot parse mass {value!r}") from exc
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise LciError(f"cannot interpret mass {value!r}")


def coerce_masses(values: Iterable) -> tuple:
    nums = [to_number(v) for v in values]
    if any(isinstance(v, float) for v in nums):
        nums = [float(v) for v in nums]
    return tuple(nums)


def is_exact(values: Sequence) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def fmt_number(x) -> str:
    """Exact fractions as ``"p/q"`` strings, floats via ``repr``."""
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


@dataclass(frozen=True)
class Pmf:
    probs: tuple

    @property
    def m(self) -> int:
        return len(self.probs)

    @property
    def exact(self) -> bool:
        return is_exact(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]


def validate_pmf(probs) -> Pmf:
    """Check positivity, length and normalization; return an immutable ``Pmf``.

    Validating an existing ``Pmf`` returns an equal object.
    """
    if isinstance(probs, Pmf):
        probs = probs.probs
    values = coerce_masses(probs)
    if len(values) < 2:
        raise TooShort(f"alphabet needs at least 2 letters, got {len(values)}")
    for i, p in enumerate(values, start=1):
        if not p > 0:
            raise NonPositiveMass(f"letter {i} has mass {p}")
    total = sum(values)
    if is_exact(values):
        if total != 1:
            raise NotNormalized(f"masses sum to {total}, not 1")
    elif abs(total - 1.0) > TOL.analysis:
        raise NotNormalized(f"masses sum to {total!r}, not 1")
    return Pmf(values)


@dataclass(frozen=True)
class Instance:
    pX: Pmf
    pY: Pmf

    def __post_init__(self):
        if self.pX.m != self.pY.m:
            raise AlphabetMismatch(f"pX has {self.pX.m} letters, pY has {self.pY.m}")

    @classmethod
    def from_lists(cls, px, py) -> "Instance":
        return cls(validate_pmf(px), validate_pmf(py))

    @property
    def m(self) -> int:
        return self.pX.m

    @property
    def exact(self) -> bool:
        return self.pX.exact and self.pY.exact

    def swapped(self) -> "Instance":
        return Instance(self.pY, self.pX)

    def to_json(self) -> dict:
        return {"pX": [fmt_number(p) for p in self.pX.probs],
                "pY": [fmt_number(p) for p in self.pY.probs]}

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def instance_from_json(obj) -> Instance:
    """Parse ``{"pX": [...], "pY": [...]}``; entries may be numbers or strings like ``"3/8"``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        return Instance.from_lists(obj["pX"], obj["pY"])
    except KeyError as exc:
        raise LciError(f"instance JSON is missing {exc.args[0]!r}") from exc


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def uniform_instance(m: int) -> Instance:
    p = [Fraction(1, m)] * m
    return Instance.from_lists(p, p)


@dataclass(frozen=True, eq=False)
class Word:
    letters: np.ndarray
    m: int

    def __post_init__(self):
        arr = np.asarray(self.letters, dtype=np.int64).reshape(-1)
        if arr.size and (arr.min() < 1 or arr.max() > self.m):
            raise LciError(f"letters must lie in 1..{self.m}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "letters", arr)

    def __len__(self) -> int:
        return int(self.letters.size)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Word) and self.m == other.m
                and np.array_equal(self.letters, other.letters))

    def __hash__(self) -> int:
        return hash((self.m, self.letters.tobytes()))

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r}, m={self.m})"

    def append(self, letter: int) -> "Word":
        return Word(np.append(self.letters, letter), self.m)


def parse_word(text: str, m: int | None = None) -> Word:
    """Digit strings (``"1212"``) or comma-separated letters (``"10,2,11"``)."""
    text = text.strip()
    if "," in text:
        letters = [int(tok) for tok in text.split(",") if tok.strip()]
    else:
        letters = [int(ch) for ch in text]
    if m is None:
        m = max(letters, default=1)
        m = max(m, 2)
    return Word(letters, m)


def format_word(w: Word) -> str:
    if w.m <= 9:
        return "".join(str(int(c)) for c in w.letters)
    return ",".join(str(int(c)) for c in w.letters)


_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngConfig:
    """Seed plus stream id; ``path`` addresses sub-streams (replicates, chunks).

    Streams are Philox generators keyed through ``SeedSequence`` so any
    (seed, stream, path) reproduces bit-for-bit and distinct keys never share state.
    """

    seed: int
    stream: int = 0
    path: tuple = field(default=())

    def child(self, *keys: int) -> "RngConfig":
        return RngConfig(self.seed, self.stream, self.path + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed & _MASK64, spawn_key=(self.stream,) + self.path)
        return np.random.Generator(np.random.Philox(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngConfig):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngConfig or numpy Generator, got {type(rng).__name__}")


def sample_word(pmf: Pmf, n: int, rng) -> Word:
    """Draw ``n`` i.i.d. letters with law ``pmf``."""
    if n < 0:
        raise LciError("word length must be nonnegative")
    gen = _as_generator(rng)
    p = pmf.as_array()
    p = p / p.sum()
    letters = gen.choice(pmf.m, size=n, p=p) + 1
    return Word(letters, pmf.m)
