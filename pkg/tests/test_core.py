from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcilimit import (Instance, RngConfig, Word, format_word, instance_from_json, parse_word,
                      sample_word, validate_pmf)
from lcilimit.errors import AlphabetMismatch, LciError, NonPositiveMass, NotNormalized, TooShort


def test_valid_pmfs():
    assert validate_pmf([0.5, 0.5]).probs == (0.5, 0.5)
    p = validate_pmf(["3/8", "3/8", "1/4"])
    assert p.exact and p.probs == (F(3, 8), F(3, 8), F(1, 4))


@pytest.mark.parametrize("probs, err", [
    ([0.5, 0.0, 0.5], NonPositiveMass),
    ([0.6, -0.1, 0.5], NonPositiveMass),
    ([0.5, 0.6], NotNormalized),
    (["1/2", "1/3"], NotNormalized),
    ([1.0], TooShort),
])
def test_invalid_pmfs(probs, err):
    with pytest.raises(err):
        validate_pmf(probs)


def test_float_tolerance():
    validate_pmf([0.1] * 10)          # sums to 0.9999999999999999
    with pytest.raises(NotNormalized):
        validate_pmf([0.5, 0.5 + 1e-9])


def test_idempotent():
    p = validate_pmf(["1/3", "2/3"])
    assert validate_pmf(p) == p


def test_instance_json_roundtrip():
    inst = instance_from_json('{"pX": ["3/8", "0.375", "1/4"], "pY": ["1/2", "3/8", "1/8"]}')
    assert inst.pX.probs[1] == F(3, 8)
    assert instance_from_json(inst.to_json()) == inst
    with pytest.raises(AlphabetMismatch):
        Instance.from_lists([0.5, 0.5], [0.2, 0.3, 0.5])
    with pytest.raises(LciError):
        instance_from_json('{"pX": [0.5, 0.5]}')


def test_word_validation_and_format():
    w = parse_word("1213", 3)
    assert len(w) == 4 and format_word(w) == "1213"
    big = parse_word("10,2,11", 12)
    assert format_word(big) == "10,2,11"
    with pytest.raises(LciError):
        Word([0, 1], 2)
    with pytest.raises(LciError):
        Word([3], 2)


def test_sample_word_basics():
    p = validate_pmf([0.5, 0.5])
    assert len(sample_word(p, 0, RngConfig(1))) == 0
    a = sample_word(p, 50, RngConfig(7, 3))
    assert a == sample_word(p, 50, RngConfig(7, 3))
    assert a != sample_word(p, 50, RngConfig(7, 4))
    skew = sample_word(validate_pmf([1 - 1e-9, 1e-9]), 10, RngConfig(0))
    assert np.all(skew.letters == 1)


def test_sample_word_frequencies():
    p = validate_pmf([0.2, 0.5, 0.3])
    n = 10**6
    w = sample_word(p, n, RngConfig(11))
    for i, pi in enumerate([0.2, 0.5, 0.3], start=1):
        freq = np.count_nonzero(w.letters == i) / n
        assert abs(freq - pi) <= 4 * np.sqrt(pi * (1 - pi) / n)


def test_rng_children_distinct():
    base = RngConfig(5)
    draws = {tuple(base.child(k).generator().integers(0, 2**31, 4)) for k in range(20)}
    assert len(draws) == 20


@given(st.lists(st.integers(1, 50), min_size=2, max_size=6))
def test_integer_weights_normalize_exactly(weights):
    total = sum(weights)
    p = validate_pmf([F(w, total) for w in weights])
    assert sum(p.probs) == 1
