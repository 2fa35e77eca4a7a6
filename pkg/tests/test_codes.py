import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aotmpc.codes import LinearCode, build_code, gcot_dimension, gf2_rank


def brute_min_distance(g):
    k, m = g.shape
    best = m
    for msg in itertools.product([0, 1], repeat=k):
        if any(msg):
            w = int((np.array(msg) @ g % 2).sum())
            best = min(best, w)
    return best


@pytest.fixture(scope="module")
def gcot_code():
    return build_code(16, 1 / 8, 1 / 16, np.random.default_rng(0))


@pytest.fixture(scope="module")
def correcting_code():
    # [12, 7] with d >= 3 so that single errors are corrected
    return build_code(12, 0.0, 2 / 12, np.random.default_rng(1))


def test_gcot_dimension_m16_sigma_eighth():
    assert gcot_dimension(16, 1 / 8) == 13


def test_built_code_has_required_shape(gcot_code):
    assert (gcot_code.m, gcot_code.k) == (16, 13)
    assert gcot_code.d > 16 / 16


def test_reported_distance_matches_brute_force(gcot_code, correcting_code):
    assert gcot_code.d == brute_min_distance(gcot_code.generator)
    assert correcting_code.d == brute_min_distance(correcting_code.generator)
    assert correcting_code.t == (correcting_code.d - 1) // 2 >= 1


def test_repetition_code_contracts():
    rep = LinearCode.repetition(3)
    assert (rep.k, rep.d, rep.t) == (1, 3, 1)
    assert rep.is_codeword([1, 1, 1]) and not rep.is_codeword([1, 1, 0])
    assert rep.decode([1, 1, 0]).tolist() == [1, 1, 1]
    assert rep.decode([0, 1, 0]).tolist() == [0, 0, 0]


def test_zero_word_is_codeword(gcot_code):
    assert gcot_code.is_codeword(np.zeros(16, dtype=np.uint8))


def test_generator_rows_are_codewords(gcot_code):
    assert all(gcot_code.is_codeword(r) for r in gcot_code.generator)
    assert not np.any(gcot_code.parity_check @ gcot_code.generator.T % 2)


def test_round_trip_under_correctable_errors(correcting_code):
    c = correcting_code
    for word in c.codewords():
        assert np.array_equal(c.decode(word), word)
        for pos in range(c.m):
            noisy = word.copy()
            noisy[pos] ^= 1
            assert np.array_equal(c.decode(noisy), word)


def test_linearity_exhaustive(correcting_code):
    words = correcting_code.codewords()
    for a, b in itertools.combinations(words[:40], 2):
        assert correcting_code.is_codeword(a ^ b)


@given(st.lists(st.integers(0, 1), min_size=12, max_size=12))
def test_decode_returns_codeword_or_none(correcting_code, word):
    out = correcting_code.decode(word)
    if out is not None:
        assert correcting_code.is_codeword(out)
        assert int(np.sum(out != np.array(word))) <= correcting_code.t


def test_description_roundtrip(gcot_code):
    back = LinearCode.from_description(gcot_code.describe())
    assert np.array_equal(back.generator, gcot_code.generator) and back.d == gcot_code.d


def test_infeasible_parameters():
    with pytest.raises(ValueError):
        build_code(8, 0.3, 0.1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_code(16, 1 / 8, 0.5, np.random.default_rng(0), max_tries=5)


def test_dependent_generator_rejected():
    with pytest.raises(ValueError):
        LinearCode(np.array([[1, 0, 1], [1, 0, 1]]))


def test_rank():
    assert gf2_rank([[1, 1, 0], [0, 1, 1], [1, 0, 1]]) == 2
