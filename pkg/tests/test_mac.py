import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aotmpc.mac import MAX_CHUNKS, AuthKey, GF2m, auth, bits_to_int, chunk, field, forgery_success_exhaustive, int_to_bits, verify

bitlists = st.lists(st.integers(0, 1), max_size=96)


def test_empty_message_tag_is_b():
    key = AuthKey(0x1234, 0xBEEF, 32)
    assert auth([], key) == 0xBEEF


def test_single_chunk_formula():
    gf = field(8)
    key = AuthKey(0x53, 0x11, 8)
    msg = int_to_bits(0xCA, 8)
    assert auth(msg, key) == 0x11 ^ gf.mul(0xCA, 0x53)


def test_two_chunk_formula():
    gf = field(8)
    a, b, m1, m2 = 7, 200, 0x0F, 0xA0
    key = AuthKey(a, b, 8)
    msg = np.concatenate([int_to_bits(m1, 8), int_to_bits(m2, 8)])
    assert auth(msg, key) == b ^ gf.mul(m1, a) ^ gf.mul(m2, gf.mul(a, a))


def test_field_is_a_field_at_degree_4():
    gf = GF2m(4)
    for x in range(1, 16):
        assert any(gf.mul(x, y) == 1 for y in range(1, 16))
    for x, y, z in itertools.product(range(16), repeat=3):
        assert gf.mul(x, y ^ z) == gf.mul(x, y) ^ gf.mul(x, z)


@given(bitlists, st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_verify_accepts_own_tag(msg, a, b):
    key = AuthKey(a, b, 32)
    assert verify(msg, auth(msg, key), key)


@given(bitlists, st.integers(0, 31))
def test_flipped_tag_bit_rejected(msg, bit):
    key = AuthKey.random(np.random.default_rng(len(msg)), 32)
    assert not verify(msg, auth(msg, key) ^ (1 << bit), key)


def test_over_length_message_rejected():
    with pytest.raises(ValueError):
        auth(np.zeros(8 * (MAX_CHUNKS + 1), dtype=np.uint8), AuthKey(1, 1, 8))


def test_exhaustive_forgery_two_chunks_within_bound():
    # every nonzero two-chunk difference, over every key: best forger wins <= 2/2^8
    worst = max(forgery_success_exhaustive([d1, d2], 8) for d1 in range(0, 256, 17) for d2 in range(1, 256, 5))
    assert worst <= 2 / 256


def test_forgery_monte_carlo_within_bound():
    rng = np.random.default_rng(0)
    msg = rng.integers(0, 2, 16)
    other = msg.copy()
    other[3] ^= 1
    wins, trials = 0, 20_000
    for _ in range(trials):
        key = AuthKey.random(rng, 8)
        guess = auth(msg, key) ^ int(rng.integers(0, 256))
        wins += verify(other, guess, key)
    assert wins / trials <= 2 / 256 + 3 * np.sqrt((2 / 256) / trials)


@given(st.integers(0, 2**16 - 1))
def test_bits_roundtrip(x):
    assert bits_to_int(int_to_bits(x, 16)) == x


def test_chunk_pads_last_element():
    assert chunk([1, 0, 1], 4) == [0b1010]
    assert chunk([], 4) == []


def test_key_bits_roundtrip():
    key = AuthKey.random(np.random.default_rng(1), 8)
    assert AuthKey.from_bits(key.to_bits(), 8) == key
