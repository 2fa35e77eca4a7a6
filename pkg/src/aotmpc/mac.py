"""One-time information-theoretic message authentication over GF(2^f).

A key is a pair ``(a, b)`` of field elements and the tag of a message
chunked into field elements ``m_1 .. m_l`` is::

    t = b + m_1 a + m_2 a^2 + ... + m_l a^l

For two distinct messages with the same number of chunks, the difference
polynomial has at most ``l`` roots, so a forger who saw one (message, tag)
pair succeeds with probability at most ``l / 2^f``.  Messages are chunked
with zero padding; callers authenticate fixed-length messages.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_DEGREE = 32
MAX_CHUNKS = 1 << 16


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pmod(a: int, p: int) -> int:
    dp = p.bit_length()
    while a.bit_length() >= dp:
        a ^= p << (a.bit_length() - dp)
    return a


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _is_irreducible(p: int) -> bool:
    # Ben-Or: p of degree f is irreducible iff gcd(x^(2^i) - x, p) = 1 for i <= f/2
    f = p.bit_length() - 1
    x = 0b10
    acc = x
    for _ in range(f // 2):
        acc = _pmod(_clmul(acc, acc), p)
        if _pgcd(p, acc ^ x) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_poly(f: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree ``f``."""
    if f < 1:
        raise ValueError("field degree must be positive")
    for low in range(1, 1 << f, 2):
        p = (1 << f) | low
        if _is_irreducible(p):
            return p
    raise ValueError(f"no irreducible polynomial of degree {f}")  # pragma: no cover


class GF2m:
    """The field GF(2^f) with elements as Python ints below ``2**f``."""

    def __init__(self, f: int = DEFAULT_DEGREE):
        self.f = f
        self.poly = irreducible_poly(f)
        self.order = 1 << f

    def mul(self, a: int, b: int) -> int:
        return _pmod(_clmul(a, b), self.poly)

    def pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def mul_table(self) -> np.ndarray:
        """Full multiplication table; only sensible for small ``f``."""
        if self.f > 10:
            raise ValueError("multiplication table only for f <= 10")
        q = self.order
        t = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                t[a, b] = t[b, a] = self.mul(a, b)
        return t

    def __repr__(self) -> str:
        return f"GF2m(f={self.f}, poly={self.poly:#x})"


@lru_cache(maxsize=None)
def field(f: int = DEFAULT_DEGREE) -> GF2m:
    return GF2m(f)


@dataclass(frozen=True)
class AuthKey:
    a: int
    b: int
    f: int = DEFAULT_DEGREE

    @classmethod
    def random(cls, rng: np.random.Generator, f: int = DEFAULT_DEGREE) -> "AuthKey":
        a, b = (int(x) for x in rng.integers(0, 1 << f, size=2, dtype=np.uint64))
        return cls(a, b, f)

    def to_bits(self) -> np.ndarray:
        return np.concatenate([int_to_bits(self.a, self.f), int_to_bits(self.b, self.f)])

    @classmethod
    def from_bits(cls, bits, f: int = DEFAULT_DEGREE) -> "AuthKey":
        bits = np.asarray(bits, dtype=np.uint8)
        return cls(bits_to_int(bits[:f]), bits_to_int(bits[f:2 * f]), f)


def int_to_bits(x: int, width: int) -> np.ndarray:
    return np.array([(x >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    v = 0
    for b in np.asarray(bits, dtype=np.uint8).tolist():
        v = (v << 1) | b
    return v


def chunk(msg, f: int) -> list[int]:
    """Split a bit string into f-bit field elements, zero-padding the last."""
    bits = np.asarray(msg, dtype=np.uint8).ravel()
    if bits.size == 0:
        return []
    pad = (-bits.size) % f
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    return [bits_to_int(c) for c in bits.reshape(-1, f)]


def auth(msg, key: AuthKey) -> int:
    """Tag ``b + sum_i m_i a^i`` of ``msg`` under ``key``."""
    gf = field(key.f)
    chunks = chunk(msg, key.f)
    if len(chunks) > MAX_CHUNKS:
        raise ValueError(f"message longer than {MAX_CHUNKS} field elements")
    acc = 0
    # Horner from the highest power down to a^1
    for m in reversed(chunks):
        acc = gf.mul(acc ^ m, key.a)
    return acc ^ key.b


def verify(msg, tag: int, key: AuthKey) -> bool:
    return auth(msg, key) == tag


def forgery_success_exhaustive(delta: list[int], f: int = 8) -> float:
    """Best forgery probability for a fixed message difference, by key enumeration.

    ``delta`` are the chunk differences ``m'_i - m_i`` (i = 1..l).  Having seen
    one valid tag, the forger's best tag guess for the other message is the
    most frequent value of ``sum_i delta_i a^i`` over uniformly random ``a``.
    """
    gf = field(f)
    counts: dict[int, int] = {}
    for a in range(gf.order):
        v = 0
        for d in reversed(delta):
            v = gf.mul(v ^ d, a)
        counts[v] = counts.get(v, 0) + 1
    return max(counts.values()) / gf.order
