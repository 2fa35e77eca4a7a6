"""Binary linear codes for committed oblivious transfer and membership proofs.

Codes are small (length up to about 24), so the minimum distance is
computed exactly and decoding is an exhaustive nearest-codeword search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_DIMENSION = 20


def _row_reduce(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    a = a.copy() % 2
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def gf2_rank(a) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=np.uint8))
    if a.size == 0:
        return 0
    return len(_row_reduce(a)[1])


@dataclass
class LinearCode:
    """An ``[m, k, d]`` binary code with generator ``G`` (k x m) and parity checks ``H``."""

    generator: np.ndarray
    d: int = field(init=False)
    t: int = field(init=False)
    parity_check: np.ndarray = field(init=False, repr=False)
    _book: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = np.asarray(self.generator, dtype=np.uint8) % 2
        if g.ndim != 2:
            raise ValueError("generator must be a matrix")
        k, m = g.shape
        if gf2_rank(g) != k:
            raise ValueError("generator rows are linearly dependent")
        if k > MAX_DIMENSION:
            raise ValueError(f"dimension {k} too large for exhaustive decoding")
        self.generator = g
        self.parity_check = _parity_check_from(g)
        msgs = ((np.arange(1 << k)[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8)
        words = (msgs.astype(np.int64) @ g.astype(np.int64)) % 2
        weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
        self._weights = weights
        self._book = words @ weights
        nonzero = self._book[1:]
        self.d = int(min(_popcount(nonzero))) if nonzero.size else m
        self.t = (self.d - 1) // 2

    @property
    def m(self) -> int:
        return self.generator.shape[1]

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @classmethod
    def repetition(cls, m: int) -> "LinearCode":
        return cls(np.ones((1, m), dtype=np.uint8))

    def encode(self, message) -> np.ndarray:
        msg = np.asarray(message, dtype=np.int64)
        if msg.shape[-1] != self.k:
            raise ValueError(f"message length {msg.shape[-1]} != k={self.k}")
        return ((msg @ self.generator.astype(np.int64)) % 2).astype(np.uint8)

    def is_codeword(self, word) -> bool:
        w = np.asarray(word, dtype=np.int64)
        if w.shape[-1] != self.m:
            raise ValueError(f"word length {w.shape[-1]} != m={self.m}")
        return not np.any((self.parity_check.astype(np.int64) @ w) % 2)

    def decode(self, word) -> np.ndarray | None:
        """Nearest codeword if within distance ``t``, else ``None``."""
        w = np.asarray(word, dtype=np.int64)
        if w.shape[-1] != self.m:
            raise ValueError(f"word length {w.shape[-1]} != m={self.m}")
        x = int(w @ self._weights)
        dist = _popcount(self._book ^ x)
        best = int(np.argmin(dist))
        if dist[best] > self.t:
            return None
        return _int_to_word(int(self._book[best]), self.m)

    def codewords(self) -> np.ndarray:
        return np.array([_int_to_word(int(c), self.m) for c in self._book], dtype=np.uint8)

    def random_codeword(self, rng: np.random.Generator) -> np.ndarray:
        return self.encode(rng.integers(0, 2, size=self.k))

    def describe(self) -> dict:
        return {"m": self.m, "k": self.k, "d": self.d, "t": self.t,
                "generator": ["".join(map(str, row)) for row in self.generator.tolist()]}

    @classmethod
    def from_description(cls, desc: dict) -> "LinearCode":
        g = np.array([[int(c) for c in row] for row in desc["generator"]], dtype=np.uint8)
        return cls(g)


def _parity_check_from(g: np.ndarray) -> np.ndarray:
    """Basis of the dual code, as rows."""
    k, m = g.shape
    rref, piv = _row_reduce(g)
    free = [c for c in range(m) if c not in piv]
    h = np.zeros((len(free), m), dtype=np.uint8)
    for i, fcol in enumerate(free):
        h[i, fcol] = 1
        for r, pc in enumerate(piv):
            h[i, pc] = rref[r, fcol]
    return h


def _popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    c = np.zeros_like(x)
    while np.any(x):
        c += x & 1
        x = x >> 1
    return c


def _int_to_word(x: int, m: int) -> np.ndarray:
    return np.array([(x >> (m - 1 - i)) & 1 for i in range(m)], dtype=np.uint8)


def gcot_dimension(m: int, sigma: float) -> int:
    """Smallest k with k > (1/2 + 2 sigma) m."""
    return math.floor((0.5 + 2 * sigma) * m) + 1


def build_code(m: int, sigma: float, epsilon: float, rng: np.random.Generator,
               max_tries: int = 200) -> LinearCode:
    """Random systematic code with ``k > (1/2 + 2 sigma) m`` and ``d > epsilon m``.

    Raises
    ------
    ValueError
        If ``k`` would exceed ``m`` or no sample reaches the distance bound.
    """
    k = gcot_dimension(m, sigma)
    if k > m:
        raise ValueError(f"sigma={sigma} forces k={k} > m={m}")
    for _ in range(max_tries):
        p = rng.integers(0, 2, size=(k, m - k), dtype=np.uint8)
        code = LinearCode(np.concatenate([np.eye(k, dtype=np.uint8), p], axis=1))
        if code.d > epsilon * m:
            return code
    raise ValueError(f"no [{m},{k}] code with d > {epsilon * m} after {max_tries} samples")
