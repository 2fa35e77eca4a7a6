"""Deterministic scheduler and ideal channel functionalities.

The network owns the run's root seed.  Every consumer of randomness asks
for a stream by label; a label always maps to the same stream, and labels
are routed into separate namespaces so unrelated protocols never share
coins.  Erasure coins of the anonymous channels are drawn from streams
keyed by the *receiver* only, so two runs that differ only in who sends
see exactly the same erasures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ANON, FUNC, OBSERVER, CheatBook, ConflictGraph, Transcript, pack_bits

STREAM_NAMESPACES = frozenset({"aot", "ob", "player", "coin", "func", "test"})


@dataclass(frozen=True)
class SimConfig:
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a simulation needs at least two players")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class Delivery:
    """What the receiver holds after an erasure channel: a mask and the known bits."""

    known: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.known.size)

    @property
    def n_known(self) -> int:
        return int(self.known.sum())

    def as_symbols(self) -> list:
        """Per position: the bit, or ``None`` for an erasure."""
        return [int(v) if k else None for k, v in zip(self.known.ravel(), self.values.ravel())]


class Network:
    """One simulated run: round counter, randomness, channels, transcript.

    Parameters
    ----------
    n : int
        Number of players, indexed ``0..n-1``.
    seed : int
        Root seed; the whole run is a pure function of it.
    cheats : CheatBook, optional
        Scripted deviations consulted by the protocols.
    """

    def __init__(self, n: int, seed: int = 0, cheats: CheatBook | None = None,
                 transcript: Transcript | None = None):
        self.config = SimConfig(n, seed)
        self.n = n
        self.players = tuple(range(n))
        self.seed = seed
        self.round = 0
        self.transcript = transcript if transcript is not None else Transcript(self.players)
        self.cheats = cheats if cheats is not None else CheatBook()
        self.conflicts = ConflictGraph(self.players)
        self._streams: dict[str, np.random.Generator] = {}
        self._ids = 0

    # -- scheduling and randomness ------------------------------------------------

    def next_round(self) -> int:
        self.round += 1
        return self.round

    def rng_stream(self, label: str) -> np.random.Generator:
        """Deterministic generator for ``label`` (``"<namespace>/<rest>"``)."""
        namespace = label.split("/", 1)[0]
        if namespace not in STREAM_NAMESPACES or "/" not in label:
            raise ValueError(f"stream label {label!r} is outside the known namespaces")
        gen = self._streams.get(label)
        if gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=tuple(label.encode()))
            gen = self._streams[label] = np.random.Generator(np.random.PCG64(ss))
        return gen

    def player_rng(self, p: int) -> np.random.Generator:
        return self.rng_stream(f"player/{p}")

    def fresh_id(self, prefix: str) -> str:
        self._ids += 1
        return f"{prefix}{self._ids}"

    def fresh_ids(self, count: int) -> np.ndarray:
        start = self._ids + 1
        self._ids += count
        return np.arange(start, start + count, dtype=np.int64)

    def cheat(self, actor: int, hook: str):
        return self.cheats.fire(actor, hook)

    # -- transcript helpers -----------------------------------------------------

    def record(self, actor, kind: str, payload: dict, visibility, ref: str = ""):
        return self.transcript.record(self.round, actor, kind, payload, visibility, ref)

    def publish(self, actor, kind: str, payload: dict, ref: str = ""):
        """Public announcement seen by every player and the observer."""
        return self.record(actor, kind, payload, self.transcript.everyone, ref)

    # -- channels -----------------------------------------------------------------

    def _erasures(self, label: str, shape) -> np.ndarray:
        return self.rng_stream(label).integers(0, 2, size=shape, dtype=np.uint8).astype(bool)

    def aot_send(self, sender: int, receiver: int, bits, kind: str = "AOT", ref: str = "") -> Delivery:
        """Anonymous oblivious transfer of a bit array.

        Each position reaches the receiver independently with probability
        1/2.  The receiver's record names no sender; the observer only
        learns that a transfer of this length happened.
        """
        if sender == receiver:
            raise ValueError("AOT needs distinct sender and receiver")
        bits = np.asarray(bits, dtype=np.uint8)
        known = self._erasures(f"aot/{receiver}", bits.shape)
        values = bits & known
        self.record(ANON, kind, {"known": pack_bits(known), "values": pack_bits(values)}, {receiver}, ref)
        self.record(FUNC, kind, {"len": int(bits.size)}, {OBSERVER}, ref)
        return Delivery(known, values)

    def ob_send(self, sender: int, bits, kind: str = "OB", ref: str = "") -> dict[int, Delivery]:
        """Oblivious broadcast: every other player gets an independent erasure pattern."""
        bits = np.asarray(bits, dtype=np.uint8)
        out = {}
        for j in self.players:
            if j == sender:
                continue
            known = self._erasures(f"ob/{j}", bits.shape)
            values = bits & known
            self.record(sender, kind, {"known": pack_bits(known), "values": pack_bits(values)}, {j}, ref)
            out[j] = Delivery(known, values)
        self.record(FUNC, kind, {"len": int(bits.size), "from": sender}, {OBSERVER}, ref)
        return out

    def send(self, sender: int, receiver: int, kind: str, payload: dict, ref: str = ""):
        """Authenticated private point-to-point message."""
        if sender == receiver:
            raise ValueError("point-to-point needs distinct endpoints")
        return self.record(sender, kind, payload, {sender, receiver}, ref)
