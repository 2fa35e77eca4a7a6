"""Global bit commitments, XOR-pair commitments, linear proofs and copying.

A global bit commitment (GBC) to ``b`` hands every other player ``k``
strings of length ``m``, each of parity ``b``, over an erasure channel.
With AOT origin each receiver gets its own independent strings and the
delivery is anonymous; with OB origin one shared set of strings is
obliviously broadcast.  Opening publishes the strings; every receiver
compares them with the positions it actually received.

A GBCX is ``m_x`` pairs of GBCs whose halves XOR to the committed bit.
Pairs make cut-and-choose proofs of linear relations possible: the prover
announces ``A . left_p`` for every pair ``p``, a public coin picks the left
or right halves to open, and the verifiers check the announcement.  Every
proof opens half of each pair, so a GBCX is destroyed by a proof and must
be copied beforehand if it is needed again.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    CheaterDetected,
    CheaterIdentified,
    GroupSplit,
    Success,
    pack_bits,
    partition_by_conflicts,
)
from .simnet import Network

ORIGINS = ("aot", "ob")


@dataclass(frozen=True)
class GbcParams:
    """Commitment parameters.

    Attributes
    ----------
    k, m : int
        Strings per receiver and string length of one GBC.
    pairs : int
        Number of XOR pairs ``m_x`` in a GBCX; a false proof escapes with
        probability ``2 ** -pairs``.
    origin : {"aot", "ob"}
        Channel used to deliver the strings.
    setup_l : int, optional
        Clean anonymous GBCX required per player in the anonymous setup;
        defaults to the number of players.
    """

    k: int = 8
    m: int = 16
    pairs: int = 8
    origin: str = "aot"
    setup_l: int | None = None

    def __post_init__(self):
        if self.k < 1 or self.m < 2:
            raise ValueError(f"need k >= 1 and m >= 2, got k={self.k}, m={self.m}")
        if self.pairs < 1:
            raise ValueError("a GBCX needs at least one pair")
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}")


# ---------------------------------------------------------------------------
# plain GBC


@dataclass
class GbcBatch:
    """A vector of ``N`` GBCs by one committer.

    ``strings[i, j]`` are the ``k x m`` strings meant for player ``j`` and
    ``known[i, j]`` marks the positions ``j`` actually received.  The
    committer's own row is never sent and is fully known to it.
    """

    committer: int
    origin: str
    strings: np.ndarray
    known: np.ndarray
    ref: str
    opened: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.opened is None:
            self.opened = np.zeros(len(self), dtype=bool)

    def __len__(self) -> int:
        return self.strings.shape[0]

    @property
    def n(self) -> int:
        return self.strings.shape[1]

    @property
    def bits(self) -> np.ndarray:
        """Committed bits (simulation ground truth)."""
        return (self.strings[:, 0, 0].sum(-1) % 2).astype(np.uint8)


def parity_strings(rng: np.random.Generator, bits, shape) -> np.ndarray:
    """Uniform strings of the given trailing ``shape`` with parity ``bits``.

    Returns an array of shape ``bits.shape + shape``; the parity is taken
    along the last axis.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    s = rng.integers(0, 2, size=bits.shape + tuple(shape), dtype=np.uint8)
    par = s.sum(-1) % 2
    target = bits.reshape(bits.shape + (1,) * (len(shape) - 1))
    s[..., -1] ^= (par ^ target).astype(np.uint8)
    return s


def gbc_commit(net: Network, committer: int, bits, params: GbcParams, origin: str | None = None,
               rng: np.random.Generator | None = None) -> GbcBatch:
    """Commit ``committer`` to every bit of ``bits`` towards all other players."""
    origin = origin or params.origin
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    rng = rng if rng is not None else net.player_rng(committer)
    n = net.n
    ref = net.fresh_id("g")
    if origin == "aot":
        strings = parity_strings(rng, bits, (n, params.k, params.m))
    else:
        shared = parity_strings(rng, bits, (params.k, params.m))
        strings = np.repeat(shared[:, None], n, axis=1)
    known = np.zeros(strings.shape, dtype=bool)
    known[:, committer] = True
    if origin == "aot":
        for j in net.players:
            if j != committer:
                known[:, j] = net.aot_send(committer, j, strings[:, j], kind="GBC_COMMIT", ref=ref).known
    else:
        for j, d in net.ob_send(committer, strings[:, 0], kind="GBC_COMMIT", ref=ref).items():
            known[:, j] = d.known
    return GbcBatch(committer, origin, strings, known, ref)


def _parity_consistent(claimed: np.ndarray) -> np.ndarray:
    """Per GBC: do all claimed strings have the same parity?"""
    par = claimed.sum(-1) % 2
    flat = par.reshape(par.shape[0], -1)
    return np.all(flat == flat[:, :1], axis=1)


def opening_contradicts(known: np.ndarray, delivered: np.ndarray, claimed: np.ndarray) -> np.ndarray:
    """Per GBC: does the claim differ from a position the receiver holds?"""
    bad = known & (delivered != claimed)
    return bad.reshape(bad.shape[0], -1).any(axis=1)


def gbc_open(net: Network, batch: GbcBatch, idx=None, to: int | None = None,
             flip: bool = False, check_rows=None) -> np.ndarray:
    """Open GBCs ``idx`` publicly (``to=None``) or privately to one player.

    The committer publishes its claimed strings; receivers check parity
    consistency and the positions they received.  Any contradiction is a
    public complaint and identifies the committer.

    Returns
    -------
    numpy.ndarray
        The opened bits.
    """
    idx = np.arange(len(batch)) if idx is None else np.asarray(idx, dtype=np.int64).ravel()
    c = batch.committer
    claimed = batch.strings[idx].copy()
    if flip or net.cheat(c, "GBC_OPEN"):
        crng = net.rng_stream(f"player/{c}/cheat")
        pos = crng.integers(0, batch.strings.shape[-1], size=claimed.shape[:-1])
        np.put_along_axis(claimed, pos[..., None],
                          1 - np.take_along_axis(claimed, pos[..., None], -1), -1)
    if to is None:
        checkers = [j for j in net.players if j != c]
        net.publish(c, "GBC_OPEN", {"idx": idx, "strings": pack_bits(claimed[:, checkers])}, batch.ref)
    else:
        checkers = [to]
        net.send(c, to, "GBC_OPEN", {"idx": idx, "strings": pack_bits(claimed[:, [to]])}, batch.ref)
    if check_rows is not None:
        checkers = [j for j in checkers if j in check_rows]
    if checkers and not _parity_consistent(claimed[:, checkers]).all():
        net.publish(checkers[0], "COMPLAINT", {"against": c, "why": "parity"}, batch.ref)
        raise CheaterDetected(c, "opened strings of unequal parity", "GBC_OPEN")
    for j in checkers:
        if opening_contradicts(batch.known[idx, j], batch.strings[idx, j], claimed[:, j]).any():
            net.publish(j, "COMPLAINT", {"against": c, "why": "contradicts delivery"}, batch.ref)
            raise CheaterDetected(c, f"opening contradicts bits delivered to P{j}", "GBC_OPEN")
    if to is None:
        batch.opened[idx] = True
    row = checkers[0] if checkers else next(j for j in net.players if j != c)
    return (claimed[:, row, 0].sum(-1) % 2).astype(np.uint8)


# ---------------------------------------------------------------------------
# exact hiding and binding figures


def _masks(m: int) -> np.ndarray:
    return ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(bool)


def string_view_distance(mask) -> float:
    """Total variation between the views of one string of parity 0 and of parity 1.

    The view is the restriction of the string to ``mask``; computed by
    enumerating every string of each parity.
    """
    mask = np.asarray(mask, dtype=bool)
    m = mask.size
    words = _masks(m).astype(np.uint8)
    par = words.sum(1) % 2
    weights = 1 << np.arange(m)
    views = (words * mask) @ weights
    dist = []
    for b in (0, 1):
        v = views[par == b]
        dist.append(np.bincount(v, minlength=1 << m) / v.size)
    return 0.5 * float(np.abs(dist[0] - dist[1]).sum())


def hiding_distance(m: int, k: int) -> float:
    """Exact view distance of one receiver between ``b=0`` and ``b=1``.

    Erasure masks are public to the receiver and independent of ``b``, so
    the distance is the mask-average of the conditional distances; per
    string the conditional views are either identical or disjoint, and
    ``k`` independent strings are distinguishable iff one of them is.
    """
    per_mask = np.array([string_view_distance(mk) for mk in _masks(m)])
    p_disjoint = per_mask.mean()
    return float(1 - (1 - p_disjoint) ** k)


def hiding_bound(m: int, k: int) -> float:
    return 1 - (1 - 2.0 ** -m) ** k


def equivocation_success(flips, m: int, k: int) -> float:
    """Probability that opening ``committed ^ flips`` passes and changes the bit.

    Evaluated with the real receiver checks over all ``2**(k*m)`` erasure
    masks of a single receiver (two players).
    """
    flips = np.asarray(flips, dtype=np.uint8).reshape(k, m)
    masks = _masks(k * m).reshape(-1, k, m)
    committed = np.zeros((1, k, m), dtype=np.uint8)
    claimed = committed ^ flips
    if not _parity_consistent(claimed).all():
        return 0.0
    if claimed[0, 0].sum() % 2 == 0:
        return 0.0
    caught = opening_contradicts(masks, np.broadcast_to(committed, masks.shape),
                                 np.broadcast_to(claimed, masks.shape))
    return float(1 - caught.mean())


def binding_best(m: int, k: int) -> float:
    """Best equivocation probability over all flip patterns that change the parity."""
    odd = [f for f in _masks(m).astype(np.uint8) if f.sum() % 2 == 1]
    best = 0.0
    for combo in itertools.product(range(len(odd)), repeat=k):
        best = max(best, equivocation_success(np.stack([odd[i] for i in combo]), m, k))
    return best


# ---------------------------------------------------------------------------
# GBCX


@dataclass
class PairStore:
    """Backing storage for XOR pairs of one owner: ``pairs[p] = (left, right)``."""

    owner: int
    pairs: np.ndarray
    gbc: GbcBatch
    spent: np.ndarray


@dataclass
class Gbcx:
    """A vector of GBCX; row ``r`` uses pairs ``sel[r]`` of ``store``."""

    store: PairStore
    sel: np.ndarray

    @property
    def owner(self) -> int:
        return self.store.owner

    @property
    def ref(self) -> str:
        return self.store.gbc.ref

    def __len__(self) -> int:
        return self.sel.shape[0]

    @property
    def mx(self) -> int:
        return self.sel.shape[1]

    def rows(self, idx) -> "Gbcx":
        return Gbcx(self.store, self.sel[np.asarray(idx, dtype=np.int64).ravel()])

    @property
    def halves(self) -> np.ndarray:
        """``(L, mx, 2)`` pair bits (simulation ground truth)."""
        return self.store.pairs[self.sel]

    @property
    def values(self) -> np.ndarray:
        """Committed bits, read from the first pair of each row."""
        h = self.halves
        return (h[:, 0, 0] ^ h[:, 0, 1]).astype(np.uint8)

    @property
    def usable(self) -> bool:
        return not self.store.spent[self.sel].any()

    def describe(self) -> dict:
        return {"ref": self.ref, "owner": self.owner, "len": len(self), "pairs": self.mx}


def gbcx_commit(net: Network, owner: int, bits, params: GbcParams, npairs: int | None = None,
                rng: np.random.Generator | None = None, bad=None) -> Gbcx:
    """Commit to each bit as ``npairs`` XOR pairs (default ``params.pairs``).

    ``bad`` marks ``(row, pair)`` positions whose right half is flipped,
    which is how a cheating owner plants inconsistent pairs.
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    npairs = npairs or params.pairs
    rng = rng if rng is not None else net.player_rng(owner)
    left = rng.integers(0, 2, size=(bits.size, npairs), dtype=np.uint8)
    right = left ^ bits[:, None]
    if bad is not None:
        right = right ^ np.asarray(bad, dtype=np.uint8)
    pairs = np.stack([left, right], axis=-1).reshape(-1, 2)
    gbc = gbc_commit(net, owner, pairs.ravel(), params, rng=rng)
    store = PairStore(owner, pairs, gbc, np.zeros(len(pairs), dtype=bool))
    return Gbcx(store, np.arange(len(pairs)).reshape(bits.size, npairs))


def _open_halves(net: Network, g: Gbcx, sides, to: int | None = None, flip: bool = False) -> np.ndarray:
    """Open one half of every pair; ``sides[p]`` picks left (0) or right (1) of column ``p``."""
    sides = np.asarray(sides, dtype=np.int64)
    idx = 2 * g.sel + sides[None, :]
    bits = gbc_open(net, g.store.gbc, idx.ravel(), to=to, flip=flip)
    if to is None:
        g.store.spent[g.sel] = True
    return bits.reshape(g.sel.shape)


def gbcx_open(net: Network, g: Gbcx, to: int | None = None, flip: bool = False) -> np.ndarray:
    """Open both halves of every pair; all pairs of a row must XOR to one bit."""
    idx = np.stack([2 * g.sel, 2 * g.sel + 1], axis=-1)
    bits = gbc_open(net, g.store.gbc, idx.ravel(), to=to, flip=flip).reshape(idx.shape)
    if to is None:
        g.store.spent[g.sel] = True
    x = bits[..., 0] ^ bits[..., 1]
    agree = np.all(x == x[:, :1], axis=1)
    if not agree.all():
        who = to if to is not None else next(j for j in net.players if j != g.owner)
        net.publish(who, "COMPLAINT", {"against": g.owner, "why": "pairs disagree"}, g.ref)
        raise CheaterDetected(g.owner, "GBCX pairs open to different bits", "GBC_OPEN")
    return x[:, 0].astype(np.uint8)


# ---------------------------------------------------------------------------
# coin tossing


def active_players(net: Network) -> list[int]:
    gone = set(net.conflicts.expelled())
    return [p for p in net.players if p not in gone]


def coin_toss(net: Network, participants: Sequence[int] | None, nbits: int, params: GbcParams,
              fixed: dict | None = None) -> np.ndarray:
    """Public random bits: every participant commits to a random string, then all open.

    ``fixed`` maps a participant to the string it insists on using; the
    result stays uniform as long as one participant draws honestly.
    """
    participants = active_players(net) if participants is None else sorted(participants)
    fixed = fixed or {}
    batches = {}
    for p in participants:
        r = fixed.get(p)
        if r is None:
            r = net.player_rng(p).integers(0, 2, size=nbits, dtype=np.uint8)
        batches[p] = gbc_commit(net, p, r, params, origin="aot")
    net.next_round()
    acc = np.zeros(nbits, dtype=np.uint8)
    for p in participants:
        if net.cheat(p, "COIN"):
            net.publish(p, "COIN", {"refuse": True}, batches[p].ref)
            raise CheaterDetected(p, "refused to open a coin commitment", "COIN")
        acc ^= gbc_open(net, batches[p])
    net.publish("FUNC", "COIN", {"bits": pack_bits(acc), "from": list(participants)})
    return acc


def coin_generator(bits) -> np.random.Generator:
    """A public generator seeded by coin-tossed bits."""
    seed = int("".join(map(str, np.asarray(bits, dtype=np.uint8).tolist())) or "0", 2)
    return np.random.Generator(np.random.PCG64(seed))


def coin_permutation(net: Network, size: int, params: GbcParams) -> np.ndarray:
    return coin_generator(coin_toss(net, None, 64, params)).permutation(size)


# ---------------------------------------------------------------------------
# linear proofs


@dataclass
class LinearProof:
    """Public record of one cut-and-choose proof that ``A x = const``."""

    relation: str
    matrix: np.ndarray
    const: np.ndarray
    announced: np.ndarray
    challenges: np.ndarray
    openings: np.ndarray
    verdict: bool


def check_linear_openings(A, const, announced, challenges, openings) -> np.ndarray:
    """Per pair column: is the opened half consistent with the announcement?

    Parameters
    ----------
    A : (R, M) matrix, const : (R,)
    announced : (R, P) values ``A . left_p`` claimed by the prover
    challenges : (..., P) 0 = left halves opened, 1 = right halves
    openings : (..., M, P) opened half bits

    Leading axes of ``challenges`` and ``openings`` are batch axes.
    """
    A = np.asarray(A, dtype=np.int64)
    lhs = np.matmul(A, np.asarray(openings, dtype=np.int64)) % 2
    ch = np.asarray(challenges, dtype=np.int64)[..., None, :]
    expect = np.asarray(announced, dtype=np.int64) ^ (ch * np.asarray(const, dtype=np.int64)[:, None])
    return np.all(lhs == expect, axis=-2)


def prove_linear(net: Network, prover: int, operands: Sequence[Gbcx], A, const, params: GbcParams,
                 relation: str = "xor", cheat: bool = False) -> LinearProof:
    """Prove ``A . concat(operands) = const`` over committed bits; destroys the operands.

    Raises
    ------
    CheaterDetected
        If any opened column disagrees with the prover's announcement.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.uint8))
    const = np.asarray(const, dtype=np.uint8).ravel()
    sizes = [len(o) for o in operands]
    if A.shape != (const.size, sum(sizes)):
        raise ValueError(f"relation matrix {A.shape} does not match operands {sizes} / const {const.size}")
    mxs = {o.mx for o in operands}
    if len(mxs) != 1:
        raise ValueError("operands must have the same number of pairs")
    for o in operands:
        if o.owner != prover:
            raise ValueError(f"P{prover} cannot prove statements about P{o.owner}'s commitments")
        if not o.usable:
            raise ValueError(f"commitment {o.ref} was already destroyed by a proof")
    mx = mxs.pop()
    left = np.concatenate([o.halves[..., 0] for o in operands], axis=0)
    announced = (A.astype(np.int64) @ left) % 2
    if cheat:
        announced[0] ^= 1
    net.publish(prover, "PROOF", {"stage": "claim", "relation": relation, "A": pack_bits(A),
                                  "const": pack_bits(const), "e": pack_bits(announced),
                                  "operands": [o.describe() for o in operands]})
    challenges = coin_toss(net, None, mx, params)
    opened = np.concatenate([_open_halves(net, o, challenges) for o in operands], axis=0)
    ok = check_linear_openings(A, const, announced, challenges, opened)
    verdict = bool(ok.all())
    net.publish("FUNC", "PROOF", {"stage": "verdict", "relation": relation, "prover": prover,
                                  "challenges": pack_bits(challenges), "openings": pack_bits(opened),
                                  "ok": verdict})
    if not verdict:
        raise CheaterDetected(prover, f"{relation} proof failed", "PROOF")
    return LinearProof(relation, A, const, announced, challenges, opened, verdict)


def proof_escape_exhaustive(mx: int, rng: np.random.Generator | None = None) -> float:
    """Best escape probability of a false equality proof, by full enumeration.

    The prover is committed to ``b=0`` and ``c=1`` and claims ``b = c``.
    Every announcement vector and every challenge vector is enumerated and
    checked with :func:`check_linear_openings`.
    """
    if not 1 <= mx <= 10:
        raise ValueError("enumeration limited to 1 <= m_x <= 10")
    rng = rng or np.random.default_rng(0)
    bl = rng.integers(0, 2, mx, dtype=np.uint8)
    cl = rng.integers(0, 2, mx, dtype=np.uint8)
    halves = np.stack([np.stack([bl, bl]), np.stack([cl, cl ^ 1])])  # (operand, side, pair)
    A = np.array([[1, 1]], dtype=np.uint8)
    const = np.array([0], dtype=np.uint8)
    vecs = ((np.arange(1 << mx)[:, None] >> np.arange(mx)) & 1).astype(np.uint8)
    opened = np.where(vecs[:, None, :] == 0, halves[None, :, 0], halves[None, :, 1])
    best = 0.0
    for e in vecs:
        passed = check_linear_openings(A, const, e[None, :], vecs, opened).all(axis=-1)
        best = max(best, float(passed.mean()))
    return best


def commit_proven(net: Network, owner: int, values, operands: Sequence[Gbcx], A_ops, A_new, const,
                  params: GbcParams, relation: str = "xor", cheat: bool = False) -> Gbcx:
    """Commit to ``values`` and prove ``A_ops . ops + A_new . new = const``.

    The new commitment is created with ``2 m_x`` pairs; a coin toss splits
    them, one half is consumed by the proof and the other is returned.
    """
    values = np.asarray(values, dtype=np.uint8).ravel()
    mx = operands[0].mx if operands else params.pairs
    fresh = gbcx_commit(net, owner, values, params, npairs=2 * mx)
    perm = coin_permutation(net, 2 * mx, params)
    used, kept = Gbcx(fresh.store, fresh.sel[:, perm[:mx]]), Gbcx(fresh.store, fresh.sel[:, perm[mx:]])
    A_new = np.atleast_2d(np.asarray(A_new, dtype=np.uint8))
    if operands:
        A = np.concatenate([np.atleast_2d(np.asarray(A_ops, dtype=np.uint8)), A_new], axis=1)
    else:
        A = A_new
    prove_linear(net, owner, list(operands) + [used], A, const, params, relation, cheat)
    return kept


def gbcx_copy(net: Network, g: Gbcx, params: GbcParams) -> tuple[Gbcx, Gbcx]:
    """Two fresh GBCX for the same bits as ``g``; ``g`` is destroyed.

    The owner commits ``3 m_x`` pairs per bit, a coin toss partitions them
    into three groups, and the first group is proven equal to ``g``.
    """
    owner, mx, L = g.owner, g.mx, len(g)
    bad = None
    script = net.cheat(owner, "COPY")
    if script is not None:
        frac = float(script.params.get("fraction", 1.0))
        crng = net.rng_stream(f"player/{owner}/cheat")
        bad = (crng.random((L, 3 * mx)) < frac).astype(np.uint8)
    fresh = gbcx_commit(net, owner, g.values, params, npairs=3 * mx, bad=bad)
    net.publish(owner, "COPY", {"source": g.ref, "fresh": fresh.ref, "pairs": 3 * mx})
    perm = coin_permutation(net, 3 * mx, params)
    groups = [Gbcx(fresh.store, fresh.sel[:, perm[i * mx:(i + 1) * mx]]) for i in range(3)]
    eye = np.eye(L, dtype=np.uint8)
    prove_linear(net, owner, [groups[0], g], np.concatenate([eye, eye], axis=1),
                 np.zeros(L, dtype=np.uint8), params, "copy-equality")
    return groups[1], groups[2]


def replicate(net: Network, g: Gbcx, count: int, params: GbcParams) -> list[Gbcx]:
    """``count`` commitments to the bits of ``g`` by repeated copying."""
    if count < 1:
        raise ValueError("count must be positive")
    out = [g]
    while len(out) < count:
        a, b = gbcx_copy(net, out.pop(), params)
        out.extend([a, b])
    return out


# ---------------------------------------------------------------------------
# distributed bit commitments


@dataclass
class Dbc:
    """One GBCX share per player; the shares XOR to the committed bit."""

    shares: dict
    role: str = "intermediate"
    owner: int | None = None

    @property
    def value(self) -> int:
        """Committed bit (simulation ground truth)."""
        v = 0
        for g in self.shares.values():
            v ^= int(g.values[0])
        return v


def dbc_create_user(net: Network, owner: int, b: int, params: GbcParams) -> Dbc:
    """Distributed commitment of ``owner`` to ``b``.

    Every other player commits to a random share and opens it privately to
    the owner.  If the owner complains, the helper opens publicly; the
    public value is then re-committed with a proof so the share survives.
    The owner's own share completes the parity.
    """
    shares = {}
    acc = int(b) & 1
    for j in active_players(net):
        if j == owner:
            continue
        s = int(net.player_rng(j).integers(0, 2))
        g = gbcx_commit(net, j, [s], params)
        script = net.cheat(j, "DBC_HELPER")
        action = script.action if script is not None else None
        persist = bool(script.params.get("persist", True)) if script is not None else False
        try:
            if action == "withhold":
                raise CheaterDetected(j, "no private opening")
            s_seen = int(gbcx_open(net, g, to=owner, flip=action == "flip-bits")[0])
        except CheaterDetected:
            net.publish(owner, "COMPLAINT", {"against": j, "why": "private opening"}, g.ref)
            if persist and action == "withhold":
                net.publish(j, "DBC", {"refuse": True}, g.ref)
                raise CheaterDetected(j, "refused to open a share publicly", "DBC_HELPER")
            s_seen = int(gbcx_open(net, g, flip=persist and action == "flip-bits")[0])
            g = commit_proven(net, j, [s_seen], [], None, [[1]], [s_seen], params, "public-share")
        shares[j] = g
        acc ^= s_seen
    shares[owner] = gbcx_commit(net, owner, [acc], params)
    shares = dict(sorted(shares.items()))
    net.publish(owner, "DBC", {"owner": owner, "shares": {p: g.ref for p, g in shares.items()}})
    return Dbc(shares, "user", owner)


# ---------------------------------------------------------------------------
# anonymous creation and conflict split


def conflict_split(net: Network, failed: Sequence[int]) -> GroupSplit | Success:
    """Split the players after an anonymous setup that left conflicts.

    The pivot is the lowest player that failed to obtain its clean
    commitments (or the most accused player if none failed).  Its block
    holds every player with the pivot's conflict set; the rest form the
    other block.
    """
    g = net.conflicts
    if not g:
        return Success(None)
    if failed:
        pivot = min(failed)
    else:
        pivot = max(g.players, key=lambda p: (g.degree(p), -p))
    blocks = partition_by_conflicts(g)
    mine = next(b for b in blocks if pivot in b)
    rest = frozenset(g.players) - mine
    out = tuple(b for b in (mine, rest) if b)
    return GroupSplit(tuple(sorted(out, key=min)))


def anonymous_setup(net: Network, params: GbcParams, bparams=None, l: int | None = None,
                    max_rounds: int | None = None):
    """Every player creates ``l`` anonymous GBCX that survive a test opening.

    Test openings travel over anonymous broadcast with later
    identification.  A receiver whose delivered bits contradict an opening
    complains; the owner identifies itself and the two are put in
    conflict.  A player left in conflict with everyone else is named;
    otherwise, if some player never obtained ``l`` clean commitments, the
    players are split.  Returns ``Success(clean counts)``,
    :class:`CheaterIdentified` or :class:`GroupSplit`.
    """
    from .broadcast import BroadcastParams, anonymous_broadcast_identifiable, identify_sender

    bparams = bparams or BroadcastParams()
    l = l or params.setup_l or net.n
    max_rounds = max_rounds or 2 * l + 2
    clean = {p: 0 for p in net.players}
    for _ in range(max_rounds):
        todo = [p for p in active_players(net) if clean[p] < l]
        if not todo:
            break
        for p in todo:
            net.next_round()
            rng = net.player_rng(p)
            g = gbcx_commit(net, p, [int(rng.integers(0, 2))], params)
            batch = g.store.gbc
            claimed = batch.strings.copy()
            script = net.cheat(p, "GBC_SETUP")
            if script is not None and script.action == "flip-bits":
                target = int(script.params.get("target", min(q for q in net.players if q != p)))
                claimed[:, target, :, 0] ^= 1
            others = [q for q in net.players if q != p]
            msg = claimed[:, others].ravel()
            handle = anonymous_broadcast_identifiable(net, p, msg, bparams)
            if handle is None:
                continue
            got = np.asarray(handle.msg, dtype=np.uint8).reshape(claimed[:, others].shape)
            complainers = []
            for col, q in enumerate(others):
                bad = opening_contradicts(batch.known[:, q], batch.strings[:, q], got[:, col]).any()
                s = net.cheat(q, "GBC_SETUP")
                if bad or (s is not None and s.action == "false-complain"):
                    complainers.append(q)
                    net.publish(q, "COMPLAINT", {"setup": handle.ref}, handle.ref)
            if complainers:
                identify_sender(net, handle, p)
                for q in complainers:
                    net.conflicts.add(p, q)
                    net.publish("FUNC", "CONFLICT", {"a": p, "b": q, "where": "setup"}, handle.ref)
            else:
                clean[p] += 1
            g.store.spent[:] = True
    failed = [p for p in net.players if clean[p] < l]
    net.publish("FUNC", "SETUP", {"clean": clean, "failed": failed})
    isolated = net.conflicts.expelled()
    if len(isolated) == 1 and net.n > 2:
        return CheaterIdentified(isolated[0], "in conflict with every other player", "GBC_SETUP")
    if not failed:
        return Success(clean)
    return conflict_split(net, failed)


__all__ = [
    "GbcParams", "GbcBatch", "gbc_commit", "gbc_open", "parity_strings", "opening_contradicts",
    "string_view_distance", "hiding_distance", "hiding_bound", "equivocation_success", "binding_best",
    "PairStore", "Gbcx", "gbcx_commit", "gbcx_open", "coin_toss", "coin_generator", "coin_permutation",
    "LinearProof", "check_linear_openings", "prove_linear", "proof_escape_exhaustive", "commit_proven",
    "gbcx_copy", "replicate", "Dbc", "dbc_create_user", "conflict_split", "anonymous_setup",
    "active_players",
]
