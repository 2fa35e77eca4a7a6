"""Broadcast channels built from AOT.

* :func:`anonymous_send` sends a bit string over AOT with ``r``-fold
  repetition; the receiver asks for a resend until every bit arrived.
* :func:`authenticated_broadcast` lets every player send the sender
  one-time MAC keys anonymously.  The sender tags its message under all
  keys it received and sends message and tags to everyone, and the
  players cross-check.  Since the sender cannot tell whose keys it holds,
  it cannot make a message look valid to some players only.
* :func:`anonymous_broadcast` routes a message through a relay, which
  publishes it; a misbehaving relay is denounced and replaced.
* :func:`anonymous_broadcast_identifiable` additionally tags the message
  with one anonymously delivered key per player, so the true sender can
  later prove authorship with :func:`identify_sender`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Aborted,
    CheaterIdentified,
    ProtocolAborted,
    Success,
    pack_bits,
)
from .mac import AuthKey, auth, int_to_bits, verify
from .simnet import Network


@dataclass(frozen=True)
class BroadcastParams:
    """Parameters of the AOT-based channels.

    Attributes
    ----------
    l : int
        Keys each player sends the broadcaster per attempt.
    r : int
        Repetition factor of anonymous transfers (per-bit loss ``2**-r``).
    cheat_threshold : float
        Expel the broadcaster once ``1 - 2**-evidence`` exceeds this.
    f : int
        MAC field degree.
    patience : int
        Attempts with an unchanged set of complainers before they are blamed.
    max_attempts, max_resends : int
        Bounds that keep every run finite.
    """

    l: int = 2
    r: int = 8
    cheat_threshold: float = 0.99
    f: int = 32
    patience: int = 3
    max_attempts: int = 32
    max_resends: int = 16

    def __post_init__(self):
        if self.l < 1 or self.r < 1:
            raise ValueError("need l >= 1 and r >= 1")
        if not 0 < self.cheat_threshold < 1:
            raise ValueError("cheat_threshold must lie strictly between 0 and 1")


def anonymous_send(net: Network, sender: int, receiver: int, msg, params: BroadcastParams,
                   kind: str = "ANON_SEND", ref: str = "") -> np.ndarray:
    """Deliver ``msg`` to ``receiver`` without revealing the sender.

    Raises
    ------
    ProtocolAborted
        After ``max_resends`` attempts that each lost some bit.
    """
    msg = np.asarray(msg, dtype=np.uint8).ravel()
    ref = ref or net.fresh_id("a")
    r = params.r
    for attempt in range(params.max_resends):
        d = net.aot_send(sender, receiver, np.repeat(msg, r), kind=kind, ref=ref)
        known = d.known.reshape(-1, r)
        if known.all(axis=1).size == 0 or known.any(axis=1).all():
            return d.values.reshape(-1, r).max(axis=1, initial=0).astype(np.uint8)
        net.publish(receiver, "COMPLAINT", {"resend": attempt + 1}, ref)
    raise ProtocolAborted(f"anonymous transfer {ref} lost bits {params.max_resends} times")


def authenticated_broadcast(net: Network, sender: int, msg, params: BroadcastParams):
    """Broadcast ``msg`` so that all honest players agree or a cheater is named.

    Returns
    -------
    Success
        ``result = {"msg": bits, "attempts": a}``.
    CheaterIdentified
        The broadcaster after conflicts with everyone or enough evidence of
        equivocation; a complainer after ``patience`` identical complaints.
    Aborted
        If ``max_attempts`` pass without a decision.
    """
    msg = np.asarray(msg, dtype=np.uint8).ravel()
    others = [j for j in net.players if j != sender]
    ref = net.fresh_id("b")
    evidence = 0
    history: list[frozenset] = []
    for attempt in range(1, params.max_attempts + 1):
        net.next_round()
        keys = {j: [AuthKey.random(net.player_rng(j), params.f) for _ in range(params.l)] for j in others}
        held = []
        for j in others:
            for key in keys[j]:
                got = anonymous_send(net, j, sender, key.to_bits(), params, ref=ref)
                held.append(AuthKey.from_bits(got, params.f))
        script = net.cheat(sender, "AUTH_BCAST")
        action = script.action if script is not None else None
        direct = {}
        for pos, j in enumerate(others):
            if action == "withhold":
                direct[j] = None
                continue
            m_j = msg.copy()
            if action == "equivocate" and pos % 2 == 1 and m_j.size:
                m_j[0] ^= 1
            tags = sorted(auth(m_j, k) for k in held)
            net.send(sender, j, "AUTH_BCAST", {"msg": pack_bits(m_j), "tags": tags}, ref)
            direct[j] = (m_j, tags)
        presented = {}
        for j in others:
            s = net.cheat(j, "AUTH_BCAST")
            if s is not None and s.action == "false-complain":
                frng = net.rng_stream(f"player/{j}/cheat")
                fake = msg ^ 1
                tags = sorted(int(t) for t in frng.integers(0, 1 << params.f, len(held), dtype=np.uint64))
                presented[j] = (fake, tags)
            else:
                presented[j] = direct[j]
            body = {"msg": None, "tags": []} if presented[j] is None else \
                {"msg": pack_bits(presented[j][0]), "tags": presented[j][1]}
            for q in others:
                if q != j:
                    net.send(j, q, "P2P", {"fwd": body}, ref)

        def own_valid(j):
            p = presented[j]
            return p is not None and all(auth(p[0], k) in set(p[1]) for k in keys[j])

        msgs = {None if p is None else p[0].tobytes() for p in presented.values()}
        if len(msgs) == 1 and all(own_valid(j) for j in others):
            net.publish("FUNC", "AUTH_BCAST", {"sender": sender, "attempts": attempt, "ok": True}, ref)
            return Success({"msg": msg, "attempts": attempt})

        # dispute: burn this attempt's keys so every claim becomes publicly checkable
        for j in others:
            net.publish(j, "KEY_REVEAL", {"keys": [[k.a, k.b] for k in keys[j]]}, ref)
        authentic, complainers = set(), set()
        for j, p in presented.items():
            ok = p is not None and all(auth(p[0], k) in set(p[1])
                                       for q in others if q != j for k in keys[q])
            if ok:
                authentic.add(p[0].tobytes())
            else:
                complainers.add(j)
        evidence += max(0, len(authentic) - 1)
        for j in sorted(complainers):
            net.conflicts.add(sender, j)
            net.publish("FUNC", "CONFLICT", {"a": sender, "b": j, "where": "auth-broadcast"}, ref)
        net.publish("FUNC", "AUTH_BCAST", {"sender": sender, "attempts": attempt, "ok": False,
                                           "evidence": evidence, "complainers": sorted(complainers)}, ref)
        if 1 - 2.0 ** -evidence > params.cheat_threshold:
            return CheaterIdentified(sender, f"{evidence} conflicting authenticated messages", "AUTH_BCAST")
        if set(others) <= net.conflicts.conflicts_of(sender):
            return CheaterIdentified(sender, "in conflict with every other player", "AUTH_BCAST")
        history.append(frozenset(complainers))
        recent = history[-params.patience:]
        if complainers and len(recent) == params.patience and len(set(recent)) == 1:
            return CheaterIdentified(min(complainers), "always the same complainers", "AUTH_BCAST")
    return Aborted(f"authenticated broadcast undecided after {params.max_attempts} attempts")


def anonymous_broadcast(net: Network, sender: int, msg, params: BroadcastParams,
                        rng: np.random.Generator | None = None, order=None):
    """Publish ``msg`` through a relay without revealing the sender.

    The sender tries relays in a private random order, skipping players it
    is in conflict with.  A relay that publishes something else is
    denounced over :func:`authenticated_broadcast` and the next relay is
    tried; after all relays failed the sender leaves.

    Returns
    -------
    Success
        ``result = {"msg", "relay", "failures"}``.
    CheaterIdentified or Aborted
        From a failed complaint, or ``Aborted("sender expelled")``.
    """
    msg = np.asarray(msg, dtype=np.uint8).ravel()
    rng = rng if rng is not None else net.player_rng(sender)
    order = list(order) if order is not None else [int(p) for p in rng.permutation(net.n)]
    ref = net.fresh_id("ab")
    failures = 0
    for relay in order:
        if relay == sender or net.conflicts.has(sender, relay):
            continue
        net.next_round()
        try:
            got = anonymous_send(net, sender, relay, msg, params, ref=ref)
        except ProtocolAborted as exc:
            return exc.outcome()
        if net.cheat(relay, "ANON_BCAST"):
            got = got ^ 1
        net.publish(relay, "ANON_BCAST", {"msg": pack_bits(got)}, ref)
        if np.array_equal(got, msg):
            return Success({"msg": got, "relay": relay, "failures": failures})
        failures += 1
        out = authenticated_broadcast(net, sender, int_to_bits(relay, 16), params)
        if not isinstance(out, Success):
            return out
        net.conflicts.add(sender, relay)
        net.publish("FUNC", "CONFLICT", {"a": sender, "b": relay, "where": "relay"}, ref)
    net.publish("FUNC", "ANON_BCAST", {"expelled": sender, "failures": failures}, ref)
    return Aborted("sender expelled")


@dataclass
class AnonymousHandle:
    """State of an identifiable anonymous broadcast.

    ``held[j]`` is the key player ``j`` received anonymously; the true
    sender's own copy of the keys is kept apart in ``_sender_keys``.
    """

    ref: str
    msg: np.ndarray
    tags: list
    held: dict
    outcome: object
    _sender: int = field(repr=False, default=-1)
    _sender_keys: dict = field(repr=False, default_factory=dict)


class IdentificationRejected(Exception):
    pass


def _id_message(claimant: int, ref: str) -> np.ndarray:
    digits = int("".join(ch for ch in ref if ch.isdigit()) or "0")
    return np.concatenate([int_to_bits(claimant, 16), int_to_bits(digits, 32)])


def anonymous_broadcast_identifiable(net: Network, sender: int, msg, params: BroadcastParams,
                                     rng: np.random.Generator | None = None, order=None):
    """Anonymous broadcast of ``msg`` plus one tag per player for later identification.

    Returns ``None`` if the underlying broadcast did not succeed.
    """
    msg = np.asarray(msg, dtype=np.uint8).ravel()
    rng = rng if rng is not None else net.player_rng(sender)
    ref = net.fresh_id("id")
    others = [j for j in net.players if j != sender]
    keys = {j: AuthKey.random(rng, params.f) for j in others}
    held = {}
    for j in others:
        held[j] = AuthKey.from_bits(anonymous_send(net, sender, j, keys[j].to_bits(), params, ref=ref), params.f)
    tags = [auth(msg, keys[j]) for j in others]
    envelope = np.concatenate([msg] + [int_to_bits(t, params.f) for t in tags])
    out = anonymous_broadcast(net, sender, envelope, params, rng=rng, order=order)
    if not isinstance(out, Success):
        return None
    got = out.result["msg"]
    return AnonymousHandle(ref, got[:msg.size], tags, held, out, sender, keys)


def identify_sender(net: Network, handle: AnonymousHandle, claimant: int,
                    rng: np.random.Generator | None = None) -> int:
    """``claimant`` proves it sent ``handle``'s message; returns it if accepted.

    The claimant tags an identification message under each player's key.
    Only the true sender knows the keys of the other players; anyone else
    has to guess those tags.

    Raises
    ------
    IdentificationRejected
        If some verifier's tag does not check.
    """
    id_msg = _id_message(claimant, handle.ref)
    verifiers = [j for j in net.players if j != claimant]
    if claimant == handle._sender:
        tags = {j: auth(id_msg, handle._sender_keys[j]) for j in verifiers}
    else:
        rng = rng if rng is not None else net.rng_stream(f"player/{claimant}/cheat")
        f = next(iter(handle.held.values())).f
        tags = {j: int(rng.integers(0, 1 << f, dtype=np.uint64)) for j in verifiers}
    net.publish(claimant, "IDENTIFY", {"tags": {str(j): t for j, t in tags.items()}}, handle.ref)
    accepted = all(j in handle.held and verify(id_msg, tags[j], handle.held[j]) for j in verifiers)
    if not accepted:
        raise IdentificationRejected(f"P{claimant} could not prove authorship of {handle.ref}")
    return claimant


def forgery_rate(trials: int, f: int = 8, msg_bits: int = 16, seed: int = 0) -> float:
    """Monte Carlo rate at which a guessed tag for a new message verifies.

    The forger sees one valid (message, tag) pair and submits the best
    generic guess for a different message of the same length.
    """
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        key = AuthKey.random(rng, f)
        m1 = rng.integers(0, 2, msg_bits, dtype=np.uint8)
        m2 = m1.copy()
        m2[rng.integers(msg_bits)] ^= 1
        seen = auth(m1, key)
        hits += verify(m2, seen, key)
    return hits / trials


__all__ = [
    "BroadcastParams", "anonymous_send", "authenticated_broadcast", "anonymous_broadcast",
    "AnonymousHandle", "IdentificationRejected", "anonymous_broadcast_identifiable",
    "identify_sender", "forgery_rate",
]
