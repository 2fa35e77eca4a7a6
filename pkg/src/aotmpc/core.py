"""Players, adversary structures, conflict bookkeeping, outcomes and the transcript.

Every protocol in the package writes into a single append-only
:class:`Transcript`.  Each event carries a visibility set, so any player's
view (and the view of an outside observer) can be reconstructed after the
fact and compared between runs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

ANON = "ANON"
FUNC = "FUNC"
OBSERVER = "OBS"

#: Base event kinds.  A kind may carry a ``#ref`` suffix naming the object
#: it belongs to (``GBC_OPEN#g17``).
EVENT_KINDS = frozenset(
    {
        "HEADER",
        "OUTCOME",
        "AOT",
        "OB",
        "P2P",
        "PUBLISH",
        "AUTH_BCAST",
        "ANON_SEND",
        "ANON_BCAST",
        "COMPLAINT",
        "IDENTIFY",
        "KEY_REVEAL",
        "GBC_COMMIT",
        "GBC_OPEN",
        "PROOF",
        "COPY",
        "COIN",
        "DBC",
        "SETUP",
        "UOT",
        "OT12",
        "CONFLICT",
        "VERDICT",
        "GATE",
        "REVEAL",
    }
    | {f"GCOT_STEP{i}" for i in range(1, 10)}
)


# ---------------------------------------------------------------------------
# adversary structures


class AdversaryStructure:
    """A monotone family of player subsets (the tolerable collusions)."""

    def __init__(self, sets: Iterable[Iterable[int]], players: Iterable[int]):
        self.players = frozenset(players)
        self.sets = frozenset(frozenset(s) for s in sets)
        for s in self.sets:
            if not s <= self.players:
                raise ValueError(f"collusion {sorted(s)} is not a subset of the players")
            if s == self.players:
                raise ValueError("the full player set cannot be a tolerable collusion")
        for s in self.sets:
            for r in range(len(s)):
                for sub in itertools.combinations(sorted(s), r):
                    if frozenset(sub) not in self.sets:
                        raise ValueError("adversary structure is not monotone")

    def __contains__(self, collusion: Iterable[int]) -> bool:
        return frozenset(collusion) in self.sets

    def __iter__(self) -> Iterator[frozenset]:
        return iter(sorted(self.sets, key=lambda s: (len(s), sorted(s))))

    def __len__(self) -> int:
        return len(self.sets)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdversaryStructure):
            return NotImplemented
        return self.sets == other.sets and self.players == other.players

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in self.maximal())
        return f"AdversaryStructure(max=[{body}], players={sorted(self.players)})"

    def maximal(self) -> list[frozenset]:
        """Members not strictly contained in another member."""
        return [s for s in self if not any(s < t for t in self.sets)]


def monotone_close(sets: Iterable[Iterable[int]], players: Iterable[int]) -> AdversaryStructure:
    """Smallest monotone family containing every set in ``sets``.

    The empty collusion is always a member.

    >>> sorted(map(sorted, monotone_close([{1, 2}], {1, 2, 3})))
    [[], [1], [1, 2], [2]]
    """
    players = frozenset(players)
    closed = {frozenset()}
    for s in sets:
        s = frozenset(s)
        if not s <= players:
            raise ValueError(f"collusion {sorted(s)} is not a subset of the players")
        if s == players:
            raise ValueError("the full player set cannot be a tolerable collusion")
        members = sorted(s)
        for r in range(len(members) + 1):
            closed.update(frozenset(c) for c in itertools.combinations(members, r))
    return AdversaryStructure(closed, players)


def two_cover_check(structure: AdversaryStructure, players: Iterable[int]) -> bool:
    """Decide whether robust computation over pairwise OT plus broadcast is possible.

    True iff there are only two players, or no two collusions of the
    structure together cover all players but one.
    """
    players = frozenset(players)
    if len(players) < 2:
        raise ValueError("need at least two players")
    if len(players) == 2:
        return True
    maximal = structure.maximal()
    for p in players:
        rest = players - {p}
        for a, b in itertools.combinations_with_replacement(maximal, 2):
            if rest <= (a | b):
                return False
    return True


# ---------------------------------------------------------------------------
# conflicts


class ConflictGraph:
    """Symmetric, irreflexive accusation relation between players."""

    def __init__(self, players: Iterable[int]):
        self.players = tuple(sorted(players))
        self._adj: dict[int, set[int]] = {p: set() for p in self.players}

    def add(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("a player cannot be in conflict with itself")
        self._adj[a].add(b)
        self._adj[b].add(a)

    def conflicts_of(self, p: int) -> frozenset:
        return frozenset(self._adj[p])

    def has(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def edges(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a in self._adj for b in self._adj[a] if a < b)

    def __len__(self) -> int:
        return len(self.edges())

    def __bool__(self) -> bool:
        return any(self._adj.values())

    def expelled(self) -> list[int]:
        """Players in conflict with every other player."""
        everyone = set(self.players)
        return [p for p in self.players if self._adj[p] == everyone - {p}]

    def degree(self, p: int) -> int:
        return len(self._adj[p])


def partition_by_conflicts(graph: ConflictGraph, players: Iterable[int] | None = None) -> list[frozenset]:
    """Group players whose conflict sets are identical.

    Blocks are returned ordered by their smallest member.
    """
    players = sorted(graph.players if players is None else players)
    groups: dict[frozenset, list[int]] = {}
    for p in players:
        groups.setdefault(graph.conflicts_of(p), []).append(p)
    return sorted((frozenset(g) for g in groups.values()), key=min)


# ---------------------------------------------------------------------------
# outcomes


@dataclass(frozen=True)
class Success:
    result: Any = None


@dataclass(frozen=True)
class CheaterIdentified:
    culprit: int
    reason: str = ""
    hook: str = ""


@dataclass(frozen=True)
class GroupSplit:
    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if seen & b:
                raise ValueError("group split blocks must be disjoint")
            seen |= b

    def block_of(self, p: int) -> frozenset:
        for b in self.blocks:
            if p in b:
                return b
        raise KeyError(p)


@dataclass(frozen=True)
class Aborted:
    reason: str


ProtocolOutcome = Success | CheaterIdentified | GroupSplit | Aborted


class CheaterDetected(Exception):
    """Raised inside a protocol as soon as a deviation is publicly attributable."""

    def __init__(self, culprit: int, reason: str, hook: str = ""):
        super().__init__(f"P{culprit}: {reason}")
        self.culprit = culprit
        self.reason = reason
        self.hook = hook

    def outcome(self) -> CheaterIdentified:
        return CheaterIdentified(self.culprit, self.reason, self.hook)


class ProtocolAborted(Exception):
    """Raised when a protocol gives up without attributing blame."""

    def outcome(self) -> Aborted:
        return Aborted(str(self))


def outcome_to_payload(outcome: ProtocolOutcome) -> dict:
    if isinstance(outcome, Success):
        return {"variant": "Success", "result": _jsonable(outcome.result)}
    if isinstance(outcome, CheaterIdentified):
        return {"variant": "CheaterIdentified", "culprit": outcome.culprit,
                "reason": outcome.reason, "hook": outcome.hook}
    if isinstance(outcome, GroupSplit):
        return {"variant": "GroupSplit", "blocks": [sorted(b) for b in outcome.blocks]}
    return {"variant": "Aborted", "reason": outcome.reason}


def outcome_from_payload(payload: dict) -> ProtocolOutcome:
    v = payload["variant"]
    if v == "Success":
        return Success(payload.get("result"))
    if v == "CheaterIdentified":
        return CheaterIdentified(payload["culprit"], payload.get("reason", ""), payload.get("hook", ""))
    if v == "GroupSplit":
        return GroupSplit(tuple(frozenset(b) for b in payload["blocks"]))
    return Aborted(payload.get("reason", ""))


# ---------------------------------------------------------------------------
# transcript


def pack_bits(bits) -> str:
    """Encode a 0/1 array as ``"<shape>:<hex>"`` (shape as x-separated dims)."""
    a = np.asarray(bits, dtype=np.uint8)
    shape = "x".join(map(str, a.shape))
    return f"{shape}:{np.packbits(a.ravel()).tobytes().hex()}"


def unpack_bits(text: str) -> np.ndarray:
    shape_s, hexs = text.split(":")
    shape = tuple(int(s) for s in shape_s.split("x")) if shape_s else ()
    size = int(np.prod(shape)) if shape else 1
    raw = np.frombuffer(bytes.fromhex(hexs), dtype=np.uint8)
    return np.unpackbits(raw)[:size].reshape(shape)


def _jsonable(x: Any) -> Any:
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    return x


def _actor_token(actor: int | str) -> str:
    return f"P{actor}" if isinstance(actor, (int, np.integer)) else str(actor)


def _parse_actor(token: str) -> int | str:
    return int(token[1:]) if token.startswith("P") else token


class EventRecord(NamedTuple):
    round: int
    actor: int | str
    kind: str
    payload: dict
    visibility: frozenset
    ref: str = ""

    @property
    def base_kind(self) -> str:
        return self.kind

    def line(self) -> str:
        """``round|actor|kind|hex-payload|visibility-csv``."""
        kind = f"{self.kind}#{self.ref}" if self.ref else self.kind
        body = json.dumps(self.payload, sort_keys=True, separators=(",", ":")).encode()
        vis = ",".join(_actor_token(v) for v in sorted(self.visibility, key=_vis_key))
        return f"{self.round}|{_actor_token(self.actor)}|{kind}|{body.hex()}|{vis}"

    @classmethod
    def from_line(cls, line: str) -> "EventRecord":
        rnd, actor, kind, body, vis = line.rstrip("\n").split("|")
        ref = ""
        if "#" in kind:
            kind, ref = kind.split("#", 1)
        payload = json.loads(bytes.fromhex(body).decode()) if body else {}
        visibility = frozenset(_parse_actor(v) for v in vis.split(",") if v)
        return cls(int(rnd), _parse_actor(actor), kind, payload, visibility, ref)


def _vis_key(v: int | str) -> tuple:
    return (0, v, "") if isinstance(v, (int, np.integer)) else (1, 0, str(v))


class Transcript:
    """Append-only event log shared by every protocol of one run."""

    def __init__(self, players: Sequence[int]):
        self.players = tuple(players)
        self.everyone = frozenset(self.players) | {OBSERVER}
        self._events: list[EventRecord] = []

    def record(self, round: int, actor: int | str, kind: str, payload: dict,
               visibility: Iterable[int | str], ref: str = "") -> EventRecord:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        vis = frozenset(visibility)
        if not vis <= self.everyone:
            raise ValueError(f"visibility {sorted(map(str, vis))} outside players and observer")
        ev = EventRecord(round, actor, kind, _jsonable(payload), vis, ref)
        self._events.append(ev)
        return ev

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self._events)

    def __getitem__(self, i):
        return self._events[i]

    def of_kind(self, kind: str) -> list[EventRecord]:
        return [e for e in self._events if e.kind == kind]

    def visible_to(self, who: int | str) -> list[EventRecord]:
        return [e for e in self._events if who in e.visibility]

    def view(self, who: int | str) -> str:
        """Serialized events visible to ``who``; used for coupling comparisons."""
        return "\n".join(e.line() for e in self._events if who in e.visibility)

    def dumps(self) -> str:
        return "".join(e.line() + "\n" for e in self._events)

    @classmethod
    def loads(cls, text: str, players: Sequence[int] | None = None) -> "Transcript":
        events = [EventRecord.from_line(l) for l in text.splitlines() if l.strip()]
        if players is None:
            ps: set[int] = set()
            for e in events:
                ps.update(v for v in e.visibility if isinstance(v, int))
            players = sorted(ps)
        t = cls(players)
        t._events = events
        return t

    def outcome(self) -> ProtocolOutcome | None:
        outs = self.of_kind("OUTCOME")
        return outcome_from_payload(outs[-1].payload) if outs else None


@dataclass
class CheatScript:
    """One scripted deviation: ``actor`` performs ``action`` whenever ``hook`` fires."""

    actor: int
    hook: str
    action: str
    params: dict = field(default_factory=dict)


CHEAT_HOOKS = frozenset(
    {"AUTH_BCAST", "ANON_BCAST", "GBC_SETUP", "GBC_OPEN", "COPY", "COIN", "DBC_HELPER", "REVEAL"}
    | {f"GCOT_STEP{i}" for i in range(2, 10)}
)
CHEAT_ACTIONS = frozenset({"flip-bits", "equivocate", "withhold", "false-complain", "bad-relay"})

#: (hook, action) pairs the protocols react to.
SUPPORTED_CHEATS = frozenset(
    {
        ("AUTH_BCAST", "equivocate"),
        ("AUTH_BCAST", "false-complain"),
        ("AUTH_BCAST", "withhold"),
        ("ANON_BCAST", "bad-relay"),
        ("GBC_SETUP", "false-complain"),
        ("GBC_SETUP", "flip-bits"),
        ("GBC_OPEN", "flip-bits"),
        ("COPY", "flip-bits"),
        ("COIN", "withhold"),
        ("DBC_HELPER", "flip-bits"),
        ("DBC_HELPER", "withhold"),
        ("REVEAL", "withhold"),
        ("GCOT_STEP2", "flip-bits"),
        ("GCOT_STEP4", "flip-bits"),
        ("GCOT_STEP4", "withhold"),
        ("GCOT_STEP5", "false-complain"),
        ("GCOT_STEP5", "flip-bits"),
        ("GCOT_STEP7", "flip-bits"),
        ("GCOT_STEP8", "flip-bits"),
        ("GCOT_STEP9", "flip-bits"),
    }
    | {(f"GCOT_STEP{i}", "withhold") for i in range(2, 10)}
)


class CheatBook:
    """Lookup of scripted deviations by (actor, hook)."""

    def __init__(self, scripts: Iterable[CheatScript] = ()):
        self.scripts = list(scripts)
        for s in self.scripts:
            if (s.hook, s.action) not in SUPPORTED_CHEATS:
                raise ValueError(f"unsupported cheat {s.action!r} at hook {s.hook!r}")
        self.fired: list[CheatScript] = []

    def get(self, actor: int, hook: str) -> CheatScript | None:
        for s in self.scripts:
            if s.actor == actor and s.hook == hook:
                return s
        return None

    def fire(self, actor: int, hook: str) -> CheatScript | None:
        s = self.get(actor, hook)
        if s is not None:
            self.fired.append(s)
        return s

    @property
    def collusion(self) -> frozenset:
        return frozenset(s.actor for s in self.scripts)

    def __bool__(self) -> bool:
        return bool(self.scripts)
