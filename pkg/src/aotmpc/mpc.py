"""Boolean circuit evaluation over distributed bit commitments.

Every wire holds a :class:`~aotmpc.commit.Dbc`: one GBCX share per player,
XORing to the wire value.  XOR and NOT are local (each affected player
commits to its new share and proves the linear relation), AND expands
``(xor_i a_i) & (xor_j b_j)`` into the ``n**2`` products ``a_i & b_j``.
Cross products run a GCOT between the two players; the diagonal products
``a_i & b_i`` use multiplication triples checked by cut-and-choose.

Proofs destroy commitments, so a wire that feeds several gates is copied
once per extra use.  Revelation opens the output shares in player order;
fairness is not attempted.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field

import numpy as np

from .broadcast import BroadcastParams, authenticated_broadcast
from .codes import LinearCode
from .commit import (
    Dbc,
    GbcParams,
    Gbcx,
    active_players,
    anonymous_setup,
    coin_permutation,
    commit_proven,
    dbc_create_user,
    gbcx_commit,
    gbcx_copy,
    gbcx_open,
    replicate,
)
from .core import (
    AdversaryStructure,
    CheaterDetected,
    ProtocolAborted,
    Success,
    monotone_close,
    outcome_to_payload,
)
from .mac import int_to_bits
from .ot import GcotParams, agree_code, gcot_session
from .simnet import Network

GATE_OPS = ("AND", "XOR", "NOT")


# ---------------------------------------------------------------------------
# circuits


class CircuitError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


@dataclass(frozen=True)
class Gate:
    op: str
    ins: tuple
    out: str


@dataclass
class Circuit:
    """Input wires with owners, gates in evaluation order, output wires."""

    inputs: dict
    gates: list
    outputs: list
    text: str = ""

    _WIRE = r"w\d+"

    @classmethod
    def parse(cls, text: str) -> "Circuit":
        inputs, gates, outputs = {}, [], []
        written = set()
        pats = {
            "INPUT": re.compile(rf"^INPUT\s+({cls._WIRE})\s+P(\d+)$"),
            "AND": re.compile(rf"^AND\s+({cls._WIRE})\s+({cls._WIRE})\s*->\s*({cls._WIRE})$"),
            "XOR": re.compile(rf"^XOR\s+({cls._WIRE})\s+({cls._WIRE})\s*->\s*({cls._WIRE})$"),
            "NOT": re.compile(rf"^NOT\s+({cls._WIRE})\s*->\s*({cls._WIRE})$"),
            "OUTPUT": re.compile(rf"^OUTPUT\s+({cls._WIRE})$"),
        }
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            word = line.split()[0]
            pat = pats.get(word)
            mt = pat.match(line) if pat else None
            if mt is None:
                raise CircuitError(f"cannot parse {raw.strip()!r}", no)
            g = mt.groups()
            if word == "OUTPUT":
                if g[0] not in written:
                    raise CircuitError(f"output {g[0]} is never written", no)
                outputs.append(g[0])
                continue
            out = g[0] if word == "INPUT" else g[-1]
            if word != "INPUT":
                for w in g[:-1]:
                    if w not in written:
                        raise CircuitError(f"wire {w} used before it is written", no)
            if out in written:
                raise CircuitError(f"wire {out} written twice", no)
            written.add(out)
            if word == "INPUT":
                inputs[g[0]] = int(g[1])
            else:
                gates.append(Gate(word, tuple(g[:-1]), g[-1]))
        if not outputs:
            raise CircuitError("circuit has no OUTPUT")
        return cls(inputs, gates, outputs, text)

    def owners(self) -> set:
        return set(self.inputs.values())

    def inputs_of(self, player: int) -> list:
        return [w for w, p in self.inputs.items() if p == player]

    def evaluate(self, values: dict) -> dict:
        """Plaintext evaluation; ``values`` maps input wires to bits."""
        v = {w: int(values[w]) & 1 for w in self.inputs}
        for g in self.gates:
            if g.op == "AND":
                v[g.out] = v[g.ins[0]] & v[g.ins[1]]
            elif g.op == "XOR":
                v[g.out] = v[g.ins[0]] ^ v[g.ins[1]]
            else:
                v[g.out] = 1 - v[g.ins[0]]
        return {w: v[w] for w in self.outputs}

    def use_counts(self) -> dict:
        uses = {w: 0 for w in self.inputs}
        for g in self.gates:
            uses.setdefault(g.out, 0)
            for w in g.ins:
                uses[w] += 1
        for w in self.outputs:
            uses[w] += 1
        return uses


# ---------------------------------------------------------------------------
# parameters and session


@dataclass(frozen=True)
class MpcParams:
    gbc: GbcParams = field(default_factory=lambda: GbcParams(k=2, m=4, pairs=4))
    gcot: GcotParams = field(default_factory=GcotParams)
    bcast: BroadcastParams = field(default_factory=BroadcastParams)
    triples: int = 4
    setup: bool = False


class _Stop(Exception):
    def __init__(self, outcome):
        super().__init__(str(outcome))
        self.outcome = outcome


@dataclass
class MpcSession:
    net: Network
    circuit: Circuit
    structure: AdversaryStructure
    params: MpcParams
    code: LinearCode | None = None
    phase: str = "init"
    wires: dict = field(default_factory=dict)
    uses: dict = field(default_factory=dict)
    fairness: str = "simplified"
    trace: dict = field(default_factory=dict)


def _agreement_message(n: int, circuit: Circuit, params: MpcParams) -> np.ndarray:
    return np.concatenate([int_to_bits(n, 8), int_to_bits(len(circuit.gates), 16),
                           int_to_bits(params.gcot.m, 8), int_to_bits(params.gbc.pairs, 8)])


def _require(outcome):
    if not isinstance(outcome, Success):
        raise _Stop(outcome)
    return outcome.result


def init_phase(net: Network, circuit: Circuit, structure: AdversaryStructure | None, params: MpcParams,
               inputs: dict) -> MpcSession:
    """Agree on parameters, code and circuit; commit every input by a user DBC."""
    if any(p >= net.n for p in circuit.owners()):
        raise CircuitError("an input owner is not a player")
    structure = structure or monotone_close([], net.players)
    sess = MpcSession(net, circuit, structure, params)
    net.publish("FUNC", "HEADER", {
        "n": net.n, "seed": net.seed, "circuit": circuit.text,
        "structure": [sorted(s) for s in structure.maximal()],
        "gbc": asdict(params.gbc), "gcot": asdict(params.gcot), "bcast": asdict(params.bcast),
        "triples": params.triples, "fairness": sess.fairness,
    })
    msg = _agreement_message(net.n, circuit, params)
    for p in net.players:
        _require(authenticated_broadcast(net, p, msg, params.bcast))
    if params.setup:
        _require(anonymous_setup(net, params.gbc, params.bcast))
    sess.code = agree_code(net, params.gcot, params.gbc)
    net.publish("FUNC", "HEADER", {"code": sess.code.describe(), "sigma": params.gcot.sigma,
                                   "epsilon": params.gcot.epsilon})
    sess.uses = circuit.use_counts()
    for w, owner in circuit.inputs.items():
        net.next_round()
        sess.wires[w] = dbc_create_user(net, owner, int(inputs[w]), params.gbc)
    sess.phase = "compute"
    return sess


def copy_dbc(net: Network, x: Dbc, params: GbcParams) -> tuple[Dbc, Dbc]:
    a, b = {}, {}
    for p, g in x.shares.items():
        a[p], b[p] = gbcx_copy(net, g, params)
    return Dbc(a, x.role, x.owner), Dbc(b, x.role, x.owner)


def _take(sess: MpcSession, w: str) -> Dbc:
    if sess.uses[w] > 1:
        keep, give = copy_dbc(sess.net, sess.wires[w], sess.params.gbc)
        sess.wires[w] = keep
    else:
        give = sess.wires.pop(w)
    sess.uses[w] -= 1
    return give


def dbc_from_shares(net: Network, shares: dict, params: GbcParams) -> Dbc:
    """Each player commits to its given share (intermediate-result DBC)."""
    return Dbc({p: gbcx_commit(net, p, [int(v)], params) for p, v in sorted(shares.items())})


# ---------------------------------------------------------------------------
# gates


def xor_dbc(net: Network, x: Dbc, y: Dbc, params: GbcParams) -> Dbc:
    out = {}
    for p in sorted(x.shares):
        a, b = x.shares[p], y.shares[p]
        v = int(a.values[0]) ^ int(b.values[0])
        out[p] = commit_proven(net, p, [v], [a, b], [[1, 1]], [[1]], [0], params, "xor")
    net.publish("FUNC", "GATE", {"op": "XOR", "shares": {p: g.ref for p, g in out.items()}})
    return Dbc(out)


def not_dbc(net: Network, x: Dbc, params: GbcParams) -> Dbc:
    """The lowest active player inverts its share and proves inequality."""
    p = min(q for q in active_players(net) if q in x.shares)
    out = dict(x.shares)
    a = x.shares[p]
    out[p] = commit_proven(net, p, [int(a.values[0]) ^ 1], [a], [[1]], [[1]], [1], params, "inequality")
    net.publish("FUNC", "GATE", {"op": "NOT", "player": p, "share": out[p].ref})
    return Dbc(out)


def and_commitments(net: Network, alice: int, a: Gbcx, bob: int, b: Gbcx, code: LinearCode,
                    gparams: GcotParams, params: GbcParams) -> tuple[Gbcx, Gbcx]:
    """Shares ``a'`` (Alice) and ``b'`` (Bob) with ``a' ^ b' = a & b``.

    Alice draws ``a'`` and runs GCOT with inputs ``(a', a' ^ a)``; Bob's
    selector is ``b``, so he ends committed to ``a'`` or ``a' ^ a``.
    """
    ap = int(net.player_rng(alice).integers(0, 2))
    c1, c2, c3 = replicate(net, gbcx_commit(net, alice, [ap], params), 3, params)
    app = commit_proven(net, alice, [ap ^ int(a.values[0])], [c1, a], [[1, 1]], [[1]], [0], params,
                        "xor")
    sess = gcot_session(net, alice, c2, app, bob, b, code, gparams, params)
    return c3, sess.result


def diagonal_and(net: Network, p: int, a: Gbcx, b: Gbcx, params: GbcParams, triples: int = 4) -> Gbcx:
    """Player ``p`` commits to ``a & b`` for two of its own commitments.

    ``p`` commits to ``2R`` triples ``(u, v, u & v)``; a coin toss opens
    ``R`` of them for inspection.  For each remaining triple ``p``
    announces ``d = a ^ u`` and ``e = b ^ v`` and proves, in one linear
    proof, these announcements together with
    ``z = w ^ d v ^ e u ^ d e``.  Escaping needs every unopened triple bad
    and every opened one good.
    """
    R = triples
    rng = net.player_rng(p)
    u = rng.integers(0, 2, 2 * R, dtype=np.uint8)
    v = rng.integers(0, 2, 2 * R, dtype=np.uint8)
    T = gbcx_commit(net, p, np.concatenate([u, v, u & v]), params)
    perm = coin_permutation(net, 2 * R, params)
    chk, use = np.sort(perm[:R]), np.sort(perm[R:])
    op = gbcx_open(net, T.rows(np.concatenate([chk, 2 * R + chk, 4 * R + chk])))
    if np.any(op[2 * R:] != (op[:R] & op[R:2 * R])):
        raise CheaterDetected(p, "multiplication triple does not multiply", "PROOF")
    av, bv = int(a.values[0]), int(b.values[0])
    d = av ^ u[use]
    e = bv ^ v[use]
    net.publish(p, "GATE", {"op": "AND-diagonal", "d": d, "e": e})
    z = av & bv
    # operand columns: a, b, u_use (R), v_use (R), w_use (R); new column: z
    rows, const = [], []
    for t in range(R):
        r = np.zeros(2 + 3 * R, dtype=np.uint8)
        r[0], r[2 + t] = 1, 1
        rows.append(r), const.append(d[t])
        r = np.zeros(2 + 3 * R, dtype=np.uint8)
        r[1], r[2 + R + t] = 1, 1
        rows.append(r), const.append(e[t])
        r = np.zeros(2 + 3 * R, dtype=np.uint8)
        r[2 + 2 * R + t] = 1
        r[2 + R + t] ^= d[t]
        r[2 + t] ^= e[t]
        rows.append(r), const.append(d[t] & e[t])
    A_ops = np.array(rows, dtype=np.uint8)
    A_new = np.array([[0], [0], [1]] * R, dtype=np.uint8)
    ops = [a, b, T.rows(use), T.rows(2 * R + use), T.rows(4 * R + use)]
    return commit_proven(net, p, [z], ops, A_ops, A_new, const, params, "product")


def and_dbc(net: Network, x: Dbc, y: Dbc, params: GbcParams, code: LinearCode, gparams: GcotParams,
            triples: int = 4, trace: dict | None = None) -> Dbc:
    """AND of two DBCs through all ``n**2`` share products.

    GCOTs always run from the lower to the higher index.  ``trace``
    (optional) receives the committed sub-share values per product.
    """
    players = sorted(x.shares)
    n = len(players)
    xs = {p: replicate(net, x.shares[p], n, params) for p in players}
    ys = {p: replicate(net, y.shares[p], n, params) for p in players}
    got = {p: [] for p in players}
    for p in players:
        z = diagonal_and(net, p, xs[p].pop(), ys[p].pop(), params, triples)
        got[p].append(z)
        if trace is not None:
            trace[(p, p)] = (int(z.values[0]),)
    for i in players:
        for j in players:
            if j <= i:
                continue
            for (left, right) in (((xs, i), (ys, j)), ((ys, i), (xs, j))):
                ai, bj = and_commitments(net, i, left[0][i].pop(), j, right[0][j].pop(), code, gparams, params)
                got[i].append(ai)
                got[j].append(bj)
                if trace is not None:
                    key = (i, j) if left[0] is xs else (j, i)
                    trace[key] = (int(ai.values[0]), int(bj.values[0]))
    out = {}
    for p in players:
        parts = got[p]
        v = 0
        for g in parts:
            v ^= int(g.values[0])
        out[p] = commit_proven(net, p, [v], parts, np.ones((1, len(parts)), dtype=np.uint8), [[1]], [0],
                               params, "and-combination")
    net.publish("FUNC", "GATE", {"op": "AND", "shares": {p: g.ref for p, g in out.items()}})
    return Dbc(out)


def open_dbc(net: Network, x: Dbc) -> int:
    """Open every share publicly in player order; a refusal identifies the player."""
    v = 0
    for p in sorted(x.shares):
        if net.cheat(p, "REVEAL"):
            net.publish(p, "REVEAL", {"refuse": True})
            raise CheaterDetected(p, "refused to reveal an output share", "REVEAL")
        v ^= int(gbcx_open(net, x.shares[p])[0])
    return v


def compute_phase(sess: MpcSession) -> MpcSession:
    if sess.phase != "compute":
        raise RuntimeError(f"compute phase cannot start in phase {sess.phase!r}")
    net, P = sess.net, sess.params
    for g in sess.circuit.gates:
        net.next_round()
        if g.op == "NOT":
            sess.wires[g.out] = not_dbc(net, _take(sess, g.ins[0]), P.gbc)
            continue
        x, y = _take(sess, g.ins[0]), _take(sess, g.ins[1])
        if g.op == "XOR":
            sess.wires[g.out] = xor_dbc(net, x, y, P.gbc)
        else:
            sess.wires[g.out] = and_dbc(net, x, y, P.gbc, sess.code, P.gcot, P.triples)
    sess.phase = "reveal"
    return sess


def reveal_phase(sess: MpcSession) -> Success:
    """Open the output wires share by share (round robin, no fairness)."""
    if sess.phase != "reveal":
        raise RuntimeError(f"reveal phase cannot start in phase {sess.phase!r}")
    net = sess.net
    out = {}
    for w in sess.circuit.outputs:
        net.next_round()
        out[w] = open_dbc(net, _take(sess, w))
        net.publish("FUNC", "REVEAL", {"wire": w, "value": out[w]})
    sess.phase = "done"
    return Success(out)


def run_protocol(net: Network, circuit: Circuit, inputs: dict, params: MpcParams | None = None,
                 structure: AdversaryStructure | None = None):
    """All three phases; returns Success(outputs), CheaterIdentified, GroupSplit or Aborted."""
    params = params or MpcParams()
    try:
        sess = init_phase(net, circuit, structure, params, inputs)
        compute_phase(sess)
        outcome = reveal_phase(sess)
    except CheaterDetected as exc:
        outcome = exc.outcome()
    except ProtocolAborted as exc:
        outcome = exc.outcome()
    except _Stop as stop:
        outcome = stop.outcome
    net.publish("FUNC", "OUTCOME", outcome_to_payload(outcome))
    return outcome


__all__ = [
    "Circuit", "CircuitError", "Gate", "MpcParams", "MpcSession", "init_phase", "compute_phase",
    "reveal_phase", "run_protocol", "xor_dbc", "not_dbc", "and_dbc", "and_commitments", "diagonal_and",
    "open_dbc", "copy_dbc", "dbc_from_shares",
]
