import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aotmpc.broadcast import (
    BroadcastParams,
    IdentificationRejected,
    anonymous_broadcast,
    anonymous_broadcast_identifiable,
    anonymous_send,
    authenticated_broadcast,
    forgery_rate,
    identify_sender,
)
from aotmpc.commit import GbcParams, gbc_commit
from aotmpc.core import Aborted, CheatBook, CheaterIdentified, CheatScript, ProtocolAborted, Success
from aotmpc.simnet import Network

MSG = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)


def test_params_validation():
    with pytest.raises(ValueError):
        BroadcastParams(l=0)
    with pytest.raises(ValueError):
        BroadcastParams(cheat_threshold=1.0)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=32), st.integers(0, 10**6))
@settings(max_examples=25)
def test_anonymous_send_delivers(bits, seed):
    got = anonymous_send(Network(3, seed=seed), 1, 0, bits, BroadcastParams(r=8))
    assert got.tolist() == bits


def test_anonymous_send_single_repetition_needs_resends():
    net = Network(2, seed=0)
    got = anonymous_send(net, 1, 0, MSG, BroadcastParams(r=1, max_resends=200))
    assert np.array_equal(got, MSG)
    assert len(net.transcript.of_kind("COMPLAINT")) > 0


def test_anonymous_send_gives_up():
    with pytest.raises(ProtocolAborted):
        anonymous_send(Network(2, seed=0), 1, 0, np.ones(64), BroadcastParams(r=1, max_resends=2))


def test_first_try_rate_with_eight_repetitions():
    # each of the 16 bits survives unless all 8 copies are erased
    trials = 400
    net = Network(2, seed=3)
    first = 0
    for _ in range(trials):
        before = len(net.transcript.of_kind("COMPLAINT"))
        anonymous_send(net, 1, 0, np.ones(16), BroadcastParams(r=8))
        first += len(net.transcript.of_kind("COMPLAINT")) == before
    p = (1 - 2.0 ** -8) ** 16
    assert abs(first / trials - p) < 3 * np.sqrt(p * (1 - p) / trials) + 1 / trials


def test_honest_authenticated_broadcast_first_attempt():
    net = Network(4, seed=0)
    out = authenticated_broadcast(net, 2, MSG, BroadcastParams(l=2))
    assert isinstance(out, Success)
    assert out.result["attempts"] == 1 and np.array_equal(out.result["msg"], MSG)


@pytest.mark.parametrize("action", ["equivocate", "withhold"])
def test_cheating_broadcaster_identified(action):
    net = Network(4, seed=1, cheats=CheatBook([CheatScript(0, "AUTH_BCAST", action)]))
    out = authenticated_broadcast(net, 0, MSG, BroadcastParams())
    assert isinstance(out, CheaterIdentified) and out.culprit == 0


def test_false_complainer_identified():
    net = Network(4, seed=1, cheats=CheatBook([CheatScript(3, "AUTH_BCAST", "false-complain")]))
    out = authenticated_broadcast(net, 0, MSG, BroadcastParams())
    assert isinstance(out, CheaterIdentified) and out.culprit == 3


def test_anonymous_broadcast_honest():
    out = anonymous_broadcast(Network(4, seed=2), 1, MSG, BroadcastParams())
    assert isinstance(out, Success) and out.result["failures"] == 0
    assert np.array_equal(out.result["msg"], MSG)


def test_bad_relays_are_skipped():
    book = CheatBook([CheatScript(2, "ANON_BCAST", "bad-relay"), CheatScript(3, "ANON_BCAST", "bad-relay")])
    net = Network(5, seed=0, cheats=book)
    out = anonymous_broadcast(net, 0, MSG, BroadcastParams(), order=[2, 3, 1, 4])
    assert isinstance(out, Success)
    assert out.result["relay"] == 1 and out.result["failures"] == 2
    assert net.conflicts.has(0, 2) and net.conflicts.has(0, 3)


def test_all_relays_bad_sender_leaves():
    book = CheatBook([CheatScript(p, "ANON_BCAST", "bad-relay") for p in (1, 2, 3)])
    net = Network(4, seed=0, cheats=book)
    out = anonymous_broadcast(net, 0, MSG, BroadcastParams())
    assert out == Aborted("sender expelled")
    rec = net.transcript.of_kind("ANON_BCAST")[-1]
    assert rec.payload["failures"] == 3 <= net.n


def _swap_views(run, n, senders, watchers):
    views = []
    for s in senders:
        net = Network(n, seed=11)
        run(net, s)
        views.append([net.transcript.view(w) for w in watchers])
    return views


def test_sender_swap_anonymous_send():
    run = lambda net, s: anonymous_send(net, s, 0, MSG, BroadcastParams(r=2))
    a, b = _swap_views(run, 4, (1, 2), (0, 3))
    assert a == b


def test_sender_swap_anonymous_broadcast():
    run = lambda net, s: anonymous_broadcast(net, s, MSG, BroadcastParams(), order=[3, 0])
    a, b = _swap_views(run, 4, (1, 2), (0, 3))
    assert a == b


def test_sender_swap_aot_commitment():
    run = lambda net, s: gbc_commit(net, s, [1, 0], GbcParams(k=2, m=4), origin="aot",
                                    rng=np.random.default_rng(5))
    a, b = _swap_views(run, 4, (1, 2), (0, 3))
    assert a == b


def test_true_sender_identifies():
    net = Network(4, seed=4)
    h = anonymous_broadcast_identifiable(net, 2, MSG, BroadcastParams())
    assert np.array_equal(h.msg, MSG)
    assert identify_sender(net, h, 2) == 2


@pytest.mark.parametrize("claimant", [0, 1, 3])
def test_impersonator_rejected(claimant):
    net = Network(4, seed=4)
    h = anonymous_broadcast_identifiable(net, 2, MSG, BroadcastParams(f=16))
    with pytest.raises(IdentificationRejected):
        identify_sender(net, h, claimant)


def test_forgery_rate_bound():
    # tag degree is the number of 8-bit chunks in a 16-bit message
    trials = 20_000
    rate = forgery_rate(trials, f=8, msg_bits=16)
    assert rate <= 2 / 2**8 + 3 * np.sqrt(2 / 2**8 / trials)
