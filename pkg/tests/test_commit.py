import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aotmpc.commit import (
    GbcParams,
    anonymous_setup,
    binding_best,
    check_linear_openings,
    coin_toss,
    commit_proven,
    conflict_split,
    dbc_create_user,
    equivocation_success,
    gbc_commit,
    gbc_open,
    gbcx_commit,
    gbcx_copy,
    gbcx_open,
    hiding_bound,
    hiding_distance,
    proof_escape_exhaustive,
    prove_linear,
    replicate,
)
from aotmpc.codes import LinearCode
from aotmpc.core import CheatBook, CheaterDetected, CheaterIdentified, CheatScript, GroupSplit, Success
from aotmpc.simnet import Network

SMALL = GbcParams(k=2, m=4, pairs=4)


# -- oracles -------------------------------------------------------------------


def single_string_views(m):
    """Exact distribution of (mask, visible bits) of one parity-b string, for b = 0, 1."""
    words = ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(np.int64)
    par = words.sum(1) % 2
    dists = [{}, {}]
    for mask in words:
        for w, p in zip(words, par):
            key = (tuple(mask), tuple(w * mask))
            d = dists[p]
            d[key] = d.get(key, 0) + 1
    keys = sorted(set(dists[0]) | set(dists[1]))
    total = (1 << m) * (1 << (m - 1))
    return [np.array([d.get(k, 0) / total for k in keys]) for d in dists]


def product_view_distance(m, k):
    """Total variation between the joint views of k independent strings (brute force)."""
    p0, p1 = single_string_views(m)
    a0, a1 = p0, p1
    for _ in range(k - 2):
        a0, a1 = np.outer(a0, p0).ravel(), np.outer(a1, p1).ravel()
    tv = 0.0
    for x0, x1 in zip(p0, p1):
        tv += np.abs(np.outer(a0, x0) - np.outer(a1, x1)).sum()
    return tv / 2


def best_equivocation_brute(m, k):
    """Best chance of opening the other bit unnoticed, two players, all masks and claims."""
    words = ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(np.uint8)
    odd = words[words.sum(1) % 2 == 1]  # a claim of the other parity differs from the truth by an odd set
    masks = ((np.arange(1 << (k * m))[:, None] >> np.arange(k * m)) & 1).astype(bool).reshape(-1, k, m)
    best = 0.0
    for combo in itertools.product(range(len(odd)), repeat=k):
        diff = odd[list(combo)].astype(bool)
        ok = ~np.any(masks & diff, axis=(1, 2))
        best = max(best, ok.mean())
    return best


# -- GBC ------------------------------------------------------------------------


def test_ob_origin_receivers_know_half_of_each_string():
    net = Network(3, seed=0)
    g = gbc_commit(net, 0, np.zeros(500, dtype=np.uint8), GbcParams(k=4, m=8), origin="ob")
    known = g.known[:, 1:].sum(-1)
    assert abs(known.mean() - 4.0) < 0.1


def test_ob_origin_shares_strings_aot_origin_does_not():
    ob = gbc_commit(Network(3, seed=1), 0, [1], GbcParams(k=4, m=8), origin="ob")
    aot = gbc_commit(Network(3, seed=1), 0, [1], GbcParams(k=4, m=8), origin="aot")
    assert np.array_equal(ob.strings[0, 1], ob.strings[0, 2])
    assert not np.array_equal(aot.strings[0, 1], aot.strings[0, 2])


@pytest.mark.parametrize("origin", ["aot", "ob"])
def test_every_string_has_parity_b(origin):
    bits = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    g = gbc_commit(Network(4, seed=2), 1, bits, GbcParams(k=3, m=6), origin=origin)
    par = g.strings.sum(-1) % 2
    others = [0, 2, 3]
    assert np.all(par[:, others] == bits[:, None, None])


def test_hiding_exhaustive_m6_k3():
    exact = product_view_distance(6, 3)
    assert hiding_distance(6, 3) == pytest.approx(exact, abs=1e-12)
    assert exact <= hiding_bound(6, 3) + 1e-12
    assert exact == pytest.approx(0.046146, abs=1e-6)


@pytest.mark.parametrize("m,k", [(2, 2), (3, 2), (4, 2), (3, 3)])
def test_hiding_small_cases(m, k):
    assert hiding_distance(m, k) == pytest.approx(product_view_distance(m, k), abs=1e-12)


def test_binding_exhaustive_m4_k3():
    brute = best_equivocation_brute(4, 3)
    assert binding_best(4, 3) == pytest.approx(brute, abs=1e-12)
    assert brute <= 2.0 ** -3


def test_equivocation_with_even_flips_changes_nothing():
    assert equivocation_success(np.zeros((2, 3)), 3, 2) == 0.0


def test_honest_open_returns_bits():
    net = Network(3, seed=4)
    g = gbc_commit(net, 0, [1, 0, 1], SMALL)
    assert gbc_open(net, g).tolist() == [1, 0, 1]


def test_flipped_open_detection_rate_two_players():
    # one flipped position per string; each of the k strings is caught w.p. 1/2
    params = GbcParams(k=2, m=4)
    caught, trials = 0, 2000
    net = Network(2, seed=5)
    for _ in range(trials):
        g = gbc_commit(net, 0, [1], params)
        try:
            gbc_open(net, g, flip=True)
        except CheaterDetected as exc:
            assert exc.culprit == 0
            caught += 1
    assert abs(caught / trials - (1 - 0.5 ** 2)) < 3 * np.sqrt(0.1875 / trials)


def test_open_cheat_hook_identifies_committer():
    net = Network(3, seed=0, cheats=CheatBook([CheatScript(1, "GBC_OPEN", "flip-bits")]))
    g = gbc_commit(net, 1, [0], GbcParams(k=8, m=16))
    with pytest.raises(CheaterDetected) as info:
        gbc_open(net, g)
    assert info.value.culprit == 1


# -- GBCX and proofs --------------------------------------------------------------


def test_gbcx_pairs_xor_to_bit():
    g = gbcx_commit(Network(2, seed=0), 0, [1], GbcParams(k=2, m=4, pairs=3))
    h = g.halves
    assert h.shape == (1, 3, 2) and np.all(h[..., 0] ^ h[..., 1] == 1)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=6), st.integers(0, 1000))
@settings(max_examples=20)
def test_gbcx_open_returns_bits(bits, seed):
    net = Network(3, seed=seed)
    assert gbcx_open(net, gbcx_commit(net, 2, bits, SMALL)).tolist() == bits


def test_planted_bad_pair_fails_open():
    net = Network(2, seed=0)
    bad = np.zeros((1, 4), dtype=np.uint8)
    bad[0, 2] = 1
    g = gbcx_commit(net, 0, [1], SMALL, bad=bad)
    with pytest.raises(CheaterDetected):
        gbcx_open(net, g)


def _challenges(mx):
    return ((np.arange(1 << mx)[:, None] >> np.arange(mx)) & 1).astype(np.int64)


def test_honest_equality_accepted_under_every_challenge():
    net = Network(2, seed=3)
    b = gbcx_commit(net, 0, [1], SMALL)
    c = gbcx_commit(net, 0, [1], SMALL)
    A = np.array([[1, 1]])
    left = np.concatenate([b.halves[..., 0], c.halves[..., 0]])
    announced = A @ left % 2
    ch = _challenges(4)
    halves = np.concatenate([b.halves, c.halves])  # (2, mx, 2)
    opened = np.take_along_axis(halves[None], ch[:, None, :, None], -1)[..., 0]
    assert check_linear_openings(A, [0], announced, ch, opened).all()


def test_planted_bad_pair_escapes_one_proof_with_half_probability():
    net = Network(2, seed=3)
    bad = np.zeros((1, 4), dtype=np.uint8)
    bad[0, 1] = 1
    b = gbcx_commit(net, 0, [1], SMALL, bad=bad)
    c = gbcx_commit(net, 0, [1], SMALL)
    A = np.array([[1, 1]])
    announced = A @ np.concatenate([b.halves[..., 0], c.halves[..., 0]]) % 2
    ch = _challenges(4)
    halves = np.concatenate([b.halves, c.halves])
    opened = np.take_along_axis(halves[None], ch[:, None, :, None], -1)[..., 0]
    assert check_linear_openings(A, [0], announced, ch, opened).all(axis=-1).mean() == 0.5


def escape_brute(mx):
    """Best escape for a false equality b=0, c=1 over every announcement and challenge."""
    best = 0.0
    ch = _challenges(mx)
    for bl, cl in itertools.product(itertools.product([0, 1], repeat=mx), repeat=2):
        bl, cl = np.array(bl), np.array(cl)
        br, cr = bl ^ 0, cl ^ 1
        for e in itertools.product([0, 1], repeat=mx):
            e = np.array(e)
            lhs = np.where(ch == 0, bl ^ cl, br ^ cr)
            best = max(best, np.all(lhs == e, axis=1).mean())
    return best


@pytest.mark.parametrize("mx", [1, 2, 3])
def test_false_equality_escape_matches_brute_force(mx):
    assert proof_escape_exhaustive(mx) == escape_brute(mx) == 2.0 ** -mx


def test_false_equality_escape_at_ten_pairs():
    assert proof_escape_exhaustive(10) == 2.0 ** -10


def test_codeword_proof_repetition_code():
    H = LinearCode.repetition(3).parity_check
    params = GbcParams(k=2, m=4, pairs=10)
    net = Network(2, seed=0)
    prove_linear(net, 0, [gbcx_commit(net, 0, [1, 1, 1], params)], H, np.zeros(len(H)), params, "codeword")
    with pytest.raises(CheaterDetected):
        prove_linear(net, 0, [gbcx_commit(net, 0, [1, 1, 0], params)], H, np.zeros(len(H)), params, "codeword")


def test_proof_destroys_operands():
    net = Network(2, seed=0)
    g = gbcx_commit(net, 0, [1], SMALL)
    prove_linear(net, 0, [g], [[1]], [1], SMALL, "value")
    assert not g.usable
    with pytest.raises(ValueError):
        prove_linear(net, 0, [g], [[1]], [1], SMALL, "value")


def test_only_owner_can_prove():
    net = Network(2, seed=0)
    with pytest.raises(ValueError):
        prove_linear(net, 1, [gbcx_commit(net, 0, [1], SMALL)], [[1]], [1], SMALL)


def test_equality_proof_openings_do_not_depend_on_bit():
    means = []
    for b in (0, 1):
        opened = []
        for seed in range(150):
            net = Network(2, seed=seed)
            x, y = gbcx_commit(net, 0, [b], SMALL), gbcx_commit(net, 0, [b], SMALL)
            opened.append(prove_linear(net, 0, [x, y], [[1, 1]], [0], SMALL, "equality").openings.ravel())
        means.append(np.concatenate(opened).mean())
    assert all(abs(m - 0.5) < 0.05 for m in means)


def test_commit_proven_keeps_unused_half():
    net = Network(3, seed=1)
    a, b = gbcx_commit(net, 0, [1], SMALL), gbcx_commit(net, 0, [0], SMALL)
    z = commit_proven(net, 0, [1], [a, b], [[1, 1]], [[1]], [0], SMALL)
    assert z.usable and z.mx == 4 and gbcx_open(net, z).tolist() == [1]


# -- copying ----------------------------------------------------------------------


def test_copies_open_to_the_same_bit():
    for seed in range(200):
        net = Network(2, seed=seed)
        g = gbcx_commit(net, 0, [1], SMALL)
        x, y = gbcx_copy(net, g, SMALL)
        assert not g.usable
        assert gbcx_open(net, x)[0] == 1 and gbcx_open(net, y)[0] == 1


def test_copy_of_copy_gives_four_commitments():
    net = Network(3, seed=7)
    out = replicate(net, gbcx_commit(net, 1, [0, 1], SMALL), 4, SMALL)
    assert len(out) == 4
    assert all(gbcx_open(net, g).tolist() == [0, 1] for g in out)


def copy_detection_oracle(mx, frac):
    """Exact chance that the equality proof of a copy catches bad pairs planted with probability frac."""
    total = 0.0
    ch = _challenges(mx)
    for pattern in itertools.product([0, 1], repeat=mx):
        w = np.prod([frac if p else 1 - frac for p in pattern])
        bad = np.array(pattern)
        # honest announcement; a bad column fails exactly when its right half is opened
        passed = ~np.any((ch == 1) & (bad == 1), axis=1)
        total += w * (1 - passed.mean())
    return total


@pytest.mark.parametrize("frac", [1.0, 0.5])
def test_copy_bad_pairs_detection_rate(frac):
    caught, trials = 0, 400
    for seed in range(trials):
        net = Network(2, seed=seed,
                      cheats=CheatBook([CheatScript(0, "COPY", "flip-bits", {"fraction": frac})]))
        g = gbcx_commit(net, 0, [1], SMALL)
        try:
            gbcx_copy(net, g, SMALL)
        except CheaterDetected as exc:
            assert exc.culprit == 0
            caught += 1
    p = copy_detection_oracle(4, frac)
    assert abs(caught / trials - p) < 3 * np.sqrt(p * (1 - p) / trials) + 1e-9


# -- coins ------------------------------------------------------------------------


def _chi2_two_bit(bits):
    cells = np.bincount(bits[: bits.size // 2 * 2].reshape(-1, 2) @ [2, 1], minlength=4)
    exp = cells.sum() / 4
    return ((cells - exp) ** 2 / exp).sum()


def test_coin_toss_uniform():
    net = Network(3, seed=0)
    bits = coin_toss(net, None, 20_000, GbcParams(k=1, m=2))
    assert _chi2_two_bit(bits) < 16.27  # 3 dof, p = 0.001


def test_coin_toss_with_fixed_string_still_uniform():
    net = Network(3, seed=1)
    bits = coin_toss(net, None, 20_000, GbcParams(k=1, m=2), fixed={0: np.zeros(20_000, dtype=np.uint8)})
    assert _chi2_two_bit(bits) < 16.27


def test_coin_refusal_identified():
    net = Network(3, cheats=CheatBook([CheatScript(2, "COIN", "withhold")]))
    with pytest.raises(CheaterDetected) as info:
        coin_toss(net, None, 8, SMALL)
    assert info.value.culprit == 2


# -- DBC --------------------------------------------------------------------------


@pytest.mark.parametrize("b", [0, 1])
def test_dbc_shares_xor_to_bit(b):
    for seed in range(50):
        net = Network(3, seed=seed)
        d = dbc_create_user(net, 0, b, SMALL)
        assert d.value == b and d.role == "user" and set(d.shares) == {0, 1, 2}


def test_dbc_owner_share_completes_parity():
    net = Network(3, seed=4)
    d = dbc_create_user(net, 0, 1, SMALL)
    helpers = int(d.shares[1].values[0]) ^ int(d.shares[2].values[0])
    assert int(d.shares[0].values[0]) == 1 ^ helpers


def test_dbc_helper_opening_garbage_once_then_public():
    script = CheatScript(1, "DBC_HELPER", "flip-bits", {"persist": 0})
    net = Network(3, seed=0, cheats=CheatBook([script]))
    d = dbc_create_user(net, 0, 1, SMALL)
    assert d.value == 1
    assert any(e.payload.get("against") == 1 for e in net.transcript.of_kind("COMPLAINT"))


def test_dbc_helper_persistent_cheat_identified():
    net = Network(3, seed=0, cheats=CheatBook([CheatScript(2, "DBC_HELPER", "withhold")]))
    with pytest.raises(CheaterDetected) as info:
        dbc_create_user(net, 0, 1, SMALL)
    assert info.value.culprit == 2


# -- anonymous setup and split ------------------------------------------------------


def test_setup_without_conflicts_succeeds():
    out = anonymous_setup(Network(3, seed=0), SMALL)
    assert isinstance(out, Success) and conflict_split(Network(3), []) == Success(None)


def test_persistent_complainer_ends_isolated():
    net = Network(3, seed=0, cheats=CheatBook([CheatScript(2, "GBC_SETUP", "false-complain")]))
    out = anonymous_setup(net, SMALL)
    assert out == CheaterIdentified(2, "in conflict with every other player", "GBC_SETUP")


def test_lying_committer_split_into_cheater_block():
    net = Network(3, seed=0, cheats=CheatBook([CheatScript(1, "GBC_SETUP", "flip-bits", {"target": 0})]))
    out = anonymous_setup(net, SMALL)
    assert isinstance(out, GroupSplit) and out.block_of(1) == frozenset({1})
    assert out.block_of(0) == frozenset({0, 2})


def test_split_keeps_pivot_with_its_equal_conflict_set():
    net = Network(4)
    net.conflicts.add(3, 0)
    net.conflicts.add(3, 1)
    out = conflict_split(net, failed=[0])
    assert out.blocks == (frozenset({0, 1}), frozenset({2, 3}))
