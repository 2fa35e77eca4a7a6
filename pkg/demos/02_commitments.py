"""Global bit commitments and the proofs built on them.

A GBC sends each other player ``k`` random strings of parity ``b`` over
AOT.  A GBCX stores a bit as XOR pairs, which allows cut-and-choose
proofs of linear relations and copying.
"""

import numpy as np

from aotmpc import CheatBook, CheaterDetected, CheatScript, GbcParams, Network
from aotmpc.commit import (
    binding_best,
    gbc_commit,
    gbc_open,
    gbcx_commit,
    gbcx_copy,
    gbcx_open,
    hiding_bound,
    hiding_distance,
    proof_escape_exhaustive,
    prove_linear,
)

params = GbcParams(k=3, m=6, pairs=6)
net = Network(3, seed=1)

# %% commit and open
g = gbc_commit(net, 0, [1, 0, 1], params)
print("opened        :", gbc_open(net, g))
print("hiding  m=6,k=3: distance", round(hiding_distance(6, 3), 6), "bound", round(hiding_bound(6, 3), 6))
print("binding m=4,k=3: best equivocation", binding_best(4, 3))

# %% a committer who lies about one position is usually caught
liar = Network(3, seed=2, cheats=CheatBook([CheatScript(1, "GBC_OPEN", "flip-bits")]))
try:
    gbc_open(liar, gbc_commit(liar, 1, [0], GbcParams(k=8, m=16)))
except CheaterDetected as exc:
    print("caught        :", exc)

# %% equality proof between two GBCX, then a copy
x, y = gbcx_commit(net, 2, [1], params), gbcx_commit(net, 2, [1], params)
proof = prove_linear(net, 2, [x, y], [[1, 1]], [0], params, "equality")
print("proof verdict :", proof.verdict)
a, b = gbcx_copy(net, gbcx_commit(net, 2, [0], params), params)
print("copies open to:", gbcx_open(net, a), gbcx_open(net, b))
print("false proof escapes with", [proof_escape_exhaustive(mx) for mx in range(1, 6)])
print("honest commitments consumed by the proof:", not x.usable and not y.usable)
assert np.array_equal(gbcx_open(net, a), gbcx_open(net, b))
