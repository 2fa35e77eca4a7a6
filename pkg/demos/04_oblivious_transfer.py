"""Undeniable OT and globally committed OT.

In a UOT Bob learns Alice's committed bit with probability 1/2.  GCOT
turns committed inputs ``a0, a1`` and a committed selector ``b`` into a
commitment of Bob to ``a_b`` that everybody can check.
"""

import numpy as np

from aotmpc import CheatBook, CheatScript, GbcParams, GcotParams, Network, gcot, gbcx_commit, gbcx_open, uot_batch
from aotmpc.ot import agree_code

net = Network(2, seed=0)
bits = np.random.default_rng(0).integers(0, 2, 2000, dtype=np.uint8)
u = uot_batch(net, 0, 1, bits, GbcParams(k=2, m=8))
print("UOT learn rate:", u.learned.mean(), " all correct:", np.array_equal(u.values[u.learned], bits[u.learned]))

P = GbcParams(k=2, m=4, pairs=4)
for cheats in (None, CheatBook([CheatScript(0, "GCOT_STEP4", "flip-bits")])):
    net = Network(3, seed=4, cheats=cheats)
    code = agree_code(net, GcotParams(), P)
    A0, A1, B = gbcx_commit(net, 0, [0], P), gbcx_commit(net, 0, [1], P), gbcx_commit(net, 1, [1], P)
    out = gcot(net, 0, A0, A1, 1, B, code, GcotParams(), P)
    if cheats is None:
        s = out.result
        print(f"GCOT code [{code.m},{code.k}], public openings {s.public_openings}, Bob holds",
              gbcx_open(net, s.result))
    else:
        print("GCOT with Alice flipping masked bits:", out)
