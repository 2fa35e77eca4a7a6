"""The two ideal channels everything else is built on.

An anonymous oblivious transfer (AOT) delivers each bit with probability
1/2 and hides the sender; an oblivious broadcast (OB) gives every other
player its own erasure pattern of the same string.
"""

import numpy as np

from aotmpc import Network

net = Network(4, seed=7)

# %% AOT: the receiver sees which bits arrived, not who sent them
d = net.aot_send(2, 0, np.ones(16, dtype=np.uint8))
print("AOT known mask :", d.known.astype(int))
print("delivered      :", d.known.mean())
print("P0's record    :", net.transcript.visible_to(0)[-1].actor)

# %% OB: independent patterns, so together the receivers often hold everything
got = net.ob_send(1, np.ones(8, dtype=np.uint8))
for j, dj in got.items():
    print(f"P{j} known       :", dj.known.astype(int))
union = np.any([dj.known for dj in got.values()], axis=0)
print("covered by all :", bool(union.all()), " expected rate (7/8)^8 =", round((7 / 8) ** 8, 4))
