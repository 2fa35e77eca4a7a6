"""Broadcast channels made from AOT.

Authenticated broadcast catches a sender who tells players different
things; anonymous broadcast publishes through a relay and replaces relays
that tamper with the message.
"""

from aotmpc import (
    BroadcastParams,
    CheatBook,
    CheatScript,
    Network,
    anonymous_broadcast,
    anonymous_broadcast_identifiable,
    authenticated_broadcast,
    identify_sender,
)

msg = [1, 0, 1, 1, 0, 0, 1, 0]
params = BroadcastParams()

print("honest        :", authenticated_broadcast(Network(4, seed=0), 1, msg, params))
two_faced = Network(4, seed=0, cheats=CheatBook([CheatScript(1, "AUTH_BCAST", "equivocate")]))
print("equivocating  :", authenticated_broadcast(two_faced, 1, msg, params))

# %% a bad relay is denounced and the next one publishes
relays = Network(4, seed=3, cheats=CheatBook([CheatScript(2, "ANON_BCAST", "bad-relay")]))
out = anonymous_broadcast(relays, 0, msg, params, order=[2, 3, 1])
print("relay used    :", out.result["relay"], " failures:", out.result["failures"])

# %% identifiable variant: only the real sender can later claim the message
net = Network(4, seed=5)
h = anonymous_broadcast_identifiable(net, 3, msg, params)
print("published     :", h.msg)
print("claim by P3   :", identify_sender(net, h, 3))
