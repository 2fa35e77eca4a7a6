"""Three players compute the majority of their bits.

Each input becomes a distributed commitment, AND gates run a GCOT per
pair of players, and the output shares are opened one by one.
"""

from importlib import resources

from aotmpc import CheatBook, CheatScript, Circuit, Network, run_protocol

circuit = Circuit.parse(resources.files("aotmpc").joinpath("circuits", "majority3.txt").read_text())
inputs = {"w1": 1, "w2": 0, "w3": 1}

net = Network(3, seed=0)
print("majority(1,0,1):", run_protocol(net, circuit, inputs))
print("events recorded:", len(net.transcript))

# %% a player who refuses to open its output share is named
quitter = Network(3, seed=0, cheats=CheatBook([CheatScript(2, "REVEAL", "withhold")]))
print("P2 withholds    :", run_protocol(quitter, circuit, inputs))
