"""Multi-party computation over anonymous oblivious transfer, as a deterministic simulator."""

from .broadcast import (
    BroadcastParams,
    anonymous_broadcast,
    anonymous_broadcast_identifiable,
    anonymous_send,
    authenticated_broadcast,
    identify_sender,
)
from .codes import LinearCode, build_code
from .commit import (
    Dbc,
    GbcParams,
    Gbcx,
    anonymous_setup,
    commit_proven,
    dbc_create_user,
    gbc_commit,
    gbc_open,
    gbcx_commit,
    gbcx_copy,
    gbcx_open,
    prove_linear,
)
from .core import (
    AdversaryStructure,
    Aborted,
    CheatBook,
    CheaterDetected,
    CheaterIdentified,
    CheatScript,
    ConflictGraph,
    GroupSplit,
    ProtocolAborted,
    Success,
    Transcript,
    monotone_close,
    two_cover_check,
)
from .mac import AuthKey, auth, verify
from .mpc import Circuit, MpcParams, run_protocol
from .ot import GcotParams, gcot, ot12_batch, uot_batch
from .simnet import Network

__version__ = "0.1.0"

__all__ = [
    "AdversaryStructure", "Aborted", "AuthKey", "BroadcastParams", "CheatBook", "CheatScript",
    "CheaterDetected", "CheaterIdentified", "Circuit", "ConflictGraph", "Dbc", "GbcParams", "Gbcx",
    "GcotParams", "GroupSplit", "LinearCode", "MpcParams", "Network", "ProtocolAborted", "Success",
    "Transcript", "anonymous_broadcast", "anonymous_broadcast_identifiable", "anonymous_send",
    "anonymous_setup", "auth", "authenticated_broadcast", "build_code", "commit_proven", "dbc_create_user",
    "gbc_commit", "gbc_open", "gbcx_commit", "gbcx_copy", "gbcx_open", "gcot", "identify_sender",
    "monotone_close", "ot12_batch", "prove_linear", "run_protocol", "two_cover_check", "uot_batch", "verify",
]
