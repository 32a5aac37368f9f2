"""Two-qubit quantum discord, zero-discord canonical forms, discord activation
by nonlocal unitaries and remote-state-preparation fidelity."""

from .bloch import BlochState, from_bloch, reduced_states, to_bloch, validate
from .canonical import classify, classify_both, is_zero_discord, svd_canonicalize
from .discord import analyze, discord, geometric_discord, mutual_information
from .prescribe import activate, prescribe
from .rsp import modified_protocol, phi_case_angles, rsp_fidelity, simulate_singlet_rsp
from .unitary import (
    GlobalUnitarySpec,
    LocalRotationPair,
    NonlocalAngles,
    apply_global,
    apply_local,
    apply_nonlocal,
)

__version__ = "0.1.0"

__all__ = [
    "BlochState",
    "GlobalUnitarySpec",
    "LocalRotationPair",
    "NonlocalAngles",
    "activate",
    "analyze",
    "apply_global",
    "apply_local",
    "apply_nonlocal",
    "classify",
    "classify_both",
    "discord",
    "from_bloch",
    "geometric_discord",
    "is_zero_discord",
    "modified_protocol",
    "mutual_information",
    "phi_case_angles",
    "prescribe",
    "reduced_states",
    "rsp_fidelity",
    "simulate_singlet_rsp",
    "svd_canonicalize",
    "to_bloch",
    "validate",
]
