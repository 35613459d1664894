"""Compile real qubit Hamiltonians into ZZXX or ZX interaction sets with
perturbative gadgets, and build and check circuit history Hamiltonians."""

__version__ = "0.1.0"

from .pauli import (  # noqa: E402
    INTERACTION_SETS,
    REAL_SUBSET,
    ZX,
    ZZXX,
    OperatorSum,
    PauliString,
    parse_hamiltonian,
    pauli,
    realize_matrix,
    validate_interaction_set,
)
from .circuits import Circuit, cnot, r_gate, x_gate, xz_mix_gate  # noqa: E402
from .history import build_history_state, build_total  # noqa: E402
from .gadgets import (  # noqa: E402
    Kind,
    build_xx_from_zx,
    build_zx_from_zzxx,
    build_zz_from_zx,
    compile_hamiltonian,
)
from .spectral import eigensolve, gap_sweep, ground_overlap  # noqa: E402

__all__ = [
    "INTERACTION_SETS", "REAL_SUBSET", "ZX", "ZZXX", "OperatorSum", "PauliString",
    "parse_hamiltonian", "pauli", "realize_matrix", "validate_interaction_set",
    "Circuit", "cnot", "r_gate", "x_gate", "xz_mix_gate",
    "build_history_state", "build_total",
    "Kind", "build_xx_from_zx", "build_zx_from_zzxx", "build_zz_from_zx", "compile_hamiltonian",
    "eigensolve", "gap_sweep", "ground_overlap",
]
