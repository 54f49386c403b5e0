"""Molecule-cavity polaritons in the polarized Fock state basis.

A diatomic molecule with ionic and covalent diabatic states is coupled to one
cavity mode through the Pauli-Fierz Hamiltonian. The photon field seen by each
diabat is a displaced (polarized) Fock ladder, which absorbs the permanent
dipole and dipole self-energy terms exactly.

Hartree atomic units (hbar = 1) are used throughout; electron volts appear only
at the configuration boundary.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainError, NumericalError, OracleError,
                     PolFockError, TruncationError)
from .fock import Displacement, FockSpace, displacement_overlaps, overlap_matrix
from .hamiltonian import BasisKind, BasisSpec, Variant, build_hpl, eigensolve_field
from .model import DiabaticModel, adiabatize, get_model, lif_default
from .dynamics import Grid, HybridSystem, SplitOperator, Wavepacket, initial_state

__all__ = [
    "__version__",
    "ConfigError", "DomainError", "NumericalError", "OracleError",
    "PolFockError", "TruncationError",
    "Displacement", "FockSpace", "displacement_overlaps", "overlap_matrix",
    "BasisKind", "BasisSpec", "Variant", "build_hpl", "eigensolve_field",
    "DiabaticModel", "adiabatize", "get_model", "lif_default",
    "Grid", "HybridSystem", "SplitOperator", "Wavepacket", "initial_state",
]
