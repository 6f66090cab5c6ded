"""Molecular qubit-Hamiltonian exporter: RHF + active space + Jordan-Wigner."""

from .basis import build_basis
from .export import ExportResult, bundled_fixture_check, export_by_name, export_molecule, write_fixture
from .fci import fci_ground_energy
from .molecules import MOLECULES, MoleculeSpec
from .qubit import active_space_to_pauli_terms
from .scf import ActiveSpace, ScfResult, make_active_space, run_rhf

__version__ = "0.1.0"

__all__ = [
    "MOLECULES", "MoleculeSpec", "ScfResult", "ActiveSpace",
    "run_rhf", "make_active_space", "build_basis",
    "active_space_to_pauli_terms", "fci_ground_energy",
    "export_molecule", "export_by_name", "write_fixture",
    "bundled_fixture_check", "ExportResult",
]
