"""Molecule table: geometries, bases, and active spaces per qubit label.

Coordinates in Angstrom. The formaldehyde entry in the source table lists
only C, H, H; the oxygen below completes it along the bisector opposite
the hydrogens at a standard 1.21 A C=O distance, and the fixture is
excluded from any literature-number comparison.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MoleculeSpec:
    name: str
    atoms: tuple            # (symbol, (x, y, z)) in Angstrom
    basis: str
    n_qubits: int           # 2 * active orbitals
    active_electrons: int | None = None
    active_orbitals: int | None = None

    def __post_init__(self):
        for _, coords in self.atoms:
            if not all(abs(c) < 1e3 for c in coords):
                raise ValueError("coordinates out of range")
        if self.active_orbitals is not None and self.n_qubits != 2 * self.active_orbitals:
            raise ValueError("qubit label must equal twice the active orbital count")


MOLECULES = {
    "h2": MoleculeSpec(
        name="h2",
        atoms=(("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.74))),
        basis="sto-3g",
        n_qubits=4,
    ),
    "beh2": MoleculeSpec(
        name="beh2",
        atoms=(("H", (0.0, 0.0, -1.33)), ("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.33))),
        basis="sto-3g",
        n_qubits=6,
        active_electrons=4,
        active_orbitals=3,
    ),
    "h2o": MoleculeSpec(
        name="h2o",
        atoms=(("H", (-0.02, -0.0, 0.0)), ("O", (0.84, 0.45, 0.0)), ("H", (1.48, -0.27, 0.0))),
        basis="sto-3g",
        n_qubits=8,
        active_electrons=4,
        active_orbitals=4,
    ),
    "h2o_631g": MoleculeSpec(
        name="h2o_631g",
        atoms=(("H", (-0.02, -0.0, 0.0)), ("O", (0.84, 0.45, 0.0)), ("H", (1.48, -0.27, 0.0))),
        basis="6-31g",
        n_qubits=10,
        active_electrons=4,
        active_orbitals=5,
    ),
    "ch2o": MoleculeSpec(
        name="ch2o",
        atoms=(
            ("C", (0.0, 0.0, 0.0)),
            ("H", (1.08, 0.0, 0.0)),
            ("H", (-0.23, 1.06, 0.0)),
            # completed geometry: source table omits the oxygen
            ("O", (-0.760, -0.941, 0.0)),
        ),
        basis="sto-3g",
        n_qubits=8,
        active_electrons=4,
        active_orbitals=4,
    ),
    "lih": MoleculeSpec(
        name="lih",
        atoms=(("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 3.40))),
        basis="sto-3g",
        n_qubits=12,
    ),
}
