"""Hamiltonian export and bundled-fixture validation."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from tnqas.pauli import exact_ground_energy, parse_hamiltonian_file

from .fci import fci_ground_energy
from .molecules import MOLECULES, MoleculeSpec
from .qubit import active_space_to_pauli_terms
from .scf import make_active_space, run_rhf


@dataclass
class ExportResult:
    spec: MoleculeSpec
    text: str
    hf_energy: float
    fci_energy: float
    n_terms: int


def export_molecule(spec: MoleculeSpec) -> ExportResult:
    """Hamiltonian file text for one molecule, with HF/FCI reference energies."""
    try:
        scf = run_rhf(list(spec.atoms), spec.basis)
        space = make_active_space(scf, spec.active_electrons, spec.active_orbitals)
        terms = active_space_to_pauli_terms(space)
        fci = fci_ground_energy(space)
    except Exception as exc:  # surface the backend failure with the molecule name
        raise RuntimeError(f"chemistry backend failed for {spec.name!r}: {exc}") from exc
    n_qubits = 2 * space.n_active_orbitals
    if n_qubits != spec.n_qubits:
        raise RuntimeError(
            f"{spec.name!r}: produced {n_qubits} qubits, expected {spec.n_qubits}"
        )
    lines = [
        f"# molecule {spec.name}",
        f"# basis {spec.basis}",
        f"# geometry (Angstrom): "
        + "; ".join(f"{s} ({x},{y},{z})" for s, (x, y, z) in spec.atoms),
        f"# active electrons {space.n_active_electrons}, "
        f"active orbitals {space.n_active_orbitals}",
        f"# hf energy {scf.energy!r}",
        f"# fci energy {fci!r}",
        f"qubits {n_qubits}",
    ]
    for coeff, string in terms:
        lines.append(f"{coeff!r} {string}")
    text = "\n".join(lines) + "\n"
    # the file must round-trip through the toolkit parser
    parsed = parse_hamiltonian_file(text)
    if parsed.n_qubits != n_qubits:
        raise RuntimeError(f"{spec.name!r}: parser disagreement on qubit count")
    return ExportResult(
        spec=spec, text=text, hf_energy=scf.energy, fci_energy=fci, n_terms=len(terms)
    )


def export_by_name(name: str) -> ExportResult:
    if name not in MOLECULES:
        raise KeyError(f"unknown molecule {name!r}; known: {sorted(MOLECULES)}")
    return export_molecule(MOLECULES[name])


def write_fixture(result: ExportResult, out_path: str | Path, energies_path: str | Path | None = None) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(result.text, encoding="utf-8")
    if energies_path is not None:
        energies_path = Path(energies_path)
        data = {}
        if energies_path.exists():
            data = json.loads(energies_path.read_text(encoding="utf-8"))
        data[out_path.name] = {
            "molecule": result.spec.name,
            "fci_energy": result.fci_energy,
            "hf_energy": result.hf_energy,
        }
        energies_path.write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")


@dataclass
class FixtureReport:
    checked: list
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def bundled_fixture_check(directory: str | Path, tol: float = 1e-8) -> FixtureReport:
    """Validate every .ham fixture against its stored FCI constant."""
    directory = Path(directory)
    energies_path = directory / "expected_energies.json"
    if not energies_path.exists():
        raise FileNotFoundError(f"missing {energies_path}")
    expected = json.loads(energies_path.read_text(encoding="utf-8"))
    checked = []
    failures = []
    for path in sorted(directory.glob("*.ham")):
        entry = expected.get(path.name)
        if entry is None:
            failures.append((path.name, "no stored reference energy"))
            continue
        try:
            h = parse_hamiltonian_file(path.read_text(encoding="utf-8"))
            energy = exact_ground_energy(h)[0]
        except Exception as exc:
            failures.append((path.name, f"parse/diagonalization failed: {exc}"))
            continue
        delta = abs(energy - entry["fci_energy"])
        checked.append((path.name, energy, delta))
        if delta > tol:
            failures.append((path.name, f"ground energy off by {delta:.3e}"))
    return FixtureReport(checked=checked, failures=failures)
