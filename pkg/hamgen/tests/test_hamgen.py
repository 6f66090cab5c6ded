import json
from pathlib import Path

import numpy as np
import pytest

from hamgen import (
    MOLECULES,
    active_space_to_pauli_terms,
    bundled_fixture_check,
    export_by_name,
    fci_ground_energy,
    make_active_space,
    run_rhf,
    write_fixture,
)
from hamgen.basis import build_basis
from hamgen.integrals import boys, eri_tensor, kinetic_matrix, nuclear_matrix, overlap_matrix
from hamgen import cli

from tnqas.pauli import PauliSum, exact_ground_energy, parse_hamiltonian_file, serialize_hamiltonian


H2_ATOMS = [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.74))]


class TestIntegrals:
    def test_boys_zero_limit(self):
        for m in range(4):
            assert boys(m, 0.0) == pytest.approx(1.0 / (2 * m + 1), abs=1e-12)

    def test_boys_zeroth_closed_form(self):
        from scipy.special import erf
        for x in (0.1, 0.5, 2.0, 9.0):
            expected = 0.5 * np.sqrt(np.pi / x) * erf(np.sqrt(x))
            assert boys(0, x) == pytest.approx(expected, rel=1e-12)

    def test_basis_functions_normalized(self):
        basis = build_basis([("O", (0.0, 0.0, 0.0))], "sto-3g")
        s = overlap_matrix(basis)
        assert np.allclose(np.diag(s), 1.0, atol=1e-10)

    def test_integral_matrices_symmetric(self):
        basis = build_basis(H2_ATOMS, "sto-3g")
        from hamgen.basis import nuclear_charges
        charges = nuclear_charges(H2_ATOMS)
        for mat in (overlap_matrix(basis), kinetic_matrix(basis), nuclear_matrix(basis, charges)):
            assert np.allclose(mat, mat.T, atol=1e-12)

    def test_eri_eightfold_symmetry(self):
        basis = build_basis(H2_ATOMS, "sto-3g")
        eri = eri_tensor(basis)
        assert np.allclose(eri, eri.transpose(1, 0, 2, 3), atol=1e-12)
        assert np.allclose(eri, eri.transpose(0, 1, 3, 2), atol=1e-12)
        assert np.allclose(eri, eri.transpose(2, 3, 0, 1), atol=1e-12)

    def test_h2_textbook_integrals(self):
        # Szabo-Ostlund Table 3.5-ish values at R = 1.4 bohr (0.7408 A)
        atoms = [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.4 / 1.8897259886))]
        basis = build_basis(atoms, "sto-3g")
        s = overlap_matrix(basis)
        t = kinetic_matrix(basis)
        assert s[0, 1] == pytest.approx(0.6593, abs=2e-4)
        assert t[0, 0] == pytest.approx(0.7600, abs=2e-4)
        eri = eri_tensor(basis)
        assert eri[0, 0, 0, 0] == pytest.approx(0.7746, abs=2e-4)


class TestScf:
    def test_h2_hf_energy_textbook(self):
        scf = run_rhf(H2_ATOMS, "sto-3g")
        # RHF/STO-3G total energy near equilibrium
        assert scf.energy == pytest.approx(-1.1167, abs=2e-3)

    def test_h2_fci_matches_literature(self):
        scf = run_rhf(H2_ATOMS, "sto-3g")
        space = make_active_space(scf)
        fci = fci_ground_energy(space)
        assert fci == pytest.approx(-1.13728, abs=2e-3)
        assert fci < scf.energy  # correlation lowers the energy

    def test_active_space_window_validation(self):
        scf = run_rhf(H2_ATOMS, "sto-3g")
        with pytest.raises(ValueError):
            make_active_space(scf, n_active_electrons=2, n_active_orbitals=5)
        with pytest.raises(ValueError):
            make_active_space(scf, n_active_electrons=1)


class TestJordanWigner:
    def test_h2_fci_cross_check(self):
        scf = run_rhf(H2_ATOMS, "sto-3g")
        space = make_active_space(scf)
        terms = active_space_to_pauli_terms(space)
        h = PauliSum(4, terms)
        dense = exact_ground_energy(h)[0]
        assert dense == pytest.approx(fci_ground_energy(space), abs=1e-8)

    def test_all_coefficients_real_and_hermitian(self):
        scf = run_rhf(H2_ATOMS, "sto-3g")
        space = make_active_space(scf)
        terms = active_space_to_pauli_terms(space)
        for coeff, _ in terms:
            assert isinstance(coeff, float)

    def test_particle_number_expectation(self):
        # <HF determinant| H |HF determinant> equals the SCF energy for H2
        scf = run_rhf(H2_ATOMS, "sto-3g")
        space = make_active_space(scf)
        terms = active_space_to_pauli_terms(space)
        h = PauliSum(4, terms)
        from tnqas.pauli import to_dense_matrix
        hf_index = 0b1100  # both spin orbitals of the lowest MO occupied
        mat = to_dense_matrix(h)
        assert mat[hf_index, hf_index].real == pytest.approx(scf.energy, abs=1e-10)


class TestExport:
    def test_h2_round_trip(self):
        result = export_by_name("h2")
        h = parse_hamiltonian_file(result.text)
        assert h.n_qubits == 4
        assert exact_ground_energy(h)[0] == pytest.approx(result.fci_energy, abs=1e-8)
        h2 = parse_hamiltonian_file(serialize_hamiltonian(h))
        assert h2 == h

    def test_beh2_qubit_label(self):
        result = export_by_name("beh2")
        assert parse_hamiltonian_file(result.text).n_qubits == 6

    def test_qubit_labels_match_table(self):
        # every molecule spec's label equals twice its active orbital count
        for name, spec in MOLECULES.items():
            if spec.active_orbitals is not None:
                assert spec.n_qubits == 2 * spec.active_orbitals

    def test_unknown_molecule(self):
        with pytest.raises(KeyError):
            export_by_name("unobtainium")


class TestFixtures:
    def test_valid_fixture_dir_passes(self, tmp_path):
        result = export_by_name("h2")
        write_fixture(result, tmp_path / "h2.ham", tmp_path / "expected_energies.json")
        report = bundled_fixture_check(tmp_path)
        assert report.ok
        assert len(report.checked) == 1

    def test_corrupted_coefficient_fails_by_name(self, tmp_path):
        result = export_by_name("h2")
        write_fixture(result, tmp_path / "h2.ham", tmp_path / "expected_energies.json")
        text = (tmp_path / "h2.ham").read_text()
        lines = text.splitlines()
        for i, line in enumerate(lines):
            if line and not line.startswith("#") and not line.startswith("qubits"):
                coeff, string = line.split()
                lines[i] = f"{float(coeff) + 0.05!r} {string}"
                break
        (tmp_path / "h2.ham").write_text("\n".join(lines) + "\n")
        report = bundled_fixture_check(tmp_path)
        assert not report.ok
        assert report.failures[0][0] == "h2.ham"
        assert "off by" in report.failures[0][1]

    def test_missing_header_surfaces_parse_error(self, tmp_path):
        (tmp_path / "bad.ham").write_text("1.0 ZZ\n")
        (tmp_path / "expected_energies.json").write_text(
            json.dumps({"bad.ham": {"fci_energy": -1.0, "hf_energy": -1.0}})
        )
        report = bundled_fixture_check(tmp_path)
        assert not report.ok
        assert "parse" in report.failures[0][1]

    def test_shipped_fixtures_pass(self):
        fixtures = Path(__file__).resolve().parents[2] / "fixtures" / "molecules"
        report = bundled_fixture_check(fixtures)
        assert report.ok
        assert len(report.checked) >= 2


class TestCli:
    def test_export_and_check(self, tmp_path, capsys):
        rc = cli.main(["export", "--molecule", "h2",
                       "--out", str(tmp_path / "h2.ham"),
                       "--energies", str(tmp_path / "expected_energies.json")])
        assert rc == 0
        rc = cli.main(["check", "--dir", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "ok" in out
