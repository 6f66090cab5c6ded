import numpy as np
import pytest
from scipy.stats import unitary_group

from tnqas.simulator import rotation_matrix, run_circuit, zero_state
from tnqas.stiefel import BrickworkLayout, UnitaryStack, perturbed_identity_stack
from tnqas.kak import (
    CNOT01,
    SWAP,
    kak_decompose,
    transpile_stack,
    two_qubit_matrix,
    zyz_decompose,
)


def rebuild(gates, phase):
    return np.exp(1j * phase) * two_qubit_matrix(gates)


class TestZyz:
    def test_identity(self):
        alpha, beta, gamma, phase = zyz_decompose(np.eye(2, dtype=complex))
        assert beta == pytest.approx(0.0, abs=1e-12)
        assert phase == pytest.approx(0.0, abs=1e-12)
        assert (alpha + gamma) % (2 * np.pi) == pytest.approx(0.0, abs=1e-10)

    def test_pure_ry(self):
        alpha, beta, gamma, phase = zyz_decompose(rotation_matrix("RY", 0.3))
        assert beta == pytest.approx(0.3, abs=1e-12)
        assert alpha == pytest.approx(0.0, abs=1e-10)
        assert gamma == pytest.approx(0.0, abs=1e-10)

    def test_beta_in_range_and_gimbal_convention(self):
        rng = np.random.default_rng(0)
        for u in (rotation_matrix("RZ", 1.1), -rotation_matrix("RZ", 0.4)):
            alpha, beta, gamma, phase = zyz_decompose(u)
            assert beta in (pytest.approx(0.0, abs=1e-9), pytest.approx(np.pi, abs=1e-9))
            assert gamma == 0.0

    def test_haar_random_reconstruction(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(1000):
            u = unitary_group.rvs(2, random_state=rng)
            alpha, beta, gamma, phase = zyz_decompose(u)
            rebuilt = (
                np.exp(1j * phase)
                * rotation_matrix("RZ", alpha)
                @ rotation_matrix("RY", beta)
                @ rotation_matrix("RZ", gamma)
            )
            worst = max(worst, np.max(np.abs(rebuilt - u)))
            assert 0.0 <= beta <= np.pi + 1e-12
        assert worst <= 1e-10


class TestKak:
    def test_identity(self):
        gates, phase = kak_decompose(np.eye(4, dtype=complex))
        assert sum(1 for g in gates if g.kind == "CNOT") == 3
        assert np.max(np.abs(rebuild(gates, phase) - np.eye(4))) <= 1e-9

    def test_swap(self):
        gates, phase = kak_decompose(SWAP)
        assert sum(1 for g in gates if g.kind == "CNOT") == 3
        assert np.max(np.abs(rebuild(gates, phase) - SWAP)) <= 1e-9

    def test_cnot_itself(self):
        gates, phase = kak_decompose(CNOT01)
        assert sum(1 for g in gates if g.kind == "CNOT") == 3
        assert np.max(np.abs(rebuild(gates, phase) - CNOT01)) <= 1e-9

    def test_local_tensor_product(self):
        rng = np.random.default_rng(2)
        u = np.kron(unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng))
        gates, phase = kak_decompose(u)
        assert sum(1 for g in gates if g.kind == "CNOT") == 3
        assert np.max(np.abs(rebuild(gates, phase) - u)) <= 1e-8

    def test_haar_random_thousand(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(1000):
            u = unitary_group.rvs(4, random_state=rng)
            gates, phase = kak_decompose(u)
            assert sum(1 for g in gates if g.kind == "CNOT") == 3
            worst = max(worst, np.max(np.abs(rebuild(gates, phase) - u)))
        assert worst <= 1e-8

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            kak_decompose(np.ones((4, 4), dtype=complex))


class TestTranspile:
    def test_cnot_count_law(self):
        # one-layer brickwork: exactly 3(n-1) CNOTs
        rng = np.random.default_rng(4)
        expected = {5: 12, 6: 15, 8: 21, 10: 27, 12: 33}
        for n, cnots in expected.items():
            layout = BrickworkLayout(n)
            stack = UnitaryStack(
                layout, [unitary_group.rvs(4, random_state=rng) for _ in layout.pairs]
            )
            circuit = transpile_stack(stack)
            assert circuit.count_gates()[0] == cnots

    def test_identity_stack_preserves_zero_state(self):
        layout = BrickworkLayout(4)
        circuit = transpile_stack(UnitaryStack.identity(layout))
        psi = run_circuit(zero_state(4), circuit)
        assert abs(psi[0]) == pytest.approx(1.0, abs=1e-9)

    def test_state_fidelity_random_stacks(self):
        rng = np.random.default_rng(5)
        for n in (3, 5, 8):
            layout = BrickworkLayout(n)
            stack = UnitaryStack(
                layout, [unitary_group.rvs(4, random_state=rng) for _ in layout.pairs]
            )
            circuit = transpile_stack(stack)
            psi_stack = stack.state()
            psi_circ = run_circuit(zero_state(n), circuit)
            assert abs(np.vdot(psi_stack, psi_circ)) >= 1 - 1e-7

    def test_perturbed_identity_fidelity(self):
        rng = np.random.default_rng(6)
        layout = BrickworkLayout(6)
        stack = perturbed_identity_stack(layout, rng, scale=0.5)
        circuit = transpile_stack(stack)
        psi_stack = stack.state()
        psi_circ = run_circuit(zero_state(6), circuit)
        assert abs(np.vdot(psi_stack, psi_circ)) >= 1 - 1e-7

    def test_transpiled_warm_start_overlap_equals_fit_loss(self):
        # |<mps | circuit |0...0>>| reproduces the fit's reported loss
        from tnqas import pauli
        from tnqas.tensornet import DmrgConfig, dmrg_ground_state, mpo_from_pauli_sum
        from tnqas.stiefel import FitConfig, fit_mps_to_circuit
        from tnqas.tensornet import statevector_from_mps

        h = pauli.build_tfim(6, 0.05)
        dmrg = dmrg_ground_state(
            mpo_from_pauli_sum(h), DmrgConfig(chi_max=2), rng=np.random.default_rng(42)
        )
        fit = fit_mps_to_circuit(
            dmrg.mps, BrickworkLayout(6), FitConfig(max_iters=800),
            rng=np.random.default_rng(3),
        )
        circuit = transpile_stack(fit.stack)
        psi = run_circuit(zero_state(6), circuit)
        overlap = abs(np.vdot(statevector_from_mps(dmrg.mps), psi))
        assert overlap == pytest.approx(fit.loss, abs=1e-8)
