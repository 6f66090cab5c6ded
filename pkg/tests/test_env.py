import numpy as np
import pytest
from scipy.special import comb

from tnqas import pauli
from tnqas.circuits import Circuit, GateOp
from tnqas.env import (
    ActionSpace,
    CurriculumState,
    EnvConfig,
    EpisodeOutcome,
    QasEnv,
    WarmStart,
    compute_reward,
    curriculum_update,
    halting_pmf,
    legal_actions_mask,
    sample_episode_length,
    xi_new,
)
from tnqas.simulator import expectation, run_circuit, zero_state


def make_warmstart(n, rng):
    gates = [GateOp("RY", (q,), angle=float(rng.normal())) for q in range(n)]
    gates.append(GateOp("CNOT", (0, 1)))
    circuit = Circuit(n, gates)
    return WarmStart(circuit=circuit, statevector=run_circuit(zero_state(n), circuit))


class TestActionSpace:
    def test_size_formula(self):
        for n in (2, 3, 4, 6):
            space = ActionSpace(n)
            assert space.size == 3 * n + 2 * comb(n, 2, exact=True)

    def test_n4_count(self):
        assert ActionSpace(4).size == 24

    def test_bijection(self):
        space = ActionSpace(5)
        seen = set()
        for idx in range(space.size):
            g = space.gate(idx)
            key = (g.kind, g.qubits)
            assert key not in seen
            seen.add(key)
            assert space.index(g) == idx

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            ActionSpace(3).gate(100)


class TestLegalActions:
    def test_fresh_state_all_legal(self):
        space = ActionSpace(4)
        mask = legal_actions_mask(space, None)
        assert mask.all() and mask.size == 24

    def test_repeat_rotation_masked(self):
        space = ActionSpace(4)
        last = GateOp("RX", (2,), angle=0.3)
        mask = legal_actions_mask(space, last)
        assert not mask[space.index(last)]
        assert mask[space.index(GateOp("RY", (2,), angle=0.0))]
        assert mask.sum() == 23

    def test_cnot_same_direction_masked_only(self):
        space = ActionSpace(4)
        last = GateOp("CNOT", (0, 1))
        mask = legal_actions_mask(space, last)
        assert not mask[space.index(GateOp("CNOT", (0, 1)))]
        assert mask[space.index(GateOp("CNOT", (1, 0)))]


class TestReward:
    def test_success_branch(self):
        assert compute_reward(c_t=-1.999, c_prev=-1.0, xi=1e-2, t=1, cap=10,
                              c_min=-2.0, e_ref=-2.0) == 5.0

    def test_timeout_branch(self):
        assert compute_reward(c_t=-1.0, c_prev=-1.0, xi=1e-2, t=10, cap=10,
                              c_min=-2.0, e_ref=-2.0) == -5.0

    def test_intermediate_branch(self):
        r = compute_reward(c_t=-1.5, c_prev=-1.0, xi=1e-3, t=3, cap=10,
                           c_min=-2.0, e_ref=-2.0)
        assert r == pytest.approx(0.5)

    def test_clamp_at_minus_one(self):
        r = compute_reward(c_t=5.0, c_prev=-1.0, xi=1e-3, t=3, cap=10,
                           c_min=-2.0, e_ref=-2.0)
        assert r == -1.0

    def test_degenerate_denominator(self):
        r = compute_reward(c_t=-1.0, c_prev=-2.0, xi=1e-9, t=1, cap=10,
                           c_min=-2.0, e_ref=-2.0)
        assert r == 0.0

    def test_success_wins_over_timeout(self):
        assert compute_reward(c_t=-1.9999, c_prev=-1.0, xi=1e-2, t=10, cap=10,
                              c_min=-2.0, e_ref=-2.0) == 5.0

    def test_bounded(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            c_min = -3.0
            c_prev = float(rng.uniform(c_min + 1e-6, 2.0))
            c_t = float(rng.uniform(c_min, 2.0))
            r = compute_reward(c_t, c_prev, 1e-3, int(rng.integers(1, 10)), 10, c_min, c_min)
            assert -5.0 <= r <= 5.0
            if r not in (5.0, -5.0):
                assert -1.0 <= r <= 1.0 + 1e-12


class TestCurriculum:
    def base(self, **kw):
        defaults = dict(xi=1e-2, best_energy=-2.0, mu=-2.15, delta=1e-4, kappa=10.0,
                        period=500, stagnation_limit=500, success_window=50)
        defaults.update(kw)
        return CurriculumState(**defaults)

    def test_xi_new_formula(self):
        assert xi_new(-2.15, -2.0, 1e-4) == pytest.approx(0.1501)

    def test_success_decrement_every_50(self):
        cs = self.base(xi=0.1501, successes=49)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-1.0, success=True))
        assert cs2.xi == pytest.approx(0.1501 - 1e-5)
        assert cs2.successes == 50

    def test_success_not_yet_50(self):
        cs = self.base(xi=0.1501, successes=10)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-1.0, success=True))
        assert cs2.xi == pytest.approx(0.1501)

    def test_stagnation_reset(self):
        cs = self.base(stagnation=500)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-1.0, success=False))
        assert cs2.xi == pytest.approx(abs(-2.15 - (-2.0)) + 2e-4)  # xi_new + delta
        assert cs2.stagnation == 1  # reset, then no improvement this episode

    def test_periodic_greedy_shift(self):
        cs = self.base(episodes=499)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-1.0, success=False))
        assert cs2.episodes == 500
        assert cs2.xi == pytest.approx(abs(-2.15 - (-2.0)))

    def test_best_energy_update_resets_stagnation(self):
        cs = self.base(stagnation=42)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-2.5, success=False))
        assert cs2.best_energy == -2.5
        assert cs2.stagnation == 0

    def test_no_improvement_increments_stagnation(self):
        cs = self.base(stagnation=7)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-1.0, success=False))
        assert cs2.stagnation == 8

    def test_xi_floor_positive(self):
        cs = self.base(xi=1.5e-5, successes=49)
        cs2 = curriculum_update(cs, EpisodeOutcome(best_energy=-1.0, success=True))
        assert cs2.xi == pytest.approx(cs.delta)  # clamped at delta
        for _ in range(5):
            cs2 = curriculum_update(cs2, EpisodeOutcome(best_energy=-1.0, success=True))
            assert cs2.xi > 0

    def test_update_is_pure(self):
        cs = self.base()
        curriculum_update(cs, EpisodeOutcome(best_energy=-5.0, success=True))
        assert cs.best_energy == -2.0 and cs.episodes == 0


class TestHalting:
    def test_pmf_sums_to_one(self):
        pmf = halting_pmf(20, 0.1)
        assert pmf.sum() == pytest.approx(1.0, abs=1e-9)

    def test_small_p_concentrates_at_full_length(self):
        rng = np.random.default_rng(0)
        caps = [sample_episode_length(15, 1e-4, rng) for _ in range(2000)]
        values, counts = np.unique(caps, return_counts=True)
        assert values[np.argmax(counts)] == 15

    def test_cap_range(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            cap = sample_episode_length(10, 0.4, rng)
            assert 1 <= cap <= 10

    def test_disabled_means_full_length(self):
        h = pauli.build_tfim(2, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=7, budget=20))
        env.reset()
        assert env.cap == 7

    def test_matches_analytic_pmf(self):
        n_act, p = 12, 0.25
        pmf = halting_pmf(n_act, p)
        raw = np.array([
            comb(n_act - 1, k, exact=True) * p**k * (1 - p) ** (n_act - k)
            for k in range(n_act)
        ])
        assert np.allclose(pmf, raw / raw.sum(), atol=1e-12)
        rng = np.random.default_rng(2)
        samples = np.array([sample_episode_length(n_act, p, rng) for _ in range(20000)])
        for k in range(n_act):
            emp = np.mean(samples == n_act - k)
            assert emp == pytest.approx(pmf[k], abs=0.02)

    def test_param_validation(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValueError):
            sample_episode_length(10, 0.0, rng)
        with pytest.raises(ValueError):
            sample_episode_length(0, 0.5, rng)


class TestObservation:
    def test_empty_vanilla_all_zeros(self):
        h = pauli.build_tfim(4, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=6, budget=20))
        obs = env.reset()
        assert obs.binary.shape == (6, 4, 7)
        assert not obs.binary.any()
        assert not obs.angles.any()

    def test_single_rx_encoding(self):
        h = pauli.build_tfim(4, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=6, budget=20))
        env.reset()
        env.step(env.space.index(GateOp("RX", (0,), angle=0.0)))
        obs = env.encode_observation()
        assert obs.binary.sum() == 1
        assert obs.binary[0, 0, 4] == 1.0  # slot 0, qubit 0, X plane

    def test_cnot_encoding_cell(self):
        h = pauli.build_tfim(4, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=6, budget=20))
        env.reset()
        env.step(env.space.index(GateOp("CNOT", (2, 0))))
        obs = env.encode_observation()
        assert obs.binary[0, 2, 0] == 1.0
        assert obs.binary.sum() == 1

    def test_fixed_variant_contains_no_warmstart_rows(self):
        rng = np.random.default_rng(4)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        env = QasEnv(h, EnvConfig(variant="fixed", max_steps=5, budget=20), warmstart=warm)
        obs = env.reset()
        assert obs.binary.shape == (5, 3, 6)  # D x N x (N+3), no warm-start prefix
        assert not obs.binary.any()
        # energy still reflects the warm start
        assert env.c_t == pytest.approx(expectation(warm.statevector, h))

    def test_trainable_variant_has_prefix(self):
        rng = np.random.default_rng(5)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        env = QasEnv(h, EnvConfig(variant="trainable", max_steps=5, budget=20), warmstart=warm)
        obs = env.reset()
        d_mps = warm.circuit.depth()
        assert obs.binary.shape == (d_mps + 5, 3, 6)
        assert obs.binary[:d_mps].sum() == len(warm.circuit.gates)
        # fitted angles appear in the auxiliary angle tensor
        assert obs.angles[:d_mps].any()

    def test_encoding_injective_on_sequences(self):
        h = pauli.build_tfim(3, 0.05)
        seen = {}
        space = ActionSpace(3)
        rng = np.random.default_rng(6)
        for trial in range(40):
            env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=4, budget=2))
            env.reset()
            seq = []
            for _ in range(3):
                mask = env.legal_actions()
                a = int(rng.choice(np.flatnonzero(mask)))
                seq.append(a)
                _, _, done, _ = env.step(a)
                if done:
                    break
            key = obs_key = env.encode_observation().binary.tobytes()
            if tuple(seq) in seen:
                assert seen[tuple(seq)] == obs_key
            else:
                for other_seq, other_key in seen.items():
                    if other_key == obs_key:
                        assert other_seq == tuple(seq)
                seen[tuple(seq)] = obs_key


class TestEnvLifecycle:
    def test_vanilla_reset_energy(self):
        h = pauli.build_tfim(3, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=5, budget=20))
        env.reset()
        assert env.c_t == pytest.approx(expectation(zero_state(3), h))

    def test_fixed_reset_energy_matches_warmstart(self):
        rng = np.random.default_rng(7)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        env = QasEnv(h, EnvConfig(variant="fixed", max_steps=5, budget=20), warmstart=warm)
        env.reset()
        assert env.c_t == pytest.approx(expectation(warm.statevector, h), abs=1e-12)

    def test_structure_reset_equals_zero_angle_circuit(self):
        rng = np.random.default_rng(8)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        env = QasEnv(h, EnvConfig(variant="structure", max_steps=5, budget=20), warmstart=warm)
        env.reset()
        zeroed = warm.circuit.with_angles(np.zeros(warm.circuit.n_params))
        expected = expectation(run_circuit(zero_state(3), zeroed), h)
        assert env.c_t == pytest.approx(expected, abs=1e-12)

    def test_missing_artifacts_rejected(self):
        h = pauli.build_tfim(3, 0.05)
        with pytest.raises(ValueError):
            QasEnv(h, EnvConfig(variant="fixed"))

    def test_illegal_action_rejected(self):
        h = pauli.build_tfim(3, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=5, budget=20))
        env.reset()
        a = env.space.index(GateOp("RZ", (1,), angle=0.0))
        env.step(a)
        with pytest.raises(ValueError, match="illegal"):
            env.step(a)

    def test_success_ends_episode_with_plus_five(self):
        # vanilla TFIM(2): a single optimized RY pair cannot fully solve it,
        # so drive with a huge xi to force the success branch
        h = pauli.build_tfim(2, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=5, budget=50, xi_init=10.0))
        env.reset()
        _, reward, done, info = env.step(0)
        assert reward == 5.0 and done and info["success"]

    def test_timeout_gives_minus_five(self):
        h = pauli.build_tfim(2, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=1, budget=2, xi_init=1e-12))
        env.reset()
        _, reward, done, info = env.step(0)
        assert done and not info["success"] and reward == -5.0

    def test_nfev_reported(self):
        h = pauli.build_tfim(2, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=3, budget=40))
        env.reset()
        _, _, _, info = env.step(0)
        assert 1 <= info["nfev"] <= 40

    def test_fixed_variant_param_count_stays_small(self):
        # frozen warm start: per-step trainable parameters = agent rotations only
        rng = np.random.default_rng(9)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        env_f = QasEnv(h, EnvConfig(variant="fixed", max_steps=4, budget=20), warmstart=warm)
        env_t = QasEnv(h, EnvConfig(variant="trainable", max_steps=4, budget=20), warmstart=warm)
        env_f.reset()
        env_t.reset()
        a = env_f.space.index(GateOp("RY", (1,), angle=0.0))
        env_f.step(a)
        env_t.step(a)
        assert env_f.circuit.n_params == 1
        assert env_t.circuit.n_params == warm.circuit.n_params + 1
        assert env_f.circuit.n_params < env_t.circuit.n_params

    def test_curriculum_advances_on_end_episode(self):
        h = pauli.build_tfim(2, 0.05)
        env = QasEnv(h, EnvConfig(variant="vanilla", max_steps=2, budget=10, xi_init=10.0))
        env.reset()
        env.step(0)
        env.end_episode()
        assert env.curriculum.episodes == 1
        assert env.curriculum.successes == 1

    def test_fixed_variant_warm_start_enters_noiselessly(self):
        # noisy backend: depolarizing applies to agent-added gates only in
        # fixed mode; the warm-start statevector itself is not degraded
        rng = np.random.default_rng(10)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        cfg = EnvConfig(variant="fixed", max_steps=3, budget=10, backend="noisy",
                        noise_p1=0.5, noise_p2=0.5)
        env = QasEnv(h, cfg, warmstart=warm)
        env.reset()
        assert env.c_t == pytest.approx(expectation(warm.statevector, h), abs=1e-10)

    def test_trainable_variant_noise_hits_warm_gates(self):
        rng = np.random.default_rng(11)
        h = pauli.build_tfim(3, 0.05)
        warm = make_warmstart(3, rng)
        cfg = EnvConfig(variant="trainable", max_steps=3, budget=10, backend="noisy",
                        noise_p1=0.5, noise_p2=0.5)
        env = QasEnv(h, cfg, warmstart=warm)
        env.reset()
        clean = expectation(warm.statevector, h)
        assert abs(env.c_t - clean) > 1e-3  # strong depolarizing visibly degrades
