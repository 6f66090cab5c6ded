"""RL environment for gate-by-gate circuit construction.

Four variants share one action space and reward:
  vanilla    - empty circuit on |0...0>,
  fixed      - empty circuit on the warm-start statevector (the agent never
               sees or trains the warm-start parameters),
  trainable  - circuit preloaded with the warm-start gates and their fitted
               angles, all trainable,
  structure  - warm-start gates with zeroed angles.

Appended rotations start at angle 0; per-step optimization retains the
previous optimized vector as its init.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import Circuit, GateOp
from .optimize import EnergyEvaluator, optimize_parameters
from .pauli import PauliSum, exact_ground_energy, fake_minimum_energy, MAX_DENSE_QUBITS
from . import simulator as sim

VARIANTS = ("vanilla", "fixed", "trainable", "structure")


class ActionSpace:
    """index <-> gate bijection: 3N rotations then N(N-1) ordered CNOT pairs."""

    def __init__(self, n_qubits: int):
        self.n = n_qubits
        self.size = 3 * n_qubits + n_qubits * (n_qubits - 1)

    def gate(self, index: int) -> GateOp:
        n = self.n
        if not 0 <= index < self.size:
            raise IndexError(f"action {index} out of range")
        if index < 3 * n:
            kind = ("RX", "RY", "RZ")[index // n]
            return GateOp(kind, (index % n,), angle=0.0)
        r = index - 3 * n
        control = r // (n - 1)
        t = r % (n - 1)
        target = t if t < control else t + 1
        return GateOp("CNOT", (control, target))

    def index(self, gate: GateOp) -> int:
        n = self.n
        if gate.is_rotation:
            axis = ("RX", "RY", "RZ").index(gate.kind)
            return axis * n + gate.qubits[0]
        c, t = gate.qubits
        return 3 * n + c * (n - 1) + (t if t < c else t - 1)


def legal_actions_mask(space: ActionSpace, last_gate: GateOp | None) -> np.ndarray:
    """All actions legal except repeating the immediately preceding gate.

    Same rotation axis on the same qubit, or the same directed CNOT pair.
    """
    mask = np.ones(space.size, dtype=bool)
    if last_gate is not None:
        mask[space.index(last_gate)] = False
    return mask


@dataclass(frozen=True)
class ObservationTensor:
    binary: np.ndarray  # (slots, N, N+3) in {0,1}
    angles: np.ndarray  # (slots, N, 3) rotation angles, zeros elsewhere

    def flat(self) -> np.ndarray:
        return np.concatenate(
            [self.binary.ravel(), self.angles.ravel()]
        ).astype(np.float32)


def _encode_gates(binary, angles, gates, base_slot, moments):
    for g, m in zip(gates, moments):
        slot = base_slot + m
        if slot >= binary.shape[0]:
            raise ValueError("slot overflow: episode should have ended")
        if g.is_rotation:
            axis = ("RX", "RY", "RZ").index(g.kind)
            binary[slot, g.qubits[0], binary.shape[2] - 3 + axis] = 1.0
            angles[slot, g.qubits[0], axis] = g.angle
        else:
            binary[slot, g.qubits[0], g.qubits[1]] = 1.0


@dataclass
class EnvConfig:
    variant: str = "vanilla"
    max_steps: int = 20
    xi_init: float = 1e-2
    delta: float = 1e-4
    kappa: float = 10.0
    period: int = 500
    stagnation_limit: int = 500
    success_window: int = 50
    halting_p: float | None = None  # None disables random halting
    budget: int = 500
    backend: str = "exact"
    shots: int | None = None
    noise_p1: float = 0.0
    noise_p2: float = 0.0
    optimizer: str = "adam"
    opt_lr: float = 0.05
    opt_jitter: float = 0.05

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.max_steps < 1 or self.budget < 1:
            raise ValueError("max_steps and budget must be positive")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


@dataclass
class CurriculumState:
    xi: float
    best_energy: float
    mu: float
    delta: float = 1e-4
    kappa: float = 10.0
    period: int = 500
    stagnation_limit: int = 500
    success_window: int = 50
    successes: int = 0
    stagnation: int = 0
    episodes: int = 0

    def __post_init__(self):
        if self.xi <= 0:
            raise ValueError("xi must be positive")


@dataclass(frozen=True)
class EpisodeOutcome:
    best_energy: float
    success: bool


def xi_new(mu: float, best_energy: float, delta: float) -> float:
    """|mu - xi_2| + delta, the adaptive-threshold formula."""
    return abs(mu - best_energy) + delta


def curriculum_update(cs: CurriculumState, outcome: EpisodeOutcome) -> CurriculumState:
    """Apply the four update rules in their fixed order.

    1. stagnation reset, 2. periodic greedy shift, 3. success decrement,
    4. best-energy bookkeeping. xi never drops below delta.
    """
    cs = replace(cs)
    cs.episodes += 1
    if cs.stagnation >= cs.stagnation_limit:
        cs.xi = xi_new(cs.mu, cs.best_energy, cs.delta) + cs.delta
        cs.stagnation = 0
    if cs.episodes % cs.period == 0:
        cs.xi = abs(cs.mu - cs.best_energy)
    if outcome.success:
        cs.successes += 1
        if cs.successes % cs.success_window == 0:
            cs.xi -= cs.delta / cs.kappa
    if outcome.best_energy < cs.best_energy:
        cs.best_energy = outcome.best_energy
        cs.stagnation = 0
    else:
        cs.stagnation += 1
    cs.xi = max(cs.xi, cs.delta)
    return cs


def compute_reward(
    c_t: float,
    c_prev: float,
    xi: float,
    t: int,
    cap: int,
    c_min: float,
    e_ref: float,
) -> float:
    """+5 on success, -5 on timeout, else clamped normalized improvement."""
    if c_t - e_ref < xi:
        return 5.0
    if t >= cap:
        return -5.0
    denom = c_prev - c_min
    if abs(denom) < 1e-12:
        return 0.0
    return max((c_prev - c_t) / denom, -1.0)


def sample_episode_length(n_act: int, p: float, rng) -> int:
    """Random halting: cap = n_act - n_fail with the quoted binomial-shaped pmf."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if n_act < 1:
        raise ValueError("n_act must be >= 1")
    pmf = halting_pmf(n_act, p)
    n_fail = int(rng.choice(n_act, p=pmf))
    return n_act - n_fail


def halting_pmf(n_act: int, p: float) -> np.ndarray:
    """Normalized pmf over n_fail in [0, n_act-1].

    The raw weights C(n_act-1, k) p^k (1-p)^(n_act-k) sum to (1-p); the
    explicit normalization makes them a proper distribution.
    """
    ks = np.arange(n_act)
    logw = (
        _log_binom(n_act - 1, ks)
        + ks * math.log(p)
        + (n_act - ks) * math.log1p(-p)
    )
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _log_binom(n, ks):
    from scipy.special import gammaln

    return gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)


@dataclass
class WarmStart:
    """Artifacts from the pipeline consumed by non-vanilla variants."""

    circuit: Circuit          # transpiled warm-start circuit with fitted angles
    statevector: np.ndarray   # its action on |0...0>


class QasEnv:
    """One environment instance, owned by one agent loop."""

    def __init__(
        self,
        hamiltonian: PauliSum,
        config: EnvConfig,
        warmstart: WarmStart | None = None,
        rng: np.random.Generator | None = None,
        shot_rng: np.random.Generator | None = None,
    ):
        if config.variant != "vanilla" and warmstart is None:
            raise ValueError(f"variant {config.variant!r} needs warm-start artifacts")
        self.h = hamiltonian
        self.cfg = config
        self.warmstart = warmstart
        self.rng = rng if rng is not None else np.random.default_rng(0)
        # separate stream: toggling shot noise must not perturb the env stream
        self.shot_rng = shot_rng if shot_rng is not None else np.random.default_rng(1)
        self.space = ActionSpace(hamiltonian.n_qubits)
        if hamiltonian.n_qubits <= MAX_DENSE_QUBITS:
            self.e_ref = exact_ground_energy(hamiltonian)[0]
        else:
            self.e_ref = fake_minimum_energy(hamiltonian)
        self.c_min = self.e_ref if hamiltonian.n_qubits <= MAX_DENSE_QUBITS else fake_minimum_energy(hamiltonian)
        self.mu = fake_minimum_energy(hamiltonian)
        self.curriculum = CurriculumState(
            xi=config.xi_init,
            best_energy=np.inf,
            mu=self.mu,
            delta=config.delta,
            kappa=config.kappa,
            period=config.period,
            stagnation_limit=config.stagnation_limit,
            success_window=config.success_window,
        )
        self._preloaded = self._build_preload()
        self.d_mps = self._preloaded.depth() if self._preloaded is not None else 0
        self.t = 0
        self.done = True

    # -- layout ------------------------------------------------------------

    def _build_preload(self) -> Circuit | None:
        if self.cfg.variant == "trainable":
            return self.warmstart.circuit.copy()
        if self.cfg.variant == "structure":
            zeroed = self.warmstart.circuit.with_angles(
                np.zeros(self.warmstart.circuit.n_params)
            )
            return zeroed
        return None

    @property
    def n_qubits(self) -> int:
        return self.h.n_qubits

    @property
    def slots(self) -> int:
        return self.d_mps + self.cfg.max_steps

    def observation_shape(self) -> tuple[int, int, int]:
        n = self.n_qubits
        return (self.slots, n, n + 3)

    def obs_size(self) -> int:
        s, n, w = self.observation_shape()
        return s * n * (w + 3)

    # -- episode lifecycle ---------------------------------------------------

    def reset(self) -> ObservationTensor:
        cfg = self.cfg
        init_state = None
        if cfg.variant == "fixed":
            init_state = self.warmstart.statevector
        noise = None
        if cfg.backend == "noisy":
            noise = sim.NoiseModel(p1=cfg.noise_p1, p2=cfg.noise_p2, shots=cfg.shots)
        self.evaluator = EnergyEvaluator(
            self.h,
            backend=cfg.backend,
            init_state=init_state,
            noise=noise,
            shots=cfg.shots,
            rng=self.shot_rng,
        )
        self.circuit = self._preloaded.copy() if self._preloaded is not None else Circuit(self.n_qubits)
        self.n_preloaded = len(self.circuit.gates)
        self.theta = self.circuit.angles()
        self.t = 0
        self.done = False
        self.cap = cfg.max_steps
        if cfg.halting_p:
            self.cap = sample_episode_length(cfg.max_steps, cfg.halting_p, self.rng)
        self.c_t = self.evaluator(self.circuit, self.theta)
        self.best_energy = self.c_t
        self.reset_nfev = self.evaluator.reset_counter()
        return self.encode_observation()

    def legal_actions(self) -> np.ndarray:
        last = self.circuit.gates[-1] if self.circuit.gates else None
        return legal_actions_mask(self.space, last)

    def step(self, action: int):
        """Returns (observation, reward, done, info) with info['nfev'] exact."""
        if self.done:
            raise RuntimeError("step() on a finished episode; call reset()")
        if not self.legal_actions()[action]:
            raise ValueError(f"illegal action {action}: repeats the preceding gate")
        gate = self.space.gate(action)
        self.circuit.append(gate)
        if gate.is_rotation:
            self.theta = np.append(self.theta, 0.0)
        trainable = self._trainable_mask()
        result = optimize_parameters(
            self.circuit,
            self.evaluator,
            self.theta,
            budget=self.cfg.budget,
            rng=self.rng,
            trainable_mask=trainable,
            method=self.cfg.optimizer,
            lr=self.cfg.opt_lr,
            jitter=self.cfg.opt_jitter,
        )
        self.theta = result.theta
        self.circuit = self.circuit.with_angles(self.theta)
        c_prev = self.c_t
        self.c_t = result.energy
        self.best_energy = min(self.best_energy, self.c_t)
        self.t += 1
        reward = compute_reward(
            self.c_t, c_prev, self.curriculum.xi, self.t, self.cap, self.c_min, self.e_ref
        )
        success = (self.c_t - self.e_ref) < self.curriculum.xi
        self.done = success or self.t >= self.cap
        info = {
            "nfev": result.nfev,
            "success": success,
            "energy": self.c_t,
            "error": self.c_t - self.e_ref,
        }
        return self.encode_observation(), reward, self.done, info

    def _trainable_mask(self) -> np.ndarray:
        n_params = self.circuit.n_params
        mask = np.ones(n_params, dtype=bool)
        # preloaded warm-start angles are trainable in both the trainable
        # and structure variants; fixed/vanilla circuits hold agent gates only
        return mask

    def episode_outcome(self) -> EpisodeOutcome:
        return EpisodeOutcome(
            best_energy=self.best_energy,
            success=(self.c_t - self.e_ref) < self.curriculum.xi,
        )

    def end_episode(self) -> None:
        self.curriculum = curriculum_update(self.curriculum, self.episode_outcome())

    # -- observation ---------------------------------------------------------

    def encode_observation(self) -> ObservationTensor:
        n = self.n_qubits
        binary = np.zeros(self.observation_shape(), dtype=np.float32)
        angles = np.zeros((self.slots, n, 3), dtype=np.float32)
        gates = self.circuit.gates
        if self.d_mps:
            pre = Circuit(n, list(gates[: self.n_preloaded]))
            _encode_gates(binary, angles, pre.gates, 0, pre.moments())
        agent_gates = gates[self.n_preloaded :]
        agent_circ = Circuit(n, list(agent_gates))
        _encode_gates(binary, angles, agent_gates, self.d_mps, agent_circ.moments())
        return ObservationTensor(binary=binary, angles=angles)

    # -- bookkeeping for the harness -----------------------------------------

    def agent_circuit(self) -> Circuit:
        """Gates added by the agent (excludes any preloaded warm-start gates)."""
        return Circuit(self.n_qubits, list(self.circuit.gates[self.n_preloaded :]))

    def full_circuit(self) -> Circuit:
        return self.circuit.copy()
