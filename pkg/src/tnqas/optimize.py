"""Inner-loop parameter optimization for pool circuits.

One interface, three methods: parameter-shift gradients with Adam (default
on exact backends), the same gradients with L-BFGS for heavy trainable
polishing, and SPSA for shot/noisy backends. nfev counts energy
evaluations, the quantity the outer search budgets and reports.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .circuits import Circuit
from .pauli import PauliSum, to_dense_matrix
from . import simulator as sim

_DENSE_EXPECTATION_LIMIT = 10  # cache H densely up to this qubit count


class _BudgetExhausted(Exception):
    pass


class EnergyEvaluator:
    """Counts every energy evaluation; backend in {exact, shots, noisy}.

    `init_state` supports warm-started circuits (fixed TN-init). In noisy
    mode, depolarizing noise applies only to the circuit's own gates; a
    warm-start statevector enters noiselessly.
    """

    def __init__(
        self,
        hamiltonian: PauliSum,
        backend: str = "exact",
        init_state: np.ndarray | None = None,
        noise: sim.NoiseModel | None = None,
        shots: int | None = None,
        rng: np.random.Generator | None = None,
    ):
        if backend not in ("exact", "shots", "noisy"):
            raise ValueError(f"unknown backend {backend!r}")
        if backend == "shots" and not shots:
            raise ValueError("shots backend needs a shot count")
        if backend == "noisy" and noise is None:
            raise ValueError("noisy backend needs a NoiseModel")
        self.hamiltonian = hamiltonian
        self.backend = backend
        self.init_state = init_state
        self.noise = noise
        self.shots = shots
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.nfev = 0
        self._hmat = None
        if hamiltonian.n_qubits <= _DENSE_EXPECTATION_LIMIT:
            self._hmat = to_dense_matrix(hamiltonian)

    def reset_counter(self) -> int:
        count, self.nfev = self.nfev, 0
        return count

    def initial_state(self, n: int) -> np.ndarray:
        return self.init_state if self.init_state is not None else sim.zero_state(n)

    def state_energy(self, psi: np.ndarray) -> float:
        """<psi|H|psi> for a statevector already produced; counts one nfev."""
        self.nfev += 1
        if self._hmat is not None:
            return float(np.real(np.vdot(psi, self._hmat @ psi)))
        return sim.expectation(psi, self.hamiltonian)

    def __call__(self, circuit: Circuit, theta) -> float:
        if self.backend == "noisy":
            self.nfev += 1
            rho = sim.run_circuit_noisy(circuit, theta, self.noise, init=self.init_state)
            if self.noise.shots:
                return sim.expectation_dm_with_shots(
                    rho, self.hamiltonian, self.noise.shots, self.rng
                )
            return sim.expectation_dm(rho, self.hamiltonian)
        psi = sim.run_circuit(self.initial_state(circuit.n_qubits), circuit, theta)
        if self.backend == "shots":
            self.nfev += 1
            return sim.expectation_with_shots(psi, self.hamiltonian, self.shots, self.rng)
        return self.state_energy(psi)


@dataclass
class OptimizeResult:
    theta: np.ndarray
    energy: float
    nfev: int


def _fast_energy(ev: EnergyEvaluator, cc: sim.CompiledCircuit, init, theta) -> float:
    return ev.state_energy(cc.run(init, theta))


def _fast_gradient(ev, cc, init, theta, trainable) -> np.ndarray:
    """Parameter-shift gradient, all shifted circuits simulated as one batch.

    Each of the 2 * n_trainable shifted evaluations is a real energy
    evaluation and is counted as such; batching only removes per-call
    overhead, the simulated circuits are the shifted ones.
    """
    n = cc.n
    dim = 2**n
    owners = []  # param index per pair of batch columns
    batch = np.zeros((dim, 0), dtype=complex)
    state = init
    for kind, qubits, pidx, _, matrix in cc.ops:
        if pidx is not None:
            m = sim.rotation_matrix(kind, theta[pidx])
            if batch.shape[1]:
                batch = sim._apply_1q(batch, m, qubits[0], n).reshape(dim, -1)
            if trainable[pidx]:
                plus = sim._apply_1q(
                    state, sim.rotation_matrix(kind, theta[pidx] + np.pi / 2), qubits[0], n
                )
                minus = sim._apply_1q(
                    state, sim.rotation_matrix(kind, theta[pidx] - np.pi / 2), qubits[0], n
                )
                batch = np.concatenate([batch, plus[:, None], minus[:, None]], axis=1)
                owners.append(pidx)
            state = sim._apply_1q(state, m, qubits[0], n)
        elif kind == "CNOT":
            if batch.shape[1]:
                batch = sim._apply_cnot(batch, qubits[0], qubits[1], n).reshape(dim, -1)
            state = sim._apply_cnot(state, qubits[0], qubits[1], n)
        else:
            if batch.shape[1]:
                cols = [
                    sim._apply_u2q(np.ascontiguousarray(batch[:, b]), matrix, qubits[0], qubits[1], n)
                    for b in range(batch.shape[1])
                ]
                batch = np.stack(cols, axis=1)
            state = sim._apply_u2q(state, matrix, qubits[0], qubits[1], n)
    if not owners:
        return np.zeros(theta.shape[0])
    if ev._hmat is not None:
        energies = np.real(np.einsum("ib,ib->b", batch.conj(), ev._hmat @ batch))
    else:
        energies = np.array(
            [sim.expectation(np.ascontiguousarray(batch[:, b]), ev.hamiltonian)
             for b in range(batch.shape[1])]
        )
    ev.nfev += batch.shape[1]
    grad = np.zeros(theta.shape[0])
    for k, pidx in enumerate(owners):
        grad[pidx] = 0.5 * (energies[2 * k] - energies[2 * k + 1])
    return grad


def _generic_gradient(ev, circuit, theta, trainable) -> np.ndarray:
    grad = np.zeros(theta.shape[0])
    for j in np.flatnonzero(trainable):
        plus = theta.copy()
        plus[j] += np.pi / 2
        minus = theta.copy()
        minus[j] -= np.pi / 2
        grad[j] = 0.5 * (ev(circuit, plus) - ev(circuit, minus))
    return grad


def optimize_parameters(
    circuit: Circuit,
    evaluate: EnergyEvaluator,
    theta_init,
    budget: int,
    rng: np.random.Generator | None = None,
    trainable_mask=None,
    method: str = "adam",
    lr: float = 0.05,
    jitter: float = 0.05,
) -> OptimizeResult:
    """Minimize the circuit energy within an nfev budget; never worse than init.

    Gradient methods start from a jittered copy of the init (fresh
    rotations sit at angle 0, an exact stationary point of the cosine
    landscape where parameter-shift gradients vanish); the plain init is
    evaluated first and competes for best-seen. Shot/noisy backends always
    use SPSA regardless of `method`.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    theta_init = np.asarray(theta_init, dtype=float)
    if theta_init.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got {theta_init.shape}")
    if trainable_mask is None:
        trainable = np.ones(circuit.n_params, dtype=bool)
    else:
        trainable = np.asarray(trainable_mask, dtype=bool)

    start_nfev = evaluate.nfev
    if evaluate.backend == "exact":
        cc = sim.CompiledCircuit(circuit)
        init = evaluate.initial_state(circuit.n_qubits)
        best_energy = _fast_energy(evaluate, cc, init, theta_init)
    else:
        cc = init = None
        best_energy = evaluate(circuit, theta_init)
    best_theta = theta_init.copy()
    if int(np.sum(trainable)) == 0:
        return OptimizeResult(best_theta, best_energy, evaluate.nfev - start_nfev)

    tracker = _Best(best_theta, best_energy)
    if evaluate.backend != "exact":
        _spsa(circuit, evaluate, theta_init, trainable, budget, rng, tracker, start_nfev)
    elif method == "lbfgs":
        _lbfgs(cc, init, evaluate, theta_init, trainable, budget, rng, tracker, start_nfev, jitter)
    elif method == "adam":
        _adam(cc, init, evaluate, theta_init, trainable, budget, rng, tracker, start_nfev, lr, jitter)
    else:
        raise ValueError(f"unknown method {method!r}")
    return OptimizeResult(tracker.theta, tracker.energy, evaluate.nfev - start_nfev)


class _Best:
    def __init__(self, theta, energy):
        self.theta = theta
        self.energy = energy

    def offer(self, theta, energy):
        if energy < self.energy:
            self.energy = energy
            self.theta = theta.copy()


def _escape_flat_start(cc, init, ev, theta, trainable, budget, rng, jitter, start_nfev):
    """Jitter only when the gradient vanishes at the init (cosine saddle).

    Re-jittering an already-optimized parameter vector every call would
    undo the convergence accumulated across environment steps.
    """
    n_train = int(np.sum(trainable))
    if (ev.nfev - start_nfev) + 2 * n_train > budget:
        return theta, None
    grad = _fast_gradient(ev, cc, init, theta, trainable)
    if np.linalg.norm(grad) >= 1e-8:
        return theta, grad
    jittered = theta.copy()
    jittered[trainable] += jitter * rng.normal(size=n_train)
    return jittered, None


def _adam(cc, init, ev, theta_init, trainable, budget, rng, tracker, start_nfev, lr, jitter):
    theta, grad = _escape_flat_start(
        cc, init, ev, theta_init, trainable, budget, rng, jitter, start_nfev
    )
    n_train = int(np.sum(trainable))
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    t = 0
    cost_per_iter = 2 * n_train + 1
    while True:
        if grad is None:
            if (ev.nfev - start_nfev) + cost_per_iter > budget:
                break
            grad = _fast_gradient(ev, cc, init, theta, trainable)
        t += 1
        m = beta1 * m + (1 - beta1) * grad
        v = beta2 * v + (1 - beta2) * grad**2
        theta = theta - lr * (m / (1 - beta1**t)) / (np.sqrt(v / (1 - beta2**t)) + eps)
        tracker.offer(theta, _fast_energy(ev, cc, init, theta))
        grad = None


def _lbfgs(cc, init, ev, theta_init, trainable, budget, rng, tracker, start_nfev, jitter):
    theta0, _ = _escape_flat_start(
        cc, init, ev, theta_init, trainable, budget, rng, jitter, start_nfev
    )
    frozen = theta_init[~trainable]

    def assemble(x):
        full = np.empty_like(theta_init)
        full[trainable] = x
        full[~trainable] = frozen
        return full

    def f(x):
        if ev.nfev - start_nfev >= budget:
            raise _BudgetExhausted
        full = assemble(x)
        e = _fast_energy(ev, cc, init, full)
        tracker.offer(full, e)
        return e

    def jac(x):
        if ev.nfev - start_nfev >= budget:
            raise _BudgetExhausted
        full = assemble(x)
        return _fast_gradient(ev, cc, init, full, trainable)[trainable]

    try:
        minimize(f, theta0[trainable], jac=jac, method="L-BFGS-B",
                 options={"maxiter": 10_000, "ftol": 1e-14, "gtol": 1e-12})
    except _BudgetExhausted:
        pass


def _spsa(circuit, ev, theta_init, trainable, budget, rng, tracker, start_nfev):
    # standard gain schedules (Spall); c sized for half-angle rotations
    a, c, big_a, alpha, gamma = 0.2, 0.15, 10.0, 0.602, 0.101
    theta = theta_init.copy()
    t = 0
    while (ev.nfev - start_nfev) + 3 <= budget:
        t += 1
        a_t = a / (t + big_a) ** alpha
        c_t = c / t**gamma
        delta = rng.choice([-1.0, 1.0], size=theta.shape[0])
        delta[~trainable] = 0.0
        e_plus = ev(circuit, theta + c_t * delta)
        e_minus = ev(circuit, theta - c_t * delta)
        ghat = np.zeros_like(theta)
        ghat[trainable] = (e_plus - e_minus) / (2 * c_t) * delta[trainable]
        theta = theta - a_t * ghat
        tracker.offer(theta, ev(circuit, theta))
