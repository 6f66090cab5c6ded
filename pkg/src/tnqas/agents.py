"""Learning and baseline policies: DDQN from scratch, random agent, SA.

The Q-network is a plain numpy MLP with leaky-rectifier activations and a
hand-written backward pass (checked against finite differences in the test
suite). No autograd framework is involved.
"""
from __future__ import annotations

import pickle
from collections import deque
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, GateOp
from .env import QasEnv
from .optimize import EnergyEvaluator, optimize_parameters
from .pauli import PauliSum

_LEAKY_SLOPE = 0.01


class Mlp:
    """Fully connected net: input -> hidden widths -> n_actions, leaky ReLU."""

    def __init__(self, sizes, rng: np.random.Generator):
        self.sizes = list(sizes)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes, self.sizes[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            self.biases.append(np.zeros(fan_out))

    def forward(self, x: np.ndarray) -> np.ndarray:
        """x: (batch, in) or (in,); returns matching-rank action values."""
        single = x.ndim == 1
        a = np.atleast_2d(x)
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = a @ w.T + b
            a = np.where(z > 0, z, _LEAKY_SLOPE * z)
        out = a @ self.weights[-1].T + self.biases[-1]
        return out[0] if single else out

    def forward_cached(self, x: np.ndarray):
        acts = [np.atleast_2d(x)]
        pre = []
        a = acts[0]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = a @ w.T + b
            pre.append(z)
            a = np.where(z > 0, z, _LEAKY_SLOPE * z)
            acts.append(a)
        out = a @ self.weights[-1].T + self.biases[-1]
        return out, acts, pre

    def backward(self, grad_out, acts, pre):
        """Gradients of a scalar loss given d(loss)/d(output)."""
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        delta = grad_out
        grads_w[-1] = delta.T @ acts[-1]
        grads_b[-1] = delta.sum(axis=0)
        for layer in range(len(self.weights) - 2, -1, -1):
            delta = delta @ self.weights[layer + 1]
            slope = np.where(pre[layer] > 0, 1.0, _LEAKY_SLOPE)
            delta = delta * slope
            grads_w[layer] = delta.T @ acts[layer]
            grads_b[layer] = delta.sum(axis=0)
        return grads_w, grads_b

    def copy_from(self, other: "Mlp") -> None:
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]

    def state_dict(self) -> dict:
        return {
            "version": 1,
            "sizes": self.sizes,
            "weights": [w.copy() for w in self.weights],
            "biases": [b.copy() for b in self.biases],
        }

    def load_state_dict(self, state: dict) -> None:
        if state.get("version") != 1:
            raise ValueError(f"unsupported checkpoint version {state.get('version')!r}")
        if state["sizes"] != self.sizes:
            raise ValueError(f"checkpoint sizes {state['sizes']} != net sizes {self.sizes}")
        self.weights = [np.array(w) for w in state["weights"]]
        self.biases = [np.array(b) for b in state["biases"]]

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self.state_dict(), fh)

    @classmethod
    def load(cls, path) -> "Mlp":
        with open(path, "rb") as fh:
            state = pickle.load(fh)
        net = cls.__new__(cls)
        net.sizes = list(state["sizes"])
        net.weights = []
        net.biases = []
        net.load_state_dict(state)
        return net


class AdamOptimizer:
    def __init__(self, net: Mlp, lr: float = 3e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m_w = [np.zeros_like(w) for w in net.weights]
        self.v_w = [np.zeros_like(w) for w in net.weights]
        self.m_b = [np.zeros_like(b) for b in net.biases]
        self.v_b = [np.zeros_like(b) for b in net.biases]

    def step(self, net: Mlp, grads_w, grads_b) -> None:
        self.t += 1
        b1c = 1 - self.beta1**self.t
        b2c = 1 - self.beta2**self.t
        for i in range(len(net.weights)):
            self.m_w[i] = self.beta1 * self.m_w[i] + (1 - self.beta1) * grads_w[i]
            self.v_w[i] = self.beta2 * self.v_w[i] + (1 - self.beta2) * grads_w[i] ** 2
            net.weights[i] -= self.lr * (self.m_w[i] / b1c) / (np.sqrt(self.v_w[i] / b2c) + self.eps)
            self.m_b[i] = self.beta1 * self.m_b[i] + (1 - self.beta1) * grads_b[i]
            self.v_b[i] = self.beta2 * self.v_b[i] + (1 - self.beta2) * grads_b[i] ** 2
            net.biases[i] -= self.lr * (self.m_b[i] / b1c) / (np.sqrt(self.v_b[i] / b2c) + self.eps)

    def state_dict(self) -> dict:
        return {
            "t": self.t,
            "m_w": self.m_w, "v_w": self.v_w, "m_b": self.m_b, "v_b": self.v_b,
        }

    def load_state_dict(self, state: dict) -> None:
        self.t = state["t"]
        self.m_w, self.v_w = state["m_w"], state["v_w"]
        self.m_b, self.v_b = state["m_b"], state["v_b"]


@dataclass(frozen=True)
class Transition:
    obs: np.ndarray
    action: int
    g_n: float          # discounted n-step return
    steps: int          # steps actually spanned (gamma^steps bootstraps)
    next_obs: np.ndarray
    done: bool
    next_mask: np.ndarray


class ReplayBuffer:
    """FIFO ring of n-step transitions."""

    def __init__(self, capacity: int = 20_000):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._data: deque[Transition] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._data)

    def push(self, transition: Transition) -> None:
        self._data.append(transition)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        idx = rng.integers(len(self._data), size=batch_size)
        return [self._data[i] for i in idx]

    def state_dict(self) -> dict:
        return {"capacity": self.capacity, "data": list(self._data)}

    def load_state_dict(self, state: dict) -> None:
        self.capacity = state["capacity"]
        self._data = deque(state["data"], maxlen=self.capacity)


def n_step_return(rewards, gamma: float) -> float:
    """Discounted sum of up to n rewards (truncated at terminal)."""
    g = 0.0
    for k, r in enumerate(rewards):
        g += (gamma**k) * r
    return g


def epsilon_schedule(step: int, floor: float = 0.05, decay: float = 0.99995) -> float:
    return max(floor, decay**step)


def select_action(qvals: np.ndarray, mask: np.ndarray, epsilon: float, rng) -> int:
    """Epsilon-greedy over legal actions; greedy ties break to lowest index."""
    legal = np.flatnonzero(mask)
    if legal.size == 0:
        raise ValueError("no legal actions")
    if rng.random() < epsilon:
        return int(rng.choice(legal))
    masked = np.where(mask, qvals, -np.inf)
    return int(np.argmax(masked))


@dataclass
class DdqnConfig:
    gamma: float = 0.88
    n_step: int = 5
    eps_floor: float = 0.05
    eps_decay: float = 0.99995
    target_sync: int = 500
    batch_size: int = 1000
    buffer_capacity: int = 20_000
    lr: float = 3e-4
    hidden: tuple[int, ...] = (128, 128, 128)

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.n_step < 1:
            raise ValueError("n_step must be >= 1")


def ddqn_targets(online: Mlp, target: Mlp, batch: list[Transition], cfg: DdqnConfig) -> np.ndarray:
    """y = G_n + gamma^k * Q_target(s', argmax_legal Q_online(s', .)); y = G_n at terminal."""
    ys = np.empty(len(batch))
    next_obs = np.stack([tr.next_obs for tr in batch])
    q_online = online.forward(next_obs)
    q_target = target.forward(next_obs)
    for i, tr in enumerate(batch):
        if tr.done:
            ys[i] = tr.g_n
        else:
            masked = np.where(tr.next_mask, q_online[i], -np.inf)
            a_star = int(np.argmax(masked))
            ys[i] = tr.g_n + (cfg.gamma**tr.steps) * q_target[i, a_star]
    return ys


def ddqn_train_step(
    online: Mlp, target: Mlp, optimizer: AdamOptimizer, batch: list[Transition], cfg: DdqnConfig
) -> float:
    """One squared-TD-error gradient step on the online net; returns the loss."""
    ys = ddqn_targets(online, target, batch, cfg)
    obs = np.stack([tr.obs for tr in batch])
    out, acts, pre = online.forward_cached(obs)
    idx = np.arange(len(batch))
    actions = np.array([tr.action for tr in batch])
    q_sa = out[idx, actions]
    err = q_sa - ys
    loss = float(np.mean(err**2))
    grad_out = np.zeros_like(out)
    grad_out[idx, actions] = 2.0 * err / len(batch)
    grads_w, grads_b = online.backward(grad_out, acts, pre)
    optimizer.step(online, grads_w, grads_b)
    return loss


def sync_target(online: Mlp, target: Mlp) -> None:
    target.copy_from(online)


class DdqnAgent:
    """Double DQN with n-step returns; owns its nets, buffer, and schedule."""

    def __init__(self, obs_size: int, n_actions: int, cfg: DdqnConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        sizes = [obs_size, *cfg.hidden, n_actions]
        self.online = Mlp(sizes, rng)
        self.target = Mlp(sizes, rng)
        sync_target(self.online, self.target)
        self.optimizer = AdamOptimizer(self.online, lr=cfg.lr)
        self.buffer = ReplayBuffer(cfg.buffer_capacity)
        self.global_step = 0
        self._pending: deque = deque()

    def epsilon(self) -> float:
        return epsilon_schedule(self.global_step, self.cfg.eps_floor, self.cfg.eps_decay)

    def act(self, obs_flat: np.ndarray, mask: np.ndarray) -> int:
        q = self.online.forward(obs_flat)
        return select_action(q, mask, self.epsilon(), self.rng)

    def observe(self, obs, action, reward, next_obs, done, next_mask) -> None:
        """Feed one environment step; emits matured n-step transitions."""
        self._pending.append((obs, action, reward, next_obs, done, next_mask))
        if len(self._pending) >= self.cfg.n_step:
            self._emit(terminal_flush=False)
        if done:
            while self._pending:
                self._emit(terminal_flush=True)
            self._pending.clear()

    def _emit(self, terminal_flush: bool) -> None:
        window = list(self._pending)[: self.cfg.n_step]
        obs0, action0 = window[0][0], window[0][1]
        rewards = [w[2] for w in window]
        g = n_step_return(rewards, self.cfg.gamma)
        last = window[-1]
        self.buffer.push(
            Transition(
                obs=obs0,
                action=action0,
                g_n=g,
                steps=len(window),
                next_obs=last[3],
                done=last[4],
                next_mask=last[5],
            )
        )
        self._pending.popleft()

    def train_tick(self) -> float | None:
        """Call once per environment step: epsilon decay, learning, target sync."""
        self.global_step += 1
        loss = None
        if len(self.buffer) >= self.cfg.batch_size:
            batch = self.buffer.sample(self.cfg.batch_size, self.rng)
            loss = ddqn_train_step(self.online, self.target, self.optimizer, batch, self.cfg)
        if self.global_step % self.cfg.target_sync == 0:
            sync_target(self.online, self.target)
        return loss

    def state_dict(self) -> dict:
        return {
            "version": 1,
            "online": self.online.state_dict(),
            "target": self.target.state_dict(),
            "optimizer": self.optimizer.state_dict(),
            "buffer": self.buffer.state_dict(),
            "global_step": self.global_step,
            "pending": list(self._pending),
            "rng_state": self.rng.bit_generator.state,
        }

    def load_state_dict(self, state: dict) -> None:
        self.online.load_state_dict(state["online"])
        self.target.load_state_dict(state["target"])
        self.optimizer.load_state_dict(state["optimizer"])
        self.buffer.load_state_dict(state["buffer"])
        self.global_step = state["global_step"]
        self._pending = deque(state["pending"])
        self.rng.bit_generator.state = state["rng_state"]


def random_agent_episode(env: QasEnv, rng: np.random.Generator) -> dict:
    """Uniform legal actions; inner-loop optimization identical to the learners."""
    env.reset()
    total_reward = 0.0
    nfev = env.reset_nfev
    steps = 0
    success = False
    while True:
        mask = env.legal_actions()
        action = int(rng.choice(np.flatnonzero(mask)))
        _, reward, done, info = env.step(action)
        total_reward += reward
        nfev += info["nfev"]
        steps += 1
        if done:
            success = info["success"]
            break
    env.end_episode()
    return {
        "steps": steps,
        "success": success,
        "best_energy": env.best_energy,
        "reward": total_reward,
        "nfev": nfev,
    }


@dataclass
class SaConfig:
    t0: float = 1.0
    alpha: float = 0.95
    max_iters: int = 2000
    stability_window: int = 200
    stability_tol: float = 1e-8
    slots: int = 20
    budget: int = 500

    def __post_init__(self):
        if self.t0 <= 0:
            raise ValueError("initial temperature must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("cooling rate must lie in (0, 1)")


def _realized_circuit(n: int, slots: list[GateOp | None]) -> Circuit:
    return Circuit(n, [g for g in slots if g is not None])


def _random_gate(n: int, rng: np.random.Generator) -> GateOp:
    kind = ("RX", "RY", "RZ", "CNOT")[rng.integers(4)]
    if kind == "CNOT":
        c, t = rng.choice(n, size=2, replace=False)
        return GateOp("CNOT", (int(c), int(t)))
    return GateOp(kind, (int(rng.integers(n)),), angle=0.0)


def sa_search(h: PauliSum, cfg: SaConfig, rng: np.random.Generator) -> tuple[Circuit, float, dict]:
    """Simulated-annealing structure search over a fixed-length slot array.

    Slots start as identities; each iteration replaces a random slot with a
    random pool gate, scores the realized circuit by its optimized energy,
    and accepts by the Metropolis rule under geometric cooling.
    """
    n = h.n_qubits
    slots: list[GateOp | None] = [None] * cfg.slots
    angles: dict[int, float] = {}
    evaluator = EnergyEvaluator(h)
    zero = Circuit(n)
    current_loss = evaluator(zero, [])
    best_circuit = zero
    best_loss = current_loss
    temperature = cfg.t0
    stable = 0
    total_nfev = evaluator.reset_counter()
    iterations = 0
    for it in range(cfg.max_iters):
        iterations = it + 1
        pos = int(rng.integers(cfg.slots))
        proposal = list(slots)
        proposal[pos] = _random_gate(n, rng)
        circ = _realized_circuit(n, proposal)
        # retained angles for surviving slots; fresh gates start at zero
        theta = []
        rot_slots = [i for i, g in enumerate(proposal) if g is not None and g.is_rotation]
        for i in rot_slots:
            theta.append(angles.get(i, 0.0) if i != pos else 0.0)
        result = optimize_parameters(
            circ, evaluator, np.array(theta), budget=cfg.budget, rng=rng
        )
        delta_l = result.energy - current_loss
        accept = delta_l < 0 or rng.random() < np.exp(-delta_l / temperature)
        if accept:
            slots = proposal
            current_loss = result.energy
            angles = {i: th for i, th in zip(rot_slots, result.theta)}
            if result.energy < best_loss:
                best_loss = result.energy
                best_circuit = circ.with_angles(result.theta)
        temperature *= cfg.alpha
        stable = stable + 1 if abs(delta_l) < cfg.stability_tol else 0
        if stable >= cfg.stability_window:
            break
    total_nfev += evaluator.reset_counter()
    return best_circuit, best_loss, {"nfev": total_nfev, "iterations": iterations}
