"""Statevector and density-matrix execution of pool circuits.

Conventions, fixed project-wide:
  - qubit 0 is the most significant bit of the statevector index,
  - RX(t) = exp(-i t X / 2), likewise RY/RZ (half-angle convention),
  - CNOT carries (control, target).

The noisy backend is a full density matrix with depolarizing channels
applied after every gate (p1 on a 1-qubit gate's qubit, p2 locally on a
CNOT's pair), exact and deterministic for n <= 8.
"""
from __future__ import annotations

import math

import numpy as np

from .circuits import Circuit, GateOp
from .pauli import PauliSum

MAX_DM_QUBITS = 8


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)
    raise ValueError(f"not a rotation kind: {kind!r}")


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    return state


def n_qubits_of(state: np.ndarray) -> int:
    n = int(round(math.log2(state.shape[0])))
    if 2**n != state.shape[0]:
        raise ValueError(f"state length {state.shape[0]} is not a power of two")
    return n


def _apply_1q(state: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    s = state.reshape(2**q, 2, -1)
    out = np.empty_like(s)
    out[:, 0, :] = m[0, 0] * s[:, 0, :] + m[0, 1] * s[:, 1, :]
    out[:, 1, :] = m[1, 0] * s[:, 0, :] + m[1, 1] * s[:, 1, :]
    return out.reshape(-1)


def _apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    a, b = min(control, target), max(control, target)
    s = state.reshape(2**a, 2, 2 ** (b - a - 1), 2, -1).copy()
    if control < target:
        s[:, 1, :, 0, :], s[:, 1, :, 1, :] = (
            s[:, 1, :, 1, :].copy(),
            s[:, 1, :, 0, :].copy(),
        )
    else:
        s[:, 0, :, 1, :], s[:, 1, :, 1, :] = (
            s[:, 1, :, 1, :].copy(),
            s[:, 0, :, 1, :].copy(),
        )
    return s.reshape(-1)


def _apply_u2q(state: np.ndarray, m4: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    s = state.reshape([2] * n)
    s = np.moveaxis(s, (q1, q2), (0, 1)).reshape(4, -1)
    out = m4 @ s
    out = np.moveaxis(out.reshape([2, 2] + [2] * (n - 2)), (0, 1), (q1, q2))
    return np.ascontiguousarray(out).reshape(-1)


def apply_gate(state: np.ndarray, gate: GateOp) -> np.ndarray:
    """Apply one gate, returning a new statevector."""
    n = n_qubits_of(state)
    for q in gate.qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for n={n}")
    if gate.is_rotation:
        return _apply_1q(state, rotation_matrix(gate.kind, gate.angle), gate.qubits[0], n)
    if gate.kind == "CNOT":
        return _apply_cnot(state, gate.qubits[0], gate.qubits[1], n)
    return _apply_u2q(state, gate.matrix, gate.qubits[0], gate.qubits[1], n)


def run_circuit(init: np.ndarray, circuit: Circuit, theta=None) -> np.ndarray:
    """Run a circuit from an arbitrary initial statevector (warm starts included)."""
    if circuit.n_qubits != n_qubits_of(init):
        raise ValueError("circuit and state qubit counts differ")
    if theta is not None:
        circuit = circuit.with_angles(theta)
    state = np.array(init, dtype=complex)
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state


class CompiledCircuit:
    """Validation-free execution plan for one circuit, for optimizer hot loops.

    Gate structure is frozen at construction; only rotation angles vary.
    """

    def __init__(self, circuit: Circuit):
        self.n = circuit.n_qubits
        self.n_params = circuit.n_params
        self.ops = []  # (kind, qubits, param index or None, fixed angle, matrix)
        k = 0
        for g in circuit.gates:
            if g.is_rotation:
                self.ops.append((g.kind, g.qubits, k, None, None))
                k += 1
            elif g.kind == "CNOT":
                self.ops.append(("CNOT", g.qubits, None, None, None))
            else:
                self.ops.append(("U2Q", g.qubits, None, None, g.matrix))

    def _apply_op(self, state, op, theta):
        kind, qubits, pidx, _, matrix = op
        if pidx is not None:
            return _apply_1q(state, rotation_matrix(kind, theta[pidx]), qubits[0], self.n)
        if kind == "CNOT":
            return _apply_cnot(state, qubits[0], qubits[1], self.n)
        return _apply_u2q(state, matrix, qubits[0], qubits[1], self.n)

    def run(self, init: np.ndarray, theta) -> np.ndarray:
        state = init
        for op in self.ops:
            state = self._apply_op(state, op, theta)
        return state

    def run_with_prefixes(self, init: np.ndarray, theta) -> list[np.ndarray]:
        """States before every gate plus the final state (length len(ops)+1)."""
        states = [init]
        state = init
        for op in self.ops:
            state = self._apply_op(state, op, theta)
            states.append(state)
        return states

    def run_suffix(self, state: np.ndarray, start: int, theta) -> np.ndarray:
        for op in self.ops[start:]:
            state = self._apply_op(state, op, theta)
        return state


def _pauli_action(n: int, string: str) -> tuple[int, np.ndarray]:
    """(flip mask, phase array) with P|j> = phase[j] |j ^ mask>."""
    dim = 2**n
    mask = 0
    phase = np.ones(dim, dtype=complex)
    idx = np.arange(dim)
    for q, ch in enumerate(string):
        if ch == "I":
            continue
        bit = (idx >> (n - 1 - q)) & 1
        if ch == "X":
            mask |= 1 << (n - 1 - q)
        elif ch == "Y":
            mask |= 1 << (n - 1 - q)
            phase = phase * (1j * (1 - 2 * bit))
        else:  # Z
            phase = phase * (1 - 2 * bit)
    return mask, phase


def _actions(h: PauliSum):
    if h._action_cache is None:
        h._action_cache = [
            (c, *_pauli_action(h.n_qubits, s)) for c, s in h.terms
        ]
    return h._action_cache


def apply_pauli_string(state: np.ndarray, string: str) -> np.ndarray:
    n = n_qubits_of(state)
    mask, phase = _pauli_action(n, string)
    src = np.arange(state.shape[0]) ^ mask
    return phase[src] * state[src]


def expectation(state: np.ndarray, h: PauliSum) -> float:
    """<psi|H|psi>, exact."""
    n = n_qubits_of(state)
    if n != h.n_qubits:
        raise ValueError(f"state has {n} qubits, Hamiltonian has {h.n_qubits}")
    idx = np.arange(state.shape[0])
    conj = state.conj()
    total = 0.0
    for coeff, mask, phase in _actions(h):
        src = idx ^ mask
        total += coeff * np.real(np.sum(conj * phase[src] * state[src]))
    return float(total)


_BASIS_CHANGE = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "Y": np.array([[1, -1j], [1, 1j]], dtype=complex) / np.sqrt(2),
}


def _term_samples(probs: np.ndarray, support_mask: int, shots: int, rng) -> float:
    outcomes = rng.choice(probs.shape[0], size=shots, p=probs)
    bits = outcomes & support_mask
    # parity of the measured bits on the term's support
    parity = np.zeros(shots, dtype=np.int64)
    v = bits
    while np.any(v):
        parity ^= v & 1
        v = v >> 1
    eigs = 1.0 - 2.0 * parity
    return float(np.mean(eigs))


def expectation_with_shots(state: np.ndarray, h: PauliSum, shots: int, rng) -> float:
    """Unbiased estimate of <psi|H|psi> from `shots` samples per Pauli term."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = n_qubits_of(state)
    if n != h.n_qubits:
        raise ValueError("dimension mismatch")
    total = 0.0
    for coeff, string in h.terms:
        if set(string) == {"I"}:
            total += coeff
            continue
        rotated = state
        support_mask = 0
        for q, ch in enumerate(string):
            if ch == "I":
                continue
            support_mask |= 1 << (n - 1 - q)
            if ch in _BASIS_CHANGE:
                rotated = _apply_1q(rotated, _BASIS_CHANGE[ch], q, n)
        probs = np.abs(rotated) ** 2
        probs = probs / probs.sum()
        total += coeff * _term_samples(probs, support_mask, shots, rng)
    return float(total)


# ---------------------------------------------------------------------------
# density-matrix backend
# ---------------------------------------------------------------------------


def dm_from_statevector(state: np.ndarray) -> np.ndarray:
    return np.outer(state, state.conj())


def _left_apply(gate: GateOp, mat: np.ndarray, n: int) -> np.ndarray:
    """U @ mat, applying the gate to the row index of a (2^n, m) array."""
    cols = mat.shape[1]
    flat = mat.reshape(-1)
    if gate.is_rotation:
        m2 = rotation_matrix(gate.kind, gate.angle)
        q = gate.qubits[0]
        s = flat.reshape(2**q, 2, -1)
        out = np.empty_like(s)
        out[:, 0, :] = m2[0, 0] * s[:, 0, :] + m2[0, 1] * s[:, 1, :]
        out[:, 1, :] = m2[1, 0] * s[:, 0, :] + m2[1, 1] * s[:, 1, :]
        return out.reshape(-1, cols)
    if gate.kind == "CNOT":
        c, t = gate.qubits
        a, b = min(c, t), max(c, t)
        s = flat.reshape(2**a, 2, 2 ** (b - a - 1), 2, -1).copy()
        if c < t:
            s[:, 1, :, 0, :], s[:, 1, :, 1, :] = (
                s[:, 1, :, 1, :].copy(),
                s[:, 1, :, 0, :].copy(),
            )
        else:
            s[:, 0, :, 1, :], s[:, 1, :, 1, :] = (
                s[:, 1, :, 1, :].copy(),
                s[:, 0, :, 1, :].copy(),
            )
        return s.reshape(-1, cols)
    q1, q2 = gate.qubits
    s = flat.reshape([2] * n + [cols])
    s = np.moveaxis(s, (q1, q2), (0, 1)).reshape(4, -1)
    out = gate.matrix @ s
    out = np.moveaxis(out.reshape([2, 2] + [2] * (n - 2) + [cols]), (0, 1), (q1, q2))
    return np.ascontiguousarray(out).reshape(-1, cols)


def apply_gate_dm(rho: np.ndarray, gate: GateOp, n: int) -> np.ndarray:
    """U rho U^dagger."""
    tmp = _left_apply(gate, rho, n)
    return _left_apply(gate, tmp.conj().T, n).conj().T


def _partial_trace(rho: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    t = rho.reshape([2] * (2 * n))
    for k, q in enumerate(sorted(qubits, reverse=True)):
        m = n - k  # qubits left in the bra/ket halves
        t = np.trace(t, axis1=q, axis2=m + q)
    return t.reshape(2 ** (n - len(qubits)), 2 ** (n - len(qubits)))


def _embed_identity(traced: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Tensor (I/2^k on `qubits`) with `traced` on the remaining qubits."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    m = n - k
    t = traced.reshape([2] * (2 * m))
    eye = np.eye(2**k, dtype=complex).reshape([2] * (2 * k)) / (2**k)
    full = np.tensordot(t, eye, axes=0)  # axes: rest-bra, rest-ket, id-bra, id-ket
    row_axes = [0] * n
    col_axes = [0] * n
    for pos, q in enumerate(rest):
        row_axes[q] = pos
        col_axes[q] = m + pos
    for pos, q in enumerate(sorted(qubits)):
        row_axes[q] = 2 * m + pos
        col_axes[q] = 2 * m + k + pos
    full = np.transpose(full, row_axes + col_axes)
    return full.reshape(2**n, 2**n)


def depolarize(rho: np.ndarray, qubits: tuple[int, ...], p: float, n: int) -> np.ndarray:
    """Local depolarizing channel on `qubits`: (1-p) rho + p * I/2^k (x) tr_k rho."""
    if p == 0.0:
        return rho
    traced = _partial_trace(rho, qubits, n)
    return (1.0 - p) * rho + p * _embed_identity(traced, qubits, n)


class NoiseModel:
    """Depolarizing rates and shot count for the noisy backend."""

    def __init__(self, p1: float = 0.0, p2: float = 0.0, shots: int | None = None):
        if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
            raise ValueError("depolarizing rates must lie in [0, 1]")
        if shots is not None and shots < 1:
            raise ValueError("shots must be >= 1 when finite")
        self.p1 = float(p1)
        self.p2 = float(p2)
        self.shots = shots

    def __repr__(self):
        return f"NoiseModel(p1={self.p1}, p2={self.p2}, shots={self.shots})"


def run_circuit_noisy(
    circuit: Circuit,
    theta,
    noise: NoiseModel,
    init: np.ndarray | None = None,
) -> np.ndarray:
    """Density matrix after the circuit with per-gate depolarizing noise.

    `init` may be a statevector or a density matrix; default |0...0>.
    """
    n = circuit.n_qubits
    if n > MAX_DM_QUBITS:
        raise ValueError(f"density-matrix backend refused for n={n} > {MAX_DM_QUBITS}")
    if theta is not None:
        circuit = circuit.with_angles(theta)
    if init is None:
        rho = dm_from_statevector(zero_state(n))
    elif init.ndim == 1:
        rho = dm_from_statevector(init)
    else:
        rho = np.array(init, dtype=complex)
    for gate in circuit.gates:
        rho = apply_gate_dm(rho, gate, n)
        if gate.is_rotation:
            rho = depolarize(rho, gate.qubits, noise.p1, n)
        else:
            rho = depolarize(rho, gate.qubits, noise.p2, n)
    return rho


def expectation_dm(rho: np.ndarray, h: PauliSum) -> float:
    """tr(rho H), exact: sum_j phase[j] rho[j, j^mask] per term."""
    n = h.n_qubits
    if rho.shape != (2**n, 2**n):
        raise ValueError("density matrix dimension mismatch")
    js = np.arange(2**n)
    total = 0.0
    for coeff, mask, phase in _actions(h):
        total += coeff * np.real(np.sum(rho[js, js ^ mask] * phase))
    return float(total)


def expectation_dm_with_shots(rho: np.ndarray, h: PauliSum, shots: int, rng) -> float:
    """Shot-sampled tr(rho H), one basis rotation per Pauli term."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = h.n_qubits
    total = 0.0
    for coeff, string in h.terms:
        if set(string) == {"I"}:
            total += coeff
            continue
        rotated = rho
        support_mask = 0
        for q, ch in enumerate(string):
            if ch == "I":
                continue
            support_mask |= 1 << (n - 1 - q)
            if ch in _BASIS_CHANGE:
                rotated = _conjugate_1q(rotated, _BASIS_CHANGE[ch], q, n)
        probs = np.real(np.diag(rotated)).copy()
        probs[probs < 0] = 0.0
        probs = probs / probs.sum()
        total += coeff * _term_samples(probs, support_mask, shots, rng)
    return float(total)


def _conjugate_1q(rho: np.ndarray, m2: np.ndarray, q: int, n: int) -> np.ndarray:
    gate_like = rho.reshape(2**q, 2, -1)
    out = np.empty_like(gate_like)
    out[:, 0, :] = m2[0, 0] * gate_like[:, 0, :] + m2[0, 1] * gate_like[:, 1, :]
    out[:, 1, :] = m2[1, 0] * gate_like[:, 0, :] + m2[1, 1] * gate_like[:, 1, :]
    half = out.reshape(rho.shape)
    gate_like = half.conj().T.reshape(2**q, 2, -1)
    out = np.empty_like(gate_like)
    out[:, 0, :] = m2[0, 0] * gate_like[:, 0, :] + m2[0, 1] * gate_like[:, 1, :]
    out[:, 1, :] = m2[1, 0] * gate_like[:, 0, :] + m2[1, 1] * gate_like[:, 1, :]
    return out.reshape(rho.shape).conj().T
