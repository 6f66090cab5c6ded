"""Two-qubit unitaries into the {RX, RY, RZ, CNOT} pool.

Every 4x4 unitary is synthesized with the generic 3-CNOT core
    -C--X--RZ(d)--o--------X--B-
    -D--o--RY(b)--X--RY(a)--o--A-
plus ZYZ single-qubit corrections, following the double-coset construction
in the magic basis. Identity and SWAP go through the same path, so the
CNOT count of a transpiled block is always exactly 3.
"""
from __future__ import annotations

import math

import numpy as np

from .circuits import Circuit, GateOp
from .simulator import rotation_matrix
from .stiefel import UnitaryStack, check_unitary

MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / np.sqrt(2)
MAGIC_DAG = MAGIC.conj().T

CNOT01 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CNOT10 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

_ANGLE_EPS = 1e-12  # rotations below this are dropped from emitted circuits


def zyz_decompose(u2: np.ndarray) -> tuple[float, float, float, float]:
    """(alpha, beta, gamma, phase) with u2 = e^{i phase} RZ(alpha) RY(beta) RZ(gamma).

    beta lies in [0, pi]; the gimbal cases beta in {0, pi} use gamma = 0.
    """
    check_unitary(u2)
    phase = 0.5 * np.angle(np.linalg.det(u2))
    su = u2 * np.exp(-1j * phase)
    beta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < 1e-12:
        gamma = 0.0
        alpha = 2.0 * np.angle(su[1, 1])
    elif abs(su[0, 0]) < 1e-12:
        gamma = 0.0
        alpha = 2.0 * np.angle(su[1, 0])
    else:
        alpha = np.angle(su[1, 1]) + np.angle(su[1, 0])
        gamma = np.angle(su[1, 1]) - np.angle(su[1, 0])
    rebuilt = _zyz_matrix(alpha, beta, gamma)
    if np.max(np.abs(rebuilt - su)) > 1e-8:
        # det phase is only defined mod pi; flip to the other branch
        phase += np.pi
        su = -su
        beta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
        if abs(su[1, 0]) < 1e-12:
            gamma = 0.0
            alpha = 2.0 * np.angle(su[1, 1])
        elif abs(su[0, 0]) < 1e-12:
            gamma = 0.0
            alpha = 2.0 * np.angle(su[1, 0])
        else:
            alpha = np.angle(su[1, 1]) + np.angle(su[1, 0])
            gamma = np.angle(su[1, 1]) - np.angle(su[1, 0])
    return float(alpha), float(beta), float(gamma), float(phase)


def _zyz_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    return (
        rotation_matrix("RZ", alpha)
        @ rotation_matrix("RY", beta)
        @ rotation_matrix("RZ", gamma)
    )


def _zyz_gates(u2: np.ndarray, qubit: int) -> list[GateOp]:
    alpha, beta, gamma, _ = zyz_decompose(u2)
    gates = []
    for kind, angle in (("RZ", gamma), ("RY", beta), ("RZ", alpha)):
        if abs(angle) > _ANGLE_EPS:
            gates.append(GateOp(kind, (qubit,), angle=angle))
    return gates


def two_qubit_matrix(gates: list[GateOp]) -> np.ndarray:
    """4x4 matrix of a gate list on qubits (0, 1), qubit 0 most significant."""
    mat = np.eye(4, dtype=complex)
    for g in gates:
        if g.is_rotation:
            r = rotation_matrix(g.kind, g.angle)
            emb = np.kron(r, np.eye(2)) if g.qubits[0] == 0 else np.kron(np.eye(2), r)
        elif g.kind == "CNOT":
            emb = CNOT01 if g.qubits == (0, 1) else CNOT10
        else:
            emb = g.matrix
        mat = emb @ mat
    return mat


def _simdiag_symmetric_unitary(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real orthogonal O with O^T s O diagonal, for symmetric unitary s."""
    x, y = np.real(s), np.imag(s)
    # X and Y are commuting real symmetric matrices; a generic linear
    # combination separates every shared eigenspace
    for t in (0.3183, 0.7071, 1.1931, 0.123, 1.618, 2.4142, 0.05, 2.9):
        _, o = np.linalg.eigh(math.cos(t) * x + math.sin(t) * y)
        d = o.T @ s @ o
        if np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-9:
            return o, np.diag(d)
    raise FloatingPointError("simultaneous diagonalization failed")


def _match_order(ref: np.ndarray, vals: np.ndarray) -> np.ndarray:
    perm = np.full(ref.shape[0], -1, dtype=int)
    used = np.zeros(vals.shape[0], dtype=bool)
    for i, r in enumerate(ref):
        dists = np.where(used, np.inf, np.abs(vals - r))
        j = int(np.argmin(dists))
        perm[i] = j
        used[j] = True
    return perm


def _extract_su2su2_prefactors(u4: np.ndarray, v4: np.ndarray):
    """A, B, C, D with (A x B) v4 (C x D) = u4, valid when u4 and v4 share a coset."""
    u = MAGIC_DAG @ u4 @ MAGIC
    v = MAGIC_DAG @ v4 @ MAGIC
    uut = u @ u.T
    vvt = v @ v.T
    p, du = _simdiag_symmetric_unitary(uut)
    q, dv = _simdiag_symmetric_unitary(vvt)
    q = q[:, _match_order(du, dv)]
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    g = p @ q.T
    h = v.conj().T @ q @ p.T @ u
    if np.max(np.abs(np.imag(h))) > 1e-8:
        raise FloatingPointError("prefactor extraction left a non-real orthogonal factor")
    ab = MAGIC @ g @ MAGIC_DAG
    cd = MAGIC @ h @ MAGIC_DAG
    a, b = _kron_factor(ab)
    c, d = _kron_factor(cd)
    return a, b, c, d


def _kron_factor(m4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor an (exact) A x B product of 2x2 unitaries out of a 4x4 matrix."""
    r = m4.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    uu, ss, vv = np.linalg.svd(r)
    a = (uu[:, 0] * math.sqrt(2.0)).reshape(2, 2)
    b = (vv[0, :] * ss[0] / math.sqrt(2.0)).reshape(2, 2)
    check_unitary(a, tol=1e-7)
    check_unitary(b, tol=1e-7)
    return a, b


def kak_decompose(u4: np.ndarray) -> tuple[list[GateOp], float]:
    """Gate sequence on qubits (0, 1) with exactly 3 CNOTs, plus global phase.

    two_qubit_matrix(gates) * e^{i phase} reproduces u4 within 1e-8.
    """
    u4 = np.asarray(u4, dtype=complex)
    check_unitary(u4)
    det = np.linalg.det(u4)
    su = u4 * np.exp(-0.25j * np.angle(det))
    swap_u = np.exp(0.25j * np.pi) * (SWAP @ su)

    u_mb = MAGIC_DAG @ swap_u @ MAGIC
    gamma_u = u_mb @ u_mb.T
    angles = np.sort(np.angle(np.linalg.eigvals(gamma_u)))
    x, y, z = angles[0], angles[1], angles[2]
    alpha = (x + y) / 2.0
    beta = (x + z) / 2.0
    delta = (z + y) / 2.0

    interior = [
        GateOp("CNOT", (1, 0)),
        GateOp("RZ", (0,), angle=float(delta)),
        GateOp("RY", (1,), angle=float(beta)),
        GateOp("CNOT", (0, 1)),
        GateOp("RY", (1,), angle=float(alpha)),
        GateOp("CNOT", (1, 0)),
    ]
    v4 = SWAP @ two_qubit_matrix(interior)
    a, b, c, d = _extract_su2su2_prefactors(swap_u, v4)

    gates = (
        _zyz_gates(c, 0)
        + _zyz_gates(d, 1)
        + interior
        + _zyz_gates(b, 0)  # SWAP conjugation moves B onto qubit 0
        + _zyz_gates(a, 1)
    )
    rebuilt = two_qubit_matrix(gates)
    tr = np.trace(rebuilt.conj().T @ u4)
    phase = float(np.angle(tr))
    err = np.max(np.abs(np.exp(1j * phase) * rebuilt - u4))
    if err > 1e-8:
        raise FloatingPointError(f"KAK reconstruction error {err:.2e}")
    return gates, phase


def transpile_stack(stack: UnitaryStack) -> Circuit:
    """Brickwork stack into a pool circuit; 3 CNOTs per block, phase discarded.

    Expectation values are phase-invariant, so the accumulated global phase
    is tracked through the per-block decompositions and then dropped.
    """
    n = stack.layout.n_qubits
    circuit = Circuit(n)
    total_phase = 0.0
    for (q1, q2), u in zip(stack.layout.pairs, stack.unitaries):
        gates, phase = kak_decompose(u)
        total_phase += phase
        for g in gates:
            mapped = tuple(q1 if q == 0 else q2 for q in g.qubits)
            circuit.append(GateOp(g.kind, mapped, angle=g.angle))
    return circuit
