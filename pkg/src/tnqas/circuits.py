"""Gate and circuit containers for the {RX, RY, RZ, CNOT} pool.

U2Q gates (raw 4x4 unitaries) exist only inside the warm-start pipeline,
before transpilation; serialized circuits never contain them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("CNOT", "U2Q")


class CircuitFormatError(ValueError):
    """Raised when circuit text does not conform to the serialization format."""


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit indices in {self.qubits}")
        if self.kind in ROTATION_KINDS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on exactly one qubit")
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        elif self.kind == "CNOT":
            if len(self.qubits) != 2:
                raise ValueError("CNOT needs (control, target)")
            if self.angle is not None:
                raise ValueError("CNOT carries no angle")
        else:  # U2Q
            if len(self.qubits) != 2:
                raise ValueError("U2Q acts on two qubits")
            if self.matrix is None or self.matrix.shape != (4, 4):
                raise ValueError("U2Q needs a 4x4 matrix")

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATION_KINDS


@dataclass
class Circuit:
    """Ordered gate list; rotation angles are the trainable parameters."""

    n_qubits: int
    gates: list[GateOp] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        for g in self.gates:
            self._check_gate(g)

    def _check_gate(self, gate: GateOp):
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit index {q} out of range for n={self.n_qubits}")

    def append(self, gate: GateOp) -> None:
        self._check_gate(gate)
        self.gates.append(gate)

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.gates))

    @property
    def rotation_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.gates) if g.is_rotation]

    @property
    def n_params(self) -> int:
        return sum(1 for g in self.gates if g.is_rotation)

    def angles(self) -> np.ndarray:
        return np.array([g.angle for g in self.gates if g.is_rotation], dtype=float)

    def with_angles(self, theta) -> "Circuit":
        """New circuit with rotation angles replaced in gate order."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} angles, got {theta.shape}")
        gates = []
        k = 0
        for g in self.gates:
            if g.is_rotation:
                gates.append(GateOp(g.kind, g.qubits, angle=float(theta[k])))
                k += 1
            else:
                gates.append(g)
        return Circuit(self.n_qubits, gates)

    def depth(self) -> int:
        """Moment count from greedy left packing."""
        frontier = [0] * self.n_qubits
        depth = 0
        for g in self.gates:
            moment = max(frontier[q] for q in g.qubits) + 1
            for q in g.qubits:
                frontier[q] = moment
            depth = max(depth, moment)
        return depth

    def moments(self) -> list[int]:
        """Greedy moment index (0-based) of every gate, in gate order."""
        frontier = [0] * self.n_qubits
        out = []
        for g in self.gates:
            moment = max(frontier[q] for q in g.qubits)
            for q in g.qubits:
                frontier[q] = moment + 1
            out.append(moment)
        return out

    def count_gates(self) -> tuple[int, int]:
        """(CNOT count, rotation count)."""
        cnot = sum(1 for g in self.gates if g.kind == "CNOT")
        rot = sum(1 for g in self.gates if g.is_rotation)
        return cnot, rot

    def to_text(self, header_comments: tuple[str, ...] = ()) -> str:
        lines = [f"# {c}" for c in header_comments]
        lines.append(f"qubits {self.n_qubits}")
        for g in self.gates:
            if g.kind == "U2Q":
                raise ValueError("U2Q gates cannot be serialized; transpile first")
            if g.is_rotation:
                lines.append(f"{g.kind} {g.qubits[0]} {g.angle!r}")
            else:
                lines.append(f"CNOT {g.qubits[0]} {g.qubits[1]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        n_qubits = None
        gates = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n_qubits is None:
                if len(parts) != 2 or parts[0] != "qubits":
                    raise CircuitFormatError(
                        f"line {lineno}: expected header 'qubits <n>', got {line!r}"
                    )
                n_qubits = int(parts[1])
                continue
            kind = parts[0]
            try:
                if kind in ROTATION_KINDS:
                    if len(parts) != 3:
                        raise ValueError("expected '<kind> <qubit> <angle>'")
                    gates.append(GateOp(kind, (int(parts[1]),), angle=float(parts[2])))
                elif kind == "CNOT":
                    if len(parts) != 3:
                        raise ValueError("expected 'CNOT <control> <target>'")
                    gates.append(GateOp("CNOT", (int(parts[1]), int(parts[2]))))
                else:
                    raise ValueError(f"unknown gate {kind!r}")
            except ValueError as exc:
                raise CircuitFormatError(f"line {lineno}: {exc}") from None
        if n_qubits is None:
            raise CircuitFormatError("missing 'qubits <n>' header")
        return cls(n_qubits, gates)
