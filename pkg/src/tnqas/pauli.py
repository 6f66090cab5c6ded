"""Qubit Hamiltonians as weighted Pauli sums.

Strings use the convention "qubit 0 leftmost"; the statevector index of a
basis state is built the same way (qubit 0 = most significant bit).
Coefficients are real, which makes every PauliSum Hermitian by construction.
"""
from __future__ import annotations

import numpy as np

PAULI_CHARS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Dense 2^n x 2^n matrices above this qubit count are refused.
MAX_DENSE_QUBITS = 12

# Terms whose merged coefficient falls below this are dropped.
MERGE_TOL = 1e-14


class HamiltonianFormatError(ValueError):
    """Raised when a Hamiltonian file does not conform to the text format."""


def _check_string(s: str, n_qubits: int) -> str:
    if len(s) != n_qubits:
        raise ValueError(f"Pauli string {s!r} has length {len(s)}, expected {n_qubits}")
    for ch in s:
        if ch not in PAULI_CHARS:
            raise ValueError(f"unknown Pauli letter {ch!r} in {s!r}")
    return s


class PauliSum:
    """Immutable weighted sum of Pauli strings on a fixed qubit register.

    Duplicate strings are merged on construction and near-zero merged
    coefficients (|c| < 1e-14) are dropped.
    """

    def __init__(self, n_qubits: int, terms):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self._n = int(n_qubits)
        merged: dict[str, float] = {}
        for coeff, string in terms:
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff!r} for {string!r}")
            _check_string(string, self._n)
            merged[string] = merged.get(string, 0.0) + coeff
        self._terms = tuple(
            (c, s) for s, c in sorted(merged.items()) if abs(c) >= MERGE_TOL
        )
        # lazy caches for fast expectation evaluation (see simulator module)
        self._action_cache = None

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[tuple[float, str], ...]:
        """(coefficient, string) pairs, sorted by string."""
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self._n}, n_terms={len(self._terms)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self._n == other._n
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self._n, self._terms))


def build_tfim(n: int, h: float) -> PauliSum:
    """Transverse-field Ising chain: sum_i Z_i Z_{i+1} + h sum_i X_i, open chain."""
    if n < 2:
        raise ValueError("TFIM needs at least 2 qubits")
    if h < 0:
        raise ValueError("field strength must be non-negative")
    terms = []
    for i in range(n - 1):
        s = ["I"] * n
        s[i] = "Z"
        s[i + 1] = "Z"
        terms.append((1.0, "".join(s)))
    if h > 0:
        for i in range(n):
            s = ["I"] * n
            s[i] = "X"
            terms.append((float(h), "".join(s)))
    return PauliSum(n, terms)


def build_heisenberg(n: int) -> PauliSum:
    """Heisenberg chain with a uniform Z field, open boundary."""
    if n < 2:
        raise ValueError("Heisenberg chain needs at least 2 qubits")
    terms = []
    for i in range(n - 1):
        for p in "XYZ":
            s = ["I"] * n
            s[i] = p
            s[i + 1] = p
            terms.append((1.0, "".join(s)))
    for i in range(n):
        s = ["I"] * n
        s[i] = "Z"
        terms.append((1.0, "".join(s)))
    return PauliSum(n, terms)


def parse_hamiltonian_file(text: str) -> PauliSum:
    """Parse the Hamiltonian text format.

    Line 1: ``qubits <n>``. Every further non-empty, non-``#`` line is
    ``<coefficient> <pauli-string>``. Errors report the 1-based line number.
    """
    n_qubits = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n_qubits is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "qubits":
                raise HamiltonianFormatError(
                    f"line {lineno}: expected header 'qubits <n>', got {line!r}"
                )
            try:
                n_qubits = int(parts[1])
            except ValueError:
                raise HamiltonianFormatError(
                    f"line {lineno}: qubit count {parts[1]!r} is not an integer"
                ) from None
            if n_qubits < 1:
                raise HamiltonianFormatError(f"line {lineno}: qubit count must be positive")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise HamiltonianFormatError(
                f"line {lineno}: expected '<coefficient> <pauli-string>', got {line!r}"
            )
        coeff_text, string = parts
        # unicode minus shows up in hand-edited files
        coeff_text = coeff_text.replace("\u2212", "-")
        try:
            coeff = float(coeff_text)
        except ValueError:
            raise HamiltonianFormatError(
                f"line {lineno}: coefficient {coeff_text!r} is not a real number"
            ) from None
        if not np.isfinite(coeff):
            raise HamiltonianFormatError(f"line {lineno}: coefficient {coeff_text!r} is not finite")
        if len(string) != n_qubits:
            raise HamiltonianFormatError(
                f"line {lineno}: string {string!r} has length {len(string)}, expected {n_qubits}"
            )
        for ch in string:
            if ch not in PAULI_CHARS:
                raise HamiltonianFormatError(
                    f"line {lineno}: unknown Pauli letter {ch!r} in {string!r}"
                )
        terms.append((coeff, string))
    if n_qubits is None:
        raise HamiltonianFormatError("missing 'qubits <n>' header")
    return PauliSum(n_qubits, terms)


def serialize_hamiltonian(h: PauliSum) -> str:
    """Inverse of parse_hamiltonian_file up to term ordering."""
    lines = [f"qubits {h.n_qubits}"]
    for coeff, string in h.terms:
        lines.append(f"{coeff!r} {string}")
    return "\n".join(lines) + "\n"


def fake_minimum_energy(h: PauliSum) -> float:
    """-sum_i |c_i|: a guaranteed lower bound on the ground energy."""
    return -sum(abs(c) for c, _ in h.terms)


def to_dense_matrix(h: PauliSum) -> np.ndarray:
    """Dense 2^n x 2^n Hermitian matrix of the Pauli sum."""
    n = h.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrix refused for n={n} > {MAX_DENSE_QUBITS}")
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, string in h.terms:
        term = np.array([[coeff]], dtype=complex)
        for ch in string:
            term = np.kron(term, PAULI_MATRICES[ch])
        mat += term
    return mat


def exact_ground_energy(h: PauliSum) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and one eigenvector, by dense diagonalization."""
    if h.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(
            f"exact diagonalization refused for n={h.n_qubits} > {MAX_DENSE_QUBITS}"
        )
    mat = to_dense_matrix(h)
    vals, vecs = np.linalg.eigh(mat)
    return float(vals[0]), vecs[:, 0]
