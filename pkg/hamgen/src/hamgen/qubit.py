"""Second quantization and the Jordan-Wigner map to Pauli strings.

Spin orbital p = 2 * spatial + spin (0 = alpha). Qubit 0 is the leftmost
character of a Pauli string, matching the toolkit's file format.
"""
from __future__ import annotations

from .scf import ActiveSpace

# single-qubit products: (a, b) -> (phase, result)
_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


def _multiply_strings(sa: str, sb: str) -> tuple[complex, str]:
    phase = 1.0 + 0.0j
    out = []
    for a, b in zip(sa, sb):
        ph, r = _MUL[(a, b)]
        phase *= ph
        out.append(r)
    return phase, "".join(out)


def _multiply_sums(a: dict, b: dict) -> dict:
    out: dict[str, complex] = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            ph, s = _multiply_strings(sa, sb)
            out[s] = out.get(s, 0.0) + ca * cb * ph
    return out


def _add_into(acc: dict, other: dict, scale: complex = 1.0) -> None:
    for s, c in other.items():
        acc[s] = acc.get(s, 0.0) + scale * c


def _ladder(p: int, n_qubits: int, dagger: bool) -> dict:
    """Jordan-Wigner ladder operator with |1> = occupied.

    a_p = Z_0..Z_{p-1} (X + iY)/2 lowers |1> to |0>; the dagger takes
    (X - iY)/2.
    """
    base = ["I"] * n_qubits
    for k in range(p):
        base[k] = "Z"
    x = base.copy()
    x[p] = "X"
    y = base.copy()
    y[p] = "Y"
    sign = 0.5j if not dagger else -0.5j
    return {"".join(x): 0.5, "".join(y): sign}


def active_space_to_pauli_terms(space: ActiveSpace, tol: float = 1e-12) -> list[tuple[float, str]]:
    """Qubit Hamiltonian terms (coefficient, string) for the active space."""
    m = space.n_active_orbitals
    n_qubits = 2 * m
    # spin-orbital integrals from the spatial ones
    # h2 is chemists' (pq|rs) = integral of phi_p* phi_q (1/r12) phi_r* phi_s
    total: dict[str, complex] = {"I" * n_qubits: complex(space.core_energy)}

    ladders_dag = [_ladder(p, n_qubits, True) for p in range(n_qubits)]
    ladders = [_ladder(p, n_qubits, False) for p in range(n_qubits)]

    # one-body: sum_{pq,sigma} h1[p,q] a^dag_{p sigma} a_{q sigma}
    for p in range(m):
        for q in range(m):
            if abs(space.h1[p, q]) < 1e-14:
                continue
            for sigma in (0, 1):
                term = _multiply_sums(ladders_dag[2 * p + sigma], ladders[2 * q + sigma])
                _add_into(total, term, scale=space.h1[p, q])

    # two-body: 1/2 sum (pq|rs) a^dag_{p s1} a^dag_{r s2} a_{s s2} a_{q s1}
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    coeff = space.h2[p, q, r, s]
                    if abs(coeff) < 1e-14:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            i = 2 * p + s1
                            j = 2 * r + s2
                            k = 2 * s + s2
                            l = 2 * q + s1
                            if i == j or k == l:
                                continue
                            term = _multiply_sums(ladders_dag[i], ladders_dag[j])
                            term = _multiply_sums(term, ladders[k])
                            term = _multiply_sums(term, ladders[l])
                            _add_into(total, term, scale=0.5 * coeff)

    out = []
    for s, c in total.items():
        if abs(c.imag) > 1e-9:
            raise FloatingPointError(f"non-real Pauli coefficient {c} for {s}")
        if abs(c.real) >= tol:
            out.append((float(c.real), s))
    out.sort(key=lambda t: t[1])
    return out
