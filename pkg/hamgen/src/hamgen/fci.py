"""Determinant-basis full CI inside the active space.

Matrix elements come from explicit ladder-operator application on
occupation bitmasks with fermionic parity signs. Independent of the
Jordan-Wigner Pauli machinery: the cross-check that the qubit
Hamiltonian's dense ground energy reproduces the chemistry.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .scf import ActiveSpace


def _spin_orbital_integrals(space: ActiveSpace):
    """h1 and antisymmetrized physicists' <pq||rs> over spin orbitals."""
    m = space.n_active_orbitals
    n_so = 2 * m
    h1 = np.zeros((n_so, n_so))
    for p in range(m):
        for q in range(m):
            for sigma in (0, 1):
                h1[2 * p + sigma, 2 * q + sigma] = space.h1[p, q]
    g = np.zeros((n_so, n_so, n_so, n_so))
    # physicists' <pq|rs> = chemists' (pr|qs); spin conserved p~r, q~s
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    val = space.h2[p, r, q, s]
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            g[2 * p + s1, 2 * q + s2, 2 * r + s1, 2 * s + s2] = val
    return h1, g - g.transpose(0, 1, 3, 2)


def _parity(mask: int, orb: int) -> int:
    return -1 if bin(mask & ((1 << orb) - 1)).count("1") % 2 else 1


def _annihilate(mask: int, orb: int):
    if not mask & (1 << orb):
        return None
    return mask ^ (1 << orb), _parity(mask, orb)


def _create(mask: int, orb: int):
    if mask & (1 << orb):
        return None
    return mask | (1 << orb), _parity(mask, orb)


def fci_ground_energy(space: ActiveSpace) -> float:
    """Lowest eigenvalue of the active-space CI matrix plus the core shift."""
    m = space.n_active_orbitals
    n_so = 2 * m
    n_alpha = (space.n_active_electrons + 1) // 2
    n_beta = space.n_active_electrons - n_alpha
    h1, g = _spin_orbital_integrals(space)

    alphas = [sum(1 << (2 * o) for o in occ) for occ in combinations(range(m), n_alpha)]
    betas = [sum(1 << (2 * o + 1) for o in occ) for occ in combinations(range(m), n_beta)]
    dets = sorted(a | b for a in alphas for b in betas)
    index = {d: i for i, d in enumerate(dets)}
    dim = len(dets)

    hmat = np.zeros((dim, dim))
    nz_h1 = [(p, q) for p in range(n_so) for q in range(n_so) if abs(h1[p, q]) > 1e-14]
    nz_g = [
        (p, q, r, s)
        for p in range(n_so)
        for q in range(n_so)
        for r in range(n_so)
        for s in range(n_so)
        if abs(g[p, q, r, s]) > 1e-14
    ]

    for j, det in enumerate(dets):
        # one-body: h1[p, q] a^dag_p a_q
        for p, q in nz_h1:
            step = _annihilate(det, q)
            if step is None:
                continue
            mask, sign = step
            step = _create(mask, p)
            if step is None:
                continue
            mask, sign2 = step
            i = index.get(mask)
            if i is not None:
                hmat[i, j] += h1[p, q] * sign * sign2
        # two-body: 1/4 <pq||rs> a^dag_p a^dag_q a_s a_r
        for p, q, r, s in nz_g:
            step = _annihilate(det, r)
            if step is None:
                continue
            mask, s1 = step
            step = _annihilate(mask, s)
            if step is None:
                continue
            mask, s2 = step
            step = _create(mask, q)
            if step is None:
                continue
            mask, s3 = step
            step = _create(mask, p)
            if step is None:
                continue
            mask, s4 = step
            i = index.get(mask)
            if i is not None:
                hmat[i, j] += 0.25 * g[p, q, r, s] * s1 * s2 * s3 * s4
    return float(np.linalg.eigvalsh(hmat)[0] + space.core_energy)
