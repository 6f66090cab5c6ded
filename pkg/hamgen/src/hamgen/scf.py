"""Restricted Hartree-Fock and active-space reduction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import build_basis, nuclear_charges
from .integrals import (
    eri_tensor,
    kinetic_matrix,
    nuclear_matrix,
    nuclear_repulsion,
    overlap_matrix,
)


@dataclass
class ScfResult:
    energy: float            # total RHF energy (electronic + nuclear)
    e_nuc: float
    mo_coeff: np.ndarray     # columns are MOs in the AO basis
    mo_energies: np.ndarray
    hcore: np.ndarray        # AO basis
    eri: np.ndarray          # AO basis, chemists' notation (ij|kl)
    n_electrons: int


def run_rhf(atoms, basis_name: str, max_iters: int = 200, tol: float = 1e-11) -> ScfResult:
    basis = build_basis(atoms, basis_name)
    charges = nuclear_charges(atoms)
    n_electrons = sum(z for z, _ in charges)
    if n_electrons % 2 != 0:
        raise ValueError("RHF needs an even electron count")
    n_occ = n_electrons // 2

    s = overlap_matrix(basis)
    t = kinetic_matrix(basis)
    v = nuclear_matrix(basis, charges)
    hcore = t + v
    eri = eri_tensor(basis)
    e_nuc = nuclear_repulsion(charges)

    svals, svecs = np.linalg.eigh(s)
    if svals.min() < 1e-10:
        raise ValueError("linearly dependent basis")
    x = svecs @ np.diag(svals**-0.5) @ svecs.T

    def fock(density):
        j = np.einsum("pqrs,rs->pq", eri, density)
        k = np.einsum("prqs,rs->pq", eri, density)
        return hcore + j - 0.5 * k

    density = np.zeros_like(s)
    energy = 0.0
    for _ in range(max_iters):
        f = fock(density)
        e_new = 0.5 * np.einsum("pq,pq->", density, hcore + f) + e_nuc
        fp = x.T @ f @ x
        mo_e, cp = np.linalg.eigh(fp)
        c = x @ cp
        occ = c[:, :n_occ]
        density = 2.0 * occ @ occ.T
        if abs(e_new - energy) < tol:
            energy = e_new
            break
        energy = e_new
    # one more consistent evaluation with the converged density
    f = fock(density)
    energy = 0.5 * np.einsum("pq,pq->", density, hcore + f) + e_nuc
    fp = x.T @ f @ x
    mo_e, cp = np.linalg.eigh(fp)
    c = x @ cp
    return ScfResult(
        energy=float(energy),
        e_nuc=float(e_nuc),
        mo_coeff=c,
        mo_energies=mo_e,
        hcore=hcore,
        eri=eri,
        n_electrons=n_electrons,
    )


@dataclass
class ActiveSpace:
    """Spatial-orbital integrals restricted to an active window.

    h1[p,q], h2[p,q,r,s] in chemists' notation (pq|rs) over active MOs;
    core (frozen) contributions folded into h1 and the scalar shift.
    """

    n_active_orbitals: int
    n_active_electrons: int
    core_energy: float       # nuclear repulsion + frozen-core energy
    h1: np.ndarray
    h2: np.ndarray


def make_active_space(
    scf: ScfResult, n_active_electrons: int | None = None, n_active_orbitals: int | None = None
) -> ActiveSpace:
    n_mo = scf.mo_coeff.shape[1]
    if n_active_orbitals is None:
        n_active_orbitals = n_mo
    if n_active_electrons is None:
        n_active_electrons = scf.n_electrons
    if (scf.n_electrons - n_active_electrons) % 2 != 0:
        raise ValueError("frozen electrons must pair up")
    n_core = (scf.n_electrons - n_active_electrons) // 2
    if n_core + n_active_orbitals > n_mo:
        raise ValueError("active window exceeds the orbital count")

    c = scf.mo_coeff
    h_mo = c.T @ scf.hcore @ c
    eri_mo = np.einsum("pi,qj,pqrs,rk,sl->ijkl", c, c, scf.eri, c, c, optimize=True)

    core = list(range(n_core))
    active = list(range(n_core, n_core + n_active_orbitals))

    e_core = scf.e_nuc
    for i in core:
        e_core += 2.0 * h_mo[i, i]
        for j in core:
            e_core += 2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]

    h1 = np.zeros((n_active_orbitals, n_active_orbitals))
    for a, p in enumerate(active):
        for b, q in enumerate(active):
            val = h_mo[p, q]
            for i in core:
                val += 2.0 * eri_mo[p, q, i, i] - eri_mo[p, i, i, q]
            h1[a, b] = val
    h2 = eri_mo[np.ix_(active, active, active, active)]
    return ActiveSpace(
        n_active_orbitals=n_active_orbitals,
        n_active_electrons=n_active_electrons,
        core_energy=float(e_core),
        h1=h1,
        h2=h2,
    )
