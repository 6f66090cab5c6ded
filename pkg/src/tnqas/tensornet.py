"""Matrix product states, MPO construction, and two-site DMRG.

Site tensors carry shape (left bond, physical 2, right bond) with boundary
bonds of size 1; MPO tensors carry (left, bra 2, ket 2, right). The DMRG
eigensolve is dense: at desk scale the effective dimension stays small
enough that Lanczos buys nothing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .pauli import PAULI_MATRICES, MAX_DENSE_QUBITS, PauliSum

_SVD_CUTOFF = 1e-12


class MPS:
    """Open-boundary MPS with a recorded bond cap."""

    def __init__(self, tensors, chi_max: int | None = None):
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for a, b in zip(self.tensors, self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError("mismatched internal bond dimensions")
        self.chi_max = chi_max if chi_max is not None else max(self.bond_dims(), default=1)

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    def copy(self) -> "MPS":
        return MPS([t.copy() for t in self.tensors], chi_max=self.chi_max)

    def norm(self) -> float:
        return float(np.sqrt(abs(overlap(self, self))))

    def normalized(self) -> "MPS":
        out = self.copy()
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero state")
        out.tensors[-1] = out.tensors[-1] / nrm
        return out

    @classmethod
    def product_state(cls, site_vectors) -> "MPS":
        tensors = []
        for v in site_vectors:
            v = np.asarray(v, dtype=complex).reshape(2)
            tensors.append(v.reshape(1, 2, 1))
        return cls(tensors, chi_max=1)

    @classmethod
    def computational_basis(cls, bits) -> "MPS":
        vecs = [(np.array([1.0, 0.0]) if b == 0 else np.array([0.0, 1.0])) for b in bits]
        return cls.product_state(vecs)

    @classmethod
    def random_product(cls, n: int, rng) -> "MPS":
        vecs = []
        for _ in range(n):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            vecs.append(v / np.linalg.norm(v))
        return cls.product_state(vecs)

    def inner_with_dense(self, vec: np.ndarray) -> complex:
        """<self|vec> contracting site tensors against a dense statevector."""
        n = self.n_sites
        if vec.shape[0] != 2**n:
            raise ValueError("dimension mismatch")
        # env[r, rest] after absorbing sites 0..k
        env = vec.reshape(1, -1)
        for t in self.tensors:
            # env: (Dl, 2 * rest); contract bra tensor (Dl, 2, Dr)
            dl = t.shape[0]
            env = env.reshape(dl, 2, -1)
            env = np.tensordot(t.conj(), env, axes=([0, 1], [0, 1]))  # (Dr, rest)
        return complex(env.reshape(()))


def statevector_from_mps(m: MPS) -> np.ndarray:
    """Normalized dense amplitudes (n <= 12)."""
    if m.n_sites > MAX_DENSE_QUBITS:
        raise ValueError(f"dense conversion refused for n={m.n_sites} > {MAX_DENSE_QUBITS}")
    acc = m.tensors[0].reshape(2, -1)  # (phys..., right bond)
    for t in m.tensors[1:]:
        acc = np.tensordot(acc, t, axes=([-1], [0]))
        acc = acc.reshape(-1, t.shape[2])
    vec = acc.reshape(-1)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("zero-norm MPS")
    return vec / nrm


def mps_from_statevector(vec: np.ndarray, chi: int) -> MPS:
    """Sequential-SVD factorization with bond cap chi (ties keep earlier index).

    The result is not renormalized; its norm^2 is the kept Schmidt weight.
    """
    n = int(round(np.log2(vec.shape[0])))
    if 2**n != vec.shape[0]:
        raise ValueError("length is not a power of two")
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"conversion refused for n={n} > {MAX_DENSE_QUBITS}")
    if chi < 1:
        raise ValueError("chi must be >= 1")
    tensors = []
    rest = np.asarray(vec, dtype=complex).reshape(1, -1)
    left = 1
    for site in range(n - 1):
        mat = rest.reshape(left * 2, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        keep = min(chi, s.shape[0])
        if s[0] > 0:
            keep = min(keep, max(1, int(np.sum(s > _SVD_CUTOFF * s[0]))))
        u, s, vh = u[:, :keep], s[:keep], vh[:keep, :]
        tensors.append(u.reshape(left, 2, keep))
        rest = (s[:, None] * vh).reshape(keep, -1)
        left = keep
    tensors.append(rest.reshape(left, 2, 1))
    return MPS(tensors, chi_max=chi)


def overlap(a: MPS, b: MPS) -> complex:
    """<a|b> by transfer-matrix contraction."""
    if a.n_sites != b.n_sites:
        raise ValueError("site counts differ")
    env = np.ones((1, 1), dtype=complex)  # (bra bond, ket bond)
    for ta, tb in zip(a.tensors, b.tensors):
        env = np.tensordot(env, tb, axes=([1], [0]))        # (bra, 2, Drb)
        env = np.tensordot(ta.conj(), env, axes=([0, 1], [0, 1]))  # (Dra, Drb)
    return complex(env.reshape(()))


class MPO:
    """Matrix product operator with tensors (left, bra, ket, right)."""

    def __init__(self, tensors):
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[3] != 1:
            raise ValueError("boundary bonds must have dimension 1")

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    def bond_dims(self) -> list[int]:
        return [t.shape[3] for t in self.tensors[:-1]]

    def to_dense(self) -> np.ndarray:
        if self.n_sites > MAX_DENSE_QUBITS:
            raise ValueError("dense conversion refused above the oracle limit")
        acc = self.tensors[0].reshape(2, 2, -1)  # (bra, ket, right)
        rows, cols = 2, 2
        for t in self.tensors[1:]:
            acc = np.tensordot(acc, t, axes=([-1], [0]))  # (bra, ket, 2, 2, r)
            acc = acc.transpose(0, 2, 1, 3, 4).reshape(rows * 2, cols * 2, -1)
            rows *= 2
            cols *= 2
        return acc.reshape(rows, cols)


def mpo_from_pauli_sum(h: PauliSum) -> MPO:
    """Sum of per-term product MPOs, then pairwise SVD compression (cutoff 1e-12)."""
    n = h.n_qubits
    terms = h.terms
    if not terms:
        terms = ((0.0, "I" * n),)
    t_count = len(terms)
    tensors = []
    for site in range(n):
        left = 1 if site == 0 else t_count
        right = 1 if site == n - 1 else t_count
        w = np.zeros((left, 2, 2, right), dtype=complex)
        for t, (coeff, string) in enumerate(terms):
            op = PAULI_MATRICES[string[site]]
            if site == 0:
                w[0, :, :, t if n > 1 else 0] += coeff * op
            elif site == n - 1:
                w[t, :, :, 0] = op
            else:
                w[t, :, :, t] = op
        tensors.append(w)
    mpo = MPO(tensors)
    _compress_mpo(mpo)
    return mpo


def _compress_mpo(mpo: MPO, cutoff: float = _SVD_CUTOFF) -> None:
    n = mpo.n_sites
    # left-to-right: orthogonalize, pushing weight right
    for i in range(n - 1):
        t = mpo.tensors[i]
        l, _, _, r = t.shape
        mat = t.reshape(l * 4, r)
        q, rm = np.linalg.qr(mat)
        k = q.shape[1]
        mpo.tensors[i] = q.reshape(l, 2, 2, k)
        mpo.tensors[i + 1] = np.tensordot(rm, mpo.tensors[i + 1], axes=([1], [0]))
    # right-to-left: SVD truncation
    for i in range(n - 1, 0, -1):
        t = mpo.tensors[i]
        l, _, _, r = t.shape
        mat = t.reshape(l, 4 * r)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        if s.shape[0] and s[0] > 0:
            keep = max(1, int(np.sum(s > cutoff * s[0])))
        else:
            keep = 1
        u, s, vh = u[:, :keep], s[:keep], vh[:keep, :]
        mpo.tensors[i] = vh.reshape(keep, 2, 2, r)
        carry = u * s[None, :]
        mpo.tensors[i - 1] = np.tensordot(mpo.tensors[i - 1], carry, axes=([3], [0]))


@dataclass
class DmrgConfig:
    chi_max: int = 2
    max_sweeps: int = 20
    tol: float = 1e-10
    cutoff: float = _SVD_CUTOFF

    def __post_init__(self):
        if self.chi_max < 1:
            raise ValueError("chi_max must be >= 1")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class DmrgResult:
    mps: MPS
    energy: float
    sweep_energies: list[float] = field(default_factory=list)
    converged: bool = True


def _right_canonicalize(mps: MPS) -> None:
    for i in range(mps.n_sites - 1, 0, -1):
        t = mps.tensors[i]
        l, p, r = t.shape
        mat = t.reshape(l, p * r)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        mps.tensors[i] = vh.reshape(-1, p, r)
        carry = u * s[None, :]
        mps.tensors[i - 1] = np.tensordot(mps.tensors[i - 1], carry, axes=([2], [0]))
    nrm = np.linalg.norm(mps.tensors[0])
    if nrm > 0:
        mps.tensors[0] = mps.tensors[0] / nrm


def _env_update_left(env, bra, w, ket):
    # env (Dl_bra, wl, Dl_ket) -> (Dr_bra, wr, Dr_ket)
    tmp = np.tensordot(env, bra.conj(), axes=([0], [0]))   # (wl, Dlk, p_bra, Drb)
    tmp = np.tensordot(tmp, w, axes=([0, 2], [0, 1]))      # (Dlk, Drb, p_ket, wr)
    tmp = np.tensordot(tmp, ket, axes=([0, 2], [0, 1]))    # (Drb, wr, Drk)
    return tmp


def _env_update_right(env, bra, w, ket):
    # env (Dr_bra, wr, Dr_ket) -> (Dl_bra, wl, Dl_ket)
    tmp = np.tensordot(bra.conj(), env, axes=([2], [0]))   # (Dlb, p_bra, wr, Drk)
    tmp = np.tensordot(w, tmp, axes=([3, 1], [2, 1]))      # (wl, p_ket, Dlb, Drk)
    tmp = np.tensordot(tmp, ket, axes=([1, 3], [1, 2]))    # (wl, Dlb, Dlk)
    return tmp.transpose(1, 0, 2)


def _effective_matrix(envl, w1, w2, envr):
    # H_eff[(albra s t brbra), (alket s' t' brket)]
    tmp = np.tensordot(envl, w1, axes=([1], [0]))          # (alb, alk, s, s2, m)
    tmp = np.tensordot(tmp, w2, axes=([4], [0]))           # (alb, alk, s, s2, t, t2, m2)
    tmp = np.tensordot(tmp, envr, axes=([6], [1]))         # (alb, alk, s, s2, t, t2, brb, brk)
    tmp = tmp.transpose(0, 2, 4, 6, 1, 3, 5, 7)
    dim = tmp.shape[0] * tmp.shape[1] * tmp.shape[2] * tmp.shape[3]
    return tmp.reshape(dim, dim)


def dmrg_ground_state(
    h_mpo: MPO,
    cfg: DmrgConfig,
    rng: np.random.Generator | None = None,
    initial: MPS | None = None,
) -> DmrgResult:
    """Two-site DMRG with dense eigensolves of the effective Hamiltonian.

    Non-convergence is reported on the result, not raised: the pipeline
    proceeds with the best state found.
    """
    n = h_mpo.n_sites
    if n < 2:
        raise ValueError("DMRG needs at least 2 sites")
    if rng is None:
        rng = np.random.default_rng(0)
    mps = initial.copy() if initial is not None else MPS.random_product(n, rng)
    mps.chi_max = cfg.chi_max
    _right_canonicalize(mps)

    left_envs = [np.ones((1, 1, 1), dtype=complex)]
    for _ in range(n):
        left_envs.append(None)
    right_envs = [None] * n + [np.ones((1, 1, 1), dtype=complex)]
    for i in range(n - 1, 0, -1):
        right_envs[i] = _env_update_right(
            right_envs[i + 1], mps.tensors[i], h_mpo.tensors[i], mps.tensors[i]
        )

    def optimize_bond(i: int, to_right: bool) -> float:
        heff = _effective_matrix(
            left_envs[i], h_mpo.tensors[i], h_mpo.tensors[i + 1], right_envs[i + 2]
        )
        heff = 0.5 * (heff + heff.conj().T)
        vals, vecs = np.linalg.eigh(heff)
        energy = float(vals[0])
        dl = mps.tensors[i].shape[0]
        dr = mps.tensors[i + 1].shape[2]
        theta = vecs[:, 0].reshape(dl * 2, 2 * dr)
        u, s, vh = np.linalg.svd(theta, full_matrices=False)
        keep = min(cfg.chi_max, s.shape[0])
        if s[0] > 0:
            keep = min(keep, max(1, int(np.sum(s > cfg.cutoff * s[0]))))
        u, s, vh = u[:, :keep], s[:keep], vh[:keep, :]
        s = s / np.linalg.norm(s)
        if to_right:
            mps.tensors[i] = u.reshape(dl, 2, keep)
            mps.tensors[i + 1] = (s[:, None] * vh).reshape(keep, 2, dr)
            left_envs[i + 1] = _env_update_left(
                left_envs[i], mps.tensors[i], h_mpo.tensors[i], mps.tensors[i]
            )
        else:
            mps.tensors[i] = (u * s[None, :]).reshape(dl, 2, keep)
            mps.tensors[i + 1] = vh.reshape(keep, 2, dr)
            right_envs[i + 1] = _env_update_right(
                right_envs[i + 2], mps.tensors[i + 1], h_mpo.tensors[i + 1], mps.tensors[i + 1]
            )
        return energy

    sweep_energies: list[float] = []
    converged = False
    prev = None
    for _ in range(cfg.max_sweeps):
        energy = None
        for i in range(n - 1):
            energy = optimize_bond(i, to_right=True)
        for i in range(n - 2, -1, -1):
            energy = optimize_bond(i, to_right=False)
        sweep_energies.append(energy)
        if prev is not None and abs(prev - energy) < cfg.tol:
            converged = True
            break
        prev = energy
    return DmrgResult(mps=mps, energy=sweep_energies[-1], sweep_energies=sweep_energies, converged=converged)


class DmrgSolver(BaseEstimator):
    """Ground-state search over a PauliSum, scikit-learn style.

    After fit: mps_, energy_, sweep_energies_, converged_.
    """

    def __init__(self, chi_max=2, max_sweeps=20, tol=1e-10, cutoff=_SVD_CUTOFF, seed=0):
        self.chi_max = chi_max
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.cutoff = cutoff
        self.seed = seed

    def fit(self, hamiltonian: PauliSum, y=None):
        if not isinstance(hamiltonian, PauliSum):
            raise TypeError("DmrgSolver.fit expects a PauliSum")
        cfg = DmrgConfig(
            chi_max=self.chi_max, max_sweeps=self.max_sweeps, tol=self.tol, cutoff=self.cutoff
        )
        mpo = mpo_from_pauli_sum(hamiltonian)
        rng = np.random.default_rng(self.seed)
        res = dmrg_ground_state(mpo, cfg, rng=rng)
        self.mps_ = res.mps
        self.energy_ = res.energy
        self.sweep_energies_ = res.sweep_energies
        self.converged_ = res.converged
        return self

    def ground_state(self) -> np.ndarray:
        if not hasattr(self, "mps_"):
            raise NotFittedError("DmrgSolver is not fitted")
        return statevector_from_mps(self.mps_)
