"""McMurchie-Davidson one- and two-electron integrals over Cartesian Gaussians.

Hermite expansion coefficients E_t^{ij} and Hermite Coulomb integrals
R_{tuv} follow the standard recursions; the Boys function is evaluated via
the regularized lower incomplete gamma function.
"""
from __future__ import annotations

import numpy as np
from scipy.special import gamma, gammainc

from .basis import BasisFunction


def boys(m: int, x: float) -> float:
    if x < 1e-12:
        return 1.0 / (2 * m + 1) - x / (2 * m + 3)
    return 0.5 * x ** (-(m + 0.5)) * gamma(m + 0.5) * gammainc(m + 0.5, x)


def _hermite_e(i: int, j: int, t: int, qx: float, a: float, b: float) -> float:
    """Expansion coefficient of x^i_A x^j_B onto Hermite Gaussians."""
    p = a + b
    q = a * b / p
    if i < 0 or j < 0 or t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-q * qx * qx)
    if j == 0:
        return (
            _hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
            - (q * qx / a) * _hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * _hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        _hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
        + (q * qx / b) * _hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * _hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def _overlap_prim(a, la, ra, b, lb, rb) -> float:
    p = a + b
    s = 1.0
    for d in range(3):
        s *= _hermite_e(la[d], lb[d], 0, ra[d] - rb[d], a, b)
    return s * (np.pi / p) ** 1.5


def _kinetic_prim(a, la, ra, b, lb, rb) -> float:
    l, m, n = lb
    term0 = b * (2 * (l + m + n) + 3) * _overlap_prim(a, la, ra, b, lb, rb)
    term1 = (
        -2.0
        * b**2
        * (
            _overlap_prim(a, la, ra, b, (l + 2, m, n), rb)
            + _overlap_prim(a, la, ra, b, (l, m + 2, n), rb)
            + _overlap_prim(a, la, ra, b, (l, m, n + 2), rb)
        )
    )
    term2 = -0.5 * (
        l * (l - 1) * _overlap_prim(a, la, ra, b, (l - 2, m, n), rb)
        + m * (m - 1) * _overlap_prim(a, la, ra, b, (l, m - 2, n), rb)
        + n * (n - 1) * _overlap_prim(a, la, ra, b, (l, m, n - 2), rb)
    )
    return term0 + term1 + term2


def _hermite_coulomb(t, u, v, n, p, pc) -> float:
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        r2 = pc[0] ** 2 + pc[1] ** 2 + pc[2] ** 2
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t > 0:
        return (t - 1) * _hermite_coulomb(t - 2, u, v, n + 1, p, pc) + pc[0] * _hermite_coulomb(
            t - 1, u, v, n + 1, p, pc
        )
    if u > 0:
        return (u - 1) * _hermite_coulomb(t, u - 2, v, n + 1, p, pc) + pc[1] * _hermite_coulomb(
            t, u - 1, v, n + 1, p, pc
        )
    return (v - 1) * _hermite_coulomb(t, u, v - 2, n + 1, p, pc) + pc[2] * _hermite_coulomb(
        t, u, v - 1, n + 1, p, pc
    )


def _nuclear_prim(a, la, ra, b, lb, rb, rc) -> float:
    p = a + b
    rp = tuple((a * ra[d] + b * rb[d]) / p for d in range(3))
    pc = tuple(rp[d] - rc[d] for d in range(3))
    total = 0.0
    for t in range(la[0] + lb[0] + 1):
        et = _hermite_e(la[0], lb[0], t, ra[0] - rb[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            eu = _hermite_e(la[1], lb[1], u, ra[1] - rb[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                ev = _hermite_e(la[2], lb[2], v, ra[2] - rb[2], a, b)
                total += et * eu * ev * _hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * np.pi / p * total


def _eri_prim(a, la, ra, b, lb, rb, c, lc, rc, d, ld, rd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = tuple((a * ra[k] + b * rb[k]) / p for k in range(3))
    rq = tuple((c * rc[k] + d * rd[k]) / q for k in range(3))
    pq = tuple(rp[k] - rq[k] for k in range(3))
    total = 0.0
    for t in range(la[0] + lb[0] + 1):
        e1t = _hermite_e(la[0], lb[0], t, ra[0] - rb[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            e1u = _hermite_e(la[1], lb[1], u, ra[1] - rb[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                e1v = _hermite_e(la[2], lb[2], v, ra[2] - rb[2], a, b)
                e1 = e1t * e1u * e1v
                if e1 == 0.0:
                    continue
                for tau in range(lc[0] + ld[0] + 1):
                    e2t = _hermite_e(lc[0], ld[0], tau, rc[0] - rd[0], c, d)
                    for nu in range(lc[1] + ld[1] + 1):
                        e2u = _hermite_e(lc[1], ld[1], nu, rc[1] - rd[1], c, d)
                        for phi in range(lc[2] + ld[2] + 1):
                            e2v = _hermite_e(lc[2], ld[2], phi, rc[2] - rd[2], c, d)
                            e2 = e2t * e2u * e2v
                            if e2 == 0.0:
                                continue
                            sign = (-1.0) ** (tau + nu + phi)
                            total += (
                                e1
                                * e2
                                * sign
                                * _hermite_coulomb(t + tau, u + nu, v + phi, 0, alpha, pq)
                            )
    return total * 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))


def _contract2(f, bf1: BasisFunction, bf2: BasisFunction, *extra) -> float:
    total = 0.0
    for a, ca in zip(bf1.exponents, bf1.coefficients):
        for b, cb in zip(bf2.exponents, bf2.coefficients):
            total += ca * cb * f(a, bf1.powers, bf1.center, b, bf2.powers, bf2.center, *extra)
    return total


def overlap_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = _contract2(_overlap_prim, basis[i], basis[j])
    return s


def kinetic_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            t[i, j] = t[j, i] = _contract2(_kinetic_prim, basis[i], basis[j])
    return t


def nuclear_matrix(basis: list[BasisFunction], charges) -> np.ndarray:
    n = len(basis)
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            total = 0.0
            for z, rc in charges:
                total -= z * _contract2(_nuclear_prim, basis[i], basis[j], rc)
            v[i, j] = v[j, i] = total
    return v


def eri_tensor(basis: list[BasisFunction]) -> np.ndarray:
    """(ij|kl) chemists' notation with full 8-fold symmetry."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    done = {}
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    ij = i * (i + 1) // 2 + j
                    kl = k * (k + 1) // 2 + l
                    if ij < kl:
                        continue
                    total = 0.0
                    bi, bj, bk, bl = basis[i], basis[j], basis[k], basis[l]
                    for a, ca in zip(bi.exponents, bi.coefficients):
                        for b, cb in zip(bj.exponents, bj.coefficients):
                            for c, cc in zip(bk.exponents, bk.coefficients):
                                for d, cd in zip(bl.exponents, bl.coefficients):
                                    total += ca * cb * cc * cd * _eri_prim(
                                        a, bi.powers, bi.center,
                                        b, bj.powers, bj.center,
                                        c, bk.powers, bk.center,
                                        d, bl.powers, bl.center,
                                    )
                    for p, q in ((i, j), (j, i)):
                        for r, s in ((k, l), (l, k)):
                            eri[p, q, r, s] = total
                            eri[r, s, p, q] = total
    return eri


def nuclear_repulsion(charges) -> float:
    total = 0.0
    for a in range(len(charges)):
        for b in range(a + 1, len(charges)):
            za, ra = charges[a]
            zb, rb = charges[b]
            r = np.sqrt(sum((ra[d] - rb[d]) ** 2 for d in range(3)))
            total += za * zb / r
    return total
