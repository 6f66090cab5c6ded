"""Contracted Gaussian basis sets (Cartesian s/p shells).

STO-3G parameters follow the standard zeta-scaled 1s/2sp fits; 6-31G data
covers the elements the molecule table needs. Exponents in bohr^-2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.8897259886

# (l, m, n) cartesian powers per shell type
SHELL_FUNCTIONS = {
    "s": [(0, 0, 0)],
    "p": [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
}

ATOMIC_NUMBERS = {"H": 1, "Li": 3, "Be": 4, "C": 6, "O": 8}

# element -> list of (shell type, exponents, contraction coefficients)
STO3G = {
    "H": [
        ("s", [3.42525091, 0.62391373, 0.16885540],
              [0.15432897, 0.53532814, 0.44463454]),
    ],
    "Li": [
        ("s", [16.1195750, 2.9362007, 0.7946505],
              [0.15432897, 0.53532814, 0.44463454]),
        ("s", [0.6362897, 0.1478601, 0.0480887],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [0.6362897, 0.1478601, 0.0480887],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
    "Be": [
        ("s", [30.1678710, 5.4951153, 1.4871927],
              [0.15432897, 0.53532814, 0.44463454]),
        ("s", [1.3148331, 0.3055389, 0.0993707],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [1.3148331, 0.3055389, 0.0993707],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
    "C": [
        ("s", [71.6168370, 13.0450960, 3.5305122],
              [0.15432897, 0.53532814, 0.44463454]),
        ("s", [2.9412494, 0.6834831, 0.2222899],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [2.9412494, 0.6834831, 0.2222899],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
    "O": [
        ("s", [130.7093200, 23.8088610, 6.4436083],
              [0.15432897, 0.53532814, 0.44463454]),
        ("s", [5.0331513, 1.1695961, 0.3803890],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [5.0331513, 1.1695961, 0.3803890],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
}

G631 = {
    "H": [
        ("s", [18.7311370, 2.8253937, 0.6401217],
              [0.03349460, 0.23472695, 0.81375733]),
        ("s", [0.1612778], [1.0]),
    ],
    "O": [
        ("s", [5484.6717, 825.23495, 188.04696, 52.964500, 16.897570, 5.7996353],
              [0.0018311, 0.0139501, 0.0684451, 0.2327143, 0.4701930, 0.3585209]),
        ("s", [15.539616, 3.5999336, 1.0137618],
              [-0.1107775, -0.1480263, 1.1307670]),
        ("p", [15.539616, 3.5999336, 1.0137618],
              [0.0708743, 0.3397528, 0.7271586]),
        ("s", [0.2700058], [1.0]),
        ("p", [0.2700058], [1.0]),
    ],
}

BASIS_SETS = {"sto-3g": STO3G, "6-31g": G631}


@dataclass(frozen=True)
class BasisFunction:
    """One contracted Cartesian Gaussian."""

    center: tuple[float, float, float]
    powers: tuple[int, int, int]
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]  # primitive-normalized, contraction-normalized


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, powers) -> float:
    l, m, n = powers
    num = (2 * alpha / np.pi) ** 0.75 * (4 * alpha) ** ((l + m + n) / 2.0)
    den = np.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return num / den


def _contracted_selfoverlap(alphas, coeffs, powers) -> float:
    l, m, n = powers
    total_l = l + m + n
    pref = (
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
        / (2.0 ** total_l)
    )
    s = 0.0
    for a, ca in zip(alphas, coeffs):
        for b, cb in zip(alphas, coeffs):
            s += ca * cb * pref * (np.pi / (a + b)) ** 1.5 / (a + b) ** total_l
    return s


def build_basis(atoms, basis_name: str) -> list[BasisFunction]:
    """atoms: list of (symbol, (x, y, z) in Angstrom). Centers stored in bohr."""
    basis_name = basis_name.lower()
    if basis_name not in BASIS_SETS:
        raise ValueError(f"unsupported basis {basis_name!r}")
    table = BASIS_SETS[basis_name]
    functions = []
    for symbol, coords in atoms:
        if symbol not in table:
            raise ValueError(f"element {symbol!r} not available in {basis_name}")
        center = tuple(float(c) * ANGSTROM_TO_BOHR for c in coords)
        for shell, exps, coeffs in table[symbol]:
            for powers in SHELL_FUNCTIONS[shell]:
                prim = [c * primitive_norm(a, powers) for a, c in zip(exps, coeffs)]
                norm = 1.0 / np.sqrt(_contracted_selfoverlap(exps, prim, powers))
                functions.append(
                    BasisFunction(
                        center=center,
                        powers=powers,
                        exponents=tuple(exps),
                        coefficients=tuple(norm * c for c in prim),
                    )
                )
    return functions


def nuclear_charges(atoms) -> list[tuple[int, tuple[float, float, float]]]:
    out = []
    for symbol, coords in atoms:
        out.append(
            (ATOMIC_NUMBERS[symbol], tuple(float(c) * ANGSTROM_TO_BOHR for c in coords))
        )
    return out
