"""Truncated SU(2) link Hilbert space in the ``|j, m_L, m_R>`` basis.

All angular momenta are carried as twice their value (``two_j``, ``two_m``)
so that every label is an integer.

Conventions
-----------
* ``R^a`` is the spin-j generator acting on ``m_R`` (standard algebra,
  ``[R^1, R^2] = i R^3``).
* ``L^a`` is minus the spin-j generator acting on ``m_L``; it obeys
  ``[L^1, L^2] = -i L^3``.  With this sign the site generator
  ``G^a = sum_in R^a - sum_out L^a`` closes su(2).
* The fundamental link operator ``U[alpha][beta]`` (alpha, beta index
  ``(+1/2, -1/2)``) multiplies by the spin-1/2 Wigner matrix and couples
  ``j -> j +- 1/2`` with Clebsch-Gordan weights.  Its row index is rotated
  by ``i sigma_y`` so that ``[L^a, U] = s^a U`` and ``[R^a, U] = U s^a``
  with ``s = sigma / 2``; the plaquette trace is then gauge invariant.
  Transitions to ``j > j_max`` are dropped.
"""

from __future__ import annotations

from functools import lru_cache
from math import sqrt

import numpy as np
import scipy.sparse as sp

HALF_SPINS = (1, -1)  # two_alpha for alpha = +1/2, -1/2

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def spin_matrices(two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-j matrices (Sx, Sy, Sz) in the basis m = j, j-1, ..., -j."""
    j = two_j / 2
    ms = [j - k for k in range(two_j + 1)]
    dim = two_j + 1
    splus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        m = ms[k]
        splus[k - 1, k] = sqrt(j * (j + 1) - m * (m + 1))
    sminus = splus.conj().T
    sx = (splus + sminus) / 2
    sy = (splus - sminus) / 2j
    sz = np.diag(ms).astype(complex)
    return sx, sy, sz


def cg_half(two_j: int, two_m: int, two_alpha: int, two_J: int) -> float:
    """Clebsch-Gordan coefficient <j m; 1/2 alpha | J, m + alpha> (Condon-Shortley)."""
    two_M = two_m + two_alpha
    if abs(two_m) > two_j or abs(two_M) > two_J or two_J < 0:
        return 0.0
    denom = two_j + 1
    if two_J == two_j + 1:
        if two_alpha == 1:
            return sqrt((two_j + two_M + 1) / (2 * denom))
        return sqrt((two_j - two_M + 1) / (2 * denom))
    if two_J == two_j - 1:
        if two_alpha == 1:
            return -sqrt((two_j - two_M + 1) / (2 * denom))
        return sqrt((two_j + two_M + 1) / (2 * denom))
    return 0.0


@lru_cache(maxsize=None)
def link_states(two_j_max: int) -> tuple[tuple[int, int, int], ...]:
    """Ordered link labels ``(two_j, two_mL, two_mR)``: j ascending, m descending."""
    states = []
    for two_j in range(two_j_max + 1):
        ms = range(two_j, -two_j - 1, -2)
        states.extend((two_j, ml, mr) for ml in ms for mr in ms)
    return tuple(states)


def link_dim(two_j_max: int) -> int:
    return sum((tj + 1) ** 2 for tj in range(two_j_max + 1))


@lru_cache(maxsize=None)
def _state_index(two_j_max: int) -> dict:
    return {s: k for k, s in enumerate(link_states(two_j_max))}


def link_two_j(two_j_max: int) -> np.ndarray:
    return np.array([s[0] for s in link_states(two_j_max)], dtype=np.int64)


def _side_generators(two_j_max: int, side: int) -> list[sp.csr_matrix]:
    """Block-diagonal spin generators acting on m_L (side 0) or m_R (side 1)."""
    blocks = [[], [], []]
    for two_j in range(two_j_max + 1):
        spins = spin_matrices(two_j)
        eye = np.eye(two_j + 1)
        for a in range(3):
            blocks[a].append(np.kron(spins[a], eye) if side == 0 else np.kron(eye, spins[a]))
    return [sp.csr_matrix(sp.block_diag(b, format="csr")) for b in blocks]


@lru_cache(maxsize=None)
def left_generators(two_j_max: int) -> tuple[sp.csr_matrix, ...]:
    return tuple(-g for g in _side_generators(two_j_max, 0))


@lru_cache(maxsize=None)
def right_generators(two_j_max: int) -> tuple[sp.csr_matrix, ...]:
    return tuple(_side_generators(two_j_max, 1))


@lru_cache(maxsize=None)
def casimir(two_j_max: int) -> sp.csr_matrix:
    tj = link_two_j(two_j_max)
    return sp.diags(tj / 2 * (tj / 2 + 1)).tocsr().astype(complex)


@lru_cache(maxsize=None)
def _cg_link_operators(two_j_max: int) -> tuple[tuple[sp.csr_matrix, ...], ...]:
    """Un-rotated components: multiplication by the spin-1/2 Wigner matrix entries."""
    index = _state_index(two_j_max)
    dim = link_dim(two_j_max)
    ops = []
    for two_a in HALF_SPINS:
        row_ops = []
        for two_b in HALF_SPINS:
            rows, cols, vals = [], [], []
            for col, (tj, tml, tmr) in enumerate(link_states(two_j_max)):
                for tJ in (tj - 1, tj + 1):
                    if tJ < 0 or tJ > two_j_max:
                        continue
                    c = cg_half(tj, tml, two_a, tJ) * cg_half(tj, tmr, two_b, tJ)
                    if c == 0.0:
                        continue
                    target = (tJ, tml + two_a, tmr + two_b)
                    rows.append(index[target])
                    cols.append(col)
                    vals.append(sqrt((tj + 1) / (tJ + 1)) * c)
            row_ops.append(sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex))
        ops.append(tuple(row_ops))
    return tuple(ops)


@lru_cache(maxsize=None)
def link_operator(two_j_max: int) -> tuple[tuple[sp.csr_matrix, ...], ...]:
    """The 2x2 matrix of link operators ``U[alpha][beta]``."""
    raw = _cg_link_operators(two_j_max)
    # row rotation by i*sigma_y: U[+] = raw[-], U[-] = -raw[+]
    return (
        (raw[1][0], raw[1][1]),
        (-raw[0][0], -raw[0][1]),
    )


def link_operator_dagger(two_j_max: int) -> tuple[tuple[sp.csr_matrix, ...], ...]:
    """Matrix adjoint: ``(U^dagger)[alpha][beta] = U[beta][alpha]^dagger``."""
    u = link_operator(two_j_max)
    return tuple(tuple(sp.csr_matrix(u[b][a].conj().T) for b in range(2)) for a in range(2))
