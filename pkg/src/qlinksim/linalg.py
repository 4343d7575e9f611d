"""Dense Hermitian routines applied block-wise.

A Hermitian matrix is block diagonal over the connected components of its
sparsity graph, so eigendecompositions and exponentials can be taken one
component at a time.  The dense budget bounds the largest block handled.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import BudgetExceeded, QLinkError

HERMITIAN_TOL = 1e-10


def components(matrix: sp.spmatrix) -> list[np.ndarray]:
    """Index sets of the connected components, ordered by smallest member."""
    m = sp.csr_matrix(matrix)
    pattern = sp.csr_matrix((np.ones(m.nnz), m.indices, m.indptr), shape=m.shape)
    n, labels = connected_components(pattern, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n + 1))
    blocks = [order[bounds[k]:bounds[k + 1]] for k in range(n)]
    blocks.sort(key=lambda b: b[0])
    return blocks


def check_hermitian(matrix: sp.spmatrix, tol: float = HERMITIAN_TOL) -> None:
    diff = sp.csr_matrix(matrix - matrix.conj().T)
    if diff.nnz and np.abs(diff.data).max() > tol:
        raise QLinkError(f"operator is not Hermitian (deviation {np.abs(diff.data).max():.3e})")


def _dense_block(matrix: sp.csr_matrix, idx: np.ndarray) -> np.ndarray:
    block = matrix[idx][:, idx].toarray()
    if np.abs(block.imag).max(initial=0.0) == 0.0:
        return block.real
    return block


def eigh_blocks(matrix: sp.spmatrix, budget: int, subset: np.ndarray | None = None):
    """Yield ``(indices, eigenvalues, eigenvectors)`` per component.

    With ``subset`` given, only components touching those indices are
    diagonalized.
    """
    m = sp.csr_matrix(matrix)
    check_hermitian(m)
    blocks = components(m)
    if subset is not None:
        wanted = np.zeros(m.shape[0], dtype=bool)
        wanted[np.asarray(subset, dtype=np.int64)] = True
        blocks = [b for b in blocks if wanted[b].any()]
    for b in blocks:
        if len(b) > budget:
            raise BudgetExceeded(f"dense block of dimension {len(b)} exceeds budget {budget}")
    for b in blocks:
        evals, evecs = np.linalg.eigh(_dense_block(m, b))
        yield b, evals, evecs


def spectrum(matrix: sp.spmatrix, budget: int) -> np.ndarray:
    return np.sort(np.concatenate([ev for _, ev, _ in eigh_blocks(matrix, budget)]))


def expm_apply(matrix: sp.spmatrix, vector: np.ndarray, t: float, budget: int) -> np.ndarray:
    """exp(-i t H) v, diagonalizing only the components reached by v."""
    vector = np.asarray(vector, dtype=complex)
    support = np.nonzero(vector)[0]
    out = np.zeros_like(vector)
    for idx, evals, evecs in eigh_blocks(matrix, budget, subset=support):
        coeff = evecs.conj().T @ vector[idx]
        out[idx] = evecs @ (np.exp(-1j * t * evals) * coeff)
    return out


def expm_unitary(matrix: sp.spmatrix, t: float, budget: int) -> sp.csr_matrix:
    """Block-sparse exp(-i t H) assembled component by component."""
    m = sp.csr_matrix(matrix)
    n = m.shape[0]
    rows, cols, vals = [], [], []
    for idx, evals, evecs in eigh_blocks(m, budget):
        block = (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T
        r, c = np.meshgrid(idx, idx, indexing="ij")
        keep = np.abs(block) > 0
        rows.append(r[keep])
        cols.append(c[keep])
        vals.append(block[keep])
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n), dtype=complex
    )
