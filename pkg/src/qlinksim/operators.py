"""Sparse operators on full or physical bases: fields, links, plaquettes,
Gauss generators, Hamiltonians and penalty terms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import su2link
from .basis import (
    FullSpace,
    PhysicalBasis,
    SU2,
    U1,
    cut_matrix,
    gauss_residuals,
    kron_embed,
    normalize_charges,
    su2_site_generators,
)
from .errors import BasisMismatch, BudgetExceeded, GaugeCheckError, QLinkError
from .lattice import Path

DEFAULT_DENSE_BUDGET = 4096


class SparseOperator:
    """Complex sparse matrix tied to the space it acts on.

    Storage is canonical CSR: duplicates merged, explicit zeros dropped,
    column indices sorted.
    """

    __array_priority__ = 100

    def __init__(self, space, matrix):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape != (space.dim, space.dim):
            raise BasisMismatch(f"matrix shape {m.shape} does not match space dimension {space.dim}")
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        self.space = space
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def tag(self):
        return self.space.tag

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def __repr__(self):
        return f"SparseOperator({self.space!r}, nnz={self.nnz})"

    def _other(self, other) -> sp.csr_matrix:
        if isinstance(other, SparseOperator):
            if other.tag != self.tag:
                raise BasisMismatch(f"cannot combine operators on {self.tag} and {other.tag}")
            return other.matrix
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other):
        return SparseOperator(self.space, self.matrix + self._other(other))

    def __sub__(self, other):
        return SparseOperator(self.space, self.matrix - self._other(other))

    def __neg__(self):
        return SparseOperator(self.space, -self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, SparseOperator):
            raise TypeError("use @ for operator products")
        return SparseOperator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / scalar)

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator(self.space, self.matrix @ self._other(other))
        return self.matrix @ np.asarray(other, dtype=complex)

    def dag(self) -> "SparseOperator":
        return SparseOperator(self.space, self.matrix.conj().T)

    def hermiticity_error(self) -> float:
        return max_abs(self.matrix - self.matrix.conj().T)

    def is_diagonal(self) -> bool:
        coo = self.matrix.tocoo()
        return bool(np.all(coo.row == coo.col))

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def to_dense(self, budget: int = DEFAULT_DENSE_BUDGET) -> np.ndarray:
        if self.dim > budget:
            raise BudgetExceeded(f"dense operator of dimension {self.dim} exceeds budget {budget}")
        return self.matrix.toarray()

    def coo_lines(self) -> list[str]:
        """Sorted ``row col re im`` lines for cross-implementation diffs."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [f"{coo.row[k]} {coo.col[k]} {coo.data[k].real:.17g} {coo.data[k].imag:.17g}" for k in order]

    def to_coo_text(self) -> str:
        header = f"# dim {self.dim} nnz {self.nnz}"
        return "\n".join([header, *self.coo_lines()]) + "\n"


def max_abs(m) -> float:
    if sp.issparse(m):
        m = sp.csr_matrix(m)
        return float(np.abs(m.data).max()) if m.nnz else 0.0
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


def commutator_norm(a: SparseOperator, b: SparseOperator) -> float:
    """Largest absolute entry of AB - BA."""
    if a.dim != b.dim:
        raise BasisMismatch(f"dimension mismatch {a.dim} vs {b.dim}")
    if a.tag != b.tag:
        raise BasisMismatch(f"cannot commute operators on {a.tag} and {b.tag}")
    return max_abs(a.matrix @ b.matrix - b.matrix @ a.matrix)


def identity(space) -> SparseOperator:
    return SparseOperator(space, sp.identity(space.dim, dtype=complex, format="csr"))


def diagonal_operator(space, values) -> SparseOperator:
    return SparseOperator(space, sp.diags(np.asarray(values, dtype=complex)).tocsr())


@dataclass(frozen=True)
class HamiltonianParts:
    H_E: SparseOperator
    H_B: SparseOperator
    g2: float
    magnetic_sign: int
    B_terms: tuple = ()

    @property
    def total(self) -> SparseOperator:
        return self.H_E + self.H_B

    @property
    def space(self):
        return self.H_E.space


# -- U(1) config actions -----------------------------------------------------------


def _u1_configs(space) -> np.ndarray:
    if not isinstance(space.model, U1):
        raise QLinkError("operation defined for the U(1) model only")
    return space.configs


def _ladder_product(space, factors: Sequence[tuple[int, int]]) -> SparseOperator:
    """Ordered product of single-link ladder operators, (link, +1) = U, (link, -1) = U^dagger.

    Unit matrix elements; steps past -S or +S annihilate the state.
    """
    configs = _u1_configs(space).copy()
    S = space.model.S
    valid = np.ones(configs.shape[0], dtype=bool)
    for link, delta in reversed(list(factors)):
        configs[:, link] += delta
        valid &= np.abs(configs[:, link]) <= S
    cols = np.nonzero(valid)[0]
    rows = space.index_of(configs[cols]) if len(cols) else np.zeros(0, dtype=np.int64)
    hit = rows >= 0
    m = sp.csr_matrix((np.ones(hit.sum()), (rows[hit], cols[hit])), shape=(space.dim, space.dim), dtype=complex)
    return SparseOperator(space, m)


def electric_op_u1(space, link: int) -> SparseOperator:
    return diagonal_operator(space, _u1_configs(space)[:, link])


def link_raise_u1(space, link: int) -> SparseOperator:
    return _ladder_product(space, [(link, +1)])


def link_lower_u1(space, link: int) -> SparseOperator:
    return _ladder_product(space, [(link, -1)])


def gauss_generator_u1(space, site: int, charges=None) -> SparseOperator:
    """Diagonal divergence-minus-charge operator at ``site``."""
    charges = normalize_charges(space.lattice, space.model, charges if charges is not None else _default_charges(space))
    res = gauss_residuals(_u1_configs(space), space.lattice, charges)[:, site]
    return diagonal_operator(space, res)


def winding_op_u1(space, direction: int) -> SparseOperator:
    w = _u1_configs(space) @ cut_matrix(space.lattice).T
    return diagonal_operator(space, w[:, int(direction)])


def _default_charges(space):
    return getattr(space, "charges", None)


# -- SU(2) --------------------------------------------------------------------------


def _su2_full(space) -> FullSpace:
    if not isinstance(space.model, SU2):
        raise QLinkError("operation defined for the SU(2) model only")
    return space.full


def _su2_trace_product(full: FullSpace, factors: Sequence[tuple[int, int]]) -> sp.csr_matrix:
    """Tr over fundamental indices of the ordered product of U (+1) / U^dagger (-1) link matrices."""
    tjm = full.model.two_j_max
    u = su2link.link_operator(tjm)
    ud = su2link.link_operator_dagger(tjm)
    dims = [full.d] * full.n_links
    n = len(factors)
    total = sp.csr_matrix((full.dim, full.dim), dtype=complex)
    for idx in itertools.product(range(2), repeat=n):
        term = None
        for k, (link, sign) in enumerate(factors):
            mat = (u if sign > 0 else ud)[idx[k]][idx[(k + 1) % n]]
            if mat.nnz == 0:
                term = None
                break
            emb = kron_embed(dims, {link: mat})
            term = emb if term is None else term @ emb
            if term.nnz == 0:
                break
        if term is not None and term.nnz:
            total = total + term
    return total


def gauss_generators_su2(space, site: int) -> list[SparseOperator]:
    """The three G^a at ``site`` (on the full space, or compressed to a physical basis)."""
    full = _su2_full(space)
    gens = [SparseOperator(full, g) for g in su2_site_generators(full.lattice, full.model.two_j_max, site)]
    if isinstance(space, PhysicalBasis):
        return [restrict_to_physical(g, space, check=False) for g in gens]
    return gens


def casimir_op_su2(space, link: int) -> SparseOperator:
    full = _su2_full(space)
    op = SparseOperator(full, kron_embed([full.d] * full.n_links, {link: su2link.casimir(full.model.two_j_max)}))
    if isinstance(space, PhysicalBasis):
        return restrict_to_physical(op, space, check=False)
    return op


def _su2_diag_casimir_sum(space) -> SparseOperator:
    """Sum of link Casimirs, built from the label table without kron products."""
    full = _su2_full(space)
    tj = su2link.link_two_j(full.model.two_j_max)
    labels = full.label_indices()
    values = np.zeros(full.dim)
    for link in range(full.n_links):
        j = tj[labels[:, link]] / 2
        values += j * (j + 1)
    op = diagonal_operator(full, values)
    if isinstance(space, PhysicalBasis):
        return restrict_to_physical(op, space, check=False)
    return op


def link_matrix_element_su2(space, link: int, alpha: int, beta: int, dagger: bool = False) -> SparseOperator:
    full = _su2_full(space)
    tjm = full.model.two_j_max
    mats = su2link.link_operator_dagger(tjm) if dagger else su2link.link_operator(tjm)
    return SparseOperator(full, kron_embed([full.d] * full.n_links, {link: mats[alpha][beta]}))


# -- model-generic builders -------------------------------------------------------


def path_operator(space, path: Path | Sequence[tuple[int, int]]) -> SparseOperator:
    """Ordered link product along a path; SU(2) takes the fundamental trace."""
    factors = list(path)
    if isinstance(space.model, U1):
        return _ladder_product(space, factors)
    full = _su2_full(space)
    op = SparseOperator(full, _su2_trace_product(full, factors))
    if isinstance(space, PhysicalBasis):
        return restrict_to_physical(op, space, check=False)
    return op


def plaquette_op(space, p: int) -> SparseOperator:
    return path_operator(space, space.lattice.plaquette_links(p))


def electric_energy_op(space) -> SparseOperator:
    """Sum of E_l^2 (U(1)) or of link Casimirs (SU(2))."""
    if isinstance(space.model, U1):
        return diagonal_operator(space, (_u1_configs(space) ** 2).sum(axis=1))
    return _su2_diag_casimir_sum(space)


def hamiltonian_u1(space, g2: float, magnetic_sign: int | None = None) -> HamiltonianParts:
    if not isinstance(space.model, U1):
        raise QLinkError("hamiltonian_u1 requires a U(1) space")
    return _hamiltonian(space, g2, magnetic_sign)


def hamiltonian_su2(space, g2: float, magnetic_sign: int | None = None) -> HamiltonianParts:
    if not isinstance(space.model, SU2):
        raise QLinkError("hamiltonian_su2 requires an SU(2) space")
    return _hamiltonian(space, g2, magnetic_sign)


def hamiltonian(space, g2: float, magnetic_sign: int | None = None, magnetic: bool = True) -> HamiltonianParts:
    """Electric and magnetic parts; ``magnetic=False`` zeroes H_B."""
    parts = _hamiltonian(space, g2, magnetic_sign)
    if not magnetic:
        return HamiltonianParts(parts.H_E, 0 * parts.H_B, parts.g2, parts.magnetic_sign,
                                tuple(0 * t for t in parts.B_terms))
    return parts


def _hamiltonian(space, g2: float, magnetic_sign: int | None) -> HamiltonianParts:
    if not g2 > 0:
        raise ValueError(f"coupling g^2 must be positive, got {g2}")
    if magnetic_sign is None:
        magnetic_sign = space.model.default_magnetic_sign
    if magnetic_sign not in (1, -1):
        raise ValueError(f"magnetic_sign must be +1 or -1, got {magnetic_sign}")
    h_e = (g2 / 2) * electric_energy_op(space)
    lattice = space.lattice
    target = space if isinstance(space.model, U1) else space.full
    coeff = magnetic_sign / (2 * g2)
    terms = []
    for p in range(lattice.n_plaquettes):
        if isinstance(space.model, U1):
            u = plaquette_op(space, p).matrix
        else:
            u = _su2_trace_product(target, lattice.plaquette_links(p))
        term = SparseOperator(target, coeff * (u + u.conj().T))
        if target is not space:
            term = restrict_to_physical(term, space, check=False)
        terms.append(term)
    h_b = SparseOperator(space, sum((t.matrix for t in terms), sp.csr_matrix((space.dim, space.dim), dtype=complex)))
    return HamiltonianParts(h_e, h_b, float(g2), int(magnetic_sign), tuple(terms))


def penalty_term(space, lam: float, charges=None) -> SparseOperator:
    """lam * sum_x (G_x - rho_x)^2 for U(1), lam * sum_{x,a} (G^a_x)^2 for SU(2)."""
    if lam < 0:
        raise ValueError(f"penalty strength must be non-negative, got {lam}")
    if isinstance(space.model, U1):
        charges = normalize_charges(space.lattice, space.model, charges if charges is not None else _default_charges(space))
        res = gauss_residuals(_u1_configs(space), space.lattice, charges)
        return diagonal_operator(space, lam * (res**2).sum(axis=1))
    full = _su2_full(space)
    acc = sp.csr_matrix((full.dim, full.dim), dtype=complex)
    for site in range(full.lattice.n_sites):
        for g in su2_site_generators(full.lattice, full.model.two_j_max, site):
            acc = acc + g @ g
    op = SparseOperator(full, lam * acc)
    if isinstance(space, PhysicalBasis):
        return restrict_to_physical(op, space, check=False)
    return op


def gauss_generators(space, charges=None) -> list[SparseOperator]:
    """Every Gauss generator of the lattice (U(1): one per site; SU(2): three per site)."""
    if isinstance(space.model, U1):
        return [gauss_generator_u1(space, x, charges) for x in range(space.lattice.n_sites)]
    out = []
    for x in range(space.lattice.n_sites):
        out.extend(gauss_generators_su2(space, x))
    return out


def gauge_commutator_norm(op: SparseOperator) -> float:
    """max over Gauss generators of commutator_norm(G, op)."""
    space = op.space
    if isinstance(space.model, U1):
        res = gauss_residuals(_u1_configs(space), space.lattice)
        coo = op.matrix.tocoo()
        if coo.nnz == 0:
            return 0.0
        diff = np.abs(res[coo.row] - res[coo.col]).max(axis=1)
        return float((diff * np.abs(coo.data)).max())
    return max(commutator_norm(g, op) for g in gauss_generators(space))


def restrict_to_physical(op: SparseOperator, basis: PhysicalBasis, check: bool = True,
                         tol: float = 1e-10) -> SparseOperator:
    """P^dagger op P with P the isometry from ``basis`` into the full space.

    With ``check`` on, ``op`` must commute with every Gauss generator.
    """
    if op.tag != basis.full.tag:
        raise BasisMismatch("restrict_to_physical expects an operator on the full space of the basis")
    if check:
        err = gauge_commutator_norm(op)
        if err > tol:
            raise GaugeCheckError(f"operator is not block diagonal in Gauss-law sectors: [G, op] = {err:.3e}")
    iso = basis.isometry
    return SparseOperator(basis, iso.conj().T @ op.matrix @ iso)
