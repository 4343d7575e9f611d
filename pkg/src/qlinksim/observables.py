"""Gauge-invariant measurements, gauge-violation diagnostics, spectra and entropies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import FullSpace, PhysicalBasis, U1, build_physical_basis, cut_matrix, gauss_residuals
from .errors import BasisMismatch, BudgetExceeded, QLinkError, StateError
from .lattice import Path
from .linalg import eigh_blocks
from .operators import (
    DEFAULT_DENSE_BUDGET,
    SparseOperator,
    electric_energy_op,
    gauss_generators_su2,
    path_operator,
    plaquette_op,
)
from .states import StateVector

DROP_TOL = 1e-14
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class ObservableRecord:
    name: str
    value: object
    time: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        v = self.value
        if isinstance(v, complex):
            v = {"re": v.real, "im": v.imag}
        return {"name": self.name, "value": v, "time": self.time, **({"metadata": self.metadata} if self.metadata else {})}


def _real(z: complex, tol: float = 1e-10) -> float:
    if abs(z.imag) > tol * max(1.0, abs(z.real)):
        raise QLinkError(f"Hermitian expectation has imaginary part {z.imag:.3e}")
    return float(z.real)


def electric_energy(state: StateVector) -> float:
    """Sum of <E^2> (U(1)) or of link Casimirs (SU(2))."""
    return _real(state.expectation(electric_energy_op(state.space)))


def plaquette_expectation(state: StateVector, p: int) -> complex:
    return state.expectation(plaquette_op(state.space, p))


def wilson_loop(state: StateVector, path: Path) -> complex:
    """<prod U^{+-}> around a closed path; take ``.real`` for the conventional loop value."""
    if not path.closed:
        raise StateError("Wilson loops need a closed path")
    return state.expectation(path_operator(state.space, path))


def winding_expectation(state: StateVector) -> tuple[float, float]:
    space = state.space
    if not isinstance(space.model, U1):
        raise QLinkError("winding numbers are defined for the U(1) model")
    probs = np.abs(state.amplitudes) ** 2 / state.norm**2
    w = space.configs @ cut_matrix(space.lattice).T
    wx, wy = probs @ w
    return float(wx), float(wy)


_basis_cache: dict = {}


def default_physical_basis(full: FullSpace, charges=None) -> PhysicalBasis:
    """Physical basis of ``full`` (cached per space and charges)."""
    key = (full.tag, None if charges is None else tuple(charges))
    if key not in _basis_cache:
        _basis_cache[key] = build_physical_basis(full.lattice, full.model, charges, full=full)
    return _basis_cache[key]


def gauge_violation(state: StateVector, basis: PhysicalBasis | None = None) -> float:
    """Norm fraction outside the physical subspace, 1 - |P psi|^2 / |psi|^2."""
    space = state.space
    n2 = state.norm**2
    if n2 == 0:
        raise StateError("gauge violation of the zero vector")
    if isinstance(space, PhysicalBasis):
        full_amps = space.embed(state.amplitudes)
        if basis is None:
            basis = space
    else:
        full_amps = state.amplitudes
        if basis is None:
            basis = default_physical_basis(space)
    if basis.full.tag != (space.full.tag if isinstance(space, PhysicalBasis) else space.tag):
        raise BasisMismatch("state and projector belong to different full spaces")
    inside = np.linalg.norm(basis.compress(full_amps)) ** 2
    return float(min(1.0, max(0.0, 1.0 - inside / n2)))


def syndrome_sweep(state: StateVector, charges=None) -> np.ndarray:
    """Per-site <(G_x - rho_x)^2> (U(1)) or sum_a <(G_x^a)^2> (SU(2))."""
    space = state.space
    psi = state.amplitudes / state.norm
    if isinstance(space.model, U1):
        if charges is None:
            charges = getattr(space, "charges", None)
        res = gauss_residuals(space.configs, space.lattice, charges)
        return (np.abs(psi)[:, None] ** 2 * res**2).sum(axis=0).astype(float)
    out = np.zeros(space.lattice.n_sites)
    for x in range(space.lattice.n_sites):
        out[x] = sum(np.linalg.norm(g.matrix @ psi) ** 2 for g in gauss_generators_su2(space, x))
    return out


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: StateVector
    multiplicity: int

    def __iter__(self):
        return iter((self.energy, self.state))


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude amplitude (first on ties) is real positive."""
    k = int(np.argmax(np.abs(vec).round(12)))
    return vec * (abs(vec[k]) / vec[k])


def ground_state(H: SparseOperator, budget: int = DEFAULT_DENSE_BUDGET, tol: float = DEGENERACY_TOL) -> GroundState:
    """Lowest eigenpair with a deterministic phase; degenerate levels report their multiplicity.

    For a degenerate level the returned vector is the first eigenvector of the
    block containing the lowest basis index.
    """
    best = None
    energies = []
    for idx, evals, evecs in eigh_blocks(H.matrix, budget):
        energies.append(evals)
        if best is None or evals[0] < best[0] - tol:
            best = (evals[0], idx, evecs[:, 0])
    e0 = best[0]
    mult = int(sum(np.count_nonzero(ev < e0 + tol) for ev in energies))
    vec = np.zeros(H.dim, dtype=complex)
    vec[best[1]] = best[2]
    return GroundState(float(e0), StateVector(H.space, fix_phase(vec)), mult)


def lowest_eigenvalues(H: SparseOperator, k: int | None = None, budget: int = DEFAULT_DENSE_BUDGET) -> np.ndarray:
    evals = np.sort(np.concatenate([ev for _, ev, _ in eigh_blocks(H.matrix, budget)]))
    return evals if k is None else evals[:k]


def _full_amplitudes(state: StateVector) -> tuple[FullSpace, np.ndarray]:
    space = state.space
    if isinstance(space, PhysicalBasis):
        return space.full, space.embed(state.amplitudes)
    return space, np.asarray(state.amplitudes)


def reduced_density_matrix(state: StateVector, links: Sequence[int], budget: int = DEFAULT_DENSE_BUDGET) -> np.ndarray:
    """Reduced density matrix over the tensor factors of ``links`` (in the given link order)."""
    full, amps = _full_amplitudes(state)
    links = [int(l) for l in links]
    if len(set(links)) != len(links) or any(not 0 <= l < full.n_links for l in links):
        raise ValueError(f"invalid link subset {links}")
    d = full.d
    dim_a = d ** len(links)
    if dim_a > budget:
        raise BudgetExceeded(f"subsystem dimension {dim_a} exceeds budget {budget}")
    rest = [l for l in range(full.n_links) if l not in links]
    psi = (amps / np.linalg.norm(amps)).reshape((d,) * full.n_links).transpose(links + rest).reshape(dim_a, -1)
    return psi @ psi.conj().T


def entanglement_entropy(state: StateVector, links: Sequence[int], base: float = 2.0,
                         budget: int = DEFAULT_DENSE_BUDGET) -> float:
    """von Neumann entropy of the links' reduced state, via Schmidt values of the full-basis vector."""
    full, amps = _full_amplitudes(state)
    links = [int(l) for l in links]
    if len(set(links)) != len(links) or any(not 0 <= l < full.n_links for l in links):
        raise ValueError(f"invalid link subset {links}")
    d = full.d
    rest = [l for l in range(full.n_links) if l not in links]
    dim_a, dim_b = d ** len(links), d ** len(rest)
    if min(dim_a, dim_b) > budget:
        raise BudgetExceeded(f"subsystem dimension {min(dim_a, dim_b)} exceeds budget {budget}")
    psi = (amps / np.linalg.norm(amps)).reshape((d,) * full.n_links).transpose(links + rest).reshape(dim_a, dim_b)
    # drop empty rows/columns before the SVD; they carry no Schmidt weight
    psi = psi[np.any(psi != 0, axis=1)][:, np.any(psi != 0, axis=0)]
    if psi.size == 0:
        return 0.0
    p = np.linalg.svd(psi, compute_uv=False) ** 2
    p = p[p > DROP_TOL]
    return float(max(0.0, -(p * np.log(p)).sum() / np.log(base)))
