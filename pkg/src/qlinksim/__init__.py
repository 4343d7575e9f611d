"""Exact-diagonalization simulator for truncated (quantum link) lattice gauge theories."""

__version__ = "0.1.0"

from .basis import (
    SU2,
    U1,
    FullSpace,
    PhysicalBasis,
    build_physical_basis,
    build_physical_basis_su2,
    build_physical_basis_u1,
    split_by_winding,
)
from .errors import (
    AmbiguousKernel,
    BasisMismatch,
    BudgetExceeded,
    ErrorAbsorbed,
    GaugeCheckError,
    QLinkError,
    StateError,
)
from .evolution import EvolutionReport, TrotterPlan, exact_evolve, trotter_error, trotter_evolve
from .lattice import Direction, Lattice, Path, build_lattice
from .noise import (
    NoiseEvent,
    NoiseSpec,
    apply_dephasing,
    apply_link_lower_error,
    apply_link_raise_error,
    penalty_suppression_experiment,
    run_noisy_trajectory,
)
from .observables import (
    electric_energy,
    entanglement_entropy,
    gauge_violation,
    ground_state,
    lowest_eigenvalues,
    plaquette_expectation,
    syndrome_sweep,
    wilson_loop,
    winding_expectation,
)
from .operators import (
    HamiltonianParts,
    SparseOperator,
    commutator_norm,
    hamiltonian,
    hamiltonian_su2,
    hamiltonian_u1,
    penalty_term,
    plaquette_op,
    restrict_to_physical,
)
from .states import (
    StateVector,
    apply_color_transform,
    baryon_state_su3,
    flux_loop_state,
    meson_state_su3,
    string_state,
    superpose,
    vacuum_state,
)

__all__ = [
    "AmbiguousKernel",
    "BasisMismatch",
    "BudgetExceeded",
    "Direction",
    "ErrorAbsorbed",
    "EvolutionReport",
    "FullSpace",
    "GaugeCheckError",
    "HamiltonianParts",
    "Lattice",
    "NoiseEvent",
    "NoiseSpec",
    "Path",
    "PhysicalBasis",
    "QLinkError",
    "SU2",
    "SparseOperator",
    "StateError",
    "StateVector",
    "TrotterPlan",
    "U1",
    "__version__",
    "apply_color_transform",
    "apply_dephasing",
    "apply_link_lower_error",
    "apply_link_raise_error",
    "baryon_state_su3",
    "build_lattice",
    "build_physical_basis",
    "build_physical_basis_su2",
    "build_physical_basis_u1",
    "commutator_norm",
    "electric_energy",
    "entanglement_entropy",
    "exact_evolve",
    "flux_loop_state",
    "gauge_violation",
    "ground_state",
    "hamiltonian",
    "hamiltonian_su2",
    "hamiltonian_u1",
    "lowest_eigenvalues",
    "meson_state_su3",
    "penalty_suppression_experiment",
    "penalty_term",
    "plaquette_expectation",
    "plaquette_op",
    "restrict_to_physical",
    "run_noisy_trajectory",
    "split_by_winding",
    "string_state",
    "superpose",
    "syndrome_sweep",
    "trotter_error",
    "trotter_evolve",
    "vacuum_state",
    "wilson_loop",
    "winding_expectation",
]
