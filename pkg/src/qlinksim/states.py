"""State vectors and packaged-state preparation.

Lattice states are complex amplitude vectors on a FullSpace or a
PhysicalBasis.  SU(3) color registers are separate, site-local objects.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np

from .basis import FullSpace, PhysicalBasis, U1, gauss_residuals, normalize_charges
from .errors import BasisMismatch, StateError
from .lattice import Path

NORM_TOL = 1e-12


class SuperselectionWarning(UserWarning):
    """A superposition mixes winding sectors."""


@dataclass(frozen=True, eq=False)
class StateVector:
    space: object
    amplitudes: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise BasisMismatch(f"amplitude vector of shape {amps.shape} on a space of dimension {self.space.dim}")
        if not np.all(np.isfinite(amps)):
            raise StateError("state has non-finite amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tag(self):
        return self.space.tag

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0:
            raise StateError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n, self.flags)

    def inner(self, other: "StateVector") -> complex:
        if other.tag != self.tag:
            raise BasisMismatch("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2 / (self.norm**2 * other.norm**2)

    def expectation(self, op) -> complex:
        if op.tag != self.tag:
            raise BasisMismatch("operator and state live on different bases")
        psi = self.amplitudes
        return complex(np.vdot(psi, op.matrix @ psi)) / self.norm**2

    def embedded(self) -> "StateVector":
        """The same state on the full tensor-product space."""
        if isinstance(self.space, FullSpace):
            return self
        return StateVector(self.space.full, self.space.embed(self.amplitudes), self.flags)

    def with_amplitudes(self, amps) -> "StateVector":
        return StateVector(self.space, amps, self.flags)

    def to_dict(self) -> dict:
        s = self.space
        return {
            "format": "qlinksim.state/1",
            "basis": {
                "kind": s.kind,
                "model": s.model.to_dict(),
                "lattice": s.lattice.to_dict(),
                "charges": [str(q) for q in getattr(s, "charges", ())],
                "sector": list(s.sector) if getattr(s, "sector", None) is not None else None,
                "dim": s.dim,
            },
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
            "flags": sorted(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def state_from_dict(doc: dict, space) -> StateVector:
    """Load amplitudes saved by ``StateVector.to_dict`` onto a compatible space."""
    b = doc["basis"]
    if b["kind"] != space.kind or int(b["dim"]) != space.dim:
        raise BasisMismatch(f"stored state is on a {b['kind']} basis of dim {b['dim']}, target is {space!r}")
    if b["lattice"]["Lx"] != space.lattice.Lx or b["lattice"]["Ly"] != space.lattice.Ly:
        raise BasisMismatch("stored state belongs to a different lattice")
    amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
    return StateVector(space, amps, frozenset(doc.get("flags", ())))


def basis_state(space, index: int) -> StateVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(space, amps)


def config_state(space, config) -> StateVector:
    """Unit vector on one U(1) flux configuration."""
    idx = int(space.index_of(np.asarray(config))[0])
    if idx < 0:
        raise StateError("configuration is not a member of this basis")
    return basis_state(space, idx)


# -- lattice states -------------------------------------------------------------------


def vacuum_state(space) -> StateVector:
    idx = space.vacuum_index()
    if idx < 0:
        raise StateError("the zero-flux configuration is not in this basis (nonzero static charges?)")
    return basis_state(space, idx)


def path_flux(lattice, path: Path | Sequence[tuple[int, int]], e: int) -> np.ndarray:
    """Flux configuration carrying ``e`` units along the path's orientations."""
    config = np.zeros(lattice.n_links, dtype=np.int64)
    for link, sign in path:
        config[link] += sign * e
    return config


def flux_loop_state(space, path: Path, e: int = 1) -> StateVector:
    if not isinstance(space.model, U1):
        raise StateError("flux-loop states are defined for the U(1) model")
    if not path.closed:
        raise StateError("flux loops need a closed path")
    config = path_flux(space.lattice, path, e)
    if np.abs(config).max() > space.model.S:
        raise StateError(f"flux {e} on this loop exceeds the truncation S={space.model.S}")
    return config_state(space, config)


def string_state(space, path: Path, e: int = 1, charges=None) -> StateVector:
    """Open flux string of ``e`` units between static charges +e (start) and -e (end)."""
    if not isinstance(space.model, U1):
        raise StateError("string states are defined for the U(1) model")
    if path.closed:
        raise StateError("string states need an open path")
    if charges is None:
        charges = getattr(space, "charges", None)
    charges = normalize_charges(space.lattice, space.model, charges)
    if charges[path.start] != e or charges[path.end] != -e:
        raise StateError(
            f"string endpoints need charges +{e} at site {path.start} and -{e} at site {path.end}, "
            f"got {charges[path.start]} and {charges[path.end]}"
        )
    config = path_flux(space.lattice, path, e)
    if np.abs(config).max() > space.model.S:
        raise StateError(f"flux {e} exceeds the truncation S={space.model.S}")
    res = gauss_residuals(config, space.lattice, charges)
    if np.any(res):
        raise StateError("path does not produce a Gauss-law-consistent string (self-intersecting?)")
    return config_state(space, config)


def winding_of_state(state: StateVector) -> set:
    """Set of winding sectors present in a U(1) state."""
    from .basis import cut_matrix

    space = state.space
    support = np.nonzero(np.abs(state.amplitudes) > 0)[0]
    w = space.configs[support] @ cut_matrix(space.lattice).T
    return {tuple(int(v) for v in row) for row in w}


def superpose(states: Sequence[StateVector], amps: Sequence[complex]) -> StateVector:
    """Normalized linear combination; cross-winding mixtures are flagged."""
    if len(states) != len(amps) or not states:
        raise StateError("need matching, non-empty lists of states and amplitudes")
    tag = states[0].tag
    if any(s.tag != tag for s in states):
        raise BasisMismatch("cannot superpose states on different bases")
    total = sum(complex(a) * s.amplitudes for s, a in zip(states, amps))
    if np.linalg.norm(total) < NORM_TOL:
        raise StateError("superposition vanishes")
    out = StateVector(states[0].space, total / np.linalg.norm(total))
    if isinstance(out.space.model, U1) and len(winding_of_state(out)) > 1:
        warnings.warn("superposition mixes winding sectors", SuperselectionWarning, stacklevel=2)
        out = StateVector(out.space, out.amplitudes, frozenset({"cross_winding"}))
    return out


def apply_gauge_transform_u1(state: StateVector, site: int, alpha: float, charges=None) -> StateVector:
    """Multiply every flux configuration by exp(i alpha * residual at ``site``)."""
    space = state.space
    if not isinstance(space.model, U1):
        raise StateError("U(1) gauge transform on a non-U(1) state")
    res = gauss_residuals(space.configs, space.lattice,
                          normalize_charges(space.lattice, space.model, charges))[:, site]
    return state.with_amplitudes(state.amplitudes * np.exp(1j * alpha * res))


def physical_projector_apply(state: StateVector, basis: PhysicalBasis) -> StateVector:
    """Orthogonal projection of a full-space state onto span(basis)."""
    if state.tag != basis.full.tag:
        raise BasisMismatch("projector expects a state on the full space of the basis")
    return state.with_amplitudes(basis.project(state.amplitudes))


# -- SU(3) color registers ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ColorRegisterState:
    """Amplitude tensor over one color index (0..2) per slot.

    ``kinds`` labels each slot ``"q"`` (fundamental) or ``"qbar"`` (conjugate).
    """

    kinds: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.kinds) < 1:
            raise StateError("a color register needs at least one slot")
        if any(k not in ("q", "qbar") for k in self.kinds):
            raise StateError(f"slot kinds must be 'q' or 'qbar', got {self.kinds}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (3,) * len(self.kinds):
            raise StateError(f"amplitude tensor of shape {amps.shape} for {len(self.kinds)} slots")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "ColorRegisterState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "ColorRegisterState") -> float:
        return abs(self.overlap(other)) ** 2 / (self.norm**2 * other.norm**2)


def meson_state_su3() -> ColorRegisterState:
    return ColorRegisterState(("q", "qbar"), np.eye(3) / np.sqrt(3))


def levi_civita(n: int = 3) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


def baryon_state_su3() -> ColorRegisterState:
    return ColorRegisterState(("q", "q", "q"), levi_civita(3) / np.sqrt(6))


def apply_color_transform(state: ColorRegisterState, g: np.ndarray, slots: Sequence[int] | None = None,
                          tol: float = 1e-12) -> ColorRegisterState:
    """Act with g on quark slots and with conj(g) on antiquark slots.

    ``slots`` restricts the action to the listed slots (default: all).
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (3, 3):
        raise StateError("color transforms are 3x3 matrices")
    if np.abs(g.conj().T @ g - np.eye(3)).max() > tol:
        raise StateError("color transform is not unitary")
    amps = state.amplitudes
    targets = range(len(state.kinds)) if slots is None else slots
    for k in targets:
        mat = g if state.kinds[k] == "q" else g.conj()
        amps = np.moveaxis(np.tensordot(mat, amps, axes=([1], [k])), 0, k)
    return ColorRegisterState(state.kinds, amps)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormalized complex Gaussian matrix (QR with phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_su3(rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(3, rng)
    return u / np.linalg.det(u) ** (1 / 3)
