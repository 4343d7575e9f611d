"""Error injection on full-space states: gauge-violating link errors, gauge-allowed
dephasing, noisy Trotter trajectories with projector checks, and the
penalty-suppression experiment."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .basis import FullSpace, PhysicalBasis, U1
from .errors import ErrorAbsorbed, QLinkError, StateError
from .evolution import EvolutionReport, TrotterPlan, TrotterStepper
from .linalg import expm_apply
from .observables import default_physical_basis, gauge_violation, syndrome_sweep
from .operators import (
    DEFAULT_DENSE_BUDGET,
    HamiltonianParts,
    SparseOperator,
    link_lower_u1,
    link_raise_u1,
    penalty_term,
    restrict_to_physical,
)
from .states import StateVector, vacuum_state

EVENT_KINDS = ("raise", "lower", "dephase")
DETECTION_TOL = 1e-10


def _require_full_u1(state: StateVector) -> FullSpace:
    space = state.space
    if not isinstance(space, FullSpace):
        raise StateError("error operators act on full-space states")
    if not isinstance(space.model, U1):
        raise QLinkError("link error operators are implemented for the U(1) model")
    return space


def _apply_ladder(state: StateVector, link: int, op) -> tuple[StateVector, float]:
    space = _require_full_u1(state)
    out = op(space, link).matrix @ state.amplitudes
    prenorm = float(np.linalg.norm(out))
    if prenorm < 1e-14 * max(state.norm, 1.0):
        raise ErrorAbsorbed(f"error on link {link} annihilated the state (flux already at the truncation edge)")
    return state.with_amplitudes(out / prenorm), prenorm


def apply_link_raise_error(state: StateVector, link: int) -> StateVector:
    """Single-link raising error, renormalized."""
    return _apply_ladder(state, link, link_raise_u1)[0]


def apply_link_lower_error(state: StateVector, link: int) -> StateVector:
    return _apply_ladder(state, link, link_lower_u1)[0]


def apply_dephasing(state: StateVector, link: int, angle: float) -> StateVector:
    """exp(i angle E_link): diagonal in the flux basis, gauge invariant."""
    space = _require_full_u1(state)
    return state.with_amplitudes(state.amplitudes * np.exp(1j * angle * space.configs[:, link]))


@dataclass(frozen=True)
class NoiseEvent:
    """One error event applied after Trotter step ``step`` (step 0: before evolving).

    ``target`` None draws a link uniformly from the seeded generator; for
    dephasing a ``parameter`` None draws the angle uniformly in [-pi, pi).
    """

    step: int
    kind: str
    target: int | None = None
    parameter: float | None = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"noise event kind must be one of {EVENT_KINDS}, got {self.kind!r}")
        if int(self.step) != self.step or self.step < 0:
            raise ValueError(f"noise event step must be a non-negative integer, got {self.step}")


@dataclass(frozen=True)
class NoiseSpec:
    events: tuple = ()
    seed: int = 0

    def __post_init__(self):
        events = tuple(e if isinstance(e, NoiseEvent) else NoiseEvent(**e) for e in self.events)
        object.__setattr__(self, "events", events)
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def at(self, step: int) -> list[NoiseEvent]:
        return [e for e in self.events if e.step == step]

    def to_dict(self) -> dict:
        return {"events": [asdict(e) for e in self.events], "seed": int(self.seed)}

    @classmethod
    def from_dict(cls, doc: dict) -> "NoiseSpec":
        unknown = set(doc) - {"events", "seed"}
        if unknown:
            raise ValueError(f"unknown noise keys {sorted(unknown)}")
        return cls(tuple(NoiseEvent(**e) for e in doc.get("events", ())), int(doc.get("seed", 0)))


def _apply_event(state: StateVector, event: NoiseEvent, rng: np.random.Generator) -> tuple[StateVector, dict]:
    n_links = state.space.lattice.n_links
    link = int(rng.integers(n_links)) if event.target is None else int(event.target)
    entry = {"kind": event.kind, "link": link}
    if event.kind == "dephase":
        angle = float(rng.uniform(-np.pi, np.pi)) if event.parameter is None else float(event.parameter)
        entry["angle"] = angle
        return apply_dephasing(state, link, angle), entry
    op = link_raise_u1 if event.kind == "raise" else link_lower_u1
    try:
        new, prenorm = _apply_ladder(state, link, op)
    except ErrorAbsorbed:
        entry["absorbed"] = True
        return state, entry
    entry["prenorm"] = prenorm
    return new, entry


def run_noisy_trajectory(parts: HamiltonianParts, state: StateVector, plan: TrotterPlan, noise: NoiseSpec,
                         check_every: int | None = 1, basis: PhysicalBasis | None = None,
                         budget: int = DEFAULT_DENSE_BUDGET, observers=None) -> EvolutionReport:
    """Trotter evolution on the full space with scheduled error events and projector checks.

    Checks are non-destructive: they record leakage, a detection flag and
    per-site syndromes without collapsing the state.
    """
    space = _require_full_u1(state)
    if parts.space.tag != space.tag:
        raise QLinkError("noisy trajectories run on the full space; build the Hamiltonian there")
    if basis is None:
        basis = default_physical_basis(space)
    rng = np.random.default_rng(int(noise.seed))
    stepper = TrotterStepper(parts, plan, budget)
    observers = dict(observers or {})
    report = EvolutionReport(header={
        "plan": plan.to_dict(), "g2": parts.g2, "magnetic_sign": parts.magnetic_sign,
        "noise": noise.to_dict(), "check_every": check_every,
    })
    first_detection = None
    psi = state

    for k in range(0, plan.steps + 1):
        if k > 0:
            psi = psi.with_amplitudes(stepper.step(np.array(psi.amplitudes)))
        events = []
        for ev in noise.at(k):
            psi, entry = _apply_event(psi, ev, rng)
            events.append(entry)
        row = {"step": k, "time": k * plan.dt, "norm": psi.norm, "events": events}
        checked = bool(check_every) and k % check_every == 0
        if checked:
            leak = gauge_violation(psi, basis)
            detected = leak > DETECTION_TOL
            row.update(leakage=leak, detected=detected, syndromes=syndrome_sweep(psi, basis.charges).tolist())
            if detected and first_detection is None:
                first_detection = k
        for name, fn in observers.items():
            row[name] = fn(psi)
        report.records.append(row)

    report.header["first_detection_step"] = first_detection
    report.final_state = psi
    return report


def gauge_violating_perturbation(space: FullSpace, links: Sequence[int] = (0,)) -> SparseOperator:
    """Hermitian sum of U_l + U_l^dagger over the given links."""
    acc = None
    for link in links:
        term = link_raise_u1(space, link) + link_lower_u1(space, link)
        acc = term if acc is None else acc + term
    return acc


def penalty_suppression_experiment(parts: HamiltonianParts, lambdas: Sequence[float] = (0, 1, 10, 100),
                                   epsilon: float = 0.1, t: float = 5.0, links: Sequence[int] = (0,),
                                   basis: PhysicalBasis | None = None,
                                   budget: int = DEFAULT_DENSE_BUDGET) -> list[dict]:
    """Leakage after evolving the vacuum under H + lam*penalty + eps*V for time t.

    A final row with ``lambda = inf`` gives the projected-dynamics limit,
    evolving under the physical restriction of H + eps*V.
    """
    space = parts.space
    if not isinstance(space, FullSpace):
        raise QLinkError("the penalty experiment needs a Hamiltonian on the full space")
    if basis is None:
        basis = default_physical_basis(space)
    psi0 = vacuum_state(space)
    H = parts.total
    V = gauge_violating_perturbation(space, links)
    pen_unit = penalty_term(space, 1.0, basis.charges)
    rows = []
    for lam in lambdas:
        total = H + float(lam) * pen_unit + epsilon * V
        psi = psi0.with_amplitudes(expm_apply(total.matrix, psi0.amplitudes, t, budget))
        rows.append({"lambda": float(lam), "epsilon": float(epsilon), "t": float(t),
                     "leakage": gauge_violation(psi, basis)})
    restricted = restrict_to_physical(H + epsilon * V, basis, check=False)
    phys0 = vacuum_state(basis)
    amps = expm_apply(restricted.matrix, phys0.amplitudes, t, budget)
    limit = StateVector(space, basis.embed(amps))
    rows.append({"lambda": float("inf"), "epsilon": float(epsilon), "t": float(t),
                 "leakage": gauge_violation(limit, basis)})
    return rows


def table_to_csv(rows: list[dict]) -> str:
    keys = list(rows[0]) if rows else []
    lines = [",".join(keys)] + [",".join(repr(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys) for r in rows]
    return "\n".join(lines) + "\n"
