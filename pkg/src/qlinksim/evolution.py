"""Real-time evolution: exact propagation and Trotterized electric/magnetic splitting."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import BasisMismatch, QLinkError
from .linalg import check_hermitian, expm_apply, expm_unitary
from .operators import DEFAULT_DENSE_BUDGET, HamiltonianParts, SparseOperator
from .states import StateVector

ORDERINGS = ("electric_first", "magnetic_first")
MAGNETIC_SPLITS = ("dense", "per_plaquette")


@dataclass(frozen=True)
class TrotterPlan:
    """Step size, step count and splitting options.

    ``ordering`` names the leftmost factor of one written step:
    ``electric_first`` is exp(-i H_E dt) exp(-i H_B dt), so the magnetic
    factor hits the state first.  ``order=2`` uses the symmetric split
    exp(-i A dt/2) exp(-i B dt) exp(-i A dt/2) with A the leftmost part.
    ``magnetic_split="per_plaquette"`` replaces exp(-i H_B dt) by the product
    of single-plaquette exponentials.
    """

    dt: float
    steps: int
    ordering: str = "electric_first"
    order: int = 1
    magnetic_split: str = "dense"

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"steps must be a non-negative integer, got {self.steps}")
        aliases = {"ElectricFirst": "electric_first", "MagneticFirst": "magnetic_first"}
        object.__setattr__(self, "ordering", aliases.get(self.ordering, self.ordering))
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.magnetic_split not in MAGNETIC_SPLITS:
            raise ValueError(f"magnetic_split must be one of {MAGNETIC_SPLITS}, got {self.magnetic_split!r}")

    @property
    def total_time(self) -> float:
        return self.dt * self.steps

    @classmethod
    def for_time(cls, t: float, dt: float, **kw) -> "TrotterPlan":
        steps = int(round(t / dt))
        if not np.isclose(steps * dt, t, rtol=1e-9, atol=1e-12):
            raise ValueError(f"time {t} is not a whole number of steps of {dt}")
        return cls(dt=dt, steps=steps, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EvolutionReport:
    """Per-step records plus a header describing the run."""

    records: list = field(default_factory=list)
    header: dict = field(default_factory=dict)
    final_state: StateVector | None = None

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    def to_jsonl(self) -> str:
        lines = [json.dumps({"header": self.header}, default=_jsonable)]
        lines += [json.dumps(r, default=_jsonable) for r in self.records]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header, default=_jsonable) + "\n")
        if self.records:
            keys = list(self.records[0])
            for r in self.records[1:]:
                keys += [k for k in r if k not in keys]
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for r in self.records:
                w.writerow({k: _csv_cell(r.get(k)) for k in keys})
        return buf.getvalue()


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real!r}{v.imag:+.17g}j"
    if isinstance(v, (list, tuple, np.ndarray, dict)):
        return json.dumps(v, default=_jsonable)
    return v


def exact_evolve(H: SparseOperator, state: StateVector, t: float,
                 budget: int = DEFAULT_DENSE_BUDGET) -> StateVector:
    """exp(-i H t) applied to ``state``, blockwise dense."""
    if H.tag != state.tag:
        raise BasisMismatch("Hamiltonian and state live on different bases")
    return state.with_amplitudes(expm_apply(H.matrix, state.amplitudes, t, budget))


class _Propagator:
    """exp(-i H dt) for one Hamiltonian piece; diagonal pieces become phase vectors."""

    def __init__(self, op: SparseOperator, dt: float, budget: int):
        check_hermitian(op.matrix)
        if op.is_diagonal():
            self.phases = np.exp(-1j * dt * op.diagonal().real)
            self.matrix = None
        else:
            self.phases = None
            self.matrix = expm_unitary(op.matrix, dt, budget)

    def __call__(self, amps: np.ndarray) -> np.ndarray:
        if self.phases is not None:
            return self.phases * amps
        return self.matrix @ amps


class TrotterStepper:
    """Applies single Trotter steps for a fixed plan."""

    def __init__(self, parts: HamiltonianParts, plan: TrotterPlan, budget: int = DEFAULT_DENSE_BUDGET):
        self.parts = parts
        self.plan = plan
        dt = plan.dt
        electric_left = plan.ordering == "electric_first"
        outer_dt = dt / 2 if plan.order == 2 else dt

        def magnetic(step):
            if plan.magnetic_split == "per_plaquette":
                if not parts.B_terms:
                    raise QLinkError("per-plaquette splitting needs the individual plaquette terms")
                return [_Propagator(term, step, budget) for term in parts.B_terms]
            return [_Propagator(parts.H_B, step, budget)]

        def electric(step):
            return [_Propagator(parts.H_E, step, budget)]

        left = electric(outer_dt) if electric_left else magnetic(outer_dt)
        right = magnetic(dt) if electric_left else electric(dt)
        # factors listed in the order they act on the state (rightmost first)
        if plan.order == 1:
            self._factors = list(reversed(right)) + list(reversed(left))
        else:
            self._factors = list(reversed(left)) + list(reversed(right)) + list(reversed(left))

    def step(self, amps: np.ndarray) -> np.ndarray:
        for f in self._factors:
            amps = f(amps)
        return amps


Observer = Callable[[StateVector], object]


def trotter_evolve(parts: HamiltonianParts, state: StateVector, plan: TrotterPlan,
                   observers: Mapping[str, Observer] | None = None,
                   budget: int = DEFAULT_DENSE_BUDGET, every: int = 1,
                   projector_basis=None) -> tuple[StateVector, EvolutionReport]:
    """Run the Trotter circuit, recording norm, gauge violation and observers.

    Records are taken at step 0, every ``every`` steps, and at the final step.
    ``projector_basis`` selects the physical subspace used for the gauge
    violation of full-space states (default: the charge-free physical basis).
    """
    from .observables import gauge_violation

    if parts.space.tag != state.tag:
        raise BasisMismatch("Hamiltonian and state live on different bases")
    observers = dict(observers or {})
    stepper = TrotterStepper(parts, plan, budget)
    report = EvolutionReport(header={"plan": plan.to_dict(), "g2": parts.g2, "magnetic_sign": parts.magnetic_sign})
    amps = np.array(state.amplitudes)

    def record(k):
        psi = state.with_amplitudes(amps)
        row = {
            "step": k,
            "time": k * plan.dt,
            "norm": float(np.linalg.norm(amps)),
            "gauge_violation": gauge_violation(psi, projector_basis),
        }
        for name, fn in observers.items():
            row[name] = fn(psi)
        report.records.append(row)

    record(0)
    for k in range(1, plan.steps + 1):
        amps = stepper.step(amps)
        if k % every == 0 or k == plan.steps:
            record(k)
    final = state.with_amplitudes(amps)
    report.final_state = final
    return final, report


def trotter_state(parts: HamiltonianParts, state: StateVector, plan: TrotterPlan,
                  budget: int = DEFAULT_DENSE_BUDGET) -> StateVector:
    stepper = TrotterStepper(parts, plan, budget)
    amps = np.array(state.amplitudes)
    for _ in range(plan.steps):
        amps = stepper.step(amps)
    return state.with_amplitudes(amps)


def trotter_error(parts: HamiltonianParts, state: StateVector, plan: TrotterPlan,
                  budget: int = DEFAULT_DENSE_BUDGET) -> float:
    """Euclidean distance between the Trotterized and exact states at the plan's final time."""
    approx = trotter_state(parts, state, plan, budget)
    exact = exact_evolve(parts.total, state, plan.total_time, budget)
    return float(np.linalg.norm(approx.amplitudes - exact.amplitudes))


def unitarity_defect(parts: HamiltonianParts, plan: TrotterPlan, budget: int = DEFAULT_DENSE_BUDGET) -> float:
    """max |U^dagger U - 1| for one Trotter step (small spaces only)."""
    n = parts.space.dim
    if n > budget:
        raise QLinkError(f"space dimension {n} exceeds budget {budget}")
    stepper = TrotterStepper(parts, plan, budget)
    u = np.column_stack([stepper.step(col) for col in np.eye(n, dtype=complex)])
    return float(np.abs(u.conj().T @ u - np.eye(n)).max())
