import csv
import io
import json

import numpy as np
import pytest

from oracles import dense_u1_hamiltonian, exact_propagate, lie_trotter
from qlinksim.evolution import (
    TrotterPlan,
    exact_evolve,
    trotter_error,
    trotter_evolve,
    trotter_state,
    unitarity_defect,
)
from qlinksim.observables import electric_energy, winding_expectation
from qlinksim.operators import hamiltonian
from qlinksim.states import StateVector, flux_loop_state, superpose, vacuum_state


@pytest.fixture(scope="module")
def parts(u1_basis):
    return hamiltonian(u1_basis, 1.0)


def test_plan_validation():
    with pytest.raises(ValueError):
        TrotterPlan(dt=0.0, steps=1)
    with pytest.raises(ValueError):
        TrotterPlan(dt=0.1, steps=-1)
    with pytest.raises(ValueError):
        TrotterPlan(dt=0.1, steps=1, ordering="sideways")
    with pytest.raises(ValueError):
        TrotterPlan.for_time(1.0, 0.3)
    plan = TrotterPlan.for_time(1.0, 0.05, ordering="MagneticFirst")
    assert plan.steps == 20 and plan.ordering == "magnetic_first"
    assert plan.total_time == pytest.approx(1.0)


def test_zero_time_is_identity(parts, u1_basis, rng):
    psi = StateVector(u1_basis, rng.standard_normal(u1_basis.dim) + 0j).normalized()
    assert np.allclose(exact_evolve(parts.total, psi, 0.0).amplitudes, psi.amplitudes)
    final, report = trotter_evolve(parts, psi, TrotterPlan(0.1, 0))
    assert np.array_equal(final.amplitudes, psi.amplitudes)
    assert len(report.records) == 1


def test_pure_electric_gives_exact_phases(u1_basis, rng):
    parts = hamiltonian(u1_basis, 1.7, magnetic=False)
    psi = StateVector(u1_basis, rng.standard_normal(u1_basis.dim) + 0j).normalized()
    out = trotter_state(parts, psi, TrotterPlan(0.1, 10))
    energies = 0.85 * (u1_basis.configs**2).sum(axis=1)
    assert np.allclose(out.amplitudes, np.exp(-1j * energies) * psi.amplitudes, atol=1e-13)


def test_exact_matches_expm_oracle(parts, u1_basis):
    H = dense_u1_hamiltonian([tuple(c) for c in u1_basis.configs], 2, 2, 1, 1.0)
    psi = vacuum_state(u1_basis)
    got = exact_evolve(parts.total, psi, 0.8)
    assert np.abs(got.amplitudes - exact_propagate(H, psi.amplitudes, 0.8)).max() < 1e-12


def test_trotter_matches_dense_lie_product(parts, u1_basis):
    HE = parts.H_E.to_dense()
    HB = parts.H_B.to_dense()
    psi = vacuum_state(u1_basis)
    ref = lie_trotter(HE, HB, psi.amplitudes, 0.1, 10)
    got = trotter_state(parts, psi, TrotterPlan(0.1, 10, ordering="electric_first"))
    assert np.abs(got.amplitudes - ref).max() < 1e-12
    other = trotter_state(parts, psi, TrotterPlan(0.1, 10, ordering="magnetic_first"))
    assert np.abs(other.amplitudes - ref).max() > 1e-6


def test_first_order_error_halves(parts, u1_basis):
    psi = vacuum_state(u1_basis)
    errs = [trotter_error(parts, psi, TrotterPlan.for_time(1.0, dt)) for dt in (0.2, 0.1, 0.05)]
    assert errs[0] > errs[1] > errs[2]
    assert 1.7 <= errs[1] / errs[2] <= 2.3


def test_second_order_error_quarters(parts, u1_basis):
    psi = vacuum_state(u1_basis)
    e1 = trotter_error(parts, psi, TrotterPlan.for_time(1.0, 0.1, order=2))
    e2 = trotter_error(parts, psi, TrotterPlan.for_time(1.0, 0.05, order=2))
    assert 3.4 <= e1 / e2 <= 4.6
    assert e1 < trotter_error(parts, psi, TrotterPlan.for_time(1.0, 0.1))


def test_per_plaquette_split_converges(parts, u1_basis):
    psi = vacuum_state(u1_basis)
    plans = [TrotterPlan.for_time(1.0, dt, magnetic_split="per_plaquette") for dt in (0.1, 0.05)]
    e1, e2 = (trotter_error(parts, psi, p) for p in plans)
    assert 1.7 <= e1 / e2 <= 2.3


def test_step_is_unitary(parts):
    for plan in (TrotterPlan(0.1, 1), TrotterPlan(0.1, 1, order=2), TrotterPlan(0.1, 1, magnetic_split="per_plaquette")):
        assert unitarity_defect(parts, plan) < 1e-12


def test_trajectory_conserves_norm_winding_and_energy(parts, u1_basis, lat22):
    vac = vacuum_state(u1_basis)
    plaq = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(1)))
    psi = superpose([vac, plaq], [1, 1])
    H = parts.total
    observers = {
        "winding": winding_expectation,
        "energy": lambda s: s.expectation(H).real,
        "electric": electric_energy,
    }
    _, report = trotter_evolve(parts, psi, TrotterPlan(0.05, 40, order=2), observers=observers)
    norms = np.array(report.column("norm"))
    assert np.abs(norms - 1).max() < 1e-12
    assert all(w == pytest.approx((0.0, 0.0), abs=1e-12) for w in report.column("winding"))
    energy = np.array(report.column("energy"))
    # second order keeps the energy close but not exact
    assert np.abs(energy - energy[0]).max() < 5e-3
    assert max(report.column("gauge_violation")) < 1e-12


def test_full_space_evolution_stays_physical(u1_full, u1_basis):
    parts = hamiltonian(u1_full, 1.0)
    psi = vacuum_state(u1_full)
    final, report = trotter_evolve(parts, psi, TrotterPlan(0.1, 5))
    restricted = trotter_state(hamiltonian(u1_basis, 1.0), vacuum_state(u1_basis), TrotterPlan(0.1, 5))
    assert np.allclose(final.amplitudes, u1_basis.embed(restricted.amplitudes), atol=1e-12)
    assert max(report.column("gauge_violation")) < 1e-12


def test_record_cadence(parts, u1_basis):
    _, report = trotter_evolve(parts, vacuum_state(u1_basis), TrotterPlan(0.1, 7), every=3)
    assert report.column("step") == [0, 3, 6, 7]


def test_report_serialization(parts, u1_basis):
    _, report = trotter_evolve(parts, vacuum_state(u1_basis), TrotterPlan(0.1, 3),
                               observers={"w": winding_expectation})
    lines = report.to_jsonl().splitlines()
    assert json.loads(lines[0])["header"]["plan"]["dt"] == 0.1
    assert [json.loads(line)["step"] for line in lines[1:]] == [0, 1, 2, 3]
    text = report.to_csv()
    assert text.startswith("# {")
    rows = list(csv.DictReader(io.StringIO(text.split("\n", 1)[1])))
    assert [int(r["step"]) for r in rows] == [0, 1, 2, 3]
    assert json.loads(rows[0]["w"]) == [0.0, 0.0]
