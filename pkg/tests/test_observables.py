import numpy as np
import pytest

from oracles import dense_u1_hamiltonian, partial_trace_entropy
from qlinksim.errors import QLinkError, StateError
from qlinksim.lattice import build_lattice
from qlinksim.basis import U1, build_physical_basis
from qlinksim.observables import (
    electric_energy,
    entanglement_entropy,
    fix_phase,
    gauge_violation,
    ground_state,
    lowest_eigenvalues,
    plaquette_expectation,
    reduced_density_matrix,
    syndrome_sweep,
    wilson_loop,
    winding_expectation,
)
from qlinksim.operators import hamiltonian, penalty_term
from qlinksim.states import (
    StateVector,
    basis_state,
    config_state,
    flux_loop_state,
    superpose,
    vacuum_state,
)


def single_link(full, link, e=1):
    config = np.zeros(full.n_links, dtype=np.int64)
    config[link] = e
    return config_state(full, config)


def test_electric_energy_examples(u1_basis, lat22):
    assert electric_energy(vacuum_state(u1_basis)) == 0
    plaq = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(0)))
    assert electric_energy(plaq) == pytest.approx(4)
    wrap = flux_loop_state(u1_basis, lat22.wrapping_loop("y", 1))
    assert electric_energy(wrap) == pytest.approx(2)


def test_plaquette_on_vacuum_loop_superposition(u1_basis, lat22):
    plaq = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(0)))
    psi = superpose([vacuum_state(u1_basis), plaq], [1, 1])
    u = plaquette_expectation(psi, 0)
    # <U + U^dag> = 2 Re <U> = 1 for (|0> + |loop>)/sqrt2
    assert 2 * u.real == pytest.approx(1.0)
    assert plaquette_expectation(vacuum_state(u1_basis), 0) == 0


def test_unit_wilson_loop_is_plaquette(u1_basis, lat22, rng):
    psi = StateVector(u1_basis, rng.standard_normal(u1_basis.dim) + 1j * rng.standard_normal(u1_basis.dim))
    for p in range(4):
        loop = lat22.rectangular_loop(p, 1, 1)
        assert wilson_loop(psi, loop) == pytest.approx(plaquette_expectation(psi, p), abs=1e-14)
    with pytest.raises(StateError):
        wilson_loop(psi, lat22.straight_path(0, "x", 1))


def test_larger_loops_decay_faster():
    lat = build_lattice(3, 2)
    basis = build_physical_basis(lat, U1(1))
    _, gs = ground_state(hamiltonian(basis, 2.0).total)
    w11 = wilson_loop(gs, lat.rectangular_loop(0, 1, 1)).real
    w21 = wilson_loop(gs, lat.rectangular_loop(0, 2, 1)).real
    assert abs(w21) < abs(w11)


def test_winding_examples(u1_basis, lat22):
    assert winding_expectation(vacuum_state(u1_basis)) == (0, 0)
    wx = flux_loop_state(u1_basis, lat22.wrapping_loop("x", 0))
    wy = flux_loop_state(u1_basis, lat22.wrapping_loop("y", 0), -1)
    assert winding_expectation(wx) == (1, 0)
    assert winding_expectation(wy) == (0, -1)


def test_winding_requires_u1(su2_basis):
    with pytest.raises(QLinkError):
        winding_expectation(vacuum_state(su2_basis))


def test_gauge_violation_values(u1_full, u1_basis):
    vac = vacuum_state(u1_full)
    bad = single_link(u1_full, 5)  # off both winding cuts
    assert gauge_violation(vac) == 0
    assert gauge_violation(bad) == 1
    mixed = superpose([vac, bad], [1, 1])
    assert gauge_violation(mixed, u1_basis) == pytest.approx(0.5)
    assert gauge_violation(vacuum_state(u1_basis)) == 0


def test_syndromes_mark_endpoints(u1_full, lat22):
    for link in range(lat22.n_links):
        s = syndrome_sweep(single_link(u1_full, link))
        a, b = lat22.link_endpoints(link)
        assert set(np.flatnonzero(s)) == {a, b}
        assert np.allclose(s[[a, b]], 1)


def test_syndrome_zero_iff_physical(u1_full, u1_basis, rng):
    physical = {tuple(c) for c in u1_basis.configs.tolist()}
    for k in rng.choice(u1_full.dim, 300, replace=False):
        s = syndrome_sweep(config_state(u1_full, u1_full.configs[k]))
        assert (s.sum() == 0) == (tuple(u1_full.configs[k].tolist()) in physical)


def test_su2_syndromes(su2_basis, su2_full):
    assert np.abs(syndrome_sweep(vacuum_state(su2_full))).max() == 0
    psi = StateVector(su2_full, su2_basis.embed(np.ones(su2_basis.dim)))
    assert np.abs(syndrome_sweep(psi)).max() < 1e-18
    assert syndrome_sweep(basis_state(su2_full, 1)).sum() > 0


def test_ground_state_matches_dense_oracle(u1_basis):
    for g2 in (0.5, 1.0, 3.0):
        H = dense_u1_hamiltonian([tuple(c) for c in u1_basis.configs], 2, 2, 1, g2)
        evals = np.linalg.eigvalsh(H)
        gs = ground_state(hamiltonian(u1_basis, g2).total)
        assert gs.energy == pytest.approx(evals[0], abs=1e-10)
        assert gs.multiplicity == 1
        assert np.allclose(lowest_eigenvalues(hamiltonian(u1_basis, g2).total, 10), evals[:10], atol=1e-10)


def test_pure_electric_ground_state_is_vacuum(u1_basis):
    gs = ground_state(hamiltonian(u1_basis, 1.0, magnetic=False).total)
    assert gs.energy == 0
    assert gs.state.fidelity(vacuum_state(u1_basis)) == 1


def test_degenerate_level_multiplicity(u1_full, u1_basis):
    gs = ground_state(penalty_term(u1_full, 1.0))
    assert gs.energy == 0
    assert gs.multiplicity == u1_basis.dim


def test_vacuum_overlap_grows_with_coupling(u1_basis):
    vac = vacuum_state(u1_basis)
    overlaps = [ground_state(hamiltonian(u1_basis, g2).total).state.fidelity(vac) for g2 in (0.5, 1, 2, 5)]
    assert overlaps == sorted(overlaps)


def test_fix_phase():
    v = np.array([0.1j, -0.9, 0.3])
    w = fix_phase(v)
    assert w[1] == pytest.approx(0.9)
    assert np.allclose(np.abs(w), np.abs(v))


def test_entropy_matches_partial_trace_oracle(u1_basis, rng):
    psi = StateVector(u1_basis, rng.standard_normal(u1_basis.dim) + 1j * rng.standard_normal(u1_basis.dim))
    full = u1_basis.embed(psi.amplitudes)
    full /= np.linalg.norm(full)
    for keep in ([0], [0, 1], [2, 5, 7], [1, 3, 4, 6]):
        got = entanglement_entropy(psi, keep)
        assert got == pytest.approx(partial_trace_entropy(full, [3] * 8, keep), abs=1e-10)
        rest = [l for l in range(8) if l not in keep]
        assert got == pytest.approx(entanglement_entropy(psi, rest), abs=1e-10)


def test_entropy_of_products_and_loop_pairs(u1_basis, lat22):
    assert entanglement_entropy(vacuum_state(u1_basis), [0, 1, 2]) == 0
    region = [link for link, _ in lat22.plaquette_links(0)]
    a = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(0)))
    b = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(3)))
    assert not set(region) & {link for link, _ in lat22.plaquette_links(3)}
    assert entanglement_entropy(a, region) == 0
    pair = superpose([a, b], [1, 1])
    assert entanglement_entropy(pair, region) == pytest.approx(1.0, abs=1e-12)
    assert entanglement_entropy(pair, region, base=np.e) == pytest.approx(np.log(2), abs=1e-12)


def test_reduced_density_matrix_is_a_state(u1_basis, rng):
    psi = StateVector(u1_basis, rng.standard_normal(u1_basis.dim) + 0j)
    rho = reduced_density_matrix(psi, [3, 1])
    assert rho.shape == (9, 9)
    assert np.trace(rho).real == pytest.approx(1)
    assert np.allclose(rho, rho.conj().T)
    assert np.linalg.eigvalsh(rho).min() > -1e-12
    with pytest.raises(ValueError):
        reduced_density_matrix(psi, [1, 1])
