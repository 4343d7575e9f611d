"""Acceptance criteria, each run at its stated tolerance.

Every test records a one-line PASS/FAIL summary; the lines are printed as
they happen (visible with ``-s``) and collected in an "acceptance criteria"
section at the end of the pytest run.
"""

from collections import Counter

import numpy as np

from conftest import record_acceptance
from oracles import (
    brute_force_physical,
    dense_u1_hamiltonian,
    exact_propagate,
    lie_trotter,
    make_geometry,
    partial_trace_entropy,
    winding,
)
from qlinksim.basis import U1, FullSpace, build_physical_basis, split_by_winding, su2_site_generators
from qlinksim.errors import ErrorAbsorbed
from qlinksim.evolution import TrotterPlan, trotter_evolve
from qlinksim.noise import apply_dephasing, apply_link_raise_error, penalty_suppression_experiment
from qlinksim.observables import (
    entanglement_entropy,
    gauge_violation,
    ground_state,
    lowest_eigenvalues,
    syndrome_sweep,
    winding_expectation,
)
from qlinksim.operators import (
    commutator_norm,
    gauss_generator_u1,
    gauss_generators_su2,
    hamiltonian,
    penalty_term,
)
from qlinksim.states import (
    StateVector,
    apply_color_transform,
    apply_gauge_transform_u1,
    baryon_state_su3,
    basis_state,
    config_state,
    flux_loop_state,
    meson_state_su3,
    physical_projector_apply,
    random_su3,
    random_unitary,
    superpose,
    vacuum_state,
)


def _as_set(configs):
    return {tuple(int(v) for v in c) for c in configs}


def test_criterion_01_gauss_law_commutation(lat22):
    worst = 0.0
    for S in (1, 2):
        full = FullSpace(lat22, U1(S))
        G = [gauss_generator_u1(full, x) for x in range(lat22.n_sites)]
        for g2 in (0.5, 1.0, 10.0):
            H = hamiltonian(full, g2).total
            worst = max(worst, max(commutator_norm(g, H) for g in G))
    passed = worst <= 1e-12
    record_acceptance(1, "Gauss-law commutation", passed, f"max |[G_x, H]| = {worst:.2e} (tol 1e-12)")
    assert passed


def test_criterion_02_physical_basis_oracle(lat22, u1_basis):
    problems = []
    if _as_set(u1_basis.configs) != _as_set(brute_force_physical(2, 2, 1)):
        problems.append("rho=0 set differs")
    charges = [1, -1, 0, 0]
    charged = build_physical_basis(lat22, U1(1), charges)
    if _as_set(charged.configs) != _as_set(brute_force_physical(2, 2, 1, charges)):
        problems.append("charge-pair set differs")
    oracle = Counter(winding(c, 2, 2) for c in brute_force_physical(2, 2, 1))
    sectors = {k: v.dim for k, v in split_by_winding(u1_basis).items()}
    if sectors != dict(oracle):
        problems.append("winding sector sizes differ")
    if sectors.get((1, 0)) != sectors.get((-1, 0)):
        problems.append("(1,0)/(-1,0) sizes differ")
    passed = not problems
    detail = f"dim {u1_basis.dim}, charged dim {charged.dim}, {len(sectors)} sectors" if passed else "; ".join(problems)
    record_acceptance(2, "physical-basis oracle equivalence", passed, detail)
    assert passed


def test_criterion_03_su2_kernel_certificate(lat22, su2_full, su2_basis):
    kernel = 0.0
    for x in range(lat22.n_sites):
        for g in su2_site_generators(lat22, 1, x):
            cols = (g @ su2_basis.isometry).tocsc()
            norms = np.sqrt(np.asarray(abs(cols).power(2).sum(axis=0))).ravel()
            kernel = max(kernel, norms.max(initial=0.0))
    G = [gauss_generators_su2(su2_full, x) for x in range(lat22.n_sites)]
    closure = 0.0
    for x in range(lat22.n_sites):
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            diff = (G[x][a] @ G[x][b] - G[x][b] @ G[x][a] - 1j * G[x][c]).matrix
            closure = max(closure, np.abs(diff.data).max(initial=0.0))
    cross = max(commutator_norm(G[x][a], G[y][b])
                for x in range(lat22.n_sites) for y in range(lat22.n_sites) if x != y
                for a in range(3) for b in range(3))
    passed = kernel <= 1e-9 and closure <= 1e-12 and cross <= 1e-12
    record_acceptance(3, "SU(2) kernel certificate", passed,
                      f"dim {su2_basis.dim}, max |G v| = {kernel:.2e}, closure {closure:.2e}, cross-site {cross:.2e}")
    assert passed


def test_criterion_04_trotter_scaling(u1_basis):
    parts = hamiltonian(u1_basis, 1.0)
    HE, HB = parts.H_E.to_dense(), parts.H_B.to_dense()
    oracle_H = dense_u1_hamiltonian([tuple(c) for c in u1_basis.configs], 2, 2, 1, 1.0)
    vac = vacuum_state(u1_basis)
    exact = exact_propagate(oracle_H, vac.amplitudes, 1.0)

    errors, oracle_errors, drift, wdrift = {}, {}, 0.0, 0.0
    for dt in (0.1, 0.05):
        plan = TrotterPlan.for_time(1.0, dt)
        final, report = trotter_evolve(parts, vac, plan, observers={"w": winding_expectation})
        errors[dt] = np.linalg.norm(final.amplitudes - exact)
        oracle_errors[dt] = np.linalg.norm(lie_trotter(HE, HB, vac.amplitudes, dt, plan.steps) - exact)
        drift = max(drift, max(abs(n - 1) for n in report.column("norm")))
        w = np.array(report.column("w"))
        wdrift = max(wdrift, np.abs(w - w[0]).max())
    ratio = errors[0.1] / errors[0.05]
    agree = all(abs(errors[dt] - oracle_errors[dt]) < 1e-10 for dt in errors)
    passed = 1.7 <= ratio <= 2.3 and drift <= 1e-9 and wdrift <= 1e-10 and agree
    record_acceptance(4, "first-order Trotter scaling", passed,
                      f"ratio {ratio:.4f} in [1.7, 2.3], norm drift {drift:.1e}, winding drift {wdrift:.1e}")
    assert passed


def test_criterion_05_strong_coupling_ground_state(u1_basis):
    vac = vacuum_state(u1_basis)
    overlaps = {}
    for g2 in (100.0, 0.5):
        gs = ground_state(hamiltonian(u1_basis, g2).total)
        overlaps[g2] = gs.state.fidelity(vac)
        # the eigensolver's ground energy agrees with the dense oracle
        oracle = np.linalg.eigvalsh(dense_u1_hamiltonian([tuple(c) for c in u1_basis.configs], 2, 2, 1, g2))
        assert abs(gs.energy - oracle[0]) < 1e-10
    passed = overlaps[100.0] > 0.999 and overlaps[0.5] < 0.9
    record_acceptance(5, "strong-coupling ground state", passed,
                      f"|<0|gs>|^2 = {overlaps[100.0]:.8f} at g2=100, {overlaps[0.5]:.4f} at g2=0.5")
    assert passed


def test_criterion_06_penalty_faithfulness(u1_full, u1_basis):
    D = u1_basis.dim
    restricted = np.linalg.eigvalsh(dense_u1_hamiltonian([tuple(c) for c in u1_basis.configs], 2, 2, 1, 1.0))
    penalized = lowest_eigenvalues(hamiltonian(u1_full, 1.0).total + penalty_term(u1_full, 100.0), D)
    rel = np.abs(penalized - restricted) / np.maximum(np.abs(restricted), 1e-12)
    dev = np.abs(penalized - restricted)
    passed = bool(np.all(dev <= 0.005 * np.abs(restricted) + 1e-12))
    record_acceptance(6, "penalty-term faithfulness", passed,
                      f"D={D}, max |dE| = {dev.max():.2e}, max relative {rel.max():.2e} (tol 0.5%)")
    assert passed


def test_criterion_07_leakage_detection(lat22, u1_full, u1_basis, rng):
    _, div, _ = make_geometry(2, 2)
    applied = absorbed = bad = 0
    for cfg in u1_basis.configs:
        psi = config_state(u1_full, cfg)
        for link in range(lat22.n_links):
            try:
                err = apply_link_raise_error(psi, link)
            except ErrorAbsorbed:
                absorbed += 1  # flux already at +S: the raise annihilates the state
                continue
            applied += 1
            new_cfg = u1_full.configs[np.argmax(np.abs(err.amplitudes))]
            oracle_sites = {nx + 2 * ny for ny in range(2) for nx in range(2) if div(new_cfg, nx, ny) != 0}
            syn = syndrome_sweep(err)
            if gauge_violation(err) != 1 or set(np.flatnonzero(syn)) != oracle_sites \
                    or oracle_sites != set(lat22.link_endpoints(link)):
                bad += 1
    deph_leak = 0.0
    states = [config_state(u1_full, c) for c in u1_basis.configs]
    states += [StateVector(u1_full, u1_basis.embed(rng.standard_normal(u1_basis.dim)
                                                  + 1j * rng.standard_normal(u1_basis.dim))) for _ in range(20)]
    for psi in states:
        for link in range(lat22.n_links):
            deph_leak = max(deph_leak, gauge_violation(apply_dephasing(psi, link, rng.uniform(-np.pi, np.pi))))
    # exact zero in exact arithmetic; allow only floating-point rounding
    passed = bad == 0 and applied > 0 and deph_leak <= 1e-14
    record_acceptance(7, "leakage detection", passed,
                      f"{applied} raise errors all detected at both endpoints ({absorbed} absorbed at the cutoff), "
                      f"dephasing leakage max {deph_leak:.1e} over {len(states)} states")
    assert passed


def test_criterion_08_penalty_monotonicity(u1_full):
    rows = penalty_suppression_experiment(hamiltonian(u1_full, 1.0), lambdas=(0, 1, 10, 100), epsilon=0.1, t=5.0)
    leak = [r["leakage"] for r in rows if np.isfinite(r["lambda"])]
    increases = [b - a for a, b in zip(leak, leak[1:])]
    passed = all(d <= 1e-6 for d in increases)
    record_acceptance(8, "penalty suppression monotonicity", passed,
                      "leakage " + ", ".join(f"{r['lambda']:g}:{r['leakage']:.3e}" for r in rows))
    assert passed


def test_criterion_09_su3_singlets():
    rng = np.random.default_rng(2024)
    meson, baryon = meson_state_su3(), baryon_state_su3()
    worst_fid = 0.0
    for _ in range(20):
        g = random_su3(rng)
        assert abs(np.linalg.det(g) - 1) < 1e-12
        worst_fid = max(worst_fid, 1 - meson.fidelity(apply_color_transform(meson, g)),
                        1 - baryon.fidelity(apply_color_transform(baryon, g)))
    worst_phase = 0.0
    for _ in range(20):
        u = random_unitary(3, rng)
        out = apply_color_transform(baryon, u)
        worst_phase = max(worst_phase, np.abs(out.amplitudes - np.linalg.det(u) * baryon.amplitudes).max())
    passed = worst_fid <= 1e-12 and worst_phase <= 1e-12
    record_acceptance(9, "SU(3) singlet invariance", passed,
                      f"max 1-F = {worst_fid:.1e}, baryon det-phase error {worst_phase:.1e} over 20 samples")
    assert passed


def test_criterion_10_projector_algebra(lat22, u1_full, u1_basis, rng):
    idem = 0.0
    for _ in range(100):
        v = StateVector(u1_full, rng.standard_normal(u1_full.dim) + 1j * rng.standard_normal(u1_full.dim))
        p1 = physical_projector_apply(v, u1_basis)
        p2 = physical_projector_apply(p1, u1_basis)
        idem = max(idem, np.abs(p2.amplitudes - p1.amplitudes).max())

    # single-site transforms are diagonal in the flux basis: read off their phases
    ones = StateVector(u1_full, np.ones(u1_full.dim))
    probe = StateVector(u1_full, rng.standard_normal(u1_full.dim) + 0j)
    invariant = np.ones(u1_full.dim, dtype=bool)
    alphas = 2 * np.pi * np.arange(8) / 8
    for x in range(lat22.n_sites):
        for a in alphas:
            phases = apply_gauge_transform_u1(ones, x, a).amplitudes
            assert np.allclose(apply_gauge_transform_u1(probe, x, a).amplitudes, phases * probe.amplitudes)
            invariant &= np.abs(phases - 1) < 1e-12
    mismatches = 0
    for k in range(u1_full.dim):
        psi = basis_state(u1_full, k)
        fixed = np.abs(physical_projector_apply(psi, u1_basis).amplitudes - psi.amplitudes).max() < 1e-12
        mismatches += fixed != invariant[k]
    passed = idem <= 1e-12 and mismatches == 0 and invariant.sum() == u1_basis.dim
    record_acceptance(10, "projector algebra", passed,
                      f"idempotency {idem:.1e} on 100 states; invariance <=> P psi = psi on all {u1_full.dim} "
                      f"configs ({int(invariant.sum())} invariant, {mismatches} mismatches)")
    assert passed


def test_criterion_11_entropy_sanity(lat22, u1_basis, rng):
    sym = 0.0
    partitions = ([0], [0, 1], [0, 2, 4], [1, 3, 5, 7], [0, 1, 2, 3])
    for _ in range(10):
        psi = StateVector(u1_basis, rng.standard_normal(u1_basis.dim) + 1j * rng.standard_normal(u1_basis.dim))
        for part in partitions:
            rest = [l for l in range(8) if l not in part]
            sym = max(sym, abs(entanglement_entropy(psi, part) - entanglement_entropy(psi, rest)))
    product = max(entanglement_entropy(basis_state(u1_basis, k), part)
                  for k in range(u1_basis.dim) for part in partitions)
    region = [link for link, _ in lat22.plaquette_links(0)]
    a = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(0)))
    b = flux_loop_state(u1_basis, lat22.path(lat22.plaquette_links(3)))
    pair = superpose([a, b], [1, 1])
    two_loop = entanglement_entropy(pair, region)
    oracle = partial_trace_entropy(pair.embedded().amplitudes, [3] * 8, region)
    passed = sym <= 1e-10 and product == 0 and abs(two_loop - 1) <= 1e-12 and abs(oracle - 1) <= 1e-12
    record_acceptance(11, "entropy sanity", passed,
                      f"|S(A)-S(B)| <= {sym:.1e}, product max {product:.1e}, "
                      f"two-loop {two_loop:.12f} bit (oracle {oracle:.12f})")
    assert passed
