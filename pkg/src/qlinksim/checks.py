"""Desk-scale invariant suite with frozen regression anchors.

The fixture is the 2x2 torus at S=1 (U(1)) and j_max=1/2 (SU(2)).  The
magnetic sign and dense budget come from the caller, so a flipped sign
convention shows up as failed anchors while structural checks still pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis import SU2, U1, FullSpace, build_physical_basis, gauss_residuals, split_by_winding, su2_singlet_count
from .errors import ErrorAbsorbed
from .evolution import TrotterPlan, trotter_error, trotter_evolve
from .lattice import build_lattice
from .noise import apply_dephasing, apply_link_raise_error, penalty_suppression_experiment
from .observables import (
    entanglement_entropy,
    gauge_violation,
    ground_state,
    lowest_eigenvalues,
    plaquette_expectation,
    syndrome_sweep,
    winding_expectation,
)
from .operators import (
    commutator_norm,
    gauge_commutator_norm,
    gauss_generators_su2,
    hamiltonian,
    max_abs,
    penalty_term,
)
from .states import (
    StateVector,
    apply_color_transform,
    baryon_state_su3,
    basis_state,
    meson_state_su3,
    random_su3,
    random_unitary,
    vacuum_state,
)

# Values for the U(1) fixture (2x2, S=1, g^2=1) with the default magnetic sign -1.
REGRESSION_ANCHORS = {
    "ground_energy": -0.9899096305130719,
    "ground_plaquette": 0.4496174663115396,
    "commutator_HE_HB": 1.0,
    "leakage_lambda0": 0.1929707123355211,
}
ANCHOR_TOL = 1e-8


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "measured": self.measured,
                "tolerance": self.tolerance, "seconds": round(self.seconds, 3)}


def run_invariant_suite(magnetic_sign: int | None = None, dense_budget: int = 4096, seed: int = 0,
                        include_su2: bool = True) -> list[CheckResult]:
    """Run every check; BudgetExceeded propagates so callers can report it."""
    results: list[CheckResult] = []

    def check(name, tolerance):
        def wrap(fn):
            t0 = time.perf_counter()
            passed, measured = fn()
            results.append(CheckResult(name, bool(passed), float(measured), tolerance, time.perf_counter() - t0))
            return fn
        return wrap

    rng = np.random.default_rng(seed)
    lat = build_lattice(2, 2)
    model = U1(1)
    full = FullSpace(lat, model)
    basis = build_physical_basis(lat, model, full=full)
    sign = model.default_magnetic_sign if magnetic_sign is None else magnetic_sign
    parts = hamiltonian(basis, 1.0, sign)
    parts_full = hamiltonian(full, 1.0, sign)

    @check("lattice: every link in two plaquettes", "exact")
    def _():
        counts = np.bincount([l for p in range(lat.n_plaquettes) for l, _ in lat.plaquette_links(p)],
                             minlength=lat.n_links)
        return np.all(counts == 2), float(np.abs(counts - 2).max())

    @check("basis: U(1) enumeration equals brute-force filter", "exact")
    def _():
        brute = np.nonzero(np.all(gauss_residuals(full.configs, lat) == 0, axis=1))[0]
        return np.array_equal(np.sort(brute), basis.codes), abs(len(brute) - basis.dim)

    @check("basis: winding sectors (1,0) and (-1,0) equal", "exact")
    def _():
        sectors = split_by_winding(basis)
        a, b = sectors[(1, 0)].dim, sectors[(-1, 0)].dim
        return a == b, abs(a - b)

    @check("operators: [G_x, H] on the full space", "<= 1e-12")
    def _():
        err = gauge_commutator_norm(parts_full.total)
        return err <= 1e-12, err

    @check("operators: H Hermitian", "<= 1e-12")
    def _():
        err = parts.total.hermiticity_error()
        return err <= 1e-12, err

    @check("evolution: first-order error ratio dt=0.1 vs 0.05", "in [1.7, 2.3]")
    def _():
        psi = vacuum_state(basis)
        r = (trotter_error(parts, psi, TrotterPlan(0.1, 10), dense_budget)
             / trotter_error(parts, psi, TrotterPlan(0.05, 20), dense_budget))
        return 1.7 <= r <= 2.3, r

    @check("evolution: norm drift and winding conservation", "<= 1e-9")
    def _():
        psi = vacuum_state(basis)
        _, rep = trotter_evolve(parts, psi, TrotterPlan(0.05, 100), {"w": winding_expectation}, dense_budget)
        drift = max(abs(n - 1) for n in rep.column("norm"))
        wdrift = max(abs(np.array(w)).max() for w in rep.column("w"))
        return max(drift, wdrift) <= 1e-9, max(drift, wdrift)

    @check("observables: strong-coupling vacuum overlap at g2=100", "> 0.999")
    def _():
        gs = ground_state(hamiltonian(basis, 100.0, sign).total, dense_budget)
        ov = abs(gs.state.amplitudes[basis.vacuum_index()]) ** 2
        return ov > 0.999, ov

    @check("operators: penalty spectrum vs restricted spectrum (lambda=100)", "rel <= 0.005")
    def _():
        restricted = lowest_eigenvalues(parts.total, budget=dense_budget)
        penal = lowest_eigenvalues(parts_full.total + penalty_term(full, 100.0), k=basis.dim, budget=dense_budget)
        diff = np.abs(penal - restricted)
        ok = np.all(diff <= 0.005 * np.abs(restricted) + 1e-12)
        return ok, float(diff.max())

    @check("noise: single raise errors fully detected", "violation == 1")
    def _():
        worst = 0.0
        for k in range(basis.dim):
            psi = StateVector(full, basis.embed(basis_state(basis, k).amplitudes))
            for link in range(lat.n_links):
                try:
                    bad = apply_link_raise_error(psi, link)
                except ErrorAbsorbed:
                    continue
                worst = max(worst, abs(gauge_violation(bad, basis) - 1))
                syn = syndrome_sweep(bad)
                ends = set(lat.link_endpoints(link))
                if set(np.nonzero(syn > 1e-12)[0]) != ends:
                    worst = max(worst, 1.0)
        return worst <= 1e-12, worst

    @check("noise: dephasing leaves leakage zero", "<= 1e-12")
    def _():
        psi = StateVector(full, basis.embed(ground_state(parts.total, dense_budget).state.amplitudes))
        worst = max(gauge_violation(apply_dephasing(psi, l, 0.7), basis) for l in range(lat.n_links))
        return worst <= 1e-12, worst

    @check("noise: penalty suppression monotone", "increase <= 1e-6")
    def _():
        rows = penalty_suppression_experiment(parts_full, budget=dense_budget)
        leak = [r["leakage"] for r in rows[:4]]
        worst = max(0.0, max(b - a for a, b in zip(leak, leak[1:])))
        return worst <= 1e-6, worst

    @check("states: projector idempotent", "<= 1e-12")
    def _():
        worst = 0.0
        for _ in range(10):
            v = rng.standard_normal(full.dim) + 1j * rng.standard_normal(full.dim)
            p1 = basis.project(v)
            worst = max(worst, np.abs(basis.project(p1) - p1).max())
        return worst <= 1e-12, worst

    @check("states: SU(3) meson and baryon invariance", ">= 1 - 1e-12")
    def _():
        worst = 0.0
        meson, baryon = meson_state_su3(), baryon_state_su3()
        for _ in range(20):
            g = random_su3(rng)
            worst = max(worst, 1 - meson.fidelity(apply_color_transform(meson, g)))
            worst = max(worst, 1 - baryon.fidelity(apply_color_transform(baryon, g)))
            u = random_unitary(3, rng)
            phase = apply_color_transform(baryon, u).overlap(baryon).conjugate()
            worst = max(worst, abs(phase - np.linalg.det(u)))
        return worst <= 1e-12, worst

    @check("observables: entropy symmetry S(A) = S(B)", "<= 1e-10")
    def _():
        psi = ground_state(parts.total, dense_budget).state
        worst = 0.0
        for links in ([0], [0, 1], [0, 2, 5], [1, 3, 4, 6]):
            rest = [l for l in range(lat.n_links) if l not in links]
            worst = max(worst, abs(entanglement_entropy(psi, links) - entanglement_entropy(psi, rest)))
        return worst <= 1e-10, worst

    if include_su2:
        su2 = SU2(Fraction(1, 2))
        su2_full = FullSpace(lat, su2)

        @check("basis: SU(2) kernel dimension equals singlet count", "exact")
        def _():
            b = build_physical_basis(lat, su2, full=su2_full, dense_budget=dense_budget)
            expected = su2_singlet_count(lat, su2.two_j_max)
            return b.dim == expected, abs(b.dim - expected)

        @check("operators: SU(2) Gauss generators close su(2)", "<= 1e-12")
        def _():
            g = gauss_generators_su2(su2_full, 0)
            worst = 0.0
            for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
                comm = g[a] @ g[b] - g[b] @ g[a]
                worst = max(worst, max_abs((comm - 1j * g[c]).matrix))
            return worst <= 1e-12, worst

    @check("anchor: ground-state energy (g2=1)", f"|diff| <= {ANCHOR_TOL}")
    def _():
        e = ground_state(parts.total, dense_budget).energy
        d = abs(e - REGRESSION_ANCHORS["ground_energy"])
        return d <= ANCHOR_TOL, d

    @check("anchor: ground-state plaquette (g2=1)", f"|diff| <= {ANCHOR_TOL}")
    def _():
        v = plaquette_expectation(ground_state(parts.total, dense_budget).state, 0).real
        d = abs(v - REGRESSION_ANCHORS["ground_plaquette"])
        return d <= ANCHOR_TOL, d

    @check("anchor: max |[H_E, H_B]|", f"|diff| <= {ANCHOR_TOL}")
    def _():
        d = abs(commutator_norm(parts.H_E, parts.H_B) - REGRESSION_ANCHORS["commutator_HE_HB"])
        return d <= ANCHOR_TOL, d

    @check("anchor: leakage at lambda=0, eps=0.1, t=5", f"|diff| <= {ANCHOR_TOL}")
    def _():
        leak = penalty_suppression_experiment(parts_full, lambdas=(0,), budget=dense_budget)[0]["leakage"]
        d = abs(leak - REGRESSION_ANCHORS["leakage_lambda0"])
        return d <= ANCHOR_TOL, d

    return results
