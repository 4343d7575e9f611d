"""Command-line front end.

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

import numpy as np

from . import __version__
from .basis import U1, PhysicalBasis, normalize_charges, split_by_winding
from .checks import run_invariant_suite
from .config import ConfigError, RunConfig
from .errors import BudgetExceeded, QLinkError, StateError
from .evolution import trotter_evolve
from .lattice import LatticeError
from .noise import penalty_suppression_experiment, run_noisy_trajectory, table_to_csv
from .observables import entanglement_entropy, ground_state, lowest_eigenvalues, winding_expectation
from .operators import electric_energy_op, hamiltonian, path_operator, penalty_term, plaquette_op
from .states import (
    StateVector,
    apply_color_transform,
    baryon_state_su3,
    flux_loop_state,
    meson_state_su3,
    random_su3,
    random_unitary,
    state_from_dict,
    string_state,
    superpose,
    vacuum_state,
)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _header(cfg: RunConfig, command: str, **extra) -> dict:
    return {"command": command, "version": __version__, "config": cfg.to_dict(), **extra}


def _write(out: FsPath, name: str, text: str) -> FsPath:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _csv(header: dict, columns: list[str], rows: list[list]) -> str:
    lines = ["# " + json.dumps(header, sort_keys=True), ",".join(columns)]
    for r in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in r))
    return "\n".join(lines) + "\n"


def _basis(cfg: RunConfig, out: FsPath, full=None) -> PhysicalBasis:
    """Physical basis, reusing the JSON cache in the output directory when it matches."""
    full = full or cfg.full_space()
    cache = out / "basis.json"
    if cfg["output"]["basis_cache"] and cache.exists():
        try:
            b = PhysicalBasis.from_json(cache.read_text())
            charges = normalize_charges(full.lattice, full.model, cfg["charges"])
            if b.full.tag == full.tag and b.charges == charges and cfg["sector"] is None and b.sector is None:
                return PhysicalBasis(full, b.charges, configs=b.configs) if b.configs is not None else \
                    PhysicalBasis(full, b.charges, isometry=b.isometry, block_labels=b.block_labels)
        except (ValueError, KeyError, QLinkError):
            pass
    b = cfg.physical_basis(full)
    if cfg["output"]["basis_cache"] and b.sector is None:
        _write(out, "basis.json", b.to_json())
    return b


def _initial_state(cfg: RunConfig, space, spec: dict) -> StateVector:
    kind = spec["kind"]
    if kind == "vacuum":
        return vacuum_state(space)
    if kind == "flux_loop":
        return flux_loop_state(space, cfg.path(spec["path"]), spec["e"])
    if kind == "string":
        return string_state(space, cfg.path(spec["path"]), spec["e"])
    if kind == "superposition":
        states = [_initial_state(cfg, space, t["state"]) for t in spec["terms"]]
        return superpose(states, [complex(*t["amplitude"]) for t in spec["terms"]])
    doc = json.loads(FsPath(spec["path"]).read_text())
    return state_from_dict(doc, space)


def _observers(cfg: RunConfig, parts):
    """Observer callables; operators are built once and reused at every record."""
    obs = {}
    names = cfg["observables"]
    space = parts.space
    if "energy" in names:
        H = parts.total
        obs["energy"] = lambda s: s.expectation(H).real
    if "electric_energy" in names:
        E = electric_energy_op(space)
        obs["electric_energy"] = lambda s: s.expectation(E).real
    if "plaquettes" in names:
        for p in range(space.lattice.n_plaquettes):
            op = plaquette_op(space, p)
            obs[f"plaquette_{p}"] = lambda s, op=op: s.expectation(op)
    if "wilson" in names:
        for k, spec in enumerate(cfg["wilson_loops"]):
            path = cfg.path(spec)
            if not path.closed:
                raise ConfigError(f"wilson_loops[{k}] is not a closed path")
            op = path_operator(space, path)
            obs[f"wilson_{k}"] = lambda s, op=op: s.expectation(op)
    if "winding" in names and isinstance(space.model, U1):
        obs["winding"] = lambda s: list(winding_expectation(s))
    if "entropy" in names:
        part = cfg["entropy_partition"]
        obs["entropy"] = lambda s: entanglement_entropy(s, part, cfg["entropy_base"], cfg["dense_budget"])
    return obs


# -- commands ---------------------------------------------------------------------


def cmd_basis(cfg: RunConfig, out: FsPath) -> int:
    full = cfg.full_space()
    basis = _basis(cfg, out, full)
    summary = {"full_dim": full.dim, "physical_dim": basis.dim}
    if basis.configs is not None:
        summary["sectors"] = {f"{k[0]},{k[1]}": v.dim for k, v in split_by_winding(basis).items()}
    _write(out, "basis_summary.json", json.dumps({"header": _header(cfg, "basis"), **summary}, indent=2, sort_keys=True))
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, out: FsPath) -> int:
    full = cfg.full_space()
    basis = _basis(cfg, out, full)
    parts = hamiltonian(basis, cfg["g2"], cfg["magnetic_sign"], magnetic=cfg["magnetic"])
    budget = cfg["dense_budget"]
    k = cfg["spectrum"]["k"]
    evals = lowest_eigenvalues(parts.total, k, budget)
    gs = ground_state(parts.total, budget)
    extra = {"ground_multiplicity": gs.multiplicity}
    vac = basis.vacuum_index()
    if vac >= 0:
        extra["ground_vacuum_overlap"] = float(abs(gs.state.amplitudes[vac]) ** 2)
    rows = [[i, float(e)] for i, e in enumerate(evals)]
    columns = ["index", "energy"]
    status = EXIT_OK
    if cfg["spectrum"]["penalty_check"]:
        lam = cfg["spectrum"]["penalty_lambda"]
        full_parts = hamiltonian(full, cfg["g2"], cfg["magnetic_sign"], magnetic=cfg["magnetic"])
        restricted = lowest_eigenvalues(parts.total, None, budget)
        penal = lowest_eigenvalues(full_parts.total + penalty_term(full, lam, basis.charges), basis.dim, budget)
        dev = np.abs(penal - restricted)
        ok = bool(np.all(dev <= 0.005 * np.abs(restricted) + 1e-12))
        extra.update(penalty_lambda=lam, penalty_max_abs_deviation=float(dev.max()), penalty_check_passed=ok)
        columns.append("penalized_energy")
        rows = [r + [float(penal[i])] for i, r in enumerate(rows)]
        status = EXIT_OK if ok else EXIT_INVARIANT
    _write(out, "spectrum.csv", _csv(_header(cfg, "spectrum", **extra), columns, rows))
    print(json.dumps({"lowest": [float(e) for e in evals], **extra}, sort_keys=True))
    return status


def cmd_evolve(cfg: RunConfig, out: FsPath) -> int:
    full = cfg.full_space()
    noise = cfg.noise_spec()
    plan = cfg.trotter_plan()
    budget = cfg["dense_budget"]
    basis = _basis(cfg, out, full)
    on_full = cfg["basis"] == "full" or noise is not None
    if on_full:
        space = full
        start = StateVector(full, basis.embed(_initial_state(cfg, basis, cfg["initial_state"]).amplitudes))
    else:
        space = basis
        start = _initial_state(cfg, basis, cfg["initial_state"])
    parts = hamiltonian(space, cfg["g2"], cfg["magnetic_sign"], magnetic=cfg["magnetic"])
    observers = _observers(cfg, parts)
    if noise is not None:
        report = run_noisy_trajectory(parts, start, plan, noise, cfg["check_every"], basis, budget, observers)
    else:
        _, report = trotter_evolve(parts, start, plan, observers, budget, projector_basis=basis)
    report.header = {**_header(cfg, "evolve"), **report.header}
    _write(out, "trajectory.jsonl", report.to_jsonl())
    summary_rows = [r for r in report.records]
    for r in summary_rows:
        r.pop("syndromes", None)
    report.records = summary_rows
    _write(out, "trajectory.csv", report.to_csv())
    drift = max(abs(n - report.records[0]["norm"]) for n in report.column("norm"))
    print(json.dumps({"steps": plan.steps, "final_time": plan.total_time, "norm_drift": drift,
                      "first_detection_step": report.header.get("first_detection_step")}, sort_keys=True))
    return EXIT_OK


def cmd_check(cfg: RunConfig, out: FsPath) -> int:
    if not isinstance(cfg.model, U1):
        raise ConfigError("the invariant suite runs on the U(1) fixture; use a U1 model config")
    results = run_invariant_suite(cfg["magnetic_sign"], cfg["dense_budget"], cfg["seed"])
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  measured={r.measured:.3e}  tol {r.tolerance}")
    rows = [[r.name, r.passed, r.measured, r.tolerance] for r in results]
    _write(out, "check.csv", _csv(_header(cfg, "check"), ["name", "passed", "measured", "tolerance"], rows))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_INVARIANT if failed else EXIT_OK


def cmd_penalty_sweep(cfg: RunConfig, out: FsPath) -> int:
    if not isinstance(cfg.model, U1):
        raise ConfigError("the penalty sweep is implemented for the U(1) model")
    full = cfg.full_space()
    basis = _basis(cfg, out, full)
    ps = cfg["penalty_sweep"]
    parts = hamiltonian(full, cfg["g2"], cfg["magnetic_sign"], magnetic=cfg["magnetic"])
    rows = penalty_suppression_experiment(parts, ps["lambdas"], ps["epsilon"], ps["t"], ps["links"], basis,
                                          cfg["dense_budget"])
    text = "# " + json.dumps(_header(cfg, "penalty-sweep"), sort_keys=True) + "\n" + table_to_csv(rows)
    _write(out, "penalty_sweep.csv", text)
    for r in rows:
        print(f"lambda={r['lambda']:<8g} leakage={r['leakage']:.6e}")
    return EXIT_OK


def cmd_su3_singlet(cfg: RunConfig, out: FsPath) -> int:
    rng = cfg.rng()
    meson, baryon = meson_state_su3(), baryon_state_su3()
    rows = []
    worst = 0.0
    for k in range(cfg["su3"]["samples"]):
        g = random_su3(rng)
        fm = meson.fidelity(apply_color_transform(meson, g))
        fb = baryon.fidelity(apply_color_transform(baryon, g))
        u = random_unitary(3, rng)
        phase = apply_color_transform(baryon, u).overlap(baryon).conjugate()
        phase_err = abs(phase - np.linalg.det(u))
        rows.append([k, fm, fb, phase_err])
        worst = max(worst, 1 - fm, 1 - fb, phase_err)
    worst = float(worst)
    ok = bool(worst <= 1e-12)
    _write(out, "su3_singlet.csv", _csv(_header(cfg, "su3-singlet", worst=worst, passed=ok),
                                       ["sample", "meson_fidelity", "baryon_fidelity", "baryon_phase_error"], rows))
    print(f"{'PASS' if ok else 'FAIL'} worst deviation {worst:.3e} over {len(rows)} samples")
    return EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {
    "basis": cmd_basis,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "check": cmd_check,
    "penalty-sweep": cmd_penalty_sweep,
    "su3-singlet": cmd_su3_singlet,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlinksim", description="Truncated lattice gauge theory simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run config (defaults used when omitted)")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
        p.add_argument("--budget", type=int, help="dense dimension budget (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        cfg = cfg.override(seed=args.seed, dense_budget=args.budget, out=args.out)
    except (ConfigError, LatticeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = FsPath(cfg["output"]["dir"])
    try:
        return COMMANDS[args.command](cfg, out)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, LatticeError, StateError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QLinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
