"""Run configuration: JSON schema, validation, default injection and object builders.

Every physics convention is made explicit in the resolved config, so a run
is reproducible from its output header alone.
"""

from __future__ import annotations

import copy
import json
import numbers
from fractions import Fraction
from pathlib import Path as FsPath

import numpy as np

from .basis import SU2, U1, FullSpace, build_physical_basis, normalize_charges, split_by_winding
from .evolution import ORDERINGS, MAGNETIC_SPLITS, TrotterPlan
from .lattice import Lattice, build_lattice
from .noise import NoiseSpec

FORMAT = "qlinksim.config/1"


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


OBSERVABLE_NAMES = ("electric_energy", "plaquettes", "wilson", "winding", "gauge_violation", "entropy", "energy")

DEFAULTS = {
    "model": {"group": "U1", "S": 1},
    "lattice": {"Lx": 2, "Ly": 2, "boundary": "periodic"},
    "g2": 1.0,
    "magnetic_sign": None,  # resolved from the model
    "magnetic": True,
    "charges": None,
    "basis": "physical",
    "sector": None,
    "initial_state": {"kind": "vacuum"},
    "trotter": {"dt": 0.1, "steps": 10, "ordering": "electric_first", "order": 1, "magnetic_split": "dense"},
    "observables": ["electric_energy", "plaquettes", "winding", "gauge_violation"],
    "wilson_loops": [],
    "entropy_partition": None,
    "entropy_base": 2.0,
    "noise": None,
    "check_every": 1,
    "spectrum": {"k": 10, "penalty_check": False, "penalty_lambda": 100.0},
    "penalty_sweep": {"lambdas": [0.0, 1.0, 10.0, 100.0], "epsilon": 0.1, "t": 5.0, "links": [0]},
    "su3": {"samples": 20},
    "output": {"dir": "qlinksim_out", "basis_cache": True},
    "seed": 0,
    "dense_budget": 4096,
    "sparse_budget": 1 << 20,
    "link_budget": 128,
}

_NESTED = ("lattice", "trotter", "spectrum", "penalty_sweep", "su3", "output")


def _is_int(x) -> bool:
    return isinstance(x, numbers.Integral) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def _check_keys(doc: dict, allowed, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _resolve_model(doc) -> dict:
    if not isinstance(doc, dict) or "group" not in doc:
        raise ConfigError("model must be an object with a 'group' of 'U1' or 'SU2'")
    group = doc["group"]
    if group == "U1":
        _check_keys(doc, ("group", "S"), "model")
        S = doc.get("S", 1)
        if not _is_int(S) or S < 0:
            raise ConfigError(f"model.S must be a non-negative integer, got {S!r}")
        return {"group": "U1", "S": int(S)}
    if group == "SU2":
        _check_keys(doc, ("group", "j_max"), "model")
        raw = doc.get("j_max", "1/2")
        try:
            j = Fraction(str(raw))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"model.j_max must be a half-integer, got {raw!r}") from None
        if j < 0 or (2 * j).denominator != 1:
            raise ConfigError(f"model.j_max must be a non-negative half-integer, got {raw!r}")
        return {"group": "SU2", "j_max": str(j)}
    raise ConfigError(f"model.group must be 'U1' or 'SU2', got {group!r}")


def _resolve_path_spec(doc, where):
    if not isinstance(doc, dict) or "loop" not in doc:
        raise ConfigError(f"{where} must be an object with a 'loop' kind")
    kinds = {
        "plaquette": ("loop", "index"),
        "rectangle": ("loop", "corner", "w", "h"),
        "wrap": ("loop", "direction", "offset"),
        "straight": ("loop", "start", "direction", "length"),
        "links": ("loop", "steps"),
    }
    if doc["loop"] not in kinds:
        raise ConfigError(f"{where}.loop must be one of {sorted(kinds)}")
    _check_keys(doc, kinds[doc["loop"]], where)
    out = dict(doc)
    if doc["loop"] == "wrap":
        out.setdefault("offset", 0)
    return out


def _resolve_state(doc, where="initial_state"):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError(f"{where} must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "vacuum":
        _check_keys(doc, ("kind",), where)
        return {"kind": "vacuum"}
    if kind in ("flux_loop", "string"):
        _check_keys(doc, ("kind", "path", "e"), where)
        if "path" not in doc:
            raise ConfigError(f"{where}.path is required")
        e = doc.get("e", 1)
        if not _is_int(e):
            raise ConfigError(f"{where}.e must be an integer")
        return {"kind": kind, "path": _resolve_path_spec(doc["path"], f"{where}.path"), "e": int(e)}
    if kind == "superposition":
        _check_keys(doc, ("kind", "terms"), where)
        terms = doc.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ConfigError(f"{where}.terms must be a non-empty list")
        out = []
        for k, t in enumerate(terms):
            _check_keys(t, ("state", "amplitude"), f"{where}.terms[{k}]")
            amp = t.get("amplitude", 1.0)
            if _is_real(amp):
                amp = [float(amp), 0.0]
            if not (isinstance(amp, list) and len(amp) == 2 and all(_is_real(a) for a in amp)):
                raise ConfigError(f"{where}.terms[{k}].amplitude must be a number or [re, im]")
            out.append({"state": _resolve_state(t["state"], f"{where}.terms[{k}].state"),
                        "amplitude": [float(amp[0]), float(amp[1])]})
        return {"kind": "superposition", "terms": out}
    if kind == "file":
        _check_keys(doc, ("kind", "path"), where)
        if not isinstance(doc.get("path"), str):
            raise ConfigError(f"{where}.path must be a string")
        return {"kind": "file", "path": doc["path"]}
    raise ConfigError(f"{where}.kind must be vacuum, flux_loop, string, superposition or file; got {kind!r}")


def resolve(doc: dict) -> dict:
    """Validate a config document and return it with all defaults filled in."""
    _check_keys(doc, tuple(DEFAULTS) + ("format",), "config")
    if doc.get("format", FORMAT) != FORMAT:
        raise ConfigError(f"unsupported config format {doc.get('format')!r}")
    out = copy.deepcopy(DEFAULTS)
    for key in _NESTED:
        if key in doc:
            _check_keys(doc[key], DEFAULTS[key], key)
            out[key].update(copy.deepcopy(doc[key]))
    for key in DEFAULTS:
        if key not in _NESTED and key in doc:
            out[key] = copy.deepcopy(doc[key])

    out["model"] = _resolve_model(out["model"])
    lat = out["lattice"]
    for k in ("Lx", "Ly"):
        if not _is_int(lat[k]) or lat[k] < 1:
            raise ConfigError(f"lattice.{k} must be a positive integer")
    if lat["boundary"] != "periodic":
        raise ConfigError("only periodic boundaries are supported")
    if not _is_real(out["g2"]) or not out["g2"] > 0:
        raise ConfigError("g2 must be a positive number")
    out["g2"] = float(out["g2"])
    if out["magnetic_sign"] is None:
        out["magnetic_sign"] = -1 if out["model"]["group"] == "U1" else 1
    if out["magnetic_sign"] not in (1, -1):
        raise ConfigError("magnetic_sign must be +1 or -1")
    if not isinstance(out["magnetic"], bool):
        raise ConfigError("magnetic must be true or false")
    if out["basis"] not in ("physical", "full"):
        raise ConfigError("basis must be 'physical' or 'full'")
    if out["sector"] is not None:
        if out["model"]["group"] != "U1" or not (isinstance(out["sector"], list) and len(out["sector"]) == 2
                                                and all(_is_int(v) for v in out["sector"])):
            raise ConfigError("sector must be [wx, wy] integers (U(1) only)")
    if out["charges"] is not None:
        if not isinstance(out["charges"], list):
            raise ConfigError("charges must be a list with one entry per site")
        out["charges"] = [q if _is_int(q) else str(q) for q in out["charges"]]
    out["initial_state"] = _resolve_state(out["initial_state"])

    tr = out["trotter"]
    if not _is_real(tr["dt"]) or not tr["dt"] > 0:
        raise ConfigError("trotter.dt must be positive")
    if not _is_int(tr["steps"]) or tr["steps"] < 1:
        raise ConfigError("trotter.steps must be a positive integer")
    if tr["ordering"] not in ORDERINGS:
        raise ConfigError(f"trotter.ordering must be one of {ORDERINGS}")
    if tr["order"] not in (1, 2):
        raise ConfigError("trotter.order must be 1 or 2")
    if tr["magnetic_split"] not in MAGNETIC_SPLITS:
        raise ConfigError(f"trotter.magnetic_split must be one of {MAGNETIC_SPLITS}")
    tr["dt"] = float(tr["dt"])

    if not isinstance(out["observables"], list) or any(o not in OBSERVABLE_NAMES for o in out["observables"]):
        raise ConfigError(f"observables must be a list drawn from {OBSERVABLE_NAMES}")
    if not isinstance(out["wilson_loops"], list):
        raise ConfigError("wilson_loops must be a list of path specs")
    out["wilson_loops"] = [_resolve_path_spec(p, f"wilson_loops[{k}]") for k, p in enumerate(out["wilson_loops"])]
    part = out["entropy_partition"]
    if part is not None and not (isinstance(part, list) and all(_is_int(l) for l in part)):
        raise ConfigError("entropy_partition must be a list of link ids")
    if "entropy" in out["observables"] and part is None:
        raise ConfigError("the entropy observable needs an entropy_partition")
    if not _is_real(out["entropy_base"]) or out["entropy_base"] <= 1:
        raise ConfigError("entropy_base must be a number above 1")
    if out["noise"] is not None:
        try:
            out["noise"] = NoiseSpec.from_dict(out["noise"]).to_dict()
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid noise spec: {exc}") from None
    if out["check_every"] is not None and (not _is_int(out["check_every"]) or out["check_every"] < 1):
        raise ConfigError("check_every must be a positive integer or null")
    sp_ = out["spectrum"]
    if not _is_int(sp_["k"]) or sp_["k"] < 1:
        raise ConfigError("spectrum.k must be a positive integer")
    ps = out["penalty_sweep"]
    if not (isinstance(ps["lambdas"], list) and ps["lambdas"] and all(_is_real(x) and x >= 0 for x in ps["lambdas"])):
        raise ConfigError("penalty_sweep.lambdas must be a non-empty list of non-negative numbers")
    if not _is_real(ps["epsilon"]) or not _is_real(ps["t"]) or ps["t"] < 0:
        raise ConfigError("penalty_sweep.epsilon and penalty_sweep.t must be numbers (t >= 0)")
    if not isinstance(ps["links"], list) or not all(_is_int(l) for l in ps["links"]):
        raise ConfigError("penalty_sweep.links must be a list of link ids")
    if not _is_int(out["su3"]["samples"]) or out["su3"]["samples"] < 1:
        raise ConfigError("su3.samples must be a positive integer")
    if not isinstance(out["output"]["dir"], str) or not isinstance(out["output"]["basis_cache"], bool):
        raise ConfigError("output.dir must be a string and output.basis_cache a boolean")
    if not _is_int(out["seed"]) or not 0 <= out["seed"] < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    for k in ("dense_budget", "sparse_budget", "link_budget"):
        if not _is_int(out[k]) or out[k] < 1:
            raise ConfigError(f"{k} must be a positive integer")
    if 2 * lat["Lx"] * lat["Ly"] > out["link_budget"]:
        raise ConfigError(f"{lat['Lx']}x{lat['Ly']} lattice exceeds the link budget {out['link_budget']}")
    if out["model"]["group"] == "SU2" and out["charges"] is not None:
        raise ConfigError("static charges are supported for the U(1) model only")
    out["format"] = FORMAT
    return out


class RunConfig:
    """A validated, fully resolved run configuration."""

    def __init__(self, doc: dict | None = None):
        self.data = resolve(doc or {})

    def __getitem__(self, key):
        return self.data[key]

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.data == other.data

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls(doc)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = FsPath(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_json(text)

    def override(self, **changes) -> "RunConfig":
        doc = self.to_dict()
        for k, v in changes.items():
            if v is None:
                continue
            if k == "out":
                doc["output"]["dir"] = v
            else:
                doc[k] = v
        return RunConfig(doc)

    # -- builders -----------------------------------------------------------------

    @property
    def model(self):
        m = self.data["model"]
        return U1(m["S"]) if m["group"] == "U1" else SU2(Fraction(m["j_max"]))

    @property
    def lattice(self) -> Lattice:
        lat = self.data["lattice"]
        return build_lattice(lat["Lx"], lat["Ly"], self.data["link_budget"], lat["boundary"])

    def full_space(self) -> FullSpace:
        return FullSpace(self.lattice, self.model, self.data["sparse_budget"])

    def charges(self):
        if self.data["charges"] is None:
            return None
        return normalize_charges(self.lattice, self.model, self.data["charges"])

    def physical_basis(self, full: FullSpace | None = None):
        full = full or self.full_space()
        basis = build_physical_basis(full.lattice, full.model, self.charges(), full=full,
                                     dense_budget=self.data["dense_budget"])
        if self.data["sector"] is not None:
            sectors = split_by_winding(basis)
            key = tuple(self.data["sector"])
            if key not in sectors:
                raise ConfigError(f"winding sector {key} is empty; available: {sorted(sectors)}")
            basis = sectors[key]
        return basis

    def trotter_plan(self) -> TrotterPlan:
        tr = self.data["trotter"]
        return TrotterPlan(dt=tr["dt"], steps=tr["steps"], ordering=tr["ordering"], order=tr["order"],
                           magnetic_split=tr["magnetic_split"])

    def noise_spec(self) -> NoiseSpec | None:
        n = self.data["noise"]
        if n is None:
            return None
        spec = NoiseSpec.from_dict(n)
        return spec

    def path(self, spec: dict):
        lat = self.lattice
        kind = spec["loop"]
        if kind == "plaquette":
            return lat.path(lat.plaquette_links(spec["index"]))
        if kind == "rectangle":
            return lat.rectangular_loop(spec["corner"], spec["w"], spec["h"])
        if kind == "wrap":
            return lat.wrapping_loop(spec["direction"], spec.get("offset", 0))
        if kind == "straight":
            return lat.straight_path(spec["start"], spec["direction"], spec["length"])
        return lat.path([tuple(s) for s in spec["steps"]])

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.data["seed"])
