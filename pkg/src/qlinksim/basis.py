"""Link alphabets, tensor-product spaces and Gauss-law physical bases.

The full space is the tensor product of one truncated link space per link,
link 0 being the most significant factor, so basis index ``k`` of the full
space is the mixed-radix code of the per-link label indices.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

from . import su2link
from .errors import AmbiguousKernel, BudgetExceeded, QLinkError
from .lattice import Direction, Lattice

DEFAULT_DENSE_BUDGET = 4096
DEFAULT_SPARSE_BUDGET = 1 << 20
KERNEL_THRESHOLD = 1e-10
KERNEL_GAP = 1e-8

# -- models -------------------------------------------------------------------


@dataclass(frozen=True)
class U1:
    """U(1) quantum link model with flux truncated to -S..S."""

    S: int

    def __post_init__(self):
        if int(self.S) != self.S or self.S < 0:
            raise ValueError(f"U(1) truncation must be a non-negative integer, got {self.S}")
        object.__setattr__(self, "S", int(self.S))

    name = "U1"

    @property
    def link_dim(self) -> int:
        return 2 * self.S + 1

    @property
    def default_magnetic_sign(self) -> int:
        return -1

    def to_dict(self) -> dict:
        return {"group": "U1", "S": self.S}


@dataclass(frozen=True)
class SU2:
    """SU(2) link model keeping irreps j = 0, 1/2, ..., j_max."""

    j_max: Fraction

    def __post_init__(self):
        j = Fraction(self.j_max).limit_denominator(2)
        if j < 0 or (2 * j).denominator != 1 or abs(float(j) - float(self.j_max)) > 1e-12:
            raise ValueError(f"j_max must be a non-negative half-integer, got {self.j_max}")
        object.__setattr__(self, "j_max", j)

    name = "SU2"

    @property
    def two_j_max(self) -> int:
        return int(2 * self.j_max)

    @property
    def link_dim(self) -> int:
        return su2link.link_dim(self.two_j_max)

    @property
    def default_magnetic_sign(self) -> int:
        return 1

    def to_dict(self) -> dict:
        return {"group": "SU2", "j_max": str(self.j_max)}


GaugeModel = Union[U1, SU2]


def model_from_dict(data: dict) -> GaugeModel:
    group = str(data.get("group", "")).upper().replace("(", "").replace(")", "")
    if group == "U1":
        return U1(int(data["S"]))
    if group == "SU2":
        return SU2(Fraction(str(data["j_max"])))
    raise ValueError(f"unknown gauge group {data.get('group')!r}")


def link_dimension(model: GaugeModel) -> int:
    return model.link_dim


# -- charges --------------------------------------------------------------------


def normalize_charges(lattice: Lattice, model: GaugeModel, charges=None) -> tuple:
    """Per-site static charges as a tuple; ``None`` means no charges.

    U(1) charges are integers that must sum to zero on the torus.  SU(2)
    charges are site irrep labels; they are validated (a global singlet must
    exist) but only the pure-gauge physical basis is constructed.
    """
    if charges is None:
        return (0,) * lattice.n_sites if isinstance(model, U1) else (Fraction(0),) * lattice.n_sites
    if isinstance(charges, dict):
        full = [0] * lattice.n_sites
        for key, value in charges.items():
            full[int(key)] = value
        charges = full
    charges = list(charges)
    if len(charges) != lattice.n_sites:
        raise ValueError(f"expected {lattice.n_sites} site charges, got {len(charges)}")
    if isinstance(model, U1):
        if any(int(q) != q for q in charges):
            raise ValueError("U(1) charges must be integers")
        charges = tuple(int(q) for q in charges)
        if sum(charges) != 0:
            raise ValueError(f"total U(1) charge must vanish on a torus, got {sum(charges)}")
        return charges
    js = tuple(Fraction(str(q)) for q in charges)
    if any(j < 0 or (2 * j).denominator != 1 for j in js):
        raise ValueError("SU(2) site charges must be non-negative half-integers")
    if not admits_singlet(js):
        raise ValueError(f"SU(2) site irreps {tuple(map(str, js))} admit no global singlet")
    return js


def admits_singlet(js: Sequence[Fraction]) -> bool:
    """Whether the tensor product of the given SU(2) irreps contains a singlet."""
    reachable = {Fraction(0)}
    for j in js:
        nxt = set()
        for J in reachable:
            k = abs(J - j)
            while k <= J + j:
                nxt.add(k)
                k += 1
        reachable = nxt
    return Fraction(0) in reachable


def has_charges(charges: tuple) -> bool:
    return any(q != 0 for q in charges)


# -- geometry helpers -------------------------------------------------------------


def incidence_matrix(lattice: Lattice) -> np.ndarray:
    """Site x link matrix: +1 at a link's origin, -1 at its target (self-loops cancel)."""
    a = np.zeros((lattice.n_sites, lattice.n_links), dtype=np.int64)
    for link in range(lattice.n_links):
        o, t = lattice.link_endpoints(link)
        a[o, link] += 1
        a[t, link] -= 1
    return a


def cut_matrix(lattice: Lattice) -> np.ndarray:
    """2 x link matrix selecting the x- and y-cut links."""
    w = np.zeros((2, lattice.n_links), dtype=np.int64)
    w[0, lattice.winding_cut(Direction.X)] = 1
    w[1, lattice.winding_cut(Direction.Y)] = 1
    return w


def gauss_residual_u1(config, site: int, lattice: Lattice, charges=None) -> int:
    """Outgoing minus incoming flux at ``site`` minus the static charge there."""
    outgoing, incoming = lattice.links_at_site(site)
    config = np.asarray(config)
    rho = 0 if charges is None else int(charges[site])
    return int(sum(config[l] for l in outgoing) - sum(config[l] for l in incoming)) - rho


def gauss_residuals(configs: np.ndarray, lattice: Lattice, charges=None) -> np.ndarray:
    """Residuals for a batch of configs, shape (n_configs, n_sites)."""
    configs = np.atleast_2d(np.asarray(configs, dtype=np.int64))
    res = configs @ incidence_matrix(lattice).T
    if charges is not None:
        res = res - np.asarray(charges, dtype=np.int64)[None, :]
    return res


def winding_numbers(config, lattice: Lattice) -> tuple[int, int]:
    w = cut_matrix(lattice) @ np.asarray(config, dtype=np.int64)
    return int(w[0]), int(w[1])


# -- spaces -----------------------------------------------------------------------


class FullSpace:
    """Unconstrained tensor product of truncated link spaces."""

    kind = "full"

    def __init__(self, lattice: Lattice, model: GaugeModel, sparse_budget: int = DEFAULT_SPARSE_BUDGET):
        self.lattice = lattice
        self.model = model
        self.d = model.link_dim
        self.n_links = lattice.n_links
        self.dim = self.d**self.n_links
        if self.dim > sparse_budget:
            raise BudgetExceeded(f"full space dimension {self.dim} exceeds sparse budget {sparse_budget}")
        self.sparse_budget = sparse_budget
        self._configs = None
        self.radix = self.d ** np.arange(self.n_links - 1, -1, -1, dtype=np.int64)

    @property
    def tag(self) -> tuple:
        return ("full", self.model, self.lattice.Lx, self.lattice.Ly)

    @property
    def full(self) -> "FullSpace":
        return self

    def __repr__(self):
        return f"FullSpace({self.lattice.Lx}x{self.lattice.Ly}, {self.model}, dim={self.dim})"

    def label_indices(self) -> np.ndarray:
        """All basis states as per-link label indices, shape (dim, n_links)."""
        if self._configs is None:
            idx = np.indices((self.d,) * self.n_links).reshape(self.n_links, -1).T
            self._configs = np.ascontiguousarray(idx, dtype=np.int8 if self.d < 128 else np.int16)
        return self._configs

    @property
    def configs(self) -> np.ndarray:
        """U(1): flux values of every basis state, shape (dim, n_links)."""
        self._require_u1()
        return self.label_indices().astype(np.int64) - self.model.S

    def encode(self, configs) -> np.ndarray:
        """U(1) flux configs -> basis index."""
        self._require_u1()
        configs = np.atleast_2d(np.asarray(configs, dtype=np.int64))
        return (configs + self.model.S) @ self.radix

    def index_of(self, configs) -> np.ndarray:
        """Basis index of each config, -1 where a flux is out of range."""
        configs = np.atleast_2d(np.asarray(configs, dtype=np.int64))
        inside = np.all(np.abs(configs) <= self.model.S, axis=1)
        out = np.full(configs.shape[0], -1, dtype=np.int64)
        out[inside] = self.encode(configs[inside])
        return out

    def embed(self, amplitudes: np.ndarray) -> np.ndarray:
        return np.asarray(amplitudes, dtype=complex)

    def vacuum_index(self) -> int:
        if isinstance(self.model, U1):
            return int(self.encode(np.zeros(self.n_links, dtype=np.int64))[0])
        return 0

    def _require_u1(self):
        if not isinstance(self.model, U1):
            raise QLinkError("flux configurations exist only for the U(1) model")


class PhysicalBasis:
    """Orthonormal basis of the Gauss-law subspace, embedded in a FullSpace.

    U(1): members are flux configurations (sorted by basis code) with winding
    tags.  SU(2): members are amplitude vectors stored as columns of a sparse
    isometry.
    """

    kind = "physical"

    def __init__(self, full: FullSpace, charges: tuple, *, configs=None, isometry=None,
                 block_labels=None, sector=None):
        self.full = full
        self.lattice = full.lattice
        self.model = full.model
        self.charges = charges
        self.sector = sector
        if configs is not None:
            configs = np.asarray(configs, dtype=np.int64).reshape(-1, full.n_links)
            codes = full.encode(configs) if len(configs) else np.zeros(0, dtype=np.int64)
            order = np.argsort(codes, kind="stable")
            self.configs = configs[order]
            self.codes = codes[order]
            self.dim = len(self.codes)
            self.sectors = (self.configs @ cut_matrix(self.lattice).T) if self.dim else np.zeros((0, 2), np.int64)
            self.isometry = sp.csr_matrix(
                (np.ones(self.dim), (self.codes, np.arange(self.dim))), shape=(full.dim, self.dim), dtype=complex
            ).tocsc()
        else:
            self.configs = None
            self.codes = None
            self.sectors = None
            self.isometry = sp.csc_matrix(isometry, dtype=complex)
            self.dim = self.isometry.shape[1]
        self.block_labels = block_labels

    @property
    def tag(self) -> tuple:
        return ("physical", self.model, self.lattice.Lx, self.lattice.Ly, self.charges, self.sector)

    def __repr__(self):
        return f"PhysicalBasis({self.lattice.Lx}x{self.lattice.Ly}, {self.model}, dim={self.dim})"

    def __len__(self):
        return self.dim

    def index_of(self, configs) -> np.ndarray:
        """Position of each U(1) config in this basis, -1 if absent."""
        full_idx = self.full.index_of(configs)
        pos = np.searchsorted(self.codes, full_idx)
        pos = np.clip(pos, 0, max(self.dim - 1, 0))
        found = (full_idx >= 0) & (self.dim > 0)
        if self.dim:
            found &= self.codes[pos] == full_idx
        return np.where(found, pos, -1)

    def embed(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.isometry @ np.asarray(amplitudes, dtype=complex)

    def compress(self, full_amplitudes: np.ndarray) -> np.ndarray:
        return self.isometry.conj().T @ np.asarray(full_amplitudes, dtype=complex)

    def project(self, full_amplitudes: np.ndarray) -> np.ndarray:
        return self.embed(self.compress(full_amplitudes))

    def vacuum_index(self) -> int:
        if self.configs is not None:
            pos = self.index_of(np.zeros(self.full.n_links, dtype=np.int64))[0]
            return int(pos)
        col = self.isometry.getrow(self.full.vacuum_index()).tocoo()
        hits = [c for c, v in zip(col.col, col.data) if abs(abs(v) - 1) < 1e-9]
        return int(hits[0]) if hits else -1

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "format": "qlinksim.physical_basis/1",
            "model": self.model.to_dict(),
            "lattice": self.lattice.to_dict(),
            "charges": [str(q) for q in self.charges],
            "dim": self.dim,
            "sector": list(self.sector) if self.sector is not None else None,
        }
        if self.configs is not None:
            doc["members"] = self.configs.tolist()
            doc["winding"] = self.sectors.tolist()
        else:
            iso = self.isometry.tocsc()
            vectors = []
            for k in range(self.dim):
                start, stop = iso.indptr[k], iso.indptr[k + 1]
                vectors.append({
                    "index": iso.indices[start:stop].tolist(),
                    "re": iso.data[start:stop].real.tolist(),
                    "im": iso.data[start:stop].imag.tolist(),
                })
            doc["vectors"] = vectors
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict, sparse_budget: int = DEFAULT_SPARSE_BUDGET) -> "PhysicalBasis":
        lattice = Lattice(int(doc["lattice"]["Lx"]), int(doc["lattice"]["Ly"]))
        model = model_from_dict(doc["model"])
        full = FullSpace(lattice, model, sparse_budget)
        sector = tuple(doc["sector"]) if doc.get("sector") is not None else None
        if isinstance(model, U1):
            charges = tuple(int(q) for q in doc["charges"])
            configs = np.asarray(doc["members"], dtype=np.int64).reshape(-1, lattice.n_links)
            return cls(full, charges, configs=configs, sector=sector)
        charges = tuple(Fraction(q) for q in doc["charges"])
        rows, cols, vals = [], [], []
        for k, vec in enumerate(doc["vectors"]):
            rows.extend(vec["index"])
            cols.extend([k] * len(vec["index"]))
            vals.extend(np.asarray(vec["re"]) + 1j * np.asarray(vec["im"]))
        iso = sp.csc_matrix((vals, (rows, cols)), shape=(full.dim, int(doc["dim"])), dtype=complex)
        return cls(full, charges, isometry=iso, sector=sector)

    @classmethod
    def from_json(cls, text: str, **kw) -> "PhysicalBasis":
        return cls.from_dict(json.loads(text), **kw)


# -- U(1) -----------------------------------------------------------------------


def enumerate_gauss_configs(lattice: Lattice, S: int, charges=None, max_states: int = DEFAULT_SPARSE_BUDGET) -> np.ndarray:
    """All flux configs with zero Gauss residual, grown link by link.

    Partial configurations are pruned as soon as every link touching a site
    has been assigned and that site's residual is nonzero.
    """
    inc = incidence_matrix(lattice)
    rho = np.zeros(lattice.n_sites, dtype=np.int64) if charges is None else np.asarray(charges, dtype=np.int64)
    last_link = np.full(lattice.n_sites, -1)
    for link in range(lattice.n_links):
        o, t = lattice.link_endpoints(link)
        last_link[o] = max(last_link[o], link)
        last_link[t] = max(last_link[t], link)
    values = np.arange(-S, S + 1, dtype=np.int64)
    partial = np.zeros((1, 0), dtype=np.int64)
    for link in range(lattice.n_links):
        n = partial.shape[0]
        partial = np.hstack([np.repeat(partial, len(values), axis=0), np.tile(values, n)[:, None]])
        done = np.nonzero(last_link == link)[0]
        if len(done):
            res = partial @ inc[done, : link + 1].T - rho[done][None, :]
            partial = partial[np.all(res == 0, axis=1)]
        if partial.shape[0] > max_states:
            raise BudgetExceeded(f"Gauss-law enumeration exceeded {max_states} partial states")
    return partial


def build_physical_basis_u1(lattice: Lattice, model: U1, charges=None, full: FullSpace | None = None,
                            sparse_budget: int = DEFAULT_SPARSE_BUDGET) -> PhysicalBasis:
    charges = normalize_charges(lattice, model, charges)
    if full is None:
        full = FullSpace(lattice, model, sparse_budget)
    configs = enumerate_gauss_configs(lattice, model.S, charges, max_states=full.sparse_budget)
    return PhysicalBasis(full, charges, configs=configs)


def split_by_winding(basis: PhysicalBasis) -> dict[tuple[int, int], PhysicalBasis]:
    if basis.configs is None:
        raise QLinkError("winding sectors are defined for the U(1) model only")
    out = {}
    keys = sorted({tuple(int(v) for v in row) for row in basis.sectors})
    for key in keys:
        mask = np.all(basis.sectors == np.asarray(key), axis=1)
        out[key] = PhysicalBasis(basis.full, basis.charges, configs=basis.configs[mask], sector=key)
    return out


# -- SU(2) ----------------------------------------------------------------------


def kron_embed(dims: Sequence[int], ops: dict) -> sp.csr_matrix:
    """Tensor product with ``ops[k]`` on factor k and identity elsewhere."""
    result = None
    pending = 1
    for k, d in enumerate(dims):
        if k in ops:
            if pending > 1 or result is None:
                eye = sp.identity(pending, dtype=complex, format="csr")
                result = eye if result is None else sp.kron(result, eye, format="csr")
                pending = 1
            result = sp.kron(result, sp.csr_matrix(ops[k], dtype=complex), format="csr")
        else:
            pending *= d
    eye = sp.identity(pending, dtype=complex, format="csr")
    result = eye if result is None else sp.kron(result, eye, format="csr")
    return result.tocsr()


def su2_site_generators(lattice: Lattice, two_j_max: int, site: int, link_ops=None, dims=None) -> list[sp.csr_matrix]:
    """G^a at ``site``: sum of R^a over incoming minus L^a over outgoing links."""
    n = lattice.n_links
    if dims is None:
        dims = [su2link.link_dim(two_j_max)] * n
    if link_ops is None:
        left = [su2link.left_generators(two_j_max)] * n
        right = [su2link.right_generators(two_j_max)] * n
    else:
        left, right = link_ops
    outgoing, incoming = lattice.links_at_site(site)
    gens = []
    for a in range(3):
        total = None
        for link in incoming:
            term = kron_embed(dims, {link: right[link][a]})
            total = term if total is None else total + term
        for link in outgoing:
            total = total - kron_embed(dims, {link: left[link][a]})
        total.sum_duplicates()
        total.eliminate_zeros()
        gens.append(total.tocsr())
    return gens


def _block_link_ops(two_j: int, two_j_max: int):
    """L, R generators restricted to the j-block of one link."""
    states = su2link.link_states(two_j_max)
    idx = [k for k, s in enumerate(states) if s[0] == two_j]
    left = tuple(sp.csr_matrix(g[idx][:, idx]) for g in su2link.left_generators(two_j_max))
    right = tuple(sp.csr_matrix(g[idx][:, idx]) for g in su2link.right_generators(two_j_max))
    return idx, left, right


def canonical_orthonormal(q: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Basis-independent orthonormal basis of span(q): Gram-Schmidt of the projector columns."""
    k = q.shape[1]
    if k == 0:
        return q
    proj = q @ q.conj().T
    out = []
    for i in range(proj.shape[0]):
        v = proj[:, i].copy()
        for u in out:
            v -= u * (u.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > tol:
            v /= nv
            for u in out:  # second pass for numerical orthogonality
                v -= u * (u.conj() @ v)
            v /= np.linalg.norm(v)
            pivot = np.argmax(np.abs(v) > tol)
            v *= np.exp(-1j * np.angle(v[pivot]))
            out.append(v)
            if len(out) == k:
                break
    return np.column_stack(out)


def build_physical_basis_su2(lattice: Lattice, model: SU2, charges=None, full: FullSpace | None = None,
                             dense_budget: int = DEFAULT_DENSE_BUDGET,
                             sparse_budget: int = DEFAULT_SPARSE_BUDGET,
                             threshold: float = KERNEL_THRESHOLD, gap: float = KERNEL_GAP) -> PhysicalBasis:
    """Simultaneous kernel of all G^a_x via the null space of sum (G^a_x)^2.

    The operator conserves every link's j, so it is diagonalized block by
    block; within a block only states with all G^3_x = 0 can be annihilated,
    which shrinks each dense problem further.
    """
    charges = normalize_charges(lattice, model, charges)
    if has_charges(charges):
        raise QLinkError("the SU(2) physical basis is built for the pure gauge theory only")
    if full is None:
        full = FullSpace(lattice, model, sparse_budget)
    tjm = model.two_j_max
    n = lattice.n_links
    radix = full.radix
    block_cache = {tj: _block_link_ops(tj, tjm) for tj in range(tjm + 1)}
    columns = []
    labels = []
    for jconf in itertools.product(range(tjm + 1), repeat=n):
        per_link = [block_cache[tj] for tj in jconf]
        dims = [len(b[0]) for b in per_link]
        # G^3 = sum_in m_R + sum_out m_L, read off from the diagonals
        g3 = []
        for site in range(lattice.n_sites):
            diag = np.zeros(int(np.prod(dims)))
            outgoing, incoming = lattice.links_at_site(site)
            for link in incoming:
                diag += _kron_diag(dims, link, per_link[link][2][2].diagonal().real)
            for link in outgoing:
                diag -= _kron_diag(dims, link, per_link[link][1][2].diagonal().real)
            g3.append(diag)
        keep = np.nonzero(np.all(np.abs(np.array(g3)) < 1e-12, axis=0))[0]
        if len(keep) == 0:
            continue
        if len(keep) > dense_budget:
            raise BudgetExceeded(f"SU(2) kernel block of dimension {len(keep)} exceeds dense budget {dense_budget}")
        ops = ([b[1] for b in per_link], [b[2] for b in per_link])
        m = np.zeros((len(keep), len(keep)), dtype=complex)
        for site in range(lattice.n_sites):
            for g in su2_site_generators(lattice, tjm, site, link_ops=ops, dims=dims):
                gk = g[:, keep]
                m += (gk.conj().T @ gk).toarray()
        evals, evecs = np.linalg.eigh(m)
        in_kernel = evals < threshold
        outside = evals[~in_kernel]
        if outside.size and outside.min() < gap:
            raise AmbiguousKernel(
                f"eigenvalue {outside.min():.3e} lies between kernel threshold {threshold} and gap {gap}"
            )
        if not in_kernel.any():
            continue
        kernel = canonical_orthonormal(evecs[:, in_kernel])
        # block-local multi-index -> full-space code
        local = np.array(np.unravel_index(keep, dims)).T
        offsets = np.array([block_cache[tj][0] for tj in jconf], dtype=object)
        full_labels = np.column_stack([np.asarray(offsets[k])[local[:, k]] for k in range(n)])
        codes = full_labels.astype(np.int64) @ radix
        order = np.argsort(codes)
        for col in range(kernel.shape[1]):
            columns.append((codes[order], kernel[order, col]))
            labels.append(jconf)
    rows = np.concatenate([c for c, _ in columns]) if columns else np.zeros(0, np.int64)
    vals = np.concatenate([v for _, v in columns]) if columns else np.zeros(0, complex)
    cols = np.concatenate([np.full(len(c), k) for k, (c, _) in enumerate(columns)]) if columns else np.zeros(0, np.int64)
    mask = np.abs(vals) > 1e-14
    iso = sp.csc_matrix((vals[mask], (rows[mask], cols[mask])), shape=(full.dim, len(columns)), dtype=complex)
    return PhysicalBasis(full, charges, isometry=iso, block_labels=labels)


def _kron_diag(dims, k, diag):
    left = int(np.prod(dims[:k]))
    right = int(np.prod(dims[k + 1:]))
    return np.tile(np.repeat(diag, right), left)


def build_physical_basis(lattice: Lattice, model: GaugeModel, charges=None, full: FullSpace | None = None,
                         dense_budget: int = DEFAULT_DENSE_BUDGET,
                         sparse_budget: int = DEFAULT_SPARSE_BUDGET) -> PhysicalBasis:
    if isinstance(model, U1):
        return build_physical_basis_u1(lattice, model, charges, full=full, sparse_budget=sparse_budget)
    return build_physical_basis_su2(lattice, model, charges, full=full, dense_budget=dense_budget,
                                    sparse_budget=sparse_budget)


def su2_singlet_count(lattice: Lattice, two_j_max: int) -> int:
    """Physical dimension by irrep bookkeeping: sum over j-configs of the
    product over sites of singlet multiplicities in the 4-fold tensor product."""
    total = 0
    for jconf in itertools.product(range(two_j_max + 1), repeat=lattice.n_links):
        prod = 1
        for site in range(lattice.n_sites):
            outgoing, incoming = lattice.links_at_site(site)
            prod *= singlet_multiplicity([jconf[l] for l in outgoing + incoming])
            if prod == 0:
                break
        total += prod
    return total


def singlet_multiplicity(two_js: Iterable[int]) -> int:
    """Number of singlets in the tensor product of the given spins (twice-spin labels)."""
    mult = {0: 1}
    for tj in two_js:
        nxt: dict[int, int] = {}
        for tJ, c in mult.items():
            for tK in range(abs(tJ - tj), tJ + tj + 1, 2):
                nxt[tK] = nxt.get(tK, 0) + c
        mult = nxt
    return mult.get(0, 0)
