"""Spin matrices, spin graphs, and sparse Hamiltonian assembly.

Conventions
-----------
Local bases are eigenbases of the on-site S^3 operator, ordered by
descending magnetic quantum number m = s, s-1, ..., -s.  Many-site bases
are site-major tensor products following the graph's site list: the
first site is the most significant "digit" of the basis index.
Operators are stored as canonical (sorted, duplicate-free) complex CSR
matrices wrapped in :class:`SparseHermitian`.

Sign conventions per model kind:

* ``xxx``    H = -sum_e J_e S_x.S_y  (ferromagnetic for J_e > 0)
* ``xxz``    edge term -J_e [ (1/Delta)(S^1 S^1 + S^2 S^2) + S^3 S^3 ];
  all J_e = 1 gives the plain anisotropic nearest-neighbour chain
* ``aklt``   edge term 1/3 + (1/2) S.S + (1/6)(S.S)^2, i.e. the
  projection onto total spin 2 of the edge pair; couplings are ignored
  so that the term stays an orthogonal projection
* ``custom`` H = sum_e J_e h_e with h_e a supplied Hermitian two-site term
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

HERMITICITY_TOL = 1e-12
DIMENSION_CAP = 200_000

MODEL_KINDS = ("xxx", "xxz", "aklt", "custom")


class DimensionCapError(ValueError):
    """Raised when a requested tensor-product space exceeds the dimension cap."""


@dataclass(frozen=True)
class SpinValue:
    """A spin magnitude s >= 1/2, stored exactly as the integer 2s."""

    twice_s: int

    def __post_init__(self):
        if not isinstance(self.twice_s, (int, np.integer)):
            raise ValueError("twice_s must be an integer (got %r)" % (self.twice_s,))
        if self.twice_s < 1:
            raise ValueError("twice_s must be >= 1 (got %d)" % self.twice_s)
        object.__setattr__(self, "twice_s", int(self.twice_s))

    @property
    def s(self) -> float:
        return self.twice_s / 2.0

    @property
    def dim(self) -> int:
        return self.twice_s + 1


def spin_matrices(s):
    """Return the spin matrices (S^1, S^2, S^3) for spin s.

    Parameters
    ----------
    s : SpinValue or int
        Spin magnitude; an integer is interpreted as 2s.

    Returns
    -------
    tuple of three dense complex (2s+1, 2s+1) arrays in the S^3
    eigenbasis with m descending.  They satisfy [S^1, S^2] = i S^3 and
    cyclic permutations, and S.S = s(s+1) * identity.
    """
    if isinstance(s, (int, np.integer)):
        s = SpinValue(int(s))
    m = np.arange(s.twice_s, -s.twice_s - 1, -2) / 2.0  # s, s-1, ..., -s
    n = s.dim
    ss1 = s.s * (s.s + 1.0)
    # <m+1| S^+ |m> = sqrt(s(s+1) - m(m+1)); with m descending this sits
    # on the first superdiagonal.
    raise_amp = np.sqrt(ss1 - m[1:] * m[:-1])
    sp_mat = np.zeros((n, n), dtype=complex)
    sp_mat[np.arange(n - 1), np.arange(1, n)] = raise_amp
    sm_mat = sp_mat.conj().T
    s1 = (sp_mat + sm_mat) / 2.0
    s2 = (sp_mat - sm_mat) / 2.0j
    s3 = np.diag(m).astype(complex)
    return s1, s2, s3


def _check_metric(d, n):
    d = np.asarray(d, dtype=float)
    if d.shape != (n, n):
        raise ValueError("metric must be a %dx%d table" % (n, n))
    if not np.allclose(d, d.T, atol=0.0):
        raise ValueError("metric must be symmetric")
    if np.any(np.diag(d) != 0.0):
        raise ValueError("metric must vanish on the diagonal")
    if np.any(d < 0.0):
        raise ValueError("metric must be nonnegative")
    for k in range(n):
        if np.any(d > d[:, k, None] + d[None, k, :] + 1e-12):
            raise ValueError("metric violates the triangle inequality")
    return d


@dataclass(frozen=True, eq=False)
class SpinGraph:
    """A finite set of spins on a graph with real edge couplings.

    sites   : tuple of (site_id, SpinValue) in basis order
    edges   : tuple of (x, y, J) with site ids x != y, each unordered
              pair appearing at most once, J real and finite
    metric  : optional explicit distance table (|V| x |V|); defaults to
              the graph distance (least number of edges)
    """

    sites: tuple
    edges: tuple
    metric: np.ndarray | None = None

    def __post_init__(self):
        sites = tuple((sid, sv if isinstance(sv, SpinValue) else SpinValue(sv))
                      for sid, sv in self.sites)
        object.__setattr__(self, "sites", sites)
        ids = [sid for sid, _ in sites]
        if len(set(ids)) != len(ids):
            raise ValueError("site ids must be unique")
        index = {sid: i for i, (sid, _) in enumerate(sites)}
        object.__setattr__(self, "_index", index)
        seen = set()
        edges = []
        for x, y, j in self.edges:
            if x not in index or y not in index:
                raise ValueError("edge (%r, %r) references unknown site" % (x, y))
            if x == y:
                raise ValueError("self-loop on site %r" % (x,))
            if isinstance(j, complex) and j.imag != 0:
                raise ValueError("couplings must be real")
            j = float(j)
            if not np.isfinite(j):
                raise ValueError("coupling on edge (%r, %r) is not finite" % (x, y))
            key = frozenset((x, y))
            if key in seen:
                raise ValueError("edge {%r, %r} listed more than once" % (x, y))
            seen.add(key)
            edges.append((x, y, j))
        object.__setattr__(self, "edges", tuple(edges))
        if self.metric is not None:
            object.__setattr__(self, "metric", _check_metric(self.metric, len(sites)))
        object.__setattr__(self, "_dist", None)

    # -- basic accessors -------------------------------------------------

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def site_ids(self):
        return tuple(sid for sid, _ in self.sites)

    @property
    def spins(self):
        return tuple(sv for _, sv in self.sites)

    @property
    def local_dims(self):
        return tuple(sv.dim for _, sv in self.sites)

    def index(self, site_id) -> int:
        return self._index[site_id]

    def spin(self, site_id) -> SpinValue:
        return self.sites[self.index(site_id)][1]

    @property
    def dim(self) -> int:
        d = 1
        for n in self.local_dims:
            d *= n
        return d

    @property
    def basis(self) -> "TensorBasis":
        return TensorBasis(self.site_ids, self.local_dims)

    # -- metric ----------------------------------------------------------

    def distance_matrix(self) -> np.ndarray:
        """Pairwise distances; graph distance unless an explicit metric was given."""
        if self.metric is not None:
            return self.metric
        if self._dist is not None:
            return self._dist
        n = self.n_sites
        adj = [[] for _ in range(n)]
        for x, y, _ in self.edges:
            i, j = self.index(x), self.index(y)
            adj[i].append(j)
            adj[j].append(i)
        d = np.full((n, n), np.inf)
        for start in range(n):
            d[start, start] = 0.0
            queue = [start]
            while queue:
                nxt = []
                for u in queue:
                    for v in adj[u]:
                        if d[start, v] == np.inf:
                            d[start, v] = d[start, u] + 1.0
                            nxt.append(v)
                queue = nxt
        object.__setattr__(self, "_dist", d)
        return d

    def distance(self, x, y) -> float:
        return self.distance_matrix()[self.index(x), self.index(y)]

    # -- constructors ----------------------------------------------------

    @staticmethod
    def chain(length, twice_s=1, coupling=1.0):
        """Open chain with sites 0..length-1 and uniform (or per-edge) couplings."""
        if length < 1:
            raise ValueError("length must be >= 1")
        js = _edge_couplings(coupling, length - 1)
        sites = tuple((i, SpinValue(twice_s)) for i in range(length))
        edges = tuple((i, i + 1, js[i]) for i in range(length - 1))
        return SpinGraph(sites, edges)

    @staticmethod
    def ring(length, twice_s=1, coupling=1.0):
        """Periodic chain with sites 0..length-1."""
        if length < 3:
            raise ValueError("a ring needs at least 3 sites")
        js = _edge_couplings(coupling, length)
        sites = tuple((i, SpinValue(twice_s)) for i in range(length))
        edges = tuple((i, (i + 1) % length, js[i]) for i in range(length))
        return SpinGraph(sites, edges)

    @staticmethod
    def complete(n, twice_s=1, coupling=1.0):
        """Complete graph on n sites with a uniform coupling."""
        sites = tuple((i, SpinValue(twice_s)) for i in range(n))
        edges = tuple((i, j, float(coupling)) for i in range(n) for j in range(i + 1, n))
        return SpinGraph(sites, edges)


def _edge_couplings(coupling, n_edges):
    if np.isscalar(coupling):
        return [float(coupling)] * n_edges
    js = [float(j) for j in coupling]
    if len(js) != n_edges:
        raise ValueError("expected %d couplings, got %d" % (n_edges, len(js)))
    return js


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Which two-site term to place on each edge of a graph.

    kind is one of 'xxx', 'xxz', 'aklt', 'custom'.  XXZ needs a nonzero
    anisotropy delta.  Custom models carry either one shared Hermitian
    two-site term or a per-edge mapping {(x, y): term}.
    """

    kind: str
    delta: float | None = None
    edge_terms: object = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError("unknown model kind %r (expected one of %s)"
                             % (self.kind, ", ".join(MODEL_KINDS)))
        if self.kind == "xxz":
            if self.delta is None or self.delta == 0:
                raise ValueError("xxz requires a nonzero anisotropy delta")
        elif self.delta is not None:
            raise ValueError("delta is only meaningful for xxz")
        if self.kind == "custom":
            if self.edge_terms is None:
                raise ValueError("custom model requires edge_terms")
            terms = self.edge_terms
            if isinstance(terms, dict):
                terms = {k: _check_hermitian_term(v) for k, v in terms.items()}
            else:
                terms = _check_hermitian_term(terms)
            object.__setattr__(self, "edge_terms", terms)
        elif self.edge_terms is not None:
            raise ValueError("edge_terms is only meaningful for custom models")

    @staticmethod
    def xxx():
        return ModelSpec("xxx")

    @staticmethod
    def xxz(delta):
        return ModelSpec("xxz", delta=float(delta))

    @staticmethod
    def aklt():
        return ModelSpec("aklt")

    @staticmethod
    def custom(edge_terms):
        return ModelSpec("custom", edge_terms=edge_terms)


def _check_hermitian_term(term):
    term = np.asarray(term, dtype=complex)
    if term.ndim != 2 or term.shape[0] != term.shape[1]:
        raise ValueError("two-site term must be a square matrix")
    if np.max(np.abs(term - term.conj().T)) > HERMITICITY_TOL:
        raise ValueError("two-site term is not Hermitian to %.0e" % HERMITICITY_TOL)
    return term


@dataclass(frozen=True)
class TensorBasis:
    """Site-major tensor-product basis descriptor."""

    site_ids: tuple
    local_dims: tuple

    def __post_init__(self):
        object.__setattr__(self, "site_ids", tuple(self.site_ids))
        object.__setattr__(self, "local_dims", tuple(int(n) for n in self.local_dims))
        if len(self.site_ids) != len(self.local_dims):
            raise ValueError("site_ids and local_dims must have equal length")

    @property
    def dim(self) -> int:
        d = 1
        for n in self.local_dims:
            d *= n
        return d

    @property
    def n_sites(self) -> int:
        return len(self.site_ids)

    def index(self, site_id) -> int:
        return self.site_ids.index(site_id)

    def digits(self, index) -> tuple:
        """Local basis indices (most significant site first) of a basis index."""
        out = []
        for n in reversed(self.local_dims):
            out.append(index % n)
            index //= n
        return tuple(reversed(out))

    def index_of(self, digits) -> int:
        idx = 0
        for d, n in zip(digits, self.local_dims):
            if not 0 <= d < n:
                raise ValueError("digit out of range")
            idx = idx * n + d
        return idx


class SparseHermitian:
    """A Hermitian operator on a tensor-product space, stored as canonical CSR."""

    def __init__(self, matrix, basis: TensorBasis, tol=HERMITICITY_TOL):
        matrix = sp.csr_matrix(matrix, dtype=complex)
        matrix.sum_duplicates()
        matrix.sort_indices()
        matrix.eliminate_zeros()
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError("operator must be square")
        if matrix.shape[0] != basis.dim:
            raise ValueError("operator dimension %d does not match basis dimension %d"
                             % (matrix.shape[0], basis.dim))
        diff = (matrix - matrix.conj().T).tocoo()
        herm_defect = np.max(np.abs(diff.data)) if diff.nnz else 0.0
        if herm_defect > tol:
            raise ValueError("operator is not Hermitian: max entry defect %.3e" % herm_defect)
        self.matrix = matrix
        self.basis = basis

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def triplets(self):
        """Canonical coordinate triplets (row, col, value), row-major sorted."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def restrict(self, indices) -> np.ndarray:
        """Dense block of the operator on the given basis indices."""
        indices = np.asarray(indices, dtype=int)
        sub = self.matrix[indices][:, indices]
        return sub.toarray()

    def __add__(self, other):
        if isinstance(other, SparseHermitian):
            if other.basis != self.basis:
                raise ValueError("operators live on different bases")
            other = other.matrix
        return SparseHermitian(self.matrix + other, self.basis)


# ---------------------------------------------------------------------------
# Embedding and assembly
# ---------------------------------------------------------------------------


def _identity(n):
    return sp.identity(n, dtype=complex, format="csr")


def embed_site_operator(basis: TensorBasis, site, op) -> sp.csr_matrix:
    """Embed a single-site operator into the full tensor-product space."""
    i = basis.index(site)
    dims = basis.local_dims
    op = sp.csr_matrix(np.asarray(op, dtype=complex))
    if op.shape != (dims[i], dims[i]):
        raise ValueError("operator shape %s does not match local dimension %d"
                         % (op.shape, dims[i]))
    left = int(np.prod(dims[:i], dtype=np.int64)) if i else 1
    right = int(np.prod(dims[i + 1:], dtype=np.int64)) if i + 1 < len(dims) else 1
    return sp.kron(sp.kron(_identity(left), op), _identity(right)).tocsr()


def embed_two_site(basis: TensorBasis, site_x, site_y, term) -> sp.csr_matrix:
    """Embed a two-site operator given on C^{n_x} (x) C^{n_y} into the full space."""
    i, j = basis.index(site_x), basis.index(site_y)
    if i == j:
        raise ValueError("two-site terms need two distinct sites")
    dims = basis.local_dims
    nx, ny = dims[i], dims[j]
    term = np.asarray(term, dtype=complex)
    if term.shape != (nx * ny, nx * ny):
        raise ValueError("term shape %s does not match local dimensions (%d, %d)"
                         % (term.shape, nx, ny))
    if i > j:
        term = term.reshape(nx, ny, nx, ny).transpose(1, 0, 3, 2).reshape(ny * nx, ny * nx)
        i, j, nx, ny = j, i, ny, nx
    left = int(np.prod(dims[:i], dtype=np.int64)) if i else 1
    mid = int(np.prod(dims[i + 1:j], dtype=np.int64)) if j > i + 1 else 1
    right = int(np.prod(dims[j + 1:], dtype=np.int64)) if j + 1 < len(dims) else 1
    if mid == 1:
        core = sp.csr_matrix(term)
        return sp.kron(sp.kron(_identity(left), core), _identity(right)).tocsr()
    # Non-adjacent pair: expand over matrix units of site x.
    t4 = term.reshape(nx, ny, nx, ny)
    total = None
    for a in range(nx):
        for c in range(nx):
            block = t4[a, :, c, :]
            if not np.any(block):
                continue
            unit = sp.csr_matrix(([1.0 + 0.0j], ([a], [c])), shape=(nx, nx))
            piece = sp.kron(unit, sp.kron(_identity(mid), sp.csr_matrix(block)))
            total = piece if total is None else total + piece
    if total is None:
        total = sp.csr_matrix((nx * mid * ny, nx * mid * ny), dtype=complex)
    return sp.kron(sp.kron(_identity(left), total), _identity(right)).tocsr()


def heisenberg_edge_term(spin_x: SpinValue, spin_y: SpinValue) -> np.ndarray:
    """S_x . S_y on C^{n_x} (x) C^{n_y}."""
    sx = spin_matrices(spin_x)
    sy = spin_matrices(spin_y)
    return sum(np.kron(sx[i], sy[i]) for i in range(3))


def aklt_edge_term() -> np.ndarray:
    """The spin-1 AKLT edge term 1/3 + (1/2) S.S + (1/6)(S.S)^2.

    Equals the orthogonal projection onto the five-dimensional total-spin-2
    subspace of two spin-1 sites: eigenvalue 0 with multiplicity 4 and
    eigenvalue 1 with multiplicity 5.
    """
    ss = heisenberg_edge_term(SpinValue(2), SpinValue(2))
    eye = np.eye(9, dtype=complex)
    return eye / 3.0 + ss / 2.0 + (ss @ ss) / 6.0


def _edge_term(model: ModelSpec, graph: SpinGraph, x, y, j) -> np.ndarray:
    spin_x, spin_y = graph.spin(x), graph.spin(y)
    if model.kind == "xxx":
        return -j * heisenberg_edge_term(spin_x, spin_y)
    if model.kind == "xxz":
        sx = spin_matrices(spin_x)
        sy = spin_matrices(spin_y)
        planar = np.kron(sx[0], sy[0]) + np.kron(sx[1], sy[1])
        return -j * (planar / model.delta + np.kron(sx[2], sy[2]))
    if model.kind == "aklt":
        if spin_x.twice_s != 2 or spin_y.twice_s != 2:
            raise ValueError("the AKLT model requires spin 1 on every site")
        return aklt_edge_term()
    terms = model.edge_terms
    if isinstance(terms, dict):
        if (x, y) in terms:
            term = terms[(x, y)]
        elif (y, x) in terms:
            nx, ny = graph.spin(y).dim, graph.spin(x).dim
            term = np.asarray(terms[(y, x)]).reshape(nx, ny, nx, ny)
            term = term.transpose(1, 0, 3, 2).reshape(ny * nx, ny * nx)
        else:
            raise ValueError("no custom term supplied for edge (%r, %r)" % (x, y))
    else:
        term = terms
    term = np.asarray(term, dtype=complex)
    expected = spin_x.dim * spin_y.dim
    if term.shape != (expected, expected):
        raise ValueError("custom term for edge (%r, %r) has shape %s, expected (%d, %d)"
                         % (x, y, term.shape, expected, expected))
    return j * term


def build_hamiltonian(graph: SpinGraph, model: ModelSpec, cap=DIMENSION_CAP) -> SparseHermitian:
    """Assemble the Hamiltonian of a model on a spin graph.

    Each edge contributes its two-site term embedded with identities on
    the remaining sites.  Raises :class:`DimensionCapError` when the
    total Hilbert-space dimension exceeds ``cap``.
    """
    dim = graph.dim
    if dim > cap:
        raise DimensionCapError("total dimension %d exceeds the cap %d" % (dim, cap))
    basis = graph.basis
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for x, y, j in graph.edges:
        term = _edge_term(model, graph, x, y, j)
        total = total + embed_two_site(basis, x, y, term)
    return SparseHermitian(total, basis)


# ---------------------------------------------------------------------------
# Symmetry generators and sectors
# ---------------------------------------------------------------------------


def total_spin_operators(graph: SpinGraph):
    """Total-spin components (S^1_V, S^2_V, S^3_V) as sparse matrices."""
    basis = graph.basis
    totals = []
    for comp in range(3):
        acc = sp.csr_matrix((graph.dim, graph.dim), dtype=complex)
        for sid, sv in graph.sites:
            acc = acc + embed_site_operator(basis, sid, spin_matrices(sv)[comp])
        totals.append(acc)
    return tuple(totals)


def casimir(graph: SpinGraph) -> SparseHermitian:
    """The total-spin Casimir C = S_V . S_V with eigenvalues S(S+1)."""
    s1, s2, s3 = total_spin_operators(graph)
    return SparseHermitian(s1 @ s1 + s2 @ s2 + s3 @ s3, graph.basis)


def _twice_m(n):
    return np.arange(n - 1, -n, -2, dtype=np.int64)


def twice_magnetizations(basis: TensorBasis) -> np.ndarray:
    """2M for every basis index, computed with exact integer arithmetic."""
    totals = np.zeros(1, dtype=np.int64)
    for n in basis.local_dims:
        totals = (totals[:, None] + _twice_m(n)[None, :]).ravel()
    return totals


def magnetization_sectors(obj) -> dict:
    """Basis indices grouped by eigenvalue M of S^3_total.

    Accepts a :class:`SpinGraph`, :class:`TensorBasis`, or
    :class:`SparseHermitian`.  Returns {M: index array}, M descending,
    each index array ascending.
    """
    if isinstance(obj, SpinGraph):
        basis = obj.basis
    elif isinstance(obj, SparseHermitian):
        basis = obj.basis
    elif isinstance(obj, TensorBasis):
        basis = obj
    else:
        raise TypeError("expected a SpinGraph, TensorBasis, or SparseHermitian")
    totals = twice_magnetizations(basis)
    sectors = {}
    for twice_m_val in np.unique(totals)[::-1]:
        sectors[twice_m_val / 2.0] = np.nonzero(totals == twice_m_val)[0]
    return sectors


# ---------------------------------------------------------------------------
# Interactions and their weighted norm
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Interaction:
    """A finite family of local terms: {site subset X: Hermitian Phi(X)}.

    Keys are tuples of site ids ordered like the ambient graph's site
    list; the operator acts on the tensor product of those sites in that
    order.
    """

    terms: dict

    def __post_init__(self):
        checked = {}
        for support, op in self.terms.items():
            support = tuple(support)
            if len(set(support)) != len(support):
                raise ValueError("support %r repeats a site" % (support,))
            op = np.asarray(op, dtype=complex)
            if op.ndim != 2 or op.shape[0] != op.shape[1]:
                raise ValueError("term on %r is not a square matrix" % (support,))
            if not np.all(np.isfinite(op)):
                raise ValueError("term on %r has non-finite entries" % (support,))
            if np.max(np.abs(op - op.conj().T)) > HERMITICITY_TOL:
                raise ValueError("term on %r is not Hermitian" % (support,))
            checked[support] = op
        object.__setattr__(self, "terms", checked)


def interaction_from_model(graph: SpinGraph, model: ModelSpec) -> Interaction:
    """The interaction whose sum build_hamiltonian assembles: one term per edge."""
    terms = {}
    for x, y, j in graph.edges:
        ix, iy = graph.index(x), graph.index(y)
        term = _edge_term(model, graph, x, y, j)
        if ix > iy:
            nx, ny = graph.spin(x).dim, graph.spin(y).dim
            term = term.reshape(nx, ny, nx, ny).transpose(1, 0, 3, 2).reshape(ny * nx, ny * nx)
            terms[(y, x)] = term
        else:
            terms[(x, y)] = term
    return Interaction(terms)


def interaction_norm(graph: SpinGraph, phi: Interaction, lam: float, n_param=None) -> float:
    """Weighted interaction norm sup_x sum_{X ni x} |X| ||Phi(X)|| N^{2|X|} e^{lam D(X)}.

    D(X) is the diameter of the support X in the graph metric and ||.||
    the operator norm.  ``n_param`` defaults to the largest local
    dimension and must not be smaller than it.
    """
    if lam <= 0:
        raise ValueError("the decay rate lam must be positive")
    if not phi.terms:
        return 0.0
    max_dim = max(graph.local_dims)
    if n_param is None:
        n_param = max_dim
    if n_param < max_dim:
        raise ValueError("N must be at least the largest local dimension %d" % max_dim)
    dist = graph.distance_matrix()
    per_site = {sid: 0.0 for sid in graph.site_ids}
    for support, op in phi.terms.items():
        for sid in support:
            if sid not in per_site:
                raise ValueError("support %r is not contained in the graph" % (support,))
        size = len(support)
        opnorm = np.linalg.norm(op, ord=2)
        idx = [graph.index(sid) for sid in support]
        diam = 0.0
        for a in range(size):
            for b in range(a + 1, size):
                diam = max(diam, dist[idx[a], idx[b]])
        weight = size * opnorm * float(n_param) ** (2 * size) * np.exp(lam * diam)
        for sid in support:
            per_site[sid] += weight
    return max(per_site.values())


# ---------------------------------------------------------------------------
# External interfaces: JSON models, CSV operators
# ---------------------------------------------------------------------------


def _reject_unknown(doc, allowed, where):
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ValueError("unknown key(s) %s in %s" % (sorted(unknown), where))


def model_from_json(doc):
    """Build (SpinGraph, ModelSpec) from a JSON document or path.

    Schema: {"sites": [{"id", "twice_s"}], "edges": [{"x", "y", "J"}],
    "model": {"kind", "delta"?}}.  Unknown keys are rejected.
    """
    if isinstance(doc, str):
        with open(doc) as fh:
            doc = json.load(fh)
    _reject_unknown(doc, ("sites", "edges", "model"), "model document")
    for key in ("sites", "edges", "model"):
        if key not in doc:
            raise ValueError("model document is missing %r" % key)
    sites = []
    for entry in doc["sites"]:
        _reject_unknown(entry, ("id", "twice_s"), "site entry")
        sites.append((entry["id"], SpinValue(entry["twice_s"])))
    edges = []
    for entry in doc["edges"]:
        _reject_unknown(entry, ("x", "y", "J"), "edge entry")
        edges.append((entry["x"], entry["y"], entry["J"]))
    mdoc = doc["model"]
    _reject_unknown(mdoc, ("kind", "delta"), "model block")
    kind = mdoc.get("kind")
    if kind == "custom":
        raise ValueError("custom models cannot be specified in JSON; build them in code")
    if kind == "xxz":
        model = ModelSpec.xxz(mdoc.get("delta"))
    else:
        model = ModelSpec(kind)
    return SpinGraph(tuple(sites), tuple(edges)), model


def export_operator_csv(op: SparseHermitian, path):
    """Write an operator as coordinate triplets (row, col, re, im).

    The header line records the dimension and the site-major basis
    ordering; rows are canonical (row-major sorted).
    """
    rows, cols, vals = op.triplets()
    ids = "|".join(str(s) for s in op.basis.site_ids)
    dims = "|".join(str(n) for n in op.basis.local_dims)
    with open(path, "w") as fh:
        fh.write("# dim=%d sites=%s local_dims=%s\n" % (op.dim, ids, dims))
        fh.write("row,col,re,im\n")
        for r, c, v in zip(rows, cols, vals):
            fh.write("%d,%d,%s,%s\n" % (r, c, repr(float(v.real)), repr(float(v.imag))))


def import_operator_csv(path) -> SparseHermitian:
    """Read an operator written by :func:`export_operator_csv`."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# dim="):
            raise ValueError("missing operator CSV header")
        fields = dict(part.split("=", 1) for part in header[2:].split(" "))
        dim = int(fields["dim"])
        site_ids = tuple(fields["sites"].split("|"))
        local_dims = tuple(int(n) for n in fields["local_dims"].split("|"))
        fh.readline()  # column names
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, re_part, im_part = line.strip().split(",")
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(re_part) + 1j * float(im_part))
    basis = TensorBasis(site_ids, local_dims)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim))
    return SparseHermitian(mat, basis)
