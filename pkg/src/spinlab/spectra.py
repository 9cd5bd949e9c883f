"""Symmetry-resolved spectra, total-spin level tables, and ordering checks.

The central object is the spin-level table E(H, S): the lowest energy of
H restricted to the total-spin-S sector.  For SU(2)-invariant models it
is obtained by simultaneously diagonalizing H and the Casimir C inside
each magnetization sector; each spin-S multiplet is counted exactly once
through the sector M = S.  Ferromagnetic ordering of energy levels holds
when E(H, S) strictly decreases as S grows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .spinops import (
    ModelSpec,
    SparseHermitian,
    SpinGraph,
    build_hamiltonian,
    casimir,
    embed_site_operator,
    embed_two_site,
    heisenberg_edge_term,
    magnetization_sectors,
    total_spin_operators,
)

DENSE_CAP = 4096
RESIDUAL_REL_TOL = 1e-9
CASIMIR_ROUND_TOL = 1e-6
COMMUTATOR_TOL = 1e-10
FOEL_INCONCLUSIVE = 1e-9


class NonCommutingError(ValueError):
    """Raised when a requested symmetry decomposition does not apply."""


@dataclass(eq=False)
class SpectrumResult:
    """Eigenvalues (ascending) and optional eigenvectors of a sector block."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    sector: object
    residual_max: float

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


def _commutator_defect(a, b):
    d = (a @ b - b @ a).tocoo()
    return float(np.max(np.abs(d.data))) if d.nnz else 0.0


def _sector_indices(h: SparseHermitian, sector):
    sectors = magnetization_sectors(h)
    if sector not in sectors:
        raise ValueError("no magnetization sector M = %r (available: %s)"
                         % (sector, sorted(sectors)))
    return sectors[sector]


def eigen_spectrum(h: SparseHermitian, sector=None, k=None,
                   dense_cap=DENSE_CAP, want_vectors=True) -> SpectrumResult:
    """Eigenvalues of H, optionally restricted to a magnetization sector.

    Dense diagonalization up to ``dense_cap``; pass ``k`` for the k
    lowest eigenpairs via a Lanczos solve on larger blocks.  Every
    returned pair is residual-checked to 1e-9 * ||H||.
    """
    if not isinstance(h, SparseHermitian):
        raise TypeError("eigen_spectrum expects a SparseHermitian")
    if sector is None:
        block = h.matrix
        label = "full"
    else:
        idx = _sector_indices(h, sector)
        block = h.matrix[idx][:, idx]
        label = sector
    dim = block.shape[0]
    if k is None:
        if dim > dense_cap:
            raise ValueError("block dimension %d exceeds the dense cap %d; "
                             "request k lowest eigenpairs instead" % (dim, dense_cap))
        dense = block.toarray()
        if want_vectors:
            evals, evecs = np.linalg.eigh(dense)
        else:
            evals, evecs = np.linalg.eigvalsh(dense), None
        scale = max(np.max(np.abs(evals)), 1e-300) if len(evals) else 1.0
    else:
        k = int(k)
        if k >= dim:
            return eigen_spectrum(h, sector=sector, k=None, dense_cap=max(dense_cap, dim),
                                  want_vectors=want_vectors)
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        try:
            evals, evecs = spla.eigsh(block, k=k, which="SA", v0=v0, maxiter=max(2000, 40 * dim))
        except spla.ArpackNoConvergence as exc:
            raise RuntimeError("Lanczos did not converge for sector %r: %s" % (label, exc))
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        if not want_vectors:
            scale = float(spla.norm(block, np.inf))
            resid = float(np.max([np.linalg.norm(block @ v - e * v)
                                  for e, v in zip(evals, evecs.T)]))
            _check_residual(resid, scale)
            return SpectrumResult(evals, None, label, resid)
        scale = float(spla.norm(block, np.inf))
    resid = 0.0
    if evecs is not None and dim:
        resid = float(np.max([np.linalg.norm(block @ v - e * v)
                              for e, v in zip(evals, evecs.T)]))
        _check_residual(resid, scale)
    return SpectrumResult(np.asarray(evals, dtype=float), evecs, label, resid)


def _check_residual(resid, scale):
    if scale > 0 and resid > RESIDUAL_REL_TOL * scale:
        raise RuntimeError("eigenpair residual %.3e exceeds %.1e * ||H|| = %.3e"
                           % (resid, RESIDUAL_REL_TOL, RESIDUAL_REL_TOL * scale))


# ---------------------------------------------------------------------------
# Spin-level tables
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SpinLevelTable:
    """E(H, S) together with multiplet counts, for S = s_min ... s_max."""

    energies: dict
    multiplets: dict
    ground_degeneracy: dict
    s_min: float
    s_max: float
    dim: int
    method: str

    def energy(self, s) -> float:
        return self.energies[float(s)]

    @property
    def spins_descending(self):
        return sorted(self.energies, reverse=True)


def _total_spin_range(graph: SpinGraph):
    twice_total = sum(sv.twice_s for _, sv in graph.sites)
    s_max = twice_total / 2.0
    parity = twice_total % 2
    s_min_parity = parity / 2.0
    return s_min_parity, s_max


def spin_level_table(h: SparseHermitian, graph: SpinGraph, method="casimir") -> SpinLevelTable:
    """Lowest energy per total-spin sector for an SU(2)-invariant H.

    method='casimir' simultaneously diagonalizes H and C = S_V.S_V in
    each magnetization sector M = S; it refuses Hamiltonians that do not
    commute with C.  method='highest_weight' subtracts the sector
    spectrum at M = S+1 from the one at M = S and works from eigenvalue
    multiplicities alone.
    """
    _, _, s3 = total_spin_operators(graph)
    if _commutator_defect(h.matrix, s3) > COMMUTATOR_TOL:
        raise NonCommutingError("H does not commute with S^3_total")
    if method == "casimir":
        return _table_via_casimir(h, graph)
    if method == "highest_weight":
        return _table_via_highest_weight(h, graph)
    raise ValueError("unknown method %r" % (method,))


def _degeneracy(evals, tol):
    return int(np.sum(evals <= evals[0] + tol))


def _table_via_casimir(h, graph):
    cas = casimir(graph)
    defect = _commutator_defect(h.matrix, cas.matrix)
    if defect > COMMUTATOR_TOL:
        raise NonCommutingError(
            "H does not commute with the Casimir (defect %.3e); the spin-level "
            "table is undefined -- for S^3-conserving models fall back to "
            "method='highest_weight' sector counting" % defect)
    sectors = magnetization_sectors(graph)
    s_parity, s_max = _total_spin_range(graph)
    energies, multiplets, ground_deg = {}, {}, {}
    spin_grid = np.arange(s_parity, s_max + 0.5, 1.0)
    width_tol = None
    for s_val in spin_grid:
        idx = sectors[s_val]
        hm = h.restrict(idx)
        cm = cas.restrict(idx)
        c_evals, c_vecs = np.linalg.eigh(cm)
        cand = spin_grid[spin_grid >= s_val - 0.25]
        cand_eigs = cand * (cand + 1.0)
        assign = cand[np.argmin(np.abs(c_evals[:, None] - cand_eigs[None, :]), axis=1)]
        defects = np.min(np.abs(c_evals[:, None] - cand_eigs[None, :]), axis=1)
        if np.max(defects, initial=0.0) > CASIMIR_ROUND_TOL:
            raise NonCommutingError("Casimir eigenvalue %.8f is not close to any S(S+1)"
                                    % c_evals[int(np.argmax(defects))])
        sel = np.isclose(assign, s_val)
        count = int(np.sum(sel))
        if count == 0:
            continue
        basis_s = c_vecs[:, sel]
        h_block = basis_s.conj().T @ hm @ basis_s
        block_evals = np.linalg.eigvalsh((h_block + h_block.conj().T) / 2.0)
        if width_tol is None:
            full_width = _spectral_width(h)
            width_tol = max(1e-12, 1e-9 * full_width)
        energies[float(s_val)] = float(block_evals[0])
        multiplets[float(s_val)] = count
        ground_deg[float(s_val)] = _degeneracy(block_evals, width_tol)
    table = SpinLevelTable(energies, multiplets, ground_deg,
                           min(energies), max(energies), graph.dim, "casimir")
    _check_completeness(table)
    return table


def _spectral_width(h):
    # cheap upper bound on the spectral width, used for degeneracy tolerances
    bound = spla.norm(h.matrix, np.inf)
    return max(float(bound), 1e-300)


def _table_via_highest_weight(h, graph):
    sectors = magnetization_sectors(graph)
    s_parity, s_max = _total_spin_range(graph)
    spin_grid = np.arange(s_parity, s_max + 0.5, 1.0)
    width_tol = max(1e-12, 1e-9 * _spectral_width(h))
    spectra = {}
    for s_val in spin_grid:
        spectra[float(s_val)] = np.sort(np.linalg.eigvalsh(h.restrict(sectors[s_val])))
    energies, multiplets, ground_deg = {}, {}, {}
    for s_val in spin_grid:
        here = list(spectra[float(s_val)])
        above = spectra.get(float(s_val + 1.0))
        if above is not None:
            for e in above:
                # remove the copy of each higher-spin multiplet
                pos = int(np.argmin(np.abs(np.asarray(here) - e))) if here else None
                if pos is None or abs(here[pos] - e) > max(10 * width_tol, 1e-8):
                    raise NonCommutingError(
                        "sector spectra at M = %s and %s do not nest; H is not "
                        "SU(2) invariant" % (s_val, s_val + 1.0))
                here.pop(pos)
        if not here:
            continue
        arr = np.asarray(here)
        energies[float(s_val)] = float(arr[0])
        multiplets[float(s_val)] = len(here)
        ground_deg[float(s_val)] = _degeneracy(np.sort(arr), width_tol)
    table = SpinLevelTable(energies, multiplets, ground_deg,
                           min(energies), max(energies), graph.dim, "highest_weight")
    _check_completeness(table)
    return table


def _check_completeness(table: SpinLevelTable):
    total = 0
    for s_val, count in table.multiplets.items():
        total += int(round(2 * s_val + 1)) * count
    if total != table.dim:
        raise RuntimeError("spin-level table is incomplete: multiplets cover %d of %d states"
                           % (total, table.dim))


# ---------------------------------------------------------------------------
# Ordering checks
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class FoelReport:
    """Margins E(H, S-1) - E(H, S) for descending S, and the overall verdict."""

    table: SpinLevelTable
    margins: list          # [(s_high, s_low, margin)]
    ordered: bool
    inconclusive: list     # pairs whose margin sits inside [0, 1e-9]


def foel_check(table: SpinLevelTable) -> FoelReport:
    """Is the lowest energy strictly decreasing in total spin S?"""
    spins = table.spins_descending
    margins = []
    inconclusive = []
    ordered = True
    for s_high, s_low in zip(spins[:-1], spins[1:]):
        margin = table.energies[s_low] - table.energies[s_high]
        margins.append((s_high, s_low, float(margin)))
        if 0.0 <= margin <= FOEL_INCONCLUSIVE:
            inconclusive.append((s_high, s_low))
        elif margin < 0.0:
            ordered = False
    return FoelReport(table, margins, ordered, inconclusive)


@dataclass(eq=False)
class LiebMattisReport:
    table: SpinLevelTable
    s_a: float
    s_b: float
    expected_ground_spin: float
    ground_spin: float
    ground_ok: bool
    ordering_ok: bool
    margins: list


def lieb_mattis_check(graph: SpinGraph, part_a, part_b) -> LiebMattisReport:
    """Check ground-state spin and level ordering for a bipartite antiferromagnet.

    The Hamiltonian is H = -H_V + H_A + H_B built from the given graph:
    edges crossing the (A, B) partition enter antiferromagnetically
    (+J S.S with J > 0), edges inside A or inside B ferromagnetically
    (-J S.S).  The ground state must carry total spin |S_A - S_B| and
    E(H, S) must increase with S above that value.
    """
    part_a, part_b = set(part_a), set(part_b)
    ids = set(graph.site_ids)
    if part_a & part_b:
        raise ValueError("partition blocks overlap")
    if part_a | part_b != ids:
        raise ValueError("partition must cover every site")
    terms = {}
    for x, y, j in graph.edges:
        if j <= 0:
            raise ValueError("couplings must be positive (edge (%r, %r) has J = %g)"
                             % (x, y, j))
        crossing = (x in part_a) != (y in part_a)
        sign = +1.0 if crossing else -1.0
        key = (x, y) if graph.index(x) < graph.index(y) else (y, x)
        terms[key] = sign * heisenberg_edge_term(graph.spin(key[0]), graph.spin(key[1]))
    h = build_hamiltonian(graph, ModelSpec.custom(terms))
    s_a = sum(graph.spin(x).s for x in part_a)
    s_b = sum(graph.spin(x).s for x in part_b)
    expected = abs(s_a - s_b)
    table = spin_level_table(h, graph)
    ground_spin = min(table.energies, key=table.energies.get)
    ground_ok = np.isclose(ground_spin, expected)
    margins = []
    ordering_ok = True
    spins = sorted(s for s in table.energies if s >= expected - 0.25)
    for s_low, s_high in zip(spins[:-1], spins[1:]):
        margin = table.energies[s_high] - table.energies[s_low]
        margins.append((s_low, s_high, float(margin)))
        if margin <= 0:
            ordering_ok = False
    return LiebMattisReport(table, s_a, s_b, expected, ground_spin,
                            bool(ground_ok), bool(ordering_ok), margins)


# ---------------------------------------------------------------------------
# Sector gaps and perturbed gap scans
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SectorGapResult:
    gap: float | None
    sector: float
    reference_energy: float
    sector_dim: int

    @property
    def defined(self) -> bool:
        return self.gap is not None


def sector_gap(h: SparseHermitian, sector=None, particles=None,
               dense_cap=DENSE_CAP) -> SectorGapResult:
    """Smallest positive excitation energy within one magnetization sector.

    The sector may be named by its magnetization M or, for spin-1/2
    systems, by a particle number n (M = n - |V|/2).  Energies are
    measured from the sector's own ground energy; a sector that is
    entirely ground returns an explicit "no gap defined" result.
    """
    if (sector is None) == (particles is None):
        raise ValueError("name the sector by magnetization M or particle count n")
    if particles is not None:
        if any(d != 2 for d in h.basis.local_dims):
            raise ValueError("particle-number sectors need spin 1/2 on every site")
        sector = particles - len(h.basis.local_dims) / 2.0
    res = eigen_spectrum(h, sector=sector, dense_cap=dense_cap, want_vectors=False)
    evals = res.eigenvalues
    ref = float(evals[0])
    width = max(float(evals[-1] - evals[0]), 1.0)
    tol = 1e-9 * width
    positive = evals[evals - ref > tol]
    gap = float(positive[0] - ref) if len(positive) else None
    return SectorGapResult(gap, float(sector), ref, len(evals))


@dataclass(eq=False)
class PerturbedGapScan:
    lambdas: np.ndarray
    gaps: np.ndarray
    band_dim: int
    band_widths: np.ndarray
    positive_interval: tuple

    def gap_at(self, lam) -> float:
        i = int(np.argmin(np.abs(self.lambdas - lam)))
        return float(self.gaps[i])


def perturbed_gap_scan(graph: SpinGraph, model: ModelSpec, local_term,
                       lambdas, dense_cap=DENSE_CAP) -> PerturbedGapScan:
    """Finite-volume gap of H_0 + lam * sum_x Phi_x along a coupling grid.

    The local term is translated over all windows of consecutive sites
    of a chain.  The reported gap is the distance between the band
    spanned by the unperturbed ground space (dimension fixed at lam = 0)
    and the rest of the spectrum, which stays continuous in lam even
    when the perturbation splits a degenerate ground space.
    """
    lambdas = np.asarray(sorted(float(v) for v in lambdas))
    if not np.any(np.isclose(lambdas, 0.0)):
        raise ValueError("the coupling grid must contain 0 to anchor the scan")
    h0 = build_hamiltonian(graph, model)
    if h0.dim > dense_cap:
        raise ValueError("dimension %d exceeds the dense cap" % h0.dim)
    local_term = np.asarray(local_term, dtype=complex)
    dims = graph.local_dims
    width = _window_width(local_term.shape[0], dims)
    pert = _translated_sum(graph, local_term, width)
    dense0 = h0.toarray()
    evals0 = np.linalg.eigvalsh(dense0)
    width_tol = max(1e-12, 1e-9 * max(abs(evals0[0]), abs(evals0[-1]), 1.0))
    band = int(np.sum(evals0 <= evals0[0] + width_tol))
    gaps, widths = [], []
    pert_dense = pert.toarray()
    for lam in lambdas:
        evals = evals0 if lam == 0.0 else np.linalg.eigvalsh(dense0 + lam * pert_dense)
        gaps.append(float(evals[band] - evals[band - 1]))
        widths.append(float(evals[band - 1] - evals[0]))
    gaps = np.asarray(gaps)
    zero_pos = int(np.argmin(np.abs(lambdas)))
    lo = zero_pos
    while lo - 1 >= 0 and gaps[lo - 1] > 0:
        lo -= 1
    hi = zero_pos
    while hi + 1 < len(gaps) and gaps[hi + 1] > 0:
        hi += 1
    interval = (float(lambdas[lo]), float(lambdas[hi]))
    return PerturbedGapScan(lambdas, gaps, band, np.asarray(widths), interval)


def _window_width(term_dim, dims):
    n0 = dims[0]
    if any(d != n0 for d in dims):
        raise ValueError("translated perturbations need a uniform local dimension")
    width = 1
    size = n0
    while size < term_dim:
        width += 1
        size *= n0
    if size != term_dim:
        raise ValueError("local term dimension %d is not a power of the local dimension %d"
                         % (term_dim, n0))
    return width


def _translated_sum(graph, local_term, width):
    basis = graph.basis
    n = graph.n_sites
    total = sparse.csr_matrix((graph.dim, graph.dim), dtype=complex)
    if width == 1:
        for x in range(n):
            total = total + embed_site_operator(basis, basis.site_ids[x], local_term)
        return total
    if width != 2:
        raise ValueError("only one- and two-site local terms are supported")
    for x in range(n - 1):
        total = total + embed_two_site(basis, basis.site_ids[x], basis.site_ids[x + 1],
                                       local_term)
    return total
